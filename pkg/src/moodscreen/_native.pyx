# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled phrase-counting kernel.

Semantics mirror ``_pure.count_phrases`` exactly; see that module for the
argument contract. The inner scan runs without the GIL.
"""

import numpy as np

cimport cython
from cython cimport sizeof
from libc.stdlib cimport free, malloc

BACKEND = "native"


def count_phrases(stream_ids, term_ids, term_offsets):
    cdef int[::1] stream = np.ascontiguousarray(stream_ids, dtype=np.intc)
    cdef int[::1] flat = np.ascontiguousarray(term_ids, dtype=np.intc)
    cdef int[::1] offsets = np.ascontiguousarray(term_offsets, dtype=np.intc)
    cdef Py_ssize_t n_terms = offsets.shape[0] - 1
    out = np.zeros(n_terms, dtype=np.int64)
    cdef long long[::1] counts = out
    cdef Py_ssize_t n = stream.shape[0]
    if n == 0 or n_terms == 0:
        return out
    with nogil:
        _scan(&stream[0], n, &flat[0], &offsets[0], n_terms, &counts[0])
    return out


cdef void _scan(const int* stream, Py_ssize_t n, const int* flat,
                const int* offsets, Py_ssize_t n_terms,
                long long* counts) nogil:
    cdef Py_ssize_t t, i, j, start, k
    cdef int first
    for t in range(n_terms):
        start = offsets[t]
        k = offsets[t + 1] - start
        if k <= 0 or k > n:
            continue
        first = flat[start]
        for i in range(n - k + 1):
            if stream[i] != first:
                continue
            j = 1
            while j < k and stream[i + j] == flat[start + j]:
                j += 1
            if j == k:
                counts[t] += 1
