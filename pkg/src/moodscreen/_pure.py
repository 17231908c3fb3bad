"""Pure-Python phrase-counting kernel.

Fallback used when the compiled extension is unavailable. Must stay
semantically identical to ``_native.pyx``: counts are plain integers, so
both backends agree bit for bit.
"""

from __future__ import annotations

import numpy as np

BACKEND = "pure"


def count_phrases(stream_ids, term_ids, term_offsets) -> np.ndarray:
    """Count overlapping occurrences of each term in an id-encoded stream.

    stream_ids: token ids in document order, -1 for tokens outside the
        matcher vocabulary (they can never match).
    term_ids / term_offsets: flattened term token ids; term ``t`` spans
        ``term_ids[term_offsets[t]:term_offsets[t + 1]]``.
    """
    stream = [int(x) for x in stream_ids]
    flat = [int(x) for x in term_ids]
    offsets = [int(x) for x in term_offsets]
    n_terms = len(offsets) - 1
    counts = np.zeros(n_terms, dtype=np.int64)
    if not stream:
        return counts

    # Bucket terms by first token id so each stream position only probes
    # candidates that can actually start there.
    buckets: dict[int, list[tuple[int, list[int]]]] = {}
    for t in range(n_terms):
        ids = flat[offsets[t] : offsets[t + 1]]
        buckets.setdefault(ids[0], []).append((t, ids))

    n = len(stream)
    for i, tok in enumerate(stream):
        candidates = buckets.get(tok)
        if not candidates:
            continue
        for t, ids in candidates:
            k = len(ids)
            if i + k > n:
                continue
            if stream[i : i + k] == ids:
                counts[t] += 1
    return counts
