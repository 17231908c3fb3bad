"""moodscreen: depressive-content screening for video transcripts,
comments, and watch histories.

Library layers: ``text`` (tokenization and phrase matching), ``lexicon``
(seed-term category expansion over word embeddings), ``cesd``
(comment/video depression-density scoring), ``features`` + ``nb``
(TF-IDF and lexicon features feeding a multinomial Naive Bayes
classifier), ``evaluate`` (confusion matrices and the comment-score
proxy protocol), ``patterns`` (watch-history analysis), ``corpus``
(JSONL data model), and ``cli`` (the ``moodscreen`` command).
"""

__version__ = "0.1.0"
