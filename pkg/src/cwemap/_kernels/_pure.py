"""Numpy implementations of the scoring kernels (fallback backend)."""

import numpy as np


def bm25_scores(tf, qtf, idf, dlnorm, k1):
    """BM25 score of one query against every document.

    tf: (n_docs, n_terms) term frequencies of the query terms per document;
    qtf: (n_terms,) query-side term counts; idf: (n_terms,) per-term idf;
    dlnorm: (n_docs,) the k1*(1 - b + b*|d|/avgdl) length normalizer.
    """
    tf = np.asarray(tf, dtype=np.float64)
    qtf = np.asarray(qtf, dtype=np.float64)
    idf = np.asarray(idf, dtype=np.float64)
    dlnorm = np.asarray(dlnorm, dtype=np.float64)
    if tf.size == 0:
        return np.zeros(tf.shape[0], dtype=np.float64)
    sat = tf * (k1 + 1.0) / (tf + dlnorm[:, None])
    return sat @ (qtf * idf)


def max_cosine(a, b):
    """Max dot product over all row pairs of two unit-normalized matrices."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        return 0.0
    return float((a @ b.T).max())


def mean_cosine(a, b):
    """Mean dot product over all row pairs of two unit-normalized matrices."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        return 0.0
    return float((a @ b.T).mean())
