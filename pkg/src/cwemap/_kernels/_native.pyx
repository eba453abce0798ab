# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled scoring kernels. Signatures mirror _pure exactly."""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def bm25_scores(object tf_in, object qtf_in, object idf_in, object dlnorm_in, double k1):
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] tf = \
        np.ascontiguousarray(tf_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] qtf = np.asarray(qtf_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] idf = np.asarray(idf_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dlnorm = np.asarray(dlnorm_in, dtype=np.float64)

    cdef Py_ssize_t n_docs = tf.shape[0]
    cdef Py_ssize_t n_terms = tf.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(n_docs, dtype=np.float64)
    cdef Py_ssize_t d, t
    cdef double f, s, norm

    for d in range(n_docs):
        s = 0.0
        norm = dlnorm[d]
        for t in range(n_terms):
            f = tf[d, t]
            if f > 0.0:
                s += qtf[t] * idf[t] * f * (k1 + 1.0) / (f + norm)
        out[d] = s
    return out


def max_cosine(object a_in, object b_in):
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] a = \
        np.ascontiguousarray(a_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] b = \
        np.ascontiguousarray(b_in, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        return 0.0
    cdef Py_ssize_t n = a.shape[0], m = b.shape[0], dim = a.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double best = -1e308
    cdef double dot
    for i in range(n):
        for j in range(m):
            dot = 0.0
            for k in range(dim):
                dot += a[i, k] * b[j, k]
            if dot > best:
                best = dot
    return best


def mean_cosine(object a_in, object b_in):
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] a = \
        np.ascontiguousarray(a_in, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2, mode="c"] b = \
        np.ascontiguousarray(b_in, dtype=np.float64)
    if a.size == 0 or b.size == 0:
        return 0.0
    cdef Py_ssize_t n = a.shape[0], m = b.shape[0], dim = a.shape[1]
    cdef Py_ssize_t i, j, k
    cdef double total = 0.0
    cdef double dot
    for i in range(n):
        for j in range(m):
            dot = 0.0
            for k in range(dim):
                dot += a[i, k] * b[j, k]
            total += dot
    return total / (n * m)
