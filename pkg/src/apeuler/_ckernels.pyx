# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels; see ``_kernels_py`` for the reference semantics."""
import numpy as np
cimport numpy as cnp

from apeuler._kernels_py import radial_terms

cnp.import_array()


def radial_derivative(x, alpha, gtab):
    cdef double[:, ::1] xv = np.ascontiguousarray(x, dtype=np.float64)
    cdef double[:, ::1] gv = np.ascontiguousarray(gtab, dtype=np.float64)
    alpha = tuple(int(a) for a in alpha)
    terms = radial_terms(alpha)
    cdef Py_ssize_t nt = len(terms)
    cdef Py_ssize_t npts = xv.shape[0]
    cdef Py_ssize_t d = xv.shape[1]
    cdef Py_ssize_t emax = max(alpha) if alpha else 0
    cdef double[::1] coef = np.array([tm[0] for tm in terms], dtype=np.float64)
    cdef long[:, ::1] expo = np.array([tm[1] for tm in terms], dtype=np.int64).reshape(nt, d)
    cdef long[::1] order = np.array([tm[2] for tm in terms], dtype=np.int64)
    # pw[i, e] = x_i^e for the current point
    cdef double[:, ::1] pw = np.ones((d, emax + 1), dtype=np.float64)
    out_arr = np.zeros(npts, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t p, t, i, e
    cdef double acc, term
    for p in range(npts):
        for i in range(d):
            for e in range(1, emax + 1):
                pw[i, e] = pw[i, e - 1] * xv[p, i]
        acc = 0.0
        for t in range(nt):
            term = coef[t] * gv[order[t], p]
            if term == 0.0:
                continue
            for i in range(d):
                term *= pw[i, expo[t, i]]
            acc += term
        out[p] = acc
    return out_arr


def power_profile_table(s, int a, int jmax):
    cdef double[::1] sv = np.ascontiguousarray(s, dtype=np.float64)
    cdef Py_ssize_t npts = sv.shape[0]
    tab_arr = np.zeros((jmax + 1, npts), dtype=np.float64)
    cdef double[:, ::1] tab = tab_arr
    cdef int top = min(jmax, a)
    cdef double[::1] c = np.zeros(top + 1, dtype=np.float64)
    cdef int j, e
    cdef double fall = 1.0
    for j in range(top + 1):
        c[j] = fall if j % 2 == 0 else -fall
        fall *= a - j
    cdef Py_ssize_t p
    cdef double om, base
    for p in range(npts):
        if sv[p] >= 1.0:
            continue
        om = 1.0 - sv[p]
        base = 1.0
        for e in range(a - top):
            base *= om
        # base = om^(a - top); climb to om^a while filling rows top..0
        for j in range(top, -1, -1):
            tab[j, p] = c[j] * base
            base *= om
    return tab_arr
