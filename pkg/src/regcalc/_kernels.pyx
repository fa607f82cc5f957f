# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops.  ``_kernels_py`` mirrors every function here."""
import numpy as np
cimport numpy as cnp

cnp.import_array()

from ._kernels_py import bell

cdef enum:
    MAXN = 32


def rgs_partitions(int n):
    """Restricted growth strings of length n in lexicographic order."""
    if n < 1 or n > MAXN:
        raise ValueError("n out of range")
    cdef Py_ssize_t total = bell(n)
    out = np.zeros((total, n), dtype=np.int8)
    cdef signed char[:, ::1] o = out
    cdef int a[MAXN]
    cdef int mx[MAXN]
    cdef int s, t
    cdef Py_ssize_t row = 0
    for s in range(n):
        a[s] = 0
        mx[s] = 0
    while True:
        for s in range(n):
            o[row, s] = a[s]
        row += 1
        t = n - 1
        while t >= 1 and a[t] == mx[t - 1] + 1:
            t -= 1
        if t < 1:
            break
        a[t] += 1
        mx[t] = mx[t - 1] if mx[t - 1] > a[t] else a[t]
        for s in range(t + 1, n):
            a[s] = 0
            mx[s] = mx[t]
    return out


def block_profiles(cnp.ndarray rgs_arr):
    """Per partition: block count and block sizes in least-element order."""
    cdef const signed char[:, ::1] rgs = np.ascontiguousarray(rgs_arr, dtype=np.int8)
    cdef Py_ssize_t P = rgs.shape[0], n = rgs.shape[1], p, s
    nb_arr = np.zeros(P, dtype=np.int64)
    sz_arr = np.zeros((P, n), dtype=np.int64)
    cdef cnp.int64_t[::1] nb = nb_arr
    cdef cnp.int64_t[:, ::1] sz = sz_arr
    cdef int lab, top
    for p in range(P):
        top = -1
        for s in range(n):
            lab = rgs[p, s]
            sz[p, lab] += 1
            if lab > top:
                top = lab
        nb[p] = top + 1
    return nb_arr, sz_arr


def fdb_sum(cnp.ndarray nblocks_arr, cnp.ndarray sizes_arr,
            cnp.ndarray gders_arr, cnp.ndarray fders_arr):
    """Sum over partitions of g^(#blocks) * prod_blocks f^(|block|) per point."""
    cdef const cnp.int64_t[::1] nb = np.ascontiguousarray(nblocks_arr, dtype=np.int64)
    cdef const cnp.int64_t[:, ::1] sz = np.ascontiguousarray(sizes_arr, dtype=np.int64)
    cdef const double[:, ::1] g = np.ascontiguousarray(gders_arr, dtype=np.float64)
    cdef const double[:, ::1] f = np.ascontiguousarray(fders_arr, dtype=np.float64)
    cdef Py_ssize_t P = sz.shape[0], X = g.shape[1], p, x, b
    out_arr = np.zeros(X, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef double term
    for p in range(P):
        for x in range(X):
            term = g[nb[p], x]
            for b in range(nb[p]):
                term *= f[sz[p, b], x]
            out[x] += term
    return out_arr


def simpson_convolve(f_arr, g_arr, double h):
    """Composite-Simpson approximation of (f*g) on the shared grid of spacing h.

    The inner sum is a plain discrete convolution; numpy's vectorized routine
    beats a scalar loop here, so only the Simpson weighting is done locally.
    """
    cdef const double[::1] f = np.ascontiguousarray(f_arr, dtype=np.float64)
    cdef Py_ssize_t N = f.shape[0], m
    if N % 2 == 0 or N < 3:
        raise ValueError("f needs an odd number (>= 3) of samples")
    wf_arr = np.empty(N, dtype=np.float64)
    cdef double[::1] wf = wf_arr
    for m in range(N):
        if m == 0 or m == N - 1:
            wf[m] = f[m]
        elif m % 2 == 1:
            wf[m] = 4.0 * f[m]
        else:
            wf[m] = 2.0 * f[m]
    return np.convolve(wf_arr, np.ascontiguousarray(g_arr, dtype=np.float64)) * (h / 3.0)


def retract_tags(cnp.ndarray overlap_arr, cnp.ndarray btag_arr, cnp.ndarray table_arr):
    """Chart pairs (j;i) plus their overlap and B-tag matrices.

    ``table[x]`` is the tag of the absorbed word r(.) o phi_li o r(.)^-1 when
    the middle transition has tag x (0 = C^k, 1 = B).
    """
    cdef const unsigned char[:, ::1] O = np.ascontiguousarray(overlap_arr, dtype=np.uint8)
    cdef const unsigned char[:, ::1] T = np.ascontiguousarray(btag_arr, dtype=np.uint8)
    cdef const unsigned char[::1] tab = np.ascontiguousarray(table_arr, dtype=np.uint8)
    cdef Py_ssize_t m = O.shape[0], i, j, c, d, C = 0
    for i in range(m):
        for j in range(m):
            if O[i, j]:
                C += 1
    charts_arr = np.zeros((C, 2), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] ch = charts_arr
    c = 0
    for i in range(m):
        for j in range(m):
            if O[i, j]:
                ch[c, 0] = j
                ch[c, 1] = i
                c += 1
    ov_arr = np.zeros((C, C), dtype=np.uint8)
    bt_arr = np.zeros((C, C), dtype=np.uint8)
    cdef unsigned char[:, ::1] NO = ov_arr
    cdef unsigned char[:, ::1] NB = bt_arr
    cdef Py_ssize_t a, b, k, l
    for c in range(C):
        a = ch[c, 0]
        b = ch[c, 1]
        for d in range(C):
            k = ch[d, 0]
            l = ch[d, 1]
            if O[b, k] and O[b, l] and O[a, k] and O[a, l]:
                NO[c, d] = 1
                NB[c, d] = tab[T[l, b]]
    return charts_arr, ov_arr, bt_arr
