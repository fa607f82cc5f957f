"""Interpreter fallback for the compiled kernels; same names, same results."""
import numpy as np


def bell(n):
    row = [1]
    for _ in range(n):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
    return row[0]


def rgs_partitions(n):
    if n < 1 or n > 32:
        raise ValueError("n out of range")
    out = np.zeros((bell(n), n), dtype=np.int8)
    a = [0] * n
    mx = [0] * n
    row = 0
    while True:
        out[row] = a
        row += 1
        t = n - 1
        while t >= 1 and a[t] == mx[t - 1] + 1:
            t -= 1
        if t < 1:
            break
        a[t] += 1
        mx[t] = max(mx[t - 1], a[t])
        for s in range(t + 1, n):
            a[s] = 0
            mx[s] = mx[t]
    return out


def block_profiles(rgs):
    rgs = np.asarray(rgs, dtype=np.int64)
    P, n = rgs.shape
    sizes = np.zeros((P, n), dtype=np.int64)
    rows = np.arange(P)
    for s in range(n):
        np.add.at(sizes, (rows, rgs[:, s]), 1)
    return rgs.max(axis=1) + 1, sizes


def fdb_sum(nblocks, sizes, gders, fders):
    gders = np.asarray(gders, dtype=np.float64)
    fders = np.asarray(fders, dtype=np.float64)
    out = np.zeros(gders.shape[1])
    for nb, sz in zip(nblocks, sizes):
        term = gders[nb].copy()
        for b in range(nb):
            term *= fders[sz[b]]
        out += term
    return out


def simpson_convolve(f, g, h):
    f = np.asarray(f, dtype=np.float64)
    g = np.asarray(g, dtype=np.float64)
    N = f.shape[0]
    if N % 2 == 0 or N < 3:
        raise ValueError("f needs an odd number (>= 3) of samples")
    w = np.ones(N)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return np.convolve(w * f, g) * (h / 3.0)


def retract_tags(overlap, btag, table):
    O = np.asarray(overlap, dtype=bool)
    T = np.asarray(btag, dtype=np.uint8)
    tab = np.asarray(table, dtype=np.uint8)
    i_idx, j_idx = np.nonzero(O)
    charts = np.stack([j_idx, i_idx], axis=1).astype(np.int64)
    a = charts[:, 0][:, None]
    b = charts[:, 1][:, None]
    k = charts[:, 0][None, :]
    l = charts[:, 1][None, :]
    ov = O[b, k] & O[b, l] & O[a, k] & O[a, l]
    bt = np.where(ov, tab[T[l, b]], 0).astype(np.uint8)
    return charts, ov.astype(np.uint8), bt
