from math import comb

import numpy as np
import pytest

from regcalc import kernels
from regcalc._kernels_py import bell


def bell_recurrence(n):
    b = [1]
    for m in range(n):
        b.append(sum(comb(m, k) * b[k] for k in range(m + 1)))
    return b[n]


def partitions_oracle(items):
    # every partition of a list: insert the first element into each block of a partition of the rest
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for p in partitions_oracle(rest):
        yield [[first]] + p
        for k in range(len(p)):
            yield p[:k] + [[first] + p[k]] + p[k + 1:]


def test_bell_matches_recurrence():
    assert [bell(n) for n in range(1, 13)] == [bell_recurrence(n) for n in range(1, 13)]


@pytest.mark.parametrize("n", range(1, 9))
def test_rgs_partitions(backend, n):
    rgs = np.asarray(backend.rgs_partitions(n))
    assert rgs.shape == (bell_recurrence(n), n)
    assert len({tuple(r) for r in rgs.tolist()}) == len(rgs)
    # restricted growth: first label 0, each label at most 1 + max of the prefix
    for row in rgs.tolist():
        assert row[0] == 0
        assert all(row[k] <= max(row[:k]) + 1 for k in range(1, n))


@pytest.mark.parametrize("n", [1, 4, 7])
def test_block_profiles(backend, n):
    rgs = np.asarray(backend.rgs_partitions(n))
    nb, sz = backend.block_profiles(rgs)
    for row, b, sizes in zip(rgs.tolist(), np.asarray(nb).tolist(), np.asarray(sz).tolist()):
        assert b == max(row) + 1
        assert sizes[:b] == [row.count(lab) for lab in range(b)]
        assert all(s == 0 for s in sizes[b:])


@pytest.mark.parametrize("n", range(1, 8))
def test_canonical_partitions_against_oracle(n):
    rgs, nblocks, _ = kernels.canonical_partitions(n)
    got = []
    for row, nb in zip(rgs.tolist(), nblocks.tolist()):
        blocks = [[] for _ in range(nb)]
        for pos, lab in enumerate(row, start=1):
            blocks[lab].append(pos)
        got.append(tuple(tuple(b) for b in blocks))
    want = sorted((tuple(sorted(tuple(sorted(b)) for b in p)) for p in partitions_oracle(list(range(1, n + 1)))),
                  key=lambda bl: (len(bl), bl))
    assert got == want


def test_canonical_partitions_read_only():
    rgs, _, _ = kernels.canonical_partitions(4)
    with pytest.raises(ValueError):
        rgs[0, 0] = 1


def test_fdb_sum_against_naive(backend):
    rng = np.random.default_rng(1)
    n = 5
    rgs, nb, sz = kernels.canonical_partitions(n)
    g = rng.standard_normal((n + 1, 7))
    f = rng.standard_normal((n + 1, 7))
    want = np.zeros(7)
    for b, sizes in zip(nb.tolist(), sz.tolist()):
        term = g[b].copy()
        for s in sizes[:b]:
            term *= f[s]
        want += term
    np.testing.assert_allclose(backend.fdb_sum(nb, sz, g, f), want, rtol=1e-13)


def test_simpson_convolve_against_direct(backend):
    rng = np.random.default_rng(2)
    f = rng.standard_normal(9)
    g = rng.standard_normal(5)
    w = np.array([1, 4, 2, 4, 2, 4, 2, 4, 1], dtype=float)
    want = np.array([sum(w[m] * f[m] * g[k - m] for m in range(9) if 0 <= k - m < 5)
                     for k in range(13)]) * 0.1 / 3
    np.testing.assert_allclose(backend.simpson_convolve(f, g, 0.1), want, rtol=1e-13)
    with pytest.raises(ValueError):
        backend.simpson_convolve(np.ones(4), g, 0.1)


def test_backends_agree_on_retract_tags():
    mods = kernels.available_backends()
    if "compiled" not in mods:
        pytest.skip("compiled extension not built")
    rng = np.random.default_rng(3)
    for _ in range(50):
        m = int(rng.integers(1, 7))
        up = np.triu(rng.random((m, m)) < 0.6, 1)
        ov = (up | up.T | np.eye(m, dtype=bool)).astype(np.uint8)
        tb = np.triu(rng.random((m, m)) < 0.5, 1)
        bt = ((tb | tb.T | np.eye(m, dtype=bool)) & ov.astype(bool)).astype(np.uint8)
        table = rng.integers(0, 2, size=2).astype(np.uint8)
        a = mods["python"].retract_tags(ov, bt, table)
        b = mods["compiled"].retract_tags(ov, bt, table)
        for x, y in zip(a, b):
            np.testing.assert_array_equal(np.asarray(x), np.asarray(y))


def test_pure_python_env_switch():
    import subprocess
    import sys
    out = subprocess.run([sys.executable, "-c", "from regcalc.kernels import BACKEND; print(BACKEND)"],
                         env={"REGCALC_PURE_PYTHON": "1", "PATH": ""}, capture_output=True, text=True)
    assert out.stdout.strip() == "python"
