"""Numerical checks of the inequalities and formulas behind the index calculus.

Every check returns :class:`CaseResult` rows that print as
``SUITE CASE verdict lhs rhs tol``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from math import comb

import numpy as np

from ..errors import Divergent
from ..families import FamilyDescriptor, make_lp_holder_family, make_lp_young_family, unary_map
from ..index_core import ZERO_SPACE, ExtIndex, GammaRange, ext, format_index, star_harmonic, star_young
from ..kernels import canonical_partitions, impl
from .closedform import (
    BUMP_MASS, ClosedFormFn, bump, const, cos, derivative, exp, mul, random_bump_fn,
    random_closed_form, random_polynomial, sin, substitute, x,
)
from .quadrature import QuadratureCfg, as_float, convolution_lp_norm, lp_norm, sup_norm

__all__ = [
    "CaseResult", "inequality_tol", "verify_holder", "verify_young",
    "verify_faa_di_bruno", "verify_membership", "fd_derivative", "partition_sum",
    "SUITES", "run_suite",
]

INEQ_RTOL = 1e-6


def _num(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (ExtIndex, int)) or v is ZERO_SPACE:
        return format_index(v)
    v = float(v)
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.12g}"


@dataclass(frozen=True)
class CaseResult:
    suite: str
    case: str
    passed: bool
    lhs: object
    rhs: object
    tol: object
    note: str = ""

    def line(self) -> str:
        verdict = "PASS" if self.passed else "FAIL"
        return f"{self.suite} {self.case} {verdict} {_num(self.lhs)} {_num(self.rhs)} {_num(self.tol)}"


def inequality_tol(rhs: float) -> float:
    return INEQ_RTOL * max(1.0, abs(rhs))


def _holds(lhs: float, rhs: float) -> tuple[bool, float]:
    tol = inequality_tol(rhs)
    return lhs <= rhs + tol, tol


# ---------------------------------------------------------------------------
# inequalities

def verify_holder(f: ClosedFormFn, g: ClosedFormFn, p, q, interval=(0.0, 1.0),
                  cfg: QuadratureCfg = QuadratureCfg(), case: str = "holder") -> CaseResult:
    """||fg||_s <= ||f||_p ||g||_q with 1/s = 1/p + 1/q (s < 1 allowed and flagged)."""
    s = star_harmonic(p, q)
    lhs = lp_norm(mul(f, g), s, interval, cfg).value
    rhs = lp_norm(f, p, interval, cfg).value * lp_norm(g, q, interval, cfg).value
    ok, tol = _holds(lhs, rhs)
    note = f"s={format_index(s)}" + (" (s<1)" if s < 1 else "")
    return CaseResult("holder", case, ok, lhs, rhs, tol, note)


def verify_young(f: ClosedFormFn, g: ClosedFormFn, i, j,
                 cfg: QuadratureCfg = QuadratureCfg(), case: str = "young") -> CaseResult:
    """||f*g||_r <= ||f||_i ||g||_j with 1/r = 1/i + 1/j - 1."""
    r = star_young(i, j)
    lhs = convolution_lp_norm(f, g, r, cfg).value
    rhs = lp_norm(f, i, cfg=cfg).value * lp_norm(g, j, cfg=cfg).value
    ok, tol = _holds(lhs, rhs)
    return CaseResult("young", case, ok, lhs, rhs, tol, f"r={format_index(r)}")


# ---------------------------------------------------------------------------
# Faa di Bruno

def partition_sum(f: ClosedFormFn, g: ClosedFormFn, order: int, pts) -> tuple[np.ndarray, int]:
    """Sum over partitions of [order] of g^(#blocks)(f) * prod f^(|block|); also the term count."""
    pts = np.asarray(pts, dtype=np.float64)
    _, nblocks, sizes = canonical_partitions(order)
    fx = f(pts)
    gders = np.stack([derivative(g, n)(fx) for n in range(order + 1)])
    fders = np.stack([derivative(f, n)(pts) for n in range(order + 1)])
    return impl.fdb_sum(nblocks, sizes, gders, fders), len(nblocks)


def fd_derivative(fn: ClosedFormFn, order: int, x0: float) -> float:
    """Central difference of the given order with one Richardson step.

    Step h = eps^(1/(order+2)) scaled by max(1, |x0|); sums run in extended
    precision so the O(eps/h^order) cancellation stays small.
    """
    eps = np.finfo(np.float64).eps
    h0 = eps ** (1.0 / (order + 2)) * max(1.0, abs(x0))
    ks = np.arange(order + 1)
    weights = np.array([(-1) ** k * comb(order, k) for k in ks], dtype=np.longdouble)

    def central(h):
        h = np.longdouble(h)
        pts = np.longdouble(x0) + (np.longdouble(order) / 2 - ks.astype(np.longdouble)) * h
        vals = np.asarray(fn(pts), dtype=np.longdouble)
        return np.dot(weights, vals) / h ** order

    d1, d2 = central(h0), central(h0 / 2)
    return float((4 * d2 - d1) / 3)


def _rel_ok(a: float, b: float, rtol: float) -> tuple[bool, float]:
    tol = rtol * max(1.0, abs(b))
    return abs(a - b) <= tol, tol


def verify_faa_di_bruno(f: ClosedFormFn, g: ClosedFormFn, order: int, points,
                        polynomial: bool = False, case: str = "fdb") -> list[CaseResult]:
    """Partition sum vs the symbolic derivative of g o f, and vs finite differences.

    Symbolic agreement is held to 1e-9 for polynomial inputs (1e-7 otherwise,
    where cancellation in the transcendental terms costs digits); finite
    differences to 1e-4.  Tolerances are relative with an absolute floor of 1.
    """
    if not 1 <= order <= 6:
        raise ValueError("order must lie in 1..6")
    pts = np.atleast_1d(np.asarray(points, dtype=np.float64))
    psum, terms = partition_sum(f, g, order, pts)
    comp = substitute(g, f)
    sym = derivative(comp, order)(pts)
    out = []
    sym_rtol = 1e-9 if polynomial else 1e-7
    for x0, a, b in zip(pts.tolist(), psum.tolist(), np.atleast_1d(sym).tolist()):
        ok, tol = _rel_ok(a, b, sym_rtol)
        out.append(CaseResult("fdb", f"{case}[x={x0:.6g},n={order}]:symbolic", ok, a, b, tol,
                              f"terms={terms}"))
        fd = fd_derivative(comp, order, x0)
        ok, tol = _rel_ok(a, fd, 1e-4)
        out.append(CaseResult("fdb", f"{case}[x={x0:.6g},n={order}]:fd", ok, a, fd, tol))
    return out


# ---------------------------------------------------------------------------
# jet membership

def verify_membership(f: ClosedFormFn, family: FamilyDescriptor, alpha, beta, k: int,
                      interval=None, cfg: QuadratureCfg = QuadratureCfg(),
                      case: str = "membership") -> list[CaseResult]:
    """Per-order membership of f^(i) in B_{alpha(i)} and C^{k - beta(i)}.

    Grammar functions are smooth, so the C side only matters where the class
    is the zero space.  L^p sides are decided by quadrature; a divergent
    integral means non-member.  ``passed`` is the membership verdict.
    """
    alpha, beta = unary_map(alpha), unary_map(beta)
    if interval is None:
        interval = (-math.inf, math.inf) if family.domain_kind == "unbounded" else (0.0, 1.0)
    out = []
    for i in range(k + 1):
        d = derivative(f, i)
        val = family.to_value(alpha(i))
        name = f"{case}[order={i}]"
        smooth_neg = ext(beta(i)) > k
        if val is ZERO_SPACE or smooth_neg:
            zero = d.is_zero() or sup_norm(d, _finite(interval), cfg).value == 0.0
            out.append(CaseResult("membership", name, zero, "zero" if zero else "nonzero", "zero", 0))
            continue
        if family.kind in ("lp-holder", "lp-young"):
            try:
                norm = lp_norm(d, val, interval, cfg)
                out.append(CaseResult("membership", name, True, norm.value, "inf", norm.error,
                                      f"p={format_index(val)}"))
            except Divergent:
                out.append(CaseResult("membership", name, False, "inf", "inf", 0,
                                      f"p={format_index(val)}"))
        else:
            out.append(CaseResult("membership", name, True, "smooth", "smooth", 0))
    return out


def _finite(interval):
    a, b = interval
    return (a if math.isfinite(a) else -64.0, b if math.isfinite(b) else 64.0)


# ---------------------------------------------------------------------------
# seeded suites

_HOLDER_VALUES = (1, 2, 3, 4, 6, 8, "inf")
_YOUNG_PAIRS = [(i, j) for i in ("1", "4/3", "3/2", "2", "3", "inf")
                for j in ("1", "4/3", "3/2", "2", "3", "inf")
                if ext(i).reciprocal() + ext(j).reciprocal() >= 1]


def holder_suite(seed: int = 0, n: int = 100) -> list[CaseResult]:
    rng = np.random.default_rng(seed)
    out = [
        verify_holder(const(1.0), const(1.0), 2, 2, case="ones_p2_q2"),
        verify_holder(x, x, 2, 2, case="x_x_p2_q2"),
        verify_holder(x, 1.0 - x, 2, 2, case="x_1mx_p2_q2"),
    ]
    eq = out[1]
    ok = abs(eq.lhs - 1 / 3) <= 1e-9 and abs(eq.rhs - 1 / 3) <= 1e-9
    out.append(CaseResult("holder", "x_x_equality", ok, eq.lhs, eq.rhs, 1e-9))
    for t in range(n):
        fam = make_lp_holder_family(
            [ext(v) for v in rng.choice(_HOLDER_VALUES, size=2).tolist()], mode="int")
        p, q = fam.grading(0), fam.grading(1)
        f, g = random_bump_fn(rng), random_bump_fn(rng)
        out.append(verify_holder(f, g, p, q, (-math.inf, math.inf),
                                 case=f"random{t}[p={format_index(p)},q={format_index(q)}]"))
    return out


def young_suite(seed: int = 0, n: int = 100) -> list[CaseResult]:
    rng = np.random.default_rng(seed)
    unit = mul(const(2 / BUMP_MASS), bump(0.0, 1.0))
    out = [
        verify_young(unit, unit, 1, 1, case="unit_bump_i1_j1"),
        verify_young(unit, unit, 1, 2, case="unit_bump_i1_j2"),
    ]
    eq = out[0]
    ok = abs(eq.lhs - eq.rhs) <= 1e-6
    out.append(CaseResult("young", "unit_bump_equality", ok, eq.lhs, eq.rhs, 1e-6))
    for t in range(n):
        i, j = _YOUNG_PAIRS[int(rng.integers(len(_YOUNG_PAIRS)))]
        fam = make_lp_young_family([ext(i), ext(j)])
        f, g = random_bump_fn(rng), random_bump_fn(rng)
        out.append(verify_young(f, g, fam.grading(0), fam.grading(1),
                                case=f"random{t}[i={i},j={j}]"))
    return out


def fdb_suite(seed: int = 0, n_poly: int = 50, n_trans: int = 20) -> list[CaseResult]:
    rng = np.random.default_rng(seed)
    out = verify_faa_di_bruno(x ** 3, x ** 2, 2, [1.0], polynomial=True, case="y2_x3")
    exact = 30.0
    got = out[0].lhs
    out.append(CaseResult("fdb", "y2_x3_exact", got == exact, got, exact, 0))
    out += verify_faa_di_bruno(sin(), exp(), 3, [0.0], case="exp_sin")
    for t in range(n_poly):
        f, g = random_polynomial(rng), random_polynomial(rng)
        order = int(rng.integers(1, 5))
        pts = np.round(rng.uniform(-1.5, 1.5, size=3), 3)
        out += verify_faa_di_bruno(f, g, order, pts, polynomial=True, case=f"poly{t}")
    for t in range(n_trans):
        f, g = random_closed_form(rng, 2), random_closed_form(rng, 1)
        order = int(rng.integers(1, 5))
        pts = np.round(rng.uniform(-1.0, 1.0, size=2), 3)
        out += verify_faa_di_bruno(f, g, order, pts, case=f"trans{t}")
    return out


def membership_suite(seed: int = 0) -> list[CaseResult]:
    from ..families import make_ck_family
    out = []
    b = bump(-1.0, 1.0)
    for p in ("1", "2", "inf"):
        fam = make_lp_holder_family(f"const:{p}", mode="int", domain_kind="unbounded")
        out += verify_membership(b, fam, f"const:{p}", "id", 3, case=f"bump_L{p}")
    l2 = make_lp_holder_family("const:2", mode="int", domain_kind="unbounded")
    res = verify_membership(x, l2, "const:2", "id", 0, case="x_R_L2")
    out += [CaseResult(r.suite, r.case + "_expect_nonmember", not r.passed, r.lhs, r.rhs, r.tol)
            for r in res]
    out += verify_membership(const(0.0), l2, "const:2", "id", 3, case="zero_L2")
    ck = make_ck_family(3, "id")
    out += verify_membership(sin(), ck, "id", "id", 3, case="sin_Ck")
    return out


SUITES = {
    "holder": holder_suite,
    "young": young_suite,
    "fdb": fdb_suite,
    "membership": membership_suite,
}


def run_suite(name: str, seed: int = 0) -> list[CaseResult]:
    if name == "all":
        return [r for key in SUITES for r in SUITES[key](seed=seed)]
    return SUITES[name](seed=seed)
