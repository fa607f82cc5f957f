"""Composite Simpson quadrature with interval halving, L^p norms and convolutions."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import DomainError, Divergent, NonConvergent
from ..index_core import ext
from ..kernels import impl
from .closedform import ClosedFormFn

__all__ = [
    "QuadratureCfg", "Estimate", "simpson", "integrate", "lp_norm", "sup_norm",
    "convolution_lp_norm", "as_float",
]

_CHUNK = 1 << 20


@dataclass(frozen=True)
class QuadratureCfg:
    rtol: float = 1e-8
    max_depth: int = 24
    min_depth: int = 6
    atol: float = 1e-14
    max_window: int = 12       # unbounded domains: windows [-2^m, 2^m] up to this m
    sup_points: int = 4097
    conv_max_depth: int = 15


@dataclass(frozen=True)
class Estimate:
    value: float
    error: float

    def __post_init__(self):
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "error", float(self.error))

    def __float__(self):
        return self.value


def as_float(p) -> float:
    p = ext(p)
    return math.inf if p.is_inf else float(p.value)


def _eval(fn, pts: np.ndarray) -> np.ndarray:
    if len(pts) <= _CHUNK:
        return np.asarray(fn(pts), dtype=np.float64)
    return np.concatenate([np.asarray(fn(pts[s:s + _CHUNK]), dtype=np.float64)
                           for s in range(0, len(pts), _CHUNK)])


def simpson(fn, a: float, b: float, cfg: QuadratureCfg = QuadratureCfg()) -> Estimate:
    """Composite Simpson on [a, b], halving until two levels agree to rtol.

    The error estimate is |S_n - S_{n/2}| / 15 from the last two levels.
    """
    if b == a:
        return Estimate(0.0, 0.0)
    if b < a:
        r = simpson(fn, b, a, cfg)
        return Estimate(-r.value, r.error)
    ends = _eval(fn, np.array([a, b]))
    interior = _eval(fn, np.array([(a + b) / 2]))
    even_sum = 0.0              # interior points of the previous level
    odd_sum = float(interior.sum())
    n = 2
    prev = None
    for level in range(1, cfg.max_depth + 1):
        h = (b - a) / n
        s = h / 3 * (ends.sum() + 4 * odd_sum + 2 * even_sum)
        if not math.isfinite(s):
            raise NonConvergent(f"integrand is not finite on [{a}, {b}]")
        if prev is not None and level >= cfg.min_depth:
            diff = abs(s - prev)
            if diff <= max(cfg.rtol * abs(s), cfg.atol):
                return Estimate(s, diff / 15)
        prev = s
        if level == cfg.max_depth:
            break
        # halve: old odd points become even, new midpoints are the odd points
        even_sum += odd_sum
        n *= 2
        h2 = (b - a) / n
        mids = a + h2 * (2 * np.arange(n // 2) + 1)
        odd_sum = float(_eval(fn, mids).sum())
    raise NonConvergent(f"Simpson did not reach rtol {cfg.rtol} on [{a}, {b}] "
                        f"within depth {cfg.max_depth}")


def _clip(interval, support):
    a, b = interval
    if support is not None:
        a, b = max(a, support[0]), min(b, support[1])
    return a, b


def integrate(fn, interval=(-math.inf, math.inf), cfg: QuadratureCfg = QuadratureCfg(),
              support=None) -> Estimate:
    """Integral over an interval; infinite ends need compact support or decay.

    Without a known support, windows [-2^m, 2^m] grow until two successive
    values agree; an integral that keeps changing raises :class:`Divergent`.
    """
    a, b = _clip(interval, support)
    if b <= a:
        return Estimate(0.0, 0.0)
    if math.isfinite(a) and math.isfinite(b):
        return simpson(fn, a, b, cfg)
    prev, stable = None, 0
    for m in range(cfg.max_window + 1):
        R = 2.0 ** m
        lo = a if math.isfinite(a) else -R
        hi = b if math.isfinite(b) else R
        try:
            cur = simpson(fn, lo, hi, cfg) if hi > lo else Estimate(0.0, 0.0)
        except NonConvergent as e:
            raise Divergent(f"integral over [{lo}, {hi}] is not finite: {e}") from None
        if prev is not None and abs(cur.value - prev.value) <= max(cfg.rtol * abs(cur.value), cfg.atol):
            stable += 1
            if stable >= 2:
                return Estimate(cur.value, cur.error + abs(cur.value - prev.value))
        else:
            stable = 0
        prev = cur
    raise Divergent(f"integral keeps growing up to the window [-2^{cfg.max_window}, 2^{cfg.max_window}] "
                    f"(last value {prev.value:.6g})")


def sup_norm(f: ClosedFormFn, interval=(-math.inf, math.inf),
             cfg: QuadratureCfg = QuadratureCfg()) -> Estimate:
    """Supremum of |f| on a dense grid, checked against a grid half as fine."""
    a, b = _clip(interval, f.support())
    if b <= a:
        return Estimate(0.0, 0.0)
    n = cfg.sup_points

    def grid_max(lo, hi):
        fine = float(np.max(np.abs(_eval(f, np.linspace(lo, hi, n)))))
        coarse = float(np.max(np.abs(_eval(f, np.linspace(lo, hi, (n + 1) // 2)))))
        if not math.isfinite(fine):
            raise Divergent("function is unbounded")
        return Estimate(fine, abs(fine - coarse))

    if math.isfinite(a) and math.isfinite(b):
        return grid_max(a, b)
    prev, stable = None, 0
    for m in range(cfg.max_window + 1):
        R = 2.0 ** m
        cur = grid_max(a if math.isfinite(a) else -R, b if math.isfinite(b) else R)
        if prev is not None and abs(cur.value - prev.value) <= max(cfg.rtol * cur.value, cfg.atol):
            stable += 1
            if stable >= 2:
                return cur
        else:
            stable = 0
        prev = cur
    raise Divergent(f"supremum keeps growing (last value {prev.value:.6g})")


def lp_norm(f: ClosedFormFn, p, interval=(-math.inf, math.inf),
            cfg: QuadratureCfg = QuadratureCfg()) -> Estimate:
    """(integral of |f|^p)^(1/p); p = INF gives the supremum."""
    pf = as_float(p)
    if not pf > 0:
        raise DomainError(f"lp_norm needs p > 0, got {p}")
    if math.isinf(pf):
        return sup_norm(f, interval, cfg)
    integral = integrate(lambda t: np.abs(f(t)) ** pf, interval, cfg, f.support())
    if integral.value <= 0:
        return Estimate(0.0, integral.error ** (1 / pf))
    val = integral.value ** (1 / pf)
    return Estimate(val, val / pf * integral.error / integral.value)


def _grid_norm(c: np.ndarray, h: float, r: float) -> float:
    if math.isinf(r):
        return float(np.max(np.abs(c)))
    vals = np.abs(c) ** r
    if len(vals) % 2 == 0:
        vals = np.append(vals, 0.0)
    w = np.ones(len(vals))
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    return float(np.dot(w, vals) * h / 3) ** (1 / r)


def convolution_lp_norm(f: ClosedFormFn, g: ClosedFormFn, r,
                        cfg: QuadratureCfg = QuadratureCfg()) -> Estimate:
    """||f * g||_r for compactly supported f, g.

    f * g is sampled on the Minkowski sum of the supports with Simpson weights
    on f's grid; the grid is halved until the norm settles.
    """
    sf, sg = f.support(), g.support()
    if sf is None or sg is None:
        raise DomainError("convolution needs compactly supported f and g")
    rf = as_float(r)
    Lf, Lg = sf[1] - sf[0], sg[1] - sg[0]
    if Lf <= 0 or Lg <= 0:
        return Estimate(0.0, 0.0)
    prev = None
    for level in range(4, cfg.conv_max_depth + 1):
        n = 2 ** level
        h = Lf / n
        fs = _eval(f, sf[0] + h * np.arange(n + 1))
        M = int(math.ceil(Lg / h)) + 1
        gs = _eval(g, sg[0] + h * np.arange(M))
        c = impl.simpson_convolve(fs, gs, h)
        val = _grid_norm(c, h, rf)
        if prev is not None and level >= cfg.min_depth:
            diff = abs(val - prev)
            if diff <= max(cfg.rtol * abs(val), cfg.atol):
                return Estimate(val, diff)
        prev = val
    raise NonConvergent(f"convolution norm did not settle to rtol {cfg.rtol} "
                        f"within depth {cfg.conv_max_depth}")
