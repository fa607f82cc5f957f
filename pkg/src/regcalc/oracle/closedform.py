"""One-variable closed-form functions with exact symbolic derivatives.

Nodes: ``Const``, ``X``, ``Add``, ``Mul``, ``Pow`` (integer exponent >= 0),
``Exp``, ``Sin``, ``Cos`` and ``Bump``.  ``Bump(a, b, n, arg)`` is the n-th
derivative of the standard bump supported on [a, b], evaluated at ``arg``.
Constructors fold constants, so derivatives stay small.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial import Polynomial

__all__ = [
    "ClosedFormFn", "Const", "X", "Add", "Mul", "Pow", "Exp", "Sin", "Cos", "Bump",
    "const", "x", "add", "mul", "power", "exp", "sin", "cos", "bump", "derivative",
    "substitute", "random_polynomial", "random_closed_form", "random_bump_fn",
    "BUMP_MASS",
]


class ClosedFormFn:
    """Base class; instances are immutable and hashable."""

    def __call__(self, x):
        return self.eval(np.asarray(x))

    def eval(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def diff(self) -> "ClosedFormFn":
        raise NotImplementedError

    def support(self) -> tuple | None:
        """A compact interval outside which the function vanishes, if known."""
        return None

    def is_zero(self) -> bool:
        return isinstance(self, Const) and self.c == 0

    def __add__(self, other):
        return add(self, _lift(other))

    __radd__ = __add__

    def __mul__(self, other):
        return mul(self, _lift(other))

    __rmul__ = __mul__

    def __sub__(self, other):
        return add(self, mul(const(-1.0), _lift(other)))

    def __rsub__(self, other):
        return add(_lift(other), mul(const(-1.0), self))

    def __neg__(self):
        return mul(const(-1.0), self)

    def __pow__(self, n: int):
        return power(self, n)


def _lift(v) -> ClosedFormFn:
    return v if isinstance(v, ClosedFormFn) else const(float(v))


@dataclass(frozen=True, eq=True)
class Const(ClosedFormFn):
    c: float

    def eval(self, x):
        return np.full(np.shape(x), self.c, dtype=np.result_type(x, np.float64))

    def diff(self):
        return const(0.0)

    def support(self):
        return (0.0, 0.0) if self.c == 0 else None

    def __str__(self):
        return repr(float(self.c))


@dataclass(frozen=True, eq=True)
class X(ClosedFormFn):
    def eval(self, x):
        return np.array(x, dtype=np.result_type(x, np.float64))

    def diff(self):
        return const(1.0)

    def __str__(self):
        return "x"


@dataclass(frozen=True, eq=True)
class Add(ClosedFormFn):
    a: ClosedFormFn
    b: ClosedFormFn

    def eval(self, x):
        return self.a.eval(x) + self.b.eval(x)

    def diff(self):
        return add(self.a.diff(), self.b.diff())

    def support(self):
        sa, sb = self.a.support(), self.b.support()
        if sa is None or sb is None:
            return None
        if self.a.is_zero():
            return sb
        if self.b.is_zero():
            return sa
        return (min(sa[0], sb[0]), max(sa[1], sb[1]))

    def __str__(self):
        return f"({self.a} + {self.b})"


@dataclass(frozen=True, eq=True)
class Mul(ClosedFormFn):
    a: ClosedFormFn
    b: ClosedFormFn

    def eval(self, x):
        return self.a.eval(x) * self.b.eval(x)

    def diff(self):
        return add(mul(self.a.diff(), self.b), mul(self.a, self.b.diff()))

    def support(self):
        sa, sb = self.a.support(), self.b.support()
        if sa is None:
            return sb
        if sb is None:
            return sa
        lo, hi = max(sa[0], sb[0]), min(sa[1], sb[1])
        return (lo, max(lo, hi))

    def __str__(self):
        return f"{self.a}*{self.b}"


@dataclass(frozen=True, eq=True)
class Pow(ClosedFormFn):
    base: ClosedFormFn
    n: int

    def eval(self, x):
        return self.base.eval(x) ** self.n

    def diff(self):
        return mul(mul(const(float(self.n)), power(self.base, self.n - 1)), self.base.diff())

    def support(self):
        return self.base.support()

    def __str__(self):
        return f"{self.base}^{self.n}"


@dataclass(frozen=True, eq=True)
class Exp(ClosedFormFn):
    arg: ClosedFormFn

    def eval(self, x):
        return np.exp(self.arg.eval(x))

    def diff(self):
        return mul(self, self.arg.diff())

    def __str__(self):
        return f"exp({self.arg})"


@dataclass(frozen=True, eq=True)
class Sin(ClosedFormFn):
    arg: ClosedFormFn

    def eval(self, x):
        return np.sin(self.arg.eval(x))

    def diff(self):
        return mul(cos(self.arg), self.arg.diff())

    def __str__(self):
        return f"sin({self.arg})"


@dataclass(frozen=True, eq=True)
class Cos(ClosedFormFn):
    arg: ClosedFormFn

    def eval(self, x):
        return np.cos(self.arg.eval(x))

    def diff(self):
        return mul(mul(const(-1.0), sin(self.arg)), self.arg.diff())

    def __str__(self):
        return f"cos({self.arg})"


@lru_cache(maxsize=None)
def _bump_poly(n: int) -> Polynomial:
    # h(t) = exp(-1/(1-t^2)); h^(n) = h * P_n(t) / (1-t^2)^(2n)
    t = Polynomial([0.0, 1.0])
    s = 1 - t * t
    if n == 0:
        return Polynomial([1.0])
    p = _bump_poly(n - 1)
    m = n - 1
    return -2 * t * p + s * s * p.deriv() + 4 * m * t * s * p


@dataclass(frozen=True, eq=True)
class Bump(ClosedFormFn):
    a: float
    b: float
    n: int
    arg: ClosedFormFn

    def eval(self, x):
        u = self.arg.eval(x)
        t = (2 * u - (self.a + self.b)) / (self.b - self.a)
        inside = np.abs(t) < 1
        ti = np.where(inside, t, 0)
        s = np.where(inside, 1 - ti * ti, 1)
        # h / s^(2n) in log form so the edge of the support gives 0, not 0/0
        val = np.exp(-1 / s - 2 * self.n * np.log(s)) * _bump_poly(self.n)(ti)
        scale = (2 / (self.b - self.a)) ** self.n
        return np.where(inside, val * scale, 0).astype(np.result_type(u, np.float64))

    def diff(self):
        return mul(Bump(self.a, self.b, self.n + 1, self.arg), self.arg.diff())

    def support(self):
        if isinstance(self.arg, X):
            return (self.a, self.b)
        return None

    def __str__(self):
        d = "" if self.n == 0 else f"^({self.n})"
        return f"bump[{self.a:g},{self.b:g}]{d}({self.arg})"


# ---------------------------------------------------------------------------
# smart constructors

def const(c: float) -> Const:
    return Const(float(c))


x = X()


def add(a: ClosedFormFn, b: ClosedFormFn) -> ClosedFormFn:
    if isinstance(a, Const) and isinstance(b, Const):
        return const(a.c + b.c)
    if a.is_zero():
        return b
    if b.is_zero():
        return a
    return Add(a, b)


def mul(a: ClosedFormFn, b: ClosedFormFn) -> ClosedFormFn:
    if isinstance(a, Const) and isinstance(b, Const):
        return const(a.c * b.c)
    if a.is_zero() or b.is_zero():
        return const(0.0)
    if isinstance(a, Const) and a.c == 1:
        return b
    if isinstance(b, Const) and b.c == 1:
        return a
    if isinstance(b, Const):
        a, b = b, a
    if isinstance(a, Const) and isinstance(b, Mul) and isinstance(b.a, Const):
        return mul(const(a.c * b.a.c), b.b)
    return Mul(a, b)


def power(base: ClosedFormFn, n: int) -> ClosedFormFn:
    if n < 0 or int(n) != n:
        raise ValueError("only nonnegative integer powers are in the grammar")
    n = int(n)
    if n == 0:
        return const(1.0)
    if n == 1:
        return base
    if isinstance(base, Const):
        return const(base.c ** n)
    return Pow(base, n)


def exp(a: ClosedFormFn = x) -> ClosedFormFn:
    return Exp(_lift(a))


def sin(a: ClosedFormFn = x) -> ClosedFormFn:
    return Sin(_lift(a))


def cos(a: ClosedFormFn = x) -> ClosedFormFn:
    return Cos(_lift(a))


def bump(a: float = 0.0, b: float = 1.0, arg: ClosedFormFn = x) -> Bump:
    if not b > a:
        raise ValueError("bump needs a < b")
    return Bump(float(a), float(b), 0, arg)


# integral of the standard bump exp(-1/(1-t^2)) over [-1, 1]
BUMP_MASS = 0.44399381616807937


def derivative(f: ClosedFormFn, order: int) -> ClosedFormFn:
    if order < 0:
        raise ValueError("order must be >= 0")
    for _ in range(order):
        f = f.diff()
    return f


def substitute(g: ClosedFormFn, f: ClosedFormFn) -> ClosedFormFn:
    """g with x replaced by f, i.e. the composite g o f."""
    if isinstance(g, X):
        return f
    if isinstance(g, Const):
        return g
    if isinstance(g, Add):
        return add(substitute(g.a, f), substitute(g.b, f))
    if isinstance(g, Mul):
        return mul(substitute(g.a, f), substitute(g.b, f))
    if isinstance(g, Pow):
        return power(substitute(g.base, f), g.n)
    if isinstance(g, Bump):
        return Bump(g.a, g.b, g.n, substitute(g.arg, f))
    return type(g)(substitute(g.arg, f))


# ---------------------------------------------------------------------------
# random instances

def random_polynomial(rng: np.random.Generator, max_degree: int = 4, scale: float = 2.0) -> ClosedFormFn:
    deg = int(rng.integers(1, max_degree + 1))
    coeffs = rng.uniform(-scale, scale, size=deg + 1)
    out: ClosedFormFn = const(0.0)
    for d, c in enumerate(coeffs):
        out = add(out, mul(const(round(float(c), 3)), power(x, d)))
    return out


def random_closed_form(rng: np.random.Generator, depth: int = 2) -> ClosedFormFn:
    """Random smooth expression; arguments of exp stay tame to avoid overflow."""
    if depth <= 0:
        return random_polynomial(rng, 2, 1.0)
    kind = int(rng.integers(0, 6))
    sub = random_closed_form(rng, depth - 1)
    if kind == 0:
        return add(sub, random_closed_form(rng, depth - 1))
    if kind == 1:
        return mul(sub, random_closed_form(rng, depth - 1))
    if kind == 2:
        return sin(sub)
    if kind == 3:
        return cos(sub)
    if kind == 4:
        return exp(mul(const(0.5), sin(sub)))
    return power(sub, int(rng.integers(2, 4)))


def random_bump_fn(rng: np.random.Generator) -> ClosedFormFn:
    """A compactly supported function: bump on a random interval times a smooth factor."""
    a = round(float(rng.uniform(-2, 1)), 3)
    b = round(a + float(rng.uniform(0.5, 2.5)), 3)
    amp = round(float(rng.uniform(0.5, 3.0)), 3)
    factor: Callable[[], ClosedFormFn] = [
        lambda: const(1.0),
        lambda: random_polynomial(rng, 2, 1.5),
        lambda: cos(mul(const(round(float(rng.uniform(0.5, 4)), 3)), x)),
    ][int(rng.integers(0, 3))]
    return mul(const(amp), mul(bump(a, b), factor()))
