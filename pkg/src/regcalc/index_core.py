"""Exact index arithmetic over the nonnegative rationals extended by infinity.

Every grading value, product exponent and regularity order in the package is
an :class:`ExtIndex`.  Floats never enter this layer.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from functools import total_ordering
from itertools import product
from typing import Callable, Iterable, Mapping, Sequence, Union

from .errors import DomainError, InvalidExponents

__all__ = [
    "ExtIndex", "INF", "ZERO_SPACE", "ext", "sort_key", "GammaRange", "default_gamma", "IndexFn",
    "LawReport", "Counterexample", "MIN", "MAX", "ADD", "HOLDER", "YOUNG",
    "star_holder", "star_harmonic", "star_young", "check_additive", "check_left_distributive",
    "check_right_distributive", "check_index_morphism", "format_index",
]

Number = Union[int, Fraction, "ExtIndex", str]


@total_ordering
class ExtIndex:
    """A nonnegative exact rational or the symbol ``INF``.

    Equality and hashing agree with :class:`int` and :class:`fractions.Fraction`
    for finite values, so ``ExtIndex(3) == 3`` and both hash alike.
    """

    __slots__ = ("_v",)

    def __init__(self, value: Number):
        if isinstance(value, ExtIndex):
            v = value._v
        elif isinstance(value, str):
            s = value.strip().lower()
            v = None if s in ("inf", "infinity", "∞") else Fraction(s)
        elif isinstance(value, bool):
            raise TypeError("bool is not an index")
        elif isinstance(value, (int, Fraction)):
            v = Fraction(value)
        elif isinstance(value, float) and value == float("inf"):
            v = None
        else:
            raise TypeError(f"cannot build an exact index from {value!r}")
        if v is not None and v < 0:
            raise DomainError(f"index must be nonnegative, got {v}")
        self._v = v

    @property
    def is_inf(self) -> bool:
        return self._v is None

    @property
    def value(self) -> Fraction:
        if self._v is None:
            raise DomainError("INF has no finite value")
        return self._v

    def is_integer(self) -> bool:
        return self._v is not None and self._v.denominator == 1

    def reciprocal(self) -> Fraction:
        """1/x as an exact Fraction; 1/INF = 0.  Zero has no reciprocal."""
        if self._v is None:
            return Fraction(0)
        if self._v == 0:
            raise DomainError("reciprocal of zero")
        return 1 / self._v

    def floor(self) -> "ExtIndex":
        if self._v is None:
            return self
        return ExtIndex(self._v.numerator // self._v.denominator)

    # arithmetic ---------------------------------------------------------
    def __add__(self, other):
        o = ext(other)
        if self._v is None or o._v is None:
            return INF
        return ExtIndex(self._v + o._v)

    __radd__ = __add__

    def __sub__(self, other):
        o = ext(other)
        if o._v is None:
            raise DomainError("cannot subtract INF")
        if self._v is None:
            return INF
        return ExtIndex(self._v - o._v)

    def __rsub__(self, other):
        return ext(other) - self

    def __mul__(self, other):
        o = ext(other)
        if self._v is None or o._v is None:
            if self._v == 0 or o._v == 0:
                raise DomainError("0 * INF is undefined")
            return INF
        return ExtIndex(self._v * o._v)

    __rmul__ = __mul__

    # comparison ---------------------------------------------------------
    def _key(self):
        return (1, 0) if self._v is None else (0, self._v)

    def __eq__(self, other):
        if other is ZERO_SPACE:
            return False
        try:
            o = ext(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self._v == o._v

    def __lt__(self, other):
        if other is ZERO_SPACE:
            raise TypeError("the zero space is not an index; compare with sort_key")
        try:
            o = ext(other)
        except (TypeError, ValueError):
            return NotImplemented
        return self._key() < o._key()

    def __hash__(self):
        return hash(float("inf")) if self._v is None else hash(self._v)

    def __str__(self):
        return format_index(self)

    def __repr__(self):
        return f"ExtIndex('{format_index(self)}')"

    def __reduce__(self):
        return (ExtIndex, ("inf" if self._v is None else str(self._v),))


INF = ExtIndex("inf")


class _ZeroSpace:
    """Grading value of a family member that is the zero space.

    Sits below every :class:`ExtIndex` when sorting; products with it are
    zero and sums with it return the other operand.
    """

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "ZERO_SPACE"

    __str__ = __repr__

    def __reduce__(self):
        return (_ZeroSpace, ())


ZERO_SPACE = _ZeroSpace()


def ext(x) -> ExtIndex:
    """Coerce ``x`` to :class:`ExtIndex`; ``ZERO_SPACE`` passes through."""
    if isinstance(x, ExtIndex) or x is ZERO_SPACE:
        return x
    return ExtIndex(x)


def sort_key(x):
    """Total order on grading values with ``ZERO_SPACE`` lowest."""
    return (-1, 0) if x is ZERO_SPACE else ext(x)._key()


def format_index(x) -> str:
    if x is ZERO_SPACE:
        return "zero"
    x = ext(x)
    if x.is_inf:
        return "inf"
    v = x.value
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


# ---------------------------------------------------------------------------
# the two product exponents

def star_holder(i, j) -> ExtIndex:
    """Hoelder product exponent ``i*j/(i+j)``, i.e. 1/r = 1/i + 1/j."""
    i, j = ext(i), ext(j)
    if i < 1 or j < 1:
        raise DomainError(f"Hoelder star needs i, j >= 1, got ({i}, {j})")
    if i.is_inf:
        return j
    if j.is_inf:
        return i
    return ExtIndex(i.value * j.value / (i.value + j.value))


def star_harmonic(i, j) -> ExtIndex:
    """Harmonic sum 1/r = 1/i + 1/j on all of [0, INF], with 0 absorbing.

    Agrees with :func:`star_holder` on its domain; below 1 it is the exponent
    rule of Hoelder's inequality for quasi-norms, which folds of many factors
    reach.
    """
    i, j = ext(i), ext(j)
    if i == 0 or j == 0:
        return ExtIndex(0)
    if i.is_inf:
        return j
    if j.is_inf:
        return i
    return ExtIndex(i.value * j.value / (i.value + j.value))


def star_young(i, j) -> ExtIndex:
    """Young convolution exponent r with 1/r = 1/i + 1/j - 1."""
    i, j = ext(i), ext(j)
    if i < 1 or j < 1:
        raise DomainError(f"Young exponent needs i, j >= 1, got ({i}, {j})")
    s = i.reciprocal() + j.reciprocal() - 1
    if s < 0:
        raise InvalidExponents(f"1/{i} + 1/{j} < 1: Young's inequality does not apply")
    if s == 0:
        return INF
    return ExtIndex(1 / s)


# ---------------------------------------------------------------------------
# ranges and index functions

@dataclass(frozen=True)
class GammaRange:
    """The finite index window ``{min, ..., max}`` that checks run over."""

    max: int
    min: int = 0

    def __post_init__(self):
        if self.max < 1:
            raise DomainError("GammaRange.max must be >= 1")
        if not 0 <= self.min <= self.max:
            raise DomainError("GammaRange.min must lie in [0, max]")

    def __iter__(self):
        return iter(range(self.min, self.max + 1))

    def __len__(self):
        return self.max - self.min + 1

    def __contains__(self, i):
        i = ext(i)
        return not i.is_inf and i.is_integer() and self.min <= i.value <= self.max

    def values(self) -> list[ExtIndex]:
        return [ExtIndex(i) for i in self]


def default_gamma(minimum: int = 0) -> GammaRange:
    """Default window; ``REGCALC_GAMMA_MAX`` overrides the bound 8."""
    return GammaRange(int(os.environ.get("REGCALC_GAMMA_MAX", "8")), minimum)


@dataclass(frozen=True)
class IndexFn:
    """A named total binary function into :class:`ExtIndex`.

    ``kind`` tags the well-known lattice operations so folds can take
    shortcuts; custom rules leave it ``None``.
    """

    name: str
    rule: Callable = field(compare=False)
    kind: str | None = None

    def __call__(self, i, j) -> ExtIndex:
        return ext(self.rule(ext(i), ext(j)))

    @classmethod
    def table(cls, name: str, entries: Mapping, fallback: "IndexFn | None" = None) -> "IndexFn":
        tab = {(ext(a), ext(b)): ext(v) for (a, b), v in entries.items()}

        def rule(i, j):
            try:
                return tab[(i, j)]
            except KeyError:
                if fallback is None:
                    raise DomainError(f"{name} is undefined at ({i}, {j})") from None
                return fallback(i, j)

        return cls(name, rule)

    def override(self, entries: Mapping, name: str | None = None) -> "IndexFn":
        return IndexFn.table(name or f"{self.name}*", entries, fallback=self)

    def __repr__(self):
        return f"IndexFn({self.name!r})"


MIN = IndexFn("min", min, kind="min")
MAX = IndexFn("max", max, kind="max")
ADD = IndexFn("add", lambda i, j: i + j)
HOLDER = IndexFn("holder", star_holder)
YOUNG = IndexFn("young", star_young)


# ---------------------------------------------------------------------------
# law reports

@dataclass(frozen=True)
class Counterexample:
    args: tuple
    lhs: object
    rhs: object

    def __str__(self):
        a = ",".join(_fmt(x) for x in self.args)
        return f"[{a}] lhs={_fmt(self.lhs)} rhs={_fmt(self.rhs)}"


def _fmt(x):
    if isinstance(x, (ExtIndex, int, Fraction)) or x is ZERO_SPACE:
        return format_index(x)
    return str(x)


@dataclass(frozen=True)
class LawReport:
    law: str
    counterexamples: tuple = ()
    checked: int = 0
    undefined: int = 0   # tuples outside the domain of a partial operation

    @property
    def passed(self) -> bool:
        return not self.counterexamples

    def __bool__(self):
        return self.passed

    def lines(self, suite: str = "check", limit: int = 10) -> list[str]:
        """``SUITE CASE verdict lhs rhs tol`` lines; one summary plus failures."""
        verdict = "PASS" if self.passed else "FAIL"
        out = [f"{suite} {self.law} {verdict} {len(self.counterexamples)} {self.checked} 0"]
        for c in self.counterexamples[:limit]:
            a = ",".join(_fmt(x) for x in c.args)
            out.append(f"{suite} {self.law}[{a}] FAIL {_fmt(c.lhs)} {_fmt(c.rhs)} 0")
        return out


def _domain(gamma) -> Sequence[ExtIndex]:
    if isinstance(gamma, GammaRange):
        return gamma.values()
    return sorted({ext(x) for x in gamma}, key=sort_key)


def check_additive(delta: IndexFn, gamma) -> LawReport:
    """δ(i, i) = i for every i in the window."""
    dom = _domain(gamma)
    bad = []
    for i in dom:
        v = delta(i, i)
        if v != i:
            bad.append(Counterexample((i,), v, i))
    return LawReport("additive", tuple(bad), len(dom))


def check_left_distributive(eps: IndexFn, delta: IndexFn, gamma) -> LawReport:
    """δ(ε(i,j), ε(i,k)) = ε(i, δ(j,k)) over the whole cube of triples."""
    return _cube_law("left_distributive", gamma,
                     lambda i, j, k: (delta(eps(i, j), eps(i, k)), eps(i, delta(j, k))))


def check_right_distributive(eps: IndexFn, delta: IndexFn, gamma) -> LawReport:
    """δ(ε(i,k), ε(j,k)) = ε(δ(i,j), k) over the whole cube of triples."""
    return _cube_law("right_distributive", gamma,
                     lambda i, j, k: (delta(eps(i, k), eps(j, k)), eps(delta(i, j), k)))


def _cube_law(law: str, gamma, sides: Callable) -> LawReport:
    # triples where a partial operation is undefined are skipped and counted
    dom = _domain(gamma)
    bad = []
    undefined = 0
    for t in product(dom, repeat=3):
        try:
            lhs, rhs = sides(*t)
        except InvalidExponents:
            undefined += 1
            continue
        if lhs != rhs:
            bad.append(Counterexample(t, lhs, rhs))
    return LawReport(law, tuple(bad), len(dom) ** 3 - undefined, undefined)


def check_index_morphism(mu: Callable, eps: IndexFn, eps_prime: IndexFn, gamma) -> LawReport:
    """μ(ε(i,j)) = ε'(μ(i), μ(j)) on every pair."""
    dom = _domain(gamma)
    bad = []
    for i, j in product(dom, repeat=2):
        lhs = ext(mu(eps(i, j)))
        rhs = eps_prime(ext(mu(i)), ext(mu(j)))
        if lhs != rhs:
            bad.append(Counterexample((i, j), lhs, rhs))
    return LawReport("morphism", tuple(bad), len(dom) ** 2)
