"""The concrete graded families: C^{k-alpha}, L^p (Hoelder and Young), Sobolev chains.

A family carries two layers of structure.  The index layer (``eps``,
``delta``) is written in terms of indices i, j exactly as the examples define
it.  The value layer (``star``, ``plus``) acts directly on grading values and
is what the composition and inference engines fold; it also knows about the
zero space.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Mapping, Sequence

from .errors import DomainError, InvalidExponents, NotInZS
from .index_core import (
    INF, ZERO_SPACE, Counterexample, ExtIndex, GammaRange, IndexFn, LawReport,
    check_additive, check_left_distributive, check_right_distributive,
    default_gamma, ext, sort_key, star_harmonic, star_holder, star_young,
)

__all__ = [
    "UnaryMap", "unary_map", "MembershipRules", "FamilyDescriptor", "RegClass",
    "ZERO_CLASS", "ZERO_SPACE", "FAMILY_KINDS", "make_ck_family",
    "make_lp_holder_family", "make_lp_young_family", "make_sobolev_chain",
    "make_family", "check_distributivity_criterion", "family_laws",
]

FAMILY_KINDS = ("ck", "lp-holder", "lp-young", "sobolev")


# ---------------------------------------------------------------------------
# unary maps

@dataclass(frozen=True)
class UnaryMap:
    """A named map from indices to grading values.

    ``table`` maps i -> value for tabulated maps; ``rule`` handles the rest.
    ``span`` is the natural index window of a table (``None`` otherwise).
    """

    name: str
    rule: Callable | None = field(default=None, compare=False)
    table: tuple = ()

    def __call__(self, i):
        i = ext(i)
        if self.table:
            if not i.is_integer() or not 0 <= i.value < len(self.table):
                raise DomainError(f"{self.name} is undefined at {i}")
            return self.table[int(i.value)]
        return ext(self.rule(i))

    @property
    def span(self) -> GammaRange | None:
        if len(self.table) >= 2:
            return GammaRange(len(self.table) - 1)
        return None

    def __str__(self):
        return self.name


def unary_map(spec) -> UnaryMap:
    """Build a :class:`UnaryMap` from a callable, a sequence, or text.

    Text forms: ``id``, ``const:N`` and a comma-separated table ``a,b,c``
    (entry n is the value at index n).  ``inf`` is accepted as a value.
    """
    if isinstance(spec, UnaryMap):
        return spec
    if isinstance(spec, str):
        s = spec.strip()
        if s == "id":
            return UnaryMap("id", lambda i: i)
        if s.startswith("const:"):
            c = ext(s[len("const:"):])
            return UnaryMap(f"const:{c}", lambda i: c)
        try:
            vals = tuple(ext(v) for v in s.split(","))
        except (ValueError, TypeError, ZeroDivisionError) as e:
            raise DomainError(f"bad unary map {spec!r}: {e}") from None
        return UnaryMap(",".join(str(v) for v in vals), table=vals)
    if isinstance(spec, (int, Fraction, ExtIndex)):
        c = ext(spec)
        return UnaryMap(f"const:{c}", lambda i: c)
    if isinstance(spec, Mapping):
        keys = sorted(int(k) for k in spec)
        if keys != list(range(len(keys))):
            raise DomainError("tabulated maps must be keyed 0..n-1")
        vals = tuple(ext(spec[k]) for k in keys)
        return UnaryMap(",".join(str(v) for v in vals), table=vals)
    if isinstance(spec, Sequence):
        vals = tuple(ext(v) for v in spec)
        return UnaryMap(",".join(str(v) for v in vals), table=vals)
    if callable(spec):
        return UnaryMap(getattr(spec, "__name__", "fn"), spec)
    raise TypeError(f"cannot interpret {spec!r} as a unary map")


# ---------------------------------------------------------------------------
# descriptors

@dataclass(frozen=True)
class MembershipRules:
    """Which elementary functions belong to every member of a family."""

    contains_constants: bool
    contains_polynomials_on_bounded: bool
    contains_zero: bool = True

    def __post_init__(self):
        if not self.contains_zero:
            raise DomainError("every family contains the zero function")


@dataclass(frozen=True)
class RegClass:
    """Membership in B_{lp_index} intersected with C^{smooth_order}."""

    lp_index: object
    smooth_order: object

    @property
    def is_zero(self) -> bool:
        return self.lp_index is ZERO_SPACE

    def __post_init__(self):
        if self.lp_index is not ZERO_SPACE:
            if self.smooth_order is ZERO_SPACE or ext(self.smooth_order) < 0:
                raise DomainError("a nonzero class needs smooth_order >= 0")


ZERO_CLASS = RegClass(ZERO_SPACE, ZERO_SPACE)


def _absorbing(op: Callable) -> Callable:
    # zero space is absorbing for products
    def rule(a, b):
        if a is ZERO_SPACE or b is ZERO_SPACE:
            return ZERO_SPACE
        return op(a, b)
    return rule


def _neutral(op: Callable) -> Callable:
    # and neutral for sums
    def rule(a, b):
        if a is ZERO_SPACE:
            return b
        if b is ZERO_SPACE:
            return a
        return op(a, b)
    return rule


def _floor_holder(a, b):
    return star_holder(a, b).floor()


def _floor_harmonic(a, b):
    return star_harmonic(a, b).floor()


VALUE_MIN = IndexFn("min", _neutral(min), kind="min")


@dataclass(frozen=True)
class FamilyDescriptor:
    name: str
    kind: str
    grading_map: UnaryMap
    gamma: GammaRange
    values: tuple
    monotonicity: str
    eps: IndexFn
    delta: IndexFn
    star: IndexFn
    plus: IndexFn
    nesting: str
    membership: MembershipRules
    domain_kind: str
    k: ExtIndex | None = None
    mode: str | None = None

    def grading(self, i):
        """Grading value at index i (``ZERO_SPACE`` when the member is 0)."""
        i = ext(i)
        if i in self.gamma:
            return self.values[int(i.value) - self.gamma.min]
        return self._grade(i)

    def _grade(self, i):
        if self.kind == "ck":
            a = self.grading_map(i)
            return ZERO_SPACE if a > self.k else self.k - a
        if self.kind == "sobolev":
            raise DomainError(f"sobolev grading is tabulated on {self.gamma.min}..{self.gamma.max}")
        return self.grading_map(i)

    def to_value(self, annotation):
        """Map an index annotation (p, or alpha for C^{k-alpha}) to a grading value."""
        if annotation is ZERO_SPACE:
            return ZERO_SPACE
        a = ext(annotation)
        if self.kind == "ck":
            return ZERO_SPACE if a > self.k else self.k - a
        return a

    def value_domain(self) -> list:
        return sorted({v for v in self.values if v is not ZERO_SPACE}, key=sort_key)

    def embeds(self, small, large) -> bool:
        """True when the member graded ``small`` sits inside the one graded ``large``."""
        if small is ZERO_SPACE:
            return True
        if large is ZERO_SPACE:
            return False
        if self.nesting == "decreasing":
            return ext(small) >= ext(large)
        if self.nesting == "increasing":
            return ext(small) <= ext(large)
        return ext(small) == ext(large)

    def contains_polynomials(self) -> bool:
        if self.domain_kind == "bounded":
            return self.membership.contains_polynomials_on_bounded
        # off bounded sets only the families that hold constants hold polynomials
        return self.membership.contains_constants and self.kind in ("ck",)

    @property
    def symbol(self) -> str:
        return {"ck": "C", "sobolev": "W"}.get(self.kind, "L")


def _monotonicity(vals: Sequence) -> str:
    keys = [sort_key(v) for v in vals]
    up = all(a <= b for a, b in zip(keys, keys[1:]))
    down = all(a >= b for a, b in zip(keys, keys[1:]))
    if up and down:
        return "constant"
    return "increasing" if up else "decreasing" if down else "none"


def _window(grading: UnaryMap, gamma) -> GammaRange:
    if gamma is not None:
        return gamma
    return grading.span or default_gamma()


def _check_domain_kind(domain_kind: str):
    if domain_kind not in ("bounded", "unbounded"):
        raise DomainError(f"domain_kind must be bounded or unbounded, got {domain_kind!r}")


# ---------------------------------------------------------------------------
# constructors

def make_ck_family(k, alpha, gamma: GammaRange | None = None,
                   domain_kind: str = "bounded") -> FamilyDescriptor:
    """C^{k-alpha(i)}: members collapse to the zero space once alpha(i) > k."""
    _check_domain_kind(domain_kind)
    k = ext(k)
    if k.is_inf:
        raise DomainError("k must be finite")
    alpha = unary_map(alpha)
    gamma = _window(alpha, gamma)
    annotations = [alpha(i) for i in gamma]  # DomainError on negative values
    values = tuple(ZERO_SPACE if a > k else k - a for a in annotations)

    def delta_rule(i, j):
        m = max(alpha(i), alpha(j))
        return ZERO_SPACE if m > k else k - m

    delta = IndexFn(f"{k}-max(alpha)", delta_rule)
    star = IndexFn("min", _absorbing(min), kind="min")
    return FamilyDescriptor(
        name=f"ck(k={k},alpha={alpha})", kind="ck", grading_map=alpha, gamma=gamma,
        values=values, monotonicity=_monotonicity(values), eps=delta, delta=delta,
        star=star, plus=VALUE_MIN, nesting="decreasing",
        membership=MembershipRules(True, True), domain_kind=domain_kind, k=k,
    )


def make_lp_holder_family(p, mode: str = "strict", gamma: GammaRange | None = None,
                          domain_kind: str = "bounded") -> FamilyDescriptor:
    """L^{p(i)} with the pointwise product.

    In ``strict`` mode ``eps`` raises :class:`NotInZS` on pairs whose Hoelder
    exponent is not an integer; ``int`` mode rounds the exponent down.  The
    value-level ``star`` is exact in strict mode and, in both modes, extends
    the Hoelder rule below exponent 1 so folds of many factors stay defined.
    """
    _check_domain_kind(domain_kind)
    mode = {"strict_ZS": "strict", "int_part": "int"}.get(mode, mode)
    if mode not in ("strict", "int"):
        raise DomainError(f"mode must be strict or int, got {mode!r}")
    p = unary_map(p)
    gamma = _window(p, gamma)
    values = tuple(p(i) for i in gamma)
    floor = 2 if mode == "strict" else 1
    for i, v in zip(gamma, values):
        if v < floor:
            raise DomainError(f"{mode} mode needs p(i) >= {floor}; p({i}) = {v}")

    if mode == "strict":
        def eps_rule(i, j):
            r = star_holder(p(i), p(j))
            if not (r.is_integer() or r.is_inf):
                raise NotInZS(f"{p(i)}*{p(j)}/({p(i)}+{p(j)}) is not an integer")
            return r
        star = IndexFn("holder", _absorbing(star_harmonic))
    else:
        def eps_rule(i, j):
            return _floor_holder(p(i), p(j))
        star = IndexFn("holder-int", _absorbing(_floor_harmonic))

    bounded = domain_kind == "bounded"
    return FamilyDescriptor(
        name=f"lp-holder(p={p},mode={mode})", kind="lp-holder", grading_map=p,
        gamma=gamma, values=values, monotonicity=_monotonicity(values),
        eps=IndexFn(f"holder-{mode}(p)", eps_rule),
        delta=IndexFn("min(p)", lambda i, j: min(p(i), p(j))),
        star=star, plus=VALUE_MIN, nesting="decreasing" if bounded else "none",
        membership=MembershipRules(bounded, bounded), domain_kind=domain_kind, mode=mode,
    )


def make_lp_young_family(p, gamma: GammaRange | None = None) -> FamilyDescriptor:
    """L^{p(i)}(R^n) with convolution; ``eps`` raises when Young does not apply."""
    p = unary_map(p)
    gamma = _window(p, gamma)
    values = tuple(p(i) for i in gamma)
    for i, v in zip(gamma, values):
        if v < 1:
            raise DomainError(f"Young family needs p(i) >= 1; p({i}) = {v}")
    return FamilyDescriptor(
        name=f"lp-young(p={p})", kind="lp-young", grading_map=p, gamma=gamma,
        values=values, monotonicity=_monotonicity(values),
        eps=IndexFn("young(p)", lambda i, j: star_young(p(i), p(j))),
        delta=IndexFn("min(p)", lambda i, j: min(p(i), p(j))),
        star=IndexFn("young", _absorbing(star_young)), plus=VALUE_MIN, nesting="none",
        membership=MembershipRules(False, False), domain_kind="unbounded",
    )


def sobolev_grading(n: int, p: int, q: int, r: int, length: int) -> tuple:
    """Iterates of l(r) = r + n(p-q)/(pq), floored each step and stopped at 0."""
    step = Fraction(n * (p - q), p * q)
    out = [ExtIndex(r)]
    cur = Fraction(r)
    for _ in range(length - 1):
        cur = Fraction(max(0, (cur + step).__floor__()))
        out.append(ExtIndex(cur))
    return tuple(out)


def make_sobolev_chain(n: int, p: int, q: int, r: int,
                       gamma: GammaRange | None = None) -> FamilyDescriptor:
    """W^{l(i), p_i} chain from iterating the Sobolev embedding exponent."""
    if min(n, p, q) <= 0 or r < 0:
        raise DomainError("n, p, q must be positive and r nonnegative")
    if p >= q:
        raise DomainError(f"Sobolev chain needs p < q, got p={p}, q={q}")
    gamma = gamma or default_gamma()
    table = sobolev_grading(n, p, q, r, gamma.max + 1)
    grading = UnaryMap(f"sobolev({n},{p},{q},{r})", table=table)
    values = tuple(table[i] for i in gamma)
    m = IndexFn("min(l)", lambda i, j: min(grading(i), grading(j)), kind=None)
    return FamilyDescriptor(
        name=f"sobolev(n={n},p={p},q={q},r={r})", kind="sobolev", grading_map=grading,
        gamma=gamma, values=values, monotonicity=_monotonicity(values), eps=m, delta=m,
        star=IndexFn("min", _absorbing(min), kind="min"), plus=VALUE_MIN,
        nesting="decreasing", membership=MembershipRules(True, True), domain_kind="bounded",
    )


def make_family(kind: str, grading, *, k=None, mode: str = "strict",
                gamma: GammaRange | None = None, domain_kind: str | None = None,
                sobolev: tuple | None = None) -> FamilyDescriptor:
    """Keyword dispatch used by the CLI and the DSL."""
    if kind == "ck":
        gamma = _window(unary_map(grading), gamma)
        return make_ck_family(gamma.max if k is None else k, grading, gamma,
                              domain_kind or "bounded")
    if kind == "lp-holder":
        return make_lp_holder_family(grading, mode, gamma, domain_kind or "bounded")
    if kind == "lp-young":
        if domain_kind == "bounded":
            raise DomainError("the Young family lives on an unbounded domain")
        return make_lp_young_family(grading, gamma)
    if kind == "sobolev":
        if sobolev is None:
            raise DomainError("sobolev needs (n, p, q, r)")
        return make_sobolev_chain(*sobolev, gamma=gamma)
    raise DomainError(f"unknown family {kind!r}; expected one of {', '.join(FAMILY_KINDS)}")


# ---------------------------------------------------------------------------
# laws

def check_distributivity_criterion(p, star, gamma: GammaRange) -> LawReport:
    """p(j) <= p(k) implies p(i)*p(j) <= p(i)*p(k) for every triple in the window.

    ``star`` is ``holder``, ``holder-int``, ``young`` or any :class:`IndexFn`.
    """
    p = unary_map(p)
    if isinstance(star, str):
        star = {"holder": IndexFn("holder", star_holder),
                "holder-int": IndexFn("holder-int", _floor_holder),
                "young": IndexFn("young", star_young)}[star]
    vals = {i: p(i) for i in gamma}
    bad = []
    checked = undefined = 0
    for i, j, k in product(gamma, repeat=3):
        if vals[j] <= vals[k]:
            try:
                lhs, rhs = star(vals[i], vals[j]), star(vals[i], vals[k])
            except InvalidExponents:
                undefined += 1
                continue
            if not lhs <= rhs:
                bad.append(Counterexample((i, j, k), lhs, rhs))
        checked += 1
    return LawReport("distributivity_criterion", tuple(bad), checked, undefined)


def family_laws(family: FamilyDescriptor) -> list[LawReport]:
    """Additive and distributive laws of the value-level pair (star, plus).

    Laws run over the nonzero grading values; when the grading is the identity
    this coincides with the index-level statement.
    """
    dom = family.value_domain()
    return [
        check_additive(family.plus, dom),
        check_left_distributive(family.star, family.plus, dom),
        check_right_distributive(family.star, family.plus, dom),
    ]
