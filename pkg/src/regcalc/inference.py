"""Class inference for annotated expressions.

Each variable carries a family and the annotation (B, k, beta): its order-r
derivative lies in B_{grading(r)} and in C^{k - beta(r)}.  The engine walks
an expression and returns the :class:`RegClass` of its order-i derivative.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

from .composition import alpha_composed
from .dsl import Add, Compose, Conv, Decl, Deriv, Mul, Program, Query, Var, pretty_expr
from .errors import DomainError, DslError, FamilyMismatch, OrderOverflow, RegCalcError
from .families import (
    ZERO_CLASS, FamilyDescriptor, RegClass, make_family, unary_map,
)
from .index_core import ZERO_SPACE, ExtIndex, GammaRange, default_gamma, ext, format_index

__all__ = [
    "Annotation", "Env", "build_env", "infer_class", "run_program", "format_report",
    "format_class", "QueryResult",
]


@dataclass(frozen=True)
class Annotation:
    family: FamilyDescriptor
    beta: object
    k: ExtIndex

    def var_class(self, r: int) -> RegClass:
        if ext(r) > self.k:
            raise OrderOverflow(f"order {r} exceeds k = {self.k}")
        smooth = self.k.value - self.beta(r).value if not self.beta(r).is_inf else -1
        lp = self.family.grading(r)
        if smooth < 0 or lp is ZERO_SPACE:
            return ZERO_CLASS
        return RegClass(lp, ExtIndex(smooth))


Env = dict


def _map_text(spec: str | None, default: str):
    s = spec or default
    return unary_map(s[len("table:"):] if s.startswith("table:") else s)


def annotation_from_decl(d: Decl) -> Annotation:
    grading = _map_text(d.grading, "id")
    beta = _map_text(d.beta, "id")
    gamma = grading.span or default_gamma()
    if d.k is not None:
        k = ext(d.k)
        if k.is_inf:
            raise DomainError("k must be finite")
        if grading.span is None and k.value > gamma.max:
            gamma = GammaRange(int(k.value))
    else:
        k = ExtIndex(gamma.max)
    sob = None
    if d.family == "sobolev":
        missing = [key for key in "npqr" if getattr(d, key) is None]
        if missing:
            raise DomainError(f"sobolev needs {', '.join(missing)}")
        sob = tuple(int(getattr(d, key)) for key in "npqr")
    fam = make_family(d.family, grading, k=k, mode=d.mode or "strict", gamma=gamma,
                      domain_kind=d.domain, sobolev=sob)
    return Annotation(fam, beta, k)


def build_env(program: Program) -> Env:
    env: Env = {}
    for d in program.decls:
        try:
            env[d.name] = annotation_from_decl(d)
        except RegCalcError as e:
            if isinstance(e, DslError):
                raise
            raise DslError(str(e), *d.pos) from None
    return env


# ---------------------------------------------------------------------------
# engine

def _compat_key(fam: FamilyDescriptor):
    return (fam.kind, fam.star.name, fam.plus.name, fam.domain_kind)


def family_of(expr, env: Env) -> FamilyDescriptor:
    """The family an expression lives in; operands must agree."""
    if isinstance(expr, Var):
        return env[expr.name].family
    if isinstance(expr, Deriv):
        return family_of(expr.expr, env)
    a, b = (expr.outer, expr.inner) if isinstance(expr, Compose) else (expr.left, expr.right)
    fa, fb = family_of(a, env), family_of(b, env)
    if _compat_key(fa) != _compat_key(fb):
        raise FamilyMismatch(f"{pretty_expr(expr)} mixes {fa.name} and {fb.name}")
    if isinstance(expr, Conv) and fa.kind != "lp-young":
        raise FamilyMismatch(f"conv needs a convolution family, got {fa.kind}")
    if isinstance(expr, Mul) and fa.kind == "lp-young":
        raise FamilyMismatch("mul needs a pointwise-product family; lp-young carries convolution")
    return fa


def _smooth_min(classes):
    live = [c.smooth_order for c in classes if not c.is_zero]
    return min(live) if live else None


def infer_class(expr, order: int, env: Env) -> RegClass:
    """RegClass of the order-th derivative of ``expr``."""
    fam = family_of(expr, env)
    return _Infer(env, fam).go(expr, order)


class _Infer:
    def __init__(self, env: Env, fam: FamilyDescriptor):
        self.env = env
        self.fam = fam
        self.go = lru_cache(maxsize=None)(self._go)

    def _go(self, e, i: int) -> RegClass:
        if isinstance(e, Var):
            return self.env[e.name].var_class(i)
        if isinstance(e, Deriv):
            return self.go(e.expr, i + e.order)
        if isinstance(e, Add):
            a, b = self.go(e.left, i), self.go(e.right, i)
            if a.is_zero:
                return b
            if b.is_zero:
                return a
            return RegClass(self.fam.plus(a.lp_index, b.lp_index), min(a.smooth_order, b.smooth_order))
        if isinstance(e, (Mul, Conv)):
            return self._leibniz(e, i)
        return self._compose(e, i)

    def _leibniz(self, e, i: int) -> RegClass:
        # split the derivative a + b = i over the two factors; fold terms with plus
        terms = []
        for a in range(i + 1):
            ca, cb = self.go(e.left, a), self.go(e.right, i - a)
            if ca.is_zero or cb.is_zero:
                continue
            terms.append((self.fam.star(ca.lp_index, cb.lp_index), min(ca.smooth_order, cb.smooth_order)))
        terms = [t for t in terms if t[0] is not ZERO_SPACE]
        if not terms:
            return ZERO_CLASS
        acc = terms[0][0]
        for v, _ in terms[1:]:
            acc = self.fam.plus(v, acc)
        return RegClass(acc, min(s for _, s in terms))

    def _compose(self, e: Compose, i: int) -> RegClass:
        if i == 0:
            g, f = self.go(e.outer, 0), self.go(e.inner, 0)
            if g.is_zero or f.is_zero:
                return ZERO_CLASS
            return RegClass(g.lp_index, min(g.smooth_order, f.smooth_order))
        outer = {m: self.go(e.outer, m) for m in range(1, i + 1)}
        inner = {m: self.go(e.inner, m) for m in range(1, i + 1)}
        lp = alpha_composed(lambda m: inner[int(m.value)].lp_index, self.fam.star, self.fam.plus, i,
                            alpha_outer=lambda m: outer[int(m.value)].lp_index)
        if lp is ZERO_SPACE:
            return ZERO_CLASS
        # every block size and block count 1..i occurs in some partition
        smooth = _smooth_min(list(outer.values()) + list(inner.values()))
        return RegClass(lp, smooth)


# ---------------------------------------------------------------------------
# programs and reports

@dataclass(frozen=True)
class QueryResult:
    query: Query
    cls: RegClass | None
    family: FamilyDescriptor | None
    error: str | None = None


def run_program(program: Program) -> list[QueryResult]:
    env = build_env(program)
    out = []
    for q in program.queries:
        try:
            fam = family_of(q.expr, env)
            out.append(QueryResult(q, infer_class(q.expr, q.order, env), fam))
        except RegCalcError as exc:
            line, col = q.pos
            out.append(QueryResult(q, None, None, f"{line}:{col}: {type(exc).__name__}: {exc}"))
    return out


def format_class(cls: RegClass, family: FamilyDescriptor) -> str:
    if cls.is_zero:
        return "zero"
    return f"{family.symbol}^{format_index(cls.lp_index)} ∩ C^{format_index(cls.smooth_order)}"


def _uses_leibniz(results) -> bool:
    # i is the highest derivative order at which e gets evaluated
    def walk(e, i):
        if isinstance(e, Var):
            return False
        if isinstance(e, Deriv):
            return walk(e.expr, i + e.order)
        if isinstance(e, (Mul, Conv)) and i > 0:
            return True
        a, b = (e.outer, e.inner) if isinstance(e, Compose) else (e.left, e.right)
        return walk(a, i) or walk(b, i)
    return any(walk(r.query.expr, r.query.order) for r in results)


def format_report(results: list[QueryResult]) -> str:
    lines = []
    if _uses_leibniz(results):
        lines.append("# note: product classes above order 0 use the Leibniz split extension")
    for r in results:
        head = f"class({pretty_expr(r.query.expr)}, {r.query.order})"
        if r.error is not None:
            lines.append(f"{head} = error: {r.error}")
        else:
            lines.append(f"{head} = {format_class(r.cls, r.family)}")
    return "\n".join(lines) + "\n"
