"""Set partitions and the Faa di Bruno index calculus for composites.

For an order i the composite's derivative is a sum over partitions mu of
[i] = {1..i} of terms g^(#blocks)(f) * prod_blocks f^(|block|).  The grading
of the composite is obtained by folding the multiplicative rule over the
blocks of each partition (``eps_fold``/``eps_bar``) and the additive rule over
partitions (``alpha_composed``).  ``beta_composed`` tracks the smoothness loss.

Folds are right folds in the order given by an :class:`OrderingFn`: with the
sequence v_1, ..., v_m (v_1 first), the result is op(v_m, op(..., op(v_2, v_1))).
"""
from __future__ import annotations

import os
from dataclasses import dataclass
from functools import reduce
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import DomainError, SizeLimit
from .families import FamilyDescriptor, unary_map
from .index_core import (
    ZERO_SPACE, Counterexample, ExtIndex, GammaRange, IndexFn, LawReport, ext, sort_key,
)
from .kernels import canonical_partitions

__all__ = [
    "SetPartition", "OrderingFn", "CANONICAL", "ComposedIndices", "partition_cap",
    "enumerate_partitions", "eps_fold", "eps_bar", "alpha_composed",
    "beta_composed", "composed_indices", "profile_sequence", "check_ordered",
    "check_unital",
]

DEFAULT_CAP = 12


def partition_cap() -> int:
    return int(os.environ.get("REGCALC_PARTITION_CAP", DEFAULT_CAP))


@dataclass(frozen=True)
class SetPartition:
    """A partition of {1..n}; blocks ascending, ordered by least element."""

    n: int
    blocks: tuple

    def __post_init__(self):
        blocks = tuple(tuple(sorted(b)) for b in self.blocks)
        if any(not b for b in blocks):
            raise DomainError("blocks must be nonempty")
        flat = sorted(x for b in blocks for x in b)
        if flat != list(range(1, self.n + 1)):
            raise DomainError(f"blocks do not partition {{1..{self.n}}}")
        object.__setattr__(self, "blocks", tuple(sorted(blocks)))

    @property
    def nblocks(self) -> int:
        return len(self.blocks)

    @property
    def sizes(self) -> tuple:
        return tuple(len(b) for b in self.blocks)

    def canonical_key(self):
        return (len(self.blocks), self.blocks)

    def __str__(self):
        return "{" + ",".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks) + "}"


@dataclass(frozen=True)
class OrderingFn:
    """Fold order for partitions and for the blocks inside one partition.

    ``partitions`` and ``blocks`` take a sequence and return it reordered;
    leaving both ``None`` gives the canonical order.
    """

    name: str = "canonical"
    partitions: Callable | None = None
    blocks: Callable | None = None

    @property
    def is_canonical(self) -> bool:
        return self.partitions is None and self.blocks is None

    def order_partitions(self, parts: Sequence[SetPartition]) -> list:
        if self.partitions is None:
            return sorted(parts, key=SetPartition.canonical_key)
        return list(self.partitions(list(parts)))

    def order_blocks(self, blocks: Sequence[tuple]) -> list:
        if self.blocks is None:
            return sorted(blocks)
        return list(self.blocks(list(blocks)))


CANONICAL = OrderingFn()


def _check_size(i: int):
    if i < 1:
        raise DomainError(f"partitions need i >= 1, got {i}")
    cap = partition_cap()
    if i > cap:
        raise SizeLimit(f"i = {i} exceeds the partition cap {cap}")


def enumerate_partitions(i: int, ord: OrderingFn = CANONICAL) -> list[SetPartition]:
    """All set partitions of {1..i}, in the order given by ``ord``."""
    _check_size(i)
    rgs, nblocks, _ = canonical_partitions(i)
    out = []
    for row, nb in zip(rgs.tolist(), nblocks.tolist()):
        blocks = [[] for _ in range(nb)]
        for pos, lab in enumerate(row, start=1):
            blocks[lab].append(pos)
        out.append(SetPartition(i, tuple(map(tuple, blocks))))
    return out if ord.is_canonical else ord.order_partitions(out)


def _rfold(op: Callable, values: Iterable):
    it = iter(values)
    acc = next(it)
    for v in it:
        acc = op(v, acc)
    return acc


def eps_fold(partition: SetPartition, alpha, eps: IndexFn, ord: OrderingFn = CANONICAL):
    """Right fold of eps over alpha(|block|) in block order."""
    alpha = unary_map(alpha)
    return _rfold(eps, (alpha(len(b)) for b in ord.order_blocks(partition.blocks)))


def eps_bar(partition: SetPartition, alpha, eps: IndexFn, ord: OrderingFn = CANONICAL,
            alpha_outer=None):
    """eps(alpha_outer(#blocks), eps_fold(partition)); alpha_outer defaults to alpha."""
    outer = unary_map(alpha if alpha_outer is None else alpha_outer)
    return eps(outer(partition.nblocks), eps_fold(partition, alpha, eps, ord))


def profile_sequence(i: int):
    """Distinct block profiles of [i] in canonical order, plus the partition sequence.

    Returns ``(profiles, inverse)`` where ``profiles`` lists ``(nblocks, sizes)``
    with sizes in least-element block order, and ``inverse[t]`` is the profile
    of the t-th partition in canonical order.
    """
    _check_size(i)
    _, nblocks, sizes = canonical_partitions(i)
    packed = np.concatenate([nblocks[:, None], sizes], axis=1).astype(np.int8)
    uniq, first, inverse = np.unique(packed, axis=0, return_index=True, return_inverse=True)
    # renumber profiles by first appearance so iteration follows canonical order
    rank = np.empty(len(uniq), dtype=np.int64)
    rank[np.argsort(first, kind="stable")] = np.arange(len(uniq))
    profiles = [None] * len(uniq)
    for u, row in enumerate(uniq.tolist()):
        nb = row[0]
        profiles[rank[u]] = (nb, tuple(row[1:1 + nb]))
    return profiles, rank[np.asarray(inverse).reshape(-1)]


def _is_lattice(op: IndexFn) -> bool:
    return op.kind in ("min", "max")


def alpha_composed(alpha, eps: IndexFn, delta: IndexFn, i: int,
                   ord: OrderingFn = CANONICAL, alpha_outer=None):
    """Grading of the order-i derivative of a composite.

    Right fold of delta over eps_bar of every partition of [i].
    """
    alpha = unary_map(alpha)
    outer = alpha if alpha_outer is None else unary_map(alpha_outer)
    if not ord.is_canonical:
        bars = [eps_bar(p, alpha, eps, ord, outer) for p in enumerate_partitions(i, ord)]
        return _rfold(delta, bars)
    profiles, inverse = profile_sequence(i)
    bars = []
    for nb, sizes in profiles:
        inner = _rfold(eps, (alpha(s) for s in sizes))
        bars.append(eps(outer(nb), inner))
    if _is_lattice(delta):
        # idempotent, commutative, associative: the fold only sees distinct values
        return _rfold(delta, bars)
    return _rfold(delta, (bars[t] for t in inverse.tolist()))


def beta_composed(beta, i: int):
    """Max over partitions and blocks of beta(#blocks) and beta(|block|)."""
    beta = unary_map(beta)
    profiles, _ = profile_sequence(i)
    return max((beta(x) for nb, sizes in profiles for x in (nb,) + sizes), key=sort_key)


@dataclass(frozen=True)
class ComposedIndices:
    """Rows (i, alpha_<=(i), beta_<=(i)) for i = 1..max."""

    rows: tuple

    def alpha(self, i):
        return self.rows[i - 1][1]

    def beta(self, i):
        return self.rows[i - 1][2]


def composed_indices(alpha, eps: IndexFn, delta: IndexFn, beta, gamma_max: int,
                     ord: OrderingFn = CANONICAL) -> ComposedIndices:
    return ComposedIndices(tuple(
        (i, alpha_composed(alpha, eps, delta, i, ord), beta_composed(beta, i))
        for i in range(1, gamma_max + 1)
    ))


# ---------------------------------------------------------------------------
# ordered and unital

def _orders(k, gamma: GammaRange, start: int) -> range:
    k = ext(k)
    top = gamma.max if k.is_inf else min(gamma.max, int(k.floor().value))
    return range(max(start, gamma.min), top + 1)


def check_ordered(family: FamilyDescriptor, alpha, beta, k, gamma: GammaRange | None = None,
                  ord: OrderingFn = CANONICAL) -> LawReport:
    """Does the composed grading embed back into the family at every order?

    For each order i the composite's class B_{alpha_<=(i)} must sit inside
    B_{alpha(i)} (direction from the family's nesting) and beta_<=(i) <= beta(i).
    """
    gamma = gamma or family.gamma
    alpha, beta = unary_map(alpha), unary_map(beta)
    value = unary_map(lambda i: family.to_value(alpha(i)))
    bad = []
    orders = _orders(k, gamma, 1)
    for i in orders:
        a_le = alpha_composed(value, family.star, family.plus, i, ord)
        target = value(i)
        if not family.embeds(a_le, target):
            bad.append(Counterexample((i,), a_le, target))
            continue
        b_le = beta_composed(beta, i)
        if not b_le <= beta(i):
            bad.append(Counterexample((i,), b_le, beta(i)))
    return LawReport("ordered", tuple(bad), len(orders))


def check_unital(family: FamilyDescriptor, alpha, beta, k) -> bool:
    """Is the identity map a (B, k, alpha, beta)-function for this family?

    Order 0 needs the coordinate function x (a polynomial), order 1 the
    constant 1, higher orders only the zero function.
    """
    alpha, beta = unary_map(alpha), unary_map(beta)
    k = ext(k)
    for i in _orders(k, family.gamma, 0):
        if i >= 2:
            continue  # derivatives vanish; zero lies in every member
        if family.to_value(alpha(i)) is ZERO_SPACE:
            return False
        if beta(i) > k:
            return False
        if i == 0 and not family.contains_polynomials():
            return False
        if i == 1 and not family.membership.contains_constants:
            return False
    return True
