"""Finite atlases with regularity-tagged transitions.

Charts are labelled ``0..m-1`` (or ``j;i`` after a retraction).  Each
overlapping ordered pair carries a tag: ``B`` for a (B, k, alpha, beta)
diffeomorphism, ``Ck`` for a plain C^k one.  Everything here lives at the
tag level; no chart is ever evaluated.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from itertools import product as iproduct
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DomainError, NotAbsorbing, OrderedRequired
from .index_core import Counterexample, LawReport
from .kernels import impl

__all__ = [
    "TransitionTag", "AbsorbMode", "Atlas", "FiniteMagma", "FormalMap",
    "absorb_compose", "check_b_structure", "check_ideal", "retract_atlas",
    "transition_magma", "hom_bijection_check", "atlas_coproduct",
    "atlas_product", "random_atlas", "random_morphisms", "parse_atlas",
    "format_atlas", "bdiffeo_subset", "ideal_side",
]


class TransitionTag(enum.IntEnum):
    CK = 0
    B = 1

    def __str__(self):
        return "B" if self is TransitionTag.B else "Ck"

    @classmethod
    def parse(cls, text: str) -> "TransitionTag":
        try:
            return {"B": cls.B, "Ck": cls.CK, "BDiffeo": cls.B, "CkDiffeo": cls.CK}[text]
        except KeyError:
            raise DomainError(f"unknown tag {text!r}; expected B or Ck") from None


class AbsorbMode(str, enum.Enum):
    LEFT = "left"
    RIGHT = "right"
    FULL_LEFT = "full_left"
    FULL_RIGHT = "full_right"
    FULL = "full"
    NONE = "none"  # no absorption at all; a control, not a theorem mode

    @property
    def is_full(self) -> bool:
        return self in (AbsorbMode.FULL_LEFT, AbsorbMode.FULL_RIGHT, AbsorbMode.FULL)

    @property
    def left(self) -> bool:
        return self in (AbsorbMode.LEFT, AbsorbMode.FULL_LEFT, AbsorbMode.FULL)

    @property
    def right(self) -> bool:
        return self in (AbsorbMode.RIGHT, AbsorbMode.FULL_RIGHT, AbsorbMode.FULL)


B, CK = TransitionTag.B, TransitionTag.CK


def absorb_compose(g_tag, f_tag, mode, ordered: bool = True, iso: bool = True) -> TransitionTag:
    """Tag of g o f.

    B o B is B given the ordered property.  Otherwise the composite is B when
    the mode absorbs on the side holding the B factor: left needs f in B,
    right needs g in B.  Core (non-full) modes absorb only isomorphisms.
    """
    g, f, mode = TransitionTag(g_tag), TransitionTag(f_tag), AbsorbMode(mode)
    if g is B and f is B:
        if not ordered:
            raise OrderedRequired("B o B needs the ordered property")
        return B
    if not iso and not mode.is_full:
        return CK
    if (mode.left and f is B) or (mode.right and g is B):
        return B
    return CK


def _absorb_table(mode: AbsorbMode, ordered: bool, iso: bool = True) -> np.ndarray:
    """tab[g, f] for the four tag pairs; B o B left as 1 only when ordered."""
    tab = np.zeros((2, 2), dtype=np.uint8)
    for g, f in iproduct((CK, B), repeat=2):
        if g is B and f is B and not ordered:
            continue
        tab[g, f] = absorb_compose(g, f, mode, ordered, iso)
    return tab


# ---------------------------------------------------------------------------
# atlases

def _ro(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=bool)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Atlas:
    """Overlap relation and B-tags as boolean matrices; immutable.

    ``btag[i, j]`` is the tag of the transition from chart i to chart j and
    is only meaningful where ``overlap[i, j]`` holds.
    """

    overlap: np.ndarray
    btag: np.ndarray
    labels: tuple = ()

    def __post_init__(self):
        O, T = _ro(self.overlap), _ro(self.btag)
        if O.ndim != 2 or O.shape[0] != O.shape[1] or O.shape != T.shape or O.shape[0] < 1:
            raise DomainError("overlap and tag matrices must be square and of equal size")
        m = O.shape[0]
        if not O.diagonal().all():
            raise DomainError("overlap must be reflexive")
        if (O != O.T).any():
            raise DomainError("overlap must be symmetric")
        T = _ro(T & O)
        if not T.diagonal().all():
            raise DomainError("identity transitions must be tagged B")
        if (T != T.T).any():
            raise DomainError("tags must be inverse-closed (tag(i,j) = tag(j,i))")
        labels = tuple(str(x) for x in self.labels) or tuple(str(i) for i in range(m))
        if len(labels) != m or len(set(labels)) != m:
            raise DomainError("labels must be distinct, one per chart")
        object.__setattr__(self, "overlap", O)
        object.__setattr__(self, "btag", T)
        object.__setattr__(self, "labels", labels)

    @property
    def m(self) -> int:
        return self.overlap.shape[0]

    def tag(self, i: int, j: int) -> TransitionTag:
        if not self.overlap[i, j]:
            raise DomainError(f"charts {self.labels[i]} and {self.labels[j]} do not overlap")
        return TransitionTag(int(self.btag[i, j]))

    def pairs(self) -> list[tuple[int, int]]:
        """Overlapping ordered pairs, diagonal included, row-major."""
        return [tuple(p) for p in np.argwhere(self.overlap).tolist()]

    def __eq__(self, other):
        return (isinstance(other, Atlas) and self.labels == other.labels
                and np.array_equal(self.overlap, other.overlap)
                and np.array_equal(self.btag, other.btag))

    def __hash__(self):
        return hash((self.labels, self.overlap.tobytes(), self.btag.tobytes()))

    @classmethod
    def build(cls, m: int, overlaps: Iterable = (), b_edges: Iterable = (), labels=()) -> "Atlas":
        O = np.eye(m, dtype=bool)
        T = np.eye(m, dtype=bool)
        for i, j in overlaps:
            O[i, j] = O[j, i] = True
        for i, j in b_edges:
            T[i, j] = T[j, i] = True
        return cls(O, T & O, labels)


def check_b_structure(atlas: Atlas) -> bool:
    """Every transition is a B-diffeomorphism."""
    return bool(atlas.btag[atlas.overlap].all())


def _retraction_table(mode: AbsorbMode) -> np.ndarray:
    """Tag of r(phi_kl) o phi_li o r(phi_ji)^-1 for middle tag Ck and B.

    Both groupings are evaluated; a middle tag whose groupings disagree or
    do not give B raises NotAbsorbing.
    """
    tab = np.zeros(2, dtype=np.uint8)
    for mid in (CK, B):
        inner_first = absorb_compose(B, absorb_compose(mid, B, mode), mode)
        outer_first = absorb_compose(absorb_compose(B, mid, mode), B, mode)
        if inner_first != outer_first:
            raise NotAbsorbing(
                f"mode {mode.value}: groupings disagree for middle tag {mid} "
                f"({inner_first} vs {outer_first})")
        tab[mid] = inner_first
    return tab


def retract_atlas(atlas: Atlas, mode) -> Atlas:
    """The B-structured atlas with charts (j;i), one per overlapping pair (i, j).

    Chart (j;i) is r(phi_ji) o phi_i on U_ij; two such charts overlap when all
    four underlying charts pairwise overlap.  Ordered property is assumed.
    """
    mode = AbsorbMode(mode)
    tab = _retraction_table(mode)
    charts, ov, bt = impl.retract_tags(atlas.overlap.astype(np.uint8),
                                       atlas.btag.astype(np.uint8), tab)
    ov, bt = ov.astype(bool), bt.astype(bool)
    bad = np.argwhere(ov & ~bt)
    if len(bad):
        c, d = bad[0]
        raise NotAbsorbing(f"transition ({_pair_label(atlas, charts[c])}) -> "
                           f"({_pair_label(atlas, charts[d])}) stays Ck under mode {mode.value}")
    labels = tuple(_pair_label(atlas, row) for row in charts)
    return Atlas(ov, bt, labels)


def _pair_label(atlas: Atlas, row) -> str:
    j, i = int(row[0]), int(row[1])
    return f"{atlas.labels[j]};{atlas.labels[i]}"


def atlas_coproduct(a: Atlas, b: Atlas) -> Atlas:
    """Disjoint union: no chart of ``a`` overlaps a chart of ``b``."""
    m, n = a.m, b.m
    O = np.zeros((m + n, m + n), dtype=bool)
    T = np.zeros_like(O)
    O[:m, :m], O[m:, m:] = a.overlap, b.overlap
    T[:m, :m], T[m:, m:] = a.btag, b.btag
    labels = tuple(f"0.{x}" for x in a.labels) + tuple(f"1.{x}" for x in b.labels)
    return Atlas(O, T, labels)


def atlas_product(a: Atlas, b: Atlas) -> Atlas:
    """Product charts (x, y); a transition is B exactly when both factors are."""
    O = np.kron(a.overlap, b.overlap).astype(bool)
    T = np.kron(a.btag, b.btag).astype(bool)
    labels = tuple(f"{x}x{y}" for x in a.labels for y in b.labels)
    return Atlas(O, T, labels)


# ---------------------------------------------------------------------------
# magmas

@dataclass(frozen=True, eq=False)
class FiniteMagma:
    """Elements plus a composition table; ``table[g, f]`` indexes g o f.

    Entries equal to ``star`` mark non-composable pairs, which the total
    operation sends to the element ``id_*``.
    """

    elements: tuple
    table: np.ndarray
    star: int

    def __post_init__(self):
        t = np.array(self.table, dtype=np.int64)
        n = len(self.elements)
        if t.shape != (n, n) or t.min() < 0 or t.max() >= n:
            raise DomainError("composition table does not match the elements")
        t.setflags(write=False)
        object.__setattr__(self, "table", t)

    def index(self, e) -> int:
        return self.elements.index(e)

    def compose(self, g, f):
        return self.elements[self.table[self.index(g), self.index(f)]]

    def composable(self, g, f) -> bool:
        return self.table[self.index(g), self.index(f)] != self.star

    @classmethod
    def from_partial(cls, elements: Sequence, compose, star_label: str = "id_*") -> "FiniteMagma":
        """Build from a partial operation returning ``None`` off its domain."""
        elems = tuple(elements) + (star_label,)
        idx = {e: n for n, e in enumerate(elems)}
        s = len(elems) - 1
        t = np.full((len(elems), len(elems)), s, dtype=np.int64)
        for g, f in iproduct(elements, repeat=2):
            c = compose(g, f)
            if c is not None:
                t[idx[g], idx[f]] = idx[c]
        return cls(elems, t, s)


def transition_magma(atlas: Atlas, mode, ordered: bool = True) -> FiniteMagma:
    """All tagged transitions (src, dst, tag) of an atlas under the absorb rule.

    g o f is defined when dst(f) = src(g) and src(f) overlaps dst(g).
    """
    mode = AbsorbMode(mode)
    pairs = np.argwhere(atlas.overlap)
    src = np.repeat(pairs[:, 0], 2)
    dst = np.repeat(pairs[:, 1], 2)
    tag = np.tile(np.array([0, 1]), len(pairs))
    n = len(src)
    elements = tuple(f"{TransitionTag(int(t))}:{atlas.labels[a]}->{atlas.labels[b]}"
                     for a, b, t in zip(src.tolist(), dst.tolist(), tag.tolist())) + ("id_*",)
    where = -np.ones((atlas.m, atlas.m, 2), dtype=np.int64)
    where[src, dst, tag] = np.arange(n)
    # rows g, columns f
    ok = (dst[None, :] == src[:, None]) & atlas.overlap[src[None, :], dst[:, None]]
    both_b = ok & (tag[:, None] == 1) & (tag[None, :] == 1)
    if not ordered and both_b.any():
        raise OrderedRequired("the transition magma composes B with B; ordered property needed")
    tab = _absorb_table(mode, True)
    ctag = tab[tag[:, None], tag[None, :]]
    comp = where[src[None, :], dst[:, None], ctag]
    table = np.full((n + 1, n + 1), n, dtype=np.int64)
    table[:n, :n] = np.where(ok, comp, n)
    return FiniteMagma(elements, table, n)


def check_ideal(magma: FiniteMagma, subset: Iterable, side: str) -> LawReport:
    """One-sided (or two-sided) ideal test over composable pairs.

    ``left``: f in S implies g o f in S; ``right``: g in S implies g o f in S.
    """
    if side not in ("left", "right", "both"):
        raise DomainError(f"side must be left, right or both, got {side!r}")
    subset = set(subset)
    unknown = subset - set(magma.elements)
    if unknown:
        raise DomainError(f"subset has non-elements: {sorted(unknown)}")
    n = len(magma.elements)
    s = np.zeros(n, dtype=bool)
    for e in subset:
        s[magma.index(e)] = True
    t = magma.table
    live = t != magma.star
    live[magma.star, :] = False
    live[:, magma.star] = False
    hit = np.zeros_like(live)
    if side in ("left", "both"):
        hit |= s[None, :]
    if side in ("right", "both"):
        hit |= s[:, None]
    viol = live & hit & ~s[t]
    bad = tuple(
        Counterexample((magma.elements[g], magma.elements[f]), magma.elements[t[g, f]], "outside_subset")
        for g, f in np.argwhere(viol).tolist()
    )
    return LawReport(f"{side}_ideal", bad, int((live & hit).sum()))


def bdiffeo_subset(magma: FiniteMagma) -> list[str]:
    """The B-tagged transitions of a transition magma."""
    return [e for e in magma.elements if e.startswith("B:")]


def ideal_side(mode) -> str:
    """The side on which BDiffeo is an ideal under an absorb mode."""
    mode = AbsorbMode(mode)
    if mode is AbsorbMode.FULL:
        return "both"
    if mode.right:
        return "right"
    return "left"


# ---------------------------------------------------------------------------
# hom-set bijection

@dataclass(frozen=True)
class FormalMap:
    """A formal C^k map between atlases, known only through its local tags.

    ``local[(a, b)]`` is the tag of the local expression from domain chart a
    to codomain chart b; missing pairs count as Ck.
    """

    name: str
    iso: bool
    local: Mapping = field(default_factory=dict)

    def tag(self, a: int, b: int) -> TransitionTag:
        return TransitionTag(self.local.get((a, b), CK))


def hom_bijection_check(source: Atlas, target: Atlas, morphisms: Sequence[FormalMap],
                        mode) -> LawReport:
    """Hom-set bijection between C^k maps and maps into (or out of) the retraction.

    ``source`` is the plain C^k atlas and ``target`` the B-structured one.
    Left modes treat morphisms source -> target and re-express them in the
    retracted charts (j;i) of the source: (phi f phi_i^-1) o r(phi_ji)^-1.
    Right modes treat morphisms target -> source and re-express them in the
    retracted charts (l;k) of the codomain: r(phi_lk) o (phi_k f psi^-1).
    Core modes keep isomorphisms only.  iota and xi are the identity on
    underlying maps; the check passes when every relocalized tag is B and
    iota, xi are mutually inverse.
    """
    mode = AbsorbMode(mode)
    if mode in (AbsorbMode.FULL, AbsorbMode.NONE):
        raise DomainError("hom_bijection_check needs left, right, full_left or full_right")
    bad: list[Counterexample] = []
    if not check_b_structure(target):
        bad.append(Counterexample(("target",), "Ck transition", "B-structure"))
    pool = [f for f in morphisms if f.iso or mode.is_full]
    hom_c = {f.name: f for f in pool}
    if len(hom_c) != len(pool):
        raise DomainError("morphism names must be distinct")
    left = mode.left
    rpairs = source.pairs()  # retracted charts (j;i) of the plain atlas, i -> j
    checked = 0
    hom_b = {}
    for f in pool:
        ok = True
        for b in range(target.m):
            for i, j in rpairs:
                checked += 1
                if left:
                    word = absorb_compose(f.tag(i, b), B, mode, iso=f.iso)
                else:
                    word = absorb_compose(B, f.tag(b, i), mode, iso=f.iso)
                if word is not B:
                    ok = False
                    where = (f.name, f"{j};{i}", target.labels[b])
                    bad.append(Counterexample(where, str(word), "B"))
        if ok:
            hom_b[f.name] = f
    # iota: hom_B -> hom_C and xi: hom_C -> hom_B, both the identity on maps
    iota = {name: name for name in hom_b}
    xi = {name: name for name in hom_c if name in hom_b}
    for name in hom_c:
        if name not in xi or iota.get(xi[name]) != name:
            bad.append(Counterexample((name,), "iota(xi(f)) undefined or different", name))
    for name in hom_b:
        if xi.get(iota[name]) != name:
            bad.append(Counterexample((name,), "xi(iota(f)) different", name))
    return LawReport(f"hom_bijection[{mode.value}]", tuple(bad), checked)


# ---------------------------------------------------------------------------
# random instances

def random_atlas(rng: np.random.Generator, max_charts: int = 8, p_overlap: float = 0.5,
                 p_b: float = 0.5, all_b: bool = False) -> Atlas:
    m = int(rng.integers(1, max_charts + 1))
    up = np.triu(rng.random((m, m)) < p_overlap, 1)
    O = up | up.T | np.eye(m, dtype=bool)
    tb = np.triu(rng.random((m, m)) < p_b, 1)
    T = (tb | tb.T | np.eye(m, dtype=bool)) & O
    if all_b:
        T = O.copy()
    return Atlas(O, T)


def random_morphisms(rng: np.random.Generator, source: Atlas, target: Atlas,
                     count: int, direction: str = "forward") -> list[FormalMap]:
    """Formal maps with random local tags; ``forward`` means source -> target."""
    dom, cod = (source, target) if direction == "forward" else (target, source)
    out = []
    for n in range(count):
        tags = rng.random((dom.m, cod.m)) < 0.5
        local = {(a, b): TransitionTag(int(tags[a, b])) for a in range(dom.m) for b in range(cod.m)}
        out.append(FormalMap(f"f{n}", bool(rng.random() < 0.6), local))
    return out


# ---------------------------------------------------------------------------
# text format

def parse_atlas(text: str) -> Atlas:
    """``atlas <m>``, optional ``chart <label>`` lines, ``overlap a b``, ``trans a b tag=B|Ck``."""
    lines = []
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            lines.append((n, line.split()))
    if not lines or lines[0][1][0] != "atlas" or len(lines[0][1]) != 2:
        raise DomainError("line 1: expected header 'atlas <m>'")
    try:
        m = int(lines[0][1][1])
    except ValueError:
        raise DomainError(f"line {lines[0][0]}: chart count must be an integer") from None
    if m < 1:
        raise DomainError("an atlas needs at least one chart")
    labels: list[str] = []
    O = np.eye(m, dtype=bool)
    T = np.eye(m, dtype=bool)
    explicit: dict = {}

    def chart(n, tok):
        names = labels or [str(i) for i in range(m)]
        if tok not in names:
            raise DomainError(f"line {n}: unknown chart {tok!r}")
        return names.index(tok)

    for n, words in lines[1:]:
        kw = words[0]
        if kw == "chart" and len(words) == 2:
            if len(labels) == m:
                raise DomainError(f"line {n}: more chart lines than charts")
            labels.append(words[1])
        elif kw == "overlap" and len(words) == 3:
            i, j = chart(n, words[1]), chart(n, words[2])
            O[i, j] = O[j, i] = True
        elif kw == "trans" and len(words) == 4 and words[3].startswith("tag="):
            i, j = chart(n, words[1]), chart(n, words[2])
            t = TransitionTag.parse(words[3][4:])
            for key in ((i, j), (j, i)):
                if explicit.get(key, t) != t:
                    raise DomainError(f"line {n}: conflicting tags for {words[1]} {words[2]}")
                explicit[key] = t
        else:
            raise DomainError(f"line {n}: cannot parse {' '.join(words)!r}")
    if labels and len(labels) != m:
        raise DomainError(f"{len(labels)} chart lines for {m} charts")
    for (i, j), t in explicit.items():
        if not O[i, j]:
            raise DomainError(f"trans {i} {j} given for non-overlapping charts")
        if i == j and t is not B:
            raise DomainError("identity transitions must be tagged B")
        T[i, j] = t is B
    return Atlas(O, T, tuple(labels))


def format_atlas(atlas: Atlas) -> str:
    default = tuple(str(i) for i in range(atlas.m))
    out = [f"atlas {atlas.m}"]
    if atlas.labels != default:
        out += [f"chart {x}" for x in atlas.labels]
    L = atlas.labels
    pairs = [(i, j) for i, j in atlas.pairs() if i < j]
    out += [f"overlap {L[i]} {L[j]}" for i, j in pairs]
    out += [f"trans {L[i]} {L[j]} tag={TransitionTag(int(atlas.btag[i, j]))}" for i, j in pairs]
    return "\n".join(out) + "\n"
