import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from regcalc.atlas import (
    AbsorbMode, Atlas, FiniteMagma, FormalMap, TransitionTag, absorb_compose, atlas_coproduct,
    atlas_product, bdiffeo_subset, check_b_structure, check_ideal, format_atlas,
    hom_bijection_check, ideal_side, parse_atlas, random_atlas, random_morphisms, retract_atlas,
    transition_magma,
)
from regcalc.errors import DomainError, NotAbsorbing, OrderedRequired

B, CK = TransitionTag.B, TransitionTag.CK


def triangle(tags=(CK, CK, CK)):
    return Atlas.build(3, [(0, 1), (1, 2), (0, 2)], [e for e, t in zip([(0, 1), (1, 2), (0, 2)], tags) if t is B])


def complete(m, all_b=True):
    edges = [(i, j) for i in range(m) for j in range(i + 1, m)]
    return Atlas.build(m, edges, edges if all_b else [])


class TestAbsorb:
    def test_examples(self):
        assert absorb_compose(CK, B, "left") is B
        assert absorb_compose(B, CK, "left") is CK
        assert absorb_compose(B, B, "left") is B
        assert absorb_compose(B, CK, "right") is B
        with pytest.raises(OrderedRequired):
            absorb_compose(B, B, "left", ordered=False)

    def test_core_modes_need_iso(self):
        assert absorb_compose(CK, B, "left", iso=False) is CK
        assert absorb_compose(CK, B, "full_left", iso=False) is B


class TestAtlas:
    def test_invariants_enforced(self):
        with pytest.raises(DomainError):
            Atlas(np.array([[True, True], [False, True]]), np.eye(2, dtype=bool))
        with pytest.raises(DomainError):
            Atlas(np.eye(2, dtype=bool), np.zeros((2, 2), dtype=bool))

    def test_b_structure(self):
        assert check_b_structure(triangle((B, B, B)))
        assert not check_b_structure(triangle((B, CK, B)))
        assert check_b_structure(Atlas.build(1, [], []))

    def test_format_round_trip(self):
        a = triangle((B, CK, B))
        assert parse_atlas(format_atlas(a)) == a

    def test_missing_trans_defaults_to_ck(self):
        a = parse_atlas("atlas 2\noverlap 0 1\n")
        assert a.tag(0, 1) is CK

    def test_parse_errors(self):
        with pytest.raises(DomainError):
            parse_atlas("charts 2")
        with pytest.raises(DomainError):
            parse_atlas("atlas 2\ntrans 0 1 tag=B")
        with pytest.raises(DomainError):
            parse_atlas("atlas 2\noverlap 0 5")


class TestRetract:
    def test_all_ck_left(self):
        r = retract_atlas(triangle(), "left")
        assert check_b_structure(r)
        assert r.m == 9
        assert "1;0" in r.labels

    def test_fixed_point_diagonal(self):
        a = triangle((B, B, B))
        r = retract_atlas(a, "left")
        assert check_b_structure(r)
        diag = [r.labels.index(f"{i};{i}") for i in range(3)]
        sub = r.btag[np.ix_(diag, diag)]
        assert np.array_equal(sub, a.btag)
        assert np.array_equal(r.overlap[np.ix_(diag, diag)], a.overlap)

    def test_single_chart(self):
        a = Atlas.build(1, [], [])
        r = retract_atlas(a, "right")
        assert r.m == 1 and check_b_structure(r)

    def test_none_mode_not_absorbing(self):
        with pytest.raises(NotAbsorbing):
            retract_atlas(triangle(), "none")

    @given(st.integers(0, 2 ** 32 - 1), st.sampled_from(["left", "right", "full_left", "full_right", "full"]))
    def test_random(self, seed, mode):
        a = random_atlas(np.random.default_rng(seed))
        r = retract_atlas(a, mode)
        assert check_b_structure(r)
        assert np.array_equal(r.overlap, r.overlap.T)
        assert r.overlap.diagonal().all() and r.btag.diagonal().all()


class TestMagma:
    def test_left_ideal_complete(self):
        magma = transition_magma(complete(4), "left")
        assert check_ideal(magma, bdiffeo_subset(magma), "left").passed

    def test_single_edge_subset_fails(self):
        magma = transition_magma(complete(4), "left")
        rep = check_ideal(magma, ["B:0->1"], "left")
        assert not rep.passed

    def test_whole_set(self):
        magma = transition_magma(complete(4, all_b=False), "right")
        assert check_ideal(magma, magma.elements, "both").passed

    def test_none_control_fails(self):
        a = complete(3, all_b=False)
        magma = transition_magma(a, "none")
        rep = check_ideal(magma, bdiffeo_subset(magma), "left")
        assert not rep.passed
        assert rep.lines("atlas")[1].split()[2] == "FAIL"

    def test_star_totalizes(self):
        magma = transition_magma(Atlas.build(3, [(0, 1)], []), "left")
        g = "Ck:1->0"
        f = "Ck:2->2"
        assert not magma.composable(g, f)
        assert magma.compose(g, f) == "id_*"

    def test_from_partial(self):
        m = FiniteMagma.from_partial(["a", "b"], lambda g, f: "a" if (g, f) == ("a", "a") else None)
        assert m.compose("a", "a") == "a"
        assert m.compose("a", "b") == "id_*"

    @pytest.mark.parametrize("mode", ["left", "right", "full"])
    def test_ideal_side(self, mode):
        a = random_atlas(np.random.default_rng(7), max_charts=6)
        magma = transition_magma(a, mode)
        assert check_ideal(magma, bdiffeo_subset(magma), ideal_side(mode)).passed


class TestHom:
    def test_iso_left(self):
        src = Atlas.build(2, [(0, 1)], [])
        tgt = Atlas.build(2, [(0, 1)], [(0, 1)])
        f = FormalMap("f", True, {(a, b): CK for a in range(2) for b in range(2)})
        assert hom_bijection_check(src, tgt, [f], "left").passed

    def test_non_iso_excluded_from_core(self):
        src = Atlas.build(2, [(0, 1)], [])
        tgt = Atlas.build(2, [(0, 1)], [(0, 1)])
        f = FormalMap("f", False)
        rep = hom_bijection_check(src, tgt, [f], "left")
        assert rep.passed and rep.checked == 0
        assert hom_bijection_check(src, tgt, [f], "full_left").checked > 0
        assert hom_bijection_check(src, tgt, [f], "full_left").passed

    def test_random(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            src = random_atlas(rng, 5)
            tgt = random_atlas(rng, 5, all_b=True)
            for mode in ("full_left", "full_right"):
                direction = "forward" if mode == "full_left" else "backward"
                ms = random_morphisms(rng, src, tgt, 10, direction)
                assert hom_bijection_check(src, tgt, ms, mode).passed


class TestProducts:
    def test_coproduct_and_product(self):
        a, b = triangle((B, B, B)), complete(2)
        s = atlas_coproduct(a, b)
        assert s.m == 5 and check_b_structure(s)
        assert not s.overlap[0, 3]
        p = atlas_product(a, b)
        assert p.m == 6 and check_b_structure(p)
        assert not check_b_structure(atlas_product(triangle(), b))
