from fractions import Fraction
from itertools import product

import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from regcalc.errors import DomainError, InvalidExponents
from regcalc.index_core import (
    ADD, INF, MAX, MIN, ZERO_SPACE, Counterexample, ExtIndex, GammaRange, IndexFn, LawReport,
    check_additive, check_index_morphism, check_left_distributive, check_right_distributive,
    default_gamma, ext, format_index, sort_key, star_harmonic, star_holder, star_young,
)

fractions_ge1 = st.fractions(min_value=1, max_value=100, max_denominator=50)
indices_ge1 = st.one_of(fractions_ge1.map(ExtIndex), st.just(INF))


class TestExtIndex:
    def test_reduced_storage(self):
        v = ExtIndex(Fraction(6, 4))
        assert v.value == Fraction(3, 2)
        assert str(v) == "3/2"

    def test_inf_is_top(self):
        assert ExtIndex(10 ** 9) < INF
        assert not INF < INF
        assert format_index(INF) == "inf"

    def test_parse(self):
        assert ext("inf") == INF
        assert ext("3/2") == ExtIndex(Fraction(3, 2))
        assert ext(4) == ExtIndex(4)

    def test_negative_rejected(self):
        with pytest.raises(DomainError):
            ExtIndex(-1)

    def test_zero_space_passthrough_and_order(self):
        assert ext(ZERO_SPACE) is ZERO_SPACE
        assert format_index(ZERO_SPACE) == "zero"
        vals = [INF, ExtIndex(0), ZERO_SPACE, ExtIndex(3)]
        assert sorted(vals, key=sort_key) == [ZERO_SPACE, ExtIndex(0), ExtIndex(3), INF]

    @given(st.fractions(min_value=0, max_value=1000), st.fractions(min_value=0, max_value=1000))
    def test_total_order_matches_fractions(self, a, b):
        assert (ExtIndex(a) < ExtIndex(b)) == (a < b)
        assert (ExtIndex(a) == ExtIndex(b)) == (a == b)


class TestStars:
    @pytest.mark.parametrize("i,j,expected", [(3, 6, 2), (INF, 5, 5), (2, 2, 1), (INF, INF, INF)])
    def test_holder_examples(self, i, j, expected):
        assert star_holder(i, j) == ext(expected)

    def test_holder_below_one(self):
        with pytest.raises(DomainError):
            star_holder(Fraction(1, 2), 3)

    @pytest.mark.parametrize("i,j,expected", [(1, 1, 1), (2, 2, INF), (1, 2, 2), (1, INF, INF)])
    def test_young_examples(self, i, j, expected):
        assert star_young(i, j) == ext(expected)

    def test_young_invalid(self):
        with pytest.raises(InvalidExponents):
            star_young(3, 3)

    @given(fractions_ge1, fractions_ge1)
    def test_holder_reciprocal_law(self, i, j):
        assert 1 / star_holder(i, j).value == 1 / i + 1 / j

    @given(indices_ge1, indices_ge1)
    def test_holder_commutative(self, i, j):
        assert star_holder(i, j) == star_holder(j, i)

    @given(indices_ge1, indices_ge1, indices_ge1)
    def test_holder_associative(self, i, j, k):
        assume(star_holder(j, k) >= 1 and star_holder(i, j) >= 1)
        assert star_holder(i, star_holder(j, k)) == star_holder(star_holder(i, j), k)

    @given(indices_ge1, indices_ge1, indices_ge1)
    def test_harmonic_associative(self, i, j, k):
        assert star_harmonic(i, star_harmonic(j, k)) == star_harmonic(star_harmonic(i, j), k)

    @given(indices_ge1, indices_ge1, indices_ge1)
    def test_holder_monotone(self, i, j, k):
        lo, hi = sorted([j, k])
        assert star_holder(i, lo) <= star_holder(i, hi)

    @given(fractions_ge1, fractions_ge1)
    def test_young_reciprocal_law(self, i, j):
        if 1 / i + 1 / j < 1:
            with pytest.raises(InvalidExponents):
                star_young(i, j)
            return
        r = star_young(i, j)
        expected = 1 / i + 1 / j - 1
        assert (r == INF) if expected == 0 else (1 / r.value == expected)

    def test_harmonic_extends_holder(self):
        assert star_harmonic(Fraction(1, 2), 1) == ext(Fraction(1, 3))
        assert star_harmonic(0, 5) == ext(0)
        assert star_harmonic(6, 6) == star_holder(6, 6)


class TestLawCheckers:
    gamma = GammaRange(8)

    def test_additive(self):
        assert check_additive(MIN, self.gamma).passed
        assert check_additive(MAX, self.gamma).passed
        rep = check_additive(ADD, self.gamma)
        assert not rep.passed
        # i = 0 is a fixed point of addition; the first failure is i = 1
        assert rep.counterexamples[0] == Counterexample((ext(1),), ext(2), ext(1))

    def test_distributive_min_min(self):
        assert check_left_distributive(MIN, MIN, self.gamma).passed
        assert check_right_distributive(MIN, MIN, self.gamma).passed
        assert check_left_distributive(MIN, MIN, self.gamma).checked == 729

    def test_holder_min_on_1_to_8(self):
        g = GammaRange(8, 1)
        assert check_left_distributive(IndexFn("holder", star_holder), MIN, g).passed

    def test_left_fails_at_override(self):
        g = GammaRange(3)
        eps = ADD.override({(1, 2): 10})
        rep = check_left_distributive(eps, MAX, g)
        assert not rep.passed
        assert all(1 in [int(a.value) for a in c.args[:1]] for c in rep.counterexamples)
        assert any(c.args[1:] in ((ext(2), ext(x)), (ext(x), ext(2))) for c in rep.counterexamples
                   for x in range(4))

    def test_right_projection_max_holds(self):
        # max(eps(i,k), eps(j,k)) = max(i,j) = eps(max(i,j), k): exhaustive search finds no witness
        first = IndexFn("first", lambda i, j: i)
        assert check_right_distributive(first, MAX, GammaRange(4)).passed

    def test_right_fails_min_over_add(self):
        rep = check_right_distributive(MIN, ADD, GammaRange(4))
        assert not rep.passed
        # min(1,1) + min(1,1) = 2 but min(1 + 1, 1) = 1
        assert Counterexample((ext(1), ext(1), ext(1)), ext(2), ext(1)) in rep.counterexamples

    def test_symmetric_ops_same_verdict(self):
        g = GammaRange(5)
        for eps, delta in product([MIN, MAX, ADD], repeat=2):
            left = check_left_distributive(eps, delta, g).passed
            right = check_right_distributive(eps, delta, g).passed
            assert left == right

    def test_morphism(self):
        g = GammaRange(8)
        assert check_index_morphism(lambda i: i, MIN, MIN, g).passed
        assert check_index_morphism(lambda i: 2 * i, MIN, MIN, g).passed
        rep = check_index_morphism(lambda i: i * i, ADD, ADD, g)
        assert not rep.passed
        assert Counterexample((ext(1), ext(1)), ext(4), ext(2)) in rep.counterexamples

    @given(st.lists(st.integers(0, 8), min_size=2, max_size=2))
    def test_pass_iff_no_counterexamples(self, xs):
        tab = IndexFn.table("t", {(a, b): max(a, b) for a, b in product(range(3), repeat=2)}
                            | {(xs[0] % 3, xs[1] % 3): xs[0] + xs[1]})
        rep = check_left_distributive(tab, MAX, GammaRange(2))
        assert rep.passed == (len(rep.counterexamples) == 0)

    def test_report_lines(self):
        rep = check_additive(ADD, GammaRange(2))
        lines = rep.lines("check")
        assert lines[0] == "check additive FAIL 2 3 0"
        assert lines[1] == "check additive[1] FAIL 2 1 0"
        assert all(len(line.split()) == 6 for line in lines)


class TestGamma:
    def test_default_env(self, monkeypatch):
        monkeypatch.setenv("REGCALC_GAMMA_MAX", "5")
        assert default_gamma().max == 5
        monkeypatch.delenv("REGCALC_GAMMA_MAX")
        assert default_gamma().max == 8

    def test_max_at_least_one(self):
        with pytest.raises(DomainError):
            GammaRange(0)

    def test_table_undefined(self):
        t = IndexFn.table("t", {(1, 1): 1})
        with pytest.raises(DomainError):
            t(1, 2)
