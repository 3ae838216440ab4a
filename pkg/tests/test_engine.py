import cmath
import math
from fractions import Fraction

import numpy as np
import pytest
from conftest import nested, random_elements, random_point, same

from cfregions import (
    INF,
    ZERO,
    ConvergentState,
    DomainError,
    ElementSequence,
    ExtendedComplex,
    InvalidElementError,
    MoebiusMap,
    Sector,
    convergent,
    convergent_at,
    determinant_residuals,
    even_odd_limits,
    excomplex_eq,
    km5_bound,
    reverse_closed_form,
    reverse_sequence,
    reverse_values,
    s_map,
    tail_closed_form,
    tail_sequence,
    tail_values,
    wallis_euler_step,
)
from cfregions.engine import iter_states, state_at


def seq(*bs):
    return ElementSequence.from_list(bs)


def fixed_point(b):
    """Root of f**2 + b f - 1 = 0 with positive real part: f = 1/(b + f).

    Written as 2/(b + sqrt(b**2 + 4)) to avoid cancellation for large b.
    """
    return 2 / (b + cmath.sqrt(b * b + 4))


class TestElementSequence:
    def test_zero_element_rejected(self):
        with pytest.raises(InvalidElementError):
            seq(1, 0, 2)

    def test_declared_sector_checked(self):
        with pytest.raises(DomainError):
            ElementSequence.from_list([1, 1j], Sector(0.5))

    def test_geometric_family(self):
        s = ElementSequence.geometric(2, 0.5, 4)
        assert s.elements == (1, 0.5, 0.25, 0.125)
        assert s.even_ratio_sup == 0.5 and s.odd_ratio_sup == 2.0 and s.summable

    def test_constant_family(self):
        s = ElementSequence.constant(1j + 1, 3)
        assert s.count == 3 and s.summable is False and s.even_ratio_sup == 1.0

    def test_count_must_be_positive(self):
        with pytest.raises(DomainError):
            ElementSequence.constant(1, 0)

    def test_one_based_access(self):
        s = seq(5, 6, 7)
        assert s.b(1) == 5 and s.b(3) == 7
        with pytest.raises(DomainError):
            s.b(0)

    def test_callback(self):
        s = ElementSequence.from_callback(lambda n: n * n, 4)
        assert s.elements == (1, 4, 9, 16)


class TestWallisEuler:
    def test_initial_state(self):
        st = ConvergentState.initial(3)
        assert (st.a_prev, st.a_cur, st.b_prev, st.b_cur, st.n, st.scale) == (0, 1, 1, 3, 1, 1.0)

    def test_one_step(self):
        st = wallis_euler_step(ConvergentState.initial(1), 2)
        assert (st.a_cur, st.b_cur) == (2, 3)

    def test_chain_1234(self):
        states = list(iter_states(seq(1, 2, 3, 4)))
        assert [s.a_cur for s in states] == [1, 2, 7, 30]
        assert [s.b_cur for s in states] == [1, 3, 10, 43]

    def test_determinant_after_two(self):
        st = state_at(seq(1, 2), 2)
        assert st.determinant() == -1 == st.expected_determinant()

    def test_zero_element(self):
        with pytest.raises(InvalidElementError):
            wallis_euler_step(ConvergentState.start(), 0)

    def test_rescaling_keeps_ratio_and_determinant(self):
        s = ElementSequence.constant(1e3, 40)
        st = state_at(s, 40)
        assert st.scale_exp > 0
        assert abs(st.determinant() - st.expected_determinant()) <= 1e-12 * abs(st.a_cur * st.b_prev)
        assert abs(st.convergent().value() - fixed_point(1e3)) < 1e-15

    def test_no_overflow_on_long_chains(self):
        st = state_at(ElementSequence.constant(1, 5000), 5000)
        assert math.isinf(st.scale) or st.scale > 1e300
        assert abs(st.convergent().value() - (math.sqrt(5) - 1) / 2) < 1e-15

    def test_tiny_elements_rescale_down(self):
        st = state_at(ElementSequence.constant(1e-6, 30), 30)
        assert all(abs(v) <= 1e8 for v in (st.a_cur, st.a_prev, st.b_cur, st.b_prev))

    def test_determinants_random(self, rng):
        for _ in range(50):
            s = ElementSequence.from_list(random_elements(rng, int(rng.integers(1, 31))))
            for n, first, second in determinant_residuals(s):
                assert first <= 1e-9
                assert n == 1 or second <= 1e-9

    def test_determinants_exact_for_modest_positive(self):
        # without cancellation the residual is small relative to the target itself
        s = seq(1.5, 0.75, 2.0, 1.25, 0.5, 3.0)
        for st in iter_states(s):
            assert abs(st.determinant() - st.expected_determinant()) <= 1e-12


class TestConvergents:
    def test_1234(self):
        assert excomplex_eq(convergent(seq(1, 2, 3, 4), 4), ExtendedComplex(30, 43))
        assert convergent(seq(1, 2, 3, 4), 4).value() == pytest.approx(0.697674, abs=1e-6)

    def test_single(self):
        assert convergent(seq(1), 1).value() == 1

    def test_fibonacci(self):
        assert excomplex_eq(convergent(seq(1, 1, 1, 1), 4), ExtendedComplex(3, 5))

    def test_against_exact_nested_fraction(self, rng):
        for _ in range(30):
            bs = [Fraction(int(rng.integers(1, 50)), int(rng.integers(1, 50))) for _ in range(12)]
            exact = nested(bs)
            got = convergent(seq(*map(float, bs)), 12).value().real
            assert got == pytest.approx(float(exact), rel=1e-13)

    def test_out_of_range(self):
        with pytest.raises(DomainError):
            convergent(seq(1, 2), 3)
        with pytest.raises(DomainError):
            convergent(seq(1, 2), 0)

    def test_pole(self):
        # 1/(1 + 1/(-1)) has a zero denominator
        assert convergent(seq(1, -1), 2).is_infinite

    def test_at_closed_form(self):
        assert excomplex_eq(convergent_at(seq(1, 2), 2, 1), ExtendedComplex(3, 4))

    def test_at_zero_is_convergent(self, rng):
        s = ElementSequence.from_list(random_elements(rng, 9))
        for n in range(1, 10):
            assert same(convergent_at(s, n, 0), convergent(s, n), 1e-14)

    def test_at_infinity(self):
        assert excomplex_eq(convergent_at(seq(1, 2), 2, INF), ExtendedComplex(1, 1))

    def test_composition_equivalence(self, rng):
        for _ in range(100):
            n = int(rng.integers(1, 21))
            s = ElementSequence.from_list(random_elements(rng, n))
            w = INF if rng.uniform() < 0.2 else random_point(rng)
            m = MoebiusMap.identity()
            for b in s:
                m = m @ s_map(b)
            assert same(convergent_at(s, n, w), m(w), 1e-10)


class TestTails:
    def test_b_family_seed(self):
        ts = tail_sequence(seq(1, 2), 2, -3)
        assert ts[0].value() == -3
        assert excomplex_eq(ts[1], ExtendedComplex.of(-1))
        assert ts[2].is_infinite

    def test_trivial(self):
        assert tail_sequence(seq(1, 2), 0, 2 + 1j) == [ExtendedComplex.of(2 + 1j)]

    def test_closed_form_matches_recursion(self, rng):
        s = seq(1, 2, 3)
        for _ in range(20):
            w = random_point(rng)
            ts = tail_sequence(s, 3, tail_closed_form(s, 3, w))
            for j, t in enumerate(ts):
                assert same(t, tail_closed_form(s, 3 - j, w), 1e-12)
            assert same(ts[-1], w, 1e-12)

    def test_inverse_of_convergent(self, rng):
        checked = 0
        while checked < 100:
            n = int(rng.integers(1, 16))
            s = ElementSequence.from_list(random_elements(rng, n, -1, 1))
            if state_at(s, n).condition() > 1e6:
                continue
            w = random_point(rng)
            assert same(convergent_at(s, n, tail_closed_form(s, n, w)), w, 1e-9)
            checked += 1

    def test_inverse_at_infinity(self):
        s = seq(1, 2, 3)
        assert convergent_at(s, 3, tail_closed_form(s, 3, INF)).is_infinite

    def test_forward_definition(self, rng):
        for _ in range(50):
            n = int(rng.integers(1, 31))
            s = ElementSequence.from_list(random_elements(rng, n))
            w = INF if rng.uniform() < 0.2 else random_point(rng)
            for k, t in enumerate(tail_values(s, n, w)):
                assert same(t, tail_closed_form(s, k, w), 1e-9)

    def test_condition_grows_with_depth(self):
        s = ElementSequence.constant(1, 60)
        assert state_at(s, 1).condition() < 10 < state_at(s, 60).condition()

    def test_classical_families(self, rng):
        s = ElementSequence.from_list(random_elements(rng, 10, -1, 1))
        for n in range(1, 11):
            st = state_at(s, n)
            assert same(tail_closed_form(s, n, INF), ExtendedComplex(-st.b_cur, st.b_prev), 1e-10)
            assert same(tail_closed_form(s, n, 0), ExtendedComplex(-st.a_cur, st.a_prev), 1e-10)


class TestReverse:
    def test_hand_value(self):
        r = reverse_sequence(seq(1, 2), 2, 0)
        assert excomplex_eq(r, ExtendedComplex(1, 3))
        # B_1 / B_2, not (B_2 - 1) / B_2
        st = state_at(seq(1, 2), 2)
        assert excomplex_eq(r, ExtendedComplex(st.b_prev, st.b_cur))

    def test_trivial(self):
        assert reverse_sequence(seq(1, 2), 0, 5j).value() == 5j

    def test_values_list(self):
        rs = reverse_values(seq(1, 1, 1, 1), 4, 0)
        assert [r.value().real for r in rs] == pytest.approx([0, 1, 1 / 2, 2 / 3, 3 / 5])

    def test_is_reversed_fraction(self, rng):
        bs = random_elements(rng, 7, -1, 1)
        w = random_point(rng)
        assert same(reverse_sequence(seq(*bs), 7, w), nested(bs[::-1], w), 1e-12)

    def test_closed_form(self, rng):
        for _ in range(50):
            n = int(rng.integers(0, 12))
            s = ElementSequence.from_list(random_elements(rng, 12, -1, 1))
            w = random_point(rng)
            assert same(reverse_sequence(s, n, w), reverse_closed_form(s, n, w), 1e-10)

    def test_link_to_tails(self, rng):
        s = seq(1, 2, 3)
        for _ in range(20):
            w = random_point(rng)
            lhs = reverse_sequence(s, 3, w)
            rhs = ExtendedComplex.of(-1 / tail_closed_form(s, 3, -1 / w).value())
            assert same(lhs, rhs, 1e-12)

    def test_infinity_family(self, rng):
        s = ElementSequence.from_list(random_elements(rng, 8, -1, 1))
        for n in range(1, 9):
            st = state_at(s, n)
            assert same(reverse_sequence(s, n, INF), ExtendedComplex(st.a_prev, st.a_cur), 1e-10)
            assert same(reverse_sequence(s, n, ZERO), ExtendedComplex(st.b_prev, st.b_cur), 1e-10)


class TestEvenOddLimits:
    def test_stern_stolz_geometric(self):
        lim = even_odd_limits(ElementSequence.geometric(1, 0.5, 400), tol=1e-12)
        assert lim.converged
        assert abs(lim.determinant() - 1 / lim.scale**2) <= 1e-8
        assert abs(lim.f_even - lim.f_odd) > 0.1

    def test_golden_ratio(self):
        lim = even_odd_limits(ElementSequence.constant(1, 1000), tol=1e-13)
        assert lim.converged
        target = (math.sqrt(5) - 1) / 2
        assert abs(lim.f_even - target) < 1e-12 and abs(lim.f_odd - target) < 1e-12

    def test_rotated_constant(self):
        b = cmath.exp(1j * math.pi / 6)
        lim = even_odd_limits(ElementSequence.constant(b, 2000), tol=1e-13)
        assert lim.converged
        assert abs(lim.f_even - fixed_point(b)) < 1e-10 and abs(lim.f_odd - fixed_point(b)) < 1e-10

    def test_not_converged_within_budget(self):
        lim = even_odd_limits(ElementSequence.geometric(1, 0.9, 400), tol=1e-14, max_terms=10)
        assert not lim.converged and lim.iterations_used == 10

    def test_determinant_in_growing_regime(self):
        # A and B grow here, so the identity is only resolvable relative to the products
        lim = even_odd_limits(ElementSequence.constant(2 + 1j, 300), tol=1e-13)
        target = 1 / lim.scale**2
        products = max(abs(lim.a_odd * lim.b_even), abs(lim.a_even * lim.b_odd))
        assert abs(lim.determinant() - target) <= 1e-12 * products


class TestKM5:
    def test_constant_ones(self):
        lhs, rhs = km5_bound(seq(1, 1, 1, 1), 1, 2)
        assert lhs == pytest.approx(0.6) and rhs == pytest.approx(1.0)

    def test_single_pair_equality(self):
        lhs, rhs = km5_bound(seq(1, 1), 1, 1)
        assert lhs == pytest.approx(0.5) and rhs == pytest.approx(0.5)

    def test_two_three(self):
        lhs, rhs = km5_bound(seq(2, 3), 1, 1)
        assert lhs == pytest.approx(3 / 7)
        assert rhs == pytest.approx(3 / 7)
        _, printed = km5_bound(seq(2, 3), 1, 1, numerator="odd")
        assert printed == pytest.approx(2 / 7)

    def test_convention_pinned_by_exact_oracle(self, rng):
        """Exact rational evaluation decides which numerator bounds the fraction."""
        even_fails = odd_fails = 0
        for _ in range(300):
            n = int(rng.integers(1, 5))
            bs = [Fraction(int(rng.integers(1, 20)), int(rng.integers(1, 20))) for _ in range(2 * n)]
            w = Fraction(int(rng.integers(1, 10)), int(rng.integers(1, 10)))
            lhs = nested([w * b for b in bs])
            even = sum(w * bs[2 * i + 1] / (1 + w * w * bs[2 * i] * bs[2 * i + 1]) for i in range(n))
            odd = sum(w * bs[2 * i] / (1 + w * w * bs[2 * i] * bs[2 * i + 1]) for i in range(n))
            even_fails += lhs > even
            odd_fails += lhs > odd
        assert even_fails == 0
        assert odd_fails > 0

    def test_domain(self):
        with pytest.raises(DomainError):
            km5_bound(seq(1, -1), 1, 1)
        with pytest.raises(DomainError):
            km5_bound(seq(1, 1), 0, 1)
        with pytest.raises(DomainError):
            km5_bound(seq(1, 1), 1, 2)
