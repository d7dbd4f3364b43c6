import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import gammaln

from occupancy_entropy.combinatorics import OccupancyVector
from occupancy_entropy.distributions import (
    MultinomialDist,
    MvhgDist,
    OneParticleDistribution,
    SzilardSplitDist,
)
from occupancy_entropy.entropy import (
    EntropyReport,
    _expected_log_factorial_binomial,
    boltzmann_entropy,
    entropy_by_enumeration,
    multinomial_entropy,
    mvhg_entropy,
    sackur_tetrode,
    sandwich_check,
)

FAIR_TWO = OneParticleDistribution([0.5, 0.5])


@st.composite
def random_multinomials(draw, max_n=12, max_colors=5):
    n = draw(st.integers(min_value=0, max_value=max_n))
    c = draw(st.integers(min_value=1, max_value=max_colors))
    w = draw(
        st.lists(
            st.floats(min_value=0.0, max_value=1.0, allow_nan=False),
            min_size=c,
            max_size=c,
        ).filter(lambda ws: sum(ws) > 1e-6)
    )
    return MultinomialDist(n, OneParticleDistribution.from_weights(w))


class TestEntropyByEnumeration:
    def test_point_mass(self):
        d = MvhgDist(OccupancyVector((3, 2)), 5)
        assert entropy_by_enumeration(d) == pytest.approx(0.0, abs=1e-15)

    def test_fair_multinomial(self):
        d = MultinomialDist(2, FAIR_TWO)
        assert entropy_by_enumeration(d) == pytest.approx(1.039720771, abs=1e-9)

    def test_small_urn(self):
        d = MvhgDist(OccupancyVector((2, 2)), 2)
        assert entropy_by_enumeration(d) == pytest.approx(0.867563228, abs=1e-9)


class TestMultinomialEntropy:
    def test_worked_example(self):
        r = multinomial_entropy(MultinomialDist(2, FAIR_TWO))
        assert r.microstate_term == pytest.approx(1.386294361, abs=1e-9)
        assert r.expected_logW == pytest.approx(0.346573590, abs=1e-9)
        assert r.total == pytest.approx(1.039720771, abs=1e-9)

    def test_single_particle(self):
        p = OneParticleDistribution([0.2, 0.3, 0.5])
        r = multinomial_entropy(MultinomialDist(1, p))
        assert r.expected_logW == pytest.approx(0.0, abs=1e-14)
        assert r.total == pytest.approx(p.entropy(), abs=1e-14)

    def test_deterministic_macrostate(self):
        r = multinomial_entropy(
            MultinomialDist(5, OneParticleDistribution([1.0, 0.0, 0.0]))
        )
        assert r.total == pytest.approx(0.0, abs=1e-12)
        assert r.microstate_term == pytest.approx(0.0, abs=1e-12)
        assert r.expected_logW == pytest.approx(0.0, abs=1e-12)

    @given(random_multinomials())
    @settings(max_examples=150, deadline=None)
    def test_matches_enumeration(self, d):
        r = multinomial_entropy(d)
        assert r.total == pytest.approx(entropy_by_enumeration(d), abs=1e-10)
        assert r.total == pytest.approx(r.microstate_term - r.expected_logW, abs=1e-10)
        assert r.total >= -1e-12

    def test_mutual_information_identity(self):
        # total equals H(microstates) - E{log W} from direct microstate
        # enumeration over ordered color assignments
        p = np.array([0.2, 0.3, 0.5])
        N = 3
        d = MultinomialDist(N, OneParticleDistribution(p))
        h_micro = 0.0
        e_logw = 0.0
        from itertools import product

        for micro in product(range(3), repeat=N):
            prob = float(np.prod(p[list(micro)]))
            h_micro -= prob * math.log(prob)
            counts = [micro.count(c) for c in range(3)]
            w = math.factorial(N)
            for c in counts:
                w //= math.factorial(c)
            e_logw += prob * math.log(w)
        r = multinomial_entropy(d)
        assert r.total == pytest.approx(h_micro - e_logw, abs=1e-10)
        assert r.microstate_term == pytest.approx(h_micro, abs=1e-10)


class TestMvhgEntropy:
    def test_worked_example(self):
        r = mvhg_entropy(MvhgDist(OccupancyVector((2, 2)), 2))
        assert r.total == pytest.approx(0.867563228, abs=1e-9)

    def test_zero_draws(self):
        r = mvhg_entropy(MvhgDist(OccupancyVector((4, 1, 2)), 0))
        assert r.total == pytest.approx(0.0, abs=1e-12)

    def test_system_environment_symmetry(self):
        urn = OccupancyVector((3, 4, 1))
        for n in range(urn.total + 1):
            a = mvhg_entropy(MvhgDist(urn, n)).total
            b = mvhg_entropy(MvhgDist(urn, urn.total - n)).total
            assert a == pytest.approx(b, abs=1e-10)

    def test_matches_enumeration_sweep(self):
        for counts in [(2, 2), (5, 0), (3, 1, 2), (1, 1, 1, 1), (4, 2, 2)]:
            urn = OccupancyVector(counts)
            for n in range(urn.total + 1):
                d = MvhgDist(urn, n)
                assert mvhg_entropy(d).total == pytest.approx(
                    entropy_by_enumeration(d), abs=1e-10
                ), (counts, n)

    def test_report_identity(self):
        r = mvhg_entropy(MvhgDist(OccupancyVector((4, 2, 2)), 3))
        assert r.total == pytest.approx(r.microstate_term - r.expected_logW, abs=1e-12)

    def test_bracket_holds_on_small_sweep(self):
        # the mean-occupancy log-multiplicity sits between the two report
        # terms for the finite-universe family as well
        for counts in [(2, 2), (4, 4, 2), (3, 0, 1), (5, 2, 2, 1)]:
            urn = OccupancyVector(counts)
            for n in range(urn.total + 1):
                r = mvhg_entropy(MvhgDist(urn, n))
                assert r.microstate_term >= r.boltzmann - 1e-9
                assert r.boltzmann >= r.expected_logW - 1e-9
                assert r.total >= -1e-12


class TestBoltzmannEntropy:
    def test_single_color(self):
        assert boltzmann_entropy((2, 0)) == pytest.approx(0.0, abs=1e-14)

    def test_even_split(self):
        assert boltzmann_entropy((1, 1)) == pytest.approx(math.log(2), abs=1e-14)

    def test_real_valued_means(self):
        # Gamma-extended: ln 2! - 2 ln Gamma(2) = ln 2
        assert boltzmann_entropy((1.0, 1.0)) == pytest.approx(0.693147181, abs=1e-9)
        val = boltzmann_entropy((1.5, 0.5))
        expected = math.lgamma(3.0) - math.lgamma(2.5) - math.lgamma(1.5)
        assert val == pytest.approx(expected, abs=1e-14)

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            boltzmann_entropy((1.0, -0.5))


class TestSandwich:
    def test_worked_example(self):
        res = sandwich_check(MultinomialDist(2, FAIR_TWO))
        assert res.microstate_term == pytest.approx(1.386294361, abs=1e-9)
        assert res.boltzmann == pytest.approx(0.693147181, abs=1e-9)
        assert res.expected_logW == pytest.approx(0.346573590, abs=1e-9)
        assert res.holds

    def test_degenerate(self):
        res = sandwich_check(MultinomialDist(1, OneParticleDistribution([1.0])))
        assert res == (0.0, 0.0, 0.0, True)

    @given(random_multinomials(max_n=30, max_colors=8))
    @settings(max_examples=300, deadline=None)
    def test_always_holds(self, d):
        assert sandwich_check(d).holds


class TestSackurTetrode:
    M_E = 9.11e-31

    def test_zero_crossing(self):
        # choose L so the log argument is exactly exp(-5/2)
        from occupancy_entropy.constants import BOLTZMANN_KB, PLANCK_H

        N, T = 4, 120.0
        thermal = 2 * math.pi * self.M_E * BOLTZMANN_KB * T / PLANCK_H**2
        L = (N * math.exp(-2.5)) ** (1 / 3) / math.sqrt(thermal)
        assert sackur_tetrode(N, self.M_E, T, L) == pytest.approx(0.0, abs=1e-9)

    def test_goes_negative_at_low_temperature(self):
        high = sackur_tetrode(10, self.M_E, 300.0, 20e-9)
        low = sackur_tetrode(10, self.M_E, 300.0 / 10**6, 20e-9)
        assert low < 0 < high

    def test_parameter_validation(self):
        with pytest.raises(ValueError):
            sackur_tetrode(0, self.M_E, 300.0, 1e-8)
        with pytest.raises(ValueError):
            sackur_tetrode(1, self.M_E, -300.0, 1e-8)


class TestUnits:
    def test_bits_and_kb(self):
        r = multinomial_entropy(MultinomialDist(2, FAIR_TWO))
        bits = r.in_unit("bits")
        assert bits.total == pytest.approx(r.total / math.log(2), abs=1e-12)
        kb = r.in_unit("kB")
        assert kb.total == r.total  # relabelling only
        back = bits.in_unit("nats")
        assert back.total == pytest.approx(r.total, abs=1e-12)

    def test_unknown_unit_rejected(self):
        with pytest.raises(ValueError):
            EntropyReport(1.0, 0.5, 0.5, 0.6, unit="joules")


class TestWindowedExpectation:
    def test_window_matches_full_sum_above_threshold(self):
        # N just above the full-sum cutoff: windowed result must agree with
        # an explicit full-range reference sum
        N, p = 1500, 0.37
        k = np.arange(N + 1, dtype=np.float64)
        logpmf = (
            gammaln(N + 1.0)
            - gammaln(k + 1.0)
            - gammaln(N - k + 1.0)
            + k * math.log(p)
            + (N - k) * math.log1p(-p)
        )
        full = float(np.exp(logpmf) @ gammaln(k + 1.0))
        assert _expected_log_factorial_binomial(N, p) == pytest.approx(
            full, rel=1e-13
        )

    def test_extreme_probabilities(self):
        assert _expected_log_factorial_binomial(2000, 0.0) == 0.0
        assert _expected_log_factorial_binomial(2000, 1.0) == pytest.approx(
            math.lgamma(2001.0), rel=1e-14
        )

    def test_hypergeometric_window_matches_full_sum(self):
        from occupancy_entropy.entropy import (
            _expected_log_factorials_hypergeometric,
        )

        U, u_c, N = 5000, 2100, 1400  # N above the full-sum cutoff
        lo, hi = max(0, N - (U - u_c)), min(N, u_c)
        k = np.arange(lo, hi + 1, dtype=np.float64)
        log_pmf = (
            gammaln(u_c + 1.0)
            - gammaln(k + 1.0)
            - gammaln(u_c - k + 1.0)
            + gammaln(U - u_c + 1.0)
            - gammaln(N - k + 1.0)
            - gammaln(U - u_c - N + k + 1.0)
            - (gammaln(U + 1.0) - gammaln(N + 1.0) - gammaln(U - N + 1.0))
        )
        pmf = np.exp(log_pmf)
        full_sys = float(pmf @ gammaln(k + 1.0))
        full_env = float(pmf @ gammaln(u_c - k + 1.0))
        win_sys, win_env = _expected_log_factorials_hypergeometric(U, u_c, N)
        assert win_sys == pytest.approx(full_sys, rel=1e-13)
        assert win_env == pytest.approx(full_env, rel=1e-13)


class TestSzilardSplitEntropy:
    def test_single_particle_value(self):
        left = OneParticleDistribution([0.7, 0.3])
        d = SzilardSplitDist(1, 0.5, left, left)
        expected = math.log(2) + left.entropy()
        assert entropy_by_enumeration(d) == pytest.approx(expected, abs=1e-12)
