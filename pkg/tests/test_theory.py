import math

import numpy as np
import pytest

from gmminit.initstrategy import count_equivalent_terms, g0, g1, g2, g3, gaussian, uniform
from gmminit.pauli import Observable
from gmminit.theory import (
    LEMMA_CASES,
    expect,
    linear_combination_bound,
    moment_coeffs,
    nonnegative_bound,
    quadrature_nodes,
    single_term_bound,
    verify_lemma_identity,
)


class TestMoments:
    def test_examples(self):
        c = moment_coeffs(0.0)
        assert (c.alpha, c.beta, c.gamma) == (1.0, 0.0, 1.0)
        assert moment_coeffs(0.25).gamma == pytest.approx(0.8824969025845955, abs=1e-15)
        assert moment_coeffs(0.25).gamma == pytest.approx(math.exp(-0.125), abs=1e-15)

    @pytest.mark.parametrize("s2", [1e-6, 0.01, 0.1, 0.5, 1.0, 4.0])
    def test_invariants(self, s2):
        c = moment_coeffs(s2)
        assert c.alpha + c.beta == pytest.approx(1.0, abs=1e-15)
        assert c.alpha >= 1 - s2
        assert c.beta >= s2 * (1 - s2)
        assert c.gamma ** 2 == pytest.approx(math.exp(-s2), rel=1e-14)
        assert c.gamma ** 2 >= c.alpha - c.beta

    def test_small_variance_precision(self):
        assert moment_coeffs(1e-12).beta == pytest.approx(1e-12, rel=1e-9)

    def test_negative(self):
        with pytest.raises(ValueError):
            moment_coeffs(-0.1)


class TestQuadrature:
    @pytest.mark.parametrize("s2", [0.01, 0.3, 2.0])
    def test_against_closed_form(self, s2):
        c = moment_coeffs(s2)
        d = gaussian(0.0, s2)
        assert expect(d, lambda t: np.cos(t) ** 2) == pytest.approx(c.alpha, abs=1e-13)
        assert expect(d, lambda t: np.sin(t) ** 2) == pytest.approx(c.beta, abs=1e-13)
        assert expect(d, np.cos) == pytest.approx(c.gamma, abs=1e-13)

    def test_weights_sum_to_one(self):
        for d in (g0(), g1(0.2), g2(0.2), g3(0.2), uniform(0, 1)):
            assert quadrature_nodes(d)[1].sum() == pytest.approx(1.0, abs=1e-13)

    def test_uniform(self):
        assert expect(uniform(0, math.pi), np.sin) == pytest.approx(2 / math.pi, abs=1e-13)


class TestBounds:
    def test_single_term(self):
        assert single_term_bound(1) == 0.125
        assert single_term_bound(8) == 0.234375
        assert single_term_bound(15) == pytest.approx(0.2416666666666667, abs=1e-15)
        vals = [single_term_bound(L) for L in range(1, 50)]
        assert all(b > a for a, b in zip(vals, vals[1:]))
        assert vals[-1] < 0.25
        with pytest.raises(ValueError):
            single_term_bound(0)

    def test_linear_combination(self):
        assert linear_combination_bound(1, 2) == 0.1875
        assert linear_combination_bound(2, 2) == 0.375
        with pytest.raises(ValueError):
            linear_combination_bound(0, 2)

    def test_nonnegative_example(self):
        obs = Observable.from_terms([(1, "ZZ"), (1, "ZI")])
        val = nonnegative_bound(obs, 0, 2)
        hand = 0.375 + 2 * (3 / 8) * (7 / 8) ** 4 * math.exp(-0.25)
        assert val == pytest.approx(hand, abs=1e-15)
        assert val == pytest.approx(0.71741, abs=1e-4)
        assert val == pytest.approx(0.7173890405556231, abs=1e-15)

    def test_nonnegative_single_term(self):
        assert nonnegative_bound(Observable.single("XZ"), 0, 2) == 0.1875

    def test_nonnegative_errors(self):
        with pytest.raises(ValueError):
            nonnegative_bound(Observable.from_terms([(1, "ZZ"), (-1, "ZI")]), 0, 2)
        with pytest.raises(ValueError):
            nonnegative_bound(Observable.from_terms([(1, "II"), (1, "ZI")]), 0, 2)

    def test_dominates_linear_combination(self):
        rng = np.random.default_rng(0)
        for _ in range(30):
            n = int(rng.integers(1, 5))
            words = {"".join(rng.choice(list("IZXY"), n, p=[0.35, 0.35, 0.15, 0.15])) for _ in range(6)}
            words.discard("I" * n)
            if not words:
                continue
            obs = Observable.from_terms([(1.0, w) for w in sorted(words)])
            L = int(rng.integers(1, 6))
            m, _ = count_equivalent_terms(obs, 0)
            assert nonnegative_bound(obs, 0, L) >= linear_combination_bound(m, L)


class TestLemmas:
    def test_unknown(self):
        with pytest.raises(KeyError):
            verify_lemma_identity("nope", 0.1, 0)

    @pytest.mark.parametrize("case", sorted(LEMMA_CASES))
    def test_each_case(self, case):
        for s2 in (0.01, 0.1, 0.5):
            for t in range(5):
                assert verify_lemma_identity(case, s2, t).error <= 1e-8

    def test_nontrivial_values(self):
        # guards against both sides collapsing to zero
        reps = [verify_lemma_identity("gaussian.mean", 0.1, t) for t in range(10)]
        assert max(abs(r.rhs) for r in reps) > 0.1

    def test_report_fields(self):
        r = verify_lemma_identity("corollary.square.G1", 0.1, 3)
        assert r.case == "corollary.square.G1" and r.sigma2 == 0.1
        assert r.error == abs(r.lhs - r.rhs)
