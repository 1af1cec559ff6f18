import math

import numpy as np
import pytest

from gmminit.ansatz import build_circuit_spec
from gmminit.initstrategy import (
    DistSpec,
    STRATEGY_KINDS,
    build_strategy,
    count_equivalent_terms,
    g0,
    g1,
    g2,
    g3,
    gaussian,
    sample_angle,
    sample_angles,
    sample_params,
    uniform,
)
from gmminit.pauli import Observable
from gmminit.theory import moment_coeffs


def last_block(strategy, spec):
    labels = strategy.labels()
    return labels[-spec.rotations_per_block:]


class TestDistSpec:
    def test_weights_validated(self):
        with pytest.raises(ValueError):
            DistSpec("mixture", ((0.5, 0.0, 1.0), (0.4, 1.0, 1.0)))
        with pytest.raises(ValueError):
            DistSpec("mixture", ((1.0, 0.0, -1.0),))
        with pytest.raises(ValueError):
            DistSpec("beta")
        with pytest.raises(ValueError):
            uniform(1.0, -1.0)

    def test_means(self):
        assert g2(0.1).mean == 0.0
        assert g3(0.1).mean == 0.0
        assert uniform(-1, 3).mean == 1.0


class TestSampling:
    def test_degenerate_bimodal(self):
        x = sample_angles(g2(0.0), np.random.default_rng(0), 10_000)
        assert set(np.round(x, 12)) == {round(-math.pi / 2, 12), round(math.pi / 2, 12)}
        assert abs(np.mean(x > 0) - 0.5) < 0.02

    def test_zero_variance_gaussian(self):
        assert sample_angle(gaussian(0.0, 0.0), np.random.default_rng(1)) == 0.0

    def test_trimodal_mean(self):
        x = sample_angles(g3(0.01), np.random.default_rng(2), 1_000_000)
        assert abs(x.mean()) <= 5e-3

    @pytest.mark.parametrize("s2", [0.05, 0.3])
    def test_mixture_moments(self, s2):
        rng = np.random.default_rng(3)
        c = moment_coeffs(s2)
        x2 = sample_angles(g2(s2), rng, 1_000_000)
        x3 = sample_angles(g3(s2), rng, 1_000_000)
        tol = 5 / math.sqrt(1_000_000)
        assert abs(np.cos(x2).mean()) < tol
        assert abs(np.cos(x3).mean()) < tol
        assert abs((np.cos(x2) ** 2).mean() - c.beta) < tol
        assert abs((np.cos(x3) ** 2).mean() - c.alpha) < tol

    def test_uniform_cell(self):
        x = sample_angles(g0(), np.random.default_rng(4), 100_000)
        assert abs(x.mean()) < 0.02
        assert x.min() >= -math.pi and x.max() <= math.pi

    def test_sample_params_deterministic(self):
        spec = build_circuit_spec(3, 2)
        strat = build_strategy("table2", spec, Observable.single("XYZ"))
        np.testing.assert_array_equal(sample_params(strat, 9), sample_params(strat, 9))
        assert not np.array_equal(sample_params(strat, 9), sample_params(strat, 10))

    def test_zero_strategy(self):
        spec = build_circuit_spec(2, 2)
        strat = build_strategy("table3", spec, Observable.single("ZZ"), sigma2=0.0)
        np.testing.assert_array_equal(sample_params(strat, 0), np.zeros(spec.shape))

    def test_per_cell_streams(self):
        # a cell's draw depends only on (seed, flat index), not on the grid size
        small = build_strategy("uniform", build_circuit_spec(2, 1))
        big = build_strategy("uniform", build_circuit_spec(2, 3))
        np.testing.assert_array_equal(sample_params(small, 5), sample_params(big, 5)[:2])


class TestTables:
    def test_table1_example(self):
        spec = build_circuit_spec(4, 3)
        strat = build_strategy("table1", spec, Observable.single("XYZI"))
        assert strat.sigma2 == pytest.approx(1 / 18)
        rx, ry = last_block(strat, spec)
        assert ry == ["G2", "G0", "G1", "G0"]
        assert rx == ["G1", "G2", "G1", "G0"]

    def test_table2_example(self):
        spec = build_circuit_spec(2, 2)
        strat = build_strategy("table2", spec, Observable.single("XI"))
        assert strat.sigma2 == 0.25
        rx, ry = last_block(strat, spec)
        assert ry == ["G2", "G3"]
        assert rx == ["G1", "G3"]

    def test_table3(self):
        spec = build_circuit_spec(4, 2)
        rx, ry = last_block(build_strategy("table3", spec, Observable.single("XYZI")), spec)
        assert ry == ["G2", "G1", "G1", "G1"]
        assert rx == ["G1", "G2", "G1", "G1"]

    def test_reduced_domain(self):
        spec = build_circuit_spec(3, 2)
        strat = build_strategy("reduced_domain", spec)
        cell = uniform(-0.07 * math.pi, 0.07 * math.pi)
        assert all(d == cell for row in strat.dists for d in row)

    def test_gaussian_baseline(self):
        spec = build_circuit_spec(3, 2)
        strat = build_strategy("gaussian_baseline", spec, Observable.single("XIZ"))
        assert strat.sigma2 == pytest.approx(1 / (4 * 2 * 4))
        assert build_strategy("gaussian_baseline", spec).sigma2 == pytest.approx(1 / (4 * 3 * 4))

    @pytest.mark.parametrize("kind", STRATEGY_KINDS)
    @pytest.mark.parametrize("order", ["RX_RY", "RY_RX", "RX_RY_RX"])
    def test_no_holes_and_gaussian_body(self, kind, order):
        spec = build_circuit_spec(4, 3, "chain", order)
        strat = build_strategy(kind, spec, Observable.single("XYZI"))
        assert strat.shape == spec.shape
        assert all(isinstance(d, DistSpec) for row in strat.dists for d in row)
        if kind.startswith("table"):
            body = strat.dists[: spec.n_layers - spec.rotations_per_block]
            assert all(d == g1(strat.sigma2) for row in body for d in row)

    def test_table1_g3_vs_table2(self):
        spec = build_circuit_spec(4, 2)
        obs = Observable.single("XYZI")
        t1 = build_strategy("table1", spec, obs, z_variant="G3")
        t2 = build_strategy("table2", spec, obs)
        for layer in (-2, -1):
            for n, ch in enumerate("XYZI"):
                same = t1.dists[layer][n] == t2.dists[layer][n]
                if ch in "XZ":
                    assert same
        # Y: R_y differs (G0 vs G1); I: both gates differ (G0 vs G3)
        assert t1.dists[-1][1] != t2.dists[-1][1]
        assert t1.dists[-1][3] != t2.dists[-1][3] and t1.dists[-2][3] != t2.dists[-2][3]

    def test_sigma2_override_and_scale(self):
        spec = build_circuit_spec(2, 2)
        obs = Observable.single("XX")
        assert build_strategy("table2", spec, obs, sigma2=0.3).sigma2 == 0.3
        assert build_strategy("table2", spec, obs, sigma2_scale=2.0).sigma2 == pytest.approx(0.25)

    def test_explicit_term(self):
        spec = build_circuit_spec(3, 2)
        tfim = Observable.from_terms([(1, "ZZI"), (1, "IZZ"), (-1, "XII"), (-1, "IXI"), (-1, "IIX")])
        strat = build_strategy("table1", spec, tfim, term="XII")
        assert strat.sigma2 == 0.25
        assert last_block(strat, spec)[1] == ["G2", "G0", "G0"]

    def test_errors(self):
        spec = build_circuit_spec(2, 2)
        with pytest.raises(ValueError):
            build_strategy("table3", spec, Observable.from_terms([(1, "ZZ"), (-1, "XX")]))
        with pytest.raises(ValueError):
            build_strategy("table1", spec, Observable.single("II"))
        with pytest.raises(ValueError):
            build_strategy("table1", spec)
        with pytest.raises(ValueError):
            build_strategy("bogus", spec)
        with pytest.raises(IndexError):
            build_strategy("table2", spec, Observable.single("XX"), chosen_term=3)
        with pytest.raises(ValueError):
            build_strategy("table2", spec, Observable.single("XXX"))


class TestAlternateOrders:
    def test_derived_reproduces_base_order(self):
        spec = build_circuit_spec(4, 2)
        obs = Observable.single("XYZI")
        for kind in ("table1", "table2", "table3"):
            assert build_strategy(kind, spec, obs).labels() == build_strategy(kind, spec, obs, alt_order="literal").labels()

    def test_reversed_order_derived(self):
        spec = build_circuit_spec(4, 2, "chain", "RY_RX")
        ry, rx = last_block(build_strategy("table2", spec, Observable.single("XYZI")), spec)
        assert ry == ["G2", "G1", "G3", "G3"]
        assert rx == ["G1", "G2", "G3", "G3"]

    def test_reversed_order_literal(self):
        spec = build_circuit_spec(4, 2, "chain", "RY_RX")
        strat = build_strategy("table2", spec, Observable.single("XYZI"), alt_order="literal")
        ry, rx = last_block(strat, spec)
        assert ry == ["G1", "G2", "G3", "G3"]
        assert rx == ["G2", "G1", "G3", "G3"]

    def test_three_rotation_derived(self):
        spec = build_circuit_spec(4, 2, "chain", "RX_RY_RX")
        rx1, ry, rx2 = last_block(build_strategy("table2", spec, Observable.single("XYZI")), spec)
        assert rx1 == ["G1", "G1", "G3", "G3"]
        assert ry == ["G2", "G1", "G3", "G3"]
        assert rx2 == ["G1", "G2", "G3", "G3"]

    def test_three_rotation_literal(self):
        spec = build_circuit_spec(4, 2, "chain", "RX_RY_RX")
        strat = build_strategy("table2", spec, Observable.single("XYZI"), alt_order="literal")
        rx1, ry, rx2 = last_block(strat, spec)
        assert rx1 == ["G3"] * 4
        assert ry == ["G1", "G2", "G3", "G3"]
        assert rx2 == ["G1", "G2", "G3", "G3"]


class TestEquivalentTerms:
    def test_examples(self):
        assert count_equivalent_terms(Observable.from_terms([(1, "ZZ"), (1, "ZI"), (1, "XX")]), 0) == (2, [0, 1])
        assert count_equivalent_terms(Observable.single("XYZ"), 0) == (1, [0])
        assert count_equivalent_terms(Observable.from_terms([(1, "XY"), (1, "YX")]), 0)[0] == 1

    def test_identity_word_excluded(self):
        obs = Observable.from_terms([(1, "ZI"), (1, "II")])
        assert count_equivalent_terms(obs, 0) == (1, [0])
