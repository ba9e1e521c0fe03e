import numpy as np
import pytest

from heterodro.measures import make_finite_measure
from heterodro.metrics import wasserstein1
from heterodro.problems import (
    NonIntegerSupport,
    OutOfRange,
    ProblemSpec,
    expected_objective,
    expected_objective_grid,
    objective,
    opt_value,
    oracle,
    ski_cost_from_cdf,
    ski_discrete_cost,
)
from heterodro.regret import ski_indifference_measure

from conftest import random_measure

NV = ProblemSpec.newsvendor(1, 1, 1)
PR = ProblemSpec.pricing(1)
SKI = ProblemSpec.ski_rental(3, 10)


def delta(p, upper):
    return make_finite_measure([p], [1.0], upper)


class TestObjective:
    def test_newsvendor_underage(self):
        p = ProblemSpec.newsvendor(2, 1, 1)
        assert objective(p, 0.3, 0.8) == pytest.approx(1.0, abs=1e-15)

    def test_pricing_tie_is_sale(self):
        assert objective(PR, 0.5, 0.5) == 0.5

    def test_ski_buy_branch(self):
        assert objective(SKI, 2, 5) == 5.0

    def test_out_of_range(self):
        with pytest.raises(OutOfRange):
            objective(PR, 1.5, 0.5)
        with pytest.raises(OutOfRange):
            objective(PR, 0.5, -0.1)

    def test_pointwise_bounds(self, rng):
        for _ in range(500):
            x, xi = rng.uniform(0, 1, size=2)
            assert 0.0 <= objective(PR, x, xi) <= PR.M
            assert 0.0 <= objective(NV, x, xi) <= max(NV.c_u, NV.c_o) * NV.M
            xs, xis = 10 * x, 10 * xi
            assert 0.0 <= objective(SKI, xs, xis) <= SKI.M + SKI.b


class TestExpectedObjective:
    def test_pricing_two_point(self):
        mu_plus = make_finite_measure([0.5, 1.0], [0.4, 0.6], 1)
        assert expected_objective(PR, 1.0, mu_plus) == pytest.approx(0.6, abs=1e-15)
        assert expected_objective(PR, 0.5, mu_plus) == pytest.approx(0.5, abs=1e-15)

    def test_newsvendor_point_mass(self, rng):
        for _ in range(50):
            x, xi0 = rng.uniform(0, 1, size=2)
            got = expected_objective(NV, x, delta(xi0, 1))
            assert got == pytest.approx(abs(x - xi0), abs=1e-12)

    def test_ski_indifference_costs(self):
        nu = ski_indifference_measure(10, 3)
        for k in list(range(7)) + [10]:
            assert expected_objective(SKI, k, nu) == pytest.approx(3.0, abs=1e-10)

    def test_ski_closed_form_matches_atom_sum(self, rng):
        for _ in range(300):
            m = random_measure(rng, upper=10.0)
            x = float(rng.uniform(0, 10))
            direct = expected_objective(SKI, x, m)
            via_cdf = ski_cost_from_cdf(SKI, x, m)
            assert direct == pytest.approx(via_cdf, abs=1e-10)

    def test_grid_kernel_matches_scalar(self, rng):
        xs = np.linspace(0, 1, 37)
        for p in (NV, PR):
            for _ in range(20):
                m = random_measure(rng)
                grid = expected_objective_grid(p, xs, m)
                scalar = [expected_objective(p, x, m) for x in xs]
                assert np.allclose(grid, scalar, atol=1e-12)
        xs10 = np.linspace(0, 10, 37)
        for _ in range(20):
            m = random_measure(rng, upper=10.0)
            grid = expected_objective_grid(SKI, xs10, m)
            scalar = [expected_objective(SKI, x, m) for x in xs10]
            assert np.allclose(grid, scalar, atol=1e-12)


class TestSkiDiscreteCost:
    def test_rent_then_buy(self):
        m = delta(5, 10)
        assert ski_discrete_cost(0, m, 3) == 3.0
        assert ski_discrete_cost(5, m, 3) == 5.0
        assert ski_discrete_cost(2, m, 3) == 5.0

    def test_matches_expected_objective(self, rng):
        for _ in range(100):
            pts = rng.choice(np.arange(0, 11), size=3, replace=False)
            wts = rng.dirichlet(np.ones(3))
            m = make_finite_measure(pts.tolist(), wts.tolist(), 10)
            for k in range(11):
                assert ski_discrete_cost(k, m, 3) == pytest.approx(
                    expected_objective(SKI, k, m), abs=1e-10
                )

    def test_non_integer_support(self):
        with pytest.raises(NonIntegerSupport):
            ski_discrete_cost(1, delta(0.5, 10), 3)
        with pytest.raises(NonIntegerSupport):
            ski_discrete_cost(1.5, delta(5, 10), 3)


class TestOracle:
    def test_newsvendor_critical_fractile(self):
        m = make_finite_measure([0, 1], [0.25, 0.75], 1)
        assert oracle(NV, m) == 1.0

    def test_pricing_posts_high_atom(self):
        mu_plus = make_finite_measure([0.5, 1.0], [0.4, 0.6], 1)
        assert oracle(PR, mu_plus) == 1.0

    def test_ski_buys_immediately_when_cheap(self):
        assert oracle(SKI, delta(5, 10)) == 0.0

    def test_opt_values(self):
        assert opt_value(PR, delta(0.7, 1)) == pytest.approx(0.7)
        assert opt_value(SKI, delta(5, 10)) == pytest.approx(3.0)
        assert opt_value(SKI, delta(2, 10)) == pytest.approx(2.0)
        coin = make_finite_measure([0, 1], [0.5, 0.5], 1)
        assert opt_value(NV, coin) == pytest.approx(0.5)

    def test_pricing_tie_breaks_small(self):
        m = make_finite_measure([0.5, 1.0], [0.5, 0.5], 1)
        assert oracle(PR, m) == 0.5


class TestOracleBruteForce:
    @pytest.mark.parametrize("problem", [NV, PR, SKI])
    def test_matches_grid_optimum(self, problem, rng):
        xs = np.linspace(0.0, problem.M, 10_001)
        for _ in range(100):
            m = random_measure(rng, upper=problem.M, max_atoms=5)
            values = expected_objective_grid(problem, xs, m)
            best = opt_value(problem, m)
            if problem.sense == "min":
                assert best <= values.min() + 1e-9
            else:
                assert best >= values.max() - 1e-9


class TestStructuralInequalities:
    def test_ski_partial_lipschitz(self, rng):
        # cost increase over a longer rental is at most the extra duration
        for _ in range(300):
            m = random_measure(rng, upper=10.0)
            x1, x2 = sorted(rng.uniform(0, 10, size=2))
            g1 = expected_objective(SKI, x1, m)
            g2 = expected_objective(SKI, x2, m)
            assert g2 - g1 <= (x2 - x1) + 1e-10

    def test_cdf_vs_wasserstein(self, rng):
        # F(x1) <= H(x2) + d_W / (x2 - x1) for x1 < x2
        from heterodro.measures import cdf

        for _ in range(300):
            a, b = random_measure(rng), random_measure(rng)
            x1, x2 = sorted(rng.uniform(0, 1, size=2))
            if x2 - x1 < 1e-6:
                continue
            dw = wasserstein1(a, b)
            assert cdf(a, x1) <= cdf(b, x2) + dw / (x2 - x1) + 1e-9

    def test_pricing_revenue_shift(self, rng):
        # G(x2 | nu) - G(x1 | mu) <= (x2 - x1) + M * d_W / (x2 - x1)
        for _ in range(300):
            a, b = random_measure(rng), random_measure(rng)
            x1, x2 = sorted(rng.uniform(0, 1, size=2))
            if x2 - x1 < 1e-6:
                continue
            dw = wasserstein1(a, b)
            lhs = expected_objective(PR, x2, b) - expected_objective(PR, x1, a)
            assert lhs <= (x2 - x1) + 1.0 * dw / (x2 - x1) + 1e-9

    def test_ski_cost_shift(self, rng):
        # G(x2 | mu) - G(x1 | nu) <= b * d_W / (x2 - x1) + d_W + (x2 - x1)
        for _ in range(300):
            a, b = random_measure(rng, upper=10.0), random_measure(rng, upper=10.0)
            x1, x2 = sorted(rng.uniform(0, 10, size=2))
            if x2 - x1 < 1e-6:
                continue
            dw = wasserstein1(a, b)
            lhs = expected_objective(SKI, x2, a) - expected_objective(SKI, x1, b)
            assert lhs <= SKI.b * dw / (x2 - x1) + dw + (x2 - x1) + 1e-9


class TestParsing:
    def test_round_trip(self):
        for p in (NV, PR, SKI):
            assert ProblemSpec.from_text(p.to_text()) == p

    def test_invalid(self):
        with pytest.raises(ValueError):
            ProblemSpec.from_text("auction:1")
        with pytest.raises(ValueError):
            ProblemSpec.ski_rental(10, 5)
        with pytest.raises(ValueError):
            ProblemSpec.newsvendor(0, 1, 1)
