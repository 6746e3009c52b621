import math

import numpy as np
import pytest

from pssmp.errors import BudgetError, DomainError
from pssmp.exit_laws import ExitWindow, exit_mass_two_sided, Direction
from pssmp.montecarlo import (
    SIDE_CENSORED,
    SIDE_DOWN,
    SIDE_KILLED,
    SIDE_LABELS,
    SIDE_UP,
    ExitSampleSet,
    SimConfig,
    extrapolated_bias,
    ks_distance,
    moment_check,
    simulate_exit,
    step_refinement_report,
)
from pssmp.stable import Kind, StableParams

P = StableParams(1.5, 0.5)
W = ExitWindow(v=-0.5, u=0.5)
CFG = SimConfig(n_paths=300, step=2e-3, seed=123)


@pytest.fixture(scope="module")
def star_run():
    return simulate_exit(Kind.STAR, P, W, CFG)


class TestSimulation:
    def test_reruns_are_bit_identical(self, star_run):
        again = simulate_exit(Kind.STAR, P, W, CFG)
        assert np.array_equal(star_run.side, again.side)
        assert np.array_equal(star_run.theta, again.theta, equal_nan=True)
        assert np.array_equal(star_run.h_weight, again.h_weight)
        assert np.array_equal(star_run.steps_used, again.steps_used)

    def test_seed_changes_output(self, star_run):
        other = simulate_exit(Kind.STAR, P, W, SimConfig(300, 2e-3, 124))
        assert not np.array_equal(star_run.theta, other.theta, equal_nan=True)

    def test_side_codes_and_labels(self, star_run):
        assert set(np.unique(star_run.side)) <= {
            SIDE_UP,
            SIDE_DOWN,
            SIDE_KILLED,
            SIDE_CENSORED,
        }
        assert SIDE_LABELS[SIDE_KILLED] == "killed"
        # The killed kind sees all three outcomes at this window size.
        assert np.count_nonzero(star_run.side == SIDE_UP) > 0
        assert np.count_nonzero(star_run.side == SIDE_DOWN) > 0
        assert np.count_nonzero(star_run.side == SIDE_KILLED) > 0

    def test_theta_and_weights_consistent(self, star_run):
        exited = (star_run.side == SIDE_UP) | (star_run.side == SIDE_DOWN)
        assert np.all(star_run.theta[exited] >= 0.0)
        assert np.all(np.isnan(star_run.theta[~exited]))
        # killed kind: weight 1 on every non-censored path
        assert np.all(star_run.h_weight[star_run.side != SIDE_CENSORED] == 1.0)

    def test_conditioned_kind_weights(self):
        s = simulate_exit(Kind.UP, P, W, CFG)
        pos = s.exit_position()
        live = (s.side == SIDE_UP) | (s.side == SIDE_DOWN)
        assert np.allclose(s.h_weight[live], pos[live] ** P.alpha_rho)
        # ruin is impossible under the conditioned law: censored, weight 0
        assert np.all(s.h_weight[s.side == SIDE_CENSORED] == 0.0)
        assert not np.any(s.side == SIDE_KILLED)

    def test_exit_positions_respect_barriers(self, star_run):
        pos = star_run.exit_position()
        up = star_run.side == SIDE_UP
        dn = star_run.side == SIDE_DOWN
        assert np.all(pos[up] >= math.exp(W.u))
        assert np.all(pos[dn] <= math.exp(W.v))

    def test_censoring_control(self, star_run):
        star_run.require_censoring_below(1.0)
        tight = ExitSampleSet(
            star_run.kind,
            star_run.params,
            star_run.window,
            star_run.config,
            np.full(star_run.side.shape, SIDE_CENSORED, dtype=np.int8),
            star_run.theta,
            star_run.h_weight,
            star_run.steps_used,
        )
        with pytest.raises(BudgetError):
            tight.require_censoring_below(1e-3)

    def test_up_fraction_near_model_value(self, star_run):
        # Coarse-step sanity band: 3 standard errors plus a generous
        # grid-bias allowance; the tight version lives in the acceptance
        # suite at a much smaller step.
        target = exit_mass_two_sided(Kind.STAR, P, W, Direction.UP)
        up = star_run.weighted_event_mean(star_run.side == SIDE_UP)
        se = math.sqrt(target * (1.0 - target) / CFG.n_paths)
        assert abs(up - target) < 3.0 * se + 0.05

    def test_budget_cap(self):
        with pytest.raises(BudgetError):
            SimConfig(n_paths=10, step=1e-8, seed=0, max_time=50.0)


class TestRefinement:
    def test_report_shape_and_bias(self):
        rows = step_refinement_report(
            Kind.STAR, P, W, SimConfig(150, 4e-3, 7), levels=2
        )
        assert [r["level"] for r in rows] == [0, 1]
        assert rows[1]["step"] == pytest.approx(rows[0]["step"] / 2.0)
        for r in rows:
            assert 0.0 <= r["p_up"] <= 1.0
        bias = extrapolated_bias(rows, "p_up")
        assert 0.0 <= bias < 0.2

    def test_levels_validation(self):
        with pytest.raises(DomainError):
            step_refinement_report(Kind.STAR, P, W, CFG, levels=1)
        with pytest.raises(DomainError):
            extrapolated_bias([{"p_up": 0.5}], "p_up")


class TestStatistics:
    def test_ks_uniform_self_test(self):
        rng = np.random.default_rng(5)
        x = rng.random(100_000)
        assert ks_distance(x, lambda t: min(max(t, 0.0), 1.0)) < 0.006

    def test_ks_weighted_reduces_to_plain(self):
        rng = np.random.default_rng(6)
        x = rng.random(500)
        cdf = lambda t: min(max(t, 0.0), 1.0)
        plain = ks_distance(x, cdf)
        weighted = ks_distance(x, cdf, weights=np.full(500, 3.0))
        assert weighted == pytest.approx(plain, abs=1e-15)

    def test_ks_detects_wrong_model(self):
        rng = np.random.default_rng(7)
        x = rng.random(2000)
        assert ks_distance(x, lambda t: min(max(t, 0.0), 1.0) ** 2) > 0.2

    def test_ks_validation(self):
        with pytest.raises(DomainError):
            ks_distance([], lambda t: t)
        with pytest.raises(DomainError):
            ks_distance([0.5], lambda t: t, weights=np.array([-1.0]))

    def test_moment_check(self):
        rng = np.random.default_rng(8)
        x = rng.standard_exponential(50_000)
        ok = moment_check(x, 1, 1.0, tolerance_sd=4.0)
        assert ok["passed"] and abs(ok["z"]) < 4.0
        assert ok["se"] == pytest.approx(1.0 / math.sqrt(50_000), rel=0.1)
        bad = moment_check(x, 1, 2.0, tolerance_sd=4.0)
        assert not bad["passed"]
        with pytest.raises(DomainError):
            moment_check(x, 0, 1.0, 3.0)

    def test_moment_check_weighted_ess(self):
        # Concentrating weight on a few samples inflates the reported SE.
        rng = np.random.default_rng(9)
        x = rng.standard_exponential(1000)
        flat = moment_check(x, 1, 1.0, 3.0)
        w = np.ones(1000)
        w[:10] = 100.0
        spiky = moment_check(x, 1, 1.0, 3.0, weights=w)
        assert spiky["se"] > flat["se"]
