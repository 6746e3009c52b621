"""Path simulation of stable processes with h-transform reweighting.

Empirical oracles for the closed-form exit laws: a stable path started
at 1 is simulated on a fixed time grid until it leaves the window
(e^v, e^u); the killed / conditioned-to-stay-positive / conditioned-to-
hit-zero laws are all read off the same plain stable path by
classification (killing at 0) or by Doob h-weights at the exit position.
Grid-crossing bias is first-class and measured by step refinement, not
assumed away.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BudgetError, DomainError
from .exit_laws import ExitWindow
from .stable import Kind, LampertiKind, StableParams, increment_sampler, path_rng

__all__ = [
    "SIDE_UP",
    "SIDE_DOWN",
    "SIDE_KILLED",
    "SIDE_CENSORED",
    "SIDE_LABELS",
    "SimConfig",
    "ExitSampleSet",
    "simulate_exit",
    "step_refinement_report",
    "extrapolated_bias",
    "ks_distance",
    "moment_check",
]

SIDE_UP, SIDE_DOWN, SIDE_KILLED, SIDE_CENSORED = 0, 1, 2, 3
SIDE_LABELS = ("up", "down", "killed", "censored")

_MAX_GRID_POINTS = 10**8
_BLOCK = 1024


@dataclass(frozen=True)
class SimConfig:
    """Path count, time step, seed and truncation horizon for one run."""

    n_paths: int
    step: float
    seed: int
    max_time: float = 50.0

    def __post_init__(self):
        if self.n_paths < 1:
            raise DomainError("n_paths must be >= 1")
        if self.step <= 0.0:
            raise DomainError("step must be positive")
        if self.max_time <= 0.0:
            raise DomainError("max_time must be positive")
        if self.max_time / self.step > _MAX_GRID_POINTS:
            raise BudgetError(
                f"max_time/step exceeds the {_MAX_GRID_POINTS:.0e} grid-point cap"
            )

    @property
    def max_steps(self) -> int:
        return int(self.max_time / self.step)


@dataclass(frozen=True)
class ExitSampleSet:
    """Per-path exit records plus the configuration that produced them.

    ``side`` holds small-int codes (see SIDE_LABELS); ``theta`` is the
    log-overshoot, NaN unless the side is up or down; ``h_weight`` is the
    Doob weight at the exit position (1 for the killed kind, 0 for
    censored paths); ``steps_used`` counts grid steps to termination.
    """

    kind: Kind
    params: StableParams
    window: ExitWindow
    config: SimConfig
    side: np.ndarray
    theta: np.ndarray
    h_weight: np.ndarray
    steps_used: np.ndarray

    @property
    def n_censored(self) -> int:
        return int(np.count_nonzero(self.side == SIDE_CENSORED))

    @property
    def censored_fraction(self) -> float:
        return self.n_censored / self.config.n_paths

    def require_censoring_below(self, max_fraction: float = 1e-3):
        if self.censored_fraction >= max_fraction:
            raise BudgetError(
                f"{self.n_censored} of {self.config.n_paths} paths censored "
                f"(>= {max_fraction:.1e}); raise max_time or lower the horizon"
            )

    def exit_position(self) -> np.ndarray:
        """Process-scale position at exit, NaN for killed/censored paths."""
        pos = np.full(self.side.shape, np.nan)
        up = self.side == SIDE_UP
        dn = self.side == SIDE_DOWN
        pos[up] = np.exp(self.window.u + self.theta[up])
        pos[dn] = np.exp(self.window.v - self.theta[dn])
        return pos

    def weighted_event_mean(self, event: np.ndarray) -> float:
        """Unnormalized h-weighted frequency: the conditioned-law probability.

        The start point is 1, so no x^gamma divisor appears.
        """
        return float(np.sum(self.h_weight * event) / self.config.n_paths)


def _h_exponent(kind: Kind, p: StableParams) -> float:
    if kind is Kind.UP:
        return p.alpha_rho
    if kind is Kind.DOWN:
        return p.alpha_rho - 1.0
    return 0.0


def _simulate_one(draw, max_steps, rng, eu, ev):
    """Run one path to exit; returns (raw position, steps, exited)."""
    x = 1.0
    done = 0
    while done < max_steps:
        n = min(_BLOCK, max_steps - done)
        pos = x + np.cumsum(draw(rng, n))
        hit = np.flatnonzero((pos >= eu) | (pos <= ev))
        if hit.size:
            k = int(hit[0])
            return float(pos[k]), done + k + 1, True
        x = float(pos[-1])
        done += n
    return x, done, False


def simulate_exit(
    kind: Kind | LampertiKind,
    p: StableParams,
    window: ExitWindow,
    cfg: SimConfig,
) -> ExitSampleSet:
    """Simulate first exit of the stable path from (e^v, e^u) for all paths.

    The path starts at 1 and is observed at multiples of cfg.step; the
    first grid point at or beyond a barrier terminates it.  The killed
    kind classifies nonpositive positions as killed; the conditioned
    kinds assign the Doob weight at the exit position and censor ruined
    paths (weight 0).  Horizon exhaustion also censors.
    """
    if isinstance(kind, LampertiKind):
        kind = kind.kind
    p.require_two_sided()
    eu, ev = math.exp(window.u), math.exp(window.v)
    draw = increment_sampler(p, cfg.step)
    h_exp = _h_exponent(kind, p)
    n = cfg.n_paths

    side = np.empty(n, dtype=np.int8)
    theta = np.full(n, np.nan)
    h_weight = np.zeros(n)
    steps = np.zeros(n, dtype=np.int64)

    for i in range(n):
        rng = path_rng(cfg.seed, i)
        x, used, exited = _simulate_one(draw, cfg.max_steps, rng, eu, ev)
        steps[i] = used
        if not exited:
            side[i] = SIDE_CENSORED
            continue
        if x >= eu:
            side[i] = SIDE_UP
            theta[i] = math.log(x) - window.u
            h_weight[i] = 1.0 if kind is Kind.STAR else x**h_exp
        elif x <= 0.0:
            # Ruin: absorption for the killed kind, impossible (weight 0)
            # for the conditioned kinds.
            side[i] = SIDE_KILLED if kind is Kind.STAR else SIDE_CENSORED
            h_weight[i] = 1.0 if kind is Kind.STAR else 0.0
        else:
            side[i] = SIDE_DOWN
            theta[i] = window.v - math.log(x)
            h_weight[i] = 1.0 if kind is Kind.STAR else x**h_exp

    return ExitSampleSet(kind, p, window, cfg, side, theta, h_weight, steps)


def step_refinement_report(
    kind: Kind | LampertiKind,
    p: StableParams,
    window: ExitWindow,
    cfg: SimConfig,
    levels: int,
) -> list[dict]:
    """Re-run the simulation at step, step/2, ..., reporting estimator drift.

    Each level reuses the configured seed (common random numbers).  The
    rows carry the up-exit probability estimate and the mean up-side
    overshoot so downstream tolerances can cite the observed bias decay.
    """
    if levels < 2:
        raise DomainError("levels must be >= 2")
    rows = []
    for level in range(levels):
        lcfg = SimConfig(cfg.n_paths, cfg.step / 2**level, cfg.seed, cfg.max_time)
        s = simulate_exit(kind, p, window, lcfg)
        up = s.side == SIDE_UP
        w_up = float(np.sum(s.h_weight[up]))
        rows.append(
            {
                "level": level,
                "step": lcfg.step,
                "p_up": w_up / lcfg.n_paths,
                "mean_theta_up": (
                    float(np.sum(s.h_weight[up] * s.theta[up])) / w_up
                    if w_up > 0.0
                    else float("nan")
                ),
                "censored_fraction": s.censored_fraction,
            }
        )
    return rows


def extrapolated_bias(report: list[dict], field: str) -> float:
    """Residual-bias estimate at the finest level: the last inter-level drift.

    For a first-order-in-step bias the drift between consecutive halved
    levels bounds the remaining bias at the finer of the two.
    """
    if len(report) < 2:
        raise DomainError("need a report with >= 2 levels")
    return abs(report[-1][field] - report[-2][field])


def _weights_or_ones(samples, weights):
    samples = np.asarray(samples, dtype=float)
    if samples.size == 0:
        raise DomainError("empty sample set")
    if weights is None:
        weights = np.ones_like(samples)
    else:
        weights = np.asarray(weights, dtype=float)
    if weights.shape != samples.shape or np.any(weights < 0.0):
        raise DomainError("weights must be nonnegative and match the samples")
    total = float(weights.sum())
    if total <= 0.0:
        raise DomainError("weights must have positive sum")
    return samples, weights, total


def ks_distance(samples, cdf, weights=None) -> float:
    """Sup distance between the weighted empirical CDF and a model CDF."""
    samples, weights, total = _weights_or_ones(samples, weights)
    order = np.argsort(samples, kind="stable")
    xs = samples[order]
    cum = np.cumsum(weights[order]) / total
    f = np.array([cdf(x) for x in xs])
    upper = np.max(np.abs(cum - f))
    lower = np.max(np.abs(np.concatenate(([0.0], cum[:-1])) - f))
    return float(max(upper, lower))


def moment_check(samples, k, target, tolerance_sd, weights=None) -> dict:
    """z-score of the weighted k-th sample moment against a target value."""
    if k < 1 or int(k) != k:
        raise DomainError("k must be a positive integer")
    samples, weights, total = _weights_or_ones(samples, weights)
    xk = samples ** float(k)
    mean = float(np.sum(weights * xk) / total)
    # Effective-sample-size variance of the weighted mean.
    var = float(np.sum(weights * (xk - mean) ** 2) / total)
    n_eff = total**2 / float(np.sum(weights**2))
    se = math.sqrt(var / n_eff) if n_eff > 0 else float("inf")
    z = (mean - target) / se if se > 0 else math.copysign(math.inf, mean - target)
    return {
        "measured": mean,
        "target": target,
        "se": se,
        "z": z,
        "passed": abs(z) <= tolerance_sd,
    }
