"""Parameter model for strictly stable processes and their basic laws.

Covers the two-sided exit law of a stable process from a finite interval
(overshoot density and exit probability), the resolvent density of the
symmetric process killed on leaving the positive half-line, and exact
sampling of stable increments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError
from .numerics import integrate_adaptive, log_gamma, reg_incomplete_beta

__all__ = [
    "StableParams",
    "Kind",
    "LampertiKind",
    "rogozin_overshoot_density",
    "exit_up_probability",
    "killed_resolvent_u",
    "sample_stable_increment",
    "increment_sampler",
    "path_rng",
]

_BOUNDARY_TOL = 1e-9


@dataclass(frozen=True)
class StableParams:
    """Stable process parameters: index, positivity parameter, jump weights.

    ``rho`` is the positivity parameter P(X_1 > 0).  ``c_plus`` and
    ``c_minus`` weight the positive and negative jump tails; they only
    enter killing rates and normalization constants, the (alpha, rho)
    pair drives every exit law.
    """

    alpha: float
    rho: float
    c_plus: float = 1.0
    c_minus: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.alpha < 2.0):
            raise DomainError(f"alpha must lie in (0, 2), got {self.alpha}")
        if not (0.0 < self.rho < 1.0):
            raise DomainError(f"rho must lie in (0, 1), got {self.rho}")
        if self.c_plus < 0.0 or self.c_minus < 0.0:
            raise DomainError("jump weights must be nonnegative")

    @property
    def alpha_rho(self) -> float:
        return self.alpha * self.rho

    @property
    def alpha_rho_hat(self) -> float:
        """alpha * (1 - rho), the exponent attached to the negative side."""
        return self.alpha * (1.0 - self.rho)

    @property
    def two_sided(self) -> bool:
        """True when both jump directions are active."""
        return (
            self.alpha_rho < 1.0 - _BOUNDARY_TOL
            and self.alpha_rho_hat < 1.0 - _BOUNDARY_TOL
            and self.c_plus * self.c_minus > 0.0
        )

    @property
    def spectrally_negative(self) -> bool:
        """No positive jumps: alpha in (1,2) with alpha*(1-rho) = 1."""
        return self.alpha > 1.0 and abs(self.alpha_rho_hat - 1.0) <= _BOUNDARY_TOL

    @property
    def spectrally_positive(self) -> bool:
        """No negative jumps: alpha in (1,2) with alpha*rho = 1."""
        return self.alpha > 1.0 and abs(self.alpha_rho - 1.0) <= _BOUNDARY_TOL

    def require_two_sided(self):
        if not self.two_sided:
            raise DomainError(
                "operation requires two-sided jumps: alpha*rho and "
                "alpha*(1-rho) in (0,1) with c_plus*c_minus > 0"
            )

    def swapped(self) -> "StableParams":
        """Parameters of the negated process (rho <-> 1-rho, jump weights swapped)."""
        return StableParams(self.alpha, 1.0 - self.rho, self.c_minus, self.c_plus)

    @classmethod
    def spectrally_negative_case(cls, alpha, c_minus=1.0) -> "StableParams":
        if not (1.0 < alpha < 2.0):
            raise DomainError("one-sided case requires alpha in (1, 2)")
        return cls(alpha, 1.0 - 1.0 / alpha, c_plus=0.0, c_minus=c_minus)

    @classmethod
    def spectrally_positive_case(cls, alpha, c_plus=1.0) -> "StableParams":
        if not (1.0 < alpha < 2.0):
            raise DomainError("one-sided case requires alpha in (1, 2)")
        return cls(alpha, 1.0 / alpha, c_plus=c_plus, c_minus=0.0)


class Kind(Enum):
    """The three log-scale processes derived from a stable process."""

    STAR = "star"  # stable process killed on leaving (0, inf)
    UP = "up"  # conditioned to stay positive
    DOWN = "down"  # conditioned to hit 0 continuously


@dataclass(frozen=True)
class LampertiKind:
    """A Kind together with its exponential-tilt exponent and killing rate.

    The tilt exponent is the power of the space variable carried by the
    Levy density: 1 for the killed process, alpha*rho + 1 for the
    process conditioned to stay positive, alpha*rho for the process
    conditioned to hit 0 continuously.  Only the killed process carries
    a killing rate (c_minus / alpha).
    """

    kind: Kind
    gamma_exponent: float
    killing_rate: float = 0.0

    @classmethod
    def for_params(cls, kind: Kind, p: StableParams) -> "LampertiKind":
        if kind is Kind.STAR:
            return cls(kind, 1.0, p.c_minus / p.alpha)
        if kind is Kind.UP:
            return cls(kind, p.alpha_rho + 1.0, 0.0)
        if kind is Kind.DOWN:
            return cls(kind, p.alpha_rho, 0.0)
        raise DomainError(f"unknown kind {kind!r}")


def rogozin_overshoot_density(p: StableParams, a: float, x: float, y: float) -> float:
    """Density in y of the overshoot above a on the up-exit event.

    For the stable process started at x in (0, a), this is the
    (sub-probability) density of X at first passage above a, minus a,
    on the event that the upper barrier is reached before the process
    leaves the positive half-line.
    """
    p.require_two_sided()
    if not (a > 0.0 and 0.0 < x < a):
        raise DomainError("need 0 < x < a")
    if y <= 0.0:
        return 0.0
    ar, arh = p.alpha_rho, p.alpha_rho_hat
    return (
        math.sin(math.pi * arh)
        / math.pi
        * (a - x) ** arh
        * x**ar
        * y**-arh
        * (y + a) ** -ar
        / (y + a - x)
    )


def exit_up_probability(p: StableParams, a: float, x: float) -> float:
    """Probability the stable process from x in (0, a) exits above a first."""
    p.require_two_sided()
    if not (a > 0.0 and 0.0 < x < a):
        raise DomainError("need 0 < x < a")
    return reg_incomplete_beta(p.alpha_rho, p.alpha_rho_hat, x / a)


def _resolvent_prefactor(alpha: float) -> float:
    # Ratio-only quantity downstream; see hitting module for the
    # invariance test that makes the normalization choice irrelevant.
    return 1.0 / (2.0**alpha * math.exp(log_gamma(alpha / 2.0)))


def killed_resolvent_u(
    alpha: float, x: float, y: float, prefactor_scale: float = 1.0
) -> float:
    """Occupation density u(x, y) of the symmetric stable process killed at 0.

    ``prefactor_scale`` multiplies the overall constant; every consumer of
    u takes ratios in which it cancels, and tests exploit that.
    """
    if not (1.0 < alpha < 2.0):
        raise DomainError("resolvent density requires alpha in (1, 2)")
    if x <= 0.0 or y <= 0.0:
        raise DomainError("x and y must be positive")
    kappa = prefactor_scale * _resolvent_prefactor(alpha)
    if x == y:
        # Analytic diagonal limit: the integral diverges like the
        # prefactor |x-y|^(alpha-1) vanishes.
        return kappa * (2.0 * x) ** (alpha - 1.0) * 2.0 / (alpha - 1.0)
    s = 4.0 * x * y / (x - y) ** 2
    inner = integrate_adaptive(
        lambda t: t ** (alpha / 2.0 - 1.0) / math.sqrt(1.0 + t), 0.0, s, tol=1e-12
    )
    return kappa * abs(x - y) ** (alpha - 1.0) * inner.value


def _skew_angle(p: StableParams) -> float:
    """Angle parameter pinning P(X_1 > 0) = rho in the trigonometric sampler."""
    return math.pi * (p.rho - 0.5)


def path_rng(seed: int, path_index: int) -> np.random.Generator:
    """Counter-based generator for one simulated path.

    Keyed by (seed, path_index) through a 128-bit Philox key so streams
    are independent of scheduling and worker count.
    """
    key = ((int(seed) & (2**64 - 1)) << 64) | (int(path_index) & (2**64 - 1))
    return np.random.Generator(np.random.Philox(key=key))


def increment_sampler(p: StableParams, dt: float):
    """Vectorized sampler of stable increments over time step dt.

    Returns draw(rng, n) -> ndarray of n independent increments.  Uses
    the trigonometric construction from uniform and exponential variates;
    the skewness is chosen so that P(X_1 > 0) = rho, and increments scale
    as dt^(1/alpha).
    """
    if dt <= 0.0:
        raise DomainError("dt must be positive")
    alpha = p.alpha
    if abs(alpha - 1.0) < 1e-12:
        if abs(p.rho - 0.5) > 1e-12:
            raise DomainError("alpha = 1 supported only in the symmetric case")
        scale = dt  # Cauchy: linear scaling

        def draw_cauchy(rng, n):
            v = (rng.random(n) - 0.5) * math.pi
            return scale * np.tan(v)

        return draw_cauchy

    theta0 = _skew_angle(p)
    a_theta0 = alpha * theta0
    if abs(a_theta0) >= math.pi / 2.0 - 1e-12:
        raise DomainError(
            f"no strictly stable law with alpha={alpha}, rho={p.rho}"
        )
    scale = dt ** (1.0 / alpha)
    cos_at0 = math.cos(a_theta0)

    def draw(rng, n):
        v = (rng.random(n) - 0.5) * math.pi
        w = rng.standard_exponential(n)
        num = np.sin(alpha * (v + theta0))
        den = (cos_at0 * np.cos(v)) ** (1.0 / alpha)
        tail = (np.cos(a_theta0 + (alpha - 1.0) * v) / w) ** ((1.0 - alpha) / alpha)
        return scale * num / den * tail

    return draw


def sample_stable_increment(
    p: StableParams, dt: float, stream: np.random.Generator
) -> float:
    """Single exact-in-law stable increment over time dt."""
    return float(increment_sampler(p, dt)(stream, 1)[0])
