"""Two-point hitting probabilities for the symmetric case.

Given a symmetric stable process on the positive half-line killed at 0,
the probability of hitting one of two target points first is computed by
two independent routes: the cofactor ratio from the 3x3 occupation-
density matrix, and the closed ratio of occupation densities.  Both are
homogeneous of degree zero in the overall density normalization, which
a dedicated invariance test exploits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import DomainError, NumericError
from .stable import Kind, killed_resolvent_u

__all__ = [
    "HitQuery",
    "hit_matrix_method",
    "hit_closed_ratio",
    "hit_prob_lamperti",
]

_COINCIDENCE_TOL = 1e-8


@dataclass(frozen=True)
class HitQuery:
    """Start point x and two positive targets a, b, all distinct."""

    alpha: float
    x: float
    a: float
    b: float
    prefactor_scale: float = 1.0

    def __post_init__(self):
        if not (1.0 < self.alpha < 2.0):
            raise DomainError("points are hit only for alpha in (1, 2)")
        pts = (self.x, self.a, self.b)
        if min(pts) <= 0.0:
            raise DomainError("x, a, b must be positive")
        scale = max(pts)
        for i in range(3):
            for j in range(i + 1, 3):
                if abs(pts[i] - pts[j]) < _COINCIDENCE_TOL * scale:
                    raise DomainError(
                        "near-coincident points degenerate the occupation matrix"
                    )


def _u_matrix(q: HitQuery):
    pts = (q.x, q.a, q.b)
    return [
        [
            killed_resolvent_u(q.alpha, pi, pj, prefactor_scale=q.prefactor_scale)
            for pj in pts
        ]
        for pi in pts
    ]


def _cofactor(mat, i, j):
    rows = [r for k, r in enumerate(mat) if k != i]
    sub = [[r[k] for k in range(3) if k != j] for r in rows]
    sign = -1.0 if (i + j) % 2 else 1.0
    return sign * (sub[0][0] * sub[1][1] - sub[0][1] * sub[1][0])


def hit_matrix_method(q: HitQuery) -> float:
    """P(first hit of {a, b} is at a, before ruin) via the matrix route.

    With U the occupation-density matrix over {x, a, b} and Q = -U^-1,
    the probability is -q(x, a)/q(x, x), i.e. a ratio of cofactors of U.
    """
    mat = _u_matrix(q)
    # inv(U)[0][1] = C10/det, inv(U)[0][0] = C00/det; the determinant and
    # overall density normalization cancel in the ratio.
    c00 = _cofactor(mat, 0, 0)
    c10 = _cofactor(mat, 1, 0)
    if c00 == 0.0:
        raise NumericError("singular occupation matrix: vanishing cofactor")
    norm = max(abs(v) for row in mat for v in row)
    det = sum(mat[0][j] * _cofactor(mat, 0, j) for j in range(3))
    cof_max = max(abs(_cofactor(mat, i, j)) for i in range(3) for j in range(3))
    condition = 3.0 * norm * 3.0 * cof_max / abs(det) if det else math.inf
    if condition > 1e12:
        raise NumericError(
            "ill-conditioned occupation matrix", detail={"condition": condition}
        )
    return -c10 / c00


def hit_closed_ratio(q: HitQuery) -> float:
    """Same probability via the printed ratio of occupation densities."""

    def u(p1, p2):
        return killed_resolvent_u(q.alpha, p1, p2, prefactor_scale=q.prefactor_scale)

    denom_1 = u(q.b, q.a)
    denom_2 = u(q.b, q.b)
    if denom_1 == 0.0 or denom_2 == 0.0:
        raise NumericError("vanishing occupation density in the closed ratio")
    num = u(q.x, q.a) / denom_1 - u(q.x, q.b) / denom_2
    den = u(q.a, q.a) / denom_1 - u(q.a, q.b) / denom_2
    if den == 0.0:
        raise NumericError("vanishing denominator in the closed ratio")
    return num / den


def hit_prob_lamperti(kind: Kind, alpha: float, v: float, u: float) -> float:
    """P(the log-scale process hits v before u), symmetric case only.

    UP carries the tilt exponent alpha/2, DOWN carries alpha/2 - 1, both
    applied to the process-scale position e^v of the lower target.
    """
    if not (v < 0.0 < u):
        raise DomainError("need v < 0 < u")
    if kind is Kind.UP:
        expo = alpha / 2.0
    elif kind is Kind.DOWN:
        expo = alpha / 2.0 - 1.0
    else:
        raise DomainError("two-point hitting is defined for the UP and DOWN kinds")
    f = hit_closed_ratio(HitQuery(alpha, 1.0, math.exp(v), math.exp(u)))
    prob = math.exp(v) ** expo * f
    if not (-1e-10 <= prob <= 1.0 + 1e-10):
        raise NumericError(
            "hitting probability escaped [0, 1]", detail={"value": prob}
        )
    return min(max(prob, 0.0), 1.0)
