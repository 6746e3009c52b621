import math

import pytest

from pssmp.errors import DomainError
from pssmp.hitting import (
    HitQuery,
    hit_closed_ratio,
    hit_matrix_method,
    hit_prob_lamperti,
)
from pssmp.stable import Kind


class TestRouteAgreement:
    @pytest.mark.parametrize(
        "alpha,x,a,b",
        [
            (1.3, 1.0, 0.5, 2.0),
            (1.5, 1.0, 2.0, 0.5),
            (1.7, 0.3, 1.0, 3.0),
            (1.9, 2.0, 1.0, 4.0),
        ],
    )
    def test_matrix_equals_closed_ratio(self, alpha, x, a, b):
        q = HitQuery(alpha, x, a, b)
        assert hit_matrix_method(q) == pytest.approx(
            hit_closed_ratio(q), rel=1e-10, abs=1e-12
        )

    def test_probabilities_in_range_and_complementary(self):
        q_a = HitQuery(1.5, 1.0, 0.5, 2.0)
        q_b = HitQuery(1.5, 1.0, 2.0, 0.5)
        pa, pb = hit_matrix_method(q_a), hit_matrix_method(q_b)
        assert 0.0 < pa < 1.0 and 0.0 < pb < 1.0
        # a two-point ruin gap remains, so the two do not sum to one
        assert pa + pb < 1.0


class TestNormalizationInvariance:
    def test_prefactor_cancels_exactly(self):
        base = HitQuery(1.5, 1.0, 0.5, 2.0)
        scaled = HitQuery(1.5, 1.0, 0.5, 2.0, prefactor_scale=17.0)
        assert hit_matrix_method(scaled) == pytest.approx(
            hit_matrix_method(base), rel=1e-14
        )
        assert hit_closed_ratio(scaled) == pytest.approx(
            hit_closed_ratio(base), rel=1e-14
        )


class TestBrownianLimit:
    def test_near_gaussian_matrix_route(self):
        # As alpha -> 2 the occupation density of the killed process tends
        # to a multiple of min(x, y), for which the two-point first-hitting
        # probability has the elementary harmonic-function form.  Compare
        # at alpha = 1.99 with a loose tolerance.
        alpha, x, a, b = 1.99, 1.0, 0.5, 2.0
        got = hit_matrix_method(HitQuery(alpha, x, a, b))

        def u_min(p1, p2):
            return min(p1, p2)

        mat = [[u_min(p1, p2) for p2 in (x, a, b)] for p1 in (x, a, b)]

        def cof(m, i, j):
            rows = [r for k, r in enumerate(m) if k != i]
            sub = [[r[k] for k in range(3) if k != j] for r in rows]
            sgn = -1.0 if (i + j) % 2 else 1.0
            return sgn * (sub[0][0] * sub[1][1] - sub[0][1] * sub[1][0])

        want = -cof(mat, 1, 0) / cof(mat, 0, 0)
        assert got == pytest.approx(want, abs=1e-2)


class TestLogScaleHitting:
    def test_up_and_down_kinds(self):
        p_up = hit_prob_lamperti(Kind.UP, 1.5, -0.7, 0.7)
        p_down = hit_prob_lamperti(Kind.DOWN, 1.5, -0.7, 0.7)
        assert 0.0 <= p_up <= 1.0 and 0.0 <= p_down <= 1.0
        # conditioning to hit 0 favors the lower target
        assert p_down > p_up

    def test_tilt_relationship(self):
        # The two kinds differ by one power of the lower target position.
        v, u = -0.7, 0.7
        p_up = hit_prob_lamperti(Kind.UP, 1.5, v, u)
        p_down = hit_prob_lamperti(Kind.DOWN, 1.5, v, u)
        assert p_up == pytest.approx(p_down * math.exp(v), rel=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            hit_prob_lamperti(Kind.STAR, 1.5, -0.5, 0.5)
        with pytest.raises(DomainError):
            hit_prob_lamperti(Kind.UP, 1.5, 0.5, 1.0)


class TestValidation:
    def test_query_invariants(self):
        with pytest.raises(DomainError):
            HitQuery(0.9, 1.0, 0.5, 2.0)
        with pytest.raises(DomainError):
            HitQuery(1.5, -1.0, 0.5, 2.0)
        with pytest.raises(DomainError):
            HitQuery(1.5, 1.0, 1.0 + 1e-12, 2.0)
