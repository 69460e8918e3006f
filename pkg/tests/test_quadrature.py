import math

import numpy as np
import pytest

from wedgekit.errors import EvaluationError, InvalidArgument
from wedgekit.quadrature import (
    ContourSpec,
    LadderSpec,
    cauchy_riemann_residual,
    ladder_limit,
    line_integral,
    make_contour,
    max_angular_gap,
    sphere_average,
    sphere_nodes,
)

SQRT_PI = math.sqrt(math.pi)


def gaussian_1d(z):
    return np.exp(-(z**2))


class TestLineIntegral:
    def test_gaussian_on_real_axis(self):
        res = line_integral(gaussian_1d, ContourSpec((0.0,), 8.0, 0.01))
        assert abs(res.value - SQRT_PI) < 1e-10
        assert res.error < 1e-9

    def test_contour_shift_invariance(self):
        low = line_integral(gaussian_1d, ContourSpec((0.0,), 8.0, 0.01))
        high = line_integral(gaussian_1d, ContourSpec((1.0,), 8.0, 0.01))
        assert abs(low.value - high.value) < 1e-10

    def test_product_gaussian_two_dim(self):
        res = line_integral(
            lambda pts: np.exp(-(pts**2).sum(axis=1)),
            ContourSpec((0.0, 0.0), 6.0, 0.05),
        )
        assert abs(res.value - math.pi) < 1e-8

    def test_halving_step_improves_error(self):
        coarse = line_integral(gaussian_1d, ContourSpec((0.0,), 8.0, 0.8))
        fine = line_integral(gaussian_1d, ContourSpec((0.0,), 8.0, 0.4))
        err_coarse = abs(coarse.value - SQRT_PI)
        err_fine = abs(fine.value - SQRT_PI)
        assert err_fine * 4.0 <= err_coarse or err_fine < 1e-13

    def test_non_finite_integrand_rejected(self):
        with pytest.raises(EvaluationError):
            line_integral(lambda z: 1.0 / (z - 1.005), ContourSpec((0.0,), 2.0, 0.01))

    def test_step_must_divide_truncation(self):
        with pytest.raises(InvalidArgument):
            ContourSpec((0.0,), 1.0, 0.3)
        with pytest.raises(InvalidArgument):
            ContourSpec((0.0,), 1.0, -0.1)

    def test_make_contour_rounds_up(self):
        spec = make_contour(0.5, 11.994, 0.01)
        assert spec.truncation >= 11.994
        assert spec.heights == (0.5,)


class TestSphere:
    def test_constant_surface_measures(self):
        for n, target in ((1, 2.0), (2, 2.0 * math.pi), (3, 4.0 * math.pi)):
            val = sphere_average(lambda om: np.ones(om.shape[0]), n)
            assert abs(val - target) < 1e-9

    def test_two_point_sum_convention(self):
        val = sphere_average(lambda om: 3.0 + om[:, 0], 1)
        assert abs(val - 6.0) < 1e-12  # (3+1) + (3-1), a sum not a mean

    def test_axis_second_moment_three_dim(self):
        # brute-force oracle on a dense independent product grid
        nu, nphi = 400, 400
        u = -1.0 + (np.arange(nu) + 0.5) * (2.0 / nu)
        w_u = 2.0 / nu
        oracle = (u**2).sum() * w_u * (2.0 * math.pi)
        val = sphere_average(lambda om: om[:, 0] ** 2, 3)
        assert abs(oracle - 4.0 * math.pi / 3.0) < 1e-3
        assert abs(val - 4.0 * math.pi / 3.0) < 1e-10

    def test_unsupported_dimension(self):
        with pytest.raises(InvalidArgument):
            sphere_nodes(4)

    def test_angular_gap(self):
        assert max_angular_gap(1) == 0.0
        assert abs(max_angular_gap(2, 256) - 2.0 * math.pi / 256) < 1e-15
        assert max_angular_gap(3) > 0.0


class TestLadder:
    def test_linear_model_is_exact_after_one_step(self):
        ladder = LadderSpec(start=0.5, ratio=0.5, rungs=6, order=1)
        vals = [7.0 + 3.0 * t for t in ladder.values()]
        res = ladder_limit(vals, ladder)
        assert abs(res.limit - 7.0) < 1e-12
        assert not res.diverging

    def test_heat_pairing_of_two_gaussians(self):
        # closed form: pairing of the probe with exp(-x^2) is 1/sqrt(1+4t)
        ladder = LadderSpec(start=0.5, ratio=0.5, rungs=10, order=3)
        vals = [1.0 / math.sqrt(1.0 + 4.0 * t) for t in ladder.values()]
        res = ladder_limit(vals, ladder)
        assert abs(res.limit - 1.0) < 1e-6

    def test_divergent_ladder_is_reported(self):
        ladder = LadderSpec(start=0.5, ratio=0.5, rungs=6, order=1)
        vals = [math.exp(1.0 / t) for t in ladder.values()]
        res = ladder_limit(vals, ladder)
        assert res.diverging
        assert res.confidence == math.inf

    def test_needs_three_rungs(self):
        with pytest.raises(InvalidArgument):
            ladder_limit([1.0, 0.9], LadderSpec(rungs=2, order=1))

    def test_spec_validation(self):
        with pytest.raises(InvalidArgument):
            LadderSpec(start=-1.0)
        with pytest.raises(InvalidArgument):
            LadderSpec(ratio=1.5)


def test_cauchy_riemann_residual_flags_non_holomorphy():
    assert cauchy_riemann_residual(lambda z: z**3, 0.3 + 0.2j) < 1e-7
    assert cauchy_riemann_residual(lambda z: np.conj(z), 0.3 + 0.2j) > 1.0
