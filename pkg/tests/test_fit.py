"""Fitting-pipeline tests: hinge scan, smooth refinement, and their
invariances.

Recovery tests generate their own data from the model (generator-recovery),
so every expected parameter is known exactly; equivariance tests transform a
fixed-seed noisy dataset and compare the two fits.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from kinkfit import (
    DataSet,
    FitConfig,
    PiecewiseFit,
    SyntheticSpec,
    TransitionParams,
    fit_piecewise,
    fit_smooth,
    generate_synthetic,
    init_smooth,
    piecewise_limit,
    residual_sse,
    value,
)
from kinkfit.errors import InsufficientData


def rel_diff(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


def hinge_data(params: TransitionParams, phis) -> DataSet:
    return DataSet.from_points((float(p), piecewise_limit(float(p), params)) for p in phis)


def smooth_data(params: TransitionParams, phis) -> DataSet:
    return DataSet.from_points((float(p), value(float(p), params)) for p in phis)


@pytest.fixture
def noisy_data(demo_params) -> DataSet:
    spec = SyntheticSpec(
        params=demo_params,
        n=120,
        phi_lo=0.57,
        phi_hi=0.63,
        noise_sigma=0.004,
        seed=7,
        sampling="random",
        model="smooth",
    )
    return generate_synthetic(spec)


class TestDataSet:
    def test_from_points_sorts_by_phi(self):
        d = DataSet.from_points([(0.3, 1.0), (0.1, 2.0), (0.2, 3.0)])
        assert d.points == ((0.1, 2.0), (0.2, 3.0), (0.3, 1.0))

    def test_ties_keep_input_order(self):
        d = DataSet.from_points([(0.2, 9.0), (0.1, 1.0), (0.2, 8.0)])
        assert d.points == ((0.1, 1.0), (0.2, 9.0), (0.2, 8.0))

    def test_rejects_non_finite(self):
        with pytest.raises(ValueError):
            DataSet.from_points([(0.1, math.nan)])

    def test_direct_construction_requires_sorted(self):
        with pytest.raises(ValueError):
            DataSet(((0.2, 1.0), (0.1, 2.0)))

    def test_empty_is_fine(self):
        d = DataSet.from_points([])
        assert len(d) == 0 and d.phi.size == 0


class TestFitPiecewise:
    def test_recovers_exact_hinge_data(self, demo_params):
        """20 samples of the sharp limit with a candidate midpoint landing
        exactly on the kink: the scan must find it with ~zero residual."""
        phis = 0.598 + (np.arange(20) - 9.5) * 0.0028  # spans [0.5714, 0.6246]
        pw = fit_piecewise(hinge_data(demo_params, phis))
        spacing = 0.0028
        assert abs(pw.phi_c - 0.598) <= spacing / 2
        assert rel_diff(pw.alpha, 10.7) < 1e-12
        assert rel_diff(pw.beta, 80.0) < 1e-12
        assert rel_diff(pw.f_c, 0.5) < 1e-12
        assert pw.sse <= 1e-20
        assert pw.candidate_count == 17  # midpoints with >= 2 distinct phi per side

    def test_linear_data_ties_break_to_smallest_breakpoint(self):
        grid = np.linspace(0.0, 1.0, 6)
        pw = fit_piecewise(DataSet.from_points((x, 2.0 * x + 1.0) for x in grid))
        assert pw.alpha == pytest.approx(2.0, rel=1e-12)
        assert pw.beta == pytest.approx(2.0, rel=1e-12)
        assert pw.sse <= 1e-20
        assert pw.candidate_count == 3
        # Every candidate fits equally well; the first (smallest) one wins.
        assert pw.phi_c == 0.5 * (grid[1] + grid[2])

    def test_three_points_insufficient(self):
        with pytest.raises(InsufficientData):
            fit_piecewise(DataSet.from_points([(0.0, 0.0), (0.5, 1.0), (1.0, 2.0)]))

    def test_duplicated_phi_does_not_count_as_support(self):
        points = [(0.0, 0.0), (0.0, 0.1), (1.0, 1.0), (1.0, 1.1), (2.0, 2.0)]
        with pytest.raises(InsufficientData):
            fit_piecewise(DataSet.from_points(points))

    def test_uniform_candidate_grid_option(self, demo_params):
        phis = np.linspace(0.57, 0.63, 41)
        data = hinge_data(demo_params, phis)
        pw = fit_piecewise(data, FitConfig(breakpoint_grid=200))
        assert pw.candidate_count <= 200
        # Grid resolution (0.06 / 201) bounds how close a candidate can get.
        assert abs(pw.phi_c - 0.598) <= 0.06 / 201 + 1e-12

    def test_noise_free_left_right_slopes_keep_orientation(self):
        """The hinge fit reports the left and right slopes as fitted, without
        reordering; a falling-then-rising profile keeps alpha > beta."""
        p = TransitionParams(2.0, 30.0, 40.0, 0.5, 1.0)
        phis = 0.5 + (np.arange(20) - 9.5) * 0.05  # midpoint candidate at the kink
        mirrored = DataSet.from_points(
            (float(x), piecewise_limit(float(1.0 - x), p)) for x in phis
        )
        pw = fit_piecewise(mirrored)
        assert pw.alpha == pytest.approx(-30.0, rel=1e-9)
        assert pw.beta == pytest.approx(-2.0, rel=1e-9)


class TestInitSmooth:
    def test_width_is_ten_percent_of_span(self, demo_params):
        phis = np.linspace(0.57, 0.63, 20)
        data = hinge_data(demo_params, phis)
        pw = PiecewiseFit(
            alpha=10.7, beta=80.0, phi_c=0.598, f_c=0.5, sse=0.0, candidate_count=1
        )
        init = init_smooth(pw, data)
        # 10 / (69.3 * 0.1 * 0.06)
        assert init.gamma == pytest.approx(10.0 / (69.3 * 0.1 * 0.06), rel=1e-12)
        assert init.gamma == pytest.approx(24.05, abs=0.01)
        assert (init.alpha, init.beta) == pytest.approx((pw.alpha, pw.beta), rel=1e-12)

    def test_equal_slopes_fall_back_to_unit_gamma(self):
        grid = np.linspace(0.0, 1.0, 8)
        data = DataSet.from_points((x, 2.0 * x + 1.0) for x in grid)
        pw = PiecewiseFit(
            alpha=2.0, beta=2.0, phi_c=0.5, f_c=2.0, sse=0.0, candidate_count=1
        )
        init = init_smooth(pw, data)
        assert init.gamma == 1.0

    def test_near_equal_fitted_slopes_stay_usable_downstream(self):
        """Fitted slopes on linear data differ only at rounding level, giving a
        huge initial gamma; the smooth fit clamps it and still converges."""
        grid = np.linspace(0.0, 1.0, 8)
        data = DataSet.from_points((x, 2.0 * x + 1.0) for x in grid)
        pw = fit_piecewise(data)
        init = init_smooth(pw, data)
        assert math.isfinite(init.gamma)
        result = fit_smooth(data, init)
        assert result.params.alpha == pytest.approx(2.0, abs=1e-8)
        assert result.params.beta == pytest.approx(2.0, abs=1e-8)
        assert result.sse <= 1e-20


class TestResidualSse:
    def test_empty_data_is_zero(self, demo_params):
        assert residual_sse(DataSet.from_points([]), demo_params) == 0.0

    def test_exact_data_is_zero_to_rounding(self, demo_params):
        data = smooth_data(demo_params, np.linspace(0.57, 0.63, 30))
        assert residual_sse(data, demo_params) <= 1e-20 * len(data)

    def test_unit_residual_at_anchor(self, demo_params):
        data = DataSet.from_points([(demo_params.phi_c, demo_params.f_c + 1.0)])
        assert residual_sse(data, demo_params) == 1.0


class TestFitSmooth:
    def test_recovers_noiseless_generator(self, demo_params):
        data = smooth_data(demo_params, np.linspace(0.57, 0.63, 50))
        pw = fit_piecewise(data)
        result = fit_smooth(data, init_smooth(pw, data))
        assert result.converged
        for name in ("alpha", "beta", "gamma", "phi_c", "f_c"):
            assert rel_diff(getattr(result.params, name), getattr(demo_params, name)) < 1e-6
        assert result.iterations <= FitConfig().max_iterations

    def test_sharp_data_reports_gamma_at_bound(self, demo_params):
        """Data from the sharp limit: gamma is unidentifiable above the
        sample spacing, so the fit must land on the cap and say so."""
        data = hinge_data(demo_params, np.linspace(0.57, 0.63, 50))
        result = fit_smooth(data, init_smooth(fit_piecewise(data), data))
        assert result.gamma_at_bound
        assert result.params.gamma == pytest.approx(FitConfig().gamma_max, rel=1e-9)
        assert rel_diff(result.params.alpha, 10.7) < 1e-3
        assert rel_diff(result.params.beta, 80.0) < 1e-3

    def test_smooth_data_does_not_hit_bound(self, demo_params):
        data = smooth_data(demo_params, np.linspace(0.57, 0.63, 50))
        result = fit_smooth(data, init_smooth(fit_piecewise(data), data))
        assert not result.gamma_at_bound

    def test_four_distinct_phi_insufficient(self, demo_params):
        points = [(p, value(p, demo_params)) for p in (0.57, 0.59, 0.61, 0.63)]
        points += [(0.59, 0.1), (0.61, 0.2)]  # duplicates add no support
        with pytest.raises(InsufficientData):
            fit_smooth(DataSet.from_points(points), demo_params)

    def test_final_sse_never_exceeds_initial(self, noisy_data, demo_params):
        init = init_smooth(fit_piecewise(noisy_data), noisy_data)
        result = fit_smooth(noisy_data, init)
        assert result.sse <= residual_sse(noisy_data, init)

    def test_refit_from_solution_is_stable(self, noisy_data):
        first = fit_smooth(noisy_data, init_smooth(fit_piecewise(noisy_data), noisy_data))
        again = fit_smooth(noisy_data, first.params)
        for name in ("alpha", "beta", "gamma", "phi_c", "f_c"):
            a = getattr(first.params, name)
            b = getattr(again.params, name)
            assert abs(a - b) <= 1e-8 * max(1.0, abs(a))
        assert again.sse <= first.sse

    def test_affine_equivariance(self, noisy_data):
        """f -> a f + b maps (alpha, beta, f_c) -> (a alpha, a beta,
        a f_c + b), scales gamma by 1/a and leaves phi_c unchanged."""
        a, b = 2.5, -1.2
        scaled = DataSet.from_points((p, a * f + b) for p, f in noisy_data)
        r0 = fit_smooth(noisy_data, init_smooth(fit_piecewise(noisy_data), noisy_data))
        r1 = fit_smooth(scaled, init_smooth(fit_piecewise(scaled), scaled))
        assert abs(r1.params.phi_c - r0.params.phi_c) <= 1e-8
        assert rel_diff(r1.params.alpha, a * r0.params.alpha) <= 1e-8
        assert rel_diff(r1.params.beta, a * r0.params.beta) <= 1e-8
        assert rel_diff(r1.params.f_c, a * r0.params.f_c + b) <= 1e-8
        assert rel_diff(r1.params.gamma, r0.params.gamma / a) <= 1e-8

    def test_shift_equivariance(self, noisy_data):
        c = 0.25
        shifted = DataSet.from_points((p + c, f) for p, f in noisy_data)
        r0 = fit_smooth(noisy_data, init_smooth(fit_piecewise(noisy_data), noisy_data))
        r2 = fit_smooth(shifted, init_smooth(fit_piecewise(shifted), shifted))
        assert abs(r2.params.phi_c - (r0.params.phi_c + c)) <= 1e-8
        for name in ("alpha", "beta", "gamma", "f_c"):
            assert rel_diff(getattr(r2.params, name), getattr(r0.params, name)) <= 1e-8

    def test_beats_the_capped_hinge_model(self, noisy_data):
        pw = fit_piecewise(noisy_data)
        result = fit_smooth(noisy_data, init_smooth(pw, noisy_data))
        capped = TransitionParams(
            pw.alpha, pw.beta, FitConfig().gamma_max, pw.phi_c, pw.f_c
        )
        assert result.sse <= residual_sse(noisy_data, capped) + 1e-12

    def test_standard_errors_present_and_positive(self, noisy_data):
        result = fit_smooth(noisy_data, init_smooth(fit_piecewise(noisy_data), noisy_data))
        assert result.std_errors is not None
        assert len(result.std_errors) == 5
        assert all(math.isfinite(e) and e > 0 for e in result.std_errors)

    def test_standard_errors_absent_without_spare_dof(self, demo_params):
        data = smooth_data(demo_params, np.linspace(0.57, 0.63, 5))
        result = fit_smooth(data, demo_params)
        assert result.std_errors is None

    def test_iteration_cap_reports_non_convergence(self, noisy_data):
        init = init_smooth(fit_piecewise(noisy_data), noisy_data)
        result = fit_smooth(noisy_data, init, FitConfig(max_iterations=1))
        assert result.iterations == 1
        assert not result.converged


class TestFitConfig:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"max_iterations": 0},
            {"step_tol": 0.0},
            {"lambda_up": 1.0},
            {"lambda_down": 1.0},
            {"gamma_max": 1.0},
            {"breakpoint_grid": 0},
        ],
    )
    def test_rejects_bad_values(self, kwargs):
        with pytest.raises(ValueError):
            FitConfig(**kwargs)
