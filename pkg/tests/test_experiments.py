from __future__ import annotations

import math

import numpy as np
import pytest

from modnls import (
    BOUNDED,
    ExperimentError,
    Field,
    check_admissible_pair,
    compute_scaling,
    make_grid,
    make_symbol,
    ode_phase_profile,
    run_norm_inflation,
    run_ode_approx,
    run_strichartz_probe,
    sobolev_norm,
    strichartz_probe_data,
)


@pytest.fixture
def bounded_plan():
    return compute_scaling(1, 2.0, 0.25, BOUNDED, theta=0.05, delta=0.1)


@pytest.fixture
def grid():
    return make_grid(1, 256, 8.0)


class TestPhaseProfile:
    def test_initial_value_is_scaled_bump(self, grid):
        phi = ode_phase_profile(0.0, grid, kappa=0.9, lam=1.0, sigma=2.0, eps=0.1)
        a0 = np.exp(-grid.x[0] ** 2)
        assert np.abs(phi.values - 0.9 * a0).max() <= 1e-15

    def test_modulus_independent_of_tau(self, grid):
        base = np.abs(ode_phase_profile(0.0, grid, 0.8, 1.0, 1.5, 0.2).values)
        for tau in (0.05, 0.11, 0.47):
            mod = np.abs(ode_phase_profile(tau, grid, 0.8, 1.0, 1.5, 0.2).values)
            assert np.abs(mod - base).max() <= 1e-14

    def test_hr_growth_envelope(self, grid):
        # |phi(tau)|_{H^r} <= C*(kappa^(1+2*sigma*r)*(tau/eps)^r + kappa),
        # with C fitted once at the coarsest eps and reused for finer ones
        sigma, lam, r = 2.0, 1.0, 1
        plan = compute_scaling(1, sigma, 0.25, BOUNDED, theta=0.05, delta=0.1)

        def envelope_ratio(eps):
            h = plan.h_for_eps(eps)
            kappa = plan.kappa(h)
            worst = 0.0
            for tau in np.linspace(0.0, plan.tau_star_of_eps(eps), 12):
                phi = ode_phase_profile(tau, grid, kappa, lam, sigma, eps)
                bound = kappa ** (1 + 2 * sigma * r) * (tau / eps) ** r + kappa
                worst = max(worst, sobolev_norm(phi, r) / bound)
            return worst

        C = envelope_ratio(0.1)
        for eps in (0.05, 0.02, 0.01):
            assert envelope_ratio(eps) <= 1.05 * C


class TestRunOdeApprox:
    def test_zero_symbol_and_zero_lambda_gives_zero_error(self, bounded_plan, grid):
        rep = run_ode_approx(bounded_plan, make_symbol("constant", c=0.0), grid,
                             [0.1, 0.05], r=1, lam=0.0)
        assert all(row["E"] <= 1e-12 for row in rep.rows)

    def test_disabled_dispersion_error_below_quadrature_floor(self, bounded_plan, grid):
        # with the multiplier identically zero the split flow is the phase ODE
        rep = run_ode_approx(bounded_plan, make_symbol("constant", c=0.0), grid,
                             [0.1, 0.05], r=1, lam=1.0)
        assert all(row["E"] <= 1e-10 for row in rep.rows)

    def test_constant_symbol_matches_analytic_gap(self, bounded_plan, grid):
        # for P = c the two flows commute: psi = phi * exp(i*c*tau/eps)
        c, lam, eps = 0.35, 1.0, 0.1
        sym = make_symbol("constant", c=c)
        rep = run_ode_approx(bounded_plan, sym, grid, [eps], r=1, lam=lam)
        h = bounded_plan.h_for_eps(eps)
        kappa = bounded_plan.kappa(h)
        amp = bounded_plan.window_amplitude(h)
        tau_star = bounded_plan.tau_star_of_eps(eps)
        n_steps = rep.rows[0]["n_steps"]
        analytic = 0.0
        for k in range(n_steps + 1):
            tau = tau_star * k / n_steps if k < n_steps else tau_star
            phi = ode_phase_profile(tau, grid, kappa, lam, bounded_plan.sigma, eps)
            gap = Field(grid, phi.values * (np.exp(1j * amp * c * tau / eps) - 1.0))
            analytic = max(analytic, sobolev_norm(gap, 1))
        assert rep.rows[0]["E"] == pytest.approx(analytic, abs=1e-8)

    def test_acceptance_shape_bounded(self, bounded_plan, grid):
        rep = run_ode_approx(bounded_plan, make_symbol("arctan_step", h=1.0), grid,
                             [1e-1, 3e-2, 1e-2], r=1)
        errors = [row["E"] for row in rep.rows]
        assert all(b < a for a, b in zip(errors, errors[1:]))
        assert rep.verdict and rep.fitted["error_ratio"] < 0.5

    def test_rejects_bad_regularity(self, bounded_plan, grid):
        sym = make_symbol("arctan_step", h=1.0)
        with pytest.raises(ExperimentError, match="integer above d/2"):
            run_ode_approx(bounded_plan, sym, grid, [0.1], r=0)
        plan_frac = compute_scaling(1, 1.4, 0.25, BOUNDED)
        with pytest.raises(ExperimentError, match="2\\*sigma"):
            run_ode_approx(plan_frac, sym, grid, [0.1], r=3)

    def test_rejects_non_decreasing_eps(self, bounded_plan, grid):
        with pytest.raises(ExperimentError, match="decreasing"):
            run_ode_approx(bounded_plan, make_symbol("arctan_step", h=1.0), grid,
                           [0.01, 0.1], r=1)


class TestRunNormInflation:
    def test_lambda_zero_control_fails_with_unit_ratios(self, bounded_plan, grid):
        hs = [math.exp(-2), math.exp(-3)]
        rep = run_norm_inflation(bounded_plan, make_symbol("arctan_step", h=1.0),
                                 grid, hs, lam=0.0)
        for row in rep.rows:
            assert row["ratio"] == pytest.approx(1.0, abs=1e-10)
        assert not rep.verdict

    def test_initial_norms_decrease(self, bounded_plan, grid):
        hs = [math.exp(-2), math.exp(-3), math.exp(-4)]
        rep = run_norm_inflation(bounded_plan, make_symbol("arctan_step", h=1.0),
                                 grid, hs, lam=1.0)
        u0 = [row["u0_hs"] for row in rep.rows]
        assert all(b < a for a, b in zip(u0, u0[1:]))
        assert rep.fitted["initial_norms_decreasing"] == 1.0

    def test_norm_reconstruction_matches_scaling_identity(self, bounded_plan, grid):
        # |u0_h|_{Hdot^s'} = h^(s-s') |psi0|_{Hdot^s'} is exact at tau = 0
        h = math.exp(-2)
        rep = run_norm_inflation(bounded_plan, make_symbol("arctan_step", h=1.0),
                                 grid, [h, math.exp(-3)], lam=1.0)
        kappa = bounded_plan.kappa(h)
        a0 = Field(grid, kappa * np.exp(-grid.x[0] ** 2))
        expected = math.hypot(
            h**bounded_plan.s * sobolev_norm(a0, 0.0),
            sobolev_norm(a0, bounded_plan.s, homogeneous=True),
        )
        assert rep.rows[0]["u0_hs"] == pytest.approx(expected, rel=1e-12)

    def test_long_window_demonstrates_inflation(self):
        # same family, much longer log window: the ratio growth clears 3x
        plan = compute_scaling(1, 2.0, 0.25, BOUNDED, theta=0.05, delta=8.0)
        grid = make_grid(1, 4096, 8.0)
        hs = [math.exp(-2), math.exp(-3), math.exp(-4)]
        rep = run_norm_inflation(plan, make_symbol("arctan_step", h=1.0), grid, hs)
        assert rep.fitted["ratio_growth"] >= 3.0
        assert rep.verdict

    def test_grid_policy_callable(self, bounded_plan):
        policy_calls = []

        def policy(h):
            policy_calls.append(h)
            return make_grid(1, 256, 8.0)

        hs = [math.exp(-2), math.exp(-3)]
        run_norm_inflation(bounded_plan, make_symbol("arctan_step", h=1.0), policy, hs)
        assert policy_calls == hs

    def test_rejects_h_above_cap(self, bounded_plan, grid):
        with pytest.raises(Exception, match="e\\^-1"):
            run_norm_inflation(bounded_plan, make_symbol("arctan_step", h=1.0),
                               grid, [0.5, 0.1])


class TestStrichartzProbe:
    def test_admissibility_checks(self):
        check_admissible_pair(8.0, 4.0, 1)
        check_admissible_pair(4.0, np.inf, 1)
        check_admissible_pair(4.0, 4.0, 2)
        with pytest.raises(ExperimentError, match="admissible"):
            check_admissible_pair(8.0, 5.0, 1)
        with pytest.raises(ExperimentError, match="p, q >= 2"):
            check_admissible_pair(1.5, 4.0, 1)
        with pytest.raises(ExperimentError, match="excluded"):
            check_admissible_pair(2.0, np.inf, 1)

    def test_probe_data_hk_norm_scales_like_Nk(self):
        norms = {}
        for N in (8.0, 16.0):
            grid = make_grid(1, 2048, 4.0)
            f = strichartz_probe_data(grid, N)
            norms[N] = sobolev_norm(f, 0.5)
        measured = math.log(norms[16.0] / norms[8.0]) / math.log(2.0)
        assert measured == pytest.approx(0.5, abs=0.05)

    def test_zero_symbol_slope_is_pure_scaling(self):
        rep = run_strichartz_probe(
            make_symbol("constant", c=0.0), 8.0, 4.0, [0.25], [8, 16, 32],
            include_contrast=False, time_samples=33,
        )
        assert rep.fitted["khat"] == pytest.approx(0.25, abs=0.02)
        assert rep.verdict  # 0.25 >= 0.25 - 0.1

    def test_time_constant_norms_for_zero_symbol(self):
        rep = run_strichartz_probe(
            make_symbol("constant", c=0.0), 8.0, 4.0, [0.0], [8, 16],
            include_contrast=False, time_samples=17,
        )
        for row in rep.rows:
            grid_n = row["grid_n"]
            assert grid_n >= 512

    def test_contrast_rows_tagged_by_symbol(self):
        rep = run_strichartz_probe(
            make_symbol("arctan_step", h=1.0), 8.0, 4.0, [0.25], [8, 16],
            include_contrast=True, time_samples=257,
        )
        names = {row["symbol"] for row in rep.rows}
        assert names == {"arctan_step(h=1)", "laplacian"}
        assert "khat_contrast" in rep.fitted

    def test_resolution_ceiling_error(self):
        with pytest.raises(ExperimentError, match="ceiling"):
            run_strichartz_probe(
                make_symbol("constant", c=0.0), 8.0, 4.0, [0.0], [8, 64],
                include_contrast=False, n_ceiling=1024,
            )

    def test_sup_norm_pair_slope(self):
        rep = run_strichartz_probe(
            make_symbol("constant", c=0.0), 4.0, np.inf, [0.5], [8, 16],
            include_contrast=False, time_samples=17,
        )
        assert rep.fitted["khat"] == pytest.approx(0.5, abs=1e-12)

    def test_homogeneous_symbol_reports_na_claim(self):
        rep = run_strichartz_probe(
            make_symbol("laplacian"), 8.0, 4.0, [0.0], [8, 16],
            include_contrast=False, time_samples=257,
        )
        assert rep.fitted["claim_applies"] == 0.0
        assert rep.verdict
