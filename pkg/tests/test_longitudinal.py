import dataclasses
import math

import pytest

from mantablimp.errors import NoEquilibriumError, ValidationError
from mantablimp.longitudinal import (EquilibriumPoint, LongitudinalParams,
                                     balance_offset, drag_force,
                                     equilibrium_pitch, moment_residual,
                                     pitch_curve, speed_curve, write_curve_csv)

PAPER_PARAMS = LongitudinalParams()   # x_b=0.075, y_b=0.2, x_t=0.5, sigma=0.05

# closed forms for the stationary +-90 deg cases: tan(theta) = -1/7 and -1/9
THETA_TAIL_UP = math.degrees(math.atan(-1.0 / 7.0))     # -8.130102 deg
THETA_TAIL_DOWN = math.degrees(math.atan(-1.0 / 9.0))   # -6.340192 deg


def speed_for_drag_ratio(ratio, params):
    """Forward speed giving F_D/(M*g) = ratio."""
    area = params.tail_width_m * 2.0 * params.x_t * params.diameter_m
    return math.sqrt(2.0 * ratio * params.body_mass_kg * params.gravity
                     / (params.drag_coeff * area * params.air_density))


def scan_bracket(f, lo, hi, step):
    """Brute-force sign-change bracket of f on a uniform grid."""
    brackets = []
    prev_x, prev_v = lo, f(lo)
    x = lo + step
    while x <= hi + step / 2:
        v = f(x)
        if prev_v * v <= 0.0 and v != prev_v:
            brackets.append((prev_x, x))
        prev_x, prev_v = x, v
        x += step
    return brackets


class TestBalanceOffset:
    def test_vehicle_constants(self):
        got = balance_offset(0.05, 0.5)
        assert abs(got - 0.075) <= math.ulp(0.075)

    def test_tail_at_center_column(self):
        assert balance_offset(0.05, 0.0) == 0.05

    def test_direct_evaluation(self):
        got = balance_offset(0.10, 0.5)
        assert abs(got - 0.15) <= math.ulp(0.15)

    def test_preconditions(self):
        with pytest.raises(ValidationError):
            balance_offset(0.0, 0.5)
        with pytest.raises(ValidationError):
            balance_offset(0.05, -0.1)


class TestDragForce:
    def test_zero_speed(self):
        assert drag_force(0.0, PAPER_PARAMS) == 0.0

    def test_direct_evaluation(self):
        # A = 0.15 * 2 * 0.5 * 0.914 = 0.1371 m^2; F = 1.5*0.1371*1.225/2
        assert drag_force(1.0, PAPER_PARAMS) == pytest.approx(0.125960625)

    def test_quadratic_scaling(self):
        assert drag_force(2.0, PAPER_PARAMS) == pytest.approx(
            4.0 * drag_force(1.0, PAPER_PARAMS), rel=1e-12)

    def test_negative_speed_rejected(self):
        with pytest.raises(ValidationError):
            drag_force(-0.1, PAPER_PARAMS)


class TestMomentResidual:
    def test_trim_is_exact_zero(self):
        params = dataclasses.replace(PAPER_PARAMS,
                                     x_b=balance_offset(0.05, 0.5))
        assert moment_residual(0.0, 0.0, 0.0, params) == 0.0

    def test_stationary_closed_form_root(self):
        assert moment_residual(THETA_TAIL_UP, 90.0, 0.0, PAPER_PARAMS) == \
            pytest.approx(0.0, abs=1e-12)
        assert moment_residual(THETA_TAIL_DOWN, -90.0, 0.0, PAPER_PARAMS) == \
            pytest.approx(0.0, abs=1e-12)

    def test_drag_term_value(self):
        # F_D/(M*g) = 0.1 at beta=+90, theta=0:
        # R = sigma - x_b + 0.1*x_t = 0.05 - 0.075 + 0.05 = +0.025
        v = speed_for_drag_ratio(0.1, PAPER_PARAMS)
        assert moment_residual(0.0, 90.0, v, PAPER_PARAMS) == \
            pytest.approx(0.025, abs=1e-9)

    def test_stationary_residual_ignores_mass_and_drag_constants(self):
        modified = dataclasses.replace(PAPER_PARAMS, body_mass_kg=5.0,
                                       tail_width_m=0.9, drag_coeff=0.2,
                                       air_density=0.4)
        for theta, beta in [(-30.0, 45.0), (10.0, -90.0), (0.0, 90.0)]:
            assert moment_residual(theta, beta, 0.0, PAPER_PARAMS) == \
                moment_residual(theta, beta, 0.0, modified)

    def test_theta_domain(self):
        with pytest.raises(ValidationError):
            moment_residual(90.0, 0.0, 0.0, PAPER_PARAMS)


class TestEquilibriumPitch:
    def test_trim(self):
        sol = equilibrium_pitch(0.0, 0.0, PAPER_PARAMS)
        assert abs(sol.theta_deg) < 1e-8
        assert abs(sol.residual) <= 1e-10

    def test_stationary_both_tail_extremes(self):
        up = equilibrium_pitch(90.0, 0.0, PAPER_PARAMS)
        down = equilibrium_pitch(-90.0, 0.0, PAPER_PARAMS)
        assert up.theta_deg == pytest.approx(THETA_TAIL_UP, abs=1e-6)
        assert down.theta_deg == pytest.approx(THETA_TAIL_DOWN, abs=1e-6)

    def test_against_brute_force_scan(self):
        for beta in (90.0, -90.0):
            sol = equilibrium_pitch(beta, 0.0, PAPER_PARAMS)
            brackets = scan_bracket(
                lambda th: moment_residual(th, beta, 0.0, PAPER_PARAMS),
                -89.0, 89.0, 0.01)
            assert len(brackets) == 1
            lo, hi = brackets[0]
            assert abs(sol.theta_deg - (lo + hi) / 2) <= 0.05

    def test_moving_case_example(self):
        v = speed_for_drag_ratio(0.1, PAPER_PARAMS)
        sol = equilibrium_pitch(90.0, v, PAPER_PARAMS)
        assert sol.theta_deg == pytest.approx(8.3, abs=0.05)

    def test_root_verified_by_dense_scan(self):
        for beta, v in [(-90.0, 0.0), (-45.0, 0.5), (30.0, 1.0), (90.0, 2.0)]:
            sol = equilibrium_pitch(beta, v, PAPER_PARAMS)
            brackets = scan_bracket(
                lambda th: moment_residual(th, beta, v, PAPER_PARAMS),
                -89.0, 89.0, 0.1)
            assert any(lo - 1e-9 <= sol.theta_deg <= hi + 1e-9
                       for lo, hi in brackets)

    def test_nearest_zero_root_selected(self):
        # speed chosen so the drag term nearly cancels the residual amplitude,
        # creating two stationary points; the solver must take the one nearer 0
        v = speed_for_drag_ratio(0.3534 / 0.5, PAPER_PARAMS)
        f = lambda th: moment_residual(th, 90.0, v, PAPER_PARAMS)
        brackets = scan_bracket(f, -89.0, 89.0, 0.1)
        if len(brackets) >= 2:
            sol = equilibrium_pitch(90.0, v, PAPER_PARAMS)
            nearest = min(brackets, key=lambda b: abs(b[0] + b[1]) / 2)
            assert nearest[0] - 1e-9 <= sol.theta_deg <= nearest[1] + 1e-9

    def test_no_equilibrium_reported(self):
        lopsided = dataclasses.replace(PAPER_PARAMS, x_b=5.0, y_b=0.001)
        with pytest.raises(NoEquilibriumError):
            equilibrium_pitch(0.0, 0.0, lopsided)

    def test_beta_domain(self):
        with pytest.raises(ValidationError):
            equilibrium_pitch(120.0, 0.0, PAPER_PARAMS)

    def test_solution_bracket_contains_root(self):
        sol = equilibrium_pitch(60.0, 0.0, PAPER_PARAMS)
        lo, hi = sol.bracket
        assert lo <= sol.theta_deg <= hi
        assert abs(sol.theta_deg) < 89.0


class TestCurves:
    def test_stationary_curve_pitches_down_only(self):
        betas = list(range(-90, 91))
        points = pitch_curve(betas, 0.0, PAPER_PARAMS)
        assert all(p.converged for p in points)
        by_beta = {p.beta_deg: p.theta_deg for p in points}
        assert abs(by_beta[0]) < 1e-8
        assert all(theta < 0 for beta, theta in by_beta.items() if beta != 0)
        assert max(by_beta.values()) == by_beta[0]

    def test_speed_curve_tail_up_monotone_and_crosses_zero(self):
        speeds = [0.25 * k for k in range(11)]
        points = speed_curve(90.0, speeds, PAPER_PARAMS)
        thetas = [p.theta_deg for p in points]
        assert all(b > a for a, b in zip(thetas, thetas[1:]))
        assert thetas[0] < 0 < thetas[-1]

    def test_speed_curve_tail_down_digs_deeper(self):
        points = speed_curve(-90.0, [0.0, 0.5, 1.0, 1.5], PAPER_PARAMS)
        base = points[0].theta_deg
        assert all(p.theta_deg < base for p in points[1:])

    def test_speed_curve_consistent_with_stationary(self):
        stationary = pitch_curve([35.0], 0.0, PAPER_PARAMS)[0]
        moving = speed_curve(35.0, [0.0], PAPER_PARAMS)[0]
        assert stationary.theta_deg == moving.theta_deg

    def test_failed_rows_flagged_not_dropped(self):
        lopsided = dataclasses.replace(PAPER_PARAMS, x_b=5.0, y_b=0.001)
        points = pitch_curve([-45.0, 0.0, 45.0], 0.0, lopsided)
        assert len(points) == 3
        assert all(not p.converged and math.isnan(p.theta_deg) for p in points)

    def test_curve_csv(self, tmp_path):
        path = tmp_path / "curve.csv"
        write_curve_csv(pitch_curve([-90.0, 0.0, 90.0], 0.0, PAPER_PARAMS), path)
        lines = path.read_text().splitlines()
        assert lines[0] == "beta_deg,v_mps,theta_deg,converged"
        assert lines[2] == "0,0,0.000000,true"
        assert len(lines) == 4
