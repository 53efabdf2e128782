"""Longitudinal pitch balance: trim condition, tail drag, equilibrium solver.

The vehicle is modeled as a body mass M at CG offset (x_B, y_B) and a tail
mass m = sigma*M at distance x_T behind the buoyancy center O, all lengths
normalized by the balloon diameter D.  Sign conventions (the hardware fixes
neither): theta > 0 is nose-up, beta > 0 is tail-up.  The moment residual is
positive for a net nose-up moment about O.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .errors import NoEquilibriumError, ValidationError

SOLVER_TOLERANCE = 1e-10     # |residual| at an accepted root
THETA_TOLERANCE_DEG = 1e-10  # bracket width at convergence
MAX_BISECTIONS = 200
SEARCH_LIMIT_DEG = 89.0      # roots are sought strictly inside (-89, +89)
_SCAN_STEP_DEG = 0.5


@dataclass(frozen=True)
class LongitudinalParams:
    """Normalized geometry and mass constants of the pitch model.

    x_b, y_b, x_t are physical lengths divided by the balloon diameter.
    Defaults are the flight vehicle's values; body_mass_kg and tail_width_m
    are configuration estimates (the stationary analysis does not use them).
    """

    x_b: float = 0.075           # longitudinal CG offset of body / D
    y_b: float = 0.2             # vertical CG offset of body / D
    x_t: float = 0.5             # tail CG distance behind center / D
    sigma: float = 0.05          # tail-to-body mass ratio m/M
    diameter_m: float = 0.914    # balloon diameter D
    body_mass_kg: float = 0.30   # body mass M (config estimate)
    tail_width_m: float = 0.15   # tail width w_T (config estimate)
    drag_coeff: float = 1.5      # flat-plate tail drag coefficient
    air_density: float = 1.225   # [kg/m^3]
    gravity: float = 9.81        # [m/s^2]

    def __post_init__(self):
        if min(self.x_t, self.diameter_m, self.body_mass_kg, self.tail_width_m,
               self.drag_coeff, self.air_density, self.gravity) <= 0:
            raise ValidationError("lengths, masses, and coefficients must be positive")
        if not 0.0 < self.sigma < 1.0:
            raise ValidationError(f"sigma must be in (0, 1), got {self.sigma}")


@dataclass(frozen=True)
class PitchSolution:
    """Equilibrium pitch angle with its residual and the bisection bracket."""

    theta_deg: float
    residual: float
    bracket: tuple[float, float]


def balance_offset(sigma: float, x_t: float) -> float:
    """Body CG offset x_B that trims the stationary vehicle level at beta=0.

    x_t = 0 is the degenerate tail-at-center-column limit (offset = sigma).
    """
    if sigma <= 0 or x_t < 0:
        raise ValidationError("sigma must be positive and x_t non-negative")
    return sigma * (1.0 + x_t)


def drag_force(v_mps: float, params: LongitudinalParams) -> float:
    """Flat-plate drag [N] on the full tail area A = w_T * 2*X_T at speed V."""
    if v_mps < 0:
        raise ValidationError(f"speed must be >= 0, got {v_mps}")
    area = params.tail_width_m * 2.0 * params.x_t * params.diameter_m
    return params.drag_coeff * area * params.air_density * v_mps ** 2 / 2.0


def moment_residual(theta_deg: float, beta_deg: float, v_mps: float,
                    params: LongitudinalParams) -> float:
    """Dimensionless pitch-moment residual about the buoyancy center.

    R = sigma*(cos(theta) + x_T*cos(beta - theta))
        + sin(beta) * F_D(V)/(M*g) * x_T
        - (x_B*cos(theta) + y_B*sin(theta))

    The drag term projects the flat-plate force by sin(beta), which both sets
    the moment sign (tail-up deflection pitches the nose up with speed) and
    scales the projected area; the flat-plate model is only a good
    approximation near |beta| = 90 deg.  At V = 0 this reduces to the
    stationary mass balance.
    """
    if not abs(theta_deg) < 90.0:
        raise ValidationError(f"|theta| must be < 90 deg, got {theta_deg}")
    th = math.radians(theta_deg)
    be = math.radians(beta_deg)
    mass_terms = params.sigma * (math.cos(th) + params.x_t * math.cos(be - th))
    drag_term = (math.sin(be) * drag_force(v_mps, params)
                 / (params.body_mass_kg * params.gravity) * params.x_t)
    restoring = params.x_b * math.cos(th) + params.y_b * math.sin(th)
    return mass_terms + drag_term - restoring


def equilibrium_pitch(beta_deg: float, v_mps: float,
                      params: LongitudinalParams) -> PitchSolution:
    """Bisection root of the moment residual in theta, inside (-89, +89) deg.

    The interval is first scanned for sign changes; if several exist, the
    bracket nearest theta = 0 is refined.  No sign change raises
    NoEquilibriumError -- the solver never extrapolates.
    """
    if abs(beta_deg) > 90.0:
        raise ValidationError(f"|beta| must be <= 90 deg, got {beta_deg}")

    def f(theta):
        return moment_residual(theta, beta_deg, v_mps, params)

    n = int(round(2 * SEARCH_LIMIT_DEG / _SCAN_STEP_DEG))
    grid = [-SEARCH_LIMIT_DEG + i * _SCAN_STEP_DEG for i in range(n + 1)]
    values = [f(th) for th in grid]

    brackets = []
    for i, (th, val) in enumerate(zip(grid, values)):
        if val == 0.0:
            return PitchSolution(theta_deg=th, residual=0.0, bracket=(th, th))
        if i and values[i - 1] * val < 0.0:
            brackets.append((grid[i - 1], th))
    if not brackets:
        raise NoEquilibriumError(
            f"no pitch equilibrium for beta={beta_deg:g} deg, V={v_mps:g} m/s "
            f"in (-{SEARCH_LIMIT_DEG:g}, {SEARCH_LIMIT_DEG:g}) deg")

    lo, hi = min(brackets, key=lambda b: abs(b[0] + b[1]) / 2.0)
    f_lo = f(lo)
    a, b = lo, hi
    mid, f_mid = a, f_lo
    for _ in range(MAX_BISECTIONS):
        mid = 0.5 * (a + b)
        f_mid = f(mid)
        # converge the bracket too: |residual| <= tol alone can stop 1e-8 deg
        # short of the root on this shallow residual
        if f_mid == 0.0 or (abs(f_mid) <= SOLVER_TOLERANCE
                            and b - a <= THETA_TOLERANCE_DEG):
            break
        if f_lo * f_mid < 0.0:
            b = mid
        else:
            a, f_lo = mid, f_mid
    return PitchSolution(theta_deg=mid, residual=f_mid, bracket=(lo, hi))


@dataclass(frozen=True)
class EquilibriumPoint:
    """One row of a pitch-equilibrium curve; theta is NaN when not converged."""

    beta_deg: float
    v_mps: float
    theta_deg: float
    converged: bool


def _solve_point(beta_deg: float, v_mps: float,
                 params: LongitudinalParams) -> EquilibriumPoint:
    try:
        sol = equilibrium_pitch(beta_deg, v_mps, params)
        return EquilibriumPoint(beta_deg, v_mps, sol.theta_deg, True)
    except NoEquilibriumError:
        return EquilibriumPoint(beta_deg, v_mps, math.nan, False)


def pitch_curve(betas_deg: Sequence[float], v_mps: float,
                params: LongitudinalParams) -> list[EquilibriumPoint]:
    """Equilibrium pitch over a sweep of tail angles at fixed speed.

    Rows with no equilibrium are flagged, never dropped.
    """
    return [_solve_point(b, v_mps, params) for b in betas_deg]


def speed_curve(beta_deg: float, speeds_mps: Sequence[float],
                params: LongitudinalParams) -> list[EquilibriumPoint]:
    """Equilibrium pitch over a sweep of forward speeds at fixed tail angle."""
    return [_solve_point(beta_deg, v, params) for v in speeds_mps]


def write_curve_csv(points: Sequence[EquilibriumPoint], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["beta_deg", "v_mps", "theta_deg", "converged"])
        for p in points:
            writer.writerow([f"{p.beta_deg:g}", f"{p.v_mps:g}",
                             f"{p.theta_deg:.6f}", str(p.converged).lower()])
