"""Reduced rigid-body flight simulator: surge, heave, yaw, pitch (roll ignored).

Fixed-step semi-implicit Euler at the 50 Hz servo tick, so actuation and
physics share a clock.  Frame conventions: x/y horizontal world axes, z up;
heading psi in degrees, positive = right turn (x toward y); theta nose-up
positive.  Surge u is the forward speed in the horizontal plane along the
heading; heave w is world-vertical velocity.  Neutral buoyancy is assumed, so
the only vertical force is the pitch-tilted thrust component.

The pitch channel reuses the longitudinal moment residual, scaled back to
physical units by M*g*D; a positive residual is a nose-up moment.  In rudder
mode the tail swing shifts the CG slightly forward (x_B grows by
cg_shift_coeff*sin|beta|), which is what couples continuous turns into the
characteristic descending spiral.

Thrust bookkeeping: the dataset's mean thrust at a flap setting is the
vehicle-level propulsive figure the hull drag was calibrated against (17.3 gf
balances drag exactly at the measured 1.1 m/s top speed), so each of the two
wings contributes half of it.  A lone flapping wing therefore delivers half
the pair figure, which is what drives the yaw differential.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Sequence

import yaml

from .errors import IntegrationDivergedError, ValidationError
from .longitudinal import LongitudinalParams, drag_force, moment_residual
from .wing import FlapSetting, ThrustDataset, WingSpec, mean_thrust, thrust_waveform

DEFAULT_DT_S = 0.02
MAX_DT_S = 0.1
DEFAULT_HULL_CDA_M2 = 0.229      # calibrated: 17.3 gf balances drag at 1.1 m/s
DEFAULT_BATTERY_J = 7992.0       # 2s 300 mAh at 7.4 V nominal
FLAPPING_ENDURANCE_S = 2200.0


class TailMode(str, Enum):
    RUDDER = "rudder"
    ELEVATOR = "elevator"


@dataclass(frozen=True)
class VehicleParams:
    """Physical constants of the simulated vehicle.

    Rotational inertias and damping are placeholders (no measured data);
    cg_shift_coeff scales the forward CG shift during rudder swings.
    """

    balloon_diameter_m: float = 0.914
    lift_per_balloon_gf: float = 68.0
    wing_offset_m: float = 0.457         # wing root lateral arm (balloon radius)
    hull_cda_m2: float = DEFAULT_HULL_CDA_M2
    longitudinal: LongitudinalParams = field(default_factory=LongitudinalParams)
    pitch_inertia: float = 0.05          # [kg m^2] placeholder
    pitch_damping: float = 0.05          # [N m s/rad] placeholder
    yaw_inertia: float = 0.2             # [kg m^2] placeholder
    yaw_damping: float = 0.15            # [N m s/rad] placeholder
    tail_mode: TailMode = TailMode.RUDDER
    battery_j: float = DEFAULT_BATTERY_J
    electronics_power_w: float = DEFAULT_BATTERY_J / FLAPPING_ENDURANCE_S
    cg_shift_coeff: float = 0.02

    def __post_init__(self):
        if min(self.balloon_diameter_m, self.lift_per_balloon_gf,
               self.wing_offset_m, self.hull_cda_m2, self.pitch_inertia,
               self.pitch_damping, self.yaw_inertia, self.yaw_damping,
               self.battery_j, self.electronics_power_w) <= 0:
            raise ValidationError("all physical constants must be positive")

    @property
    def total_mass_kg(self) -> float:
        return self.longitudinal.body_mass_kg * (1.0 + self.longitudinal.sigma)


@dataclass(frozen=True)
class WingCommand:
    """One wing's flap setting; a disabled wing produces zero thrust."""

    setting: FlapSetting | None = None
    enabled: bool = False

    def __post_init__(self):
        if self.enabled and self.setting is None:
            raise ValidationError("enabled wing needs a flap setting")


@dataclass(frozen=True)
class ActuatorState:
    left: WingCommand = WingCommand()
    right: WingCommand = WingCommand()
    tail_deg: float = 0.0

    def __post_init__(self):
        if not -90.0 <= self.tail_deg <= 90.0:
            raise ValidationError(f"tail angle must be in [-90, 90], got {self.tail_deg}")

IDLE = ActuatorState()


@dataclass(frozen=True)
class SimState:
    """Value snapshot of the vehicle state; step() never mutates its input."""

    x_m: float = 0.0
    y_m: float = 0.0
    z_m: float = 0.0
    heading_deg: float = 0.0       # continuous (not wrapped)
    pitch_deg: float = 0.0
    surge_mps: float = 0.0
    heave_mps: float = 0.0
    yaw_rate_dps: float = 0.0
    pitch_rate_dps: float = 0.0
    left_phase: float = 0.0        # wing cycle fraction in [0, 1)
    right_phase: float = 0.0
    battery_j_remaining: float = DEFAULT_BATTERY_J
    t_s: float = 0.0


def initial_state(params: VehicleParams) -> SimState:
    return SimState(battery_j_remaining=params.battery_j)


def calibrate_hull_drag(max_thrust_gf: float, target_speed_mps: float,
                        rho: float = 1.225, gravity: float = 9.81) -> float:
    """Hull Cd*A [m^2] such that max thrust balances drag at the target speed."""
    if max_thrust_gf <= 0 or target_speed_mps <= 0 or rho <= 0:
        raise ValidationError("calibration inputs must be positive")
    thrust_n = max_thrust_gf * gravity / 1000.0
    return 2.0 * thrust_n / (rho * target_speed_mps ** 2)


def _wing_thrust_gf(cmd: WingCommand, phase: float, wing: WingSpec,
                    dataset: ThrustDataset, thrust_model: str) -> float:
    """One wing's thrust: half the pair-level dataset figure (see module doc)."""
    if not cmd.enabled:
        return 0.0
    if thrust_model == "mean":
        return 0.5 * mean_thrust(wing, cmd.setting, dataset)
    return 0.5 * thrust_waveform(wing, cmd.setting,
                                 phase / cmd.setting.frequency_hz, dataset)


def step(state: SimState, act: ActuatorState, params: VehicleParams,
         wing: WingSpec, dataset: ThrustDataset, dt: float = DEFAULT_DT_S,
         thrust_model: str = "waveform") -> SimState:
    """Advance one tick.  Deterministic: identical inputs give identical output.

    thrust_model "waveform" drives surge/yaw with the instantaneous per-wing
    waveform (flapping oscillation shows up in telemetry); "mean" holds each
    wing at its cycle-averaged thrust.
    """
    if not 0.0 < dt <= MAX_DT_S:
        raise ValidationError(f"dt must be in (0, {MAX_DT_S}], got {dt}")
    if thrust_model not in ("waveform", "mean"):
        raise ValidationError(f"unknown thrust model {thrust_model!r}")
    try:
        return _step_inner(state, act, params, wing, dataset, dt, thrust_model)
    except OverflowError as exc:
        # Python raises instead of returning inf on x**2 overflow
        raise IntegrationDivergedError(
            f"state overflowed at t={state.t_s + dt:.3f} s",
            t_s=state.t_s + dt) from exc


def _step_inner(state: SimState, act: ActuatorState, params: VehicleParams,
                wing: WingSpec, dataset: ThrustDataset, dt: float,
                thrust_model: str) -> SimState:
    lon = params.longitudinal
    g = lon.gravity
    m_tot = params.total_mass_kg
    rho = lon.air_density
    powered = state.battery_j_remaining > 0.0

    t_left_gf = _wing_thrust_gf(act.left, state.left_phase, wing, dataset,
                                thrust_model) if powered else 0.0
    t_right_gf = _wing_thrust_gf(act.right, state.right_phase, wing, dataset,
                                 thrust_model) if powered else 0.0
    t_left = t_left_gf * g / 1000.0    # [N]
    t_right = t_right_gf * g / 1000.0
    thrust = t_left + t_right

    th = math.radians(state.pitch_deg)
    u = state.surge_mps
    w = state.heave_mps
    beta = math.radians(act.tail_deg)

    # surge: thrust along the body axis, hull drag, elevator-mode tail drag
    hull_drag = 0.5 * rho * params.hull_cda_m2 * u * abs(u)
    tail_drag = 0.0
    if params.tail_mode is TailMode.ELEVATOR:
        tail_drag = abs(math.sin(beta)) * drag_force(abs(u), lon) * math.copysign(1.0, u)
    du = (thrust * math.cos(th) - hull_drag - tail_drag) / m_tot

    # heave: pitch-tilted thrust against vertical hull drag (neutral buoyancy)
    dw = (thrust * math.sin(th) - 0.5 * rho * params.hull_cda_m2 * w * abs(w)) / m_tot

    # yaw: thrust differential, rudder-mode tail moment, damping
    r_rad = math.radians(state.yaw_rate_dps)
    yaw_moment = (t_left - t_right) * params.wing_offset_m
    if params.tail_mode is TailMode.RUDDER:
        yaw_moment += (math.sin(beta) * 0.5 * rho * lon.drag_coeff
                       * (lon.tail_width_m * 2.0 * lon.x_t * lon.diameter_m)
                       * u * abs(u) * lon.x_t * lon.diameter_m)
    yaw_moment -= params.yaw_damping * r_rad
    dr = yaw_moment / params.yaw_inertia   # [rad/s^2]

    # pitch: longitudinal moment residual scaled to physical units
    if params.tail_mode is TailMode.ELEVATOR:
        beta_eff, lon_eff = act.tail_deg, lon
    else:
        beta_eff = 0.0
        lon_eff = replace(lon, x_b=lon.x_b + params.cg_shift_coeff * abs(math.sin(beta)))
    q_rad = math.radians(state.pitch_rate_dps)
    residual = moment_residual(state.pitch_deg, beta_eff, abs(u), lon_eff)
    pitch_moment = (lon.body_mass_kg * g * lon.diameter_m * residual
                    - params.pitch_damping * q_rad)
    dq = pitch_moment / params.pitch_inertia

    # semi-implicit: velocities first, then positions/angles from new velocities
    u_new = u + du * dt
    w_new = w + dw * dt
    r_new = state.yaw_rate_dps + math.degrees(dr) * dt
    q_new = state.pitch_rate_dps + math.degrees(dq) * dt
    psi_new = state.heading_deg + r_new * dt
    theta_new = state.pitch_deg + q_new * dt
    psi_rad = math.radians(psi_new)
    th_rad = math.radians(theta_new)
    x_new = state.x_m + u_new * math.cos(psi_rad) * dt
    y_new = state.y_m + u_new * math.sin(psi_rad) * dt
    z_new = state.z_m + (u_new * math.sin(th_rad) + w_new) * dt

    # drain runs while actuated (same for every flap setting); a dead battery
    # stops the servos, freezing thrust and phase
    flapping = powered and (act.left.enabled or act.right.enabled)
    battery = (max(0.0, state.battery_j_remaining - params.electronics_power_w * dt)
               if flapping else state.battery_j_remaining)
    left_phase = ((state.left_phase + act.left.setting.frequency_hz * dt) % 1.0
                  if act.left.enabled and powered else state.left_phase)
    right_phase = ((state.right_phase + act.right.setting.frequency_hz * dt) % 1.0
                   if act.right.enabled and powered else state.right_phase)

    new = SimState(x_m=x_new, y_m=y_new, z_m=z_new, heading_deg=psi_new,
                   pitch_deg=theta_new, surge_mps=u_new, heave_mps=w_new,
                   yaw_rate_dps=r_new, pitch_rate_dps=q_new,
                   left_phase=left_phase, right_phase=right_phase,
                   battery_j_remaining=battery, t_s=state.t_s + dt)
    scalars = (x_new, y_new, z_new, psi_new, theta_new, u_new, w_new,
               r_new, q_new)
    if not all(math.isfinite(v) for v in scalars):
        raise IntegrationDivergedError(
            f"non-finite state at t={new.t_s:.3f} s", t_s=new.t_s)
    if abs(theta_new) >= 90.0:
        raise IntegrationDivergedError(
            f"pitch left its valid domain (|theta| >= 90 deg) at t={new.t_s:.3f} s",
            t_s=new.t_s)
    return new


ScheduleEntry = tuple[float, ActuatorState]


def run_scenario(schedule: Sequence[ScheduleEntry], params: VehicleParams,
                 wing: WingSpec, dataset: ThrustDataset, duration_s: float,
                 dt: float = DEFAULT_DT_S, initial: SimState | None = None,
                 thrust_model: str = "waveform") -> list[SimState]:
    """Step through a timed actuator schedule; returns every tick including t=0.

    The active actuator state is the latest schedule entry with t_s <= t.
    Before the first entry the vehicle idles.
    """
    times = [t for t, _ in schedule]
    if times != sorted(times):
        raise ValidationError("schedule times must be non-decreasing")
    if duration_s <= 0:
        raise ValidationError("duration must be positive")

    state = initial if initial is not None else initial_state(params)
    trajectory = [state]
    n_steps = int(round(duration_s / dt))
    idx = 0
    active = IDLE
    for _ in range(n_steps):
        while idx < len(schedule) and schedule[idx][0] <= state.t_s + 1e-12:
            active = schedule[idx][1]
            idx += 1
        state = step(state, active, params, wing, dataset, dt, thrust_model)
        trajectory.append(state)
    return trajectory


# ---------------------------------------------------------------------------
# Scenario files: human-editable YAML with a timed actuator schedule.

@dataclass(frozen=True)
class Scenario:
    duration_s: float
    dt_s: float
    schedule: tuple[ScheduleEntry, ...]
    tail_mode: TailMode | None = None


def _entry_actuators(entry: dict) -> ActuatorState:
    def wing_cmd(side: str) -> WingCommand:
        enabled = bool(entry.get(f"{side}_enabled", False))
        if not enabled:
            return WingCommand()
        return WingCommand(setting=FlapSetting(
            amplitude_deg=float(entry[f"{side}_amplitude"]),
            frequency_hz=float(entry[f"{side}_freq"])), enabled=True)

    return ActuatorState(left=wing_cmd("left"), right=wing_cmd("right"),
                         tail_deg=float(entry.get("tail_deg", 0.0)))


def load_scenario(path: str | Path) -> Scenario:
    with open(path, encoding="utf-8") as fh:
        doc = yaml.safe_load(fh)
    if not isinstance(doc, dict):
        raise ValidationError(f"scenario file {path} is not a mapping")
    try:
        duration = float(doc["duration_s"])
        dt = float(doc.get("dt_s", DEFAULT_DT_S))
        entries = doc.get("schedule", [])
        schedule = tuple((float(e["t_s"]), _entry_actuators(e)) for e in entries)
    except KeyError as exc:
        raise ValidationError(f"scenario file {path} missing field {exc}") from exc
    tail_mode = TailMode(doc["tail_mode"]) if "tail_mode" in doc else None
    return Scenario(duration_s=duration, dt_s=dt, schedule=schedule,
                    tail_mode=tail_mode)


def write_trajectory_csv(states: Sequence[SimState], path: str | Path) -> None:
    import csv
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "x", "y", "z", "psi", "theta", "u", "w", "r", "q",
                         "battery_j"])
        for s in states:
            writer.writerow([f"{s.t_s:.3f}", f"{s.x_m:.6f}", f"{s.y_m:.6f}",
                             f"{s.z_m:.6f}", f"{s.heading_deg:.6f}",
                             f"{s.pitch_deg:.6f}", f"{s.surge_mps:.6f}",
                             f"{s.heave_mps:.6f}", f"{s.yaw_rate_dps:.6f}",
                             f"{s.pitch_rate_dps:.6f}",
                             f"{s.battery_j_remaining:.3f}"])
