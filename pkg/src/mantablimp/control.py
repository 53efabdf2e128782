"""Pilot command mapping: throttle to flap settings, yaw to thrust
differential, pitch/yaw to tail deflection.

Speed control trades amplitude for frequency at low throttle (better reaction
time for precise positioning); yaw control idles the wing on the inside of
the turn and flaps the outer wing smaller and faster.  The numeric
coefficients are provisional tuning values, all overridable via
ControlConfig.
"""

from __future__ import annotations

from dataclasses import dataclass

from .dynamics import ActuatorState, TailMode, WingCommand
from .errors import ValidationError
from .wing import FlapSetting, MAX_FREQUENCY_HZ


def _clamp(x: float, lo: float, hi: float) -> float:
    return min(max(float(x), lo), hi)


@dataclass(frozen=True)
class PilotCommand:
    """Normalized pilot axes; values are clamped on construction."""

    throttle: float = 0.0        # [0, 1]
    yaw: float = 0.0             # [-1, 1], positive = turn right
    pitch: float = 0.0           # [-1, 1], positive = nose up
    tail_mode: TailMode = TailMode.RUDDER

    def __post_init__(self):
        object.__setattr__(self, "throttle", _clamp(self.throttle, 0.0, 1.0))
        object.__setattr__(self, "yaw", _clamp(self.yaw, -1.0, 1.0))
        object.__setattr__(self, "pitch", _clamp(self.pitch, -1.0, 1.0))


@dataclass(frozen=True)
class ControlConfig:
    base_amplitude_deg: float = 90.0     # full-throttle flap setting
    base_frequency_hz: float = 1.25
    amplitude_floor: float = 0.2         # fraction of base amplitude at low throttle
    frequency_boost: float = 0.4         # fractional frequency rise at zero throttle
    yaw_amplitude_scale: float = 0.6     # outer-wing amplitude in a turn
    yaw_frequency_scale: float = 1.5     # outer-wing frequency in a turn
    yaw_deadband: float = 0.1
    max_frequency_hz: float = MAX_FREQUENCY_HZ

    def __post_init__(self):
        if not 0.0 < self.base_amplitude_deg <= 90.0:
            raise ValidationError("base amplitude must be in (0, 90]")
        if not 0.0 < self.base_frequency_hz <= self.max_frequency_hz:
            raise ValidationError("base frequency must be in (0, max]")


DEFAULT_CONTROL = ControlConfig()


def map_speed(throttle: float, cfg: ControlConfig = DEFAULT_CONTROL) -> FlapSetting | None:
    """Throttle to flap setting; None means the wings idle.

    Full throttle is the optimal setting; lower throttle shrinks the amplitude
    (floored) while raising the frequency (capped).
    """
    t = _clamp(throttle, 0.0, 1.0)
    if t == 0.0:
        return None
    amplitude = cfg.base_amplitude_deg * max(t, cfg.amplitude_floor)
    frequency = min(cfg.base_frequency_hz * (1.0 + cfg.frequency_boost * (1.0 - t)),
                    cfg.max_frequency_hz)
    return FlapSetting(amplitude_deg=amplitude, frequency_hz=frequency)


def map_yaw(cmd: PilotCommand, base: FlapSetting | None,
            cfg: ControlConfig = DEFAULT_CONTROL) -> tuple[WingCommand, WingCommand]:
    """Thrust-differential wing commands (left, right) for a yaw input.

    Above the deadband the wing on the inside of the turn idles while the
    outer wing flaps at reduced amplitude and raised frequency.
    """
    if base is None:
        return WingCommand(), WingCommand()
    symmetric = WingCommand(setting=base, enabled=True)
    if abs(cmd.yaw) <= cfg.yaw_deadband:
        return symmetric, symmetric
    outer = WingCommand(setting=FlapSetting(
        amplitude_deg=base.amplitude_deg * cfg.yaw_amplitude_scale,
        frequency_hz=min(base.frequency_hz * cfg.yaw_frequency_scale,
                         cfg.max_frequency_hz)), enabled=True)
    idle = WingCommand()
    if cmd.yaw > 0:          # right turn: left (outer) wing flaps
        return outer, idle
    return idle, outer


def map_tail(cmd: PilotCommand) -> float:
    """Tail servo angle [deg] for the current mode.

    Rudder mode steers from the yaw axis; elevator mode takes the pitch axis
    (yaw is still available through thrust differential).
    """
    axis = cmd.yaw if cmd.tail_mode is TailMode.RUDDER else cmd.pitch
    return 90.0 * axis


def to_actuators(cmd: PilotCommand,
                 cfg: ControlConfig = DEFAULT_CONTROL) -> ActuatorState:
    """Compose the full actuator state for a pilot command."""
    left, right = map_yaw(cmd, map_speed(cmd.throttle, cfg), cfg)
    return ActuatorState(left=left, right=right, tail_deg=map_tail(cmd))
