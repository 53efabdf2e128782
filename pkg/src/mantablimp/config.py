"""YAML configuration: every tuning default in one overridable document.

See config.example.yaml in the repository root for the full annotated schema.
Unknown keys are rejected so typos fail loudly.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .control import ControlConfig
from .dynamics import TailMode, VehicleParams
from .energy import (BATTERY_ENERGY_J, FLAPPING_ENDURANCE_S,
                     FLAPPING_MAX_SPEED_MPS, PROPELLER_ANCHORS,
                     PROPELLER_MAX_SPEED_MPS)
from .errors import ValidationError
from .longitudinal import LongitudinalParams
from .wing import DEFAULT_SERVO_RATE_DPS, DEFAULT_TICK_S


@dataclass(frozen=True)
class EnergyConfig:
    battery_j: float = BATTERY_ENERGY_J
    flapping_endurance_s: float = FLAPPING_ENDURANCE_S
    flapping_max_speed_mps: float = FLAPPING_MAX_SPEED_MPS
    propeller_max_speed_mps: float = PROPELLER_MAX_SPEED_MPS
    propeller_anchors: tuple[tuple[float, float], ...] = PROPELLER_ANCHORS


@dataclass(frozen=True)
class ServoConfig:
    rate_limit_dps: float = DEFAULT_SERVO_RATE_DPS
    tick_s: float = DEFAULT_TICK_S


@dataclass(frozen=True)
class AppConfig:
    vehicle: VehicleParams = field(default_factory=VehicleParams)
    control: ControlConfig = field(default_factory=ControlConfig)
    energy: EnergyConfig = field(default_factory=EnergyConfig)
    servo: ServoConfig = field(default_factory=ServoConfig)


def _build(cls, defaults, section: dict, name: str):
    if not isinstance(section, dict):
        raise ValidationError(f"config section '{name}' must be a mapping")
    fields = {f.name: f for f in dataclasses.fields(cls)}
    unknown = set(section) - set(fields)
    if unknown:
        raise ValidationError(f"unknown keys in config section '{name}': "
                              f"{sorted(unknown)}")
    return dataclasses.replace(defaults, **section)


def load_config(path: str | Path | None) -> AppConfig:
    """Load an AppConfig, layering the file (if any) over defaults."""
    if path is None:
        return AppConfig()
    with open(path, encoding="utf-8") as fh:
        doc = yaml.safe_load(fh) or {}
    if not isinstance(doc, dict):
        raise ValidationError(f"config file {path} is not a mapping")
    unknown = set(doc) - {"vehicle", "longitudinal", "control", "energy", "servo"}
    if unknown:
        raise ValidationError(f"unknown config sections: {sorted(unknown)}")

    lon = _build(LongitudinalParams, LongitudinalParams(),
                 doc.get("longitudinal", {}), "longitudinal")
    vehicle_section = dict(doc.get("vehicle", {}))
    if "tail_mode" in vehicle_section:
        vehicle_section["tail_mode"] = TailMode(vehicle_section["tail_mode"])
    vehicle = _build(VehicleParams,
                     VehicleParams(longitudinal=lon), vehicle_section, "vehicle")
    energy_section = dict(doc.get("energy", {}))
    if "propeller_anchors" in energy_section:
        energy_section["propeller_anchors"] = tuple(
            (float(v), float(e)) for v, e in energy_section["propeller_anchors"])
    return AppConfig(
        vehicle=vehicle,
        control=_build(ControlConfig, ControlConfig(), doc.get("control", {}),
                       "control"),
        energy=_build(EnergyConfig, EnergyConfig(), energy_section, "energy"),
        servo=_build(ServoConfig, ServoConfig(), doc.get("servo", {}), "servo"),
    )
