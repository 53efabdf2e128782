"""Endurance, speed, and range models for flapping vs. propeller propulsion.

The flapping vehicle drains its battery at a rate independent of flap
settings, so endurance is a speed-independent constant and range grows
linearly with speed.  The propeller reference is modeled with an electrical
power law P(V) = P0 + k*V^3 (idle draw plus aerodynamic cube) fitted through
two measured endurance anchors; endurance is then E(V) = C_batt / P(V).
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Sequence

from .errors import OutOfRangeError, ValidationError

BATTERY_ENERGY_J = 7992.0            # 2s 300 mAh pack at 7.4 V nominal
FLAPPING_ENDURANCE_S = 2200.0        # measured, speed-independent
FLAPPING_MAX_SPEED_MPS = 1.1         # top speed with the optimal wing
PROPELLER_MAX_SPEED_MPS = 2.4        # config default; not a measured value
PROPELLER_ANCHORS = ((0.6, 2400.0), (2.4, 162.0))   # (speed m/s, endurance s)


class PowerKind(str, Enum):
    FLAPPING = "flapping"
    PROPELLER = "propeller"


@dataclass(frozen=True)
class PowerModel:
    kind: PowerKind
    flapping_endurance_s: float = FLAPPING_ENDURANCE_S
    anchors: tuple[tuple[float, float], ...] = PROPELLER_ANCHORS
    max_speed_mps: float = FLAPPING_MAX_SPEED_MPS
    battery_j: float = BATTERY_ENERGY_J

    def __post_init__(self):
        if self.flapping_endurance_s <= 0 or self.battery_j <= 0:
            raise ValidationError("endurance and battery energy must be positive")
        speeds = [v for v, _ in self.anchors]
        if any(e <= 0 for _, e in self.anchors) or speeds != sorted(set(speeds)):
            raise ValidationError("anchor speeds must be strictly increasing "
                                  "with positive endurances")


def flapping_model(endurance_s: float = FLAPPING_ENDURANCE_S,
                   max_speed_mps: float = FLAPPING_MAX_SPEED_MPS,
                   battery_j: float = BATTERY_ENERGY_J) -> PowerModel:
    return PowerModel(kind=PowerKind.FLAPPING, flapping_endurance_s=endurance_s,
                      max_speed_mps=max_speed_mps, battery_j=battery_j)


def propeller_model(anchors=PROPELLER_ANCHORS,
                    max_speed_mps: float = PROPELLER_MAX_SPEED_MPS,
                    battery_j: float = BATTERY_ENERGY_J) -> PowerModel:
    return PowerModel(kind=PowerKind.PROPELLER, anchors=tuple(anchors),
                      max_speed_mps=max_speed_mps, battery_j=battery_j)


def propeller_power_fit(model: PowerModel) -> tuple[float, float]:
    """Solve (P0, k) of P(V) = P0 + k*V^3 through the model's two anchors."""
    if len(model.anchors) != 2:
        raise ValidationError("propeller fit needs exactly two anchor points")
    (v1, e1), (v2, e2) = model.anchors
    p1, p2 = model.battery_j / e1, model.battery_j / e2
    k = (p2 - p1) / (v2 ** 3 - v1 ** 3)
    p0 = p1 - k * v1 ** 3
    if p0 <= 0 or k <= 0:
        raise ValidationError(
            f"anchors give an unphysical power law (P0={p0:.3g}, k={k:.3g})")
    return p0, k


def endurance(model: PowerModel, speed_mps: float) -> float:
    """Operating time [s] at a steady speed until the battery is drained."""
    if not 0.0 < speed_mps <= model.max_speed_mps:
        raise OutOfRangeError(
            f"speed {speed_mps:g} m/s outside (0, {model.max_speed_mps:g}] "
            f"for the {model.kind.value} model")
    if model.kind is PowerKind.FLAPPING:
        return model.flapping_endurance_s
    p0, k = propeller_power_fit(model)
    return model.battery_j / (p0 + k * speed_mps ** 3)


def range_m(endurance_s: float, speed_mps: float) -> float:
    """Range = endurance x speed."""
    if endurance_s < 0 or speed_mps < 0:
        raise ValidationError("endurance and speed must be non-negative")
    return endurance_s * speed_mps


@dataclass(frozen=True)
class RangePoint:
    speed_mps: float
    endurance_s: float
    range_m: float
    model: PowerKind
    in_range: bool


def range_curve(model: PowerModel, speeds_mps: Sequence[float]) -> list[RangePoint]:
    """Endurance and range at each speed; out-of-domain rows flagged, not dropped."""
    points = []
    for v in speeds_mps:
        try:
            e = endurance(model, v)
            points.append(RangePoint(v, e, range_m(e, v), model.kind, True))
        except OutOfRangeError:
            points.append(RangePoint(v, math.nan, math.nan, model.kind, False))
    return points


def write_range_csv(points: Sequence[RangePoint], path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["speed_mps", "endurance_s", "range_m", "model"])
        for p in points:
            writer.writerow([f"{p.speed_mps:g}", f"{p.endurance_s:.3f}",
                             f"{p.range_m:.3f}", p.model.value])
