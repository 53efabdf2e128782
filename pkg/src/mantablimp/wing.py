"""Parametric wing model: flap profiles, thrust-dataset lookup, optimal settings.

Conventions: wing position is the angle of the leading edge with respect to the
ground plane, +90 deg at the highest point.  One flap cycle runs position
A*sin(2*pi*f*t), so the downstroke ends at cycle fraction 0.75 and the
upstroke at 0.25.
"""

from __future__ import annotations

import bisect
import csv
import math
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import FamilyNotFoundError, OutOfRangeError, ValidationError

MAX_AMPLITUDE_DEG = 90.0
MAX_FREQUENCY_HZ = 2.0       # servo cannot complete high-amplitude strokes faster
DEFAULT_TICK_S = 0.02        # 50 Hz servo position update
DEFAULT_SERVO_RATE_DPS = 600.0  # 9 g-class servo slew limit, configurable

PROVENANCE_MEASURED = "measured"
PROVENANCE_SYNTHETIC = "synthetic"

# Thrust waveform shape (cycle fractions).  The forward pulse peaks just after
# the downstroke completes (0.75); a shallow negative trough follows the
# upstroke (0.25).  Pulse widths/depth are shape constants; the amplitude is
# normalized so the cycle average equals the dataset mean exactly.
_DOWN_PULSE_CENTER = 0.80
_DOWN_PULSE_WIDTH = 0.55
_UP_PULSE_CENTER = 0.30
_UP_PULSE_WIDTH = 0.30
_TROUGH_RATIO = 0.35
_MEAN_FACTOR = 0.5 * (_DOWN_PULSE_WIDTH - _TROUGH_RATIO * _UP_PULSE_WIDTH)


class Stiffness(str, Enum):
    FLEXIBLE = "flexible"
    STIFF = "stiff"


class TrailingEdge(str, Enum):
    STRAIGHT = "straight"
    CONCAVE = "concave"


@dataclass(frozen=True)
class WingSpec:
    """One physical wing: size, sweep back, leading-edge stiffness, trailing edge."""

    width_m: float
    length_m: float
    gamma: float                 # sweep-back ratio, 0 = straight leading edge
    stiffness: Stiffness
    trailing_edge: TrailingEdge

    def __post_init__(self):
        if self.width_m <= 0 or self.length_m <= 0:
            raise ValidationError(f"wing dimensions must be positive, got "
                                  f"W={self.width_m} L={self.length_m}")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValidationError(f"gamma must be in [0, 1], got {self.gamma}")

    @property
    def aspect_ratio(self) -> float:
        """Width over length; always derived, never stored."""
        return self.width_m / self.length_m


@dataclass(frozen=True)
class FlapSetting:
    """Commanded flap amplitude and frequency."""

    amplitude_deg: float
    frequency_hz: float

    def __post_init__(self):
        if not 0.0 < self.amplitude_deg <= MAX_AMPLITUDE_DEG:
            raise ValidationError(
                f"amplitude must be in (0, {MAX_AMPLITUDE_DEG}] deg, got {self.amplitude_deg}")
        if not 0.0 < self.frequency_hz <= MAX_FREQUENCY_HZ:
            raise ValidationError(
                f"frequency must be in (0, {MAX_FREQUENCY_HZ}] Hz, got {self.frequency_hz}")


def peak_command_speed_dps(setting: FlapSetting) -> float:
    """Peak angular speed of the ideal sinusoid, A*2*pi*f [deg/s]."""
    return setting.amplitude_deg * 2.0 * math.pi * setting.frequency_hz


@dataclass(frozen=True, eq=False)
class FlapProfile:
    """Discretized servo position trajectory for one flap command."""

    setting: FlapSetting
    phase_deg: float
    tick_s: float
    positions_deg: np.ndarray    # commanded positions after rate limiting
    achievable: bool             # True iff no rate clamping occurred

    @property
    def period_ticks(self) -> int:
        return round(1.0 / (self.setting.frequency_hz * self.tick_s))


def generate_profile(setting: FlapSetting, phase_deg: float = 0.0,
                     n_ticks: int = 200,
                     servo_rate_limit_dps: float = DEFAULT_SERVO_RATE_DPS,
                     tick_s: float = DEFAULT_TICK_S) -> FlapProfile:
    """Sampled sinusoidal position profile with a servo slew-rate limit.

    The commanded position at tick k is A*sin(2*pi*f*k*tick_s + phase).
    The servo only accepts position targets, so speed is shaped by varying the
    per-tick increment; increments beyond servo_rate_limit_dps*tick_s are
    clamped, emulating servo lag.  Over-speed profiles are clamped rather than
    rejected; `achievable` reports whether clamping happened.
    """
    if n_ticks < 1:
        raise ValidationError(f"n_ticks must be >= 1, got {n_ticks}")
    if servo_rate_limit_dps <= 0:
        raise ValidationError(f"servo rate limit must be > 0, got {servo_rate_limit_dps}")
    if tick_s <= 0:
        raise ValidationError(f"tick_s must be > 0, got {tick_s}")

    k = np.arange(n_ticks)
    raw = setting.amplitude_deg * np.sin(
        2.0 * math.pi * setting.frequency_hz * k * tick_s + math.radians(phase_deg))

    max_step = servo_rate_limit_dps * tick_s
    positions = np.empty_like(raw)
    positions[0] = raw[0]
    clamped = False
    for i in range(1, n_ticks):
        delta = raw[i] - positions[i - 1]
        if abs(delta) > max_step:
            delta = math.copysign(max_step, delta)
            clamped = True
        positions[i] = positions[i - 1] + delta
    return FlapProfile(setting=setting, phase_deg=phase_deg, tick_s=tick_s,
                       positions_deg=positions, achievable=not clamped)


@dataclass(frozen=True)
class ThrustRow:
    """One cycle-averaged thrust measurement (or fixture) for a wing/setting pair."""

    stiffness: Stiffness
    trailing_edge: TrailingEdge
    gamma: float
    width_m: float
    length_m: float
    amplitude_deg: float         # 0 allowed here (no-motion anchor rows)
    frequency_hz: float
    mean_thrust_gf: float
    provenance: str              # PROVENANCE_MEASURED or PROVENANCE_SYNTHETIC

    def __post_init__(self):
        if not math.isfinite(self.mean_thrust_gf):
            raise ValidationError("mean_thrust_gf must be finite")
        if self.amplitude_deg < 0 or self.amplitude_deg > MAX_AMPLITUDE_DEG:
            raise ValidationError(f"row amplitude out of range: {self.amplitude_deg}")
        if not 0.0 < self.frequency_hz <= MAX_FREQUENCY_HZ:
            raise ValidationError(f"row frequency out of range: {self.frequency_hz}")

    @property
    def aspect_ratio(self) -> float:
        return self.width_m / self.length_m


def _family_key(stiffness, trailing_edge, gamma, width_m, length_m):
    return (stiffness, trailing_edge, round(gamma, 9), round(width_m, 9),
            round(length_m, 9))


def wing_key(wing: WingSpec):
    return _family_key(wing.stiffness, wing.trailing_edge, wing.gamma,
                       wing.width_m, wing.length_m)


DATASET_CSV_HEADER = ["stiffness", "ar", "gamma", "trailing_edge", "width_cm",
                      "length_cm", "amplitude_deg", "frequency_hz",
                      "mean_thrust_gf", "provenance"]


class ThrustDataset:
    """Immutable collection of thrust rows, indexed by wing family.

    A family is one physical wing (stiffness, trailing edge, gamma, W, L);
    within a family the rows form an amplitude x frequency grid.
    """

    def __init__(self, rows: Iterable[ThrustRow]):
        self.rows: tuple[ThrustRow, ...] = tuple(rows)
        self._families: dict[tuple, dict[tuple[float, float], ThrustRow]] = {}
        for row in self.rows:
            fam = self._families.setdefault(
                _family_key(row.stiffness, row.trailing_edge, row.gamma,
                            row.width_m, row.length_m), {})
            cell = (row.amplitude_deg, row.frequency_hz)
            if cell in fam:
                raise ValidationError(
                    f"duplicate dataset key: {row.stiffness.value}/{row.trailing_edge.value} "
                    f"gamma={row.gamma} W={row.width_m} at A={cell[0]} f={cell[1]}")
            fam[cell] = row

    def __len__(self) -> int:
        return len(self.rows)

    def families(self) -> list[tuple]:
        return list(self._families)

    def rows_for(self, wing: WingSpec) -> list[ThrustRow]:
        fam = self._families.get(wing_key(wing))
        if fam is None:
            raise FamilyNotFoundError(
                f"no dataset rows for {wing.stiffness.value} AR={wing.aspect_ratio:.3f} "
                f"gamma={wing.gamma} {wing.trailing_edge.value}")
        return list(fam.values())

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(DATASET_CSV_HEADER)
            for r in self.rows:
                writer.writerow([
                    r.stiffness.value,
                    f"{r.aspect_ratio:.4f}",
                    f"{r.gamma:g}",
                    r.trailing_edge.value,
                    f"{r.width_m * 100.0:g}",
                    f"{r.length_m * 100.0:g}",
                    f"{r.amplitude_deg:g}",
                    f"{r.frequency_hz:g}",
                    f"{r.mean_thrust_gf:g}",
                    r.provenance,
                ])

    @classmethod
    def from_csv(cls, path: str | Path) -> "ThrustDataset":
        rows = []
        with open(path, newline="", encoding="utf-8") as fh:
            reader = csv.DictReader(fh)
            missing = set(DATASET_CSV_HEADER) - set(reader.fieldnames or ())
            if missing:
                raise ValidationError(f"dataset CSV missing columns: {sorted(missing)}")
            for rec in reader:
                width_m = float(rec["width_cm"]) / 100.0
                length_m = float(rec["length_cm"]) / 100.0
                ar = float(rec["ar"])
                if abs(ar - width_m / length_m) > 1e-3:
                    raise ValidationError(
                        f"ar column ({ar}) inconsistent with width/length "
                        f"({width_m / length_m:.4f}); ar is derived, not independent")
                rows.append(ThrustRow(
                    stiffness=Stiffness(rec["stiffness"]),
                    trailing_edge=TrailingEdge(rec["trailing_edge"]),
                    gamma=float(rec["gamma"]),
                    width_m=width_m,
                    length_m=length_m,
                    amplitude_deg=float(rec["amplitude_deg"]),
                    frequency_hz=float(rec["frequency_hz"]),
                    mean_thrust_gf=float(rec["mean_thrust_gf"]),
                    provenance=rec["provenance"],
                ))
        return cls(rows)


def _bracket(grid: Sequence[float], x: float, what: str) -> tuple[int, int, float]:
    """Indices (i0, i1) and fraction t with grid[i0] <= x <= grid[i1]."""
    if x < grid[0] or x > grid[-1]:
        raise OutOfRangeError(
            f"{what}={x:g} outside dataset hull [{grid[0]:g}, {grid[-1]:g}]")
    i = bisect.bisect_left(grid, x)
    if i < len(grid) and grid[i] == x:
        return i, i, 0.0
    return i - 1, i, (x - grid[i - 1]) / (grid[i] - grid[i - 1])


def mean_thrust(wing: WingSpec, setting: FlapSetting, dataset: ThrustDataset) -> float:
    """Cycle-averaged forward thrust [gf] for a wing at a flap setting.

    Exact row value on a grid point; multilinear interpolation in
    (amplitude, frequency) between grid points.  No extrapolation: queries
    outside the family's grid hull raise OutOfRangeError.  Wing shape and
    structure are categorical -- the wing must match a dataset family exactly.
    """
    fam = dataset._families.get(wing_key(wing))
    if fam is None:
        raise FamilyNotFoundError(
            f"no dataset rows for {wing.stiffness.value} AR={wing.aspect_ratio:.3f} "
            f"gamma={wing.gamma} {wing.trailing_edge.value}")
    amps = sorted({a for a, _ in fam})
    freqs = sorted({f for _, f in fam})
    a0, a1, ta = _bracket(amps, setting.amplitude_deg, "amplitude_deg")
    f0, f1, tf = _bracket(freqs, setting.frequency_hz, "frequency_hz")

    def cell(ai: int, fi: int) -> float:
        row = fam.get((amps[ai], freqs[fi]))
        if row is None:
            raise OutOfRangeError(
                f"dataset grid has no row at A={amps[ai]:g} f={freqs[fi]:g} "
                f"(sparse grid cell)")
        return row.mean_thrust_gf

    v00 = cell(a0, f0)
    if a0 == a1 and f0 == f1:
        return v00
    v01 = cell(a0, f1)
    v10 = cell(a1, f0)
    v11 = cell(a1, f1)
    lo = v00 + (v01 - v00) * tf
    hi = v10 + (v11 - v10) * tf
    return lo + (hi - lo) * ta


def _raised_cosine(u: np.ndarray, center: float, width: float) -> np.ndarray:
    """Periodic raised-cosine pulse on cycle fraction u (unit integral = width/2)."""
    d = np.mod(u - center + 0.5, 1.0) - 0.5
    inside = np.abs(d) <= width / 2.0
    out = np.zeros_like(u)
    out[inside] = 0.5 * (1.0 + np.cos(2.0 * math.pi * d[inside] / width))
    return out


def thrust_waveform(wing: WingSpec, setting: FlapSetting, t,
                    dataset: ThrustDataset):
    """Instantaneous thrust [gf] at time(s) t [s], periodic with period 1/f.

    The cycle average equals mean_thrust exactly by construction.  The forward
    peak sits just after the downstroke completes; a shallow negative trough
    follows the upstroke, so the minimum is negative whenever the mean is
    positive.
    """
    m = mean_thrust(wing, setting, dataset)
    scalar = np.isscalar(t)
    u = np.mod(setting.frequency_hz * np.asarray(t, dtype=float), 1.0)
    pulse = m / _MEAN_FACTOR
    w = pulse * (_raised_cosine(u, _DOWN_PULSE_CENTER, _DOWN_PULSE_WIDTH)
                 - _TROUGH_RATIO * _raised_cosine(u, _UP_PULSE_CENTER, _UP_PULSE_WIDTH))
    return float(w) if scalar else w


def argmax_cell(cells: Iterable[tuple[float, float, float]]) -> tuple[float, float, float]:
    """Best (amplitude, frequency, thrust) cell; ties go to lower frequency,
    then lower amplitude (less servo wear)."""
    best = None
    for amp, freq, gf in cells:
        key = (-gf, freq, amp)
        if best is None or key < best[0]:
            best = (key, (amp, freq, gf))
    if best is None:
        raise FamilyNotFoundError("empty sweep: no cells to maximize over")
    return best[1]


def optimal_setting(wing: WingSpec, dataset: ThrustDataset) -> tuple[FlapSetting, float]:
    """Grid argmax of mean thrust for a wing family.

    Zero-amplitude anchor rows are interpolation anchors, not commandable
    settings, and are excluded.
    """
    rows = [r for r in dataset.rows_for(wing) if r.amplitude_deg > 0]
    if not rows:
        raise FamilyNotFoundError("wing family has no nonzero-amplitude rows")
    amp, freq, gf = argmax_cell(
        (r.amplitude_deg, r.frequency_hz, r.mean_thrust_gf) for r in rows)
    return FlapSetting(amplitude_deg=amp, frequency_hz=freq), gf
