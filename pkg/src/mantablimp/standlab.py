"""Thrust-stand recording pipeline: tare, channel combine, cycle averaging.

A recording holds the two load-cell channels (front and back of the wing arm)
sampled at a fixed rate, preceded by a still tare window with the wing held
horizontal.  Forward thrust is the tared channel sum times the lever-arm
gain; the reported number is the mean over whole flap cycles, with cycle
boundaries derived from the commanded frequency (robust to noisy
low-thrust runs, unlike zero-crossing detection).
"""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import (InsufficientDataError, MixedWingError, ValidationError)
from .wing import (FlapSetting, PROVENANCE_MEASURED, Stiffness, ThrustDataset,
                   ThrustRow, TrailingEdge, WingSpec, argmax_cell, thrust_waveform,
                   wing_key)

DEFAULT_SAMPLE_RATE_HZ = 80.0    # HX711-class amplifier rate
DEFAULT_TARE_WINDOW_S = 2.0


@dataclass(frozen=True, eq=False)
class StandRecording:
    """Two-channel load-cell log with its test metadata."""

    sample_rate_hz: float
    front_gf: np.ndarray
    back_gf: np.ndarray
    wing: WingSpec
    setting: FlapSetting
    tare_window_s: float = DEFAULT_TARE_WINDOW_S
    arm_gain: float = 1.0        # lever-arm correction when the arm is extended

    def __post_init__(self):
        if self.sample_rate_hz <= 0:
            raise ValidationError(f"sample rate must be > 0, got {self.sample_rate_hz}")
        if len(self.front_gf) != len(self.back_gf):
            raise ValidationError(
                f"channel length mismatch: front {len(self.front_gf)} "
                f"vs back {len(self.back_gf)}")

    @property
    def n_samples(self) -> int:
        return len(self.front_gf)

    @property
    def tare_samples(self) -> int:
        return int(round(self.tare_window_s * self.sample_rate_hz))


def tare(rec: StandRecording) -> StandRecording:
    """Subtract each channel's mean over the still tare window from the whole channel."""
    n = rec.tare_samples
    if n < 1 or n > rec.n_samples:
        raise ValidationError(
            f"tare window of {rec.tare_window_s:g} s ({n} samples) does not fit "
            f"a {rec.n_samples}-sample recording")
    return replace(rec,
                   front_gf=rec.front_gf - rec.front_gf[:n].mean(),
                   back_gf=rec.back_gf - rec.back_gf[:n].mean())


def total_thrust(rec: StandRecording) -> np.ndarray:
    """Element-wise forward thrust [gf]: (front + back) * arm_gain."""
    if len(rec.front_gf) != len(rec.back_gf):
        raise ValidationError("channel length mismatch")
    return (rec.front_gf + rec.back_gf) * rec.arm_gain


def average_thrust(series: np.ndarray, frequency_hz: float,
                   sample_rate_hz: float) -> float:
    """Mean over the largest whole number of flap cycles in the series.

    A trailing partial cycle is truncated; fewer than two complete cycles is
    an error rather than a biased answer.
    """
    if frequency_hz <= 0 or sample_rate_hz <= 0:
        raise ValidationError("frequency and sample rate must be positive")
    n = len(series)
    cycles = int(math.floor(n * frequency_hz / sample_rate_hz + 1e-9))
    if cycles < 2:
        raise InsufficientDataError(
            f"series spans {n * frequency_hz / sample_rate_hz:.2f} cycles; "
            f"need at least 2 complete cycles")
    window = min(n, int(round(cycles * sample_rate_hz / frequency_hz)))
    return float(np.asarray(series[:window], dtype=float).mean())


def process_recording(rec: StandRecording) -> float:
    """Full pipeline: tare, combine channels, drop the tare window, cycle-average."""
    combined = total_thrust(tare(rec))
    flapping = combined[rec.tare_samples:]
    return average_thrust(flapping, rec.setting.frequency_hz, rec.sample_rate_hz)


@dataclass(frozen=True)
class SweepTable:
    """Mean thrust per (amplitude, frequency) cell for one wing."""

    wing: WingSpec
    cells: tuple[tuple[float, float, float], ...]   # (amplitude, frequency, gf)
    warnings: tuple[str, ...] = ()

    def to_dataset_rows(self, provenance: str = PROVENANCE_MEASURED) -> list[ThrustRow]:
        return [ThrustRow(stiffness=self.wing.stiffness,
                          trailing_edge=self.wing.trailing_edge,
                          gamma=self.wing.gamma, width_m=self.wing.width_m,
                          length_m=self.wing.length_m, amplitude_deg=a,
                          frequency_hz=f, mean_thrust_gf=gf,
                          provenance=provenance)
                for a, f, gf in self.cells]

    def to_dataset(self, provenance: str = PROVENANCE_MEASURED) -> ThrustDataset:
        return ThrustDataset(self.to_dataset_rows(provenance))


def sweep_table(recordings: Iterable[StandRecording]) -> SweepTable:
    """Assemble an amplitude x frequency grid from one wing's recordings.

    Duplicate cells keep the latest recording and log a warning record; mixed
    wings are an error.  Cells are sorted by (amplitude, frequency) so
    assembly order never matters.
    """
    recordings = list(recordings)
    if not recordings:
        raise ValidationError("no recordings to sweep")
    wing = recordings[0].wing
    cells: dict[tuple[float, float], float] = {}
    warnings = []
    for rec in recordings:
        if wing_key(rec.wing) != wing_key(wing):
            raise MixedWingError(
                "sweep mixes recordings from different wings: "
                f"{rec.wing} vs {wing}")
        key = (rec.setting.amplitude_deg, rec.setting.frequency_hz)
        if key in cells:
            warnings.append(f"duplicate cell A={key[0]:g} f={key[1]:g}: "
                            f"keeping the latest recording")
        cells[key] = process_recording(rec)
    ordered = tuple(sorted((a, f, gf) for (a, f), gf in cells.items()))
    return SweepTable(wing=wing, cells=ordered, warnings=tuple(warnings))


def best_setting(table: SweepTable) -> tuple[FlapSetting, float]:
    """Argmax cell of a sweep, with the standard lower-frequency/amplitude tie-break."""
    amp, freq, gf = argmax_cell(table.cells)
    return FlapSetting(amplitude_deg=amp, frequency_hz=freq), gf


# ---------------------------------------------------------------------------
# Recording file format: CSV body `t_s,front_gf,back_gf` preceded by comment
# metadata lines (`# key=value`).

_WING_RE = re.compile(
    r"^(?P<stiffness>\w+),(?P<trailing>\w+),gamma=(?P<gamma>[\d.eE+-]+),"
    r"width_cm=(?P<width>[\d.eE+-]+),length_cm=(?P<length>[\d.eE+-]+)$")


def _format_wing(wing: WingSpec) -> str:
    return (f"{wing.stiffness.value},{wing.trailing_edge.value},"
            f"gamma={wing.gamma:g},width_cm={wing.width_m * 100:g},"
            f"length_cm={wing.length_m * 100:g}")


def _parse_wing(text: str) -> WingSpec:
    m = _WING_RE.match(text.strip())
    if not m:
        raise ValidationError(f"unparseable wing metadata: {text!r}")
    return WingSpec(width_m=float(m["width"]) / 100.0,
                    length_m=float(m["length"]) / 100.0,
                    gamma=float(m["gamma"]),
                    stiffness=Stiffness(m["stiffness"]),
                    trailing_edge=TrailingEdge(m["trailing"]))


def write_recording(rec: StandRecording, path: str | Path) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        fh.write(f"# wing={_format_wing(rec.wing)}\n")
        fh.write(f"# amplitude_deg={rec.setting.amplitude_deg:g}\n")
        fh.write(f"# frequency_hz={rec.setting.frequency_hz:g}\n")
        fh.write(f"# sample_rate_hz={rec.sample_rate_hz:g}\n")
        fh.write(f"# tare_window_s={rec.tare_window_s:g}\n")
        fh.write(f"# arm_gain={rec.arm_gain:g}\n")
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t_s", "front_gf", "back_gf"])
        for i in range(rec.n_samples):
            writer.writerow([f"{i / rec.sample_rate_hz:.6f}",
                             f"{rec.front_gf[i]:.6f}", f"{rec.back_gf[i]:.6f}"])


def read_recording(path: str | Path) -> StandRecording:
    meta: dict[str, str] = {}
    front, back = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        lines = iter(fh)
        header = None
        for line in lines:
            line = line.strip()
            if line.startswith("#"):
                key, _, value = line.lstrip("# ").partition("=")
                meta[key.strip()] = value.strip()
                continue
            if line:
                header = line
                break
        if header is None or header.split(",") != ["t_s", "front_gf", "back_gf"]:
            raise ValidationError(f"bad recording header in {path}: {header!r}")
        for line in lines:
            line = line.strip()
            if not line:
                continue
            _, f, b = line.split(",")
            front.append(float(f))
            back.append(float(b))
    for required in ("wing", "amplitude_deg", "frequency_hz", "sample_rate_hz"):
        if required not in meta:
            raise ValidationError(f"recording {path} missing metadata '{required}'")
    return StandRecording(
        sample_rate_hz=float(meta["sample_rate_hz"]),
        front_gf=np.asarray(front, dtype=float),
        back_gf=np.asarray(back, dtype=float),
        wing=_parse_wing(meta["wing"]),
        setting=FlapSetting(amplitude_deg=float(meta["amplitude_deg"]),
                            frequency_hz=float(meta["frequency_hz"])),
        tare_window_s=float(meta.get("tare_window_s", DEFAULT_TARE_WINDOW_S)),
        arm_gain=float(meta.get("arm_gain", 1.0)))


def synthesize_recording(wing: WingSpec, setting: FlapSetting,
                         dataset: ThrustDataset, n_cycles: int = 8,
                         sample_rate_hz: float = DEFAULT_SAMPLE_RATE_HZ,
                         tare_window_s: float = DEFAULT_TARE_WINDOW_S,
                         front_offset_gf: float = 2.0,
                         back_offset_gf: float = -1.0,
                         front_share: float = 0.6,
                         arm_gain: float = 1.0) -> StandRecording:
    """Build a clean fixture log whose processed mean matches the dataset.

    The still tare window carries only the channel offsets; the flapping
    segment splits the thrust waveform across the two cells.
    """
    n_tare = int(round(tare_window_s * sample_rate_hz))
    n_flap = int(round(n_cycles * sample_rate_hz / setting.frequency_hz))
    t = np.arange(n_flap) / sample_rate_hz
    w = thrust_waveform(wing, setting, t, dataset) / arm_gain
    signal = np.concatenate([np.zeros(n_tare), w])
    return StandRecording(
        sample_rate_hz=sample_rate_hz,
        front_gf=front_share * signal + front_offset_gf,
        back_gf=(1.0 - front_share) * signal + back_offset_gf,
        wing=wing, setting=setting, tare_window_s=tare_window_s,
        arm_gain=arm_gain)
