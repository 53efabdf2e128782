"""Bundled thrust dataset: one anchored measurement plus synthetic fixtures.

The stand campaign published a single absolute number -- the best wing (stiff,
AR=1.0, gamma=0.25, concave trailing edge) producing 17.3 gf at 90 deg and
1.25 Hz -- plus qualitative trends.  Every other row here is a synthetic
fixture generated from a smooth surface that respects those trends:

  * stiff wings beat flexible ones at high aspect ratio; flexible wins at the
    smallest AR (tested at gamma = 0.5, the AR-study shape),
  * large sweep back (gamma = 0.75) hurts, especially for flexible wings,
  * the best frequency shifts from 0.75 Hz at W = 61 cm up to 1.50 Hz at
    W = 37 cm,
  * optimal amplitude is the top of the tested range.

Rows are provenance-tagged so fixtures are never mistaken for measurements.
"""

from __future__ import annotations

import functools
import math

from .wing import (PROVENANCE_MEASURED, PROVENANCE_SYNTHETIC, Stiffness,
                   ThrustDataset, ThrustRow, TrailingEdge, WingSpec)

AMPLITUDES_DEG = (45.0, 60.0, 75.0, 90.0)
FREQUENCIES_HZ = tuple(0.25 * k for k in range(1, 9))   # 0.25 .. 2.0 Hz
GAMMAS = (0.0, 0.25, 0.5, 0.75)
WIDTHS_CM = (37.0, 45.0, 53.0, 61.0)
LENGTH_CM = 53.0                                         # load-cell arm spacing

# The anchored measurement.
OPTIMAL_WING = WingSpec(width_m=0.53, length_m=0.53, gamma=0.25,
                        stiffness=Stiffness.STIFF,
                        trailing_edge=TrailingEdge.CONCAVE)
OPTIMAL_AMPLITUDE_DEG = 90.0
OPTIMAL_FREQUENCY_HZ = 1.25
OPTIMAL_THRUST_GF = 17.3

_AMP_EXPONENT = 1.3          # thrust grows superlinearly with amplitude
_GAMMA_GAIN_STIFF_CONCAVE = {0.0: 1.00, 0.25: 1.08, 0.5: 1.05, 0.75: 0.97}
_GAMMA_GAIN_STIFF_STRAIGHT = {0.0: 1.00, 0.25: 1.00, 0.5: 1.00, 0.75: 0.95}
_GAMMA_GAIN_FLEX = {0.0: 1.00, 0.25: 1.03, 0.5: 1.00, 0.75: 0.80}
_TRAILING_GAIN = {TrailingEdge.CONCAVE: 1.02, TrailingEdge.STRAIGHT: 1.00}


def _peak_frequency_hz(width_cm: float, gamma: float) -> float:
    """Fixture rule for the best flap frequency of a family.

    Linear in width (0.75 Hz at 61 cm up to 1.50 Hz at 37 cm), nudged up one
    grid step for gamma = 0.25 shapes so the anchored wing peaks at 1.25 Hz;
    snapped to the tested frequency grid.
    """
    f = 0.75 + (61.0 - width_cm) * (0.75 / 24.0)
    if gamma == 0.25:
        f += 0.25
    f = round(f / 0.25) * 0.25
    return min(max(f, FREQUENCIES_HZ[0]), FREQUENCIES_HZ[-1])


def _raw_peak_gf(stiffness: Stiffness, trailing: TrailingEdge,
                 gamma: float, width_cm: float) -> float:
    ar = width_cm / LENGTH_CM
    if stiffness is Stiffness.STIFF:
        base = 16.2 - 6.0 * (ar - 1.0) ** 2
        gg = (_GAMMA_GAIN_STIFF_CONCAVE if trailing is TrailingEdge.CONCAVE
              else _GAMMA_GAIN_STIFF_STRAIGHT)[gamma]
    else:
        base = 16.8 - 9.0 * (ar - WIDTHS_CM[0] / LENGTH_CM)
        gg = _GAMMA_GAIN_FLEX[gamma]
    return base * gg * _TRAILING_GAIN[trailing]


def _surface_gf(peak_gf: float, peak_freq_hz: float,
                amplitude_deg: float, frequency_hz: float) -> float:
    amp_gain = (amplitude_deg / 90.0) ** _AMP_EXPONENT
    x = frequency_hz / peak_freq_hz
    freq_gain = x * math.exp(1.0 - x)
    return round(peak_gf * amp_gain * freq_gain, 2)


@functools.lru_cache(maxsize=1)
def builtin_dataset() -> ThrustDataset:
    """The dataset shipped with the package (deterministic, built in code)."""
    anchor_scale = OPTIMAL_THRUST_GF / _raw_peak_gf(
        OPTIMAL_WING.stiffness, OPTIMAL_WING.trailing_edge,
        OPTIMAL_WING.gamma, OPTIMAL_WING.width_m * 100.0)

    anchor_key = (OPTIMAL_WING.stiffness, OPTIMAL_WING.trailing_edge,
                  OPTIMAL_WING.gamma, OPTIMAL_WING.width_m * 100.0,
                  OPTIMAL_AMPLITUDE_DEG, OPTIMAL_FREQUENCY_HZ)

    rows = []
    for stiffness in Stiffness:
        for trailing in TrailingEdge:
            for gamma in GAMMAS:
                for width_cm in WIDTHS_CM:
                    peak = anchor_scale * _raw_peak_gf(stiffness, trailing,
                                                       gamma, width_cm)
                    f_peak = _peak_frequency_hz(width_cm, gamma)
                    for freq in FREQUENCIES_HZ:
                        # no-motion anchor: zero thrust at zero amplitude
                        rows.append(ThrustRow(
                            stiffness=stiffness, trailing_edge=trailing,
                            gamma=gamma, width_m=width_cm / 100.0,
                            length_m=LENGTH_CM / 100.0,
                            amplitude_deg=0.0, frequency_hz=freq,
                            mean_thrust_gf=0.0,
                            provenance=PROVENANCE_SYNTHETIC))
                        for amp in AMPLITUDES_DEG:
                            key = (stiffness, trailing, gamma, width_cm, amp, freq)
                            measured = key == anchor_key
                            rows.append(ThrustRow(
                                stiffness=stiffness, trailing_edge=trailing,
                                gamma=gamma, width_m=width_cm / 100.0,
                                length_m=LENGTH_CM / 100.0,
                                amplitude_deg=amp, frequency_hz=freq,
                                mean_thrust_gf=(OPTIMAL_THRUST_GF if measured else
                                                _surface_gf(peak, f_peak, amp, freq)),
                                provenance=(PROVENANCE_MEASURED if measured
                                            else PROVENANCE_SYNTHETIC)))
    return ThrustDataset(rows)
