"""Current sensing chain: loads -> shunt voltage -> calibrated power readout.

Models a resistive shunt in series with the mains loads. The measured
wattage of each switched-on load determines the RMS current; the shunt
drops a proportional voltage; a linear calibration (gain, offset) maps
that voltage back to current, and power is reconstructed against the
mains RMS voltage.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

DEFAULT_MAINS_VRMS = 240.0
DEFAULT_SHUNT_OHM = 0.1


@dataclass
class LoadSpec:
    """One switchable appliance on the metered circuit."""

    name: str
    rated_w: float
    measured_w: float
    switched_on: bool = False

    def __post_init__(self) -> None:
        if self.rated_w < 0 or self.measured_w < 0:
            raise ValueError("wattages must be non-negative")


@dataclass
class ShuntModel:
    """Shunt resistance plus the linear calibration of its readout."""

    r_shunt_ohm: float = DEFAULT_SHUNT_OHM
    mains_vrms: float = DEFAULT_MAINS_VRMS
    cal_gain: float | None = None
    cal_offset: float | None = None

    def __post_init__(self) -> None:
        if self.r_shunt_ohm <= 0:
            raise ValueError("r_shunt_ohm must be positive")
        if self.mains_vrms <= 0:
            raise ValueError("mains_vrms must be positive")

    @property
    def calibrated(self) -> bool:
        return self.cal_gain is not None and self.cal_offset is not None


def load_current(loads: Iterable[LoadSpec], vrms: float = DEFAULT_MAINS_VRMS) -> float:
    """Total RMS current drawn by the switched-on loads."""
    if vrms <= 0:
        raise ValueError("vrms must be positive")
    total_w = sum(load.measured_w for load in loads if load.switched_on)
    return total_w / vrms

def shunt_voltage(current_a: float, model: ShuntModel) -> float:
    """Voltage across the shunt for a given RMS current."""
    return current_a * model.r_shunt_ohm


def calibrate(samples: Sequence[tuple[float, float]]) -> tuple[float, float]:
    """Fit current = gain * v_out + offset by least squares.

    *samples* are (v_out, known_current) pairs. Needs at least two
    samples with distinct voltages; a degenerate set is rejected.
    """
    if len(samples) < 2:
        raise ValueError("calibration needs at least two samples")
    v = np.asarray([s[0] for s in samples], dtype=np.float64)
    i = np.asarray([s[1] for s in samples], dtype=np.float64)
    if np.ptp(v) == 0.0:
        raise ValueError("calibration samples are degenerate: all voltages equal")
    gain, offset = np.polyfit(v, i, 1)
    return float(gain), float(offset)


def measured_power(v_out: float, model: ShuntModel) -> float:
    """Reconstruct circuit power from a shunt readout using the calibration."""
    if not model.calibrated:
        raise ValueError("shunt model is not calibrated")
    current = model.cal_gain * v_out + model.cal_offset
    return current * model.mains_vrms
