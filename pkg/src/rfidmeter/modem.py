"""ASK/OOK modem for the card link.

A 1 bit is one bit period of full-amplitude carrier; a 0 bit is the same
carrier scaled by (1 - mod_depth). Demodulation is envelope detection:
the mean absolute amplitude of each bit period, compared against the
midpoint of the modulator's own reference levels for the configuration.

The reference levels are measured from the modulator rather than taken
as the analytic 2/pi because at coarse sample-per-cycle ratios the true
per-bit envelope mean sits a few percent off the ideal, which matters
for shallow modulation depths.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

DEFAULT_CARRIER_HZ = 125_000
DEFAULT_SAMPLE_RATE_HZ = 1_000_000
DEFAULT_BAUD = 2_000

# minimum oversampling of the carrier for a usable envelope
_MIN_SAMPLES_PER_CYCLE = 8


@dataclass(frozen=True)
class AskConfig:
    """Carrier, sampling and keying parameters for one link."""

    carrier_hz: int = DEFAULT_CARRIER_HZ
    sample_rate_hz: int = DEFAULT_SAMPLE_RATE_HZ
    baud: int = DEFAULT_BAUD
    mod_depth: float = 1.0

    def __post_init__(self) -> None:
        if self.carrier_hz <= 0 or self.sample_rate_hz <= 0 or self.baud <= 0:
            raise ValueError("carrier_hz, sample_rate_hz and baud must be positive")
        if self.sample_rate_hz % self.baud != 0:
            raise ValueError(
                f"sample_rate_hz ({self.sample_rate_hz}) must be divisible by baud ({self.baud})"
            )
        if self.sample_rate_hz < _MIN_SAMPLES_PER_CYCLE * self.carrier_hz:
            raise ValueError(
                f"sample_rate_hz must be at least {_MIN_SAMPLES_PER_CYCLE}x carrier_hz"
            )
        if not 0.0 < self.mod_depth <= 1.0:
            raise ValueError(f"mod_depth must be in (0, 1], got {self.mod_depth}")

    @property
    def samples_per_bit(self) -> int:
        return self.sample_rate_hz // self.baud


def modulate(bits: Sequence[int] | np.ndarray, config: AskConfig) -> np.ndarray:
    """Key a bit sequence onto the carrier; returns len(bits) * samples_per_bit samples."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.ndim != 1:
        raise ValueError("bits must be one-dimensional")
    if bits.size and not np.all((bits == 0) | (bits == 1)):
        raise ValueError("bits must be 0 or 1")
    spb = config.samples_per_bit
    n = bits.size * spb
    t = np.arange(n) / config.sample_rate_hz
    carrier = np.sin(2.0 * np.pi * config.carrier_hz * t)
    amplitude = np.where(bits == 1, 1.0, 1.0 - config.mod_depth)
    return np.repeat(amplitude, spb) * carrier


def _reference_levels(config: AskConfig) -> tuple[float, float]:
    """Measured per-bit envelope means for a 0 bit and a 1 bit."""
    spb = config.samples_per_bit
    t = np.arange(spb) / config.sample_rate_hz
    one_level = float(np.mean(np.abs(np.sin(2.0 * np.pi * config.carrier_hz * t))))
    return (1.0 - config.mod_depth) * one_level, one_level


def demodulate(samples: np.ndarray | Sequence[float], config: AskConfig) -> np.ndarray:
    """Recover the bit sequence from a sample stream.

    Rejects inputs that are not a whole number of bit periods.
    """
    samples = np.asarray(samples, dtype=np.float64)
    if samples.ndim != 1:
        raise ValueError("samples must be one-dimensional")
    spb = config.samples_per_bit
    if samples.size % spb != 0:
        raise ValueError(
            f"sample count {samples.size} is not a whole number of {spb}-sample bit periods"
        )
    zero_level, one_level = _reference_levels(config)
    threshold = 0.5 * (zero_level + one_level)
    envelope = np.abs(samples).reshape(-1, spb).mean(axis=1)
    return (envelope > threshold).astype(np.uint8)


def bytes_to_bits(data: bytes) -> np.ndarray:
    """Expand bytes into bits, most significant bit first."""
    return np.unpackbits(np.frombuffer(data, dtype=np.uint8))


def bits_to_bytes(bits: np.ndarray | Iterable[int]) -> bytes:
    """Pack an MSB-first bit sequence back into bytes."""
    bits = np.asarray(bits, dtype=np.uint8)
    if bits.size % 8 != 0:
        raise ValueError(f"bit count {bits.size} is not a multiple of 8")
    return np.packbits(bits).tobytes()
