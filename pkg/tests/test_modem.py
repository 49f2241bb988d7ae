"""ASK modem tests: keying, envelope recovery, noise margin."""

import random

import numpy as np
import pytest

from rfidmeter.modem import (
    AskConfig,
    bits_to_bytes,
    bytes_to_bits,
    demodulate,
    modulate,
)

# one carrier cycle per bit keeps bulk tests fast
FAST = AskConfig(carrier_hz=125_000, sample_rate_hz=1_000_000, baud=125_000)


class TestAskConfig:
    def test_defaults(self):
        cfg = AskConfig()
        assert cfg.carrier_hz == 125_000
        assert cfg.sample_rate_hz == 1_000_000
        assert cfg.baud == 2_000
        assert cfg.mod_depth == 1.0
        assert cfg.samples_per_bit == 500

    def test_sample_rate_must_divide_baud(self):
        with pytest.raises(ValueError):
            AskConfig(baud=3_000)

    def test_minimum_oversampling(self):
        with pytest.raises(ValueError):
            AskConfig(carrier_hz=500_000, sample_rate_hz=1_000_000, baud=2_000)

    def test_mod_depth_range(self):
        with pytest.raises(ValueError):
            AskConfig(mod_depth=0.0)
        with pytest.raises(ValueError):
            AskConfig(mod_depth=1.2)

    def test_positive_fields(self):
        with pytest.raises(ValueError):
            AskConfig(carrier_hz=0)


class TestModulate:
    def test_output_length(self):
        cfg = AskConfig()
        assert modulate([1, 0, 1], cfg).size == 3 * cfg.samples_per_bit

    def test_one_bit_envelope_peak(self):
        """A single 1 bit is a full-amplitude carrier burst."""
        samples = modulate([1], AskConfig())
        assert np.max(samples) == pytest.approx(1.0)
        assert np.min(samples) == pytest.approx(-1.0)

    def test_zero_bit_is_silent_at_full_depth(self):
        samples = modulate([0], AskConfig(mod_depth=1.0))
        assert np.all(samples == 0.0)

    def test_zero_bit_scaled_at_partial_depth(self):
        samples = modulate([0], AskConfig(mod_depth=0.6))
        assert np.max(np.abs(samples)) == pytest.approx(0.4, rel=1e-6)

    def test_rejects_non_binary(self):
        with pytest.raises(ValueError):
            modulate([0, 2], AskConfig())


class TestDemodulate:
    def test_exhaustive_byte_patterns(self):
        """All 256 byte values round trip through the waveform."""
        for value in range(256):
            bits = bytes_to_bits(bytes([value]))
            out = demodulate(modulate(bits, FAST), FAST)
            assert np.array_equal(out, bits), f"byte 0x{value:02X} corrupted"

    def test_round_trip_default_config(self):
        bits = bytes_to_bits(bytes.fromhex("aa0204010203040155" "55"))
        cfg = AskConfig()
        assert np.array_equal(demodulate(modulate(bits, cfg), cfg), bits)

    def test_non_integral_bit_count_rejected(self):
        with pytest.raises(ValueError):
            demodulate(np.zeros(FAST.samples_per_bit + 1), FAST)

    def test_shallow_depth_round_trip(self):
        """Envelope levels are measured, so a 0.1 depth still separates."""
        cfg = AskConfig(mod_depth=0.1, baud=125_000)
        rng = random.Random(3)
        bits = np.array([rng.randrange(2) for _ in range(256)], dtype=np.uint8)
        assert np.array_equal(demodulate(modulate(bits, cfg), cfg), bits)

    def test_noise_tolerance_at_stated_bound(self):
        """Round trips survive additive uniform noise up to 0.2 * depth * amplitude."""
        rng = np.random.default_rng(11)
        for cfg in (AskConfig(), FAST):
            bound = 0.2 * cfg.mod_depth * 1.0
            for _ in range(20):
                bits = rng.integers(0, 2, 64).astype(np.uint8)
                samples = modulate(bits, cfg)
                noisy = samples + rng.uniform(-bound, bound, samples.size)
                assert np.array_equal(demodulate(noisy, cfg), bits)

    def test_all_zero_bits_with_noise(self):
        """A silent channel plus noise must still read as zeros."""
        cfg = AskConfig()
        rng = np.random.default_rng(5)
        samples = modulate(np.zeros(32, dtype=np.uint8), cfg)
        noisy = samples + rng.uniform(-0.2, 0.2, samples.size)
        assert not np.any(demodulate(noisy, cfg))


class TestBitHelpers:
    def test_msb_first(self):
        assert list(bytes_to_bits(b"\x80")) == [1, 0, 0, 0, 0, 0, 0, 0]
        assert list(bytes_to_bits(b"\x01")) == [0, 0, 0, 0, 0, 0, 0, 1]

    def test_round_trip(self):
        rng = random.Random(2)
        for _ in range(50):
            data = bytes(rng.randrange(256) for _ in range(rng.randrange(32)))
            assert bits_to_bytes(bytes_to_bits(data)) == data

    def test_partial_byte_rejected(self):
        with pytest.raises(ValueError):
            bits_to_bytes([1, 0, 1])
