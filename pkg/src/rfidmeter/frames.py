"""Byte framing for the card/reader link.

Wire layout::

    SOF(0xAA) | cmd | len | payload... | crc_hi | crc_lo | EOF(0x55)

The CRC is CRC-16/CCITT-FALSE (polynomial 0x1021, initial value 0xFFFF,
no reflection, no final xor) computed over cmd, len and payload. Balance
payloads are 4-byte big-endian unsigned milli-sen.

Decoding is positional: the length byte fixes the frame size, so payload
or CRC bytes that happen to equal the markers are harmless.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

FRAME_SOF = 0xAA
FRAME_EOF = 0x55
MAX_PAYLOAD = 255

_CRC16_POLYNOMIAL = 0x1021
_CRC16_INITIAL = 0xFFFF

# bytes outside the payload: SOF, cmd, len, crc_hi, crc_lo, EOF
_FRAME_OVERHEAD = 6


class FrameCommand(IntEnum):
    AUTH = 0x01
    READ_BAL = 0x02
    WRITE_BAL = 0x03
    ACK = 0x80
    NAK = 0x81


class FrameError(ValueError):
    """Base class for frame decode failures."""


class TruncatedFrameError(FrameError):
    """Input shorter than the minimum frame."""


class BadStartMarkerError(FrameError):
    """First byte is not 0xAA."""


class BadEndMarkerError(FrameError):
    """Last byte is not 0x55."""


class LengthMismatchError(FrameError):
    """Length byte disagrees with the actual byte count."""


class CrcMismatchError(FrameError):
    """Checksum over cmd|len|payload does not match."""


class UnknownCommandError(FrameError):
    """Command byte is not one of the defined codes."""


@dataclass(frozen=True)
class Frame:
    cmd: FrameCommand
    payload: bytes = b""

    def __post_init__(self) -> None:
        if len(self.payload) > MAX_PAYLOAD:
            raise ValueError(f"payload too long: {len(self.payload)} > {MAX_PAYLOAD}")


def crc16_ccitt_false(data: bytes) -> int:
    """Return the CRC-16/CCITT-FALSE of *data* (check value 0x29B1 for b'123456789')."""
    crc = _CRC16_INITIAL
    for byte in data:
        crc ^= byte << 8
        for _ in range(8):
            if crc & 0x8000:
                crc = ((crc << 1) ^ _CRC16_POLYNOMIAL) & 0xFFFF
            else:
                crc = (crc << 1) & 0xFFFF
    return crc


def encode_frame(cmd: FrameCommand, payload: bytes = b"") -> bytes:
    """Serialize a command and payload into the on-air byte layout."""
    cmd = FrameCommand(cmd)
    if len(payload) > MAX_PAYLOAD:
        raise ValueError(f"payload too long: {len(payload)} > {MAX_PAYLOAD}")
    body = bytes([cmd, len(payload)]) + payload
    crc = crc16_ccitt_false(body)
    return bytes([FRAME_SOF]) + body + bytes([crc >> 8, crc & 0xFF, FRAME_EOF])


def decode_frame(data: bytes) -> Frame:
    """Parse one frame, raising a distinct FrameError subclass per defect.

    Accepts exactly the image of encode_frame; anything else is rejected.
    """
    if len(data) < _FRAME_OVERHEAD:
        raise TruncatedFrameError(f"frame too short: {len(data)} bytes")
    if data[0] != FRAME_SOF:
        raise BadStartMarkerError(f"bad start marker 0x{data[0]:02X}")
    if data[-1] != FRAME_EOF:
        raise BadEndMarkerError(f"bad end marker 0x{data[-1]:02X}")
    declared = data[2]
    if len(data) != _FRAME_OVERHEAD + declared:
        raise LengthMismatchError(
            f"length byte says {declared}, frame holds {len(data) - _FRAME_OVERHEAD}"
        )
    body = data[1 : 3 + declared]
    received_crc = (data[-3] << 8) | data[-2]
    expected_crc = crc16_ccitt_false(body)
    if received_crc != expected_crc:
        raise CrcMismatchError(
            f"crc mismatch: got 0x{received_crc:04X}, expected 0x{expected_crc:04X}"
        )
    try:
        cmd = FrameCommand(data[1])
    except ValueError:
        raise UnknownCommandError(f"unknown command 0x{data[1]:02X}") from None
    return Frame(cmd, bytes(data[3 : 3 + declared]))


def pack_balance(balance_msen: int) -> bytes:
    """Encode a balance as 4-byte big-endian unsigned milli-sen."""
    if not 0 <= balance_msen <= 0xFFFFFFFF:
        raise ValueError(f"balance out of range: {balance_msen}")
    return balance_msen.to_bytes(4, "big")


def unpack_balance(payload: bytes) -> int:
    if len(payload) != 4:
        raise ValueError(f"balance payload must be 4 bytes, got {len(payload)}")
    return int.from_bytes(payload, "big")
