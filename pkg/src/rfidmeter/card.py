"""Card-side transaction logic: the contactless card as a tiny state machine.

The card holds a 4-byte uid, an 8-byte shared key and a balance in
milli-sen. AUTH compares uid and key and unlocks writes for the session;
READ_BAL answers to the matching uid without authentication; WRITE_BAL
stores an absolute balance and requires a previous successful AUTH.
Every rejection is a NAK carrying a one-byte reason code, and no NAK
path ever changes the stored balance.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .frames import Frame, FrameCommand, pack_balance, unpack_balance

UID_LENGTH = 4
KEY_LENGTH = 8

# NAK reason codes (payload byte 0)
NAK_BAD_AUTH = 0x01
NAK_NOT_AUTHENTICATED = 0x02
NAK_UID_MISMATCH = 0x03
NAK_BAD_REQUEST = 0x04


@dataclass
class CardImage:
    """Persistent contents of one card."""

    uid: bytes
    key: bytes
    balance_msen: int = 0
    bound_meter: str | None = None

    def __post_init__(self) -> None:
        if len(self.uid) != UID_LENGTH:
            raise ValueError(f"uid must be {UID_LENGTH} bytes")
        if len(self.key) != KEY_LENGTH:
            raise ValueError(f"key must be {KEY_LENGTH} bytes")
        if self.balance_msen < 0:
            raise ValueError("balance_msen must be non-negative")


@dataclass
class CardSession:
    """Per-link authentication state; discarded when the card leaves the field."""

    authenticated: bool = False
    failed_auth_count: int = field(default=0)


def card_transact(card: CardImage, request: Frame, session: CardSession) -> Frame:
    """Execute one request frame against the card, returning ACK or NAK."""
    if request.cmd == FrameCommand.AUTH:
        if len(request.payload) != UID_LENGTH + KEY_LENGTH:
            return Frame(FrameCommand.NAK, bytes([NAK_BAD_REQUEST]))
        uid, key = request.payload[:UID_LENGTH], request.payload[UID_LENGTH:]
        if uid != card.uid or key != card.key:
            session.failed_auth_count += 1
            return Frame(FrameCommand.NAK, bytes([NAK_BAD_AUTH]))
        session.authenticated = True
        return Frame(FrameCommand.ACK)

    if request.cmd == FrameCommand.READ_BAL:
        if len(request.payload) != UID_LENGTH:
            return Frame(FrameCommand.NAK, bytes([NAK_BAD_REQUEST]))
        if request.payload != card.uid:
            return Frame(FrameCommand.NAK, bytes([NAK_UID_MISMATCH]))
        return Frame(FrameCommand.ACK, pack_balance(card.balance_msen))

    if request.cmd == FrameCommand.WRITE_BAL:
        if not session.authenticated:
            return Frame(FrameCommand.NAK, bytes([NAK_NOT_AUTHENTICATED]))
        if len(request.payload) != 4:
            return Frame(FrameCommand.NAK, bytes([NAK_BAD_REQUEST]))
        card.balance_msen = unpack_balance(request.payload)
        return Frame(FrameCommand.ACK, pack_balance(card.balance_msen))

    # ACK/NAK arriving as a request makes no sense for a card
    return Frame(FrameCommand.NAK, bytes([NAK_BAD_REQUEST]))
