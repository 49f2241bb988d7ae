"""Credit top-up workflow: a strict four-step session at the vending point.

Steps run in one fixed order - activate the writer, authenticate the
card, read its balance, write the topped-up balance - and any call out
of order is rejected. All card traffic goes through the reader's ASK
link as AUTH / READ_BAL / WRITE_BAL frames, so a foreign card fails at
the authentication step and nothing is ever written to it. A completed
top-up appends a TOPUP ledger record and credits the bound meter.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Callable

from .card import UID_LENGTH
from .frames import FrameCommand, pack_balance, unpack_balance
from .ledger import Ledger, LedgerKind, LedgerRecord
from .link import CardReader
from .meter import PrepaidMeter


class TopupStep(Enum):
    START = "Start"
    WRITER_ACTIVE = "WriterActive"
    AUTHENTICATED = "Authenticated"
    BALANCE_READ = "BalanceRead"
    DONE = "Done"


class WorkflowError(Exception):
    """A step was attempted out of order."""


class TopupAuthError(Exception):
    """The card rejected the credentials."""


class TopupLinkError(Exception):
    """The card NAKed a read or write after authentication."""


@dataclass
class TopupSession:
    """Progress of one vending transaction."""

    step: TopupStep = TopupStep.START
    uid: bytes | None = None
    balance_read_msen: int | None = None


class TopupWorkflow:
    """Runs vending sessions against one reader, meter and ledger."""

    def __init__(
        self,
        reader: CardReader,
        meter: PrepaidMeter,
        ledger: Ledger,
        clock_ms: Callable[[], int] = lambda: 0,
    ) -> None:
        self.reader = reader
        self.meter = meter
        self.ledger = ledger
        self.clock_ms = clock_ms

    def activate_writer(self, session: TopupSession) -> None:
        """Step 1: power the writer coil and start a fresh card session."""
        self._require(session, TopupStep.START, "activate_writer")
        self.reader.reset_session()
        session.step = TopupStep.WRITER_ACTIVE

    def authenticate(self, session: TopupSession, uid: bytes, key: bytes) -> None:
        """Step 2: prove the uid/key pair to the card over the link."""
        self._require(session, TopupStep.WRITER_ACTIVE, "authenticate")
        if len(uid) != UID_LENGTH:
            raise ValueError(f"uid must be {UID_LENGTH} bytes")
        response = self.reader.transact(FrameCommand.AUTH, uid + key)
        if response.cmd is not FrameCommand.ACK:
            # stay in WriterActive so the operator may retry
            raise TopupAuthError("card rejected the credentials")
        if bytes(uid) != self.meter.bound_uid:
            # a foreign card may know its own key; reject it before any write
            raise TopupAuthError("card is not bound to this meter")
        session.uid = bytes(uid)
        session.step = TopupStep.AUTHENTICATED

    def read_balance(self, session: TopupSession) -> int:
        """Step 3: fetch the stored credit from the card."""
        self._require(session, TopupStep.AUTHENTICATED, "read_balance")
        response = self.reader.transact(FrameCommand.READ_BAL, session.uid)
        if response.cmd is not FrameCommand.ACK:
            raise TopupLinkError("balance read NAKed")
        session.balance_read_msen = unpack_balance(response.payload)
        session.step = TopupStep.BALANCE_READ
        return session.balance_read_msen

    def do_topup(self, session: TopupSession, amount_msen: int) -> tuple[int, LedgerRecord]:
        """Step 4: write balance+amount to the card, log it, credit the meter."""
        self._require(session, TopupStep.BALANCE_READ, "do_topup")
        if amount_msen <= 0:
            raise ValueError("top-up amount must be positive")
        # re-read so a balance that moved since step 3 is not clobbered
        current = self.reader.transact(FrameCommand.READ_BAL, session.uid)
        if current.cmd is not FrameCommand.ACK:
            raise TopupLinkError("balance re-read NAKed")
        new_balance = unpack_balance(current.payload) + amount_msen
        written = self.reader.transact(FrameCommand.WRITE_BAL, pack_balance(new_balance))
        if written.cmd is not FrameCommand.ACK:
            raise TopupLinkError("balance write NAKed")
        meter_balance = self.meter.apply_topup(self.reader.card, amount_msen)
        record = self.ledger.append(
            self.clock_ms(), session.uid, LedgerKind.TOPUP, amount_msen, meter_balance
        )
        session.step = TopupStep.DONE
        return meter_balance, record

    @staticmethod
    def _require(session: TopupSession, expected: TopupStep, op: str) -> None:
        if session.step is not expected:
            raise WorkflowError(
                f"{op} requires step {expected.value}, session is at {session.step.value}"
            )
