"""GSM module emulation: text-mode AT commands and low-credit SMS alerts.

The modem accepts CR-terminated command lines and answers with CRLF
wrapped response text, exactly as the classic serial modules do:

    AT                -> OK
    AT+CMGF=1         -> OK (text mode)
    AT+CMGS="<num>"   -> "> " prompt, then a body terminated by Ctrl-Z
                         answers +CMGS: <n> followed by OK
    anything else     -> ERROR

The alert unit drives a full AT exchange when the meter reports a low
credit crossing and schedules the delivery 2 to 3 seconds later, drawn
from a seeded generator so runs are reproducible.
"""

from __future__ import annotations

import random
import re
from dataclasses import dataclass, field

from .meter import MSEN_PER_RM, MeterSnapshot, MeterState

CTRL_Z = 0x1A
DEFAULT_RECIPIENT = "+60123456789"
DELIVERY_LATENCY_RANGE_MS = (2000, 3000)

_CMGS_PATTERN = re.compile(r'^AT\+CMGS="([^"]+)"$')


class ModemError(Exception):
    """The emulated modem answered something the driver did not expect."""


@dataclass
class ModemSession:
    """Serial-side state of one emulated GSM module."""

    text_mode: bool = False
    pending_recipient: str | None = None
    message_counter: int = 0
    submissions: list[tuple[str, str]] = field(default_factory=list)


@dataclass(frozen=True)
class SmsRecord:
    recipient: str
    body: str
    submitted_ms: int
    delivered_ms: int


def handle_at(session: ModemSession, line: bytes) -> bytes:
    """Process one command line (or message body) and return the raw reply bytes."""
    if session.pending_recipient is not None:
        if not line.endswith(bytes([CTRL_Z])):
            session.pending_recipient = None
            return b"\r\nERROR\r\n"
        body = line[:-1].decode("ascii", errors="replace")
        session.submissions.append((session.pending_recipient, body))
        session.pending_recipient = None
        session.message_counter += 1
        return b"\r\n+CMGS: %d\r\n\r\nOK\r\n" % session.message_counter

    command = line.rstrip(b"\r").decode("ascii", errors="replace")
    if command == "AT":
        return b"\r\nOK\r\n"
    if command == "AT+CMGF=1":
        session.text_mode = True
        return b"\r\nOK\r\n"
    match = _CMGS_PATTERN.match(command)
    if match:
        session.pending_recipient = match.group(1)
        return b"\r\n> "
    return b"\r\nERROR\r\n"


def low_credit_body(meter_id: str, balance_msen: int) -> str:
    """Alert text shown to the customer."""
    return f"LOW CREDIT: meter {meter_id} balance RM{balance_msen / MSEN_PER_RM:.2f}"


def buzzer_state(snapshot: MeterSnapshot) -> bool:
    """The buzzer sounds only while the meter is in LowCredit."""
    return snapshot.state is MeterState.LOW_CREDIT


class GsmAlerter:
    """Owns one modem session and turns meter alerts into delivered SMS."""

    def __init__(self, recipient: str = DEFAULT_RECIPIENT, seed: int = 0) -> None:
        self.recipient = recipient
        self.session = ModemSession()
        self._rng = random.Random(seed)
        self.records: list[SmsRecord] = []

    def trigger_low_credit(self, meter_id: str, balance_msen: int, now_ms: int) -> SmsRecord:
        """Run the AT exchange for one alert and schedule its delivery."""
        body = low_credit_body(meter_id, balance_msen)
        self._exchange(b"AT\r", b"\r\nOK\r\n")
        self._exchange(b"AT+CMGF=1\r", b"\r\nOK\r\n")
        self._exchange(f'AT+CMGS="{self.recipient}"\r'.encode("ascii"), b"\r\n> ")
        reply = handle_at(self.session, body.encode("ascii") + bytes([CTRL_Z]))
        if not reply.startswith(b"\r\n+CMGS: "):
            raise ModemError(f"send rejected: {reply!r}")
        latency_ms = self._rng.randint(*DELIVERY_LATENCY_RANGE_MS)
        record = SmsRecord(
            recipient=self.recipient,
            body=body,
            submitted_ms=now_ms,
            delivered_ms=now_ms + latency_ms,
        )
        self.records.append(record)
        return record

    def delivered(self, now_ms: int) -> list[SmsRecord]:
        """Records whose delivery time has passed, in submission order."""
        return [r for r in self.records if r.delivered_ms <= now_ms]

    def _exchange(self, command: bytes, expected: bytes) -> None:
        reply = handle_at(self.session, command)
        if reply != expected:
            raise ModemError(f"unexpected modem reply {reply!r} to {command!r}")
