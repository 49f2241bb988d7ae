"""Append-only credit ledger with replay verification.

One record per line::

    seq|time_ms|uid_hex|kind|amount_msen|balance_after_msen

Kinds: TOPUP (amount credited), DEDUCT (amount charged), CUTOFF and
ALERT (markers, amount 0). Sequence numbers are contiguous from 1; a
gap, a bad balance chain or a malformed line is reported as corruption.
Replaying a file reproduces every card's final balance, with each
card's chain starting at 0.
"""

from __future__ import annotations

import os
import threading
from dataclasses import dataclass
from enum import Enum

try:
    import fcntl
except ImportError:  # non-POSIX: single-writer discipline is on the operator
    fcntl = None


class LedgerKind(Enum):
    TOPUP = "TOPUP"
    DEDUCT = "DEDUCT"
    CUTOFF = "CUTOFF"
    ALERT = "ALERT"


class LedgerError(Exception):
    pass


class LedgerParseError(LedgerError):
    """A line does not match the record format."""


class LedgerCorruptionError(LedgerError):
    """Sequence gap or balance chain violation."""


class LedgerLockedError(LedgerError):
    """Another process holds the ledger open for writing."""


@dataclass(frozen=True)
class LedgerRecord:
    seq: int
    time_ms: int
    card_uid: bytes
    kind: LedgerKind
    amount_msen: int
    balance_after_msen: int


def format_record(record: LedgerRecord) -> str:
    return "|".join(
        (
            str(record.seq),
            str(record.time_ms),
            record.card_uid.hex(),
            record.kind.value,
            str(record.amount_msen),
            str(record.balance_after_msen),
        )
    )


def parse_record(line: str, lineno: int | None = None) -> LedgerRecord:
    where = f" (line {lineno})" if lineno is not None else ""
    fields = line.rstrip("\n").split("|")
    if len(fields) != 6:
        raise LedgerParseError(f"expected 6 fields, got {len(fields)}{where}")
    try:
        seq = int(fields[0])
        time_ms = int(fields[1])
        uid = bytes.fromhex(fields[2])
        kind = LedgerKind(fields[3])
        amount = int(fields[4])
        balance_after = int(fields[5])
    except ValueError as exc:
        raise LedgerParseError(f"bad record field: {exc}{where}") from None
    if amount < 0 or balance_after < 0:
        raise LedgerParseError(f"negative amount or balance{where}")
    return LedgerRecord(seq, time_ms, uid, kind, amount, balance_after)


class Ledger:
    """File-backed record log; recovers its sequence counter on open."""

    def __init__(self, path: str | os.PathLike) -> None:
        self.path = os.fspath(path)
        self._lock = threading.Lock()
        self.records: list[LedgerRecord] = []
        if os.path.exists(self.path):
            with open(self.path, "r", encoding="ascii") as fh:
                for lineno, line in enumerate(fh, start=1):
                    if line.strip():
                        self.records.append(parse_record(line, lineno))
        self._next_seq = self.records[-1].seq + 1 if self.records else 1
        self._fh = open(self.path, "a", encoding="ascii")
        if fcntl is not None:
            # two writers would interleave their own sequence streams and
            # wreck the file, so the append handle is exclusive
            try:
                fcntl.flock(self._fh.fileno(), fcntl.LOCK_EX | fcntl.LOCK_NB)
            except OSError:
                self._fh.close()
                raise LedgerLockedError(
                    f"{self.path} is held by another process"
                ) from None

    def append(
        self,
        time_ms: int,
        card_uid: bytes,
        kind: LedgerKind,
        amount_msen: int,
        balance_after_msen: int,
    ) -> LedgerRecord:
        """Write one record with the next sequence number and flush it."""
        with self._lock:
            record = LedgerRecord(
                self._next_seq, time_ms, bytes(card_uid), kind, amount_msen, balance_after_msen
            )
            self._fh.write(format_record(record) + "\n")
            self._fh.flush()
            self.records.append(record)
            self._next_seq += 1
            return record

    def close(self) -> None:
        self._fh.close()

    def __enter__(self) -> "Ledger":
        return self

    def __exit__(self, *exc_info) -> None:
        self.close()


def replay(path: str | os.PathLike) -> dict[bytes, int]:
    """Re-derive every card's balance from a ledger file, verifying it.

    Raises LedgerCorruptionError on a sequence gap or a record whose
    balance_after disagrees with the per-card chain.
    """
    balances: dict[bytes, int] = {}
    expected_seq = 1
    with open(path, "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            record = parse_record(line, lineno)
            if record.seq != expected_seq:
                raise LedgerCorruptionError(
                    f"sequence gap at line {lineno}: got {record.seq}, expected {expected_seq}"
                )
            expected_seq += 1
            previous = balances.get(record.card_uid, 0)
            if record.kind is LedgerKind.TOPUP:
                new_balance = previous + record.amount_msen
            elif record.kind is LedgerKind.DEDUCT:
                new_balance = previous - record.amount_msen
                if new_balance < 0:
                    raise LedgerCorruptionError(
                        f"deduction below zero at line {lineno} (seq {record.seq})"
                    )
            else:
                if record.amount_msen != 0:
                    raise LedgerCorruptionError(
                        f"{record.kind.value} record with nonzero amount at line {lineno}"
                    )
                new_balance = previous
            if record.balance_after_msen != new_balance:
                raise LedgerCorruptionError(
                    f"balance chain broken at line {lineno} (seq {record.seq}): "
                    f"recorded {record.balance_after_msen}, chain says {new_balance}"
                )
            balances[record.card_uid] = new_balance
    return balances
