"""Ledger format, append semantics and replay verification."""

import os
import tempfile

import pytest

from rfidmeter.ledger import (
    Ledger,
    LedgerCorruptionError,
    LedgerError,
    LedgerKind,
    LedgerParseError,
    LedgerRecord,
    format_record,
    parse_record,
    replay,
)

UID = bytes.fromhex("a1b2c3d4")


@pytest.fixture
def ledger_path():
    with tempfile.TemporaryDirectory() as tmp:
        yield os.path.join(tmp, "ledger.txt")


class TestRecordFormat:
    def test_format_round_trip(self):
        record = LedgerRecord(3, 12_500, UID, LedgerKind.TOPUP, 500_000, 500_000)
        line = format_record(record)
        assert line == "3|12500|a1b2c3d4|TOPUP|500000|500000"
        assert parse_record(line) == record

    def test_parse_errors_carry_line_numbers(self):
        with pytest.raises(LedgerParseError, match="line 7"):
            parse_record("1|2|zz|TOPUP|3|4", lineno=7)
        with pytest.raises(LedgerParseError):
            parse_record("1|2|a1b2c3d4|BOGUS|3|4")
        with pytest.raises(LedgerParseError):
            parse_record("only|five|fields|here|now")
        with pytest.raises(LedgerParseError):
            parse_record("1|2|a1b2c3d4|TOPUP|-5|4")


class TestLedgerAppend:
    def test_sequence_assignment_and_recovery(self, ledger_path):
        """Sequence numbers continue across a close/reopen."""
        with Ledger(ledger_path) as ledger:
            first = ledger.append(0, UID, LedgerKind.TOPUP, 100, 100)
            assert first.seq == 1
            ledger.append(10, UID, LedgerKind.DEDUCT, 40, 60)
        with Ledger(ledger_path) as ledger:
            third = ledger.append(20, UID, LedgerKind.DEDUCT, 60, 0)
            assert third.seq == 3
        assert replay(ledger_path) == {UID: 0}

    def test_records_visible_after_append(self, ledger_path):
        with Ledger(ledger_path) as ledger:
            ledger.append(0, UID, LedgerKind.TOPUP, 5, 5)
            assert len(ledger.records) == 1

    def test_second_writer_refused_while_open(self, ledger_path):
        """Two appenders would interleave independent seq streams, so the
        write handle is exclusive until the first ledger closes."""
        with Ledger(ledger_path) as ledger:
            ledger.append(0, UID, LedgerKind.TOPUP, 5, 5)
            with pytest.raises(LedgerError, match="held by another"):
                Ledger(ledger_path)
        reopened = Ledger(ledger_path)  # fine after close
        assert len(reopened.records) == 1
        reopened.close()


class TestReplay:
    def test_reproduces_balances_per_card(self, ledger_path):
        other = bytes.fromhex("deadbeef")
        with Ledger(ledger_path) as ledger:
            ledger.append(0, UID, LedgerKind.TOPUP, 500_000, 500_000)
            ledger.append(1, other, LedgerKind.TOPUP, 10_000, 10_000)
            ledger.append(2, UID, LedgerKind.DEDUCT, 73_500, 426_500)
            ledger.append(3, UID, LedgerKind.ALERT, 0, 426_500)
            ledger.append(4, other, LedgerKind.DEDUCT, 10_000, 0)
            ledger.append(5, other, LedgerKind.CUTOFF, 0, 0)
        assert replay(ledger_path) == {UID: 426_500, other: 0}

    def test_sequence_gap_detected(self, ledger_path):
        with Ledger(ledger_path) as ledger:
            ledger.append(0, UID, LedgerKind.TOPUP, 100, 100)
            ledger.append(1, UID, LedgerKind.DEDUCT, 10, 90)
        lines = open(ledger_path).read().splitlines()
        with open(ledger_path, "w") as fh:
            fh.write(lines[0] + "\n")
            fh.write(lines[1].replace("2|", "4|", 1) + "\n")
        with pytest.raises(LedgerCorruptionError, match="gap"):
            replay(ledger_path)

    def test_balance_chain_violation_detected(self, ledger_path):
        with open(ledger_path, "w") as fh:
            fh.write("1|0|a1b2c3d4|TOPUP|100|100\n")
            fh.write("2|5|a1b2c3d4|DEDUCT|10|95\n")  # chain says 90
        with pytest.raises(LedgerCorruptionError, match="chain"):
            replay(ledger_path)

    def test_marker_with_amount_detected(self, ledger_path):
        with open(ledger_path, "w") as fh:
            fh.write("1|0|a1b2c3d4|ALERT|5|0\n")
        with pytest.raises(LedgerCorruptionError):
            replay(ledger_path)

    def test_overdraw_detected(self, ledger_path):
        with open(ledger_path, "w") as fh:
            fh.write("1|0|a1b2c3d4|TOPUP|100|100\n")
            fh.write("2|5|a1b2c3d4|DEDUCT|200|0\n")
        with pytest.raises(LedgerCorruptionError):
            replay(ledger_path)

    def test_blank_lines_ignored(self, ledger_path):
        with open(ledger_path, "w") as fh:
            fh.write("1|0|a1b2c3d4|TOPUP|100|100\n\n")
        assert replay(ledger_path) == {UID: 100}
