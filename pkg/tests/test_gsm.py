"""AT command wire format and the low-credit alert unit."""

import pytest

from rfidmeter.card import CardImage
from rfidmeter.gsm import (
    CTRL_Z,
    GsmAlerter,
    ModemSession,
    buzzer_state,
    handle_at,
    low_credit_body,
)
from rfidmeter.meter import MeterState, PrepaidMeter, TariffModel
from rfidmeter.sensing import LoadSpec

UID = bytes.fromhex("a1b2c3d4")
KEY = bytes.fromhex("0011223344556677")


class TestHandleAt:
    def test_at_probe(self):
        assert handle_at(ModemSession(), b"AT\r") == b"\r\nOK\r\n"

    def test_text_mode_select(self):
        session = ModemSession()
        assert handle_at(session, b"AT+CMGF=1\r") == b"\r\nOK\r\n"
        assert session.text_mode

    def test_send_prompt(self):
        session = ModemSession()
        reply = handle_at(session, b'AT+CMGS="+60123456789"\r')
        assert reply == b"\r\n> "
        assert session.pending_recipient == "+60123456789"

    def test_body_terminated_by_ctrl_z(self):
        session = ModemSession()
        handle_at(session, b'AT+CMGS="+60123456789"\r')
        reply = handle_at(session, b"hello" + bytes([CTRL_Z]))
        assert reply == b"\r\n+CMGS: 1\r\n\r\nOK\r\n"
        assert session.submissions == [("+60123456789", "hello")]

    def test_message_counter_increments(self):
        session = ModemSession()
        for expected in (1, 2, 3):
            handle_at(session, b'AT+CMGS="+60123456789"\r')
            reply = handle_at(session, b"x" + bytes([CTRL_Z]))
            assert reply == b"\r\n+CMGS: %d\r\n\r\nOK\r\n" % expected

    def test_unknown_command_errors(self):
        assert handle_at(ModemSession(), b"AT+CPIN?\r") == b"\r\nERROR\r\n"

    def test_body_without_send_command_errors(self):
        """A bare body line is just an unknown command."""
        session = ModemSession()
        reply = handle_at(session, b"stray body" + bytes([CTRL_Z]))
        assert reply == b"\r\nERROR\r\n"
        assert session.submissions == []

    def test_body_missing_terminator_errors(self):
        session = ModemSession()
        handle_at(session, b'AT+CMGS="+60123456789"\r')
        assert handle_at(session, b"no terminator\r") == b"\r\nERROR\r\n"
        assert session.submissions == []
        assert session.pending_recipient is None


class TestAlerter:
    def test_body_format(self):
        assert low_credit_body("METER-01", 100_000) == (
            "LOW CREDIT: meter METER-01 balance RM1.00"
        )
        assert "RM0.99" in low_credit_body("M", 99_000)

    def test_trigger_runs_full_exchange(self):
        alerter = GsmAlerter(seed=42)
        record = alerter.trigger_low_credit("METER-01", 100_000, now_ms=30_000)
        assert record.body == "LOW CREDIT: meter METER-01 balance RM1.00"
        assert record.recipient == alerter.recipient
        assert record.submitted_ms == 30_000
        assert alerter.session.submissions == [(alerter.recipient, record.body)]

    def test_latency_in_range(self):
        alerter = GsmAlerter(seed=7)
        for i in range(100):
            record = alerter.trigger_low_credit("M", 50_000, now_ms=i * 10_000)
            latency = record.delivered_ms - record.submitted_ms
            assert 2_000 <= latency <= 3_000

    def test_latency_deterministic_per_seed(self):
        a = GsmAlerter(seed=123)
        b = GsmAlerter(seed=123)
        for i in range(20):
            ra = a.trigger_low_credit("M", 42, now_ms=i)
            rb = b.trigger_low_credit("M", 42, now_ms=i)
            assert ra.delivered_ms == rb.delivered_ms

    def test_delivered_filter(self):
        alerter = GsmAlerter(seed=1)
        record = alerter.trigger_low_credit("M", 1_000, now_ms=0)
        assert alerter.delivered(record.delivered_ms - 1) == []
        assert alerter.delivered(record.delivered_ms) == [record]


class TestBuzzer:
    def test_buzzer_follows_low_credit_state(self):
        """On in LowCredit; silent in Active and after cutoff."""
        tariff = TariffModel(1_000, 0)
        meter = PrepaidMeter("METER-01", UID, tariff)
        meter.present_card(CardImage(UID, KEY, 102_000))
        assert buzzer_state(meter.snapshot()) is False
        meter.tick(3_000, [])  # drains to 99 000, LowCredit
        assert meter.state is MeterState.LOW_CREDIT
        assert buzzer_state(meter.snapshot()) is True
        meter.tick(200_000, [])  # drains to zero, CutOff
        assert meter.state is MeterState.CUT_OFF
        assert buzzer_state(meter.snapshot()) is False
