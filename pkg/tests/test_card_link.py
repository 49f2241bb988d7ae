"""Card transaction logic and the reader link that carries it over ASK."""

import random

import pytest

from rfidmeter.card import (
    NAK_BAD_AUTH,
    NAK_BAD_REQUEST,
    NAK_NOT_AUTHENTICATED,
    NAK_UID_MISMATCH,
    CardImage,
    CardSession,
    card_transact,
)
from rfidmeter.frames import Frame, FrameCommand, pack_balance
from rfidmeter.link import AskLink, CardReader
from rfidmeter.modem import AskConfig

UID = bytes.fromhex("a1b2c3d4")
KEY = bytes.fromhex("0011223344556677")

FAST_LINK = AskConfig(carrier_hz=125_000, sample_rate_hz=1_000_000, baud=125_000)


def make_card(balance=500_000):
    return CardImage(UID, KEY, balance)


class TestCardImage:
    def test_field_validation(self):
        with pytest.raises(ValueError):
            CardImage(b"\x01", KEY)
        with pytest.raises(ValueError):
            CardImage(UID, b"\x00")
        with pytest.raises(ValueError):
            CardImage(UID, KEY, balance_msen=-1)


class TestAuth:
    def test_success_unlocks_session(self):
        card, session = make_card(), CardSession()
        reply = card_transact(card, Frame(FrameCommand.AUTH, UID + KEY), session)
        assert reply.cmd is FrameCommand.ACK
        assert session.authenticated

    def test_wrong_uid_naks(self):
        card, session = make_card(), CardSession()
        reply = card_transact(card, Frame(FrameCommand.AUTH, b"\xde\xad\xbe\xef" + KEY), session)
        assert reply.cmd is FrameCommand.NAK
        assert reply.payload == bytes([NAK_BAD_AUTH])
        assert not session.authenticated

    def test_wrong_key_naks(self):
        card, session = make_card(), CardSession()
        reply = card_transact(card, Frame(FrameCommand.AUTH, UID + bytes(8)), session)
        assert reply.cmd is FrameCommand.NAK
        assert not session.authenticated

    def test_short_payload_naks(self):
        card, session = make_card(), CardSession()
        reply = card_transact(card, Frame(FrameCommand.AUTH, UID), session)
        assert reply.payload == bytes([NAK_BAD_REQUEST])


class TestReadBalance:
    def test_read_without_auth(self):
        """Balance reads are open to the matching uid."""
        card, session = make_card(426_500), CardSession()
        reply = card_transact(card, Frame(FrameCommand.READ_BAL, UID), session)
        assert reply.cmd is FrameCommand.ACK
        assert reply.payload == pack_balance(426_500)

    def test_uid_mismatch(self):
        card, session = make_card(), CardSession()
        reply = card_transact(card, Frame(FrameCommand.READ_BAL, b"\x00\x00\x00\x00"), session)
        assert reply.cmd is FrameCommand.NAK
        assert reply.payload == bytes([NAK_UID_MISMATCH])


class TestWriteBalance:
    def test_write_requires_auth(self):
        card, session = make_card(100), CardSession()
        reply = card_transact(card, Frame(FrameCommand.WRITE_BAL, pack_balance(999)), session)
        assert reply.cmd is FrameCommand.NAK
        assert reply.payload == bytes([NAK_NOT_AUTHENTICATED])
        assert card.balance_msen == 100

    def test_last_write_wins(self):
        """The stored balance is exactly the last value written."""
        card, session = make_card(0), CardSession()
        card_transact(card, Frame(FrameCommand.AUTH, UID + KEY), session)
        for value in (500_000, 10, 123_456):
            reply = card_transact(card, Frame(FrameCommand.WRITE_BAL, pack_balance(value)), session)
            assert reply.cmd is FrameCommand.ACK
            assert card.balance_msen == value

    def test_bad_payload_length_naks(self):
        card, session = make_card(77), CardSession()
        card_transact(card, Frame(FrameCommand.AUTH, UID + KEY), session)
        reply = card_transact(card, Frame(FrameCommand.WRITE_BAL, b"\x01\x02"), session)
        assert reply.cmd is FrameCommand.NAK
        assert card.balance_msen == 77

    def test_nak_paths_never_change_balance(self):
        """Random traffic on an unauthenticated session leaves the credit untouched."""
        rng = random.Random(21)
        card, session = make_card(314_159), CardSession()
        for _ in range(500):
            cmd = rng.choice(list(FrameCommand))
            payload = bytes(rng.randrange(256) for _ in range(rng.randrange(16)))
            # a randomly correct AUTH payload is astronomically unlikely;
            # skip AUTH so the session provably stays locked
            if cmd is FrameCommand.AUTH:
                payload = bytes(len(payload))
            reply = card_transact(card, Frame(cmd, payload), session)
            if cmd is not FrameCommand.READ_BAL:
                assert reply.cmd is FrameCommand.NAK
            assert card.balance_msen == 314_159
        assert not session.authenticated


class TestCardReader:
    def test_full_transaction_over_the_air(self):
        """AUTH, READ_BAL and WRITE_BAL all travel the modulated link."""
        reader = CardReader(make_card(500_000), AskLink(FAST_LINK))
        assert reader.transact(FrameCommand.AUTH, UID + KEY).cmd is FrameCommand.ACK
        read = reader.transact(FrameCommand.READ_BAL, UID)
        assert read.payload == pack_balance(500_000)
        written = reader.transact(FrameCommand.WRITE_BAL, pack_balance(750_000))
        assert written.cmd is FrameCommand.ACK
        assert reader.card.balance_msen == 750_000

    def test_noisy_link_still_clean(self):
        """Channel noise inside the design margin does not corrupt frames."""
        link = AskLink(FAST_LINK, noise_amplitude=0.2)
        reader = CardReader(make_card(500_000), link)
        for _ in range(50):
            reply = reader.transact(FrameCommand.READ_BAL, UID)
            assert reply.cmd is FrameCommand.ACK
            assert reply.payload == pack_balance(500_000)

    def test_reset_session_locks_writes_again(self):
        reader = CardReader(make_card(1), AskLink(FAST_LINK))
        reader.transact(FrameCommand.AUTH, UID + KEY)
        reader.reset_session()
        reply = reader.transact(FrameCommand.WRITE_BAL, pack_balance(5))
        assert reply.cmd is FrameCommand.NAK
