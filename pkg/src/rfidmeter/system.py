"""One fully wired metering installation.

Composes the card, the ASK reader link, the prepaid meter, the load
bank, the GSM alert unit, the vending workflow and the credit ledger,
and exposes the operations the HTTP surface needs. Every mutation runs
under one lock, so concurrent HTTP handlers and the background ticker
serialize cleanly.

The card sits in the reader the whole time: after every tick the
meter's working balance is written back to the card image, so a balance
read during vending always sees live credit. On a fresh ledger the
boot credit is logged as the card's first TOPUP record, which keeps
`ledger.replay` equal to the live balance at all times.
"""

from __future__ import annotations

import threading
from collections import deque
from dataclasses import dataclass, field, replace

from .card import CardImage
from .gsm import DEFAULT_RECIPIENT, GsmAlerter
from .ledger import Ledger, LedgerKind, LedgerRecord, replay
from .link import AskLink, CardReader
from .meter import (
    MeterEventKind,
    MeterSnapshot,
    MeterState,
    PrepaidMeter,
    TariffModel,
)
from .modem import AskConfig
from .sensing import LoadSpec
from .topup import TopupSession, TopupWorkflow, WorkflowError

EVENT_RETENTION = 10_000


@dataclass
class SystemConfig:
    """Everything needed to stand up one installation."""

    meter_id: str = "METER-01"
    card_uid: bytes = bytes.fromhex("a1b2c3d4")
    card_key: bytes = bytes.fromhex("0011223344556677")
    initial_credit_msen: int = 0
    tariff: TariffModel = field(
        default_factory=lambda: TariffModel(standing_msen_per_s=9_000, energy_msen_per_j=100)
    )
    loads: tuple[LoadSpec, ...] = (
        LoadSpec("bulb60", rated_w=60, measured_w=57, switched_on=False),
        LoadSpec("bulb25", rated_w=25, measured_w=24, switched_on=False),
        LoadSpec("bulb15", rated_w=15, measured_w=14, switched_on=False),
    )
    sms_recipient: str = DEFAULT_RECIPIENT
    seed: int = 0


def snapshot_to_dict(snapshot: MeterSnapshot) -> dict:
    return {
        "time_ms": snapshot.time_ms,
        "state": snapshot.state.value,
        "balance_msen": snapshot.balance_msen,
        "power_w": snapshot.power_w,
        "total_energy_j": snapshot.total_energy_j,
        "relay_closed": snapshot.relay_closed,
        "lcd": list(snapshot.lcd),
        "buzzer_on": snapshot.buzzer_on,
    }


def record_to_dict(record: LedgerRecord) -> dict:
    return {
        "seq": record.seq,
        "time_ms": record.time_ms,
        "card_uid": record.card_uid.hex(),
        "kind": record.kind.value,
        "amount_msen": record.amount_msen,
        "balance_after_msen": record.balance_after_msen,
    }


class MeterSystem:
    """The live simulation behind the HTTP endpoints."""

    def __init__(
        self,
        config: SystemConfig,
        ledger_path: str,
        ask_config: AskConfig | None = None,
    ) -> None:
        self.config = config
        self.lock = threading.RLock()
        self.clock_ms = 0
        self.loads = [replace(load) for load in config.loads]

        self.card = CardImage(config.card_uid, config.card_key, balance_msen=0)
        link = AskLink(ask_config) if ask_config is not None else AskLink()
        self.reader = CardReader(self.card, link)
        self.meter = PrepaidMeter(config.meter_id, config.card_uid, config.tariff)
        self.gsm = GsmAlerter(config.sms_recipient, seed=config.seed)
        self.ledger = Ledger(ledger_path)
        self.workflow = TopupWorkflow(
            self.reader, self.meter, self.ledger, clock_ms=lambda: self.clock_ms
        )
        self.topup_session: TopupSession | None = None

        self._events: deque[dict] = deque(maxlen=EVENT_RETENTION)
        self._event_seq = 0
        self._announced_sms: set[int] = set()

        if self.ledger.records:
            # resuming an existing ledger: the file is the source of truth,
            # and the clock picks up where the last record left off so
            # timestamps never run backwards
            balances = replay(ledger_path)
            self.card.balance_msen = balances.get(self.card.uid, 0)
            self.clock_ms = self.ledger.records[-1].time_ms
        elif config.initial_credit_msen > 0:
            self.card.balance_msen = config.initial_credit_msen
            self.ledger.append(
                0, self.card.uid, LedgerKind.TOPUP,
                config.initial_credit_msen, config.initial_credit_msen,
            )
        self.meter.present_card(self.card)
        self._emit("snapshot", self._snapshot_data())

    # -- time ---------------------------------------------------------------

    def advance(self, dt_ms: int) -> MeterSnapshot:
        """Run one tick: meter the loads, log, alert, publish events."""
        with self.lock:
            self.clock_ms += dt_ms
            snapshot = self.meter.tick(dt_ms, self.loads)
            self.card.balance_msen = self.meter.balance_msen
            if self.meter.last_deducted_msen > 0:
                record = self.ledger.append(
                    self.clock_ms, self.card.uid, LedgerKind.DEDUCT,
                    self.meter.last_deducted_msen, self.meter.balance_msen,
                )
                self._emit("ledger", record_to_dict(record))
            for event in self.meter.drain_events():
                if event.kind is MeterEventKind.LOW_CREDIT:
                    record = self.ledger.append(
                        self.clock_ms, self.card.uid, LedgerKind.ALERT, 0, self.meter.balance_msen
                    )
                    self._emit("ledger", record_to_dict(record))
                    self.gsm.trigger_low_credit(
                        self.meter.meter_id, event.balance_msen, self.clock_ms
                    )
                else:
                    record = self.ledger.append(
                        self.clock_ms, self.card.uid, LedgerKind.CUTOFF, 0, self.meter.balance_msen
                    )
                    self._emit("ledger", record_to_dict(record))
            self._announce_deliveries()
            self._emit("snapshot", self._snapshot_data())
            return snapshot

    # -- operator surface ---------------------------------------------------

    def meter_state(self) -> dict:
        with self.lock:
            return self._snapshot_data()

    def switch_load(self, name: str, on: bool) -> dict:
        with self.lock:
            for load in self.loads:
                if load.name == name:
                    load.switched_on = bool(on)
                    self._emit("snapshot", self._snapshot_data())
                    return {"name": load.name, "switched_on": load.switched_on}
            raise KeyError(f"no load named {name!r}")

    def sms_inbox(self) -> list[dict]:
        with self.lock:
            return [
                {
                    "recipient": r.recipient,
                    "body": r.body,
                    "submitted_ms": r.submitted_ms,
                    "delivered_ms": r.delivered_ms,
                }
                for r in self.gsm.delivered(self.clock_ms)
            ]

    def events_since(self, since: int) -> dict:
        with self.lock:
            events = [e for e in self._events if e["seq"] > since]
            return {"events": events, "next": self._event_seq}

    # -- vending surface ----------------------------------------------------

    def topup_activate(self) -> dict:
        with self.lock:
            self.topup_session = TopupSession()
            self.workflow.activate_writer(self.topup_session)
            return {"step": self.topup_session.step.value}

    def topup_authenticate(self, uid: bytes, key: bytes) -> dict:
        with self.lock:
            session = self._require_session()
            self.workflow.authenticate(session, uid, key)
            return {"step": session.step.value}

    def topup_read_balance(self) -> dict:
        with self.lock:
            session = self._require_session()
            balance = self.workflow.read_balance(session)
            return {"step": session.step.value, "balance_msen": balance}

    def topup_amount(self, amount_msen: int) -> dict:
        with self.lock:
            session = self._require_session()
            balance, record = self.workflow.do_topup(session, amount_msen)
            self._emit("ledger", record_to_dict(record))
            self._emit("snapshot", self._snapshot_data())
            return {"step": session.step.value, "balance_msen": balance}

    def close(self) -> None:
        self.ledger.close()

    # -- internals ------------------------------------------------------------

    def _require_session(self) -> TopupSession:
        if self.topup_session is None:
            raise WorkflowError("no vending session; activate the writer first")
        return self.topup_session

    def _snapshot_data(self) -> dict:
        data = snapshot_to_dict(self.meter.snapshot())
        data["meter_id"] = self.meter.meter_id
        data["loads"] = [
            {
                "name": load.name,
                "rated_w": load.rated_w,
                "measured_w": load.measured_w,
                "switched_on": load.switched_on,
            }
            for load in self.loads
        ]
        return data

    def _announce_deliveries(self) -> None:
        for index, record in enumerate(self.gsm.records):
            if record.delivered_ms <= self.clock_ms and index not in self._announced_sms:
                self._announced_sms.add(index)
                self._emit(
                    "sms",
                    {
                        "recipient": record.recipient,
                        "body": record.body,
                        "submitted_ms": record.submitted_ms,
                        "delivered_ms": record.delivered_ms,
                    },
                )

    def _emit(self, kind: str, data: dict) -> None:
        self._event_seq += 1
        self._events.append(
            {"seq": self._event_seq, "time_ms": self.clock_ms, "type": kind, "data": data}
        )
