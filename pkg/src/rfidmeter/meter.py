"""Prepaid meter: credit store, relay control, LCD and the billing rule.

All money is integer milli-sen (1 RM = 100 000 msen). Each tick owes

    standing_msen_per_s * dt  +  energy_msen_per_j * P * dt

which is computed exactly in micro-sen; whole milli-sen are deducted and
the sub-msen remainder is carried in an accumulator, so the total charge
is independent of how a time span is split into ticks (to within one
micro-sen per tick for fractional wattages).

State machine: Idle (no card yet), Active, LowCredit (balance at or
under RM 1), CutOff (balance exhausted). The relay is closed exactly in
Active and LowCredit; the buzzer sounds exactly in LowCredit. A low
credit alert fires once per downward crossing of the threshold and is
re-armed only when a top-up lifts the balance back above it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

from .card import CardImage
from .sensing import LoadSpec

MSEN_PER_RM = 100_000
USEN_PER_MSEN = 1_000
LOW_CREDIT_THRESHOLD_MSEN = 100_000  # RM 1
LCD_WIDTH = 16


class MeterState(Enum):
    IDLE = "Idle"
    ACTIVE = "Active"
    LOW_CREDIT = "LowCredit"
    CUT_OFF = "CutOff"


class MeterError(Exception):
    """Base class for meter rejections."""


class MeterStateError(MeterError):
    """Operation not allowed in the current state."""


class ForeignCardError(MeterError):
    """Presented card does not match the bound account."""


@dataclass(frozen=True)
class TariffModel:
    """Affine deduction rate: a standing charge plus an energy charge."""

    standing_msen_per_s: int
    energy_msen_per_j: int

    def __post_init__(self) -> None:
        if self.standing_msen_per_s < 0 or self.energy_msen_per_j < 0:
            raise ValueError("tariff components must be non-negative")
        if self.standing_msen_per_s == 0 and self.energy_msen_per_j == 0:
            raise ValueError("tariff must have a positive deduction rate")


@dataclass
class DeductionAccumulator:
    """Carries the sub-milli-sen remainder between ticks."""

    residue_usen: int = 0

    def add(self, owed_usen: int) -> int:
        """Absorb micro-sen owed; return the whole milli-sen now due."""
        total = self.residue_usen + owed_usen
        self.residue_usen = total % USEN_PER_MSEN
        return total // USEN_PER_MSEN


class MeterEventKind(Enum):
    LOW_CREDIT = "low_credit"
    CUT_OFF = "cut_off"


@dataclass(frozen=True)
class MeterEvent:
    kind: MeterEventKind
    time_ms: int
    balance_msen: int


@dataclass(frozen=True)
class MeterSnapshot:
    time_ms: int
    state: MeterState
    balance_msen: int
    power_w: float
    total_energy_j: float
    relay_closed: bool
    lcd: tuple[str, str]
    buzzer_on: bool


def _lcd_lines(balance_msen: int, power_w: float) -> tuple[str, str]:
    # credit rounds down to whole sen before display
    credit_rm = (balance_msen // USEN_PER_MSEN) / 100.0
    line1 = "Credit:RM%6.2f" % credit_rm
    line2 = "Power:%7.1fW" % power_w
    return line1.ljust(LCD_WIDTH)[:LCD_WIDTH], line2.ljust(LCD_WIDTH)[:LCD_WIDTH]


def render_lcd(snapshot: MeterSnapshot) -> tuple[str, str]:
    """The two 16-character display lines for a snapshot."""
    return _lcd_lines(snapshot.balance_msen, snapshot.power_w)


def tick_owed_usen(tariff: TariffModel, power_w: float, dt_ms: int) -> int:
    """Exact micro-sen owed for one tick, floored to a whole micro-sen.

    Integral wattages stay on the integer fast path; fractional wattages
    go through Fraction so no float rounding leaks into billing.
    """
    standing = tariff.standing_msen_per_s * dt_ms
    if power_w == 0.0 or tariff.energy_msen_per_j == 0:
        return standing
    if float(power_w).is_integer():
        return standing + tariff.energy_msen_per_j * int(power_w) * dt_ms
    energy_part = Fraction(power_w) * (tariff.energy_msen_per_j * dt_ms)
    return standing + math.floor(energy_part)


def cutoff_time(initial_credit_msen: int, tariff: TariffModel, power_w: float) -> float:
    """Closed-form seconds until the credit is exhausted at constant power."""
    if initial_credit_msen < 0:
        raise ValueError("initial credit must be non-negative")
    rate_msen_per_s = tariff.standing_msen_per_s + tariff.energy_msen_per_j * power_w
    if rate_msen_per_s <= 0:
        raise ValueError("deduction rate is zero, credit never runs out")
    return initial_credit_msen / rate_msen_per_s


class PrepaidMeter:
    """One metering point bound to one card account."""

    def __init__(
        self,
        meter_id: str,
        bound_uid: bytes,
        tariff: TariffModel,
        low_credit_threshold_msen: int = LOW_CREDIT_THRESHOLD_MSEN,
    ) -> None:
        self.meter_id = meter_id
        self.bound_uid = bytes(bound_uid)
        self.tariff = tariff
        self.low_credit_threshold_msen = low_credit_threshold_msen
        self.state = MeterState.IDLE
        self.balance_msen = 0
        self.time_ms = 0
        self.total_energy_j = 0.0
        self.accumulator = DeductionAccumulator()
        self.last_deducted_msen = 0
        self._last_power_w = 0.0
        self._alert_armed = False
        self._events: list[MeterEvent] = []

    @property
    def relay_closed(self) -> bool:
        return self.state in (MeterState.ACTIVE, MeterState.LOW_CREDIT)

    @property
    def buzzer_on(self) -> bool:
        return self.state is MeterState.LOW_CREDIT

    def present_card(self, card: CardImage) -> MeterState:
        """Validate a card and adopt its credit; only from Idle or CutOff."""
        if self.state not in (MeterState.IDLE, MeterState.CUT_OFF):
            raise MeterStateError(f"cannot present a card while {self.state.value}")
        if card.uid != self.bound_uid:
            raise ForeignCardError("foreign card: uid does not match the bound account")
        self.balance_msen = card.balance_msen
        self._alert_armed = self.balance_msen > self.low_credit_threshold_msen
        if self.balance_msen == 0:
            self.state = MeterState.CUT_OFF
        else:
            self.state = MeterState.ACTIVE
        return self.state

    def tick(self, dt_ms: int, loads: Sequence[LoadSpec]) -> MeterSnapshot:
        """Advance time, meter the switched-on loads and deduct credit."""
        if dt_ms < 0:
            raise ValueError("dt_ms must be non-negative")
        if self.state is MeterState.IDLE:
            raise MeterStateError("cannot tick an idle meter")

        power_w = (
            float(sum(load.measured_w for load in loads if load.switched_on))
            if self.relay_closed
            else 0.0
        )
        energy_j = power_w * (dt_ms / 1000.0)
        owed_usen = tick_owed_usen(self.tariff, power_w, dt_ms) if self.relay_closed else 0
        due_msen = self.accumulator.add(owed_usen)
        deducted = min(due_msen, self.balance_msen)

        previous_balance = self.balance_msen
        self.balance_msen -= deducted
        self.total_energy_j += energy_j
        self.time_ms += dt_ms
        self.last_deducted_msen = deducted

        crossed_down = (
            previous_balance > self.low_credit_threshold_msen
            and self.balance_msen <= self.low_credit_threshold_msen
        )
        if crossed_down and self._alert_armed:
            self._alert_armed = False
            self._events.append(
                MeterEvent(MeterEventKind.LOW_CREDIT, self.time_ms, self.balance_msen)
            )

        if self.balance_msen == 0:
            if self.state is not MeterState.CUT_OFF:
                self._events.append(
                    MeterEvent(MeterEventKind.CUT_OFF, self.time_ms, 0)
                )
            self.state = MeterState.CUT_OFF
        elif self.balance_msen <= self.low_credit_threshold_msen:
            self.state = MeterState.LOW_CREDIT
        else:
            self.state = MeterState.ACTIVE

        self._last_power_w = power_w if self.relay_closed else 0.0
        return self.snapshot()

    def apply_topup(self, card: CardImage, amount_msen: int) -> int:
        """Credit the account; restores supply after a cutoff."""
        if card.uid != self.bound_uid:
            raise ForeignCardError("foreign card: uid does not match the bound account")
        if amount_msen <= 0:
            raise ValueError("top-up amount must be positive")
        if self.state is MeterState.IDLE:
            raise MeterStateError("no card has been presented to this meter")
        self.balance_msen += amount_msen
        if self.state is MeterState.CUT_OFF:
            self.state = MeterState.ACTIVE
        if self.balance_msen > self.low_credit_threshold_msen:
            self.state = MeterState.ACTIVE
            self._alert_armed = True
        return self.balance_msen

    def drain_events(self) -> list[MeterEvent]:
        """Return and clear the alert/cutoff events since the last drain."""
        events, self._events = self._events, []
        return events

    def snapshot(self) -> MeterSnapshot:
        power_w = self._last_power_w if self.relay_closed else 0.0
        return MeterSnapshot(
            time_ms=self.time_ms,
            state=self.state,
            balance_msen=self.balance_msen,
            power_w=power_w,
            total_energy_j=self.total_energy_j,
            relay_closed=self.relay_closed,
            lcd=_lcd_lines(self.balance_msen, power_w),
            buzzer_on=self.buzzer_on,
        )
