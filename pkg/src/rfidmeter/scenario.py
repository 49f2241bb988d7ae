"""Scenario runner: depletion experiments sampled on a fixed schedule.

A scenario describes the starting credit, the tariff, a set of loads
and a sampling schedule. Each load runs against its own meter and card
(one metering point per appliance), ticking at tick_ms and recording a
sample every sample_period_s. Low-credit crossings raise SMS alerts
through an emulated GSM unit seeded from the scenario, so identical
seeds produce byte-identical reports.

Scenario and parameter files are plain line-delimited key=value text;
'#' starts a comment and loads repeat as `load=name,rated_w,measured_w,on`.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from .card import CardImage
from .gsm import GsmAlerter, SmsRecord
from .meter import (
    MeterEventKind,
    MeterState,
    PrepaidMeter,
    TariffModel,
    cutoff_time,
)
from .sensing import LoadSpec

_SCENARIO_CARD_KEY = bytes(8)


@dataclass(frozen=True)
class Scenario:
    initial_credit_msen: int
    tariff: TariffModel
    loads: tuple[LoadSpec, ...]
    duration_s: int
    sample_period_s: int
    seed: int = 0
    tick_ms: int = 100

    def __post_init__(self) -> None:
        if self.initial_credit_msen < 0:
            raise ValueError("initial_credit_msen must be non-negative")
        if not self.loads:
            raise ValueError("scenario needs at least one load")
        if self.duration_s <= 0 or self.sample_period_s <= 0:
            raise ValueError("duration_s and sample_period_s must be positive")
        if self.duration_s % self.sample_period_s != 0:
            raise ValueError("sample_period_s must divide duration_s")
        if self.tick_ms <= 0:
            raise ValueError("tick_ms must be positive")
        if (self.sample_period_s * 1000) % self.tick_ms != 0:
            raise ValueError("tick_ms must divide the sample period")


@dataclass(frozen=True)
class SamplePoint:
    t_s: int
    watts: float
    balance_msen: int
    state: MeterState


@dataclass
class LoadRun:
    """Everything observed for one load's independent meter run."""

    load: LoadSpec
    samples: list[SamplePoint] = field(default_factory=list)
    alerts: list[SmsRecord] = field(default_factory=list)
    cutoff_tick_s: float | None = None
    cutoff_closed_form_s: float | None = None
    final_balance_msen: int = 0


@dataclass
class ScenarioResult:
    scenario: Scenario
    sample_times_s: list[int]
    runs: dict[str, LoadRun]

    def render_table(self) -> str:
        """Wattage-over-time table, one column per load."""
        names = list(self.runs)
        header = ["Time (s)"] + [f"{n} (W)" for n in names]
        widths = [max(8, len(h)) for h in header]
        lines = ["  ".join(h.rjust(w) for h, w in zip(header, widths))]
        for row_index, t in enumerate(self.sample_times_s):
            cells = [str(t)] + [
                f"{self.runs[n].samples[row_index].watts:.1f}" for n in names
            ]
            lines.append("  ".join(c.rjust(w) for c, w in zip(cells, widths)))
        return "\n".join(lines)

    def render_series(self) -> str:
        """Machine-readable lines: t_s|load|watts|balance_msen|state."""
        lines = []
        for name, run in self.runs.items():
            for point in run.samples:
                lines.append(
                    f"{point.t_s}|{name}|{point.watts:.1f}"
                    f"|{point.balance_msen}|{point.state.value}"
                )
        return "\n".join(lines)

    def report(self) -> str:
        parts = [self.render_table(), ""]
        for name, run in self.runs.items():
            closed = (
                f"{run.cutoff_closed_form_s:.2f}s"
                if run.cutoff_closed_form_s is not None
                else "never"
            )
            observed = (
                f"{run.cutoff_tick_s:.1f}s" if run.cutoff_tick_s is not None else "none"
            )
            parts.append(
                f"{name}: cutoff closed-form {closed}, observed {observed}, "
                f"final balance {run.final_balance_msen} msen, "
                f"alerts {len(run.alerts)}"
            )
            for alert in run.alerts:
                parts.append(
                    f"  SMS to {alert.recipient} at +{alert.delivered_ms / 1000.0:.3f}s: "
                    f"{alert.body}"
                )
        return "\n".join(parts) + "\n"


def run_scenario(scenario: Scenario) -> ScenarioResult:
    """Run every load against its own meter and sample the schedule."""
    sample_times = list(
        range(scenario.sample_period_s, scenario.duration_s + 1, scenario.sample_period_s)
    )
    result = ScenarioResult(scenario, sample_times, {})

    for index, load_template in enumerate(scenario.loads):
        load = replace(load_template)
        uid = bytes([0xC0, 0xFE, 0x00, index])
        card = CardImage(uid, _SCENARIO_CARD_KEY, scenario.initial_credit_msen)
        meter = PrepaidMeter(f"METER-{load.name}", uid, scenario.tariff)
        meter.present_card(card)
        alerter = GsmAlerter(seed=scenario.seed + index)
        run = LoadRun(load=load)

        rate = scenario.tariff.standing_msen_per_s + scenario.tariff.energy_msen_per_j * (
            load.measured_w if load.switched_on else 0.0
        )
        if rate > 0:
            run.cutoff_closed_form_s = cutoff_time(
                scenario.initial_credit_msen,
                scenario.tariff,
                load.measured_w if load.switched_on else 0.0,
            )

        ticks_per_sample = (scenario.sample_period_s * 1000) // scenario.tick_ms
        for t_s in sample_times:
            snapshot = None
            for _ in range(ticks_per_sample):
                snapshot = meter.tick(scenario.tick_ms, [load])
                for event in meter.drain_events():
                    if event.kind is MeterEventKind.LOW_CREDIT:
                        run.alerts.append(
                            alerter.trigger_low_credit(
                                meter.meter_id, event.balance_msen, event.time_ms
                            )
                        )
                    elif run.cutoff_tick_s is None:
                        run.cutoff_tick_s = event.time_ms / 1000.0
            run.samples.append(
                SamplePoint(t_s, snapshot.power_w, snapshot.balance_msen, snapshot.state)
            )

        run.final_balance_msen = meter.balance_msen
        result.runs[load.name] = run

    return result


# -- key=value files ----------------------------------------------------------


def _keyvalue_lines(text: str) -> list[tuple[int, str, str]]:
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        entries.append((lineno, key.strip(), value.strip()))
    return entries


def _parse_load(value: str, lineno: int) -> LoadSpec:
    parts = [p.strip() for p in value.split(",")]
    if len(parts) != 4:
        raise ValueError(f"line {lineno}: load needs name,rated_w,measured_w,on|off")
    name, rated, measured, state = parts
    if state not in ("on", "off"):
        raise ValueError(f"line {lineno}: load state must be 'on' or 'off', got {state!r}")
    return LoadSpec(name, float(rated), float(measured), state == "on")


def parse_scenario(text: str) -> Scenario:
    """Build a Scenario from line-delimited key=value text."""
    values: dict[str, int] = {}
    loads: list[LoadSpec] = []
    int_keys = {
        "initial_credit_msen",
        "standing_msen_per_s",
        "energy_msen_per_j",
        "duration_s",
        "sample_period_s",
        "seed",
        "tick_ms",
    }
    for lineno, key, value in _keyvalue_lines(text):
        if key == "load":
            loads.append(_parse_load(value, lineno))
        elif key in int_keys:
            try:
                values[key] = int(value)
            except ValueError:
                raise ValueError(f"line {lineno}: {key} must be an integer") from None
        else:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
    required = {
        "initial_credit_msen",
        "standing_msen_per_s",
        "energy_msen_per_j",
        "duration_s",
        "sample_period_s",
    }
    missing = sorted(required - values.keys())
    if missing:
        raise ValueError(f"scenario is missing keys: {', '.join(missing)}")
    return Scenario(
        initial_credit_msen=values["initial_credit_msen"],
        tariff=TariffModel(values["standing_msen_per_s"], values["energy_msen_per_j"]),
        loads=tuple(loads),
        duration_s=values["duration_s"],
        sample_period_s=values["sample_period_s"],
        seed=values.get("seed", 0),
        tick_ms=values.get("tick_ms", 100),
    )


def parse_params(text: str) -> tuple[int, TariffModel]:
    """Read (initial credit, tariff) from key=value text."""
    values: dict[str, int] = {}
    allowed = {"initial_credit_msen", "standing_msen_per_s", "energy_msen_per_j"}
    for lineno, key, value in _keyvalue_lines(text):
        if key not in allowed:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
        try:
            values[key] = int(value)
        except ValueError:
            raise ValueError(f"line {lineno}: {key} must be an integer") from None
    missing = sorted(allowed - values.keys())
    if missing:
        raise ValueError(f"params file is missing keys: {', '.join(missing)}")
    return values["initial_credit_msen"], TariffModel(
        values["standing_msen_per_s"], values["energy_msen_per_j"]
    )
