"""Desk-scale simulator of an RFID prepaid power metering system.

The pieces mirror the hardware they stand in for: a contactless card
and its ASK reader link (`frames`, `modem`, `card`, `link`), a shunt
current sensing chain (`sensing`), the prepaid meter itself (`meter`),
a GSM alert module (`gsm`), the vending-point top-up workflow with its
append-only credit ledger (`topup`, `ledger`), the wired installation
and its HTTP surface (`system`, `http_api`), and the experiment harness
(`scenario`, `depletion`).
"""

from .card import CardImage, CardSession, card_transact
from .depletion import (
    DEFAULT_INITIAL_CREDIT_MSEN,
    DEFAULT_TARIFF,
    REFERENCE_BULBS,
    REFERENCE_WINDOWS,
    ReplicationResult,
    calibrate_params,
    cutoffs_in_windows,
    replicate_reference,
)
from .frames import (
    Frame,
    FrameCommand,
    FrameError,
    crc16_ccitt_false,
    decode_frame,
    encode_frame,
)
from .gsm import GsmAlerter, ModemSession, SmsRecord, buzzer_state, handle_at
from .ledger import Ledger, LedgerError, LedgerKind, LedgerRecord, replay
from .link import AskLink, CardReader
from .meter import (
    DeductionAccumulator,
    MeterSnapshot,
    MeterState,
    PrepaidMeter,
    TariffModel,
    cutoff_time,
    render_lcd,
)
from .modem import AskConfig, demodulate, modulate
from .scenario import Scenario, ScenarioResult, parse_scenario, run_scenario
from .sensing import LoadSpec, ShuntModel, calibrate, load_current, measured_power, shunt_voltage
from .system import MeterSystem, SystemConfig
from .topup import TopupSession, TopupStep, TopupWorkflow, WorkflowError

__version__ = "0.1.0"
