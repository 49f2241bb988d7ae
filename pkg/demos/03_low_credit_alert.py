"""Drain a meter through the low-credit alarm and out the other side.

The buzzer and one SMS fire when credit crosses RM 1, supply dies at
zero, and a top-up brings everything back. The SMS leaves through an
emulated AT-command modem; the full dialogue is printed.

Run from the repo root:  python3 demos/03_low_credit_alert.py
"""

from rfidmeter.card import CardImage
from rfidmeter.gsm import GsmAlerter, ModemSession, handle_at
from rfidmeter.meter import MeterEventKind, PrepaidMeter, TariffModel
from rfidmeter.sensing import LoadSpec

UID = bytes.fromhex("a1b2c3d4")
KEY = bytes.fromhex("0011223344556677")


def main() -> None:
    print("== the AT dialogue, byte for byte ==")
    modem = ModemSession()
    for line in (b"AT\r", b'AT+CMGF=1\r', b'AT+CMGS="+60123456789"\r'):
        print(f"  >> {line!r}")
        print(f"  << {handle_at(modem, line)!r}")
    body = b"LOW CREDIT: meter METER-01 balance RM1.00\x1a"
    print(f"  >> {body!r}")
    print(f"  << {handle_at(modem, body)!r}")

    print("\n== live drain ==")
    meter = PrepaidMeter("METER-01", UID, TariffModel(9_000, 100))
    card = CardImage(UID, KEY, balance_msen=150_000)
    meter.present_card(card)
    alerter = GsmAlerter(seed=42)
    heater = [LoadSpec("heater", 60, 57, switched_on=True)]

    t_ms = 0
    while meter.relay_closed:
        snapshot = meter.tick(100, heater)
        t_ms += 100
        for event in meter.drain_events():
            if event.kind is MeterEventKind.LOW_CREDIT:
                record = alerter.trigger_low_credit(meter.meter_id, event.balance_msen, t_ms)
                print(f"  t={t_ms / 1000:4.1f}s  balance {event.balance_msen} msen, "
                      f"buzzer ON, SMS submitted")
                print(f"           \"{record.body}\" -> {record.recipient}")
                print(f"           delivery due {record.delivered_ms - record.submitted_ms} ms later")
            if event.kind is MeterEventKind.CUT_OFF:
                print(f"  t={t_ms / 1000:4.1f}s  balance 0, relay OPEN, load dark")

    delivered = alerter.delivered(t_ms + 3_000)
    print(f"  {len(delivered)} SMS delivered, exactly one per crossing")

    print("\n== top-up from the dark ==")
    meter.apply_topup(card, 500_000)
    snapshot = meter.tick(100, heater)
    print(f"  +RM 5.00 -> state {snapshot.state.value}, relay closed, "
          f"drawing {snapshot.power_w:.1f} W again")


if __name__ == "__main__":
    main()
