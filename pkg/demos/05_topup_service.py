"""Stand the whole installation up behind HTTP and buy some credit.

Boots the metering service on an ephemeral port with an empty ledger,
walks the four-step vending wizard over plain urllib, watches the LCD
move, and finishes by replaying the on-disk ledger to prove the books
balance.

Run from the repo root:  python3 demos/05_topup_service.py
"""

import json
import tempfile
import urllib.request
from pathlib import Path

from rfidmeter.http_api import ServiceRunner
from rfidmeter.ledger import replay
from rfidmeter.modem import AskConfig
from rfidmeter.system import MeterSystem, SystemConfig

FAST_LINK = AskConfig(carrier_hz=125_000, sample_rate_hz=1_000_000, baud=125_000)


def call(port: int, path: str, payload: dict | None = None) -> dict:
    data = json.dumps(payload).encode() if payload is not None else None
    req = urllib.request.Request(f"http://127.0.0.1:{port}{path}", data=data)
    with urllib.request.urlopen(req, timeout=5) as resp:
        return json.loads(resp.read())


def main() -> None:
    with tempfile.TemporaryDirectory() as tmp:
        ledger_path = Path(tmp) / "ledger.log"
        system = MeterSystem(
            SystemConfig(initial_credit_msen=150_000), ledger_path, ask_config=FAST_LINK
        )
        runner = ServiceRunner(system, port=0, tick_ms=100)
        runner.start()
        port = runner.port
        print(f"service up on 127.0.0.1:{port}, ledger at {ledger_path.name}")

        state = call(port, "/meter/state")
        print(f"\nLCD before: [{state['lcd'][0]}] [{state['lcd'][1]}]")

        print("\n== four-step vending wizard ==")
        step = call(port, "/topup/activate", {})
        print(f"  1 activate      -> {step['step']}")
        step = call(port, "/topup/authenticate",
                    {"uid": "a1b2c3d4", "key": "0011223344556677"})
        print(f"  2 authenticate  -> {step['step']}")
        step = call(port, "/topup/balance")
        print(f"  3 read balance  -> {step['step']}, {step['balance_msen']} msen on card")
        step = call(port, "/topup/amount", {"amount_msen": 350_000})
        print(f"  4 write amount  -> {step['step']}, card now {step['balance_msen']} msen")

        state = call(port, "/meter/state")
        print(f"\nLCD after:  [{state['lcd'][0]}] [{state['lcd'][1]}]")

        call(port, "/loads/bulb60/switch", {"on": True})
        import time
        time.sleep(0.5)  # let the background ticker meter a few rounds
        state = call(port, "/meter/state")
        print(f"bulb60 on:  [{state['lcd'][0]}] [{state['lcd'][1]}]  "
              f"state {state['state']}")

        runner.stop()
        system.close()

        balances = replay(ledger_path)
        print(f"\nledger replay: card a1b2c3d4 ends at {balances[bytes.fromhex('a1b2c3d4')]} msen")
        print(f"live balance at shutdown:      {state['balance_msen']} msen (before the last ticks)")
        with open(ledger_path, encoding="ascii") as fh:
            lines = fh.read().splitlines()
        print(f"{len(lines)} ledger records, first: {lines[0]}")


if __name__ == "__main__":
    main()
