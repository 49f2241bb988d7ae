"""Command line front door over the library functions.

Subcommands:

    simulate  --scenario <file>      run a key=value scenario, print the report
    table1    [--params <file>]      replay the reference depletion experiment
    calibrate [--grid coarse|fine]   search tariffs that fit the cutoff windows
    serve     --port <n> --ledger <path>   run the live HTTP service
"""

from __future__ import annotations

import argparse
import sys

from .depletion import (
    DEFAULT_TARIFF,
    calibrate_params,
    replicate_reference,
)
from .http_api import ServiceRunner
from .scenario import parse_params, parse_scenario, run_scenario
from .system import MeterSystem, SystemConfig


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="rfidmeter",
        description="Prepaid RFID power metering simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run a scenario file and print its report")
    p_sim.add_argument("--scenario", required=True, help="key=value scenario file")

    p_table = sub.add_parser(
        "table1", help="replay the reference three-bulb depletion experiment"
    )
    p_table.add_argument("--params", help="key=value file overriding credit and tariff")

    p_cal = sub.add_parser(
        "calibrate", help="grid-search tariffs against the reference cutoff windows"
    )
    p_cal.add_argument("--grid", choices=("coarse", "fine"), default="coarse")
    p_cal.add_argument(
        "--tariff-only",
        action="store_true",
        help="pin the standing charge to 0 (negative control)",
    )

    p_serve = sub.add_parser("serve", help="run the HTTP service")
    p_serve.add_argument("--port", type=int, required=True)
    p_serve.add_argument("--ledger", required=True, help="credit ledger file path")
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--tick-ms", type=int, default=100)
    p_serve.add_argument("--initial-credit-msen", type=int, default=0)
    p_serve.add_argument("--seed", type=int, default=0)
    p_serve.add_argument("--console", help="directory of operator console files to serve at /")

    args = parser.parse_args(argv)

    if args.command == "simulate":
        with open(args.scenario, "r", encoding="utf-8") as fh:
            scenario = parse_scenario(fh.read())
        print(run_scenario(scenario).report(), end="")
        return 0

    if args.command == "table1":
        credit, tariff = 500_000, DEFAULT_TARIFF
        if args.params:
            with open(args.params, "r", encoding="utf-8") as fh:
                credit, tariff = parse_params(fh.read())
        result = replicate_reference(credit, tariff)
        print(result.report, end="")
        return 0 if result.passed else 1

    if args.command == "calibrate":
        triples = calibrate_params(refine=args.grid == "fine", tariff_only=args.tariff_only)
        print(f"feasible (credit_msen, standing_msen_per_s, energy_msen_per_j): {len(triples)}")
        shown = triples if len(triples) <= 50 else triples[:50]
        for triple in shown:
            print(f"  {triple[0]} {triple[1]} {triple[2]}")
        if len(triples) > len(shown):
            print(f"  ... {len(triples) - len(shown)} more")
        return 0 if triples or args.tariff_only else 1

    if args.command == "serve":
        config = SystemConfig(initial_credit_msen=args.initial_credit_msen, seed=args.seed)
        system = MeterSystem(config, args.ledger)
        runner = ServiceRunner(
            system,
            port=args.port,
            host=args.host,
            console_dir=args.console,
            tick_ms=args.tick_ms,
        )
        print(f"metering service on http://{args.host}:{runner.port} "
              f"(ledger: {args.ledger}, tick {args.tick_ms} ms)")
        sys.stdout.flush()
        runner.run_forever()
        return 0

    return 2


if __name__ == "__main__":
    sys.exit(main())
