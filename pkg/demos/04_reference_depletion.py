"""Replay the three-bulb depletion experiment and hunt for its tariff.

Three bulbs (57/24/14 W measured) start on RM 5 of credit each and are
sampled every 5 s. The published record only shows when each column of
wattages goes to zero, so the billing parameters have to be recovered
by searching for every (credit, standing, per-joule) triple whose
closed-form cutoffs land inside those windows. A per-joule-only price
can never fit: the cutoff ratio between the 57 W and 14 W bulbs would
be pinned at 14/57, well below what the windows demand.

Run from the repo root:  python3 demos/04_reference_depletion.py
"""

from rfidmeter.depletion import (
    DEFAULT_INITIAL_CREDIT_MSEN,
    DEFAULT_TARIFF,
    REFERENCE_BULBS,
    calibrate_params,
    replicate_reference,
)
from rfidmeter.meter import cutoff_time


def main() -> None:
    print("== closed-form cutoffs for the shipped calibration ==")
    for load in REFERENCE_BULBS:
        t = cutoff_time(DEFAULT_INITIAL_CREDIT_MSEN, DEFAULT_TARIFF, load.measured_w)
        print(f"  {load.name:<7} {load.measured_w:5.1f} W -> {t:6.2f} s")

    print("\n== full replication ==")
    result = replicate_reference()
    print(result.report, end="")

    print("\n== calibration search over the coarse grid ==")
    triples = calibrate_params()
    print(f"  {len(triples)} feasible (credit, standing, per-joule) triples")
    shipped = (DEFAULT_INITIAL_CREDIT_MSEN,
               DEFAULT_TARIFF.standing_msen_per_s,
               DEFAULT_TARIFF.energy_msen_per_j)
    print(f"  shipped triple {shipped} present: {shipped in triples}")

    print("\n== negative controls ==")
    print(f"  per-joule only: {len(calibrate_params(tariff_only=True))} feasible")
    print(f"  standing only:  {len(calibrate_params(standing_only=True))} feasible")
    print("  both empty; the affine standing+per-joule model is the simplest fit")


if __name__ == "__main__":
    main()
