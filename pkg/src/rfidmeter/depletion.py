"""Reference depletion experiment and tariff calibration.

The bundled reference run starts each of three bulbs (rated 60/25/15 W,
drawing a measured 57/24/14 W) on its own meter with RM 5 of credit and
samples the wattage every 5 s for 60 s. The prototype measurements this
replays show each supply dropping to zero inside a known window:

    57 W: cutoff in (30, 35] s
    24 W: cutoff in (40, 45] s
    14 W: cutoff in (45, 50] s

`calibrate_params` brute-forces the affine tariff grid for rates whose
closed-form cutoffs land in all three windows at once; the default
shipped tariff (standing 9 000 msen/s, energy 100 msen/J) is one of
them. A tariff-only model (standing = 0) forces the cutoff-time ratio
t(57)/t(14) to 14/57, far outside what the windows allow, so its
feasible set is empty for any credit; the search shows that empirically.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .meter import TariffModel, cutoff_time
from .scenario import Scenario, ScenarioResult, run_scenario
from .sensing import LoadSpec

DEFAULT_INITIAL_CREDIT_MSEN = 500_000  # RM 5
DEFAULT_TARIFF = TariffModel(standing_msen_per_s=9_000, energy_msen_per_j=100)

REFERENCE_BULBS: tuple[LoadSpec, ...] = (
    LoadSpec("bulb60", rated_w=60, measured_w=57, switched_on=True),
    LoadSpec("bulb25", rated_w=25, measured_w=24, switched_on=True),
    LoadSpec("bulb15", rated_w=15, measured_w=14, switched_on=True),
)

# (power_w, last nonzero sample s, first zero sample s)
REFERENCE_WINDOWS: tuple[tuple[float, float, float], ...] = (
    (57.0, 30.0, 35.0),
    (24.0, 40.0, 45.0),
    (14.0, 45.0, 50.0),
)

REFERENCE_DURATION_S = 60
REFERENCE_SAMPLE_PERIOD_S = 5

COARSE_STANDING_MAX = 20_000
COARSE_STANDING_STEP = 100
COARSE_TARIFF_MAX = 1_000
COARSE_TARIFF_STEP = 10


@dataclass
class ReplicationResult:
    passed: bool
    failures: list[str]
    scenario_result: ScenarioResult
    report: str


def reference_scenario(
    initial_credit_msen: int = DEFAULT_INITIAL_CREDIT_MSEN,
    tariff: TariffModel = DEFAULT_TARIFF,
    tick_ms: int = 100,
    seed: int = 0,
) -> Scenario:
    return Scenario(
        initial_credit_msen=initial_credit_msen,
        tariff=tariff,
        loads=REFERENCE_BULBS,
        duration_s=REFERENCE_DURATION_S,
        sample_period_s=REFERENCE_SAMPLE_PERIOD_S,
        seed=seed,
        tick_ms=tick_ms,
    )


def replicate_reference(
    initial_credit_msen: int = DEFAULT_INITIAL_CREDIT_MSEN,
    tariff: TariffModel = DEFAULT_TARIFF,
    tick_ms: int = 100,
) -> ReplicationResult:
    """Run the three-bulb experiment and check it against the windows.

    Every sample at or before a bulb's last-nonzero time must read the
    bulb's full measured wattage, and every sample at or after its
    first-zero time must read exactly 0. The closed-form cutoff is
    cross-checked against the same windows.
    """
    scenario = reference_scenario(initial_credit_msen, tariff, tick_ms)
    result = run_scenario(scenario)
    failures: list[str] = []

    for load, (power_w, last_nonzero_s, first_zero_s) in zip(REFERENCE_BULBS, REFERENCE_WINDOWS):
        run = result.runs[load.name]
        for point in run.samples:
            if point.t_s <= last_nonzero_s and point.watts != load.measured_w:
                failures.append(
                    f"{load.name}: expected {load.measured_w} W at t={point.t_s}s, "
                    f"read {point.watts}"
                )
            elif point.t_s >= first_zero_s and point.watts != 0.0:
                failures.append(
                    f"{load.name}: expected 0 W at t={point.t_s}s, read {point.watts}"
                )
        closed = cutoff_time(initial_credit_msen, tariff, power_w)
        if not last_nonzero_s < closed <= first_zero_s:
            failures.append(
                f"{load.name}: closed-form cutoff {closed:.2f}s outside "
                f"({last_nonzero_s}, {first_zero_s}]"
            )

    verdict = "PASS" if not failures else "FAIL"
    report_lines = [result.report(), f"replication: {verdict}"]
    report_lines.extend(f"  {f}" for f in failures)
    return ReplicationResult(not failures, failures, result, "\n".join(report_lines) + "\n")


def cutoffs_in_windows(
    credit_msen: int,
    standing_msen_per_s: int,
    energy_msen_per_j: int,
    windows: tuple[tuple[float, float, float], ...] = REFERENCE_WINDOWS,
) -> bool:
    """Exact scalar check that every closed-form cutoff lands in its window."""
    for power_w, lo_s, hi_s in windows:
        rate = standing_msen_per_s + energy_msen_per_j * power_w
        if rate <= 0:
            return False
        t = credit_msen / rate
        if not lo_s < t <= hi_s:
            return False
    return True


def calibrate_params(
    credit_msen: int = DEFAULT_INITIAL_CREDIT_MSEN,
    windows: tuple[tuple[float, float, float], ...] = REFERENCE_WINDOWS,
    standing_max: int = COARSE_STANDING_MAX,
    standing_step: int = COARSE_STANDING_STEP,
    tariff_max: int = COARSE_TARIFF_MAX,
    tariff_step: int = COARSE_TARIFF_STEP,
    refine: bool = False,
    standing_only: bool = False,
    tariff_only: bool = False,
) -> list[tuple[int, int, int]]:
    """Grid-search (standing, energy) rates whose cutoffs fit every window.

    Returns (credit_msen, standing_msen_per_s, energy_msen_per_j)
    triples, sorted. With refine=True the neighborhood of every coarse
    hit is rescanned once at ten times finer steps. standing_only /
    tariff_only restrict the search to one axis (the other pinned to 0),
    which is how the infeasibility of the single-term models is shown.
    """
    if standing_only and tariff_only:
        raise ValueError("choose at most one of standing_only / tariff_only")
    standing_values = np.array([0]) if tariff_only else np.arange(
        0, standing_max + 1, standing_step
    )
    tariff_values = np.array([0]) if standing_only else np.arange(
        0, tariff_max + 1, tariff_step
    )

    feasible = _grid_feasible(credit_msen, standing_values, tariff_values, windows)
    if refine:
        fine_standing = max(1, standing_step // 10)
        fine_tariff = max(1, tariff_step // 10)
        refined: set[tuple[int, int, int]] = set(feasible)
        for _, a, b in feasible:
            a_values = np.arange(max(0, a - standing_step), a + standing_step + 1, fine_standing)
            b_values = np.arange(max(0, b - tariff_step), b + tariff_step + 1, fine_tariff)
            refined.update(_grid_feasible(credit_msen, a_values, b_values, windows))
        feasible = sorted(refined)
    return feasible


def _grid_feasible(
    credit_msen: int,
    standing_values: np.ndarray,
    tariff_values: np.ndarray,
    windows: tuple[tuple[float, float, float], ...],
) -> list[tuple[int, int, int]]:
    a_grid = standing_values[:, None].astype(np.float64)
    b_grid = tariff_values[None, :].astype(np.float64)
    mask = np.ones((standing_values.size, tariff_values.size), dtype=bool)
    for power_w, lo_s, hi_s in windows:
        rate = a_grid + b_grid * power_w
        with np.errstate(divide="ignore"):
            t = np.where(rate > 0, credit_msen / np.where(rate > 0, rate, 1.0), np.inf)
        mask &= (t > lo_s) & (t <= hi_s)
    rows, cols = np.nonzero(mask)
    return sorted(
        (credit_msen, int(standing_values[r]), int(tariff_values[c]))
        for r, c in zip(rows, cols)
    )
