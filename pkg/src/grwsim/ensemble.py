"""Ensemble driver: run many trajectories and write deterministic artifacts.

Parallelism is an implementation detail: every trajectory gets its own
counter-based stream keyed by ``(master_seed, index)``, results are
reassembled in index order, and wall-clock fields never reach disk, so
``events.jsonl`` / ``summary.json`` / ``outcomes.csv`` are byte-identical
for any worker count.
"""
from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

from ._version import __version__
from .errors import (
    EnsembleFailureError,
    GrwsimError,
    InsufficientDataError,
    NonConvergentError,
)
from .rng import GENERATOR_NAME
from .scenarios import (
    UNDECIDED_BUDGET,
    OutcomeTally,
    ScenarioConfig,
    survival_statistics,
)
from .scenarios import run_single as _run_single
from .stats import born_chi_square

FAILURE_BUDGET = 0.01

EVENTS_FILE = "events.jsonl"
SUMMARY_FILE = "summary.json"
OUTCOMES_FILE = "outcomes.csv"
CONFIG_ECHO_FILE = "config.ini"


def provenance() -> dict:
    return {
        "package": "grwsim",
        "version": __version__,
        "generator": GENERATOR_NAME,
    }


@dataclass
class EnsembleSummary:
    """Aggregate view of one ensemble run (see ``as_dict`` for the schema)."""

    scenario: str
    kind: str
    mode: str
    trajectories: int
    master_seed: int
    tally: OutcomeTally
    expected_weights: tuple[float, float]
    chi_square: float | None = None
    p_value: float | None = None
    survival: dict | None = None
    total_jumps: int = 0
    failures: int = 0
    config_digest: str | None = None
    records: list[dict] = field(default_factory=list, repr=False)

    def as_dict(self) -> dict:
        return {
            "scenario": self.scenario,
            "kind": self.kind,
            "mode": self.mode,
            "trajectories": self.trajectories,
            "master_seed": self.master_seed,
            "outcomes": self.tally.as_dict(),
            "expected_weights": list(self.expected_weights),
            "chi_square": self.chi_square,
            "p_value": self.p_value,
            "survival": self.survival,
            "total_jumps": self.total_jumps,
            "failures": self.failures,
            "config_digest": self.config_digest,
            "provenance": provenance(),
        }


def _run_chunk(cfg: ScenarioConfig, master_seed: int, start: int, stop: int):
    """Worker body: trajectories ``start..stop-1`` as JSON-ready dicts."""
    out = []
    for i in range(start, stop):
        try:
            out.append((i, _run_single(cfg, master_seed, i).as_dict(), None))
        except GrwsimError as exc:
            out.append((i, None, f"{type(exc).__name__}: {exc}"))
    return out


def _chunk_ranges(total: int, workers: int) -> list[tuple[int, int]]:
    chunk = max(1, math.ceil(total / max(workers, 1) / 4))
    return [(lo, min(lo + chunk, total)) for lo in range(0, total, chunk)]


def run_ensemble(
    cfg: ScenarioConfig,
    trajectories: int,
    master_seed: int,
    workers: int = 1,
    out_dir: str | Path | None = None,
    config_text: str | None = None,
    config_digest: str | None = None,
) -> EnsembleSummary:
    """Run ``trajectories`` independent realizations and summarize them.

    Raises :class:`EnsembleFailureError` if more than 1% of trajectories
    error out, and :class:`NonConvergentError` if (in collapse mode) more
    than 1% finish undecided.  With ``out_dir`` set, also writes the
    event log, outcome table, summary, and resolved-config echo.
    """
    if trajectories < 1:
        raise GrwsimError(f"trajectories must be >= 1, got {trajectories}")
    ranges = _chunk_ranges(trajectories, workers)
    results: list[tuple[int, dict | None, str | None]] = []
    if workers <= 1:
        for lo, hi in ranges:
            results.extend(_run_chunk(cfg, master_seed, lo, hi))
    else:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            futures = [
                pool.submit(_run_chunk, cfg, master_seed, lo, hi)
                for lo, hi in ranges
            ]
            for fut in futures:
                results.extend(fut.result())
    results.sort(key=lambda item: item[0])

    tally = OutcomeTally()
    survival_times = []
    total_jumps = 0
    failures = 0
    records: list[dict] = []
    for index, rec, error in results:
        if rec is None:
            failures += 1
            records.append({"index": index, "error": error, "scenario": cfg.name})
            continue
        records.append(rec)
        tally.add(rec["outcome"])
        total_jumps += len(rec["events"])
        if rec["outcome"] in ("1", "2") and rec["survival_time"] is not None:
            survival_times.append(rec["survival_time"])

    if failures / trajectories > FAILURE_BUDGET:
        raise EnsembleFailureError(
            f"{failures}/{trajectories} trajectories failed "
            f"(budget {FAILURE_BUDGET:.0%}); first error: "
            f"{next(e for _, r, e in results if r is None)}"
        )
    if cfg.mode == "grw" and tally.undecided_fraction > UNDECIDED_BUDGET:
        raise NonConvergentError(
            f"undecided fraction {tally.undecided_fraction:.4f} exceeds "
            f"{UNDECIDED_BUDGET}; horizon too short for the configured rate"
        )

    expected = (cfg.weight_1, 1.0 - cfg.weight_1)
    chi_square = p_value = None
    if 0.0 < cfg.weight_1 < 1.0:
        try:
            chi_square, p_value = born_chi_square(tally, expected)
        except InsufficientDataError:
            pass
    survival = None
    if survival_times:
        survival = survival_statistics(survival_times)

    summary = EnsembleSummary(
        scenario=cfg.name,
        kind=cfg.kind,
        mode=cfg.mode,
        trajectories=trajectories,
        master_seed=master_seed,
        tally=tally,
        expected_weights=expected,
        chi_square=chi_square,
        p_value=p_value,
        survival=survival,
        total_jumps=total_jumps,
        failures=failures,
        config_digest=config_digest,
        records=records,
    )
    if out_dir is not None:
        write_artifacts(summary, Path(out_dir), config_text=config_text)
    return summary


def _json_default(obj):
    import numpy as np

    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    raise TypeError(f"not JSON serializable: {type(obj)!r}")


def dump_json_line(record: dict) -> str:
    return json.dumps(
        record, sort_keys=True, separators=(",", ":"), default=_json_default
    )


def write_artifacts(
    summary: EnsembleSummary,
    out_dir: Path,
    config_text: str | None = None,
) -> None:
    """Write the one-line-per-trajectory log, CSV table, and summary."""
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / EVENTS_FILE, "w", encoding="utf-8", newline="\n") as fh:
        for rec in summary.records:
            fh.write(dump_json_line(rec) + "\n")
    with open(out_dir / OUTCOMES_FILE, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            ["index", "outcome", "survival_time", "n_jumps",
             "final_weight_1", "final_weight_2"]
        )
        for i, rec in enumerate(summary.records):
            if "error" in rec:
                writer.writerow([i, "error", "", "", "", ""])
                continue
            weights = rec["series"]["branch_weights"]
            final = [repr(w) for w in weights[-1]] if weights else ["", ""]
            survival = rec["survival_time"]
            writer.writerow(
                [i, rec["outcome"],
                 "" if survival is None else repr(survival),
                 len(rec["events"]), final[0], final[1]]
            )
    with open(out_dir / SUMMARY_FILE, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(
            summary.as_dict(), fh, sort_keys=True, indent=2,
            default=_json_default,
        )
        fh.write("\n")
    if config_text is not None:
        with open(
            out_dir / CONFIG_ECHO_FILE, "w", encoding="utf-8", newline="\n"
        ) as fh:
            fh.write(config_text)
