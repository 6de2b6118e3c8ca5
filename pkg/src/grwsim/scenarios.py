"""Scenario drivers built on top of the collapse machinery.

``cat``                superposition of two separated packets of one
                       coordinate; jumps select one packet.
``measurement_chain``  two-level system entangled with a pointer packet by
                       an impulsive premeasurement; jumps on the pointer
                       coordinate select a level.
``wpr`` mode           textbook exact projection at a configured time
                       (no grid dynamics), as a statistical baseline.
``unitary`` mode       jump rate sent to zero; superpositions persist.

Leggett-Garg runs use a gridless two-level reduction: each collapse hit
on a far-separated pointer acts, to within the packet-overlap tail, as an
exact projection onto the level basis, so trajectories only need the
two-level amplitudes.  The equivalence to the grid-level jump is covered
by tests.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np

from .collapse import (
    DECISION_THRESHOLD,
    GrwParams,
    TrajectoryRecord,
    evolve_with_collapse,
)
from .errors import InsufficientDataError, NonConvergentError, ValidationError
from .propagator import Potential, PropagatorConfig, dry_run_check, premeasurement_evolve
from .qstate import GridSpec, Region, WaveFunction, gaussian_packet, two_peak_state
from .rng import trajectory_stream

SCENARIO_KINDS = ("cat", "measurement_chain")
MODES = ("grw", "wpr", "unitary")

#: abort threshold for the undecided fraction of a grw-mode ensemble
UNDECIDED_BUDGET = 0.01


@dataclass(frozen=True)
class ScenarioConfig:
    """Full description of a cat or measurement-chain experiment."""

    name: str = "cat"
    kind: str = "cat"
    mode: str = "grw"
    weight_1: float = 0.5  # Born weight of branch 1
    packet_width: float = 0.25
    separation: float = 3.5  # distance between the two branch centers
    grid: GridSpec = GridSpec(-8.0, 8.0, 256)
    collapse: GrwParams = GrwParams(tau=0.75, width=0.3, n_eff=6.0)
    prop: PropagatorConfig = PropagatorConfig("spectral", 1.0 / 160.0, 10)
    potential: Potential | None = None
    horizon: float = 0.75
    coupling_time: float = 1.0
    measurement_time: float = 1.0
    region_1: Region | None = None
    region_2: Region | None = None

    def __post_init__(self) -> None:
        if self.kind not in SCENARIO_KINDS:
            raise ValidationError(f"unknown scenario kind {self.kind!r}")
        if self.mode not in MODES:
            raise ValidationError(f"unknown mode {self.mode!r}")
        if not -1e-9 <= self.weight_1 <= 1 + 1e-9:
            raise ValidationError(
                f"weight_1 must lie in [0, 1], got {self.weight_1}"
            )
        if not self.separation > 0:
            raise ValidationError("separation must be positive")
        if not self.packet_width > 0:
            raise ValidationError("packet_width must be positive")
        if not self.horizon >= 0:
            raise ValidationError("horizon must be >= 0")
        if not self.coupling_time > 0:
            raise ValidationError("coupling_time must be positive")
        if self.region_1 is not None and self.region_2 is not None:
            disjoint = (
                self.region_1.hi <= self.region_2.lo
                or self.region_2.hi <= self.region_1.lo
            )
            if not disjoint:
                raise ValidationError("outcome regions must be disjoint")

    @property
    def amplitudes(self) -> tuple[float, float]:
        w1 = min(max(self.weight_1, 0.0), 1.0)
        return math.sqrt(w1), math.sqrt(1.0 - w1)


def matched_double_well(packet_width: float, separation: float) -> Potential:
    """Double well whose wells' ground width equals ``packet_width``.

    A harmonic well of frequency ``w`` has ground width
    ``sigma = 1 / sqrt(2 w)``; inverting gives ``w = 1 / (2 sigma^2)`` and
    a cusp barrier ``w^2 s^2 / 8`` for wells at ``+- s/2``.  Packets
    seeded at the well bottoms then stay put while jumps do their work.
    """
    omega = 1.0 / (2.0 * packet_width**2)
    barrier = omega**2 * separation**2 / 8.0
    return Potential(
        kind="double_well", barrier_height=barrier, well_separation=separation
    )


def resolve_potential(cfg: ScenarioConfig) -> Potential:
    if cfg.potential is not None:
        return cfg.potential
    return matched_double_well(cfg.packet_width, cfg.separation)


def outcome_regions(cfg: ScenarioConfig) -> tuple[Region, Region]:
    """Configured outcome regions, defaulting to the two half-grids."""
    if cfg.region_1 is not None and cfg.region_2 is not None:
        return cfg.region_1, cfg.region_2
    mid = cfg.grid.x_min + 0.5 * cfg.grid.length
    return Region(cfg.grid.x_min, mid), Region(mid, cfg.grid.x_max)


def _check_support(cfg: ScenarioConfig) -> None:
    reach = 0.5 * cfg.separation + 5.0 * cfg.packet_width + 5.0 * cfg.collapse.width
    if reach > min(abs(cfg.grid.x_min), abs(cfg.grid.x_max)):
        raise ValidationError(
            f"branch support (+-{reach:.3f}) too close to the periodic seam of "
            f"grid [{cfg.grid.x_min}, {cfg.grid.x_max})"
        )


def initial_cat_state(cfg: ScenarioConfig) -> WaveFunction:
    """Two-peak superposition; branch 1 sits at the negative center."""
    a1, a2 = cfg.amplitudes
    half = 0.5 * cfg.separation
    return two_peak_state(cfg.grid, a1, a2, (-half, +half), cfg.packet_width)


def entangled_state(cfg: ScenarioConfig) -> WaveFunction:
    """Premeasured two-level state: level i's pointer displaced to -+ side.

    Level 0 (outcome 1) is displaced to ``+separation/2``, level 1 to the
    mirror position.  Requires the displacement to clear ten combined
    widths so the readout is unambiguous.
    """
    displacement = 0.5 * cfg.separation
    min_disp = 10.0 * (cfg.packet_width + cfg.collapse.width)
    if displacement < min_disp:
        raise ValidationError(
            f"premeasurement displacement {displacement} < 10 x (packet width "
            f"+ localization width) = {min_disp}"
        )
    pointer = gaussian_packet(cfg.grid, 0.0, cfg.packet_width)
    coupling = Potential(kind="free", level_velocity=displacement / cfg.coupling_time)
    return premeasurement_evolve(
        cfg.amplitudes, pointer, coupling, cfg.coupling_time
    )


@lru_cache(maxsize=16)
def _prepared(cfg: ScenarioConfig):
    """(initial state, potential, regions) with the startup checks done."""
    _check_support(cfg)
    pot = resolve_potential(cfg)
    if cfg.kind == "cat":
        state = initial_cat_state(cfg)
        regions = outcome_regions(cfg)
    else:
        state = entangled_state(cfg)
        regions = None
    dry_run_check(cfg.grid, pot, cfg.prop, levels=state.levels)
    return state, pot, regions


def _effective_params(cfg: ScenarioConfig) -> GrwParams:
    if cfg.mode == "unitary":
        return replace(cfg.collapse, tau=math.inf)
    return cfg.collapse


def run_single(cfg: ScenarioConfig, master_seed: int, index: int) -> TrajectoryRecord:
    """One trajectory of the configured scenario, stream ``(seed, index)``."""
    stream = trajectory_stream(master_seed, index)
    if cfg.mode == "wpr":
        return _wpr_single(cfg, stream)
    state, pot, regions = _prepared(cfg)
    return evolve_with_collapse(
        state,
        pot,
        _effective_params(cfg),
        cfg.prop,
        cfg.horizon,
        stream,
        scenario=cfg.name,
        outcome_regions=regions,
    )


def _wpr_single(cfg: ScenarioConfig, stream) -> TrajectoryRecord:
    """Exact textbook projection at ``measurement_time``; no grid work."""
    w1 = min(max(cfg.weight_1, 0.0), 1.0)
    u = stream.generator().random()
    outcome = "1" if u < w1 else "2"
    record = TrajectoryRecord(
        scenario=cfg.name, seed=stream.seed, stream_id=stream.stream_id
    )
    record.times = [0.0, cfg.measurement_time]
    record.branch_weights = [
        (w1, 1.0 - w1),
        (1.0, 0.0) if outcome == "1" else (0.0, 1.0),
    ]
    record.outcome = outcome
    record.survival_time = cfg.measurement_time
    return record


@dataclass
class OutcomeTally:
    """Counts of definite and undecided trajectory outcomes."""

    count_1: int = 0
    count_2: int = 0
    count_undecided: int = 0

    @property
    def total(self) -> int:
        return self.count_1 + self.count_2 + self.count_undecided

    @property
    def decided(self) -> int:
        return self.count_1 + self.count_2

    @property
    def undecided_fraction(self) -> float:
        return self.count_undecided / self.total if self.total else 0.0

    def add(self, outcome: str) -> None:
        if outcome == "1":
            self.count_1 += 1
        elif outcome == "2":
            self.count_2 += 1
        else:
            self.count_undecided += 1

    def frequency(self, branch: int) -> float:
        if self.decided == 0:
            raise InsufficientDataError("no decided trajectories")
        count = self.count_1 if branch == 1 else self.count_2
        return count / self.decided

    def ci_halfwidth(self, branch: int, n_sigma: float = 3.0) -> float:
        """Normal-approximation binomial confidence half-width."""
        f = self.frequency(branch)
        return n_sigma * math.sqrt(max(f * (1.0 - f), 0.0) / self.decided)

    def as_dict(self) -> dict:
        out = {
            "count_1": self.count_1,
            "count_2": self.count_2,
            "count_undecided": self.count_undecided,
            "total": self.total,
            "undecided_fraction": self.undecided_fraction,
        }
        if self.decided:
            out["frequency_1"] = self.frequency(1)
            out["frequency_2"] = self.frequency(2)
            out["frequency_1_ci3"] = self.ci_halfwidth(1)
        return out


def tally_records(records) -> OutcomeTally:
    tally = OutcomeTally()
    for rec in records:
        tally.add(rec.outcome)
    return tally


def _enforce_budget(cfg: ScenarioConfig, tally: OutcomeTally) -> None:
    if cfg.mode == "grw" and tally.undecided_fraction > UNDECIDED_BUDGET:
        raise NonConvergentError(
            f"undecided fraction {tally.undecided_fraction:.4f} exceeds "
            f"{UNDECIDED_BUDGET}; horizon too short for the configured rate"
        )


def run_cat(cfg: ScenarioConfig, trajectories: int, master_seed: int) -> OutcomeTally:
    """Ensemble of cat trajectories; aborts if >1% stay undecided (grw)."""
    if cfg.kind != "cat":
        raise ValidationError(f"run_cat needs kind='cat', got {cfg.kind!r}")
    tally = tally_records(
        run_single(cfg, master_seed, i) for i in range(trajectories)
    )
    _enforce_budget(cfg, tally)
    return tally


def survival_statistics(times) -> dict:
    """Median/mean/quartiles of decided survival times."""
    arr = np.asarray(sorted(times), dtype=float)
    if arr.size == 0:
        raise InsufficientDataError("no survival times to summarize")
    return {
        "count": int(arr.size),
        "median": float(np.median(arr)),
        "mean": float(arr.mean()),
        "q1": float(np.percentile(arr, 25)),
        "q3": float(np.percentile(arr, 75)),
    }


def run_measurement_chain(
    cfg: ScenarioConfig, trajectories: int, master_seed: int
) -> tuple[OutcomeTally, dict]:
    """Ensemble of premeasured-pointer trajectories plus survival stats.

    The survival time of a trajectory is the first sampled instant at
    which either level weight exceeds ``1 - 1e-3``.
    """
    if cfg.kind != "measurement_chain":
        raise ValidationError(
            f"run_measurement_chain needs kind='measurement_chain', got {cfg.kind!r}"
        )
    tally = OutcomeTally()
    survivals = []
    for i in range(trajectories):
        rec = run_single(cfg, master_seed, i)
        tally.add(rec.outcome)
        if rec.outcome != "undecided" and rec.survival_time is not None:
            survivals.append(rec.survival_time)
    _enforce_budget(cfg, tally)
    return tally, survival_statistics(survivals)


def run_wpr_baseline(
    cfg: ScenarioConfig, trajectories: int, master_seed: int
) -> OutcomeTally:
    """Exact-projection baseline with outcome probabilities (w1, 1-w1)."""
    wpr_cfg = cfg if cfg.mode == "wpr" else replace(cfg, mode="wpr")
    return tally_records(
        run_single(wpr_cfg, master_seed, i) for i in range(trajectories)
    )


# ---------------------------------------------------------------------------
# Leggett-Garg


@dataclass(frozen=True)
class LgConfig:
    """Three-time dichotomic-correlation experiment on a two-level system.

    The observable is the level index mapped to +-1; the system precesses
    at angular frequency ``omega`` between projective readouts at
    ``t1 < t2 < t3``.  ``collapse`` adds localization hits at rate
    ``n_eff / tau`` throughout the run (None = unitary).
    """

    omega: float
    t1: float
    t2: float
    t3: float
    collapse: GrwParams | None = None

    def __post_init__(self) -> None:
        if not self.omega > 0:
            raise ValidationError("omega must be positive")
        if not 0.0 <= self.t1 < self.t2 < self.t3:
            raise ValidationError(
                f"need 0 <= t1 < t2 < t3, got {(self.t1, self.t2, self.t3)}"
            )


@dataclass(frozen=True)
class LgResult:
    c12: float
    c23: float
    c13: float
    k: float
    se_c12: float
    se_c23: float
    se_c13: float
    se_k: float
    trajectories: int

    def as_dict(self) -> dict:
        return {
            "c12": self.c12,
            "c23": self.c23,
            "c13": self.c13,
            "k": self.k,
            "se_c12": self.se_c12,
            "se_c23": self.se_c23,
            "se_c13": self.se_c13,
            "se_k": self.se_k,
            "trajectories": self.trajectories,
        }


def _lg_pair_product(
    omega: float, rate: float, t_first: float, t_second: float, gen
) -> int:
    """q(t_first) * q(t_second) for one trajectory of one pair experiment.

    Collapse hits are homogeneous Poisson events realized as exact level
    projections (far-separated-pointer limit).  Draw order per segment:
    one Poisson count, that many uniforms for hit times, then one uniform
    per projection (hits and readouts alike).
    """
    a, b = 1.0 + 0.0j, 0.0j
    outcomes = []
    t_prev = 0.0
    for t_meas in (t_first, t_second):
        seg = t_meas - t_prev
        if rate > 0.0:
            n_hits = int(gen.poisson(rate * seg))
            hit_times = np.sort(gen.random(n_hits)) * seg if n_hits else ()
        else:
            hit_times = ()
        us = gen.random(len(hit_times) + 1)
        t_local = 0.0
        for h, u in zip(hit_times, us):
            delta = h - t_local
            c, s = math.cos(0.5 * omega * delta), math.sin(0.5 * omega * delta)
            a, b = c * a - 1j * s * b, c * b - 1j * s * a
            p0 = abs(a) ** 2 / (abs(a) ** 2 + abs(b) ** 2)
            a, b = (1.0 + 0.0j, 0.0j) if u < p0 else (0.0j, 1.0 + 0.0j)
            t_local = h
        delta = seg - t_local
        c, s = math.cos(0.5 * omega * delta), math.sin(0.5 * omega * delta)
        a, b = c * a - 1j * s * b, c * b - 1j * s * a
        p0 = abs(a) ** 2 / (abs(a) ** 2 + abs(b) ** 2)
        if us[-1] < p0:
            a, b = 1.0 + 0.0j, 0.0j
            outcomes.append(1)
        else:
            a, b = 0.0j, 1.0 + 0.0j
            outcomes.append(-1)
        t_prev = t_meas
    return outcomes[0] * outcomes[1]


def run_leggett_garg(
    cfg: LgConfig, trajectories: int, master_seed: int
) -> LgResult:
    """Estimate C12, C23, C13 and K = C12 + C23 - C13.

    Each correlator gets its own sub-ensemble of ``trajectories`` runs
    with readouts only at its two times (an interleaved readout would
    itself disturb the unitary case).  Stream ids are
    ``pair_index * trajectories + trajectory_index``.
    """
    if trajectories < 1:
        raise ValidationError("trajectories must be >= 1")
    rate = cfg.collapse.rate if cfg.collapse is not None else 0.0
    pairs = ((cfg.t1, cfg.t2), (cfg.t2, cfg.t3), (cfg.t1, cfg.t3))
    corr = []
    ses = []
    for pair_index, (ta, tb) in enumerate(pairs):
        acc = 0
        for i in range(trajectories):
            gen = trajectory_stream(
                master_seed, pair_index * trajectories + i
            ).generator()
            acc += _lg_pair_product(cfg.omega, rate, ta, tb, gen)
        c = acc / trajectories
        corr.append(c)
        ses.append(math.sqrt(max(1.0 - c * c, 0.0) / trajectories))
    k = corr[0] + corr[1] - corr[2]
    se_k = math.sqrt(ses[0] ** 2 + ses[1] ** 2 + ses[2] ** 2)
    return LgResult(
        c12=corr[0],
        c23=corr[1],
        c13=corr[2],
        k=k,
        se_c12=ses[0],
        se_c23=ses[1],
        se_c13=ses[2],
        se_k=se_k,
        trajectories=trajectories,
    )


def survival_scaling_points(
    base: ScenarioConfig,
    n_eff_values,
    trajectories: int,
    master_seed: int,
) -> list[tuple[float, float]]:
    """(n_eff, median survival) points for a rate-amplification sweep.

    Each rung rescales dt and horizon with 1/rate so that the snapping
    resolution and the expected jump count stay constant across rungs.
    """
    points = []
    base_rate = base.collapse.rate
    for idx, n_eff in enumerate(n_eff_values):
        params = replace(base.collapse, n_eff=float(n_eff))
        ratio = base_rate / params.rate
        prop = replace(base.prop, dt=base.prop.dt * ratio)
        cfg = replace(
            base, collapse=params, prop=prop, horizon=base.horizon * ratio
        )
        _, stats = run_measurement_chain(
            cfg, trajectories, master_seed + idx
        )
        points.append((float(n_eff), stats["median"]))
    return points
