"""Kac ring: a reversible toy dynamics with an emergent arrow of time.

``n_sites`` balls, each black or white, sit on a ring whose edges carry
fixed markers.  One step moves every ball one site clockwise; a ball
crossing a marked edge flips color.  The dynamics is deterministic,
invertible, and exactly periodic: after ``2 * n_sites`` steps every ball
has crossed every edge twice, so the coloring recurs exactly.

Typical colorings still relax toward the half-black macrostate, and a
"bad" microstate engineered by running the inverse map from an extreme
coloring anti-thermalizes on schedule.  A small independent per-ball
flip probability per step destroys that conspiracy while leaving typical
behavior alone, which is the point of the experiment here.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidHorizonError, ValidationError
from .rng import RngStream, trajectory_stream

#: |m - 1/2| below this counts as equilibrated
EQUILIBRIUM_BAND = 0.05

#: |m - 1/2| above this counts as an anti-thermal excursion
EXCURSION_BAND = 0.4


@dataclass
class KacRing:
    """Ball colors and edge markers; ``markers[i]`` sits between i and i+1."""

    colors: np.ndarray
    markers: np.ndarray
    step_count: int = 0

    def __post_init__(self) -> None:
        colors = np.asarray(self.colors, dtype=bool)
        markers = np.asarray(self.markers, dtype=bool)
        if colors.ndim != 1 or markers.shape != colors.shape:
            raise ValidationError(
                f"colors and markers must be equal-length 1-D arrays, got "
                f"{colors.shape} and {markers.shape}"
            )
        if colors.size < 2:
            raise ValidationError("ring needs at least 2 sites")
        self.colors = colors
        self.markers = markers

    @property
    def n_sites(self) -> int:
        return self.colors.size


@dataclass
class PerturbationConfig:
    """Independent per-ball color flips applied after each step."""

    flip_rate: float
    stream: RngStream
    _gen: np.random.Generator | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        if not 0.0 <= self.flip_rate <= 1.0:
            raise ValidationError(
                f"flip_rate must lie in [0, 1], got {self.flip_rate}"
            )

    def generator(self) -> np.random.Generator:
        if self._gen is None:
            self._gen = self.stream.generator()
        return self._gen


def random_ring(
    n_sites: int, marker_fraction: float, rng: np.random.Generator
) -> KacRing:
    """Ring with fair-coin colors and Bernoulli(marker_fraction) markers."""
    if not 0.0 < marker_fraction < 0.5:
        raise ValidationError(
            f"marker_fraction must lie in (0, 0.5), got {marker_fraction}"
        )
    colors = rng.random(n_sites) < 0.5
    markers = rng.random(n_sites) < marker_fraction
    return KacRing(colors=colors, markers=markers)


def kac_step(ring: KacRing) -> KacRing:
    """Advance one step: rotate clockwise, flipping across marked edges."""
    new_colors = np.roll(ring.colors ^ ring.markers, 1)
    return KacRing(new_colors, ring.markers, ring.step_count + 1)


def kac_step_back(ring: KacRing) -> KacRing:
    """Exact inverse of :func:`kac_step`."""
    new_colors = np.roll(ring.colors, -1) ^ ring.markers
    return KacRing(new_colors, ring.markers, ring.step_count - 1)


def kac_step_perturbed(ring: KacRing, perturbation: PerturbationConfig) -> KacRing:
    """One step followed by independent per-ball flips."""
    stepped = kac_step(ring)
    if perturbation.flip_rate > 0.0:
        flips = perturbation.generator().random(stepped.n_sites) < perturbation.flip_rate
        stepped.colors = stepped.colors ^ flips
    return stepped


def magnetization(ring: KacRing) -> float:
    """Fraction of balls carrying the marked ('one') color."""
    return float(np.mean(ring.colors))


def engineered_bad_ring(
    n_sites: int, marker_fraction: float, steps: int, rng: np.random.Generator
) -> KacRing:
    """Microstate whose unperturbed forward evolution anti-thermalizes.

    Runs the inverse map ``steps`` times from the all-one-color extreme,
    so the forward map reaches that extreme exactly at ``t = steps``.
    """
    if not 0.0 < marker_fraction < 0.5:
        raise ValidationError(
            f"marker_fraction must lie in (0, 0.5), got {marker_fraction}"
        )
    ring = KacRing(
        colors=np.ones(n_sites, dtype=bool),
        markers=rng.random(n_sites) < marker_fraction,
    )
    for _ in range(steps):
        ring = kac_step_back(ring)
    ring.step_count = 0
    return ring


def equilibration_experiment(
    n_sites: int,
    marker_fraction: float,
    flip_rate: float,
    horizon: int,
    trials: int,
    master_seed: int,
    series_stride: int = 0,
) -> dict:
    """Race engineered bad microstates with and without perturbation.

    Per trial: draw markers, build the bad microstate aimed at ``horizon``,
    then evolve two arms from it -- one with the deterministic map alone,
    one adding per-ball flips at ``flip_rate``.  The summary reports, for
    each arm, the fraction of trials inside the equilibrium band
    ``|m - 1/2| < 0.05`` at the horizon and the fraction beyond the
    excursion band ``|m - 1/2| > 0.4``, plus mean ``m(t)`` series sampled
    every ``series_stride`` steps (0 = horizon only).
    """
    if horizon < 1:
        raise ValidationError(f"horizon must be >= 1 step, got {horizon}")
    if horizon >= 2 * n_sites:
        raise InvalidHorizonError(
            f"horizon {horizon} reaches the exact recurrence time "
            f"{2 * n_sites}; nothing to test there"
        )
    if trials < 1:
        raise ValidationError("trials must be >= 1")
    stride = series_stride if series_stride > 0 else horizon
    sample_steps = sorted({0, horizon, *range(0, horizon + 1, stride)})
    step_to_slot = {t: i for i, t in enumerate(sample_steps)}
    plain_series = np.zeros(len(sample_steps))
    kicked_series = np.zeros(len(sample_steps))
    plain_final = np.empty(trials)
    kicked_final = np.empty(trials)
    for trial in range(trials):
        gen = trajectory_stream(master_seed, trial).generator()
        start = engineered_bad_ring(n_sites, marker_fraction, horizon, gen)
        perturbation = PerturbationConfig(
            flip_rate=flip_rate, stream=trajectory_stream(master_seed, trials + trial)
        )
        plain = KacRing(start.colors.copy(), start.markers)
        kicked = KacRing(start.colors.copy(), start.markers)
        plain_series[0] += magnetization(plain)
        kicked_series[0] += magnetization(kicked)
        for t in range(1, horizon + 1):
            plain = kac_step(plain)
            kicked = kac_step_perturbed(kicked, perturbation)
            slot = step_to_slot.get(t)
            if slot is not None:
                plain_series[slot] += magnetization(plain)
                kicked_series[slot] += magnetization(kicked)
        plain_final[trial] = magnetization(plain)
        kicked_final[trial] = magnetization(kicked)
    plain_dev = np.abs(plain_final - 0.5)
    kicked_dev = np.abs(kicked_final - 0.5)
    return {
        "n_sites": n_sites,
        "marker_fraction": marker_fraction,
        "flip_rate": flip_rate,
        "horizon": horizon,
        "trials": trials,
        "equilibrium_band": EQUILIBRIUM_BAND,
        "excursion_band": EXCURSION_BAND,
        "plain_equilibrated_fraction": float(np.mean(plain_dev < EQUILIBRIUM_BAND)),
        "kicked_equilibrated_fraction": float(np.mean(kicked_dev < EQUILIBRIUM_BAND)),
        "plain_excursion_fraction": float(np.mean(plain_dev > EXCURSION_BAND)),
        "kicked_excursion_fraction": float(np.mean(kicked_dev > EXCURSION_BAND)),
        "plain_mean_final_magnetization": float(np.mean(plain_final)),
        "kicked_mean_final_magnetization": float(np.mean(kicked_final)),
        "series_steps": [int(t) for t in sample_steps],
        "plain_mean_series": [float(v / trials) for v in plain_series],
        "kicked_mean_series": [float(v / trials) for v in kicked_series],
    }
