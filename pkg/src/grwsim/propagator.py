"""Unitary evolution of grid wavefunctions.

Solves ``i d/dt psi = [-(1/2) d^2/dx^2 + V(x)] psi`` on the periodic grid
(``hbar = mass = 1``) with one of two methods:

* ``spectral`` -- Strang-split step: half a potential phase, an exact
  kinetic phase in Fourier space, half a potential phase.  Free evolution
  is exact per Fourier mode; with a potential the step is second order
  in ``dt`` and exactly norm-preserving.
* ``crank_nicolson`` -- trapezoidal (Cayley) step on the periodic
  three-point stencil, solved with a cached sparse LU factorization.

A potential may carry a level-diagonal drift term that couples the
internal level to the coordinate's momentum; it displaces level 0 at
``+level_velocity`` and level 1 at ``-level_velocity``.  That term is the
entangling device used by :func:`premeasurement_evolve`, which applies it
as one exact displacement rather than integrating many steps.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (
    InsufficientSeparationWarning,
    UnstableStepError,
    ValidationError,
)
from .qstate import GridSpec, WaveFunction, grid_points, inner_product

#: norm drift allowed over one step() call before it is declared unstable
STEP_NORM_TOLERANCE = 1e-6

#: per-step drift allowed by the startup dry run
DRY_RUN_DRIFT = 1e-10

#: pointer overlap above this triggers InsufficientSeparationWarning
SEPARATION_WARN_OVERLAP = 1e-3

POTENTIAL_KINDS = ("free", "harmonic", "double_well", "custom")
METHODS = ("spectral", "crank_nicolson")


@dataclass(frozen=True)
class Potential:
    """External potential, optionally with a level-diagonal drift term.

    ``double_well`` is two equal parabolic wells centered at
    ``+- well_separation / 2`` that meet in a cusp of height
    ``barrier_height`` at the origin, so each well is exactly harmonic
    with curvature ``8 * barrier_height / well_separation**2``.
    """

    kind: str = "free"
    omega: float = 0.0
    barrier_height: float = 0.0
    well_separation: float = 0.0
    values: tuple[float, ...] | None = None
    level_velocity: float = 0.0

    def __post_init__(self) -> None:
        if self.kind not in POTENTIAL_KINDS:
            raise ValidationError(
                f"unknown potential kind {self.kind!r}; expected one of "
                f"{POTENTIAL_KINDS}"
            )
        if self.kind == "harmonic" and not self.omega > 0:
            raise ValidationError("harmonic potential needs omega > 0")
        if self.kind == "double_well":
            if not (self.barrier_height > 0 and self.well_separation > 0):
                raise ValidationError(
                    "double well needs barrier_height > 0 and well_separation > 0"
                )
        if self.kind == "custom":
            if self.values is None:
                raise ValidationError("custom potential needs tabulated values")
            if not np.all(np.isfinite(self.values)):
                raise ValidationError("custom potential values must be finite")

    def values_on(self, grid: GridSpec) -> np.ndarray:
        return _potential_values(self, grid)


@lru_cache(maxsize=64)
def _potential_values(v: Potential, grid: GridSpec) -> np.ndarray:
    x = grid_points(grid)
    if v.kind == "free":
        out = np.zeros(grid.n_points)
    elif v.kind == "harmonic":
        out = 0.5 * v.omega**2 * x**2
    elif v.kind == "double_well":
        curvature = 8.0 * v.barrier_height / v.well_separation**2
        half = 0.5 * v.well_separation
        out = 0.5 * curvature * np.minimum((x - half) ** 2, (x + half) ** 2)
    else:
        if len(v.values) != grid.n_points:
            raise ValidationError(
                f"custom potential has {len(v.values)} entries for a grid of "
                f"{grid.n_points} points"
            )
        out = np.asarray(v.values, dtype=float).copy()
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class PropagatorConfig:
    method: str = "spectral"
    dt: float = 1e-3
    steps_per_event_check: int = 1

    def __post_init__(self) -> None:
        if self.method not in METHODS:
            raise ValidationError(
                f"unknown method {self.method!r}; expected one of {METHODS}"
            )
        if not self.dt > 0:
            raise ValidationError(f"dt must be positive, got {self.dt}")
        if self.steps_per_event_check < 1:
            raise ValidationError("steps_per_event_check must be >= 1")


def _wavenumbers(grid: GridSpec) -> np.ndarray:
    return 2.0 * np.pi * np.fft.fftfreq(grid.n_points, d=grid.dx)


def _level_signs(levels: int) -> np.ndarray:
    return np.array([1.0]) if levels == 1 else np.array([1.0, -1.0])


@lru_cache(maxsize=64)
def _spectral_phases(
    v: Potential, grid: GridSpec, dt: float, levels: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(half potential phase, full potential phase, kinetic phase rows)."""
    vals = _potential_values(v, grid)
    half = np.exp(-0.5j * dt * vals)
    k = _wavenumbers(grid)
    signs = _level_signs(levels)
    kin = np.exp(-1j * dt * (0.5 * k**2 + np.outer(signs, k) * v.level_velocity))
    return half, half * half, kin


def _step_spectral(
    amps: np.ndarray, v: Potential, grid: GridSpec, dt: float, n_steps: int
) -> np.ndarray:
    half, full, kin = _spectral_phases(v, grid, dt, amps.shape[0])
    psi = amps * half
    for i in range(n_steps):
        psi = np.fft.ifft(kin * np.fft.fft(psi, axis=1), axis=1)
        psi *= full if i < n_steps - 1 else half
    return psi


@lru_cache(maxsize=32)
def _cn_operators(v: Potential, grid: GridSpec, dt: float, levels: int):
    """Per-level (LU of I + i dt/2 H, csr of I - i dt/2 H)."""
    import scipy.sparse as sp
    import scipy.sparse.linalg as spla

    n = grid.n_points
    dx = grid.dx
    vals = _potential_values(v, grid)
    ones = np.ones(n - 1)
    lap = sp.diags([ones, -2.0 * np.ones(n), ones], [-1, 0, 1], format="lil")
    lap[0, -1] = 1.0
    lap[-1, 0] = 1.0
    lap = lap.tocsc() / dx**2
    grad = sp.diags([-ones, ones], [-1, 1], format="lil")
    grad[0, -1] = -1.0
    grad[-1, 0] = 1.0
    grad = grad.tocsc() / (2.0 * dx)
    eye = sp.identity(n, format="csc")
    out = []
    for sign in _level_signs(levels):
        ham = -0.5 * lap + sp.diags(vals).tocsc()
        if v.level_velocity != 0.0:
            ham = ham + sign * v.level_velocity * (-1j) * grad
        a_mat = (eye + 0.5j * dt * ham).tocsc()
        b_mat = (eye - 0.5j * dt * ham).tocsr()
        out.append((spla.splu(a_mat), b_mat))
    return tuple(out)


def _step_crank_nicolson(
    amps: np.ndarray, v: Potential, grid: GridSpec, dt: float, n_steps: int
) -> np.ndarray:
    ops = _cn_operators(v, grid, dt, amps.shape[0])
    rows = []
    for row, (lu, b_mat) in zip(amps, ops):
        psi = row.copy()
        for _ in range(n_steps):
            psi = lu.solve(b_mat @ psi)
        rows.append(psi)
    return np.stack(rows)


def step(
    psi: WaveFunction, v: Potential, cfg: PropagatorConfig, duration: float
) -> WaveFunction:
    """Advance ``psi`` by ``duration``, an integer multiple of ``cfg.dt``."""
    if duration < 0:
        raise ValidationError(f"duration must be >= 0, got {duration}")
    n_steps = int(round(duration / cfg.dt))
    if abs(duration - n_steps * cfg.dt) > 1e-9 * max(cfg.dt, abs(duration)):
        raise ValidationError(
            f"duration {duration} is not an integer multiple of dt {cfg.dt}"
        )
    if n_steps == 0:
        return psi
    if v.level_velocity != 0.0 and psi.levels != 2:
        raise ValidationError("level_velocity coupling needs a two-level state")
    before = psi.norm_sq
    if cfg.method == "spectral":
        amps = _step_spectral(psi.amplitudes, v, psi.grid, cfg.dt, n_steps)
    else:
        amps = _step_crank_nicolson(psi.amplitudes, v, psi.grid, cfg.dt, n_steps)
    out = WaveFunction(psi.grid, amps)
    if abs(out.norm_sq - before) > STEP_NORM_TOLERANCE:
        raise UnstableStepError(
            f"norm drifted by {abs(out.norm_sq - before):.3e} over {n_steps} "
            f"steps of dt={cfg.dt}"
        )
    return out


def dry_run_check(
    grid: GridSpec, v: Potential, cfg: PropagatorConfig, levels: int = 1
) -> None:
    """100-step stability probe; raises UnstableStepError on drift.

    Run once when a scenario is assembled so an unstable (grid, dt,
    method) combination fails loudly before any ensemble work starts.
    """
    from .qstate import gaussian_packet

    width = max(4 * grid.dx, grid.length / 64)
    center = grid.x_min + 0.5 * grid.length
    probe = gaussian_packet(grid, center, width, levels=levels)
    if v.level_velocity != 0.0 and levels != 2:
        v = Potential(
            kind=v.kind,
            omega=v.omega,
            barrier_height=v.barrier_height,
            well_separation=v.well_separation,
            values=v.values,
        )
    evolved = probe
    for _ in range(100):
        evolved = step(evolved, v, cfg, cfg.dt)
    drift = abs(evolved.norm_sq - probe.norm_sq) / 100.0
    if drift > DRY_RUN_DRIFT:
        raise UnstableStepError(
            f"dry run: per-step norm drift {drift:.3e} exceeds {DRY_RUN_DRIFT}"
        )


def _shift_exact(row: np.ndarray, grid: GridSpec, displacement: float) -> np.ndarray:
    """Exact periodic translation by ``displacement`` via a Fourier phase."""
    k = _wavenumbers(grid)
    return np.fft.ifft(np.exp(-1j * k * displacement) * np.fft.fft(row))


def premeasurement_evolve(
    system_amplitudes: tuple[complex, complex],
    pointer: WaveFunction,
    coupling: Potential,
    duration: float,
) -> WaveFunction:
    """Entangle a two-level system with a pointer packet.

    The level-diagonal drift of ``coupling`` acting for ``duration``
    displaces the pointer by ``+- coupling.level_velocity * duration``
    depending on the level, applied here as one exact translation:
    ``(c1, c2) x pointer -> c1 |shifted +D> + c2 |shifted -D>`` as a
    two-level state.  Warns if the displaced packets still overlap by
    more than 1e-3.
    """
    c1, c2 = complex(system_amplitudes[0]), complex(system_amplitudes[1])
    weight = abs(c1) ** 2 + abs(c2) ** 2
    if abs(weight - 1.0) > 1e-9:
        raise ValidationError(
            f"system amplitudes must satisfy |c1|^2+|c2|^2 = 1, got {weight}"
        )
    if pointer.levels != 1:
        raise ValidationError("pointer state must be single-level")
    if coupling.level_velocity == 0.0:
        raise ValidationError("coupling potential has level_velocity = 0")
    displacement = coupling.level_velocity * duration
    row = pointer.amplitudes[0]
    up = _shift_exact(row, pointer.grid, +displacement)
    down = _shift_exact(row, pointer.grid, -displacement)
    overlap = abs(
        inner_product(
            WaveFunction(pointer.grid, up), WaveFunction(pointer.grid, down)
        )
    )
    if overlap > SEPARATION_WARN_OVERLAP:
        warnings.warn(
            f"displaced pointer packets overlap by {overlap:.3e}",
            InsufficientSeparationWarning,
            stacklevel=2,
        )
    amps = np.stack([c1 * up, c2 * down])
    return WaveFunction(pointer.grid, amps)
