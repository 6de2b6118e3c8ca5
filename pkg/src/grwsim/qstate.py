"""Discretized one-dimensional wavefunctions with an internal level index.

Conventions used throughout the package:

* The spatial grid is uniform and periodic: ``x_i = x_min + i * dx`` with
  ``dx = (x_max - x_min) / n_points``.  Integrals are plain Riemann sums
  ``sum(f) * dx``, which on a periodic grid are spectrally accurate for
  smooth integrands.
* ``hbar = mass = 1`` everywhere; SI values enter only through
  :mod:`grwsim.units`.
* Gaussian packets are parametrized by their *position standard
  deviation* ``width``: ``|psi(x)|^2 ~ exp(-(x - center)^2 / (2 width^2))``.
* States carry one or two internal levels; amplitudes have shape
  ``(levels, n_points)``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import GridMismatchError, ValidationError, ZeroNormError

#: squared norms below this cannot be renormalized meaningfully
ZERO_NORM_FLOOR = 1e-30

#: unit-norm tolerance promised by public state constructors
NORM_TOLERANCE = 1e-9


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic spatial grid on ``[x_min, x_max)``."""

    x_min: float
    x_max: float
    n_points: int

    def __post_init__(self) -> None:
        if not self.x_max > self.x_min:
            raise ValidationError(
                f"grid needs x_max > x_min, got [{self.x_min}, {self.x_max})"
            )
        if self.n_points < 8:
            raise ValidationError(f"grid needs n_points >= 8, got {self.n_points}")

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / self.n_points

    @property
    def length(self) -> float:
        return self.x_max - self.x_min


@lru_cache(maxsize=64)
def grid_points(grid: GridSpec) -> np.ndarray:
    """Sample coordinates of ``grid`` (cached, read-only)."""
    x = grid.x_min + grid.dx * np.arange(grid.n_points)
    x.setflags(write=False)
    return x


@dataclass(frozen=True)
class Region:
    """Half-open coordinate interval ``[lo, hi)``."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise ValidationError(f"region needs lo < hi, got [{self.lo}, {self.hi})")


@dataclass(frozen=True, eq=False)
class WaveFunction:
    """Complex amplitudes on a grid, one row per internal level.

    The raw constructor accepts any finite amplitude array (shape
    ``(n_points,)`` or ``(levels, n_points)`` with one or two levels) and
    does *not* rescale it; the packet factories below always return
    unit-norm states.  Amplitude arrays are frozen after construction.
    """

    grid: GridSpec
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.ndim == 1:
            amps = amps[np.newaxis, :]
        if amps.ndim != 2 or amps.shape[0] not in (1, 2):
            raise ValidationError(
                f"amplitudes must have shape (1|2, n_points), got {amps.shape}"
            )
        if amps.shape[1] != self.grid.n_points:
            raise GridMismatchError(
                f"amplitude row length {amps.shape[1]} != grid n_points "
                f"{self.grid.n_points}"
            )
        amps = np.ascontiguousarray(amps)
        if not np.all(np.isfinite(amps.view(np.float64))):
            raise ValidationError("amplitudes must be finite")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)

    @property
    def levels(self) -> int:
        return self.amplitudes.shape[0]

    @property
    def norm_sq(self) -> float:
        a = self.amplitudes
        return float(np.sum(a.real**2 + a.imag**2) * self.grid.dx)

    def density(self) -> np.ndarray:
        """Position density summed over levels (not renormalized)."""
        a = self.amplitudes
        return np.sum(a.real**2 + a.imag**2, axis=0)

    def level_weights(self) -> np.ndarray:
        """Squared-norm weight carried by each level."""
        a = self.amplitudes
        return np.sum(a.real**2 + a.imag**2, axis=1) * self.grid.dx


def normalize(psi: WaveFunction) -> WaveFunction:
    """Rescale to unit norm; reject states that are numerically zero."""
    n2 = psi.norm_sq
    if n2 < ZERO_NORM_FLOOR:
        raise ZeroNormError(f"cannot normalize state with squared norm {n2:.3e}")
    return WaveFunction(psi.grid, psi.amplitudes / np.sqrt(n2))


def inner_product(phi: WaveFunction, psi: WaveFunction) -> complex:
    """Grid inner product ``<phi|psi>`` including the level sum."""
    if phi.grid != psi.grid or phi.levels != psi.levels:
        raise GridMismatchError(
            "inner product needs matching grids and level counts: "
            f"{phi.grid} x{phi.levels} vs {psi.grid} x{psi.levels}"
        )
    return complex(np.vdot(phi.amplitudes, psi.amplitudes) * phi.grid.dx)


def _require_region_on_grid(grid: GridSpec, region: Region) -> None:
    if region.lo < grid.x_min or region.hi > grid.x_max:
        raise ValidationError(
            f"region [{region.lo}, {region.hi}) exceeds grid "
            f"[{grid.x_min}, {grid.x_max})"
        )


def region_weight(psi: WaveFunction, region: Region) -> float:
    """Probability weight of ``region`` for a unit-norm state (Born rule)."""
    _require_region_on_grid(psi.grid, region)
    x = grid_points(psi.grid)
    mask = (x >= region.lo) & (x < region.hi)
    return float(np.sum(psi.density()[mask]) * psi.grid.dx)


def position_moments(psi: WaveFunction) -> tuple[float, float]:
    """Mean and variance of position for a (near) unit-norm state."""
    x = grid_points(psi.grid)
    w = psi.density() * psi.grid.dx
    total = float(np.sum(w))
    if total < ZERO_NORM_FLOOR:
        raise ZeroNormError("state has no weight; moments undefined")
    mean = float(np.dot(x, w) / total)
    var = float(np.dot((x - mean) ** 2, w) / total)
    return mean, var


# ---------------------------------------------------------------------------
# packet factories


def gaussian_packet(
    grid: GridSpec,
    center: float,
    width: float,
    momentum: float = 0.0,
    levels: int = 1,
    level: int = 0,
) -> WaveFunction:
    """Unit-norm Gaussian packet, ``width`` = position standard deviation.

    The packet (out to five widths) must fit inside the grid so that the
    periodic seam carries no weight.
    """
    if width < 2 * grid.dx:
        raise ValidationError(
            f"packet width {width} under-resolved: needs >= 2 dx = {2 * grid.dx}"
        )
    if center - 5 * width < grid.x_min or center + 5 * width > grid.x_max:
        raise ValidationError(
            f"packet at {center} +- 5*{width} spills over grid "
            f"[{grid.x_min}, {grid.x_max})"
        )
    if levels not in (1, 2) or not 0 <= level < levels:
        raise ValidationError(f"bad level placement: level {level} of {levels}")
    x = grid_points(grid)
    row = np.exp(-((x - center) ** 2) / (4 * width**2) + 1j * momentum * x)
    amps = np.zeros((levels, grid.n_points), dtype=np.complex128)
    amps[level] = row
    return normalize(WaveFunction(grid, amps))


def two_peak_state(
    grid: GridSpec,
    amp1: complex,
    amp2: complex,
    centers: tuple[float, float],
    width: float,
    momentum: float = 0.0,
) -> WaveFunction:
    """Unit-norm superposition of two Gaussian peaks on a single level.

    Each peak is individually normalized before weighting, so for well
    separated peaks the region weight around peak ``i`` is ``|amp_i|^2``.
    """
    g1 = gaussian_packet(grid, centers[0], width, momentum)
    g2 = gaussian_packet(grid, centers[1], width, momentum)
    amps = amp1 * g1.amplitudes + amp2 * g2.amplitudes
    return normalize(WaveFunction(grid, amps))


def uniform_state(grid: GridSpec, levels: int = 1) -> WaveFunction:
    """Unit-norm state that is constant over the whole grid."""
    if levels not in (1, 2):
        raise ValidationError(f"levels must be 1 or 2, got {levels}")
    amps = np.full((levels, grid.n_points), 1.0 + 0.0j)
    return normalize(WaveFunction(grid, amps))
