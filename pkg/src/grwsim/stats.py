"""Statistical post-processing of ensemble outputs."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import stats as _sps

from .errors import DegenerateFitError, InsufficientDataError, ValidationError
from .scenarios import OutcomeTally

#: minimum decided trajectories for a chi-square comparison
MIN_DECIDED = 100


def born_chi_square(
    tally: OutcomeTally, expected: tuple[float, float]
) -> tuple[float, float]:
    """Chi-square (1 dof) of decided outcomes against expected weights.

    Undecided trajectories are excluded here and reported separately by
    the ensemble summary.  An expected weight of zero with observed
    counts returns ``(inf, 0.0)`` to flag the impossible outcome.
    """
    p1, p2 = float(expected[0]), float(expected[1])
    if p1 < 0 or p2 < 0 or abs(p1 + p2 - 1.0) > 1e-9:
        raise ValidationError(
            f"expected weights must be nonnegative and sum to 1, got {expected}"
        )
    decided = tally.decided
    if decided < MIN_DECIDED:
        raise InsufficientDataError(
            f"need >= {MIN_DECIDED} decided trajectories, have {decided}"
        )
    statistic = 0.0
    for observed, p in ((tally.count_1, p1), (tally.count_2, p2)):
        expected_count = p * decided
        if expected_count == 0.0:
            if observed:
                return math.inf, 0.0
            continue
        statistic += (observed - expected_count) ** 2 / expected_count
    return statistic, float(_sps.chi2.sf(statistic, df=1))


def two_proportion_test(
    count_a: int, total_a: int, count_b: int, total_b: int
) -> tuple[float, float]:
    """Two-sample z-test for equality of proportions; returns (z, p)."""
    if total_a < 1 or total_b < 1:
        raise InsufficientDataError("both samples must be nonempty")
    fa, fb = count_a / total_a, count_b / total_b
    pooled = (count_a + count_b) / (total_a + total_b)
    denom = pooled * (1.0 - pooled) * (1.0 / total_a + 1.0 / total_b)
    if denom == 0.0:
        z = 0.0 if fa == fb else math.inf
    else:
        z = (fa - fb) / math.sqrt(denom)
    return z, float(2.0 * _sps.norm.sf(abs(z)))


@dataclass(frozen=True)
class ScalingFit:
    slope: float
    intercept: float
    stderr: float
    ci_low: float
    ci_high: float
    n_points: int


def fit_scaling(points) -> ScalingFit:
    """Least-squares slope of log10(value) against log10(abscissa).

    ``points`` is a sequence of ``(abscissa, value)`` pairs, e.g.
    ``(n_eff, median survival)``.  The confidence interval is the 95%
    t-interval on the slope.
    """
    pts = [(float(a), float(v)) for a, v in points]
    if len(pts) < 3:
        raise DegenerateFitError(f"need >= 3 points, got {len(pts)}")
    abscissae = [a for a, _ in pts]
    if len(set(abscissae)) != len(abscissae):
        raise DegenerateFitError("abscissae must be distinct")
    if any(a <= 0 for a, _ in pts) or any(v <= 0 for _, v in pts):
        raise ValidationError("log-log fit needs positive coordinates")
    lx = np.log10([a for a, _ in pts])
    ly = np.log10([v for _, v in pts])
    fit = _sps.linregress(lx, ly)
    half = float(_sps.t.ppf(0.975, df=len(pts) - 2)) * fit.stderr
    return ScalingFit(
        slope=float(fit.slope),
        intercept=float(fit.intercept),
        stderr=float(fit.stderr),
        ci_low=float(fit.slope - half),
        ci_high=float(fit.slope + half),
        n_points=len(pts),
    )


def binomial_ci(successes: int, total: int, n_sigma: float = 3.0) -> tuple[float, float]:
    """(frequency, normal-approximation half-width at n_sigma)."""
    if total < 1:
        raise InsufficientDataError("empty sample")
    f = successes / total
    return f, n_sigma * math.sqrt(max(f * (1.0 - f), 0.0) / total)
