"""Gaussian double slit on a one-dimensional detection screen (hbar = 1).

Each slit emits a Gaussian wave packet of half-width sigma centered at +-d/2
that spreads freely for a propagation time; the closed form for the evolved
single-packet density is

    |psi(x, t)|^2  propto  exp(-(x - x0)^2 / (2 sigma_t^2)),
    sigma_t^2 = sigma^2 + (t / (2 m sigma))^2.

Experiment I keeps both slits open (coherent superposition, cross term and
fringes included); experiment II blocks the left slit with a detector so only
right-slit objects arrive, experiment III mirrors it, and II_AND_III is their
weighted mixture, which a macrorealist expects to reproduce experiment I.
Densities are evaluated on the screen grid, integrated with Simpson's rule,
and reported normalized over the observation window.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .criteria import NSITReport, nsit_compare
from .qcore import InvariantViolationError

#: Relative Simpson/trapezoid disagreement beyond which the grid cannot be trusted.
QUADRATURE_RTOL = 1e-3
#: Default number of equal-width screen bins for distribution-level comparisons.
DEFAULT_SCREEN_BINS = 40


class Experiment(Enum):
    I = "I"
    II = "II"
    III = "III"
    II_AND_III = "II_AND_III"


@dataclass(frozen=True)
class DoubleSlitParams:
    """Slit geometry, particle mass, propagation time, and screen grid."""

    sigma: float
    d: float
    mass: float
    t_prop: float
    grid: tuple[float, float, int]

    def __post_init__(self) -> None:
        if not self.sigma > 0.0:
            raise InvariantViolationError("sigma must be positive")
        if not self.d > 0.0:
            raise InvariantViolationError("slit distance d must be positive")
        if not self.mass > 0.0:
            raise InvariantViolationError("mass must be positive")
        if self.t_prop < 0.0:
            raise InvariantViolationError("propagation time must be nonnegative")
        x_min, x_max, n_points = self.grid
        n_points = int(n_points)
        if not x_min < x_max:
            raise InvariantViolationError("grid needs x_min < x_max")
        if n_points < 3 or n_points % 2 == 0:
            raise InvariantViolationError("Simpson integration needs an odd n_points >= 3")
        object.__setattr__(self, "grid", (float(x_min), float(x_max), n_points))

    @property
    def sigma_t(self) -> float:
        """Spread of each single-slit packet after the propagation time."""
        return math.sqrt(self.sigma**2 + (self.t_prop / (2.0 * self.mass * self.sigma)) ** 2)

    @property
    def fringe_wavenumber(self) -> float:
        """Spatial frequency of the two-slit cross term on the screen."""
        tau = self.t_prop / (2.0 * self.mass * self.sigma**2)
        return self.d * tau / (2.0 * self.sigma_t**2)

    def x_values(self) -> np.ndarray:
        x_min, x_max, n_points = self.grid
        return np.linspace(x_min, x_max, n_points)


@dataclass(frozen=True)
class SlitPattern:
    """Normalized screen pattern: densities and Simpson point masses on the grid."""

    experiment: Experiment
    x: np.ndarray
    density: np.ndarray
    masses: np.ndarray

    def binned(self, n_bins: int = DEFAULT_SCREEN_BINS) -> dict[float, float]:
        """Integrate the pattern over equal-width screen bins keyed by bin center.

        Coarse position is the macrovariable here, so distribution-level
        comparisons run over detector-pixel bins rather than raw grid points.
        Each bin mass is the Simpson integral of the normalized density over
        the bin, which requires the bin edges to fall on grid points with an
        even number of grid intervals per bin; bin masses then sum to exactly
        the whole-window integral, 1.
        """
        n_bins = int(n_bins)
        if n_bins < 1:
            raise InvariantViolationError("need at least one bin")
        intervals = self.x.shape[0] - 1
        per_bin = intervals // n_bins
        if intervals % n_bins != 0 or per_bin % 2 != 0:
            raise InvariantViolationError(
                f"{n_bins} bins do not align with the {intervals}-interval grid "
                "(need an even number of grid intervals per bin)"
            )
        x_min, x_max = float(self.x[0]), float(self.x[-1])
        width = (x_max - x_min) / n_bins
        out: dict[float, float] = {}
        for b in range(n_bins):
            lo = b * per_bin
            segment = self.density[lo : lo + per_bin + 1]
            weights = _simpson_weights(self.x[lo : lo + per_bin + 1])
            out[float(x_min + width * (b + 0.5))] = float(weights @ segment)
        return out


def _simpson_weights(x: np.ndarray) -> np.ndarray:
    h = x[1] - x[0]
    w = np.full(x.shape[0], 2.0)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return w * (h / 3.0)


def _raw_density(p: DoubleSlitParams, experiment: Experiment, x: np.ndarray, weight: float) -> np.ndarray:
    var2 = 2.0 * p.sigma_t**2
    norm = 1.0 / math.sqrt(math.pi * var2)
    env_left = norm * np.exp(-((x + p.d / 2.0) ** 2) / var2)
    env_right = norm * np.exp(-((x - p.d / 2.0) ** 2) / var2)
    if experiment is Experiment.II:
        return env_right
    if experiment is Experiment.III:
        return env_left
    if experiment is Experiment.II_AND_III:
        return weight * env_right + (1.0 - weight) * env_left
    cross = 2.0 * norm * np.exp(-(x**2 + p.d**2 / 4.0) / var2) * np.cos(p.fringe_wavenumber * x)
    return 0.5 * (env_left + env_right + cross)


def double_slit_pattern(
    p: DoubleSlitParams, experiment: Experiment, weight: float = 0.5
) -> SlitPattern:
    """Screen pattern for one experiment, normalized over the observation window.

    `weight` is the mixture weight of experiment II inside II_AND_III (the
    two-slit superposition of experiment I always uses equal amplitudes).
    Raises when the grid is too coarse to integrate the pattern reliably,
    detected as Simpson and trapezoid quadrature disagreeing by more than
    0.1% on the same grid.
    """
    if not 0.0 <= weight <= 1.0:
        raise InvariantViolationError(f"mixture weight {weight} must lie in [0, 1]")
    experiment = Experiment(experiment)
    x = p.x_values()
    if experiment is Experiment.II_AND_III:
        # exact arithmetic mixture of the normalized single-slit patterns
        right = double_slit_pattern(p, Experiment.II)
        left = double_slit_pattern(p, Experiment.III)
        density = weight * right.density + (1.0 - weight) * left.density
        masses = weight * right.masses + (1.0 - weight) * left.masses
        return SlitPattern(experiment=experiment, x=x, density=density, masses=masses)

    raw = _raw_density(p, experiment, x, weight)
    weights = _simpson_weights(x)
    total_simpson = float(weights @ raw)
    h = float(x[1] - x[0])
    total_trapezoid = h * float(raw.sum() - 0.5 * (raw[0] + raw[-1]))
    if total_simpson <= 0.0 or abs(total_simpson - total_trapezoid) > QUADRATURE_RTOL * total_simpson:
        raise InvariantViolationError(
            "grid too coarse: Simpson and trapezoid integrals disagree "
            f"({total_simpson:.6e} vs {total_trapezoid:.6e})"
        )
    density = raw / total_simpson
    masses = weights * density
    for arr in (x, density, masses):
        arr.setflags(write=False)
    return SlitPattern(experiment=experiment, x=x, density=density, masses=masses)


def count_local_maxima(values: np.ndarray, noise_floor: float = 1e-8) -> int:
    """Number of interior local maxima, ignoring wiggles below the noise floor.

    Adjacent differences smaller than `noise_floor` in magnitude are treated
    as flat, so a smooth peak sampled finely still counts exactly once.
    """
    diffs = np.diff(np.asarray(values, dtype=float))
    signs = np.where(diffs > noise_floor, 1, np.where(diffs < -noise_floor, -1, 0))
    count = 0
    previous = 0
    for sign in signs:
        if sign == 0:
            continue
        if previous == 1 and sign == -1:
            count += 1
        previous = sign
    return count


def double_slit_nsit(
    p: DoubleSlitParams, n_bins: int = DEFAULT_SCREEN_BINS, weight: float = 0.5
) -> NSITReport:
    """No-signaling-in-time comparison of experiment I against the II/III mixture.

    Both patterns are reduced to the same equal-width screen bins (the
    macroscopically distinct positions) before comparing, so the report's
    deltas and kappa refer to detector-bin probabilities.
    """
    both_open = double_slit_pattern(p, Experiment.I).binned(n_bins)
    mixture = double_slit_pattern(p, Experiment.II_AND_III, weight=weight).binned(n_bins)
    return nsit_compare(both_open, mixture)
