"""Uniformly precessing dichotomic macrovariable (macro-spin counterexample).

Starting from a half/half mixture of the two outcomes, precession at frequency
omega yields two-time correlations cos(omega * (t_j - t_i)) while every
single-time distribution stays uniform, so no-signaling in time holds between
every pair of times even though suitably spaced times violate the four-time
inequality maximally. The closed forms below are authoritative; a qubit
realization is provided for cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .protocol import TemporalScenario
from .qcore import DensityOperator, InvariantViolationError, UnitaryOp, dichotomic_z


@dataclass(frozen=True)
class SpinParams:
    """Precession frequency and the ordered measurement times."""

    omega: float
    times: tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.omega > 0.0:
            raise InvariantViolationError(f"omega={self.omega} must be positive")
        times = tuple(float(t) for t in self.times)
        if len(times) < 2:
            raise InvariantViolationError("at least two measurement times are required")
        if any(b <= a for a, b in zip(times, times[1:])):
            raise InvariantViolationError(f"times must be strictly increasing, got {times}")
        object.__setattr__(self, "times", times)

    def _check_pair(self, i: int, j: int) -> tuple[int, int]:
        for k in (i, j):
            if not 0 <= k < len(self.times):
                raise InvariantViolationError(f"time index {k} out of range")
        if i >= j:
            raise InvariantViolationError(f"need i < j, got i={i}, j={j}")
        return int(i), int(j)


def spin_correlation(p: SpinParams, i: int, j: int) -> float:
    """Two-time correlation cos(omega * (t_j - t_i))."""
    i, j = p._check_pair(i, j)
    return math.cos(p.omega * (p.times[j] - p.times[i]))


def spin_nsit_probs(p: SpinParams, i: int, j: int) -> tuple[dict[float, float], dict[float, float]]:
    """Later-time distributions with and without the earlier measurement.

    The half/half initial mixture keeps every marginal uniform, measured or
    not, so both distributions are {+1: 1/2, -1: 1/2} for every pair.
    """
    p._check_pair(i, j)
    uniform = {1.0: 0.5, -1.0: 0.5}
    return dict(uniform), dict(uniform)


def precession(omega: float, dt: float) -> UnitaryOp:
    """Rotation by omega*dt about the x axis: exp(-i omega dt sigma_x / 2)."""
    half = 0.5 * omega * dt
    c, s = math.cos(half), math.sin(half)
    return UnitaryOp(np.array([[c, -1j * s], [-1j * s, c]]))


def spin_build_scenario(p: SpinParams) -> TemporalScenario:
    """Qubit realization: maximally mixed start, precession segments, +-1 observable."""
    segments = [
        precession(p.omega, b - a) for a, b in zip(p.times, p.times[1:])
    ]
    z = dichotomic_z()
    return TemporalScenario(
        DensityOperator.maximally_mixed(2),
        segments,
        [z] * len(p.times),
        checkpoints=[f"t={t:g}" for t in p.times],
    )
