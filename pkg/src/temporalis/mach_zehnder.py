"""Mach-Zehnder interferometer with path measurements at three checkpoint times.

The macrovariable is which of the two paths the object occupies: +1 before the
first beam splitter, inside the interferometer, and after the second beam
splitter. Parameters are the two reflectivities, the phase shift in the -1
arm, and the initial weight q of the +1 path. Closed forms for the three
two-time correlations, the Wigner-form inequality combination, and the
no-signaling-in-time difference are exposed next to a density-matrix
realization used for cross-validation; the closed forms are authoritative.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .protocol import TemporalScenario
from .qcore import DensityOperator, InvariantViolationError, UnitaryOp, dichotomic_z


@dataclass(frozen=True)
class MZParams:
    """Reflectivities, phase, and initial +1 weight of the interferometer."""

    r1: float
    r2: float
    phi: float
    q: float = 0.5

    def __post_init__(self) -> None:
        for name in ("r1", "r2", "q"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise InvariantViolationError(f"{name}={value} must lie in [0, 1]")
        if not math.isfinite(self.phi):
            raise InvariantViolationError("phi must be finite")

    @property
    def t1(self) -> float:
        return 1.0 - self.r1

    @property
    def t2(self) -> float:
        return 1.0 - self.r2


class MZCorrelations(NamedTuple):
    c01: float
    c02: float
    c12: float


def _visibility(p: MZParams) -> float:
    return math.sqrt(p.r1 * p.t1 * p.r2 * p.t2)


def mz_correlations_analytic(p: MZParams) -> MZCorrelations:
    """Closed-form two-time correlations; independent of q.

    C01 = 1 - 2 R1
    C12 = 2 R2 - 1
    C02 = -1 + 2 R1 + 2 R2 - 4 R1 R2 + 4 sqrt(R1 T1 R2 T2) cos(phi)
    """
    c01 = 1.0 - 2.0 * p.r1
    c12 = 2.0 * p.r2 - 1.0
    c02 = (
        -1.0 + 2.0 * p.r1 + 2.0 * p.r2 - 4.0 * p.r1 * p.r2
        + 4.0 * _visibility(p) * math.cos(p.phi)
    )
    return MZCorrelations(c01=c01, c02=c02, c12=c12)


def mz_wigner_K(p: MZParams) -> float:
    """Wigner-form combination K = C01 + C12 - C02 = 1 - 4 R1 T2 - 4 sqrt(R1 T1 R2 T2) cos(phi)."""
    return 1.0 - 4.0 * p.r1 * p.t2 - 4.0 * _visibility(p) * math.cos(p.phi)


def mz_nsit_delta_analytic(p: MZParams) -> float:
    """Closed-form Delta(+1) = P(+1 at t2) - P(+1 at t2 | t1 measured).

    Equals 2 (2q - 1) sqrt(R1 T1 R2 T2) cos(phi): nonzero exactly when the
    parameters allow interference, i.e. neither reflectivity is 0 or 1,
    cos(phi) != 0 and q != 1/2.
    """
    return 2.0 * (2.0 * p.q - 1.0) * _visibility(p) * math.cos(p.phi) + 0.0


def mz_nsit_probs_analytic(p: MZParams) -> tuple[dict[float, float], dict[float, float]]:
    """Closed-form outcome distributions at t2 without / with the t1 measurement."""
    c02 = mz_correlations_analytic(p).c02
    without_plus = 0.5 + 0.5 * (2.0 * p.q - 1.0) * c02
    with_plus = 0.5 + (2.0 * p.q - 1.0) * (-0.5 + p.r1 + p.r2 - 2.0 * p.r1 * p.r2)
    return (
        {1.0: without_plus, -1.0: 1.0 - without_plus},
        {1.0: with_plus, -1.0: 1.0 - with_plus},
    )


def mz_marginal_without_analytic(p: MZParams, j: int) -> dict[float, float]:
    """Closed-form outcome distribution at checkpoint j with no earlier measurement."""
    if j == 0:
        plus = p.q
    elif j == 1:
        plus = p.q * p.t1 + (1.0 - p.q) * p.r1
    elif j == 2:
        plus = 0.5 + 0.5 * (2.0 * p.q - 1.0) * mz_correlations_analytic(p).c02
    else:
        raise InvariantViolationError(f"checkpoint index {j} out of range 0..2")
    return {1.0: plus, -1.0: 1.0 - plus}


def mz_joint_analytic(p: MZParams, i: int, j: int) -> dict[tuple[float, float], float]:
    """Closed-form sequential two-time joint table for checkpoints i < j.

    The first measurement prepares a definite path, so each table is a first
    marginal times path-conditional transfer probabilities.
    """
    vis_cos = 2.0 * _visibility(p) * math.cos(p.phi)
    if (i, j) == (0, 1):
        first_plus = p.q
        cond = {1.0: p.t1, -1.0: p.r1}  # P(+1 at t1 | path at t0)
    elif (i, j) == (1, 2):
        first_plus = p.q * p.t1 + (1.0 - p.q) * p.r1
        cond = {1.0: p.r2, -1.0: p.t2}  # crossed second splitter
    elif (i, j) == (0, 2):
        first_plus = p.q
        cond = {
            1.0: p.t1 * p.r2 + p.r1 * p.t2 + vis_cos,
            -1.0: p.r1 * p.r2 + p.t1 * p.t2 - vis_cos,
        }
    else:
        raise InvariantViolationError(f"no analytic joint for checkpoint pair ({i}, {j})")
    table: dict[tuple[float, float], float] = {}
    for a in (1.0, -1.0):
        p_a = first_plus if a == 1.0 else 1.0 - first_plus
        for b in (1.0, -1.0):
            p_b_given_a = cond[a] if b == 1.0 else 1.0 - cond[a]
            table[(a, b)] = p_a * p_b_given_a
    return table


def beamsplitter(r: float) -> UnitaryOp:
    """Beam splitter keeping path labels on transmission: [[sqrt(T), i sqrt(R)], [i sqrt(R), sqrt(T)]]."""
    rt = math.sqrt(r)
    tt = math.sqrt(1.0 - r)
    return UnitaryOp(np.array([[tt, 1j * rt], [1j * rt, tt]]))


def beamsplitter_crossed(r: float) -> UnitaryOp:
    """Beam splitter whose output ports are crossed: labels swap on transmission.

    The arms of the interferometer cross between the two beam splitters, so
    the second one maps transmission to the opposite path label. This is the
    port assignment under which the simulated correlations reproduce the
    closed forms for all parameters.
    """
    rt = math.sqrt(r)
    tt = math.sqrt(1.0 - r)
    return UnitaryOp(np.array([[1j * rt, tt], [tt, 1j * rt]]))


def phase_shift(phi: float) -> UnitaryOp:
    """Phase applied to the -1 arm: diag(1, e^{i phi})."""
    return UnitaryOp(np.diag([1.0, np.exp(1j * phi)]))


def mz_build_scenario(p: MZParams) -> TemporalScenario:
    """Density-matrix realization of the interferometer.

    Initial state q|+1><+1| + (1-q)|-1><-1|; segment t0 -> t1 is the first
    beam splitter, segment t1 -> t2 is the arm phase followed by the crossed
    second beam splitter; the path observable (+1/-1) is available at every
    checkpoint.
    """
    initial = DensityOperator.diagonal([p.q, 1.0 - p.q])
    seg1 = beamsplitter(p.r1)
    seg2 = UnitaryOp(beamsplitter_crossed(p.r2).mat @ phase_shift(p.phi).mat)
    z = dichotomic_z()
    return TemporalScenario(initial, [seg1, seg2], [z, z, z])
