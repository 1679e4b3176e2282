"""Temporal measurement scenarios and their sequential statistics.

A scenario fixes an initial state, unitary segments between labeled checkpoint
times, and the projective observable available at each checkpoint. Declaring a
measurement does not perform it: queries name the checkpoints that are
actually measured, which is exactly the distinction no-signaling-in-time
comparisons need. Joint distributions over measured checkpoints follow the
sequential rule: measure, collapse, evolve, measure again.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .qcore import (
    ATOL_CONSTRUCT,
    ATOL_PROB,
    DensityOperator,
    DimensionMismatchError,
    InvariantViolationError,
    ProjectiveMeasurement,
    UnitaryOp,
    collapse,
    evolve,
    outcome_probabilities,
)


class TemporalScenario:
    """Initial state, evolution segments, and per-checkpoint observables.

    Checkpoint times are opaque ordered labels; segment k evolves the system
    from checkpoint k to checkpoint k+1. The observable listed for a
    checkpoint is applied only when a query names that checkpoint.
    """

    __slots__ = ("initial", "segments", "measurements", "checkpoints")

    def __init__(
        self,
        initial: DensityOperator,
        segments: Sequence[UnitaryOp],
        measurements: Sequence[ProjectiveMeasurement],
        checkpoints: Sequence[str] | None = None,
    ) -> None:
        segments = tuple(segments)
        measurements = tuple(measurements)
        if len(measurements) != len(segments) + 1:
            raise InvariantViolationError(
                f"{len(segments)} segments require {len(segments) + 1} measurements, "
                f"got {len(measurements)}"
            )
        dim = initial.dim
        for seg in segments:
            if seg.dim != dim:
                raise DimensionMismatchError("segment dimension differs from state")
        for m in measurements:
            if m.dim != dim:
                raise DimensionMismatchError("measurement dimension differs from state")
        if checkpoints is None:
            checkpoints = tuple(f"t{k}" for k in range(len(measurements)))
        else:
            checkpoints = tuple(str(c) for c in checkpoints)
            if len(checkpoints) != len(measurements):
                raise InvariantViolationError("one checkpoint label per measurement required")
        object.__setattr__(self, "initial", initial)
        object.__setattr__(self, "segments", segments)
        object.__setattr__(self, "measurements", measurements)
        object.__setattr__(self, "checkpoints", checkpoints)

    def __setattr__(self, name, value):
        raise AttributeError("TemporalScenario is immutable")

    def __repr__(self) -> str:
        return f"TemporalScenario(dim={self.dim}, checkpoints={self.checkpoints})"

    @property
    def dim(self) -> int:
        return self.initial.dim

    @property
    def n_checkpoints(self) -> int:
        return len(self.measurements)

    def _check_index(self, k: int) -> int:
        k = int(k)
        if not 0 <= k < self.n_checkpoints:
            raise InvariantViolationError(
                f"checkpoint index {k} out of range 0..{self.n_checkpoints - 1}"
            )
        return k


@dataclass(frozen=True)
class JointDistribution:
    """Joint outcome table over an ordered subset of measured checkpoints."""

    variables: tuple[int, ...]
    table: Mapping[tuple[float, ...], float]

    def __post_init__(self) -> None:
        total = 0.0
        clean: dict[tuple[float, ...], float] = {}
        for cell, p in self.table.items():
            if len(cell) != len(self.variables):
                raise InvariantViolationError("cell arity differs from variable count")
            if p < -ATOL_PROB or p > 1.0 + ATOL_PROB:
                raise InvariantViolationError(f"probability {p} out of range for cell {cell}")
            p = min(1.0, max(0.0, float(p)))
            clean[tuple(float(v) for v in cell)] = p
            total += p
        if abs(total - 1.0) > ATOL_CONSTRUCT:
            raise InvariantViolationError(f"joint table sums to {total}, not 1")
        object.__setattr__(self, "variables", tuple(int(v) for v in self.variables))
        object.__setattr__(self, "table", clean)

    def marginal(self, variable: int) -> dict[float, float]:
        """Marginal distribution of one of the measured checkpoints."""
        if variable not in self.variables:
            raise InvariantViolationError(f"checkpoint {variable} is not part of this joint")
        pos = self.variables.index(variable)
        out: dict[float, float] = {}
        for cell, p in self.table.items():
            out[cell[pos]] = out.get(cell[pos], 0.0) + p
        return out

    def correlation(self) -> float:
        """Expectation of the product of outcomes; requires +-1 labels."""
        value = 0.0
        for cell, p in self.table.items():
            prod = 1.0
            for v in cell:
                if v not in (1.0, -1.0):
                    raise InvariantViolationError("correlation requires +-1 labels")
                prod *= v
            value += prod * p
        return min(1.0, max(-1.0, value))


def _evolved(s: TemporalScenario, state: DensityOperator, start: int, stop: int) -> DensityOperator:
    """Apply segments start..stop-1 in order."""
    for k in range(start, stop):
        state = evolve(state, s.segments[k])
    return state


def joint_multi_time(s: TemporalScenario, indices: Sequence[int]) -> JointDistribution:
    """Sequential joint distribution over the named checkpoints.

    The state is evolved through the segments; at each named checkpoint the
    declared observable is measured and the state collapses on the observed
    branch. Branches of (numerically) zero probability contribute rows of
    exact zeros instead of raising, so marginalization is total.
    """
    idx = tuple(s._check_index(k) for k in indices)
    if not idx:
        raise InvariantViolationError("at least one checkpoint index is required")
    if any(b <= a for a, b in zip(idx, idx[1:])):
        raise InvariantViolationError(f"checkpoint indices must be strictly increasing, got {idx}")

    # branches hold (labels so far, probability, conditional state or None when dead)
    branches: list[tuple[tuple[float, ...], float, DensityOperator | None]] = [
        ((), 1.0, s.initial)
    ]
    measured = set(idx)
    for k in range(idx[-1] + 1):
        if k > 0:
            branches = [
                (labels, p, evolve(state, s.segments[k - 1]) if state is not None else None)
                for labels, p, state in branches
            ]
        if k in measured:
            m = s.measurements[k]
            next_branches: list[tuple[tuple[float, ...], float, DensityOperator | None]] = []
            for labels, p, state in branches:
                if state is None:
                    for label, _ in m.branches:
                        next_branches.append((labels + (label,), 0.0, None))
                    continue
                for label, pk in outcome_probabilities(state, m):
                    if pk <= ATOL_PROB:
                        next_branches.append((labels + (label,), 0.0, None))
                    else:
                        next_branches.append(
                            (labels + (label,), p * pk, collapse(state, m, label))
                        )
            branches = next_branches
    table = {labels: p for labels, p, _ in branches}
    return JointDistribution(variables=idx, table=table)


def joint_two_time(s: TemporalScenario, i: int, j: int) -> JointDistribution:
    """Joint distribution P(A at t_i, B at t_j) with measurements at t_i and t_j only."""
    i, j = s._check_index(i), s._check_index(j)
    if i >= j:
        raise InvariantViolationError(f"need i < j, got i={i}, j={j}")
    return joint_multi_time(s, (i, j))


def marginal_without(s: TemporalScenario, j: int) -> dict[float, float]:
    """Outcome distribution at t_j with no earlier measurement performed."""
    j = s._check_index(j)
    state = _evolved(s, s.initial, 0, j)
    return dict(outcome_probabilities(state, s.measurements[j]))


def marginal_with(s: TemporalScenario, i: int, j: int) -> dict[float, float]:
    """Outcome distribution at t_j when t_i was also measured (and discarded).

    Exact marginalization of the sequential two-time joint; no renormalization.
    """
    joint = joint_two_time(s, i, j)
    return joint.marginal(j)


def correlation(s: TemporalScenario, i: int, j: int) -> float:
    """Two-time correlation <Q_i Q_j> for dichotomic +-1 observables."""
    for k in (s._check_index(i), s._check_index(j)):
        if not set(s.measurements[k].labels) <= {1.0, -1.0}:
            raise InvariantViolationError("correlation requires +-1 labels")
    return joint_two_time(s, i, j).correlation()


class AmplitudeChain:
    """First-measurement amplitudes and transition amplitudes between outcomes.

    For a pure initial state and rank-1 observables, `a[A]` is the amplitude
    of outcome A at the earlier checkpoint and `trans[A, B]` the transition
    amplitude from outcome A to outcome B at the later one.
    """

    __slots__ = ("a", "trans")

    def __init__(self, a, trans) -> None:
        a = np.asarray(a, dtype=complex).reshape(-1)
        trans = np.asarray(trans, dtype=complex)
        if trans.ndim != 2 or trans.shape[0] != a.shape[0]:
            raise InvariantViolationError("trans must have one row per first outcome")
        if abs(float(np.sum(np.abs(a) ** 2)) - 1.0) > ATOL_CONSTRUCT:
            raise InvariantViolationError("first-outcome amplitudes are not normalized")
        rows = np.sum(np.abs(trans) ** 2, axis=1)
        if np.max(np.abs(rows - 1.0)) > ATOL_CONSTRUCT:
            raise InvariantViolationError("transition amplitude rows are not normalized")
        a.setflags(write=False)
        trans.setflags(write=False)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "trans", trans)

    def __setattr__(self, name, value):
        raise AttributeError("AmplitudeChain is immutable")


def _rank_one_vector(proj: np.ndarray) -> np.ndarray:
    """Unit vector spanning the range of a rank-1 projector (phase arbitrary)."""
    col = int(np.argmax(np.abs(np.diagonal(proj))))
    v = proj[:, col]
    return v / np.linalg.norm(v)


def extract_amplitude_chain(s: TemporalScenario, i: int, j: int) -> AmplitudeChain:
    """Amplitude chain for checkpoints i < j of a pure-initial-state scenario.

    Defined only for pure initial states and rank-1 observables at both
    checkpoints; mixed states have no single amplitude per branch and raise.
    """
    i, j = s._check_index(i), s._check_index(j)
    if i >= j:
        raise InvariantViolationError(f"need i < j, got i={i}, j={j}")
    if abs(s.initial.purity() - 1.0) > ATOL_CONSTRUCT:
        raise InvariantViolationError("amplitude chain requires a pure initial state")
    for k in (i, j):
        if not s.measurements[k].is_rank_one():
            raise InvariantViolationError(
                "amplitude chain requires rank-1 projectors at both checkpoints"
            )
    eigvals, eigvecs = np.linalg.eigh(s.initial.mat)
    psi0 = eigvecs[:, -1]

    v = np.eye(s.dim, dtype=complex)
    for k in range(0, i):
        v = s.segments[k].mat @ v
    w = np.eye(s.dim, dtype=complex)
    for k in range(i, j):
        w = s.segments[k].mat @ w

    first = [_rank_one_vector(proj) for _, proj in s.measurements[i].branches]
    second = [_rank_one_vector(proj) for _, proj in s.measurements[j].branches]
    psi_i = v @ psi0
    a = np.array([vec.conj() @ psi_i for vec in first])
    trans = np.array(
        [[phi.conj() @ (w @ chi) for phi in second] for chi in first]
    )
    return AmplitudeChain(a, trans)


def interference_difference(c: AmplitudeChain, b: int) -> float:
    """Coherent-minus-incoherent probability for the later outcome indexed b.

    Returns |sum_A a_A a_{A->B}|^2 - sum_A |a_A|^2 |a_{A->B}|^2, the quantum
    interference term that an intermediate measurement removes. A chain with a
    single branch has no cross terms and yields exactly 0.
    """
    b = int(b)
    if not 0 <= b < c.trans.shape[1]:
        raise InvariantViolationError(f"outcome index {b} out of range")
    col = c.trans[:, b]
    coherent = abs(np.sum(c.a * col)) ** 2
    incoherent = float(np.sum((np.abs(c.a) ** 2) * (np.abs(col) ** 2)))
    return float(coherent - incoherent)


# JSON wire format: complex entries as [re, im] pairs, matrices flattened
# row-major with length dim*dim.
SCENARIO_SCHEMA: dict = {
    "type": "object",
    "required": ["dim", "initial", "segments", "measurements"],
    "additionalProperties": False,
    "properties": {
        "dim": {"type": "integer", "minimum": 1},
        "initial": {"$ref": "#/$defs/matrix"},
        "segments": {"type": "array", "items": {"$ref": "#/$defs/matrix"}},
        "measurements": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["labels", "projectors"],
                "additionalProperties": False,
                "properties": {
                    "labels": {"type": "array", "items": {"type": "number"}},
                    "projectors": {"type": "array", "items": {"$ref": "#/$defs/matrix"}},
                },
            },
        },
    },
    "$defs": {
        "matrix": {
            "type": "array",
            "items": {
                "type": "array",
                "items": {"type": "number"},
                "minItems": 2,
                "maxItems": 2,
            },
        }
    },
}


def _matrix_to_pairs(mat: np.ndarray) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in np.asarray(mat, dtype=complex).reshape(-1)]


def _matrix_from_pairs(pairs: Sequence[Sequence[float]], dim: int, name: str) -> np.ndarray:
    flat = np.asarray(pairs, dtype=float)
    if flat.ndim != 2 or flat.shape[1] != 2 or flat.shape[0] != dim * dim:
        raise InvariantViolationError(
            f"{name} must be a row-major list of {dim * dim} [re, im] pairs"
        )
    return (flat[:, 0] + 1j * flat[:, 1]).reshape(dim, dim)


def scenario_to_json(s: TemporalScenario) -> dict:
    """Serialize a scenario to the JSON wire format."""
    return {
        "dim": s.dim,
        "initial": _matrix_to_pairs(s.initial.mat),
        "segments": [_matrix_to_pairs(seg.mat) for seg in s.segments],
        "measurements": [
            {
                "labels": [float(label) for label in m.labels],
                "projectors": [_matrix_to_pairs(proj) for _, proj in m.branches],
            }
            for m in s.measurements
        ],
    }


def scenario_from_json(obj: Mapping) -> TemporalScenario:
    """Parse the JSON wire format back into a validated scenario."""
    dim = int(obj["dim"])
    initial = DensityOperator(_matrix_from_pairs(obj["initial"], dim, "initial"))
    segments = [
        UnitaryOp(_matrix_from_pairs(seg, dim, f"segment {k}"))
        for k, seg in enumerate(obj["segments"])
    ]
    measurements = []
    for k, spec in enumerate(obj["measurements"]):
        labels = spec["labels"]
        projs = spec["projectors"]
        if len(labels) != len(projs):
            raise InvariantViolationError(f"measurement {k}: one projector per label required")
        measurements.append(
            ProjectiveMeasurement(
                [
                    (float(label), _matrix_from_pairs(proj, dim, f"projector {k}"))
                    for label, proj in zip(labels, projs)
                ]
            )
        )
    return TemporalScenario(initial, segments, measurements)
