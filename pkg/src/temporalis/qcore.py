"""Dense complex primitives: density operators, unitaries, projective measurements.

Everything is double precision and dense; the systems handled here are small
(dim <= ~64), so exactness and simplicity win over scalability. All types
validate their defining invariants at construction time and are immutable
afterwards, which makes instances safe to share between threads. All
operations are pure functions returning new objects.
"""

from __future__ import annotations

import math
from functools import lru_cache
from typing import Sequence

import numpy as np

# Tolerance constants, fixed here and imported everywhere else.
ATOL_CONSTRUCT = 1e-10   # entrywise tolerance for construction-time checks
ATOL_PROB = 1e-12        # probability clamping / null-branch threshold
PSD_FLOOR = -1e-9        # most negative eigenvalue tolerated in a state


class DimensionMismatchError(ValueError):
    """Operands act on Hilbert spaces of different dimension."""


class NullEventError(ValueError):
    """Raised when conditioning on a zero-probability measurement branch."""


class InvariantViolationError(ValueError):
    """Raised when a constructed object violates its numerical invariants."""


def _raise_matrix_error(arr: np.ndarray, name: str, reason: str) -> None:
    """Cold path: distinguish non-finite entries from a genuine invariant failure."""
    if not np.isfinite(arr).all():
        raise InvariantViolationError(f"{name} contains non-finite entries")
    raise InvariantViolationError(f"{name} {reason}")


def _as_square_complex(mat, name: str) -> np.ndarray:
    arr = np.array(mat, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise InvariantViolationError(f"{name} must be square, got shape {arr.shape}")
    if arr.shape[0] == 0:
        raise InvariantViolationError(f"{name} must have positive dimension")
    return arr


@lru_cache(maxsize=None)
def _eye(dim: int) -> np.ndarray:
    ident = np.eye(dim, dtype=complex)
    ident.setflags(write=False)
    return ident


def _max_abs(mat: np.ndarray) -> float:
    return float(np.abs(mat).max())


def min_eigenvalue_hermitian(mat: np.ndarray) -> float:
    """Smallest eigenvalue of a Hermitian matrix.

    Closed form for dim <= 2 (the hot path when simulating dichotomic
    macrovariables), LAPACK beyond that.
    """
    dim = mat.shape[0]
    if dim == 1:
        return float(mat[0, 0].real)
    if dim == 2:
        a = float(mat[0, 0].real)
        c = float(mat[1, 1].real)
        disc = math.hypot(a - c, 2.0 * abs(mat[0, 1]))
        return 0.5 * (a + c - disc)
    return float(np.linalg.eigvalsh(mat)[0])


class DensityOperator:
    """Hermitian, unit-trace, positive-semidefinite state matrix."""

    __slots__ = ("mat",)

    def __init__(self, mat) -> None:
        arr = _as_square_complex(mat, "density operator")
        # a NaN/Inf entry makes the deviation NaN, failing this comparison too
        if not _max_abs(arr - arr.conj().T) <= ATOL_CONSTRUCT:
            _raise_matrix_error(arr, "density operator", "is not Hermitian")
        trace = complex(arr.trace())
        if not abs(trace - 1.0) <= ATOL_CONSTRUCT:
            raise InvariantViolationError(f"density operator trace {trace} is not 1")
        if min_eigenvalue_hermitian(arr) < PSD_FLOOR:
            raise InvariantViolationError("density operator is not positive semidefinite")
        arr.setflags(write=False)
        object.__setattr__(self, "mat", arr)

    def __setattr__(self, name, value):
        raise AttributeError("DensityOperator is immutable")

    def __repr__(self) -> str:
        return f"DensityOperator(dim={self.dim})"

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    def purity(self) -> float:
        """Tr[rho^2]; equals 1 iff the state is pure."""
        # Tr[A B] = vdot(A, B) for Hermitian A
        return float(np.vdot(self.mat, self.mat).real)

    @staticmethod
    def pure(vector: Sequence[complex]) -> "DensityOperator":
        """Projector |v><v| onto a (normalized copy of a) state vector."""
        v = np.asarray(vector, dtype=complex).reshape(-1)
        norm = float(np.linalg.norm(v))
        if norm <= 0.0 or not np.isfinite(norm):
            raise InvariantViolationError("cannot normalize a zero state vector")
        v = v / norm
        return DensityOperator(np.outer(v, v.conj()))

    @staticmethod
    def diagonal(populations: Sequence[float]) -> "DensityOperator":
        """Classical mixture of basis states with the given populations."""
        return DensityOperator(np.diag(np.asarray(populations, dtype=complex)))

    @staticmethod
    def maximally_mixed(dim: int) -> "DensityOperator":
        return DensityOperator(_eye(dim) / dim)


class UnitaryOp:
    """Unitary evolution operator for one scenario segment."""

    __slots__ = ("mat",)

    def __init__(self, mat) -> None:
        arr = _as_square_complex(mat, "unitary")
        if not _max_abs(arr.conj().T @ arr - _eye(arr.shape[0])) <= ATOL_CONSTRUCT:
            _raise_matrix_error(arr, "matrix", "is not unitary")
        arr.setflags(write=False)
        object.__setattr__(self, "mat", arr)

    def __setattr__(self, name, value):
        raise AttributeError("UnitaryOp is immutable")

    def __repr__(self) -> str:
        return f"UnitaryOp(dim={self.dim})"

    @property
    def dim(self) -> int:
        return self.mat.shape[0]

    @staticmethod
    def identity(dim: int) -> "UnitaryOp":
        return UnitaryOp(_eye(dim))


class ProjectiveMeasurement:
    """Complete set of mutually orthogonal projectors with distinct real labels.

    Degenerate (rank-k) projectors are allowed; nothing restricts branches to
    rank 1.
    """

    __slots__ = ("branches", "_by_label")

    def __init__(self, branches: Sequence[tuple[float, np.ndarray]]) -> None:
        if not branches:
            raise InvariantViolationError("measurement needs at least one branch")
        checked = []
        for label, proj in branches:
            arr = _as_square_complex(proj, f"projector for label {label}")
            if not _max_abs(arr - arr.conj().T) <= ATOL_CONSTRUCT:
                _raise_matrix_error(arr, f"projector for label {label}", "is not Hermitian")
            if not _max_abs(arr @ arr - arr) <= ATOL_CONSTRUCT:
                raise InvariantViolationError(f"projector for label {label} is not idempotent")
            arr.setflags(write=False)
            checked.append((float(label), arr))
        dim = checked[0][1].shape[0]
        for label, arr in checked:
            if arr.shape[0] != dim:
                raise DimensionMismatchError("projectors have mixed dimensions")
        labels = [label for label, _ in checked]
        if len(set(labels)) != len(labels):
            raise InvariantViolationError("measurement labels must be pairwise distinct")
        for i in range(len(checked)):
            for j in range(i + 1, len(checked)):
                if _max_abs(checked[i][1] @ checked[j][1]) > ATOL_CONSTRUCT:
                    raise InvariantViolationError(
                        f"projectors {labels[i]} and {labels[j]} are not orthogonal"
                    )
        total = sum(arr for _, arr in checked)
        if _max_abs(total - _eye(dim)) > ATOL_CONSTRUCT:
            raise InvariantViolationError("projectors do not sum to the identity")
        object.__setattr__(self, "branches", tuple(checked))
        object.__setattr__(self, "_by_label", {label: arr for label, arr in checked})

    def __setattr__(self, name, value):
        raise AttributeError("ProjectiveMeasurement is immutable")

    def __repr__(self) -> str:
        return f"ProjectiveMeasurement(dim={self.dim}, labels={self.labels})"

    @property
    def dim(self) -> int:
        return self.branches[0][1].shape[0]

    @property
    def labels(self) -> tuple[float, ...]:
        return tuple(label for label, _ in self.branches)

    def projector(self, label: float) -> np.ndarray:
        try:
            return self._by_label[float(label)]
        except KeyError:
            raise InvariantViolationError(
                f"unknown outcome label {label}; declared labels are {self.labels}"
            ) from None

    def is_rank_one(self) -> bool:
        """True when every branch projects onto a one-dimensional subspace."""
        return all(abs(np.trace(arr).real - 1.0) <= ATOL_CONSTRUCT for _, arr in self.branches)

    @staticmethod
    def computational(labels: Sequence[float]) -> "ProjectiveMeasurement":
        """Rank-1 measurement in the standard basis, one label per basis vector."""
        dim = len(labels)
        branches = []
        for k, label in enumerate(labels):
            proj = np.zeros((dim, dim), dtype=complex)
            proj[k, k] = 1.0
            branches.append((float(label), proj))
        return ProjectiveMeasurement(branches)

    @staticmethod
    def from_basis(labels: Sequence[float], basis: np.ndarray) -> "ProjectiveMeasurement":
        """Rank-1 measurement onto the columns of a unitary basis matrix."""
        basis = np.asarray(basis, dtype=complex)
        if len(labels) != basis.shape[1]:
            raise DimensionMismatchError("one label per basis column is required")
        branches = [
            (float(label), np.outer(basis[:, k], basis[:, k].conj()))
            for k, label in enumerate(labels)
        ]
        return ProjectiveMeasurement(branches)


@lru_cache(maxsize=1)
def dichotomic_z() -> ProjectiveMeasurement:
    """The qubit path/spin observable with outcomes +1 (basis 0) and -1 (basis 1).

    Cached: measurements are immutable, so one shared instance serves everyone.
    """
    return ProjectiveMeasurement.computational((1.0, -1.0))


def evolve(state: DensityOperator, u: UnitaryOp) -> DensityOperator:
    """Unitary update rho -> U rho U^dagger."""
    if state.dim != u.dim:
        raise DimensionMismatchError(f"state dim {state.dim} != unitary dim {u.dim}")
    return DensityOperator(u.mat @ state.mat @ u.mat.conj().T)


def outcome_probabilities(
    state: DensityOperator, m: ProjectiveMeasurement
) -> list[tuple[float, float]]:
    """Born probabilities Tr[rho Pi] for every branch, in declared label order.

    Values are clamped to [0, 1]; anything outside [-1e-12, 1 + 1e-12] before
    clamping, or a total off 1 by more than 1e-10, indicates corrupt inputs and
    raises.
    """
    if state.dim != m.dim:
        raise DimensionMismatchError(f"state dim {state.dim} != measurement dim {m.dim}")
    out = []
    total = 0.0
    for label, proj in m.branches:
        # Tr[rho Pi] = vdot(rho, Pi) since rho is Hermitian
        p = float(np.vdot(state.mat, proj).real)
        if p < -ATOL_PROB or p > 1.0 + ATOL_PROB:
            raise InvariantViolationError(f"probability {p} for label {label} out of range")
        p = min(1.0, max(0.0, p))
        total += p
        out.append((label, p))
    if abs(total - 1.0) > ATOL_CONSTRUCT:
        raise InvariantViolationError(f"branch probabilities sum to {total}, not 1")
    return out


def collapse(
    state: DensityOperator, m: ProjectiveMeasurement, label: float
) -> DensityOperator:
    """Projective update Pi rho Pi / Tr[rho Pi] after observing `label`."""
    if state.dim != m.dim:
        raise DimensionMismatchError(f"state dim {state.dim} != measurement dim {m.dim}")
    proj = m.projector(label)
    p = float(np.vdot(state.mat, proj).real)
    if p <= ATOL_PROB:
        raise NullEventError(
            f"conditioning on null event: branch {label} has probability {p}"
        )
    return DensityOperator(proj @ state.mat @ proj / p)
