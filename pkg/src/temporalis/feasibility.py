"""Macrorealist-model feasibility as a linear program.

A macrorealist explains observed temporal statistics by a probability
distribution rho(lambda) over deterministic histories lambda, each assigning
one definite outcome per checkpoint; stochastic evolution is carried entirely
by rho, so histories never need internal randomness. A data set admits such a
model iff the linear system

    sum over histories consistent with a cell of rho(lambda) = observed value
    sum of all rho(lambda) = 1,  rho >= 0

is solvable. Crucially, a history predicts the same outcomes whether or not
intermediate measurements were performed, which is what makes
unmeasured-marginal constraints commensurable with sequential joint tables
and lets pure no-signaling-in-time violations show up as infeasibility.

Feasibility is decided by an in-module phase-1 simplex over doubles with
Bland's rule; verdicts below the 1e-9 tolerance are deterministic given the
input.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .protocol import TemporalScenario, joint_two_time, marginal_without
from .qcore import InvariantViolationError

#: A deterministic history is one outcome label per checkpoint.
DeterministicHistory = tuple[float, ...]

FEASIBILITY_TOL = 1e-9
WITNESS_RESIDUAL_TOL = 1e-8
HISTORY_GUARD = 2**20
_PIVOT_EPS = 1e-11
_MAX_PIVOTS = 20000
_TABLE_ATOL = 1e-8


class SimplexBreakdownError(RuntimeError):
    """The pivoting guard tripped; no verdict was produced."""


class MRModel:
    """Probability distribution over deterministic outcome histories."""

    __slots__ = ("weights",)

    def __init__(self, weights: Mapping[DeterministicHistory, float]) -> None:
        if not weights:
            raise InvariantViolationError("a model needs at least one history")
        lengths = {len(h) for h in weights}
        if len(lengths) != 1:
            raise InvariantViolationError("histories have inconsistent lengths")
        clean: dict[DeterministicHistory, float] = {}
        for history, w in weights.items():
            w = float(w)
            if w < -1e-12:
                raise InvariantViolationError(f"negative weight {w} for history {history}")
            clean[tuple(float(v) for v in history)] = max(0.0, w)
        total = sum(clean.values())
        if abs(total - 1.0) > 1e-10:
            raise InvariantViolationError(f"weights sum to {total}, not 1")
        object.__setattr__(self, "weights", clean)

    def __setattr__(self, name, value):
        raise AttributeError("MRModel is immutable")

    @property
    def n_checkpoints(self) -> int:
        return len(next(iter(self.weights)))

    def table(self, indices: Sequence[int]) -> dict[tuple[float, ...], float]:
        """Predicted outcome table over the given checkpoints.

        Measurements are non-invasive in this model class, so the same table
        serves for any set of performed measurements containing `indices`.
        """
        idx = tuple(int(k) for k in indices)
        out: dict[tuple[float, ...], float] = {}
        for history, w in self.weights.items():
            cell = tuple(history[k] for k in idx)
            out[cell] = out.get(cell, 0.0) + w
        return out

    @staticmethod
    def random(
        outcomes: Sequence[Sequence[float]], rng: np.random.Generator, resolution: int = 1024
    ) -> "MRModel":
        """Random model with dyadic weights (multiples of 1/resolution).

        Dyadic weights are exactly representable in binary floating point, so
        tables derived from these models are exactly consistent linear data.
        """
        histories = list(itertools.product(*[tuple(o) for o in outcomes]))
        counts = rng.multinomial(resolution, [1.0 / len(histories)] * len(histories))
        return MRModel(
            {h: c / resolution for h, c in zip(histories, counts) if c > 0}
        )


@dataclass(frozen=True)
class FeasibilityProblem:
    """Observed tables over checkpoint subsets, to be explained by one model."""

    outcomes: tuple[tuple[float, ...], ...]
    constraints: tuple[tuple[tuple[int, ...], Mapping[tuple[float, ...], float]], ...]

    def __post_init__(self) -> None:
        outcomes = tuple(tuple(float(v) for v in labels) for labels in self.outcomes)
        if not outcomes or any(not labels for labels in outcomes):
            raise InvariantViolationError("every checkpoint needs a nonempty outcome set")
        n = len(outcomes)
        constraints = []
        for indices, table in self.constraints:
            idx = tuple(int(k) for k in indices)
            if any(not 0 <= k < n for k in idx):
                raise InvariantViolationError(f"constraint indices {idx} out of range")
            if any(b <= a for a, b in zip(idx, idx[1:])):
                raise InvariantViolationError(
                    f"constraint indices must be strictly increasing, got {idx}"
                )
            clean: dict[tuple[float, ...], float] = {}
            for cell, p in table.items():
                cell = tuple(float(v) for v in cell)
                if len(cell) != len(idx):
                    raise InvariantViolationError(f"cell {cell} arity differs from {idx}")
                for k, v in zip(idx, cell):
                    if v not in outcomes[k]:
                        raise InvariantViolationError(
                            f"label {v} not in outcome set of checkpoint {k}"
                        )
                clean[cell] = float(p)
            total = sum(clean.values())
            if abs(total - 1.0) > _TABLE_ATOL:
                raise InvariantViolationError(
                    f"constraint table over {idx} sums to {total}, not 1"
                )
            constraints.append((idx, clean))
        object.__setattr__(self, "outcomes", outcomes)
        object.__setattr__(self, "constraints", tuple(constraints))

    @property
    def n_checkpoints(self) -> int:
        return len(self.outcomes)

    def to_dict(self) -> dict:
        return {
            "checkpoints": self.n_checkpoints,
            "outcomes": [list(labels) for labels in self.outcomes],
            "constraints": [
                {
                    "indices": list(indices),
                    "table": {format_cell(cell): p for cell, p in table.items()},
                }
                for indices, table in self.constraints
            ],
        }

    @staticmethod
    def from_dict(obj: Mapping) -> "FeasibilityProblem":
        outcomes = tuple(tuple(float(v) for v in labels) for labels in obj["outcomes"])
        if "checkpoints" in obj and int(obj["checkpoints"]) != len(outcomes):
            raise InvariantViolationError("checkpoint count disagrees with outcome sets")
        constraints = []
        for item in obj["constraints"]:
            table = {parse_cell(key): float(p) for key, p in item["table"].items()}
            constraints.append((tuple(int(k) for k in item["indices"]), table))
        return FeasibilityProblem(outcomes=outcomes, constraints=tuple(constraints))


def format_cell(cell: tuple[float, ...]) -> str:
    """Render a label tuple as a string key, e.g. (1.0, -1.0) -> '+1,-1'."""
    return ",".join(f"{v:+g}" for v in cell)


def parse_cell(key: str) -> tuple[float, ...]:
    return tuple(float(part) for part in key.split(","))


@dataclass(frozen=True)
class HistoryLP:
    """Equality system A rho = b over nonnegative history weights."""

    histories: tuple[DeterministicHistory, ...]
    matrix: np.ndarray
    rhs: np.ndarray
    row_labels: tuple[str, ...]


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    witness: MRModel | None
    residual: float
    certificate: str | None

    def to_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "residual": self.residual,
            "witness": None
            if self.witness is None
            else {format_cell(h): w for h, w in sorted(self.witness.weights.items())},
            "certificate": self.certificate,
        }


def build_lp(p: FeasibilityProblem) -> HistoryLP:
    """One variable per deterministic history, one equality row per table cell.

    Cells absent from an observed table are constrained to probability zero
    (tables are normalized, so omitted cells carry no mass). A final row pins
    the total weight to 1.
    """
    n_hist = 1
    for labels in p.outcomes:
        n_hist *= len(labels)
        if n_hist > HISTORY_GUARD:
            raise InvariantViolationError(
                f"history count exceeds guard of {HISTORY_GUARD}"
            )
    histories = tuple(itertools.product(*p.outcomes))
    # integer position of each history's label at each checkpoint
    positions = {labels: {v: k for k, v in enumerate(labels)} for labels in set(p.outcomes)}
    hist_idx = np.array(
        [
            [positions[p.outcomes[k]][h[k]] for k in range(p.n_checkpoints)]
            for h in histories
        ],
        dtype=np.int64,
    )

    rows: list[np.ndarray] = []
    rhs: list[float] = []
    row_labels: list[str] = []
    for ci, (indices, table) in enumerate(p.constraints):
        idx = np.array(indices, dtype=np.int64)
        for cell in itertools.product(*(p.outcomes[k] for k in indices)):
            cell_pos = np.array(
                [positions[p.outcomes[k]][v] for k, v in zip(indices, cell)], dtype=np.int64
            )
            mask = np.all(hist_idx[:, idx] == cell_pos, axis=1)
            rows.append(mask.astype(float))
            rhs.append(table.get(cell, 0.0))
            row_labels.append(f"constraint {ci} over {tuple(indices)} cell [{format_cell(cell)}]")
    rows.append(np.ones(len(histories)))
    rhs.append(1.0)
    row_labels.append("normalization")
    return HistoryLP(
        histories=histories,
        matrix=np.array(rows),
        rhs=np.array(rhs),
        row_labels=tuple(row_labels),
    )


def solve_feasibility(lp: HistoryLP, tol: float = FEASIBILITY_TOL) -> FeasibilityResult:
    """Phase-1 simplex: feasible iff the artificial cost can be driven to <= tol.

    Bland's rule (lowest-index entering column; ratio ties broken by lowest
    basis variable index) makes the pivot sequence deterministic and cycling
    impossible; an iteration guard converts any numerical stall into an
    explicit error rather than a wrong verdict.
    """
    a = np.array(lp.matrix, dtype=float)
    b = np.array(lp.rhs, dtype=float)
    m, n = a.shape
    flip = b < 0
    a[flip] *= -1.0
    b[flip] *= -1.0

    # tableau [A | I | b]; basis starts as the artificial columns
    tableau = np.hstack([a, np.eye(m), b.reshape(-1, 1)])
    basis = list(range(n, n + m))
    # reduced-cost row for min(sum of artificials): z_j - c_j = column sums of A
    cost = np.zeros(n + m + 1)
    cost[:n] = tableau[:, :n].sum(axis=0)
    cost[-1] = tableau[:, -1].sum()

    for _ in range(_MAX_PIVOTS):
        entering = -1
        for j in range(n + m):
            if cost[j] > _PIVOT_EPS:
                entering = j
                break
        if entering < 0:
            break
        ratio = np.inf
        leaving = -1
        for i in range(m):
            coef = tableau[i, entering]
            if coef > _PIVOT_EPS:
                r = tableau[i, -1] / coef
                if r < ratio - _PIVOT_EPS or (
                    abs(r - ratio) <= _PIVOT_EPS and (leaving < 0 or basis[i] < basis[leaving])
                ):
                    ratio = r
                    leaving = i
        if leaving < 0:
            raise SimplexBreakdownError("phase-1 objective unbounded; malformed tableau")
        pivot = tableau[leaving, entering]
        tableau[leaving] /= pivot
        for i in range(m):
            if i != leaving and tableau[i, entering] != 0.0:
                tableau[i] -= tableau[i, entering] * tableau[leaving]
        cost -= cost[entering] * tableau[leaving]
        basis[leaving] = entering
    else:
        raise SimplexBreakdownError(
            f"cycling guard tripped after {_MAX_PIVOTS} pivots; no verdict"
        )

    artificial_cost = sum(
        tableau[i, -1] for i in range(m) if basis[i] >= n
    )
    if artificial_cost > tol:
        offenders = [
            lp.row_labels[basis[i] - n]
            for i in range(m)
            if basis[i] >= n and tableau[i, -1] > tol
        ]
        certificate = (
            f"phase-1 residual {artificial_cost:.3e}; "
            f"unsatisfied rows: {'; '.join(offenders[:8])}"
        )
        return FeasibilityResult(
            feasible=False, witness=None, residual=float(artificial_cost),
            certificate=certificate,
        )

    x = np.zeros(n)
    for i in range(m):
        if basis[i] < n:
            x[basis[i]] = max(0.0, tableau[i, -1])
    residual = float(np.max(np.abs(lp.matrix @ x - lp.rhs)))
    witness = MRModel(
        {h: w for h, w in zip(lp.histories, x) if w > 0.0}
        or {lp.histories[0]: 0.0}  # unreachable: normalization row forces mass
    )
    return FeasibilityResult(
        feasible=True, witness=witness, residual=residual, certificate=None
    )


def check_scenario(
    s: TemporalScenario,
    pairs: Sequence[tuple[int, int]],
    include_unmeasured: bool = True,
    tol: float = FEASIBILITY_TOL,
) -> FeasibilityResult:
    """Decide whether the scenario's sequential statistics admit a macrorealist model.

    For each pair (i, j) the constraint is the sequential two-time joint; with
    `include_unmeasured`, the single-time distributions observed with no other
    measurement in the run are added for every checkpoint named by some pair.
    Those extra rows are what allow a pure no-signaling-in-time violation to
    make the program infeasible even with only two measurement times.
    """
    outcomes = tuple(m.labels for m in s.measurements)
    constraints: list[tuple[tuple[int, ...], dict]] = []
    mentioned: set[int] = set()
    for i, j in pairs:
        joint = joint_two_time(s, i, j)
        constraints.append(((int(i), int(j)), dict(joint.table)))
        mentioned.update((int(i), int(j)))
    if include_unmeasured:
        for k in sorted(mentioned):
            marg = marginal_without(s, k)
            constraints.append(((k,), {(label,): p for label, p in marg.items()}))
    problem = FeasibilityProblem(outcomes=outcomes, constraints=tuple(constraints))
    return solve_feasibility(build_lp(problem), tol=tol)
