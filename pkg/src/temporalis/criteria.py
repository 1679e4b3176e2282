"""The two necessary conditions for macrorealism.

Leggett-Garg inequalities bound combinations of two-time correlations (CHSH
form, bound 2, four times; Wigner form, bound 1, three times). No-signaling
in time demands that the outcome statistics at a later time do not depend on
whether an earlier measurement was performed. Both evaluations here are
exact-arithmetic-minded: violation means exceeding the bound by more than a
fixed 1e-12 tolerance, and finite-sample significance lives in `stats`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Mapping

from .qcore import ATOL_CONSTRUCT, InvariantViolationError

VIOLATION_TOL = 1e-12
# correlations produced by floating-point pipelines may overshoot [-1, 1]
# by rounding noise; anything beyond this slack is a real input error
INPUT_SLACK = 1e-9


class LGIForm(Enum):
    CHSH4 = "chsh4"
    WIGNER3 = "wigner3"


@dataclass(frozen=True)
class LGIReport:
    """Evaluated Leggett-Garg inequality with violation flag and margin."""

    form: LGIForm
    lhs: float
    bound: float
    violated: bool
    margin: float
    indices: tuple[int, ...] | None = None

    def to_dict(self) -> dict:
        out = {
            "form": self.form.value,
            "lhs": self.lhs,
            "bound": self.bound,
            "violated": self.violated,
            "margin": self.margin,
        }
        if self.indices is not None:
            out["indices"] = list(self.indices)
        return out


@dataclass(frozen=True)
class NSITReport:
    """Per-label differences between unmeasured and measured later statistics."""

    deltas: Mapping[float, float]
    max_abs_delta: float
    kappa: float
    violated: bool

    def to_dict(self) -> dict:
        return {
            "deltas": {f"{label:+g}": delta for label, delta in self.deltas.items()},
            "max_abs_delta": self.max_abs_delta,
            "kappa": self.kappa,
            "violated": self.violated,
        }


def _checked_correlation(value: float, name: str) -> float:
    value = float(value)
    if not -1.0 - INPUT_SLACK <= value <= 1.0 + INPUT_SLACK:
        raise InvariantViolationError(f"correlation {name}={value} is outside [-1, 1]")
    return min(1.0, max(-1.0, value))


def lgi_chsh4(
    c12: float, c23: float, c34: float, c14: float,
    indices: tuple[int, ...] | None = None,
) -> LGIReport:
    """Four-time inequality C12 + C23 + C34 - C14 <= 2."""
    lhs = (
        _checked_correlation(c12, "C12")
        + _checked_correlation(c23, "C23")
        + _checked_correlation(c34, "C34")
        - _checked_correlation(c14, "C14")
    )
    margin = lhs - 2.0
    return LGIReport(
        form=LGIForm.CHSH4, lhs=lhs, bound=2.0,
        violated=margin > VIOLATION_TOL, margin=margin, indices=indices,
    )


def lgi_wigner3(
    c01: float, c12: float, c02: float,
    indices: tuple[int, ...] | None = None,
) -> LGIReport:
    """Three-time inequality C01 + C12 - C02 <= 1."""
    lhs = (
        _checked_correlation(c01, "C01")
        + _checked_correlation(c12, "C12")
        - _checked_correlation(c02, "C02")
    )
    margin = lhs - 1.0
    return LGIReport(
        form=LGIForm.WIGNER3, lhs=lhs, bound=1.0,
        violated=margin > VIOLATION_TOL, margin=margin, indices=indices,
    )


def nsit_compare(
    p_without: Mapping[float, float],
    p_with: Mapping[float, float],
    tol: float = VIOLATION_TOL,
) -> NSITReport:
    """Compare later-time statistics with and without an earlier measurement.

    The decision statistic is the max-norm of the per-label differences; the
    Bhattacharyya overlap kappa = sum_B sqrt(P(B) P'(B)) is reported alongside
    as an effect size (1 exactly when the distributions coincide).
    """
    if set(p_without) != set(p_with):
        raise InvariantViolationError(
            f"label mismatch: {sorted(p_without)} vs {sorted(p_with)}"
        )
    for name, dist in (("p_without", p_without), ("p_with", p_with)):
        total = math.fsum(dist.values())
        if abs(total - 1.0) > ATOL_CONSTRUCT:
            raise InvariantViolationError(f"{name} sums to {total}, not 1")
    deltas = {
        float(label): float(p_without[label]) - float(p_with[label])
        for label in p_without
    }
    max_abs_delta = max(abs(d) for d in deltas.values())
    kappa = math.fsum(
        math.sqrt(max(0.0, p_without[label]) * max(0.0, p_with[label]))
        for label in p_without
    )
    kappa = min(kappa, 1.0 + VIOLATION_TOL)
    return NSITReport(
        deltas=deltas,
        max_abs_delta=max_abs_delta,
        kappa=kappa,
        violated=max_abs_delta > tol,
    )
