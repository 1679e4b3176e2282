"""Command-line front end: point evaluations, parameter scans, LP checks, sampling.

Subcommands: mz-point, mz-scan, spin, doubleslit, feasibility, nsit-sample.
Every command accepts --config FILE (a JSON object holding the same parameters
as the flags; flags and config are mutually exclusive), --out PATH and
--format csv|json. Angles accept 'pi' literals ('pi', '-pi/2', '2pi/3',
'0.5pi') or plain radians. CSV output uses '.' decimals, 17 significant
digits, and LF line endings so regression files compare bit-exactly; exit
codes are 0 (success), 2 (usage or validation), 3 (internal error).

The environment variable TEMPORALIS_THREADS caps scan parallelism (default 1);
scan rows are emitted in lexicographic grid order regardless of workers.
"""

from __future__ import annotations

import argparse
import itertools
import json
import math
import os
import re
import sys
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence

import jsonschema

from .criteria import VIOLATION_TOL, lgi_chsh4, lgi_wigner3, nsit_compare
from .double_slit import (
    DEFAULT_SCREEN_BINS,
    DoubleSlitParams,
    Experiment,
    count_local_maxima,
    double_slit_pattern,
)
from .feasibility import (
    FeasibilityProblem,
    SimplexBreakdownError,
    build_lp,
    check_scenario,
    solve_feasibility,
)
from .mach_zehnder import (
    MZParams,
    mz_build_scenario,
    mz_correlations_analytic,
    mz_joint_analytic,
    mz_marginal_without_analytic,
    mz_nsit_delta_analytic,
    mz_nsit_probs_analytic,
    mz_wigner_K,
)
from .protocol import correlation, marginal_with, marginal_without
from .qcore import DimensionMismatchError, InvariantViolationError, NullEventError
from .spin import SpinParams, spin_build_scenario, spin_correlation, spin_nsit_probs
from .stats import kappa_estimate, sample, two_sample_test

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INTERNAL = 3

_USER_ERRORS = (InvariantViolationError, DimensionMismatchError, NullEventError, ValueError)

_ANGLE_RE = re.compile(r"^([+-]?)(\d+(?:\.\d+)?)?pi(?:/(\d+(?:\.\d+)?))?$")


def parse_angle(value) -> float:
    """Parse 'pi' literals or plain radians; no general expression evaluation."""
    if isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    text = str(value).strip().lower().replace(" ", "")
    match = _ANGLE_RE.match(text)
    if match:
        sign = -1.0 if match.group(1) == "-" else 1.0
        coef = float(match.group(2)) if match.group(2) else 1.0
        div = float(match.group(3)) if match.group(3) else 1.0
        if div == 0.0:
            raise ValueError(f"division by zero in angle {value!r}")
        return sign * coef * math.pi / div
    try:
        return float(text)
    except ValueError:
        raise ValueError(
            f"cannot parse angle {value!r}; use radians or pi literals like 'pi/2'"
        ) from None


def _parse_float(value) -> float:
    if isinstance(value, bool):
        raise ValueError(f"expected a number, got {value!r}")
    return float(value)


def _parse_int(value) -> int:
    number = float(value)
    if number != int(number):
        raise ValueError(f"expected an integer, got {value!r}")
    return int(number)


def _parse_angle_list(value) -> list[float]:
    if isinstance(value, str):
        parts = [part for part in value.split(",") if part.strip()]
    else:
        parts = list(value)
    if not parts:
        raise ValueError("expected a nonempty comma-separated list")
    return [parse_angle(part) for part in parts]


def _parse_float_list(value) -> list[float]:
    if isinstance(value, str):
        parts = [part for part in value.split(",") if part.strip()]
    else:
        parts = list(value)
    if not parts:
        raise ValueError("expected a nonempty comma-separated list")
    return [float(part) for part in parts]


def _fmt(value) -> str:
    """CSV cell formatting: 17 significant digits for floats, true/false booleans."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _emit(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
    else:
        with open(out_path, "w", newline="") as handle:
            handle.write(text)


def _emit_result(record: dict, rows, fmt: str, out_path: str | None) -> None:
    if fmt == "json":
        _emit(json.dumps(record, indent=2) + "\n", out_path)
        return
    header, data = rows
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(cell) for cell in row) for row in data)
    _emit("\n".join(lines) + "\n", out_path)


def _workers() -> int:
    raw = os.environ.get("TEMPORALIS_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"TEMPORALIS_THREADS={raw!r} is not an integer") from None
    return max(1, n)


# ---------------------------------------------------------------------------
# parameter plumbing: flags and --config are two routes to the same dict

class Param:
    def __init__(self, name: str, parse: Callable, default=None, required: bool = False,
                 help: str = ""):
        self.name = name
        self.parse = parse
        self.default = default
        self.required = required
        self.help = help

    @property
    def flag(self) -> str:
        return "--" + self.name.replace("_", "-")


_SCHEMA_NUMBER_OR_ANGLE = {"type": ["number", "string"]}

COMMAND_PARAMS: dict[str, list[Param]] = {
    "mz-point": [
        Param("r1", _parse_float, required=True, help="first beam splitter reflectivity"),
        Param("r2", _parse_float, required=True, help="second beam splitter reflectivity"),
        Param("phi", parse_angle, required=True, help="arm phase (radians or pi literal)"),
        Param("q", _parse_float, required=True, help="initial weight of the +1 path"),
    ],
    "mz-scan": [
        Param("r1_points", _parse_int, default=11, help="R1 grid size over [0,1]"),
        Param("r2_points", _parse_int, default=11, help="R2 grid size over [0,1]"),
        Param("phi_points", _parse_int, default=11, help="phi grid size over [0,2pi]"),
        Param("q_points", _parse_int, default=11, help="q grid size over [0,1]"),
        Param("r1_values", _parse_float_list, help="explicit R1 list (overrides points)"),
        Param("r2_values", _parse_float_list, help="explicit R2 list (overrides points)"),
        Param("phi_values", _parse_angle_list, help="explicit phi list (overrides points)"),
        Param("q_values", _parse_float_list, help="explicit q list (overrides points)"),
    ],
    "spin": [
        Param("omega", _parse_float, required=True, help="precession frequency"),
        Param("times", _parse_angle_list, required=True,
              help="comma-separated measurement times (pi literals allowed)"),
    ],
    "doubleslit": [
        Param("sigma", _parse_float, default=1.0, help="initial packet half-width"),
        Param("d", _parse_float, default=10.0, help="slit separation"),
        Param("mass", _parse_float, default=1.0, help="particle mass (hbar = 1)"),
        Param("t_prop", _parse_float, default=100.0, help="propagation time to the screen"),
        Param("x_min", _parse_float, default=-60.0, help="screen window lower edge"),
        Param("x_max", _parse_float, default=60.0, help="screen window upper edge"),
        Param("n_points", _parse_int, default=2001, help="screen grid points (odd)"),
        Param("bins", _parse_int, default=DEFAULT_SCREEN_BINS, help="screen bins for NSIT"),
        Param("weight", _parse_float, default=0.5, help="mixture weight of experiment II"),
        Param("experiment", str, help="emit one pattern (I, II, III, II_AND_III) instead"),
    ],
    "feasibility": [
        Param("problem", str, help="path to a feasibility problem JSON file"),
        Param("problem_json", dict, help="inline problem object (config route)"),
        Param("tol", _parse_float, default=1e-9, help="phase-1 feasibility tolerance"),
    ],
    "nsit-sample": [
        Param("r1", _parse_float, required=True),
        Param("r2", _parse_float, required=True),
        Param("phi", parse_angle, required=True),
        Param("q", _parse_float, required=True),
        Param("n", _parse_int, default=10000, help="draws per arm"),
        Param("trials", _parse_int, default=100, help="number of seeded trials"),
        Param("seed", _parse_int, default=0, help="base seed; arms use seed+2t, seed+2t+1"),
        Param("alpha", _parse_float, default=0.05, help="significance level"),
    ],
}

CONFIG_SCHEMAS: dict[str, dict] = {
    command: {
        "type": "object",
        "additionalProperties": False,
        "properties": {
            param.name: (
                {"type": "object"} if param.parse is dict else
                {"type": "string"} if param.parse is str else
                {"type": ["string", "array"]} if param.parse in (_parse_angle_list, _parse_float_list) else
                _SCHEMA_NUMBER_OR_ANGLE
            )
            for param in params
        },
    }
    for command, params in COMMAND_PARAMS.items()
}

_NUM = {"type": "number"}
_BOOL = {"type": "boolean"}
_STR = {"type": "string"}

_LGI_SCHEMA = {
    "type": "object",
    "required": ["form", "lhs", "bound", "violated", "margin"],
    "additionalProperties": True,
    "properties": {"form": _STR, "lhs": _NUM, "bound": _NUM, "violated": _BOOL, "margin": _NUM},
}
_NSIT_SCHEMA = {
    "type": "object",
    "required": ["deltas", "max_abs_delta", "kappa", "violated"],
    "additionalProperties": False,
    "properties": {
        "deltas": {"type": "object", "additionalProperties": _NUM},
        "max_abs_delta": _NUM,
        "kappa": _NUM,
        "violated": _BOOL,
    },
}
_FEAS_SCHEMA = {
    "type": "object",
    "required": ["feasible", "residual"],
    "additionalProperties": True,
    "properties": {
        "feasible": _BOOL,
        "residual": _NUM,
        "witness": {"type": ["object", "null"], "additionalProperties": _NUM},
        "certificate": {"type": ["string", "null"]},
    },
}
_MZ_BLOCK = {
    "type": "object",
    "required": ["c01", "c02", "c12", "wigner_k", "delta", "kappa"],
    "additionalProperties": False,
    "properties": {name: _NUM for name in ("c01", "c02", "c12", "wigner_k", "delta", "kappa")},
}

REPORT_SCHEMAS: dict[str, dict] = {
    "mz-point": {
        "type": "object",
        "required": ["params", "analytic", "simulated", "lgi", "nsit", "feasibility"],
        "additionalProperties": False,
        "properties": {
            "params": {"type": "object", "additionalProperties": _NUM},
            "analytic": _MZ_BLOCK,
            "simulated": _MZ_BLOCK,
            "lgi": _LGI_SCHEMA,
            "nsit": _NSIT_SCHEMA,
            "feasibility": _FEAS_SCHEMA,
        },
    },
    "mz-scan": {
        "type": "object",
        "required": ["columns", "rows"],
        "additionalProperties": False,
        "properties": {
            "columns": {"type": "array", "items": _STR},
            "rows": {"type": "array", "items": {"type": "array", "items": {"type": ["number", "boolean"]}}},
        },
    },
    "spin": {
        "type": "object",
        "required": ["params", "correlations", "lgi", "nsit", "feasibility"],
        "additionalProperties": False,
        "properties": {
            "params": {
                "type": "object",
                "additionalProperties": False,
                "properties": {"omega": _NUM, "times": {"type": "array", "items": _NUM}},
            },
            "correlations": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["i", "j", "correlation"],
                    "additionalProperties": True,
                },
            },
            "lgi": _LGI_SCHEMA,
            "nsit": {"type": "array", "items": {"type": "object"}},
            "feasibility": {
                "type": "object",
                "required": ["pairwise", "full"],
                "additionalProperties": False,
                "properties": {
                    "pairwise": {"type": "array", "items": {"type": "object"}},
                    "full": _FEAS_SCHEMA,
                },
            },
        },
    },
    "doubleslit": {
        "type": "object",
        "required": ["params", "kappa", "max_abs_delta", "violated", "local_maxima"],
        "additionalProperties": False,
        "properties": {
            "params": {"type": "object"},
            "kappa": _NUM,
            "max_abs_delta": _NUM,
            "violated": _BOOL,
            "local_maxima": {
                "type": "object",
                "additionalProperties": False,
                "properties": {"I": {"type": "integer"}, "II_AND_III": {"type": "integer"}},
            },
        },
    },
    "doubleslit-pattern": {
        "type": "object",
        "required": ["params", "experiment", "x", "density", "masses"],
        "additionalProperties": False,
        "properties": {
            "params": {"type": "object"},
            "experiment": _STR,
            "x": {"type": "array", "items": _NUM},
            "density": {"type": "array", "items": _NUM},
            "masses": {"type": "array", "items": _NUM},
        },
    },
    "feasibility": _FEAS_SCHEMA,
    "nsit-sample": {
        "type": "object",
        "required": ["params", "trials", "summary"],
        "additionalProperties": False,
        "properties": {
            "params": {"type": "object", "additionalProperties": _NUM},
            "trials": {
                "type": "array",
                "items": {
                    "type": "object",
                    "required": ["trial", "statistic", "dof", "p_value", "kappa_hat", "significant"],
                    "additionalProperties": False,
                    "properties": {
                        "trial": {"type": "integer"},
                        "statistic": _NUM,
                        "dof": {"type": "integer"},
                        "p_value": _NUM,
                        "kappa_hat": _NUM,
                        "significant": _BOOL,
                    },
                },
            },
            "summary": {
                "type": "object",
                "required": ["n_trials", "alpha", "n_significant", "fraction_significant"],
                "additionalProperties": False,
                "properties": {
                    "n_trials": {"type": "integer"},
                    "alpha": _NUM,
                    "n_significant": {"type": "integer"},
                    "fraction_significant": _NUM,
                },
            },
        },
    },
}


def _collect_params(command: str, args: argparse.Namespace) -> dict:
    params = COMMAND_PARAMS[command]
    flags = {param.name: getattr(args, param.name) for param in params}
    values: dict = {}
    if args.config is not None:
        given = [param.flag for param in params if flags[param.name] is not None]
        if given:
            raise ValueError(f"--config cannot be combined with {', '.join(given)}")
        with open(args.config) as handle:
            config = json.load(handle)
        try:
            jsonschema.validate(config, CONFIG_SCHEMAS[command])
        except jsonschema.ValidationError as err:
            raise ValueError(f"invalid config: {err.message}") from None
        source = config
    else:
        source = {name: value for name, value in flags.items() if value is not None}
    for param in params:
        if param.name in source:
            values[param.name] = param.parse(source[param.name])
        elif param.required:
            raise ValueError(f"missing required parameter {param.flag}")
        else:
            values[param.name] = param.default
    return values


# ---------------------------------------------------------------------------
# command handlers

_SCAN_COLUMNS = (
    "r1", "r2", "phi", "q", "c01", "c02", "c12", "k",
    "lgi_violated", "delta", "nsit_violated", "feasible",
)


def _mz_feasibility_problem(p: MZParams) -> FeasibilityProblem:
    constraints = [(pair, mz_joint_analytic(p, *pair)) for pair in ((0, 1), (1, 2), (0, 2))]
    for k in (0, 1, 2):
        marg = mz_marginal_without_analytic(p, k)
        constraints.append(((k,), {(label,): prob for label, prob in marg.items()}))
    outcomes = ((1.0, -1.0),) * 3
    return FeasibilityProblem(outcomes=outcomes, constraints=tuple(constraints))


def _mz_scan_row(point: tuple[float, float, float, float]) -> tuple:
    r1, r2, phi, q = point
    p = MZParams(r1=r1, r2=r2, phi=phi, q=q)
    corr = mz_correlations_analytic(p)
    k = mz_wigner_K(p)
    lgi = lgi_wigner3(corr.c01, corr.c12, corr.c02)
    delta = mz_nsit_delta_analytic(p)
    feasible = solve_feasibility(build_lp(_mz_feasibility_problem(p))).feasible
    return (
        r1, r2, phi, q, corr.c01, corr.c02, corr.c12, k,
        lgi.violated, delta, abs(delta) > VIOLATION_TOL, feasible,
    )


def _cmd_mz_point(values: dict):
    p = MZParams(r1=values["r1"], r2=values["r2"], phi=values["phi"], q=values["q"])
    corr = mz_correlations_analytic(p)
    k = mz_wigner_K(p)
    delta = mz_nsit_delta_analytic(p)
    nsit_analytic = nsit_compare(*mz_nsit_probs_analytic(p))

    scenario = mz_build_scenario(p)
    sim = {
        "c01": correlation(scenario, 0, 1),
        "c02": correlation(scenario, 0, 2),
        "c12": correlation(scenario, 1, 2),
    }
    nsit_sim = nsit_compare(marginal_without(scenario, 2), marginal_with(scenario, 1, 2))
    lgi = lgi_wigner3(sim["c01"], sim["c12"], sim["c02"], indices=(0, 1, 2))
    feas = check_scenario(scenario, [(0, 1), (1, 2), (0, 2)], include_unmeasured=True)

    record = {
        "params": {"r1": p.r1, "r2": p.r2, "phi": p.phi, "q": p.q},
        "analytic": {
            "c01": corr.c01, "c02": corr.c02, "c12": corr.c12,
            "wigner_k": k, "delta": delta, "kappa": nsit_analytic.kappa,
        },
        "simulated": {
            "c01": sim["c01"], "c02": sim["c02"], "c12": sim["c12"],
            "wigner_k": lgi.lhs, "delta": nsit_sim.deltas[1.0], "kappa": nsit_sim.kappa,
        },
        "lgi": lgi.to_dict(),
        "nsit": nsit_sim.to_dict(),
        "feasibility": {"feasible": feas.feasible, "residual": feas.residual,
                        "certificate": feas.certificate},
    }
    row = (
        p.r1, p.r2, p.phi, p.q, corr.c01, corr.c02, corr.c12, k,
        lgi.violated, delta, nsit_sim.violated, feas.feasible,
    )
    return record, (_SCAN_COLUMNS, [row]), "json"


def _cmd_mz_scan(values: dict):
    axes = {}
    for name, hi in (("r1", 1.0), ("r2", 1.0), ("q", 1.0)):
        explicit = values[f"{name}_values"]
        n = values[f"{name}_points"]
        if explicit is not None:
            axes[name] = list(explicit)
        else:
            if n < 1:
                raise InvariantViolationError(f"{name}_points must be >= 1")
            axes[name] = [hi * i / (n - 1) for i in range(n)] if n > 1 else [0.0]
    if values["phi_values"] is not None:
        axes["phi"] = list(values["phi_values"])
    else:
        n = values["phi_points"]
        if n < 1:
            raise InvariantViolationError("phi_points must be >= 1")
        axes["phi"] = [2.0 * math.pi * i / (n - 1) for i in range(n)] if n > 1 else [0.0]
    total = len(axes["r1"]) * len(axes["r2"]) * len(axes["phi"]) * len(axes["q"])
    if total > 10**7:
        raise InvariantViolationError(f"grid of {total} points exceeds the 1e7 guard")
    points = list(itertools.product(axes["r1"], axes["r2"], axes["phi"], axes["q"]))

    workers = _workers()
    if workers > 1 and len(points) > 64:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_mz_scan_row, points, chunksize=max(1, len(points) // (8 * workers))))
    else:
        rows = [_mz_scan_row(point) for point in points]
    record = {"columns": list(_SCAN_COLUMNS), "rows": [list(row) for row in rows]}
    return record, (_SCAN_COLUMNS, rows), "csv"


def _cmd_spin(values: dict):
    p = SpinParams(omega=values["omega"], times=tuple(values["times"]))
    scenario = spin_build_scenario(p)
    n = len(p.times)
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]

    correlations = [
        {
            "i": i, "j": j, "t_i": p.times[i], "t_j": p.times[j],
            "correlation": spin_correlation(p, i, j),
        }
        for i, j in pairs
    ]
    if n >= 4:
        lgi = lgi_chsh4(
            spin_correlation(p, 0, 1), spin_correlation(p, 1, 2),
            spin_correlation(p, 2, 3), spin_correlation(p, 0, 3),
            indices=(0, 1, 2, 3),
        )
    else:
        lgi = lgi_wigner3(
            spin_correlation(p, 0, 1), spin_correlation(p, 1, 2),
            spin_correlation(p, 0, 2), indices=(0, 1, 2),
        )
    nsit = []
    for i, j in pairs:
        report = nsit_compare(*spin_nsit_probs(p, i, j))
        nsit.append({"i": i, "j": j, **report.to_dict()})
    pairwise = []
    for i, j in pairs:
        res = check_scenario(scenario, [(i, j)], include_unmeasured=True)
        pairwise.append({"i": i, "j": j, "feasible": res.feasible, "residual": res.residual})
    full = check_scenario(scenario, pairs, include_unmeasured=True)

    record = {
        "params": {"omega": p.omega, "times": list(p.times)},
        "correlations": correlations,
        "lgi": lgi.to_dict(),
        "nsit": nsit,
        "feasibility": {
            "pairwise": pairwise,
            "full": {"feasible": full.feasible, "residual": full.residual,
                     "certificate": full.certificate},
        },
    }
    header = ("i", "j", "t_i", "t_j", "correlation", "nsit_delta", "nsit_kappa", "pair_feasible")
    rows = [
        (c["i"], c["j"], c["t_i"], c["t_j"], c["correlation"],
         nsit[k]["max_abs_delta"], nsit[k]["kappa"], pairwise[k]["feasible"])
        for k, c in enumerate(correlations)
    ]
    return record, (header, rows), "json"


def _cmd_doubleslit(values: dict):
    params = DoubleSlitParams(
        sigma=values["sigma"], d=values["d"], mass=values["mass"], t_prop=values["t_prop"],
        grid=(values["x_min"], values["x_max"], values["n_points"]),
    )
    param_block = {
        "sigma": params.sigma, "d": params.d, "mass": params.mass, "t_prop": params.t_prop,
        "x_min": params.grid[0], "x_max": params.grid[1], "n_points": params.grid[2],
    }
    if values["experiment"] is not None:
        experiment = Experiment(values["experiment"])
        pattern = double_slit_pattern(params, experiment, weight=values["weight"])
        record = {
            "params": param_block,
            "experiment": experiment.value,
            "x": [float(v) for v in pattern.x],
            "density": [float(v) for v in pattern.density],
            "masses": [float(v) for v in pattern.masses],
        }
        rows = (("x", "density", "mass"),
                list(zip(pattern.x.tolist(), pattern.density.tolist(), pattern.masses.tolist())))
        return record, rows, "json"

    both_open = double_slit_pattern(params, Experiment.I)
    mixture = double_slit_pattern(params, Experiment.II_AND_III, weight=values["weight"])
    report = nsit_compare(both_open.binned(values["bins"]), mixture.binned(values["bins"]))
    record = {
        "params": {**param_block, "bins": values["bins"], "weight": values["weight"]},
        "kappa": report.kappa,
        "max_abs_delta": report.max_abs_delta,
        "violated": report.violated,
        "local_maxima": {
            "I": count_local_maxima(both_open.density),
            "II_AND_III": count_local_maxima(mixture.density),
        },
    }
    header = ("kappa", "max_abs_delta", "violated", "maxima_i", "maxima_mixture")
    row = (report.kappa, report.max_abs_delta, report.violated,
           record["local_maxima"]["I"], record["local_maxima"]["II_AND_III"])
    return record, (header, [row]), "json"


def _cmd_feasibility(values: dict):
    if values["problem_json"] is not None:
        obj = values["problem_json"]
    elif values["problem"] is not None:
        with open(values["problem"]) as handle:
            obj = json.load(handle)
    else:
        raise ValueError("provide --problem FILE or a config with 'problem_json'")
    problem = FeasibilityProblem.from_dict(obj)
    result = solve_feasibility(build_lp(problem), tol=values["tol"])
    record = result.to_dict()
    header = ("feasible", "residual")
    return record, (header, [(result.feasible, result.residual)]), "json"


def _cmd_nsit_sample(values: dict):
    p = MZParams(r1=values["r1"], r2=values["r2"], phi=values["phi"], q=values["q"])
    p_without, p_with = mz_nsit_probs_analytic(p)
    n, trials, base_seed, alpha = values["n"], values["trials"], values["seed"], values["alpha"]
    if trials < 1:
        raise InvariantViolationError("trials must be >= 1")
    if not 0.0 < alpha < 1.0:
        raise InvariantViolationError(f"alpha={alpha} must lie in (0, 1)")
    trial_records = []
    n_significant = 0
    for t in range(trials):
        arm_a = sample(p_without, n, base_seed + 2 * t)
        arm_b = sample(p_with, n, base_seed + 2 * t + 1)
        test = two_sample_test(arm_a, arm_b)
        significant = test.p_value < alpha
        n_significant += significant
        trial_records.append({
            "trial": t,
            "statistic": test.statistic,
            "dof": test.dof,
            "p_value": test.p_value,
            "kappa_hat": kappa_estimate(arm_a, arm_b),
            "significant": significant,
        })
    record = {
        "params": {"r1": p.r1, "r2": p.r2, "phi": p.phi, "q": p.q,
                   "n": n, "trials": trials, "seed": base_seed, "alpha": alpha},
        "trials": trial_records,
        "summary": {
            "n_trials": trials,
            "alpha": alpha,
            "n_significant": n_significant,
            "fraction_significant": n_significant / trials,
        },
    }
    header = ("trial", "statistic", "dof", "p_value", "kappa_hat", "significant")
    rows = [tuple(item[key] for key in header) for item in trial_records]
    return record, (header, rows), "json"


_HANDLERS = {
    "mz-point": _cmd_mz_point,
    "mz-scan": _cmd_mz_scan,
    "spin": _cmd_spin,
    "doubleslit": _cmd_doubleslit,
    "feasibility": _cmd_feasibility,
    "nsit-sample": _cmd_nsit_sample,
}

_DESCRIPTIONS = {
    "mz-point": "evaluate one Mach-Zehnder parameter point (analytic + simulated + LP)",
    "mz-scan": "scan a Mach-Zehnder parameter grid and emit one row per point",
    "spin": "precessing-spin scenario: correlations, LGI, NSIT, pairwise and full LP",
    "doubleslit": "double-slit NSIT comparison or a single screen pattern",
    "feasibility": "decide macrorealist feasibility for a problem JSON",
    "nsit-sample": "seeded finite-sample NSIT significance study at a Mach-Zehnder point",
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="temporalis",
        description="Sequential quantum measurements and macrorealism tests.",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for command, params in COMMAND_PARAMS.items():
        sub = subparsers.add_parser(command, help=_DESCRIPTIONS[command])
        for param in params:
            if param.parse is dict:
                continue  # config-only parameter
            sub.add_argument(param.flag, dest=param.name, default=None, help=param.help)
        sub.add_argument("--config", default=None, help="JSON file with this command's parameters")
        sub.add_argument("--out", default=None, help="write output to this path instead of stdout")
        sub.add_argument("--format", dest="fmt", choices=("csv", "json"), default=None)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        values = _collect_params(args.command, args)
    except (ValueError, OSError, json.JSONDecodeError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    try:
        record, rows, default_fmt = _HANDLERS[args.command](values)
    except _USER_ERRORS as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except SimplexBreakdownError as err:
        print(f"internal error: {err}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as err:  # pragma: no cover - defensive
        print(f"internal error: {err}", file=sys.stderr)
        return EXIT_INTERNAL
    fmt = args.fmt or ("csv" if args.command == "mz-scan" else default_fmt)
    try:
        _emit_result(record, rows, fmt, args.out)
    except OSError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
