"""Sequential quantum measurements and tests of macrorealism.

Simulate projective measurements of a macrovariable at several checkpoint
times, evaluate the two necessary conditions for macrorealism (Leggett-Garg
inequalities and no-signaling in time), and decide outright whether observed
statistics admit any macrorealist model via a linear program over
deterministic outcome histories. Ships closed-form models of a Mach-Zehnder
interferometer, a precessing macro-spin, and a Gaussian double slit, plus a
finite-sample layer for significance testing.
"""

from .qcore import (
    ATOL_CONSTRUCT,
    ATOL_PROB,
    DensityOperator,
    DimensionMismatchError,
    InvariantViolationError,
    NullEventError,
    ProjectiveMeasurement,
    UnitaryOp,
    collapse,
    dichotomic_z,
    evolve,
    min_eigenvalue_hermitian,
    outcome_probabilities,
)
from .protocol import (
    AmplitudeChain,
    JointDistribution,
    TemporalScenario,
    correlation,
    extract_amplitude_chain,
    interference_difference,
    joint_multi_time,
    joint_two_time,
    marginal_with,
    marginal_without,
    scenario_from_json,
    scenario_to_json,
)
from .criteria import (
    LGIForm,
    LGIReport,
    NSITReport,
    VIOLATION_TOL,
    lgi_chsh4,
    lgi_wigner3,
    nsit_compare,
)
from .feasibility import (
    FeasibilityProblem,
    FeasibilityResult,
    HistoryLP,
    MRModel,
    SimplexBreakdownError,
    build_lp,
    check_scenario,
    format_cell,
    parse_cell,
    solve_feasibility,
)
from .mach_zehnder import (
    MZCorrelations,
    MZParams,
    beamsplitter,
    beamsplitter_crossed,
    mz_build_scenario,
    mz_correlations_analytic,
    mz_joint_analytic,
    mz_marginal_without_analytic,
    mz_nsit_delta_analytic,
    mz_nsit_probs_analytic,
    mz_wigner_K,
    phase_shift,
)
from .spin import SpinParams, precession, spin_build_scenario, spin_correlation, spin_nsit_probs
from .double_slit import (
    DoubleSlitParams,
    Experiment,
    SlitPattern,
    count_local_maxima,
    double_slit_nsit,
    double_slit_pattern,
)
from .stats import (
    SampleSet,
    TestResult,
    kappa_estimate,
    regularized_gamma_q,
    sample,
    two_sample_test,
)

__version__ = "0.1.0"

__all__ = [
    "ATOL_CONSTRUCT",
    "ATOL_PROB",
    "AmplitudeChain",
    "DensityOperator",
    "DimensionMismatchError",
    "DoubleSlitParams",
    "Experiment",
    "FeasibilityProblem",
    "FeasibilityResult",
    "HistoryLP",
    "InvariantViolationError",
    "JointDistribution",
    "LGIForm",
    "LGIReport",
    "MRModel",
    "MZCorrelations",
    "MZParams",
    "NSITReport",
    "NullEventError",
    "ProjectiveMeasurement",
    "SampleSet",
    "SimplexBreakdownError",
    "SlitPattern",
    "SpinParams",
    "TemporalScenario",
    "TestResult",
    "UnitaryOp",
    "VIOLATION_TOL",
    "beamsplitter",
    "beamsplitter_crossed",
    "build_lp",
    "check_scenario",
    "collapse",
    "correlation",
    "count_local_maxima",
    "dichotomic_z",
    "double_slit_nsit",
    "double_slit_pattern",
    "evolve",
    "extract_amplitude_chain",
    "format_cell",
    "interference_difference",
    "joint_multi_time",
    "joint_two_time",
    "kappa_estimate",
    "lgi_chsh4",
    "lgi_wigner3",
    "marginal_with",
    "marginal_without",
    "min_eigenvalue_hermitian",
    "mz_build_scenario",
    "mz_correlations_analytic",
    "mz_joint_analytic",
    "mz_marginal_without_analytic",
    "mz_nsit_delta_analytic",
    "mz_nsit_probs_analytic",
    "mz_wigner_K",
    "nsit_compare",
    "outcome_probabilities",
    "parse_cell",
    "phase_shift",
    "precession",
    "regularized_gamma_q",
    "sample",
    "scenario_from_json",
    "scenario_to_json",
    "spin_build_scenario",
    "spin_correlation",
    "spin_nsit_probs",
    "two_sample_test",
]
