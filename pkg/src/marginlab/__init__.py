"""Margin certificates for concept classes on normed and metric spaces.

Decision procedures with verifiable certificates for three questions
about a concept class F and a margin gamma: can one member of F push a
labeled sample to margin gamma (realizability), can members of F hit
every labeling of a point set at margin gamma (shattering), and how
large can a gamma-shattered set be (the margin dimension).  Built-in
classes cover dual norm balls, distance combinations on finite metric
spaces, 1-Lipschitz functions, ball-pair indicators and per-coordinate
threshold profiles.
"""
from .certify import (
    AuditRow,
    CollapseCertificate,
    CubeCheck,
    DimensionReport,
    RealizeVerdict,
    ShatterCounterexample,
    ShatterVerdict,
    SubsetSearchResult,
    audit_submultiplicativity,
    check_cube_condition,
    check_witness,
    collapse_support,
    cube_vertices_contained,
    fit_rate,
    is_shattered,
    max_shattered_subset,
    min_signed_support,
    packing_number,
    realize,
    sample_complexity_estimate,
    verify_collapse,
    witness_margins,
)
from .classes import (
    BallPairOracle,
    BallPairParams,
    DistanceCombinationOracle,
    DualBallOracle,
    FunctionPolytopeOracle,
    LabeledSample,
    LipschitzOracle,
    PhiOracle,
    PhiSpec,
    oracle_from_json,
    oracle_to_json,
)
from .constructions import (
    ConstructionBundle,
    HadamardMatrix,
    bundle_to_json,
    check_bundle_metric,
    dump_bundle,
    gamma_counterexample_space,
    hadamard_shattered_set,
    intro_ball_pair_params,
    intro_counterexample_space,
    phi_class_truncation,
    standard_basis_set,
    sylvester_hadamard,
)
from .errors import (
    BudgetExceeded,
    DegenerateInputError,
    InputError,
    SolverFailure,
)
from .exact import Exact, to_fraction
from .solver import (
    DEFAULT_CONFIG,
    LpInfeasible,
    LpOptimal,
    LpUnbounded,
    MinNormResult,
    SolverConfig,
    as_signed_weights,
    fold_signs,
    lp_solve,
    min_norm_point,
)
from .spaces import (
    FiniteMetricSpace,
    MetricCheck,
    NormSpec,
    load_metric_space,
    validate_metric,
)

__version__ = "0.1.0"

__all__ = [
    "AuditRow", "BallPairOracle", "BallPairParams", "CollapseCertificate",
    "ConstructionBundle", "CubeCheck", "DEFAULT_CONFIG", "DimensionReport",
    "DistanceCombinationOracle", "DualBallOracle", "Exact",
    "FiniteMetricSpace", "FunctionPolytopeOracle", "HadamardMatrix",
    "BudgetExceeded", "DegenerateInputError",
    "InputError", "LabeledSample", "LipschitzOracle", "LpInfeasible",
    "LpOptimal", "LpUnbounded", "MetricCheck", "MinNormResult", "NormSpec",
    "PhiOracle", "PhiSpec", "RealizeVerdict",
    "ShatterCounterexample", "ShatterVerdict", "SolverConfig",
    "SolverFailure", "SubsetSearchResult", "as_signed_weights",
    "audit_submultiplicativity", "bundle_to_json", "check_bundle_metric",
    "check_cube_condition", "check_witness", "collapse_support",
    "cube_vertices_contained", "dump_bundle", "fit_rate", "fold_signs",
    "gamma_counterexample_space", "hadamard_shattered_set", "is_shattered",
    "intro_ball_pair_params", "intro_counterexample_space",
    "load_metric_space", "lp_solve", "max_shattered_subset",
    "min_norm_point", "min_signed_support", "oracle_from_json",
    "oracle_to_json", "packing_number", "phi_class_truncation", "realize",
    "sample_complexity_estimate", "standard_basis_set", "sylvester_hadamard",
    "to_fraction", "validate_metric", "verify_collapse", "witness_margins",
    "__version__",
]
