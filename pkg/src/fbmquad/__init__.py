"""Riemann-sum stochastic integration against fractional Brownian motion.

Exact fBm samplers (Cholesky and circulant embedding), the four composite
quadrature schemes with their critical Hurst exponents, the Hermite/chaos
toolkit behind the error analysis, the limit constants of the critical-case
Gaussian fluctuation law, and seeded Monte Carlo experiments that verify the
theory at desk scale.
"""

from .constants import KappaResult, beta, beta_terms, kappa
from .covariance import (
    GRAM_CAP_DEFAULT,
    HurstGrid,
    abs_power_sum,
    cov,
    fgn_autocov,
    increment_cov,
    increment_gram,
    increment_level_cov,
    increment_midpoint_cov,
    rho,
)
from .experiments import (
    DEFAULT_MASTER_SEED,
    ExperimentConfig,
    ExperimentReport,
    canonical_json,
    partial_interval_second_moment,
    predicted_error_variance,
    run_clt_experiment,
    run_divergence_probe,
    run_rate_experiment,
)
from .hermite import ChaosExpansion, hermite_coefficients, hermite_eval, power_to_hermite
from .pathgen import (
    EIGENVALUE_TOL,
    FbmPath,
    GeneratorKind,
    circulant_eigenvalues,
    generate,
    generate_batch,
    replication_seed,
    replication_seeds,
    write_path_csv,
)
from .schemes import (
    Polynomial,
    ScaledCosine,
    SchemeKind,
    SimpsonDecomposition,
    TestFunction,
    error_statistic,
    parse_test_function,
    riemann_sum,
    simpson_error_decomposition,
)
from .stats import (
    KsResult,
    SampleSummary,
    SlopeFit,
    correlation,
    fit_loglog_slope,
    kolmogorov_p_value,
    ks_test_normal,
    summarize,
)

__version__ = "0.1.0"

__all__ = [
    "GRAM_CAP_DEFAULT",
    "EIGENVALUE_TOL",
    "DEFAULT_MASTER_SEED",
    "HurstGrid",
    "FbmPath",
    "GeneratorKind",
    "SchemeKind",
    "TestFunction",
    "Polynomial",
    "ScaledCosine",
    "SimpsonDecomposition",
    "ChaosExpansion",
    "KappaResult",
    "KsResult",
    "SampleSummary",
    "SlopeFit",
    "ExperimentConfig",
    "ExperimentReport",
    "rho",
    "cov",
    "increment_cov",
    "increment_level_cov",
    "increment_midpoint_cov",
    "abs_power_sum",
    "increment_gram",
    "fgn_autocov",
    "generate",
    "generate_batch",
    "replication_seed",
    "replication_seeds",
    "circulant_eigenvalues",
    "write_path_csv",
    "hermite_eval",
    "hermite_coefficients",
    "power_to_hermite",
    "riemann_sum",
    "error_statistic",
    "simpson_error_decomposition",
    "parse_test_function",
    "kappa",
    "beta",
    "beta_terms",
    "summarize",
    "ks_test_normal",
    "kolmogorov_p_value",
    "fit_loglog_slope",
    "correlation",
    "canonical_json",
    "predicted_error_variance",
    "partial_interval_second_moment",
    "run_clt_experiment",
    "run_rate_experiment",
    "run_divergence_probe",
]
