"""Random orthogonal polynomials on the circle and their multiplicative chaos.

The library samples the circular beta ensemble through its coefficient
parametrization, runs the polynomial recursion and the associated
five-diagonal unitary operator, and verifies at desk scale the identities
tying the ensemble to the exponential of a log-correlated Gaussian field:
trace expansions, total-mass laws, moment formulas, and the diffusive limit
of the boundary ratio.
"""

from .analysis import TestReport, circle_moment_series, empirical_moment, ks_statistic, ks_test
from .cmv import (
    CmvFactors,
    build_cmv,
    cmv_trace_powers,
    first_gaussian_partial_sums,
    paraorthogonal_spectrum,
    sample_trace_powers,
    trace_leading_term,
)
from .gmc import FieldSample, GmcMeasureSample, fb_cdf, field_on_circle, gmc_mass_samples, gmc_r_measure
from .measures import (
    SpectralMeasure,
    TotalMassSample,
    bernstein_szego_density,
    mellin_reference,
    quadrature,
    total_mass,
    total_mass_samples,
)
from .opuc import (
    OpucPair,
    log_phi_star,
    log_polynomial_series,
    moments_from_alphas,
    q_ratio,
    sample_phi_star_abs2,
    schur_inverse,
    szego_coefficients,
    szego_step,
)
from .sampling import (
    CouplingParams,
    VerblunskySequence,
    derive_rng,
    sample_complex_gaussians,
    sample_complex_gaussians_batch,
    sample_verblunsky,
    sample_verblunsky_batch,
)
from .sde import (
    SdePath,
    clock_times,
    dufresne_perpetuity,
    entrance_law_check,
    euler_maruyama_x,
    marginal_at_time,
    q_modulus_recurrence,
    sample_discrete_paths,
)

__version__ = "0.1.0"

__all__ = [
    "TestReport",
    "circle_moment_series",
    "empirical_moment",
    "ks_statistic",
    "ks_test",
    "CmvFactors",
    "build_cmv",
    "cmv_trace_powers",
    "first_gaussian_partial_sums",
    "paraorthogonal_spectrum",
    "sample_trace_powers",
    "trace_leading_term",
    "FieldSample",
    "GmcMeasureSample",
    "fb_cdf",
    "field_on_circle",
    "gmc_mass_samples",
    "gmc_r_measure",
    "SpectralMeasure",
    "TotalMassSample",
    "bernstein_szego_density",
    "mellin_reference",
    "quadrature",
    "total_mass",
    "total_mass_samples",
    "OpucPair",
    "log_phi_star",
    "log_polynomial_series",
    "moments_from_alphas",
    "q_ratio",
    "sample_phi_star_abs2",
    "schur_inverse",
    "szego_coefficients",
    "szego_step",
    "CouplingParams",
    "VerblunskySequence",
    "derive_rng",
    "sample_complex_gaussians",
    "sample_complex_gaussians_batch",
    "sample_verblunsky",
    "sample_verblunsky_batch",
    "SdePath",
    "clock_times",
    "dufresne_perpetuity",
    "entrance_law_check",
    "euler_maruyama_x",
    "marginal_at_time",
    "q_modulus_recurrence",
    "sample_discrete_paths",
    "__version__",
]
