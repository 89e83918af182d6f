"""Block error probability bounds for ML detection over correlated
Rayleigh block-fading channels: union bound, a tightened deep-fade
threshold bound, and seeded Monte Carlo simulation."""

__version__ = "0.1.0"

from .bounds import (
    BoundPoint,
    LinkParams,
    find_gamma_star,
    new_bound,
    objective_G,
    pep_tail,
    qfunc,
    stationarity_h,
    union_bound,
)
from .channel import (
    CorrelationMatrix,
    RayleighChannel,
    build_rayleigh,
    exponential_correlation,
    gain_cdf,
    gain_pdf,
    sample_fading,
)
from .constellation import (
    Constellation,
    DistanceSpectrum,
    analytic_spectrum_orthogonal,
    analytic_spectrum_permutation,
    derangements,
    distance_spectrum,
    gen_gaussian,
    gen_orthogonal,
    gen_permutation,
    gen_qpsk,
    normalize,
)
from .simulate import McEstimate, mc_bler, ml_detect
from .sweep import SweepConfig, gap_at_level, run_sweep

__all__ = [
    "BoundPoint",
    "Constellation",
    "CorrelationMatrix",
    "DistanceSpectrum",
    "LinkParams",
    "McEstimate",
    "RayleighChannel",
    "SweepConfig",
    "analytic_spectrum_orthogonal",
    "analytic_spectrum_permutation",
    "build_rayleigh",
    "derangements",
    "distance_spectrum",
    "exponential_correlation",
    "find_gamma_star",
    "gain_cdf",
    "gain_pdf",
    "gap_at_level",
    "gen_gaussian",
    "gen_orthogonal",
    "gen_permutation",
    "gen_qpsk",
    "mc_bler",
    "ml_detect",
    "new_bound",
    "normalize",
    "objective_G",
    "pep_tail",
    "qfunc",
    "run_sweep",
    "sample_fading",
    "stationarity_h",
    "union_bound",
]
