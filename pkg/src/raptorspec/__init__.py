"""Distance spectra, rate regions, and BEC simulation for fixed-rate
Raptor code ensembles with linear random precoders."""

__version__ = "0.1.0"

from .degrees import DegreeDistribution, load as load_distribution
from .gf2 import (
    BitMatrix,
    generator_from_parity,
    null_space_basis,
    solve_gaussian,
    solve_with_inactivation,
)
from .spectrum import (
    EnsembleParams,
    LogWeightSpectrum,
    exact_weight_spectrum,
    lt_iowe_log,
    p_j_l,
    p_l,
    weight_spectrum,
)
from .asymptotic import (
    GrowthRatePoint,
    RatePair,
    RegionBoundary,
    delta_star,
    f_max,
    growth_rate,
    in_positive_region,
    outer_bound,
    region_boundary_p,
    rho,
)
from .finite_length import (
    ExpurgationReport,
    cer_upper_bound,
    expurgate,
    singleton_bound,
    typical_min_distance,
)
from .codec import (
    DecodeResult,
    RaptorCodeInstance,
    code_min_distance,
    encode,
    load_instance,
    ml_decode,
    sample_code,
    save_instance,
)
from .montecarlo import SimConfig, SimReport, simulate_code, simulate_ensemble

__all__ = [
    "__version__",
    "DegreeDistribution",
    "load_distribution",
    "BitMatrix",
    "generator_from_parity",
    "null_space_basis",
    "solve_gaussian",
    "solve_with_inactivation",
    "EnsembleParams",
    "LogWeightSpectrum",
    "exact_weight_spectrum",
    "lt_iowe_log",
    "p_j_l",
    "p_l",
    "weight_spectrum",
    "GrowthRatePoint",
    "RatePair",
    "RegionBoundary",
    "delta_star",
    "f_max",
    "growth_rate",
    "in_positive_region",
    "outer_bound",
    "region_boundary_p",
    "rho",
    "ExpurgationReport",
    "cer_upper_bound",
    "expurgate",
    "singleton_bound",
    "typical_min_distance",
    "DecodeResult",
    "RaptorCodeInstance",
    "code_min_distance",
    "encode",
    "load_instance",
    "ml_decode",
    "sample_code",
    "save_instance",
    "SimConfig",
    "SimReport",
    "simulate_code",
    "simulate_ensemble",
]
