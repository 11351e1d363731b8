"""Ground states, density profiles, and zigzag stability of 1D Coulomb crystals.

Everything works in rescaled dimensionless units: the axial trap is a single
even monomial z**p / p and the pairwise Coulomb repulsion has unit strength.
"""

from .analysis import (
    DensityProfile,
    PowerLawFit,
    ScanRow,
    local_density,
    min_spacing,
    peak_location,
    power_law_fit,
    scan,
    spacing_uniformity,
)
from .cache import CacheKey, ResultCache, default_cache_dir
from .errors import (
    AnsatzDomainError,
    CoulombCrystalError,
    DegenerateChainError,
    EigensolverError,
    FitDataError,
    PlotDataError,
    QuadratureError,
    TooFewIonsError,
    UnsupportedFamilyError,
)
from .model import (
    DEFAULT_MIN_GAP,
    IonChain,
    PotentialSpec,
    TransverseHessianBase,
    energy_gradient,
    total_energy,
    transverse_hessian_base,
)
from .solver import GroundStateResult, SolverOptions, ground_state, initial_guess, minimize
from .variational import (
    EULER_GAMMA,
    AnsatzFamily,
    VariationalSolution,
    ansatz_density,
    energy_at_half_length,
    functional_energy_numeric,
    optimal_solution,
    predicted_min_spacing,
)
from .version import __version__
from .zigzag import (
    BetaCScan,
    BetaCScanRow,
    ModeSpectrum,
    ZigzagResult,
    beta_c_scan,
    critical_beta,
    critical_beta_from_base,
    mode_spectrum,
    smallest_eigenpair,
)

__all__ = [
    "__version__",
    "AnsatzDomainError",
    "AnsatzFamily",
    "BetaCScan",
    "BetaCScanRow",
    "CacheKey",
    "CoulombCrystalError",
    "DEFAULT_MIN_GAP",
    "DegenerateChainError",
    "DensityProfile",
    "EigensolverError",
    "EULER_GAMMA",
    "FitDataError",
    "GroundStateResult",
    "IonChain",
    "ModeSpectrum",
    "PlotDataError",
    "PotentialSpec",
    "PowerLawFit",
    "QuadratureError",
    "ResultCache",
    "ScanRow",
    "SolverOptions",
    "TooFewIonsError",
    "TransverseHessianBase",
    "UnsupportedFamilyError",
    "VariationalSolution",
    "ZigzagResult",
    "ansatz_density",
    "beta_c_scan",
    "critical_beta",
    "critical_beta_from_base",
    "default_cache_dir",
    "energy_at_half_length",
    "energy_gradient",
    "functional_energy_numeric",
    "ground_state",
    "initial_guess",
    "local_density",
    "min_spacing",
    "minimize",
    "mode_spectrum",
    "optimal_solution",
    "peak_location",
    "power_law_fit",
    "predicted_min_spacing",
    "scan",
    "smallest_eigenpair",
    "spacing_uniformity",
    "total_energy",
    "transverse_hessian_base",
]
