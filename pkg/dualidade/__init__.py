"""
Módulo Dualidade - Dualidade, entrelaçamento e tempos estacionários fortes.
"""

from .chains import (
    BDParams,
    BiasFunction,
    ScaleProfile,
    absorption_profile,
    bd_kernel,
    bd_stationary,
    moran_kernel,
    mutation_bias,
    reflected_walk,
    wright_fisher_kernel,
)
from .coupling import ProductKernel, TrajectoryBatch, coupling_kernel, exact_joint, simulate
from .duals import (
    DualFamily,
    DualFunction,
    DualReport,
    dual_function,
    dual_via_solve,
    is_monotone,
    siegmund_dual,
    ultrametric_dual,
    verify_duality,
)
from .intertwine import IntertwiningResult, duality_from_intertwining, intertwining_pipeline
from .spectral import Spectrum, bd_spectrum, orthopoly_oracle, spectral_weights
from .ssd import (
    AbsorptionStats,
    SharpnessReport,
    absorption_exact,
    absorption_recurrence,
    absorption_spectral,
    admissible_initials,
    cutoff_report,
    separation,
    verify_sharpness,
)

__all__ = [
    'BDParams', 'BiasFunction', 'ScaleProfile', 'absorption_profile', 'bd_kernel', 'bd_stationary',
    'moran_kernel', 'mutation_bias', 'reflected_walk', 'wright_fisher_kernel',
    'ProductKernel', 'TrajectoryBatch', 'coupling_kernel', 'exact_joint', 'simulate',
    'DualFamily', 'DualFunction', 'DualReport', 'dual_function', 'dual_via_solve', 'is_monotone',
    'siegmund_dual', 'ultrametric_dual', 'verify_duality',
    'IntertwiningResult', 'duality_from_intertwining', 'intertwining_pipeline',
    'Spectrum', 'bd_spectrum', 'orthopoly_oracle', 'spectral_weights',
    'AbsorptionStats', 'SharpnessReport', 'absorption_exact', 'absorption_recurrence',
    'absorption_spectral', 'admissible_initials', 'cutoff_report', 'separation', 'verify_sharpness',
]
