"""Spectral branching transforms on rank-one matrix-cone orbits.

Numerical realization of the intertwining transform between the space of
even (U(1)-invariant) square-integrable functions on a punctured vector
space and a direct integral of chart representations: radial Mellin
reduction, inversion, Plancherel densities, analytic continuation, and
group-equivariance checks, all validated by quadrature oracles.
"""

from .config import DEFAULT_CONFIG, QuadratureConfig
from .cone import orbit_integral, quasi_invariance_residual, rank_one_embedding, stratum_rank
from .errors import (
    ChartSingularity,
    DimensionTooLarge,
    DivergentExponent,
    DivergentRegion,
    InsufficientSmoothness,
    MaxSubdivisionsExceeded,
    NonIntegrableSingularity,
    NotPSD,
    OrbitspecError,
    PoleError,
    PoleOfContinuation,
    SingularMatrix,
    TruncationWarning,
    ZeroVector,
)
from .group_action import (
    BlockForm,
    GroupElement,
    block_decompose,
    chart_translation,
    factorize_parabolic,
    full_action,
    induced_action,
    mobius,
    orbit_action,
    orbit_transform,
    spherical_function,
)
from .profiles import RadialProfile, TestFunction, bump_profile
from .quadrature import quad_1d, quad_nd, sphere_mc
from .special import (
    beta,
    gamma,
    log_gamma,
    pochhammer,
    sphere_area,
    sphere_slice_complex,
    sphere_slice_real,
)
from .spectral_common import MellinTable, SpectralSamples, mellin
from .spectral_real import (
    PlancherelDensity,
    SpectralPoint,
    build_samples,
    decay_check,
    equivariance_residual,
    invert,
    plancherel_density,
    plancherel_residual,
    reduction_constant,
    spectral_coefficient,
    spherical_vector,
    transform_continued,
    transform_direct,
)
from .spectral_complex import (
    SpectralPointC,
    build_samples_complex,
    equivariance_residual_complex,
    invert_complex,
    plancherel_density_complex,
    plancherel_residual_complex,
    reduction_constant_complex,
    spectral_coefficient_complex,
    spherical_vector_complex,
    transform_direct_complex,
)

__version__ = "0.1.0"
