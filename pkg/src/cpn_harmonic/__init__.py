"""Equivariant harmonic self-maps of complex projective space.

Reduced tension-field ODE, its closed-form solution families, a two-sided
shooting solver for the singular boundary value problem, and the equivariant
stability spectrum (finite differences and Jacobi-polynomial closed form).
"""

from cpn_harmonic.errors import BracketError, ConvergenceError, DivergenceError, DomainError
from cpn_harmonic.geometry import (
    ActionBasis,
    OrbitEndomorphism,
    SpaceParams,
    action_basis,
    eta_squared,
    gram_oracle,
    pt_diagonal,
    trace_p_inv_pdot,
    trace_p_inv_pdot_shifted,
)
from cpn_harmonic.jacobi import JacobiParams, jacobi_eval, line_transform_residual
from cpn_harmonic.profiles import ClosedFormProfile, ConstantProfile, NumericProfile
from cpn_harmonic.shooting import ShootingConfig, ShotResult, integrate, series_start, shoot
from cpn_harmonic.solutions import (
    FamilyParam,
    convergence_gap,
    deformation_mode,
    family_eval,
    holomorphicity_residual,
)
from cpn_harmonic.spectral import (
    SpectrumResult,
    SturmLiouvilleProblem,
    closed_spectrum,
    eigen_smallest,
    index_nullity,
    potential,
    refined_spectrum,
    zero_mode_residual,
)
from cpn_harmonic.tension import (
    BoundaryData,
    admissible_k,
    boundary_gap,
    brouwer_degree,
    ode_residual,
    ode_residual_via_traces,
)

__all__ = [
    "ActionBasis",
    "BoundaryData",
    "BracketError",
    "ClosedFormProfile",
    "ConstantProfile",
    "ConvergenceError",
    "DivergenceError",
    "DomainError",
    "FamilyParam",
    "JacobiParams",
    "NumericProfile",
    "OrbitEndomorphism",
    "ShootingConfig",
    "ShotResult",
    "SpaceParams",
    "SpectrumResult",
    "SturmLiouvilleProblem",
    "action_basis",
    "admissible_k",
    "boundary_gap",
    "brouwer_degree",
    "closed_spectrum",
    "convergence_gap",
    "deformation_mode",
    "eigen_smallest",
    "eta_squared",
    "family_eval",
    "gram_oracle",
    "holomorphicity_residual",
    "index_nullity",
    "integrate",
    "jacobi_eval",
    "line_transform_residual",
    "ode_residual",
    "ode_residual_via_traces",
    "potential",
    "pt_diagonal",
    "refined_spectrum",
    "series_start",
    "shoot",
    "trace_p_inv_pdot",
    "trace_p_inv_pdot_shifted",
    "zero_mode_residual",
]
