"""Numerics for translation-invariant valuations on convex bodies.

Submodules: ``geometry`` (polytopes), ``mixed`` (mixed and intrinsic
volumes), ``grassmann`` (Grassmannian transforms and sign checks),
``harmonics`` (spherical harmonics), ``spherical`` (spherical valuations and
the degree-1 Hodge-Riemann form), ``inequalities`` (Aleksandrov-Fenchel and
related checks) and ``cli``.
"""
from .errors import ContractError, InputError, NumericalError
from .geometry import (Polytope, SurfaceMeasure, ball_polytope, box, minkowski_sum, project,
                       reflect, scale, surface_area_measure, unit_cube, volume)
from .grassmann import (Frame, HighestWeight, TransformSignReport, cos_abs, cosine_eigenvalue,
                        haar_frame, hw_vector, perp, verify_sign_cosine, verify_sign_radon,
                        verify_signTR)
from .harmonics import HarmonicExpansion, basis_eval, degree_norm_sq, sph_dim
from .inequalities import (InequalityConfig, InequalityReport, af_check, eta_certificate,
                           iso_chain, minkowski2_ball, random_body, xi_certificate)
from .mixed import (MixedVolumeRequest, SteinerCoefficients, box_mixed_volume_oracle,
                    intrinsic_volumes, lefschetz_derivative, mixed_volume, mu_ball)
from .spherical import (HRCertificate, SphericalValuation, evaluate_top, hr_form,
                        make_valuation, pairing_sign_factor, poincare_pair)

__version__ = "0.1.0"

__all__ = [
    "ContractError",
    "InputError",
    "NumericalError",
    "Polytope",
    "SurfaceMeasure",
    "ball_polytope",
    "box",
    "minkowski_sum",
    "project",
    "reflect",
    "scale",
    "surface_area_measure",
    "unit_cube",
    "volume",
    "Frame",
    "HighestWeight",
    "TransformSignReport",
    "cos_abs",
    "cosine_eigenvalue",
    "haar_frame",
    "hw_vector",
    "perp",
    "verify_sign_cosine",
    "verify_sign_radon",
    "verify_signTR",
    "HarmonicExpansion",
    "basis_eval",
    "degree_norm_sq",
    "sph_dim",
    "InequalityConfig",
    "InequalityReport",
    "af_check",
    "eta_certificate",
    "iso_chain",
    "minkowski2_ball",
    "random_body",
    "xi_certificate",
    "MixedVolumeRequest",
    "SteinerCoefficients",
    "box_mixed_volume_oracle",
    "intrinsic_volumes",
    "lefschetz_derivative",
    "mixed_volume",
    "mu_ball",
    "HRCertificate",
    "SphericalValuation",
    "evaluate_top",
    "hr_form",
    "make_valuation",
    "pairing_sign_factor",
    "poincare_pair",
]
