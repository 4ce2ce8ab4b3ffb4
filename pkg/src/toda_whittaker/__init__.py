"""Whittaker functions of the open Toda chain with a Morse boundary term.

Harish-Chandra series, the signed-permutation connection sum, the dual
difference equations in the spectral variable, rank-one reference
functions and the Calogero-Sutherland confluence.
"""

from __future__ import annotations

from .connection import CFunctionValue, c_function, plane_wave_limit, whittaker_eval, whittaker_laplacian_residual
from .core import (
    ConeIndex,
    ConeVector,
    PositionPoint,
    RootData,
    SignedPermutation,
    SpectralPoint,
    classify_spectral,
    cone_enumerate,
    cone_index,
    decompose_in_S,
    group_enumerate,
    is_dominant,
    level_of,
    orbit,
    rho,
    root_data,
)
from .cs_confluence import (
    CouplingTriple,
    E_ell,
    confluence_error,
    coupling_schedule,
    cs_c_function,
    cs_coeff_U,
    cs_coeff_V,
    cs_dde_residual,
    cs_laplacian_residual,
    cs_phi_eval,
    cs_table,
    cs_whittaker_eval,
    gamma_factor,
    normalization_delta,
    scaled_c_function,
)
from .dual_ops import SignedSubset, apply_D, coeff_U, coeff_V, dde_residual, identity_sum_rule, residue_probe, signed_subsets
from .errors import (
    CancellationWarning,
    CFunctionPole,
    ChamberViolation,
    CoefficientPole,
    ConfluencePrecision,
    NearSingularSpectral,
    ParameterPole,
    PrecisionExhausted,
    QuadratureNotConverged,
    TailNotConverged,
    TodaWhittakerError,
)
from .hc_series import (
    Evaluation,
    TailConstants,
    TruncationPlan,
    hc_coefficient,
    hc_table,
    phi_eval,
    tail_constants,
    toda_laplacian_residual,
)
from .univariate import KummerParams, bessel_K_quad, kummer_1f1, univariate_dde_residual, whittaker_M_phi, whittaker_W_Phi

__all__ = [
    "apply_D",
    "bessel_K_quad",
    "c_function",
    "CancellationWarning",
    "CFunctionPole",
    "CFunctionValue",
    "ChamberViolation",
    "classify_spectral",
    "coeff_U",
    "coeff_V",
    "CoefficientPole",
    "cone_enumerate",
    "cone_index",
    "ConeIndex",
    "ConeVector",
    "confluence_error",
    "ConfluencePrecision",
    "coupling_schedule",
    "CouplingTriple",
    "cs_c_function",
    "cs_coeff_U",
    "cs_coeff_V",
    "cs_dde_residual",
    "cs_laplacian_residual",
    "cs_phi_eval",
    "cs_table",
    "cs_whittaker_eval",
    "dde_residual",
    "decompose_in_S",
    "E_ell",
    "Evaluation",
    "gamma_factor",
    "group_enumerate",
    "hc_coefficient",
    "hc_table",
    "identity_sum_rule",
    "is_dominant",
    "kummer_1f1",
    "KummerParams",
    "level_of",
    "NearSingularSpectral",
    "normalization_delta",
    "orbit",
    "ParameterPole",
    "phi_eval",
    "plane_wave_limit",
    "PositionPoint",
    "PrecisionExhausted",
    "QuadratureNotConverged",
    "residue_probe",
    "rho",
    "root_data",
    "RootData",
    "scaled_c_function",
    "signed_subsets",
    "SignedPermutation",
    "SignedSubset",
    "SpectralPoint",
    "tail_constants",
    "TailConstants",
    "TailNotConverged",
    "toda_laplacian_residual",
    "TodaWhittakerError",
    "TruncationPlan",
    "univariate_dde_residual",
    "whittaker_eval",
    "whittaker_laplacian_residual",
    "whittaker_M_phi",
    "whittaker_W_Phi",
]

__version__ = "0.1.0"
