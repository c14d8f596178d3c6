"""Hilbert modular forms of parallel even weight for K = Q(sqrt 5)."""

from .field import FieldElem, TotPosIndex, enumerate_indices, is_totally_positive, sigma_ideal
from .forms import (
    HilbertExpansion,
    bergman_ratio_1dim,
    cusp_project,
    dim_hilbert_series,
    eisenstein_hmf,
    evaluate_hmf,
    zeta_k,
)

__all__ = [
    "FieldElem",
    "TotPosIndex",
    "enumerate_indices",
    "is_totally_positive",
    "sigma_ideal",
    "HilbertExpansion",
    "bergman_ratio_1dim",
    "cusp_project",
    "dim_hilbert_series",
    "eisenstein_hmf",
    "evaluate_hmf",
    "zeta_k",
]
