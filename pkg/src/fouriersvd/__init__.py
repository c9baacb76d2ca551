"""Stable SVD of contiguous blocks of the DFT matrix.

The singular vectors of a ``p x q`` block of the ``N x N`` DFT matrix are
obtained from eigenvectors of a symmetric tridiagonal matrix that commutes
with the block's Gram matrix.  Its eigenvalues are simple and well
separated, unlike the clustered singular values themselves.
"""

from .apps import (
    CondResult,
    HeatmapGrid,
    LocalizationMaps,
    band_energy,
    cond_heatmap,
    condition_number,
    hadamard_H,
    hadamard_rank_profile,
    localization,
)
from .core import (
    RealSymTridiagonal,
    ScalarConfig,
    SubmatrixSpec,
    build_A,
    build_C,
    build_F,
    build_J,
    build_S,
    diag_D,
    shift_to_B,
    twiddle,
)
from .eig_tridiag import EigenPairs, EigenSelection, eig_full, eig_selected, sturm_count
from .errors import InvalidArgumentError, NumericalFailureError
from .fourier_ops import columnwise_fft, fft, ifft, make_plan, matvec_A, matvec_A_adjoint
from .pdpss import SVDResult, plunge_svd, plunge_window, singular_values, svd

__all__ = [
    "CondResult", "HeatmapGrid", "LocalizationMaps", "band_energy", "cond_heatmap",
    "condition_number", "hadamard_H", "hadamard_rank_profile", "localization",
    "RealSymTridiagonal", "ScalarConfig", "SubmatrixSpec", "build_A", "build_C", "build_F",
    "build_J", "build_S", "diag_D", "shift_to_B", "twiddle",
    "EigenPairs", "EigenSelection", "eig_full", "eig_selected", "sturm_count",
    "InvalidArgumentError", "NumericalFailureError",
    "columnwise_fft", "fft", "ifft", "make_plan", "matvec_A", "matvec_A_adjoint",
    "SVDResult", "plunge_svd", "plunge_window", "singular_values", "svd",
]
