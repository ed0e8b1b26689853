"""Perfusion deconvolution, PLP weight vectors and first principal component maps."""

from ._plp import (
    DegenerateData,
    InvalidArgument,
    NumericFailure,
    SingularInput,
    axel_weights,
    centered_correlation,
    condition_surface,
    convolution_matrix,
    cutoff_surface,
    deconvolution_weights,
    fit_pca,
    forward_convolve,
    fpc_map,
    gamma_aif,
    inverse,
    patlak_weights,
    perfusion_params,
    phantom,
    schedule,
    sign_changes,
    svd,
    tail_divergence,
    uniform_instants,
)

__all__ = [name for name in dir() if not name.startswith("_")]
