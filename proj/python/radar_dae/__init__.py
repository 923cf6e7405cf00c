"""Denoising autoencoders for through-wall and around-corner radar signatures."""

from ._core import (
    Autoencoder,
    DomainError,
    FormatError,
    InvalidConfig,
    IoError,
    generate_dataset,
    haar_forward,
    haar_inverse,
    load_dataset,
    load_weights,
    mean_nmse,
    mean_ssim,
    mismatch_permutation,
    nmse,
    run_acceptance,
    run_sweep,
    ssim,
    svd_denoise,
    train,
    validate_config,
    wavelet_denoise,
)

__all__ = [
    "Autoencoder",
    "DomainError",
    "FormatError",
    "InvalidConfig",
    "IoError",
    "generate_dataset",
    "haar_forward",
    "haar_inverse",
    "load_dataset",
    "load_weights",
    "mean_nmse",
    "mean_ssim",
    "mismatch_permutation",
    "nmse",
    "run_acceptance",
    "run_sweep",
    "ssim",
    "svd_denoise",
    "train",
    "validate_config",
    "wavelet_denoise",
]

__version__ = "0.1.0"
