"""Tikhonov super-resolution with residual-whiteness parameter selection."""
from .degrade import PRESETS, GaussianPsfSpec, NoiseSpec, degrade, gaussian_kernel
from .estimator import TikhonovSuperResolver
from .grid import circular_convolve, dft2, idft2
from .linops import (
    AliasGroups,
    DecimationFactors,
    DegradationOperator,
    RegularizerStack,
    apply_blur,
    build_alias_groups,
    build_difference_regularizer,
    build_regularizer,
    downsample,
    upsample_zero,
)
from .metrics import bicubic_upsample, isnr, psnr, ssim
from .solver import SpectralSolveContext, dense_solve, prepare_context, residual_lr, solve
from .tuning import MuGrid, SelectionReport, select_dp, select_rwp, tau_of_mu
from .whiteness import (
    WhitenessTable,
    autocorrelation,
    build_whiteness_table,
    fast_whiteness,
    whiteness_measure,
)

__all__ = [
    "PRESETS",
    "GaussianPsfSpec",
    "NoiseSpec",
    "degrade",
    "gaussian_kernel",
    "TikhonovSuperResolver",
    "circular_convolve",
    "dft2",
    "idft2",
    "AliasGroups",
    "DecimationFactors",
    "DegradationOperator",
    "RegularizerStack",
    "apply_blur",
    "build_alias_groups",
    "build_difference_regularizer",
    "build_regularizer",
    "downsample",
    "upsample_zero",
    "bicubic_upsample",
    "isnr",
    "psnr",
    "ssim",
    "SpectralSolveContext",
    "dense_solve",
    "prepare_context",
    "residual_lr",
    "solve",
    "MuGrid",
    "SelectionReport",
    "select_dp",
    "select_rwp",
    "tau_of_mu",
    "WhitenessTable",
    "autocorrelation",
    "build_whiteness_table",
    "fast_whiteness",
    "whiteness_measure",
]

__version__ = "0.1.0"
