"""Nonlocal transform-domain color image denoising."""
from .config import DenoiseConfig, METHODS
from .errors import (BoundsError, CoverageError, DimensionError, ModeError, NumericalError,
                     SizeError, SymmetryError)
from .filters import filter_cdct, filter_hosvd4d, filter_mstsvd
from .metrics import mse, psnr, ssim
from .pipeline import denoise, denoise_resized

__all__ = [
    "DenoiseConfig", "METHODS", "denoise", "denoise_resized",
    "filter_cdct", "filter_hosvd4d", "filter_mstsvd", "mse", "psnr", "ssim",
    "BoundsError", "CoverageError", "DimensionError", "ModeError", "NumericalError",
    "SizeError", "SymmetryError",
]
__version__ = "0.1.0"
