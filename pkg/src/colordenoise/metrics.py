"""Image quality indexes on the 0-255 scale."""
from __future__ import annotations

import math
import warnings

import numpy as np

from .errors import DimensionError

PEAK = 255.0
C1 = (0.01 * PEAK) ** 2
C2 = (0.03 * PEAK) ** 2


def quantize(image: np.ndarray) -> np.ndarray:
    """Round half up and clamp to ``[0, 255]``, as done when writing 8-bit files."""
    return np.clip(np.floor(np.asarray(image, dtype=np.float64) + 0.5), 0, 255)


def _pair(a, b, quantized: bool):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionError(f"image extents differ: {a.shape} vs {b.shape}")
    if quantized:
        a, b = quantize(a), quantize(b)
    return a, b


def mse(a, b, quantized: bool = False) -> float:
    """Mean squared error over every element (all pixels and channels)."""
    a, b = _pair(a, b, quantized)
    return float(np.mean((a - b) ** 2))


def psnr(a, b, quantized: bool = False) -> float:
    """``10 log10(255^2 / mse)`` in dB; ``inf`` for identical inputs."""
    err = mse(a, b, quantized)
    if err == 0:
        return math.inf
    return 10.0 * math.log10(PEAK ** 2 / err)


def gaussian_window(size: int = 11, std: float = 1.5) -> np.ndarray:
    x = np.arange(size) - (size - 1) / 2.0
    g = np.exp(-0.5 * (x / std) ** 2)
    return g / g.sum()


def _filter_valid(x: np.ndarray, g: np.ndarray) -> np.ndarray:
    n = len(g)
    x = np.lib.stride_tricks.sliding_window_view(x, n, axis=0) @ g
    return np.lib.stride_tricks.sliding_window_view(x, n, axis=1) @ g


def ssim(a, b, quantized: bool = False, win_size: int = 11, std: float = 1.5) -> float:
    """Mean structural similarity of the luminance (channel mean) of two images.

    Local statistics use a Gaussian window and only positions where the window
    fits entirely inside the image. Images smaller than the window shrink it
    to the image size, with a warning.
    """
    a, b = _pair(a, b, quantized)
    if a.ndim == 3:
        a, b = a.mean(axis=2), b.mean(axis=2)
    if a.ndim != 2:
        raise DimensionError(f"ssim expects 2D or (H, W, C) images, got {a.shape}")
    size = min(win_size, *a.shape)
    if size < win_size:
        warnings.warn(f"image {a.shape} smaller than the {win_size}x{win_size} SSIM window; "
                      f"using {size}x{size}", stacklevel=2)
    g = gaussian_window(size, std)
    mu_a, mu_b = _filter_valid(a, g), _filter_valid(b, g)
    var_a = _filter_valid(a * a, g) - mu_a ** 2
    var_b = _filter_valid(b * b, g) - mu_b ** 2
    cov = _filter_valid(a * b, g) - mu_a * mu_b
    num = (2 * mu_a * mu_b + C1) * (2 * cov + C2)
    den = (mu_a ** 2 + mu_b ** 2 + C1) * (var_a + var_b + C2)
    return float(np.mean(num / den))
