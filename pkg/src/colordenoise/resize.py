"""Separable bicubic resampling with the Catmull-Rom kernel (a = -0.5).

Borders are handled by clamping sample indices to the image. When
shrinking, the kernel is stretched by ``1 / scale`` so it also acts as an
anti-aliasing filter.
"""
from __future__ import annotations

import numpy as np

from .errors import SizeError

A = -0.5


def cubic(x: np.ndarray) -> np.ndarray:
    x = np.abs(x)
    x2, x3 = x * x, x * x * x
    return np.where(
        x <= 1, (A + 2) * x3 - (A + 3) * x2 + 1,
        np.where(x < 2, A * x3 - 5 * A * x2 + 8 * A * x - 4 * A, 0.0))


def resize_matrix(n_in: int, n_out: int) -> np.ndarray:
    """Dense ``(n_out, n_in)`` interpolation matrix; rows sum to one."""
    scale = n_out / n_in
    kscale = min(scale, 1.0)
    x = (np.arange(n_out) + 0.5) / scale - 0.5
    support = 2.0 / kscale
    left = np.floor(x - support).astype(np.int64) + 1
    taps = int(np.ceil(2 * support)) + 1
    idx = left[:, None] + np.arange(taps)[None, :]
    w = cubic((x[:, None] - idx) * kscale)
    w /= w.sum(axis=1, keepdims=True)
    m = np.zeros((n_out, n_in))
    rows = np.broadcast_to(np.arange(n_out)[:, None], idx.shape)
    np.add.at(m, (rows, np.clip(idx, 0, n_in - 1)), w)
    return m


def imresize(image: np.ndarray, shape: tuple[int, int]) -> np.ndarray:
    """Resample an ``(H, W)`` or ``(H, W, C)`` array to ``shape`` (rows, cols)."""
    image = np.asarray(image, dtype=np.float64)
    h, w = image.shape[:2]
    oh, ow = int(shape[0]), int(shape[1])
    if oh < 1 or ow < 1:
        raise SizeError(f"cannot resize to {shape}")
    mr = resize_matrix(h, oh)
    mc = resize_matrix(w, ow)
    out = np.tensordot(mr, image, axes=(1, 0))
    out = np.tensordot(mc, out, axes=(1, 1))
    return np.swapaxes(out, 0, 1)


def scaled_shape(shape: tuple[int, ...], scale: float) -> tuple[int, int]:
    """Extents after scaling by ``scale``, rounding half up."""
    return tuple(int(np.floor(s * scale + 0.5)) for s in shape[:2])
