"""Fixed 3x3 color-mode transforms: opponent color and the 3-point DFT."""
from __future__ import annotations

import numpy as np

from .errors import DimensionError, SymmetryError

OPPONENT = np.array([
    [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
    [0.5, 0.0, -0.5],
    [0.25, -0.5, 0.25],
])
OPPONENT_INV = np.linalg.inv(OPPONENT)
# noise std of each opponent channel relative to the RGB noise std
OPPONENT_ROW_NORMS = np.sqrt(np.sum(OPPONENT ** 2, axis=1))

_W = complex(-0.5, -np.sqrt(3.0) / 2.0)
DFT3 = np.array([
    [1.0, 1.0, 1.0],
    [1.0, _W, np.conj(_W)],
    [1.0, np.conj(_W), _W],
], dtype=complex)
DFT3_INV = DFT3.conj().T / 3.0


def _apply(t: np.ndarray, m: np.ndarray, axis: int) -> np.ndarray:
    t = np.asarray(t)
    if t.ndim == 0 or t.shape[axis] != 3:
        raise DimensionError(f"color axis must have extent 3, got shape {t.shape}")
    return np.moveaxis(np.tensordot(m, t, axes=(1, axis)), 0, axis)


def opponent_forward(t: np.ndarray, axis: int = -1) -> np.ndarray:
    """RGB -> (luminance, two chroma channels) along ``axis``."""
    return _apply(t, OPPONENT, axis)


def opponent_inverse(t: np.ndarray, axis: int = -1) -> np.ndarray:
    return _apply(t, OPPONENT_INV, axis)


def dft3_forward(t: np.ndarray, axis: int = -1) -> np.ndarray:
    """Unnormalized 3-point DFT along the color axis.

    For real input, channel 0 is ``R + G + B`` and channels 1 and 2 are
    complex conjugates of each other.
    """
    return _apply(t, DFT3, axis)


def dft3_inverse(t: np.ndarray, axis: int = -1) -> np.ndarray:
    """Inverse of :func:`dft3_forward`, returning a real array.

    Raises:
        SymmetryError: if the input is not conjugate-symmetric, i.e. the
            imaginary part of the result exceeds ``1e-6 * ||t||_F``.
    """
    x = _apply(t, DFT3_INV, axis)
    residue = np.max(np.abs(x.imag), initial=0.0)
    scale = np.sqrt(np.sum(np.abs(t) ** 2))
    if residue > 1e-6 * scale:
        raise SymmetryError(
            f"imaginary residue {residue:.3g} exceeds tolerance for norm {scale:.3g}")
    return np.ascontiguousarray(x.real)


def luminance(t: np.ndarray, axis: int = -1) -> np.ndarray:
    """Mean of the three color channels (first opponent channel)."""
    t = np.asarray(t)
    if t.ndim == 0 or t.shape[axis] != 3:
        raise DimensionError(f"color axis must have extent 3, got shape {t.shape}")
    return np.sum(t, axis=axis) / 3.0
