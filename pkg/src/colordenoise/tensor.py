"""Small dense tensor algebra.

Tensors are plain :class:`numpy.ndarray` objects. Modes are numbered from 0
like numpy axes. Unfolding follows the "first index fastest" convention: in
the mode-``n`` unfolding, the column index of element ``(i_0, ..., i_{N-1})``
is ``sum_{k != n} i_k * J_k`` with ``J_k`` the product of the extents of the
modes before ``k`` (skipping ``n``). This is a Fortran-order reshape of the
tensor with mode ``n`` moved to the front.
"""
from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, ModeError, NumericalError


def _check_mode(ndim: int, n: int) -> None:
    if not 0 <= n < ndim:
        raise ModeError(f"mode {n} out of range for a tensor of order {ndim}")


def unfold(t: np.ndarray, n: int) -> np.ndarray:
    """Mode-``n`` matricization of ``t``, shape ``(I_n, prod_{k!=n} I_k)``."""
    t = np.asarray(t)
    _check_mode(t.ndim, n)
    return np.reshape(np.moveaxis(t, n, 0), (t.shape[n], -1), order="F")


def fold(m: np.ndarray, n: int, shape: Sequence[int]) -> np.ndarray:
    """Inverse of :func:`unfold`: rebuild a tensor of ``shape`` from its mode-``n`` unfolding."""
    m = np.asarray(m)
    shape = tuple(int(s) for s in shape)
    _check_mode(len(shape), n)
    if m.ndim != 2:
        raise DimensionError(f"expected a matrix, got an array of order {m.ndim}")
    rest = shape[:n] + shape[n + 1:]
    if m.shape != (shape[n], int(np.prod(rest, dtype=np.int64))):
        raise DimensionError(f"matrix of shape {m.shape} cannot fold to {shape} along mode {n}")
    return np.moveaxis(np.reshape(m, (shape[n],) + rest, order="F"), 0, n)


def mode_product(t: np.ndarray, m: np.ndarray, n: int) -> np.ndarray:
    """n-mode product ``t x_n m``; satisfies ``unfold(result, n) == m @ unfold(t, n)``."""
    t = np.asarray(t)
    m = np.asarray(m)
    _check_mode(t.ndim, n)
    if m.ndim != 2 or m.shape[1] != t.shape[n]:
        raise DimensionError(
            f"matrix of shape {m.shape} does not match extent {t.shape[n]} of mode {n}")
    return np.moveaxis(np.tensordot(m, t, axes=(1, n)), 0, n)


def frobenius(t: np.ndarray) -> float:
    return float(np.sqrt(np.sum(np.abs(np.asarray(t)) ** 2)))


def svd(m: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Thin SVD ``m = u @ diag(s) @ vh`` for real or complex matrices.

    Singular values come back in descending order. Non-finite entries raise
    :class:`NumericalError` rather than producing garbage factors.
    """
    m = np.asarray(m)
    if m.ndim != 2:
        raise DimensionError(f"svd expects a matrix, got order {m.ndim}")
    if not np.all(np.isfinite(m)):
        raise NumericalError("svd input contains non-finite entries")
    return np.linalg.svd(m, full_matrices=False)


def left_factors(x: np.ndarray) -> np.ndarray:
    """Square left singular basis of each matrix in a stack ``(..., rows, cols)``.

    The thin SVD is enough when ``rows <= cols``; otherwise the full SVD
    supplies the orthogonal complement so the basis stays square.
    """
    rows, cols = x.shape[-2:]
    u = np.linalg.svd(x, full_matrices=rows > cols, compute_uv=True)[0]
    return u


def gram_factors(x: np.ndarray) -> np.ndarray:
    """Square left singular basis of a stack via the Gram matrix ``x @ x^H``.

    Eigenvectors of the Gram matrix are the left singular vectors; they come
    back ordered by descending singular value. Several times faster than
    :func:`left_factors` on the small, wide unfoldings met in patch groups,
    and exactly orthonormal regardless of conditioning.
    """
    xh = np.swapaxes(x, -1, -2)
    g = x @ (np.conj(xh) if np.iscomplexobj(x) else xh)
    return np.ascontiguousarray(np.linalg.eigh(g)[1][..., ::-1])


def hosvd_factors(t: np.ndarray, modes: Iterable[int] | None = None) -> list[np.ndarray]:
    """Full (untruncated) HOSVD factors, one square orthogonal matrix per mode.

    Column ``j`` of each factor is the ``j``-th left singular vector of the
    corresponding unfolding. The core is ``t`` multiplied by the conjugate
    transpose of every factor along its mode.
    """
    t = np.asarray(t)
    modes = range(t.ndim) if modes is None else list(modes)
    factors = []
    for n in modes:
        m = unfold(t, n)
        if not np.all(np.isfinite(m)):
            raise NumericalError("hosvd input contains non-finite entries")
        factors.append(left_factors(m))
    return factors


def hard_threshold(t: np.ndarray, tau: float) -> tuple[np.ndarray, int]:
    """Zero every coefficient with ``|c| <= tau``.

    Complex coefficients are tested by magnitude and survivors keep their
    phase. Returns the thresholded copy and the number of nonzeros left.
    """
    if tau < 0:
        raise ValueError(f"threshold must be nonnegative, got {tau}")
    t = np.asarray(t)
    keep = np.abs(t) > tau
    return np.where(keep, t, 0), int(np.count_nonzero(keep))
