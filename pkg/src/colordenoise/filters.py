"""Collaborative filters applied to groups of similar patches.

Every filter maps a batch of groups ``(B, ps, ps, 3, K)`` to a filtered batch
of the same shape plus the number of transform coefficients that survived
hard thresholding in each group. Three transform families are provided:

* ``hosvd4d``: all four mode transforms learned per group by HOSVD.
* ``mstsvd``: 3-point DFT along color, which diagonalizes the block
  circulant RGB structure; row/column transforms are learned per Fourier
  channel and the group transform from the luminance channel. Only two of
  the three Fourier channels are filtered, the third is their conjugate.
* ``cdct``: fixed opponent color transform with orthonormal DCT-II along
  rows, columns and the group axis.

Thresholds follow the universal rule ``lam * sigma_c * sqrt(2 ln n)`` where
``sigma_c`` is the noise std in the transformed channel.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Optional, Union

import numpy as np

from .color import DFT3, DFT3_INV, OPPONENT_INV, OPPONENT_ROW_NORMS, opponent_forward, opponent_inverse
from .config import DenoiseConfig
from .errors import DimensionError, NumericalError
from .patches import PatchGroup
from .tensor import gram_factors

SQRT3 = np.sqrt(3.0)


def universal_threshold(sigma: float, n: int, lam: float = 1.0) -> float:
    if n <= 1:
        return 0.0
    return float(lam * sigma * np.sqrt(2.0 * np.log(n)))


@lru_cache(maxsize=None)
def dct_matrix(n: int) -> np.ndarray:
    """Orthonormal DCT-II matrix; row ``k`` is the ``k``-th cosine basis vector."""
    k = np.arange(n)[:, None]
    i = np.arange(n)[None, :]
    m = np.cos(np.pi * (2 * i + 1) * k / (2 * n)) * np.sqrt(2.0 / n)
    m[0] /= np.sqrt(2.0)
    m.setflags(write=False)
    return m


@dataclass
class TransformSet:
    """Per-group transforms, stored as bases (columns are basis vectors).

    Coefficients are obtained by multiplying along each mode with the
    conjugate transpose of the basis. ``color`` maps transformed channels
    back to RGB. ``row``/``col`` hold one basis per filtered Fourier channel
    for ``mstsvd``.
    """

    row: Union[np.ndarray, list]
    col: Union[np.ndarray, list]
    color: Optional[np.ndarray]
    group: np.ndarray


# -- batched helpers ---------------------------------------------------------

def _unfold(x: np.ndarray, axis: int) -> np.ndarray:
    # column order is irrelevant for left singular vectors, so a C-order reshape will do
    return np.moveaxis(x, axis, 1).reshape(x.shape[0], x.shape[axis], -1)


def _apply(x: np.ndarray, m: np.ndarray, axis: int) -> np.ndarray:
    """Multiply along ``axis``: ``out[b, .., p, ..] = sum_i m[p, i] x[b, .., i, ..]``.

    ``m`` is either a single matrix or one matrix per batch entry. The batch
    is viewed as ``(B, pre, I, post)`` so no axis shuffling is needed.
    """
    shape = x.shape
    b, n = shape[0], shape[axis]
    pre = int(np.prod(shape[1:axis], dtype=np.int64))
    post = int(np.prod(shape[axis + 1:], dtype=np.int64))
    if post == 1:
        y = x.reshape(b, pre, n) @ np.swapaxes(m, -1, -2)
    else:
        y = (m[:, None] if m.ndim == 3 else m) @ x.reshape(b, pre, n, post)
    return y.reshape(shape[:axis] + (m.shape[-2],) + shape[axis + 1:])


def _adjoint(u: np.ndarray) -> np.ndarray:
    ut = np.swapaxes(u, -1, -2)
    return np.conj(ut) if np.iscomplexobj(u) else ut


def _threshold(c: np.ndarray, tau) -> tuple[np.ndarray, np.ndarray]:
    keep = np.abs(c) > tau
    retained = keep.reshape(c.shape[0], -1).sum(axis=1)
    return np.where(keep, c, 0), retained


def _check(groups: np.ndarray) -> np.ndarray:
    groups = np.asarray(groups)
    if groups.ndim != 5 or groups.shape[3] != 3:
        raise DimensionError(f"expected groups of shape (B, ps, ps, 3, K), got {groups.shape}")
    if not np.all(np.isfinite(groups)):
        raise NumericalError("group contains non-finite values")
    return groups.astype(np.float64, copy=False)


# -- 4D HOSVD ------------------------------------------------------------------

def hosvd4d_forward(groups):
    factors = [gram_factors(_unfold(groups, ax)) for ax in (1, 2, 3, 4)]
    c = groups
    for ax, u in zip((1, 2, 3, 4), factors):
        c = _apply(c, _adjoint(u), ax)
    return c, factors


def hosvd4d_inverse(coeffs, factors):
    x = coeffs
    for ax, u in zip((1, 2, 3, 4), factors):
        x = _apply(x, u, ax)
    return x


def hosvd4d_batch(groups, sigma: float, lam: float = 1.0):
    groups = _check(groups)
    _, ps, _, nc, k = groups.shape
    c, factors = hosvd4d_forward(groups)
    c, retained = _threshold(c, universal_threshold(sigma, ps * ps * nc * k, lam))
    return hosvd4d_inverse(c, factors), retained


# -- MS-TSVD -------------------------------------------------------------------

def mstsvd_forward(groups):
    """Fourier-domain coefficients of channels 0 and 1 plus their transforms."""
    r, g, b = groups[..., 0, :], groups[..., 1, :], groups[..., 2, :]
    # channel 0 is 3x luminance; channel 2 is the conjugate of channel 1 and is skipped
    ch0 = r + g + b
    ch1 = DFT3[1, 0] * r + DFT3[1, 1] * g + DFT3[1, 2] * b
    ug = gram_factors(_unfold(ch0, 3))
    out = []
    for ch in (ch0, ch1):
        ur = gram_factors(_unfold(ch, 1))
        uc = gram_factors(_unfold(ch, 2))
        c = _apply(_apply(_apply(ch, _adjoint(ur), 1), _adjoint(uc), 2), _adjoint(ug), 3)
        out.append((c, ur, uc))
    return out, ug


def mstsvd_inverse(channels, ug):
    rec = [_apply(_apply(_apply(c, ug, 3), ur, 1), uc, 2) for c, ur, uc in channels]
    # x_n = (X0 + X1 conj(F[1, n]) + conj(X1) F[1, n]) / 3 = (X0 + 2 Re(X1 conj(F[1, n]))) / 3
    x0, x1 = rec[0].real, rec[1]
    return np.stack([(x0 + 2 * (x1 * np.conj(f)).real) / 3 for f in DFT3[1]], axis=3)


def mstsvd_batch(groups, sigma: float, lam: float = 1.0):
    groups = _check(groups)
    _, ps, _, _, k = groups.shape
    channels, ug = mstsvd_forward(groups)
    # every DFT row has squared norm 3, so each Fourier channel sees noise std sqrt(3) sigma
    tau = universal_threshold(SQRT3 * sigma, ps * ps * k, lam)
    kept = []
    retained = 0
    for i, (c, ur, uc) in enumerate(channels):
        c, r = _threshold(c, tau)
        kept.append((c, ur, uc))
        retained = retained + (r if i == 0 else 2 * r)
    return mstsvd_inverse(kept, ug), retained


# -- C-DCT ---------------------------------------------------------------------

def cdct_forward(groups):
    _, ps, _, _, k = groups.shape
    c = opponent_forward(groups, axis=3)
    c = _apply(c, dct_matrix(ps), 1)
    c = _apply(c, dct_matrix(ps), 2)
    return _apply(c, dct_matrix(k), 4)


def cdct_inverse(coeffs):
    _, ps, _, _, k = coeffs.shape
    x = _apply(coeffs, dct_matrix(k).T, 4)
    x = _apply(x, dct_matrix(ps).T, 2)
    x = _apply(x, dct_matrix(ps).T, 1)
    return opponent_inverse(x, axis=3)


def cdct_thresholds(sigma: float, ps: int, k: int, lam: float = 1.0) -> np.ndarray:
    """Per opponent channel thresholds, scaled by the opponent row norms."""
    base = universal_threshold(sigma, ps * ps * 3 * k, lam)
    return base * OPPONENT_ROW_NORMS


def cdct_batch(groups, sigma: float, lam: float = 1.0):
    groups = _check(groups)
    _, ps, _, _, k = groups.shape
    c = cdct_forward(groups)
    tau = cdct_thresholds(sigma, ps, k, lam)[:, None]
    c, retained = _threshold(c, tau)
    return cdct_inverse(c), retained


BATCH_FILTERS: dict[str, Callable] = {
    "hosvd4d": hosvd4d_batch,
    "mstsvd": mstsvd_batch,
    "cdct": cdct_batch,
}


# -- single-group API ----------------------------------------------------------

def _single(fn, group, cfg: DenoiseConfig):
    tensor = group.tensor if isinstance(group, PatchGroup) else np.asarray(group)
    out, _ = fn(tensor[None], cfg.sigma, cfg.lam)
    if isinstance(group, PatchGroup):
        return PatchGroup(out[0], group.coords, group.distances)
    return out[0]


def filter_hosvd4d(group, cfg: DenoiseConfig):
    """Learned 4D HOSVD collaborative filter for one group."""
    return _single(hosvd4d_batch, group, cfg)


def filter_mstsvd(group, cfg: DenoiseConfig):
    """Fourier-domain t-SVD collaborative filter for one group."""
    return _single(mstsvd_batch, group, cfg)


def filter_cdct(group, cfg: DenoiseConfig):
    """Opponent color + DCT collaborative filter for one group."""
    return _single(cdct_batch, group, cfg)


def learn_transforms(group, method: str) -> TransformSet:
    """Transforms a filter would use on ``group`` (for inspection and tests)."""
    tensor = group.tensor if isinstance(group, PatchGroup) else np.asarray(group)
    g = _check(tensor[None])
    ps, k = g.shape[1], g.shape[4]
    if method == "hosvd4d":
        _, f = hosvd4d_forward(g)
        return TransformSet(f[0][0], f[1][0], f[2][0], f[3][0])
    if method == "mstsvd":
        channels, ug = mstsvd_forward(g)
        return TransformSet([ur[0] for _, ur, _ in channels],
                            [uc[0] for _, _, uc in channels], DFT3_INV, ug[0])
    if method == "cdct":
        return TransformSet(dct_matrix(ps).T, dct_matrix(ps).T, OPPONENT_INV, dct_matrix(k).T)
    raise ValueError(f"unknown method {method!r}")


def transform_coefficients(group, method: str):
    """Forward-transform coefficients of one group before thresholding.

    Returns one array for ``hosvd4d``/``cdct`` and the two filtered Fourier
    channels for ``mstsvd``.
    """
    tensor = group.tensor if isinstance(group, PatchGroup) else np.asarray(group)
    g = _check(tensor[None])
    if method == "hosvd4d":
        return hosvd4d_forward(g)[0][0]
    if method == "mstsvd":
        channels, _ = mstsvd_forward(g)
        return [c[0] for c, _, _ in channels]
    if method == "cdct":
        return cdct_forward(g)[0]
    raise ValueError(f"unknown method {method!r}")
