"""Reference scheduling, block matching, group assembly and aggregation.

Coordinates are 0-based ``(row, col)`` of a patch's top-left pixel. Groups
are stored as ``(ps, ps, 3, K)`` tensors, patch ``k`` in slice ``k`` of the
last mode; batches of groups carry an extra leading axis.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numba import njit

from .config import DenoiseConfig
from .errors import BoundsError, CoverageError, DimensionError, SizeError


@dataclass
class PatchGroup:
    tensor: np.ndarray  # (ps, ps, 3, K)
    coords: np.ndarray  # (K, 2) int
    distances: np.ndarray  # (K,)

    @property
    def size(self) -> int:
        return self.tensor.shape[-1]


class Match(NamedTuple):
    coords: np.ndarray
    distances: np.ndarray
    complete: bool  # False when the window held fewer than K candidates


def _axis_positions(extent: int, ps: int, step: int) -> list[int]:
    last = extent - ps
    pos = list(range(0, last + 1, step))
    if pos[-1] != last:
        pos.append(last)
    return pos


def reference_positions(height: int, width: int, ps: int, step: int) -> np.ndarray:
    """Top-left corners of the reference patches, row-major, shape ``(n, 2)``.

    Positions advance by ``step`` and the grid is closed with the last valid
    offset ``extent - ps`` so the patches cover every pixel. A ``step``
    larger than ``ps`` would leave gaps and is capped at ``ps``.
    """
    if height < ps or width < ps:
        raise SizeError(f"image {height}x{width} is smaller than patch size {ps}")
    if step < 1:
        raise ValueError("step must be >= 1")
    step = min(step, ps)
    rows = _axis_positions(height, ps, step)
    cols = _axis_positions(width, ps, step)
    return np.array([(r, c) for r in rows for c in cols], dtype=np.int64).reshape(-1, 2)


@njit(cache=True, nogil=True)
def _match_batch(lum, refs, ps, sr, k, coords, dists, counts):
    h, w = lum.shape
    half = (sr - 1) // 2
    area = ps * ps
    best_d = np.empty(k)
    best_r = np.empty(k, dtype=np.int64)
    best_c = np.empty(k, dtype=np.int64)
    for b in range(refs.shape[0]):
        r, c = refs[b, 0], refs[b, 1]
        r0 = max(0, r - half)
        r1 = min(h - ps, r - half + sr - 1)
        c0 = max(0, c - half)
        c1 = min(w - ps, c - half + sr - 1)
        best_d[0] = 0.0
        best_r[0] = r
        best_c[0] = c
        m = 1
        for rr in range(r0, r1 + 1):
            for cc in range(c0, c1 + 1):
                if rr == r and cc == c:
                    continue
                # candidates arrive in scan order, so a tie with the current
                # K-th best loses and the scan can stop early
                limit = best_d[k - 1] if m == k else np.inf
                s = 0.0
                rejected = False
                for i in range(ps):
                    for j in range(ps):
                        t = lum[rr + i, cc + j] - lum[r + i, c + j]
                        s += t * t
                    if s / area >= limit:
                        rejected = True
                        break
                if rejected:
                    continue
                d = s / area
                pos = m if m < k else k - 1
                while pos > 1 and best_d[pos - 1] > d:
                    if pos < k:
                        best_d[pos] = best_d[pos - 1]
                        best_r[pos] = best_r[pos - 1]
                        best_c[pos] = best_c[pos - 1]
                    pos -= 1
                best_d[pos] = d
                best_r[pos] = rr
                best_c[pos] = cc
                if m < k:
                    m += 1
        for q in range(m):
            coords[b, q, 0] = best_r[q]
            coords[b, q, 1] = best_c[q]
            dists[b, q] = best_d[q]
        counts[b] = m


def match_batch(lum: np.ndarray, refs: np.ndarray, cfg: DenoiseConfig):
    """Block matching for many references at once.

    Returns ``(coords, distances, counts)`` with shapes ``(B, K, 2)``,
    ``(B, K)`` and ``(B,)``; rows beyond ``counts[b]`` are unused.
    """
    lum = np.ascontiguousarray(lum, dtype=np.float64)
    refs = np.ascontiguousarray(refs, dtype=np.int64).reshape(-1, 2)
    b = refs.shape[0]
    k = cfg.group_size
    coords = np.zeros((b, k, 2), dtype=np.int64)
    dists = np.zeros((b, k))
    counts = np.zeros(b, dtype=np.int64)
    _match_batch(lum, refs, cfg.patch_size, cfg.window, k, coords, dists, counts)
    return coords, dists, counts


def match_block(lum: np.ndarray, ref: tuple[int, int], cfg: DenoiseConfig) -> Match:
    """K nearest patches to ``ref`` under mean squared difference on ``lum``.

    Candidates are all patch positions in the ``window x window`` neighbourhood
    of ``ref`` (clipped to the image). The reference comes first at distance
    0; the rest are sorted by distance with ties resolved in row-major scan
    order.
    """
    lum = np.asarray(lum, dtype=np.float64)
    if lum.ndim != 2:
        raise DimensionError("block matching runs on a single-channel image")
    h, w = lum.shape
    ps = cfg.patch_size
    r, c = int(ref[0]), int(ref[1])
    if not (0 <= r <= h - ps and 0 <= c <= w - ps):
        raise BoundsError(f"reference {ref} outside a {h}x{w} image for patch size {ps}")
    coords, dists, counts = match_batch(lum, np.array([[r, c]]), cfg)
    n = int(counts[0])
    return Match(coords[0, :n].copy(), dists[0, :n].copy(), n == cfg.group_size)


def gather_groups(image: np.ndarray, coords: np.ndarray, ps: int) -> np.ndarray:
    """Stack patches for a batch of coordinate lists: ``(B, K, 2) -> (B, ps, ps, 3, K)``."""
    off = np.arange(ps)
    rows = coords[..., 0, None, None] + off[:, None]
    cols = coords[..., 1, None, None] + off[None, :]
    patches = image[rows, cols]  # (B, K, ps, ps, 3)
    return np.moveaxis(patches, 1, -1)


def assemble_group(image: np.ndarray, coords, ps: int, distances=None) -> PatchGroup:
    image = np.asarray(image, dtype=np.float64)
    coords = np.asarray(coords, dtype=np.int64).reshape(-1, 2)
    h, w = image.shape[:2]
    bad = (coords < 0).any(axis=1) | (coords[:, 0] > h - ps) | (coords[:, 1] > w - ps)
    if bad.any():
        raise BoundsError(f"patch at {tuple(coords[bad][0])} leaves the {h}x{w} image")
    tensor = gather_groups(image, coords[None], ps)[0]
    if distances is None:
        distances = np.zeros(len(coords))
    return PatchGroup(tensor, coords, np.asarray(distances, dtype=np.float64))


def disassemble_group(group: PatchGroup) -> list[np.ndarray]:
    return [group.tensor[..., k] for k in range(group.size)]


@njit(cache=True, nogil=True)
def _scatter(num, wsum, groups, coords, counts, weights):
    ps = groups.shape[1]
    for b in range(groups.shape[0]):
        for k in range(counts[b]):
            r, c = coords[b, k, 0], coords[b, k, 1]
            wk = weights[b, k]
            for i in range(ps):
                for j in range(ps):
                    for ch in range(3):
                        num[r + i, c + j, ch] += wk * groups[b, i, j, ch, k]
                    wsum[r + i, c + j] += wk


class AggregationBuffer:
    """Running weighted sum of patch estimates and per-pixel weights."""

    def __init__(self, height: int, width: int):
        self.numerator = np.zeros((height, width, 3))
        self.weight = np.zeros((height, width))

    def add_batch(self, groups: np.ndarray, coords: np.ndarray, counts: np.ndarray,
                  weights: np.ndarray) -> None:
        _scatter(self.numerator, self.weight,
                 np.ascontiguousarray(groups, dtype=np.float64),
                 np.ascontiguousarray(coords, dtype=np.int64),
                 np.ascontiguousarray(counts, dtype=np.int64),
                 np.ascontiguousarray(weights, dtype=np.float64))

    def merge(self, other: "AggregationBuffer") -> None:
        self.numerator += other.numerator
        self.weight += other.weight

    def finalize(self) -> np.ndarray:
        if np.any(self.weight <= 0):
            missing = np.argwhere(self.weight <= 0)[0]
            raise CoverageError(f"pixel {tuple(missing)} received no estimate")
        return self.numerator / self.weight[..., None]


def aggregate_add(buf: AggregationBuffer, group, coords, weights=1.0) -> AggregationBuffer:
    """Write a filtered group back into ``buf``.

    ``group`` is a :class:`PatchGroup` or a ``(ps, ps, 3, K)`` array and
    ``weights`` a scalar or one weight per patch.
    """
    tensor = group.tensor if isinstance(group, PatchGroup) else np.asarray(group)
    coords = np.asarray(coords, dtype=np.int64).reshape(-1, 2)
    k = tensor.shape[-1]
    if len(coords) != k:
        raise DimensionError(f"{len(coords)} coordinates for a group of {k} patches")
    w = np.broadcast_to(np.asarray(weights, dtype=np.float64), (k,))
    buf.add_batch(tensor[None], coords[None], np.array([k]), w[None])
    return buf


def finalize(buf: AggregationBuffer) -> np.ndarray:
    return buf.finalize()
