"""Grouping, collaborative filtering and aggregation over a whole image."""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .color import luminance
from .config import DenoiseConfig
from .errors import DimensionError, NumericalError, SizeError
from .filters import BATCH_FILTERS
from .patches import AggregationBuffer, gather_groups, match_batch, reference_positions
from .resize import imresize, scaled_shape

log = logging.getLogger(__name__)


def _check_image(image) -> np.ndarray:
    image = np.asarray(image, dtype=np.float64)
    if image.ndim != 3 or image.shape[2] != 3:
        raise DimensionError(f"expected an (H, W, 3) image, got shape {image.shape}")
    if not np.all(np.isfinite(image)):
        raise NumericalError("image contains non-finite values")
    return image


def _process(image, lum, refs, cfg: DenoiseConfig):
    coords, _, counts = match_batch(lum, refs, cfg)
    filt = BATCH_FILTERS[cfg.method]
    out = []
    # groups are only short when the search window holds fewer than K patches
    for k in np.unique(counts):
        sel = np.flatnonzero(counts == k)
        c = coords[sel, :k]
        groups = gather_groups(image, c, cfg.patch_size)
        filtered, retained = filt(groups, cfg.sigma, cfg.lam)
        if cfg.weighting == "sparsity":
            w = 1.0 / (1.0 + np.asarray(retained, dtype=np.float64))
        else:
            w = np.ones(len(sel))
        out.append((filtered, c, np.full(len(sel), k), np.repeat(w[:, None], k, axis=1)))
    return out


def denoise(image, cfg: DenoiseConfig) -> np.ndarray:
    """Denoise an ``(H, W, 3)`` image on the 0-255 scale.

    The output is real valued and unclipped. Results are bit-identical for
    any ``cfg.workers``: batches are formed independently of the worker count
    and written back in reference order.
    """
    if cfg.resize is not None:
        return denoise_resized(image, cfg.resize, cfg)
    image = _check_image(image)
    h, w, _ = image.shape
    refs = reference_positions(h, w, cfg.patch_size, cfg.step)
    lum = np.ascontiguousarray(luminance(image))
    batches = [refs[i:i + cfg.batch_size] for i in range(0, len(refs), cfg.batch_size)]
    log.debug("denoising %dx%d with %s: %d groups", h, w, cfg.method, len(refs))

    buf = AggregationBuffer(h, w)

    def work(batch):
        return _process(image, lum, batch, cfg)

    if cfg.workers > 1:
        with ThreadPoolExecutor(cfg.workers) as pool:
            results = pool.map(work, batches)
            for parts in results:
                for part in parts:
                    buf.add_batch(*part)
    else:
        for batch in batches:
            for part in work(batch):
                buf.add_batch(*part)
    return buf.finalize()


def denoise_resized(image, scale: float, cfg: DenoiseConfig) -> np.ndarray:
    """Denoise a bicubic-downscaled copy, then upscale back to the input size."""
    if not 0 < scale < 1:
        raise ValueError(f"scale must lie in (0, 1), got {scale}")
    image = _check_image(image)
    small_shape = scaled_shape(image.shape, scale)
    if min(small_shape) < cfg.patch_size:
        raise SizeError(f"downscaled size {small_shape} is smaller than patch size {cfg.patch_size}")
    small = imresize(image, small_shape)
    den = denoise(small, cfg.with_(resize=None))
    return imresize(den, image.shape[:2])
