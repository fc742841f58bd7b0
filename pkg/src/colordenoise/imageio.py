"""8-bit RGB PNG reading and writing."""
from __future__ import annotations

from pathlib import Path

import numpy as np
from PIL import Image

from .metrics import quantize


def read_image(path) -> np.ndarray:
    """Decode an image file to a float64 ``(H, W, 3)`` array on the 0-255 scale."""
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"), dtype=np.float64)


def write_image(path, image: np.ndarray) -> None:
    """Round half up, clamp to ``[0, 255]`` and save as 8-bit RGB."""
    data = quantize(image).astype(np.uint8)
    Image.fromarray(data, mode="RGB").save(Path(path))


def image_size(path) -> tuple[int, int, int]:
    """``(height, width, bands)`` read from the header only."""
    with Image.open(path) as im:
        return im.size[1], im.size[0], len(im.getbands())
