"""Denoiser configuration."""
from __future__ import annotations

from dataclasses import dataclass, fields, replace
from typing import Optional

METHODS = ("mstsvd", "hosvd4d", "cdct")
WEIGHTINGS = ("uniform", "sparsity")


@dataclass(frozen=True)
class DenoiseConfig:
    """Parameters of the grouping / filtering / aggregation pipeline.

    Attributes:
        patch_size: side of the square patches (``ps``).
        window: side of the block-matching search window (``SR``).
        group_size: maximum number of patches per group (``K``).
        step: stride between neighbouring reference patches (``N_step``).
        sigma: noise standard deviation on the 0-255 scale.
        lam: multiplier on the universal threshold.
        method: collaborative filter, one of ``METHODS``.
        resize: optional downscale factor in (0, 1) for the resize strategy.
        weighting: ``"uniform"`` or ``"sparsity"`` (``1 / (1 + retained)``).
        workers: threads used for matching and filtering; never changes output.
        batch_size: reference patches filtered together. Part of the
            numerical recipe (aggregation order), so keep it fixed when
            comparing runs bit for bit.
    """

    patch_size: int = 8
    window: int = 39
    group_size: int = 32
    step: int = 4
    sigma: float = 25.0
    lam: float = 1.0
    method: str = "mstsvd"
    resize: Optional[float] = None
    weighting: str = "uniform"
    workers: int = 1
    batch_size: int = 256

    def __post_init__(self):
        if self.patch_size < 2:
            raise ValueError(f"patch_size must be >= 2, got {self.patch_size}")
        if self.window < self.patch_size:
            raise ValueError("window must be at least patch_size")
        if self.group_size < 1 or self.step < 1:
            raise ValueError("group_size and step must be >= 1")
        if self.sigma < 0:
            raise ValueError(f"sigma must be nonnegative, got {self.sigma}")
        if self.lam <= 0:
            raise ValueError(f"lam must be positive, got {self.lam}")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; choose from {METHODS}")
        if self.resize is not None and not 0 < self.resize < 1:
            raise ValueError(f"resize must lie in (0, 1), got {self.resize}")
        if self.weighting not in WEIGHTINGS:
            raise ValueError(f"unknown weighting {self.weighting!r}")
        if self.workers < 1 or self.batch_size < 1:
            raise ValueError("workers and batch_size must be >= 1")

    def with_(self, **changes) -> "DenoiseConfig":
        return replace(self, **changes)


def field_names() -> list[str]:
    return [f.name for f in fields(DenoiseConfig)]
