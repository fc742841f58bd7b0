"""Dataset discovery, synthetic noise, benchmark runs and reports.

Dataset layout: ``<root>/<scene>/noisy.png`` with ``<root>/<scene>/mean.png``
as ground truth, optionally ``<root>/<scene>/info.txt`` holding
``camera=...`` and ``iso=...`` lines. Files directly under ``root`` named
``<scene>_real.png`` / ``<scene>_mean.png`` are picked up as well.
"""
from __future__ import annotations

import csv
import logging
import math
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .config import DenoiseConfig
from .errors import DimensionError
from .imageio import image_size, read_image
from .metrics import psnr, ssim
from .pipeline import denoise

log = logging.getLogger(__name__)

COLUMNS = ("scene", "camera", "method", "sigma", "psnr_db", "ssim", "seconds")
AVERAGE = "average"


class DatasetWarning(UserWarning):
    pass


@dataclass(frozen=True)
class ScenePair:
    scene: str
    noisy: Path
    clean: Path
    camera: str = ""
    iso: str = ""


def _read_info(path: Path) -> dict:
    info = {}
    if path.is_file():
        for line in path.read_text().splitlines():
            if "=" in line:
                key, value = line.split("=", 1)
                info[key.strip().lower()] = value.strip()
    return info


def _valid(pair: ScenePair) -> bool:
    try:
        a, b = image_size(pair.noisy), image_size(pair.clean)
    except OSError as exc:
        warnings.warn(f"skipping scene {pair.scene!r}: {exc}", DatasetWarning, stacklevel=3)
        return False
    if a[:2] != b[:2]:
        warnings.warn(f"skipping scene {pair.scene!r}: extents differ {a[:2]} vs {b[:2]}",
                      DatasetWarning, stacklevel=3)
        return False
    if a[2] < 3 or b[2] < 3:
        warnings.warn(f"skipping scene {pair.scene!r}: not a color image", DatasetWarning,
                      stacklevel=3)
        return False
    return True


def scan_dataset(root) -> list[ScenePair]:
    """Discover noisy / ground-truth pairs under ``root`` in lexicographic scene order.

    Pairs that cannot be read, differ in extent or are not RGB are dropped
    with a :class:`DatasetWarning`.
    """
    root = Path(root)
    if not root.is_dir():
        raise FileNotFoundError(f"dataset directory {root} does not exist")
    found = {}
    for sub in sorted(p for p in root.iterdir() if p.is_dir()):
        noisy, clean = sub / "noisy.png", sub / "mean.png"
        if noisy.is_file() and clean.is_file():
            info = _read_info(sub / "info.txt")
            found[sub.name] = ScenePair(sub.name, noisy, clean,
                                        info.get("camera", ""), info.get("iso", ""))
    for noisy in sorted(root.glob("*_real.png")):
        scene = noisy.name[:-len("_real.png")]
        clean = root / f"{scene}_mean.png"
        if clean.is_file() and scene not in found:
            found[scene] = ScenePair(scene, noisy, clean)
    return [found[k] for k in sorted(found) if _valid(found[k])]


def mean_ground_truth(frames: Sequence[np.ndarray]) -> np.ndarray:
    """Per-pixel mean of repeated captures of a static scene."""
    if len(frames) < 2:
        raise ValueError("need at least two frames")
    arrs = [np.asarray(f, dtype=np.float64) for f in frames]
    if any(a.shape != arrs[0].shape for a in arrs):
        raise DimensionError("frames differ in extent")
    # sorted summation keeps the result independent of frame order
    return np.sort(np.stack(arrs), axis=0).sum(axis=0) / len(arrs)


def synth_awgn(image: np.ndarray, sigma: float, seed: int) -> np.ndarray:
    """Add white Gaussian noise of std ``sigma``; no clipping.

    The noise is ``numpy.random.default_rng(seed).standard_normal(shape)``
    (PCG64) scaled by ``sigma``, drawn in C order over ``(H, W, C)``.
    """
    if sigma < 0:
        raise ValueError(f"sigma must be nonnegative, got {sigma}")
    image = np.asarray(image, dtype=np.float64)
    if sigma == 0:
        return image.copy()
    rng = np.random.default_rng(seed)
    return image + sigma * rng.standard_normal(image.shape)


@dataclass
class SceneResult:
    scene: str
    camera: str
    method: str
    sigma: float
    psnr_db: float
    ssim: float
    seconds: Optional[float]
    error: str = ""


@dataclass
class BenchmarkRun:
    methods: list
    config: DenoiseConfig
    sigma_grid: Optional[list] = None
    results: list = field(default_factory=list)

    def method_labels(self) -> list[str]:
        labels = []
        for m in self.methods:
            labels.append(m)
            if self.sigma_grid:
                labels.append(f"{m}_best")
        return labels

    def aggregates(self) -> dict[str, dict]:
        """Arithmetic means of PSNR, SSIM and time per method over successful scenes."""
        out = {}
        for label in self.method_labels():
            rows = [r for r in self.results if r.method == label and not r.error]
            if not rows:
                continue
            secs = [r.seconds for r in rows if r.seconds is not None]
            out[label] = {
                "psnr_db": float(np.mean([r.psnr_db for r in rows])),
                "ssim": float(np.mean([r.ssim for r in rows])),
                "seconds": float(np.mean(secs)) if len(secs) == len(rows) else None,
            }
        return out


def _timed(noisy, cfg):
    start = time.perf_counter()
    out = denoise(noisy, cfg)
    return out, time.perf_counter() - start


def run_benchmark(pairs: Sequence[ScenePair], methods: Sequence[str], cfg: DenoiseConfig,
                  sigma_grid: Optional[Sequence[float]] = None,
                  timing: bool = True) -> BenchmarkRun:
    """Denoise every scene with every method and score against ground truth.

    Each method runs at ``cfg.sigma``. With ``sigma_grid``, an extra
    ``<method>_best`` row keeps the highest-PSNR result over the grid and
    ``cfg.sigma``. ``timing=False`` leaves ``seconds`` empty so reports
    are byte-reproducible. A scene that fails is recorded with its error
    and the run carries on.
    """
    if not pairs or not methods:
        raise ValueError("need at least one scene and one method")
    run = BenchmarkRun(list(methods), cfg, list(sigma_grid) if sigma_grid else None)
    for pair in pairs:
        try:
            noisy, clean = read_image(pair.noisy), read_image(pair.clean)
        except OSError as exc:
            for label in run.method_labels():
                run.results.append(SceneResult(pair.scene, pair.camera, label, math.nan,
                                               math.nan, math.nan, None, str(exc)))
            continue
        for method in methods:
            mcfg = cfg.with_(method=method)
            try:
                scored = {}
                sigmas = [cfg.sigma] + [s for s in (run.sigma_grid or []) if s != cfg.sigma]
                for s in sigmas:
                    out, secs = _timed(noisy, mcfg.with_(sigma=s))
                    scored[s] = (psnr(out, clean), ssim(out, clean), secs if timing else None)
                    if not run.sigma_grid:
                        break
                p, q, t = scored[cfg.sigma]
                run.results.append(SceneResult(pair.scene, pair.camera, method, cfg.sigma, p, q, t))
                if run.sigma_grid:
                    # first maximum in candidate order, so ties favour the fixed sigma
                    best = max(sigmas, key=lambda s: scored[s][0])
                    p, q, t = scored[best]
                    run.results.append(SceneResult(pair.scene, pair.camera, f"{method}_best",
                                                   best, p, q, t))
            except Exception as exc:  # recorded per scene, the run continues
                log.exception("scene %s failed with %s", pair.scene, method)
                labels = [method, f"{method}_best"] if run.sigma_grid else [method]
                for label in labels:
                    run.results.append(SceneResult(pair.scene, pair.camera, label, math.nan,
                                                   math.nan, math.nan, None, repr(exc)))
    return run


def _num(x) -> str:
    if x is None:
        return ""
    return repr(float(x))


def report_rows(run: BenchmarkRun) -> list[list[str]]:
    rows = []
    for r in run.results:
        rows.append([r.scene, r.camera, r.method, _num(r.sigma), _num(r.psnr_db),
                     _num(r.ssim), _num(r.seconds)])
    for label, agg in run.aggregates().items():
        rows.append([AVERAGE, "", label, "", _num(agg["psnr_db"]), _num(agg["ssim"]),
                     _num(agg["seconds"])])
    return rows


def write_csv(run: BenchmarkRun, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(COLUMNS)
        writer.writerows(report_rows(run))


def read_csv(path) -> list[dict]:
    """Parse a CSV report back into dicts with floats (``None`` for empty cells)."""
    out = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            for key in ("sigma", "psnr_db", "ssim", "seconds"):
                row[key] = float(row[key]) if row[key] != "" else None
            out.append(row)
    return out


def _fmt(x, digits) -> str:
    if x is None or (isinstance(x, float) and math.isnan(x)):
        return ""
    return f"{x:.{digits}f}"


def write_markdown(run: BenchmarkRun, path) -> None:
    """Human-readable table; in the average rows the best value per column is bold."""
    aggs = run.aggregates()
    best = {}
    if aggs:
        best["psnr_db"] = max(a["psnr_db"] for a in aggs.values())
        best["ssim"] = max(a["ssim"] for a in aggs.values())
        secs = [a["seconds"] for a in aggs.values() if a["seconds"] is not None]
        best["seconds"] = min(secs) if secs else None
    digits = {"psnr_db": 2, "ssim": 4, "seconds": 1}

    lines = ["| " + " | ".join(COLUMNS) + " |", "|" + "---|" * len(COLUMNS)]
    for r in run.results:
        cells = [r.scene, r.camera, r.method, _fmt(r.sigma, 1), _fmt(r.psnr_db, 2),
                 _fmt(r.ssim, 4), _fmt(r.seconds, 1)]
        lines.append("| " + " | ".join(cells) + " |")
    for label, agg in aggs.items():
        cells = [AVERAGE, "", label, ""]
        for key in ("psnr_db", "ssim", "seconds"):
            text = _fmt(agg[key], digits[key])
            if text and agg[key] == best.get(key):
                text = f"**{text}**"
            cells.append(text)
        lines.append("| " + " | ".join(cells) + " |")
    Path(path).write_text("\n".join(lines) + "\n")


def emit_report(run: BenchmarkRun, path, fmt: str = "csv") -> None:
    if fmt == "csv":
        write_csv(run, path)
    elif fmt in ("md", "markdown"):
        write_markdown(run, path)
    else:
        raise ValueError(f"unknown report format {fmt!r}")
