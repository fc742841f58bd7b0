"""Acceptance suite: one test per criterion, each reported as a pass/fail line.

Run alone with ``pytest tests/test_acceptance.py -v``; the summary section
at the end of the run lists every criterion.
"""
import contextlib
import os
import time
from pathlib import Path

import numpy as np
import pytest

from colordenoise import DenoiseConfig, denoise, denoise_resized
from colordenoise.bench import run_benchmark, scan_dataset, synth_awgn
from colordenoise.cli import main
from colordenoise.color import DFT3, dft3_forward, luminance
from colordenoise.filters import (BATCH_FILTERS, filter_cdct, filter_hosvd4d, filter_mstsvd,
                                  transform_coefficients)
from colordenoise.imageio import write_image
from colordenoise.metrics import mse, psnr, ssim
from colordenoise.resize import imresize
from colordenoise.tensor import fold, frobenius, hosvd_factors, mode_product, unfold

from conftest import ACCEPTANCE, TEST_IMAGES

METHODS = ("mstsvd", "hosvd4d", "cdct")
SEED = 2024
DATASET_ENV = "COLORDENOISE_DATASET1"


@contextlib.contextmanager
def criterion(key, detail=""):
    """Record PASS when the block finishes, FAIL (and re-raise) when it asserts."""
    info = {"detail": detail}
    try:
        yield info
    except pytest.skip.Exception:
        ACCEPTANCE[key] = ("SKIP", info["detail"])
        raise
    except BaseException:
        ACCEPTANCE[key] = ("FAIL", info["detail"])
        raise
    ACCEPTANCE[key] = ("PASS", info["detail"])


def rel(a, b):
    return np.linalg.norm(a - b) / np.linalg.norm(b)


@pytest.fixture(scope="module", autouse=True)
def warm_jit():
    # load the compiled matching and scatter kernels so timings measure the work
    denoise(np.full((24, 24, 3), 100.0), DenoiseConfig(sigma=0.0, window=9, group_size=4))


def test_1_identity(images):
    with criterion(1) as info:
        worst, slowest = 0.0, 0.0
        filters = (filter_hosvd4d, filter_mstsvd, filter_cdct)
        for name in TEST_IMAGES:
            img = images[name]
            group = np.stack([img[i:i + 8, j:j + 8] for i, j in
                              [(0, 0), (40, 17), (100, 200), (248, 248)]], axis=-1)
            for f in filters:
                worst = max(worst, rel(f(group, DenoiseConfig(sigma=0.0)), group))
            for method in METHODS:
                start = time.perf_counter()
                out = denoise(img, DenoiseConfig(sigma=0.0, method=method))
                slowest = max(slowest, time.perf_counter() - start)
                worst = max(worst, rel(out, img))
        info["detail"] = f"max rel error {worst:.2e}, slowest run {slowest:.2f} s"
        assert worst < 1e-8
        assert slowest < 5.0


def kron_residual(core, us, n):
    a = core
    for k, u in enumerate(us):
        a = mode_product(a, u.T, k)
    chain = np.ones((1, 1))
    for k in reversed(range(len(us))):
        if k != n:
            chain = np.kron(chain, us[k])
    return np.max(np.abs(unfold(a, n) - us[n].T @ unfold(core, n) @ chain))


def test_2_algebra_oracles():
    with criterion(2) as info:
        rng = np.random.default_rng(SEED)
        start = time.perf_counter()
        worst = 0.0
        for _ in range(100):
            shape = tuple(rng.integers(1, 6, size=rng.integers(2, 5)))
            t = rng.standard_normal(shape)
            us = [np.linalg.qr(rng.standard_normal((s, s)))[0] for s in shape]
            for n, s in enumerate(shape):
                worst = max(worst, np.max(np.abs(fold(unfold(t, n), n, shape) - t)))
                m = rng.standard_normal((3, s))
                worst = max(worst, np.max(np.abs(unfold(mode_product(t, m, n), n)
                                                 - m @ unfold(t, n))))
                worst = max(worst, kron_residual(t, us, n) / frobenius(t))
            full = t
            for n, u in enumerate(us):
                full = mode_product(full, u, n)
            worst = max(worst, abs(frobenius(full) - frobenius(t)) / frobenius(t))
        elapsed = time.perf_counter() - start
        info["detail"] = f"max residual {worst:.2e} in {elapsed:.2f} s"
        assert worst < 1e-12
        assert elapsed < 10.0


def principal_angles(u, v):
    """Per-column angle between matching factor columns, phase/sign ignored."""
    c = np.clip(np.abs(np.sum(np.conj(u) * v, axis=0)), 0.0, 1.0)
    return np.arccos(c)


def test_3_fourier_structure():
    with criterion(3) as info:
        rng = np.random.default_rng(SEED)
        x = rng.uniform(0, 255, (64, 3))
        f = dft3_forward(x)
        sym = np.max(np.abs(f[:, 1] - np.conj(f[:, 2])))
        assert sym < 1e-12
        assert np.max(np.abs(DFT3 @ DFT3.conj().T - 3 * np.eye(3))) < 1e-12
        assert np.max(np.abs(f[:, 0].real - 3 * luminance(x))) < 1e-12
        worst = 0.0
        for _ in range(50):
            ps, k = 8, int(rng.integers(4, 17))
            g = rng.uniform(0, 255, (ps, ps, 3, 1)) + rng.normal(0, 20, (ps, ps, 3, k))
            u_real = hosvd_factors(g, [3])[0]
            u_hat = hosvd_factors(dft3_forward(g, 2), [3])[0]
            worst = max(worst, np.max(principal_angles(u_real, u_hat)))
        info["detail"] = f"conjugate residue {sym:.1e}, max principal angle {worst:.1e}"
        assert worst < 1e-6


@pytest.mark.slow
def test_4_denoising_gain(images):
    with criterion(4) as info:
        need = {15: 3.0, 25: 5.0, 50: 6.0}
        min_gain, slowest = {s: np.inf for s in need}, 0.0
        for name in TEST_IMAGES:
            clean = images[name]
            for sigma in need:
                noisy = synth_awgn(clean, sigma, SEED)
                base = psnr(noisy, clean)
                for method in METHODS:
                    start = time.perf_counter()
                    out = denoise(noisy, DenoiseConfig(sigma=sigma, method=method))
                    slowest = max(slowest, time.perf_counter() - start)
                    min_gain[sigma] = min(min_gain[sigma], psnr(out, clean) - base)
        info["detail"] = ("min gain " + ", ".join(f"s={s}: {g:.2f} dB" for s, g in min_gain.items())
                          + f"; slowest run {slowest:.1f} s")
        assert all(min_gain[s] >= need[s] for s in need)
        assert slowest < 60.0


def test_5_metric_exactness():
    with criterion(5) as info:
        zeros, full = np.zeros((16, 16, 3)), np.full((16, 16, 3), 255.0)
        assert psnr(zeros, full) == 0.0
        a = np.zeros((10, 10, 3))
        b = a.copy()
        b.flat[: a.size // 2] = np.sqrt(2 * 65.025)
        assert abs(mse(a, b) - 65.025) < 1e-9
        p = psnr(a, b)
        assert abs(p - 30.0) <= 0.001
        img = np.random.default_rng(SEED).uniform(0, 255, (32, 32, 3))
        assert ssim(img, img) == 1.0
        info["detail"] = f"psnr(mse=65.025) = {p:.6f} dB"


def _synthetic_dataset(root: Path, images, size=96):
    for i, name in enumerate(TEST_IMAGES):
        clean = images[name][:size, :size]
        scene = root / name
        scene.mkdir(parents=True)
        write_image(scene / "mean.png", clean)
        write_image(scene / "noisy.png", synth_awgn(clean, 20.0, SEED + i))
    return root


def test_6_best_protocol_and_dataset(images, tmp_path):
    with criterion(6) as info:
        pairs = scan_dataset(_synthetic_dataset(tmp_path / "synthetic", images))
        cfg = DenoiseConfig(sigma=10.0)
        run = run_benchmark(pairs, ["mstsvd", "cdct"], cfg, sigma_grid=[15.0, 20.0, 25.0],
                            timing=False)
        fixed = {(r.scene, r.method): r.psnr_db for r in run.results if "_best" not in r.method}
        for r in run.results:
            if r.method.endswith("_best"):
                assert r.psnr_db >= fixed[(r.scene, r.method[:-5])]
        info["detail"] = "_best >= fixed on synthetic scenes"

        root = os.environ.get(DATASET_ENV)
        if not root:
            info["detail"] += f"; table check skipped ({DATASET_ENV} not set)"
            return
        pairs = scan_dataset(root)
        assert len(pairs) == 15
        run = run_benchmark(pairs, ["mstsvd", "cdct"], DenoiseConfig(), timing=False)
        agg = run.aggregates()
        info["detail"] += (f"; mstsvd {agg['mstsvd']['psnr_db']:.2f} dB, "
                           f"cdct {agg['cdct']['psnr_db']:.2f} dB")
        assert abs(agg["mstsvd"]["psnr_db"] - 37.95) <= 1.0
        assert abs(agg["cdct"]["psnr_db"] - 37.70) <= 1.5


@pytest.mark.slow
def test_7_resize_strategy(images):
    with criterion(7) as info:
        clean = imresize(images["astronaut"], (1024, 1024))
        noisy = synth_awgn(clean, 50.0, SEED)
        cfg = DenoiseConfig(sigma=50.0)
        start = time.perf_counter()
        small = denoise_resized(noisy, 0.5, cfg)
        t_small = time.perf_counter() - start
        start = time.perf_counter()
        denoise(noisy, cfg)
        t_full = time.perf_counter() - start
        p_noisy, p_small = psnr(noisy, clean), psnr(small, clean)
        info["detail"] = (f"speedup {t_full / t_small:.2f}x, "
                          f"PSNR {p_noisy:.2f} -> {p_small:.2f} dB")
        assert t_full >= 3.0 * t_small
        assert p_small > p_noisy


def test_8_bench_determinism(images, tmp_path):
    with criterion(8) as info:
        root = _synthetic_dataset(tmp_path / "data", images, size=64)
        reports = []
        for i in range(2):
            out = tmp_path / f"run{i}.csv"
            code = main(["bench", "--dataset", str(root), "--methods", "mstsvd,cdct",
                         "--sigma", "20", "--sigma-grid", "15,25", "--no-timing",
                         "--workers", "2", "--report", str(out)])
            assert code == 0
            reports.append(out.read_bytes())
        info["detail"] = f"{len(reports[0])} bytes per report"
        assert reports[0] == reports[1]
