"""Command line entry point: ``colordenoise {denoise,bench,synth}``.

Exit codes: 0 success, 1 usage error, 2 I/O error, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import logging
import sys
import warnings
from pathlib import Path

from .config import METHODS, DenoiseConfig
from .errors import CoverageError, NumericalError

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_NUMERIC = 0, 1, 2, 3

# CLI option -> DenoiseConfig field
OPTIONS = {
    "method": "method", "sigma": "sigma", "patch": "patch_size", "window": "window",
    "group": "group_size", "step": "step", "lambda": "lam", "resize": "resize",
    "workers": "workers", "weighting": "weighting",
}
CASTS = {"sigma": float, "lam": float, "resize": float, "patch_size": int, "window": int,
         "group_size": int, "step": int, "workers": int, "method": str, "weighting": str}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _floats(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def read_config_file(path) -> dict:
    """Parse ``key=value`` lines; keys are CLI option names or config field names."""
    values = {}
    for lineno, line in enumerate(Path(path).read_text().splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        key = OPTIONS.get(key.replace("-", "_"), key.replace("-", "_"))
        if key not in CASTS:
            raise UsageError(f"{path}:{lineno}: unknown key {key!r}")
        try:
            values[key] = CASTS[key](value)
        except ValueError:
            raise UsageError(f"{path}:{lineno}: bad value {value!r} for {key}")
    return values


def _add_config_options(p: argparse.ArgumentParser, with_method: bool = True) -> None:
    if with_method:
        p.add_argument("--method", choices=METHODS, default=None)
    p.add_argument("--sigma", type=float, default=None, help="noise std on the 0-255 scale")
    p.add_argument("--patch", type=int, default=None, help="patch size (default 8)")
    p.add_argument("--window", type=int, default=None, help="search window side (default 39)")
    p.add_argument("--group", type=int, default=None, help="patches per group (default 32)")
    p.add_argument("--step", type=int, default=None, help="reference stride (default 4)")
    p.add_argument("--lambda", dest="lambda", type=float, default=None,
                   help="threshold multiplier (default 1.0)")
    p.add_argument("--resize", type=float, default=None, help="downscale factor in (0, 1)")
    p.add_argument("--weighting", choices=("uniform", "sparsity"), default=None)
    p.add_argument("--workers", type=int, default=None)
    p.add_argument("--config", type=Path, default=None, help="key=value file; flags win")


def _build_config(args, **overrides) -> DenoiseConfig:
    values = read_config_file(args.config) if args.config else {}
    for opt, fld in OPTIONS.items():
        v = getattr(args, opt, None)
        if v is not None:
            values[fld] = v
    values.update(overrides)
    try:
        return DenoiseConfig(**values)
    except ValueError as exc:
        raise UsageError(str(exc))


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="colordenoise", description="Nonlocal transform-domain color image denoising.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("denoise", help="denoise one PNG image")
    _add_config_options(p)
    p.add_argument("input", type=Path)
    p.add_argument("output", type=Path)

    p = sub.add_parser("bench", help="benchmark methods on a dataset of noisy/mean pairs")
    p.add_argument("--dataset", type=Path, required=True)
    p.add_argument("--methods", required=True, help="comma-separated, e.g. mstsvd,cdct")
    p.add_argument("--sigma-grid", type=_floats, default=None)
    p.add_argument("--report", type=Path, required=True)
    p.add_argument("--markdown", type=Path, default=None)
    p.add_argument("--no-timing", action="store_true",
                   help="leave the seconds column empty (byte-reproducible reports)")
    _add_config_options(p, with_method=False)

    p = sub.add_parser("synth", help="add white Gaussian noise to a clean PNG")
    p.add_argument("--sigma", type=float, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("input", type=Path)
    p.add_argument("output", type=Path)
    return parser


def _cmd_denoise(args) -> int:
    from .imageio import read_image, write_image
    from .pipeline import denoise

    cfg = _build_config(args)
    image = read_image(args.input)
    write_image(args.output, denoise(image, cfg))
    return EXIT_OK


def _cmd_bench(args) -> int:
    from .bench import emit_report, run_benchmark, scan_dataset

    methods = [m.strip() for m in args.methods.split(",") if m.strip()]
    bad = [m for m in methods if m not in METHODS]
    if not methods or bad:
        raise UsageError(f"unknown methods {bad}; choose from {', '.join(METHODS)}")
    cfg = _build_config(args)
    with warnings.catch_warnings():
        warnings.simplefilter("always")
        warnings.showwarning = lambda msg, *a, **k: logging.warning("%s", msg)
        pairs = scan_dataset(args.dataset)
    if not pairs:
        raise UsageError(f"no scene pairs found under {args.dataset}")
    run = run_benchmark(pairs, methods, cfg, args.sigma_grid, timing=not args.no_timing)
    emit_report(run, args.report, "csv")
    if args.markdown:
        emit_report(run, args.markdown, "markdown")
    return EXIT_OK


def _cmd_synth(args) -> int:
    from .bench import synth_awgn
    from .imageio import read_image, write_image

    if args.sigma < 0:
        raise UsageError("sigma must be nonnegative")
    write_image(args.output, synth_awgn(read_image(args.input), args.sigma, args.seed))
    return EXIT_OK


COMMANDS = {"denoise": _cmd_denoise, "bench": _cmd_bench, "synth": _cmd_synth}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"colordenoise: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericalError, CoverageError, ArithmeticError) as exc:
        print(f"colordenoise: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"colordenoise: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"colordenoise: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
