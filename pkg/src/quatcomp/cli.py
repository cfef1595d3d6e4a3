"""Command-line driver: ``quatcomp {recover,synth,sparsity,metrics}``.

Exit codes: 0 success, 2 bad arguments or I/O failure, 3 iteration limit
reached under ``--strict``.
"""

from __future__ import annotations

import argparse
import contextlib
import csv
import json
import logging
import math
import os
import sys
import warnings
from pathlib import Path

import numpy as np
from threadpoolctl import threadpool_limits

from . import media, synth
from .errors import DimensionMismatch, InvalidTruncation, IterationLimit
from .qtdct import QtdctContext, qtdct_forward, sparsity_profile
from .solver import VARIANTS, Observation, SolverConfig, solve

EXIT_OK, EXIT_IO, EXIT_LIMIT = 0, 2, 3
METRICS_SCHEMA = 1
THREADS_ENV = "QUATCOMP_THREADS"
TRACE_COLUMNS = ("outer", "inner", "beta", "delta_T", "res_TH", "res_SC", "objective")

log = logging.getLogger("quatcomp")


class CliError(Exception):
    """Input or output problem reported with exit code 2."""


def _sr(text: str) -> float:
    v = float(text)
    if not 0.0 < v <= 1.0:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1], got {text}")
    return v


def _positive(kind):
    def parse(text: str):
        v = kind(text)
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return v

    parse.__name__ = kind.__name__
    return parse


def _nonnegative_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"must be nonnegative, got {text}")
    return v


def _metric_value(x: float):
    # JSON has no infinity; identical inputs get the string sentinel
    return "inf" if math.isinf(x) else x


def _write_json(path: Path, payload: dict) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="quatcomp", description="Quaternion tensor completion for colour video.")
    parser.add_argument("-v", "--verbose", action="store_true", help="log solver progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    rec = sub.add_parser("recover", help="complete a masked frame sequence")
    rec.add_argument("input_dir", type=Path, help="directory of PNG frames (the full reference sequence)")
    rec.add_argument("output_dir", type=Path, help="where recovered frames, trace.csv and metrics.json go")
    src = rec.add_mutually_exclusive_group()
    src.add_argument("--sr", type=_sr, default=0.3, help="sample rate for a seeded random mask (default 0.3)")
    src.add_argument("--mask-file", type=Path, help="read the sampling mask from a QMSK file instead")
    rec.add_argument("--seed", type=int, default=0, help="seed for the mask and the multipliers (default 0)")
    rec.add_argument("--variant", choices=VARIANTS, default="rnns1", help="rank surrogate (default rnns1)")
    rec.add_argument("--lambda", dest="lam", type=float, default=0.05, help="sparsity weight (default 0.05)")
    rec.add_argument("--beta1", type=_positive(float), default=0.1, help="initial penalty (default 0.1)")
    rec.add_argument("--rho", type=float, default=None, help="penalty growth (default 1.1 rnns1, 1.01 rnns2)")
    rec.add_argument("--beta-max", type=_positive(float), default=1e7, help="penalty cap (default 1e7)")
    rec.add_argument(
        "--rank-trunc", type=_nonnegative_int, default=None, help="truncation r (default ceil(0.05 min(H, W)))"
    )
    rec.add_argument("--log-eps", type=_positive(float), default=1.0, help="offset of the log penalty (default 1)")
    rec.add_argument("--tol-inner", type=_positive(float), default=1e-4, help="inner tolerance, relative (1e-4)")
    rec.add_argument("--tol-outer", type=_positive(float), default=1e-4, help="outer tolerance, relative (1e-4)")
    rec.add_argument("--max-inner", type=_positive(int), default=500, help="inner iteration cap (default 500)")
    rec.add_argument("--max-outer", type=_positive(int), default=10, help="outer iteration cap (default 10)")
    rec.add_argument("--strict", action="store_true", help="exit 3 if the outer loop hits its cap")
    rec.add_argument("--record-time", action="store_true", help="store wall time in metrics.json")
    rec.set_defaults(func=cmd_recover)

    syn = sub.add_parser("synth", help="write a synthetic frame sequence and its ground truth")
    syn.add_argument("kind", choices=("lowrank", "smooth"))
    syn.add_argument("output_dir", type=Path)
    syn.add_argument("--dims", type=_positive(int), nargs=3, metavar=("H", "W", "F"), default=(64, 64, 10))
    syn.add_argument("--rank", type=_positive(int), default=3, help="tubal rank for lowrank (default 3)")
    syn.add_argument("--seed", type=int, default=0)
    syn.set_defaults(func=cmd_synth)

    sp = sub.add_parser("sparsity", help="histogram of QTDCT coefficient moduli")
    sp.add_argument("input_dir", type=Path)
    sp.add_argument("--bins", type=_positive(int), default=50)
    sp.add_argument("--output", type=Path, help="CSV path (default stdout)")
    sp.set_defaults(func=cmd_sparsity)

    met = sub.add_parser("metrics", help="PSNR and ASSIM between two frame directories")
    met.add_argument("reference_dir", type=Path)
    met.add_argument("test_dir", type=Path)
    met.add_argument("--output", type=Path, help="JSON path (default stdout)")
    met.set_defaults(func=cmd_metrics)
    return parser


def _solver_config(args) -> SolverConfig:
    try:
        return SolverConfig(
            variant=args.variant,
            r=args.rank_trunc,
            lam=args.lam,
            beta1=args.beta1,
            rho=args.rho,
            beta_max=args.beta_max,
            tol_inner=args.tol_inner,
            tol_outer=args.tol_outer,
            max_inner=args.max_inner,
            max_outer=args.max_outer,
            log_eps=args.log_eps,
            seed=args.seed,
        )
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def cmd_recover(args) -> int:
    cfg = _solver_config(args)
    seq = media.load_frames(args.input_dir)
    truth = media.rgb_to_qtensor(seq)
    if args.mask_file is not None:
        mask = media.read_mask(args.mask_file)
        if mask.shape != truth.shape:
            raise CliError(f"--mask-file dims {mask.shape} do not match frames {truth.shape}")
    else:
        mask = media.sample_mask(truth.shape, media.MaskSpec(args.sr, args.seed))
    try:
        cfg.truncation(truth.shape)
    except InvalidTruncation as exc:
        raise argparse.ArgumentTypeError(f"--rank-trunc: {exc}") from exc
    obs = Observation.from_full(truth, mask)

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", IterationLimit)
        recovered, report = solve(obs, cfg)
    limited = [w for w in caught if issubclass(w.category, IterationLimit)]
    for w in limited:
        print(f"warning: {w.message}", file=sys.stderr)

    out = media.qtensor_to_rgb(recovered)
    baseline = media.qtensor_to_rgb(obs.observed)
    out_dir = args.output_dir
    media.save_frames(out, out_dir / "frames")
    media.write_mask(out_dir / "mask.qmsk", mask)
    with open(out_dir / "trace.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=TRACE_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in report.trace:
            writer.writerow({k: (repr(row[k]) if isinstance(row[k], float) else row[k]) for k in TRACE_COLUMNS})
    metrics = {
        "schema": METRICS_SCHEMA,
        "psnr": _metric_value(media.psnr(seq, out)),
        "assim": media.assim(seq, out),
        "baseline_psnr": _metric_value(media.psnr(seq, baseline)),
        "iterations": report.iterations,
        "outer_iterations": report.outer_iterations,
        "converged": report.converged,
        "variant": cfg.variant,
        "sample_rate": obs.sample_rate,
        "seconds": report.seconds if args.record_time else None,
    }
    _write_json(out_dir / "metrics.json", metrics)
    print(f"psnr {metrics['psnr']} dB (zero-filled {metrics['baseline_psnr']}), assim {metrics['assim']:.4f}")
    if limited and args.strict:
        return EXIT_LIMIT
    return EXIT_OK


def cmd_synth(args) -> int:
    dims = tuple(args.dims)
    if args.kind == "lowrank":
        try:
            T = synth.lowrank_tensor(dims, args.rank, args.seed)
        except InvalidTruncation as exc:
            raise argparse.ArgumentTypeError(f"--rank: {exc}") from exc
        seq = media.qtensor_to_rgb(T)
        truth = T.components()
    else:
        seq = synth.smooth_video(dims, args.seed)
        truth = media.rgb_to_qtensor(seq).components()
    try:
        args.output_dir.mkdir(parents=True, exist_ok=True)
        media.save_frames(seq, args.output_dir)
        np.save(args.output_dir / "ground_truth.npy", truth)
    except OSError as exc:
        raise CliError(f"cannot write to {args.output_dir}: {exc}") from exc
    print(f"wrote {seq.frames} frames of {seq.height}x{seq.width} to {args.output_dir}")
    return EXIT_OK


def cmd_sparsity(args) -> int:
    T = media.rgb_to_qtensor(media.load_frames(args.input_dir))
    if args.bins < 2:
        raise argparse.ArgumentTypeError("--bins must be at least 2")
    prof = sparsity_profile(qtdct_forward(T, QtdctContext(T.shape)), bins=args.bins)
    cum = prof.cumulative_fraction()
    with open(args.output, "w", newline="") if args.output else contextlib.nullcontext(sys.stdout) as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["bin_left", "bin_right", "count", "cumulative_fraction"])
        for i, count in enumerate(prof.counts):
            left, right = float(prof.edges[i]), float(prof.edges[i + 1])
            writer.writerow([repr(left), repr(right), int(count), repr(float(cum[i]))])
    if args.output:
        print(f"sparsity {prof.sparsity:.6f}")
    return EXIT_OK


def cmd_metrics(args) -> int:
    ref = media.load_frames(args.reference_dir)
    test = media.load_frames(args.test_dir)
    if ref.pixels.shape != test.pixels.shape:
        raise CliError(f"sequences differ in shape: {ref.pixels.shape} vs {test.pixels.shape}")
    payload = {
        "schema": METRICS_SCHEMA,
        "psnr": _metric_value(media.psnr(ref, test)),
        "assim": media.assim(ref, test),
    }
    if args.output:
        _write_json(args.output, payload)
    else:
        print(json.dumps(payload, indent=2, sort_keys=True))
    return EXIT_OK


def _thread_limit():
    raw = os.environ.get(THREADS_ENV)
    if not raw:
        return contextlib.nullcontext()
    try:
        n = int(raw)
    except ValueError:
        n = 0
    if n < 1:
        raise CliError(f"{THREADS_ENV} must be a positive integer, got {raw!r}")
    return threadpool_limits(limits=n)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        with _thread_limit():
            return args.func(args)
    except argparse.ArgumentTypeError as exc:
        parser.error(str(exc))
    except (CliError, OSError, DimensionMismatch, ValueError) as exc:
        print(f"quatcomp: error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
