"""Command-line front end: gen, adapt, dict, approx, sweep.

Exit codes: 0 success, 1 tolerance not met, 2 usage error,
3 file could not be read or written, 4 any other input error.
"""
from __future__ import annotations

import argparse
import logging
import sys
import time
import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import signalio
from .adapt import CurvatureVariant, adapt_partition, curvature_profile
from .bspline import sample
from .dictionary import SplineDictionary, build_dictionary
from .errors import IOFailure, NonFiniteCurvature, SplineDictError, Stagnation
from .partition import round_robin_subpartitions
from .pursuit import PursuitProblem, reconstruct, sparse_approximate

log = logging.getLogger("bspdict")

EXIT_OK = 0
EXIT_TOL = 1
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_INPUT = 4


@dataclass
class RunConfig:
    signal: str = "chirp"
    file: str | None = None
    interval: tuple | None = None
    samples: int = 2049
    order: int = 4
    level: int = 9
    subpartitions: int = 10
    sweep: tuple | None = None
    curvature: str = "paper"
    tol_fraction: float = 0.01
    out: str = "out"
    seed: int = 0
    partition: str | None = None

    def __post_init__(self):
        if not 0 < self.tol_fraction < 1:
            raise ValueError(f"tolerance fraction must be in (0, 1), got {self.tol_fraction}")
        if self.order < 1:
            raise ValueError(f"order must be >= 1, got {self.order}")
        if self.level < 1:
            raise ValueError(f"level must be >= 1, got {self.level}")
        if self.subpartitions < 1:
            raise ValueError(f"subpartition count must be >= 1, got {self.subpartitions}")

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        fields = cls.__dataclass_fields__
        kw = {k: v for k, v in vars(args).items() if k in fields and v is not None}
        for key in ("interval", "sweep"):
            if key in kw:
                kw[key] = tuple(kw[key])
        return cls(**kw)


def load_config_signal(cfg: RunConfig):
    if cfg.file is not None:
        if cfg.interval is None:
            raise ValueError("--interval C D is required with --file")
        return signalio.load_signal(cfg.file, *cfg.interval)
    if cfg.signal == "chirp":
        return signalio.gen_chirp(cfg.samples)
    if cfg.signal == "phased":
        c, d = cfg.interval if cfg.interval else (None, None)
        return signalio.gen_phased_cosine(cfg.samples, seed=cfg.seed, c=c, d=d)
    raise ValueError(f"unknown signal {cfg.signal!r}")


def config_partition(cfg: RunConfig, sig):
    if cfg.partition is not None:
        return signalio.load_partition(cfg.partition)
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", NonFiniteCurvature)
        p = adapt_partition(sig, cfg.level, cfg.curvature)
    for w in caught:
        log.warning("%s", w.message)
    return p


def run_pursuit(dictionary: SplineDictionary, sig, tol_fraction: float):
    """Sparse approximation of ``sig``; returns (decomposition, met, seconds, tol)."""
    t0 = time.perf_counter()
    prob = PursuitProblem.from_signal(dictionary, sig, tol_fraction)
    try:
        dec = sparse_approximate(prob)
    except Stagnation as exc:
        log.warning("%s", exc)
        dec = exc.decomposition
    return dec, dec.residual_norm <= prob.tol, time.perf_counter() - t0, prob.tol


def _write_run(out: Path, label: str, dictionary, sig, dec) -> None:
    ref = "dictionary.json" if label == "dict" else "basis of partition.json"
    signalio.save_decomposition(dec, out / f"decomposition_{label}.json", dictionary_ref=ref)
    approx = reconstruct(dec, dictionary, sig.grid)
    signalio.save_reconstruction(out / f"recon_{label}.csv", sig.grid, sig.values, approx)


def cmd_gen(cfg: RunConfig, args) -> int:
    sig = load_config_signal(cfg)
    signalio.ensure_dir(Path(args.output).parent)
    signalio.save_signal(sig, args.output)
    print(f"wrote {len(sig)} samples on [{sig.c}, {sig.d}] to {args.output}")
    return EXIT_OK


def cmd_adapt(cfg: RunConfig, args) -> int:
    sig = load_config_signal(cfg)
    p = config_partition(cfg, sig)
    out = signalio.ensure_dir(cfg.out)
    signalio.save_partition(p, out / "partition.json")
    prof = curvature_profile(sig, cfg.curvature)
    signalio.write_csv(out / "curvature.csv", ["x", "abs_curvature"], [prof.x, np.abs(prof.curvature)])
    print(f"knots: {len(p)} (interior {p.N})")
    return EXIT_OK


def _dictionary(cfg: RunConfig, p, n: int) -> SplineDictionary:
    return build_dictionary(p, round_robin_subpartitions(p, n), cfg.order)


def cmd_dict(cfg: RunConfig, args) -> int:
    if cfg.partition is None:
        sig = load_config_signal(cfg)
        p = config_partition(cfg, sig)
    else:
        p = signalio.load_partition(cfg.partition)
    D = _dictionary(cfg, p, cfg.subpartitions)
    out = signalio.ensure_dir(cfg.out)
    D.to_json(out / "dictionary.json")
    if args.grid_points:
        grid = np.linspace(p.c, p.d, args.grid_points)
        sample(D, grid).to_csv(out / "dictionary.csv")
    print(f"dictionary: {D.size} atoms (n={D.n}, m={D.m}, dim={D.dim})")
    return EXIT_OK


def _report_row(label, n, D, dec, met, secs, tol):
    return [label, n, D.size, dec.K, repr(dec.residual_norm), repr(tol), int(met), f"{secs:.3f}"]


REPORT_HEADER = ["dictionary", "n", "size", "K", "residual_norm", "tol", "met", "seconds"]


def cmd_approx(cfg: RunConfig, args) -> int:
    sig = load_config_signal(cfg)
    p = config_partition(cfg, sig)
    out = signalio.ensure_dir(cfg.out)
    signalio.save_partition(p, out / "partition.json")

    basis = _dictionary(cfg, p, 1)
    D = _dictionary(cfg, p, cfg.subpartitions)
    D.to_json(out / "dictionary.json")

    rows = []
    all_met = True
    for label, dic in (("basis", basis), ("dict", D)):
        dec, met, secs, tol = run_pursuit(dic, sig, cfg.tol_fraction)
        _write_run(out, label, dic, sig, dec)
        rows.append(_report_row(label, dic.n, dic, dec, met, secs, tol))
        all_met &= met
    signalio.write_csv(out / "report.csv", REPORT_HEADER, list(zip(*rows)))
    _print_table(rows)
    return EXIT_OK if all_met else EXIT_TOL


def cmd_sweep(cfg: RunConfig, args) -> int:
    sig = load_config_signal(cfg)
    p = config_partition(cfg, sig)
    out = signalio.ensure_dir(cfg.out)
    signalio.save_partition(p, out / "partition.json")
    lo, hi = cfg.sweep
    rows = []
    all_met = True
    for n in range(lo, hi + 1):
        D = _dictionary(cfg, p, n)
        dec, met, secs, tol = run_pursuit(D, sig, cfg.tol_fraction)
        signalio.save_decomposition(dec, out / f"decomposition_dict_n{n}.json")
        rows.append(_report_row("basis" if n == 1 else "dict", n, D, dec, met, secs, tol))
        all_met &= met
    ks = [r[3] if r[6] else np.inf for r in rows]
    best = int(np.argmin(ks)) if rows else -1
    header = REPORT_HEADER + ["best"]
    rows = [r + [int(i == best)] for i, r in enumerate(rows)]
    signalio.write_csv(out / "report.csv", header, list(zip(*rows)))
    _print_table(rows, best)
    return EXIT_OK if all_met else EXIT_TOL


def _print_table(rows, best=None):
    print(f"{'dictionary':<10} {'n':>4} {'size':>6} {'K':>6} {'residual':>12} {'tol':>12} met")
    for i, r in enumerate(rows):
        mark = "  <- min K" if i == best else ""
        print(f"{r[0]:<10} {r[1]:>4} {r[2]:>6} {r[3]:>6} {float(r[4]):>12.5g} {float(r[5]):>12.5g} {'yes' if r[6] else 'no'}{mark}")


def _add_signal_args(sp):
    g = sp.add_argument_group("signal")
    g.add_argument("--signal", choices=["chirp", "phased"], help="builtin test signal (default chirp)")
    g.add_argument("--file", help="one sample per line; needs --interval")
    g.add_argument("--interval", nargs=2, type=float, metavar=("C", "D"))
    g.add_argument("--samples", type=int, help="sample count for builtin signals (default 2049)")
    g.add_argument("--seed", type=int, help="phase seed for the phased cosine (default 0)")


def _add_partition_args(sp, with_partition=True):
    g = sp.add_argument_group("partition")
    g.add_argument("--level", "-l", type=int, help="subdivision level (default 9)")
    g.add_argument("--curvature", choices=[v.value for v in CurvatureVariant])
    if with_partition:
        g.add_argument("--partition", help="read partition JSON instead of adapting")


def _add_model_args(sp):
    sp.add_argument("--order", "-m", type=int, help="spline order (default 4, cubic)")
    sp.add_argument("--subpartitions", "-n", type=int, help="subpartition count (default 10)")
    sp.add_argument("--tol-fraction", type=float, help="tolerance as a fraction of ||f|| (default 0.01)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bspdict", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("gen", help="write a builtin test signal to a text file")
    _add_signal_args(sp)
    sp.add_argument("output")

    sp = sub.add_parser("adapt", help="adapt a partition to a signal")
    _add_signal_args(sp)
    _add_partition_args(sp, with_partition=False)
    sp.add_argument("--out", help="output directory (default out)")

    sp = sub.add_parser("dict", help="build a dictionary and export its metadata")
    _add_signal_args(sp)
    _add_partition_args(sp)
    _add_model_args(sp)
    sp.add_argument("--grid-points", type=int, default=0, help="also export atoms sampled on this many points")
    sp.add_argument("--out")

    sp = sub.add_parser("approx", help="sparse approximation with the basis and the dictionary")
    _add_signal_args(sp)
    _add_partition_args(sp)
    _add_model_args(sp)
    sp.add_argument("--out")

    sp = sub.add_parser("sweep", help="sparse approximation for a range of subpartition counts")
    _add_signal_args(sp)
    _add_partition_args(sp)
    _add_model_args(sp)
    sp.add_argument("--range", dest="sweep", nargs=2, type=int, metavar=("NMIN", "NMAX"), default=(2, 12))
    sp.add_argument("--out")
    return parser


COMMANDS = {"gen": cmd_gen, "adapt": cmd_adapt, "dict": cmd_dict, "approx": cmd_approx, "sweep": cmd_sweep}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.INFO, format="%(levelname)s: %(message)s")
    try:
        cfg = RunConfig.from_args(args)
        if cfg.sweep is not None and not 1 <= cfg.sweep[0] <= cfg.sweep[1]:
            raise ValueError(f"bad sweep range {cfg.sweep}")
        return COMMANDS[args.command](cfg, args)
    except IOFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (SplineDictError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
