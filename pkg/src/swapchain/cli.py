"""Command line entry point: ``swapchain <subcommand> ...``.

Exit codes: 0 ok, 1 internal error, 2 unrealizable degree sequence,
3 not connectable, 4 bad input (malformed file or arguments).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict

import numpy as np

from . import bench
from ._table import format_table, params_comment
from .bias_study import CSV_COLUMNS as BIAS_COLUMNS, bias_grid
from .degree_model import power_law, sample_sequence
from .errors import (
    BadInput, FormatError, NotConnectable, OddSum, SamplingFailed, SwapChainError,
    Unrealizable, UnreachableMean,
)
from .graph import format_edge_list
from .realization import erdos_gallai, read_degrees, realize
from .shuffle import HEURISTICS, ShuffleConfig, Shuffler, swap_budget

EXIT_OK = 0
EXIT_INTERNAL = 1
EXIT_UNREALIZABLE = 2
EXIT_NOT_CONNECTABLE = 3
EXIT_BAD_INPUT = 4


class UsageError(Exception):
    """Argument combination argparse cannot express."""


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _table(args, columns, rows, **params) -> None:
    comment = params_comment(seed=args.seed, **params)
    if args.format == "json":
        recs = [dict(zip(columns, r)) for r in rows]
        text = json.dumps({"params": comment, "rows": recs}, indent=1, default=_json_default) + "\n"
    else:
        text = format_table(columns, rows, comment)
    _emit(text, args.out)


def _json_default(x):
    if isinstance(x, np.generic):
        return x.item()
    raise TypeError(type(x).__name__)


# subcommands

def cmd_generate(args) -> int:
    rng = np.random.default_rng(args.seed)
    if args.degrees is not None:
        if any(v is not None for v in (args.alpha, args.z, args.n)):
            raise UsageError("use either --degrees or --alpha/--z/--n")
        degrees = read_degrees(args.degrees)
    else:
        if any(v is None for v in (args.alpha, args.z, args.n)):
            raise UsageError("need --degrees FILE or all of --alpha, --z, --n")
        degrees = sample_sequence(power_law(args.alpha, args.z, args.n), rng, connectable=True)
    if not erdos_gallai(degrees):
        raise Unrealizable("unrealizable degree sequence")
    cfg = ShuffleConfig(gamma=args.gamma, heuristic=HEURISTICS[args.heuristic], seed=args.seed)
    g = realize(degrees, rng)
    sh = Shuffler(g, cfg, rng=rng)
    sh.advance(swap_budget(g, cfg))
    st = sh.stats()
    if args.format == "json":
        text = json.dumps({"n": sh.graph.n, "m": sh.graph.m,
                           "edges": sh.graph.edge_array().tolist()}) + "\n"
    else:
        text = format_edge_list(sh.graph)
    _emit(text, args.out)
    fields = asdict(st)
    print(" ".join(f"{k}={_fmt(v)}" for k, v in fields.items()), file=sys.stderr)
    return EXIT_OK


def _fmt(v) -> str:
    if isinstance(v, float):
        return f"{v:.6g}"
    return str(v).lower() if isinstance(v, bool) else str(v)


def cmd_bench_heuristics(args) -> int:
    rows = []
    for z in args.z_list:
        c = bench.compare_heuristics(args.alpha, z, args.n, seed=args.seed,
                                     sequences=args.sequences, gamma=args.gamma,
                                     threads=args.threads)
        rows.append(c.row())
        _progress(args, f"alpha={args.alpha} z={z} theta_gkan={c.theta_gkan:.4g} "
                        f"theta_new={c.theta_new:.4g} theta_max={c.theta_max:.4g}")
    _table(args, bench.COMPARISON_COLUMNS, rows, experiment="speed-up factors",
           alpha=args.alpha, n=args.n, sequences=args.sequences, gamma=args.gamma)
    return EXIT_OK


def cmd_bench_pk(args) -> int:
    if args.degrees is not None:
        source = read_degrees(args.degrees)
        if not erdos_gallai(source):
            raise Unrealizable("unrealizable degree sequence")
        label = {"degrees": args.degrees}
    else:
        source = power_law(args.alpha, args.z, args.n)
        label = {"alpha": args.alpha, "z": args.z, "n": args.n}
    curve, g = bench.measure_pk(source, args.widths, args.samples, seed=args.seed,
                                gamma=args.gamma)
    rows = [[pt.K, pt.p, pt.samples, pt.events, pt.std_error] for pt in curve.points]
    _table(args, ["K", "p", "samples", "events", "std_error"], rows,
           experiment="p(K)", **label, m=g.m, samples=args.samples,
           decay=curve.decay, min_events=curve.min_events)
    return EXIT_OK


def cmd_bench_timing(args) -> int:
    limits = dict(bench.DEFAULT_MAX_M)
    if args.no_limits:
        limits = {}
    rows = bench.timing_scan(args.m_list, args.alpha, args.z, seed=args.seed,
                             variants=args.variants, max_m=limits, gamma=args.gamma,
                             repeats=args.repeats)
    table = [[r.m_target, r.n, r.m, r.variant, r.wall_time, r.valid_swaps, r.theta]
             for r in rows]
    _table(args, bench.TIMING_COLUMNS, table, experiment="timing", alpha=args.alpha,
           z=args.z, gamma=args.gamma, repeats=args.repeats)
    return EXIT_OK


def cmd_bench_uniformity(args) -> int:
    names = args.heuristics or list(HEURISTICS)
    degrees = np.asarray(args.sequence, dtype=np.int64)
    if (degrees < 0).any():
        raise BadInput("degrees must be non-negative")

    def one(name):
        return bench.uniformity_suite(degrees, args.runs, args.spacing, HEURISTICS[name],
                                      seed=args.seed, burn_in=args.burn_in,
                                      jitter=args.jitter)

    reports = bench.pmap(one, names, args.threads)
    _table(args, bench.UNIFORMITY_COLUMNS, [bench.uniformity_row(r) for r in reports],
           experiment="uniformity", runs=args.runs)
    return EXIT_OK


def cmd_bias_study(args) -> int:
    rng = np.random.default_rng(args.seed)
    rows = bias_grid(args.alpha, args.n, args.z_list, args.trials, rng)
    _table(args, BIAS_COLUMNS, rows, experiment="configuration-model bias",
           alpha=args.alpha, n=args.n, trials=args.trials,
           z_c="multigraph degrees with loops counted twice")
    return EXIT_OK


def _progress(args, msg: str) -> None:
    if not args.quiet:
        print(msg, file=sys.stderr, flush=True)


# parser

def _int(s: str) -> int:
    """Integer that may be written as 1e5."""
    try:
        return int(s)
    except ValueError:
        f = float(s)
        if not f.is_integer():
            raise argparse.ArgumentTypeError(f"{s!r} is not an integer") from None
        return int(f)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=_int, default=0, help="64-bit RNG seed (default 0)")
    common.add_argument("--out", help="output file (default: standard output)")
    common.add_argument("--quiet", action="store_true", help="no progress lines on stderr")

    table = argparse.ArgumentParser(add_help=False)
    table.add_argument("--format", choices=("csv", "json"), default="csv")
    table.add_argument("--threads", type=_int, default=1,
                       help="worker threads for independent repetitions")

    p = argparse.ArgumentParser(
        prog="swapchain",
        description="Uniform random connected simple graphs with prescribed degrees.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", parents=[common], help="generate one graph")
    g.add_argument("--degrees", help="degree file, one integer per line")
    g.add_argument("--alpha", type=float, help="power-law exponent (with --z and --n)")
    g.add_argument("--z", type=float, help="target mean degree")
    g.add_argument("--n", type=_int, help="number of vertices")
    g.add_argument("--heuristic", choices=sorted(HEURISTICS), default="final")
    g.add_argument("--gamma", type=float, default=10.0, help="valid swaps per edge")
    g.add_argument("--format", choices=("edgelist", "json"), default="edgelist")
    g.set_defaults(func=cmd_generate)

    h = sub.add_parser("bench-heuristics", parents=[common, table],
                       help="speed-up factors of the window heuristics")
    h.add_argument("--alpha", type=float, default=2.5, help="power-law exponent")
    h.add_argument("--z-list", type=float, nargs="+", default=[2.1, 3.0, 6.0])
    h.add_argument("--n", type=_int, default=10**4)
    h.add_argument("--sequences", type=_int, default=10)
    h.add_argument("--gamma", type=float, default=10.0)
    h.set_defaults(func=cmd_bench_heuristics)

    k = sub.add_parser("bench-pk", parents=[common, table],
                       help="disconnection probability against isolation width")
    k.add_argument("--degrees", help="degree file instead of the power law")
    k.add_argument("--alpha", type=float, default=2.1, help="power-law exponent")
    k.add_argument("--z", type=float, default=2.05)
    k.add_argument("--n", type=_int, default=10**4)
    k.add_argument("--widths", type=_int, nargs="+", default=[1, 2, 4, 8, 16])
    k.add_argument("--samples", type=_int, default=10**5, help="applied swaps per width")
    k.add_argument("--gamma", type=float, default=10.0)
    k.set_defaults(func=cmd_bench_pk)

    t = sub.add_parser("bench-timing", parents=[common, table],
                       help="shuffle wall time against graph size")
    t.add_argument("--m-list", type=_int, nargs="+", default=[10**3, 10**4, 10**5])
    t.add_argument("--alpha", type=float, default=2.5, help="power-law exponent")
    t.add_argument("--z", type=float, default=6.7)
    t.add_argument("--variants", nargs="+", choices=bench.VARIANTS, default=list(bench.VARIANTS))
    t.add_argument("--repeats", type=_int, default=1)
    t.add_argument("--gamma", type=float, default=10.0)
    t.add_argument("--no-limits", action="store_true",
                   help="also run slow variants on large sizes")
    t.set_defaults(func=cmd_bench_timing)

    u = sub.add_parser("bench-uniformity", parents=[common, table],
                       help="chi-square test against exhaustive enumeration")
    u.add_argument("--sequence", type=_int, nargs="+", default=[2, 2, 1, 1])
    u.add_argument("--runs", type=_int, default=10**4)
    u.add_argument("--spacing", type=_int, help="valid swaps between samples (default 3m)")
    u.add_argument("--burn-in", type=_int, help="valid swaps before sampling (default 10m)")
    u.add_argument("--jitter", type=_int, default=0,
                   help="extra uniform 0..J swaps per gap; breaks period-2 alternation")
    u.add_argument("--heuristics", nargs="+", choices=sorted(HEURISTICS))
    u.set_defaults(func=cmd_bench_uniformity)

    b = sub.add_parser("bias-study", parents=[common, table],
                       help="size loss of the configuration model after cleaning")
    b.add_argument("--alpha", type=float, default=2.1, help="power-law exponent")
    b.add_argument("--n", type=_int, default=10**4)
    b.add_argument("--z-list", type=float, nargs="+", default=[1.5, 2.0, 3.0, 4.0, 6.0])
    b.add_argument("--trials", type=_int, default=10)
    b.set_defaults(func=cmd_bias_study)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits with 2, which we reserve for unrealizable input
        return EXIT_OK if exc.code == 0 else EXIT_BAD_INPUT
    try:
        return args.func(args)
    except (Unrealizable, OddSum):
        print("error: unrealizable degree sequence", file=sys.stderr)
        return EXIT_UNREALIZABLE
    except NotConnectable as exc:
        print(f"error: not connectable: {exc}", file=sys.stderr)
        return EXIT_NOT_CONNECTABLE
    except (FormatError, BadInput, UsageError, UnreachableMean, SamplingFailed) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except SwapChainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL
    except Exception as exc:  # noqa: BLE001 - last line of defence for the exit code contract
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
