"""Command line entry point: ``layersketch {gen-zipf,run,plot,truth}``."""
from __future__ import annotations

import argparse
import sys

from .runner import ALGORITHMS, AlgoSpec, ExperimentPlan, run_experiment, run_longitudinal, summarize
from .streams import StreamFormat, ZipfSpec, gen_zipf, ingest, write_stream


def _oracle_arg(text: str) -> str:
    kind, _, arg = text.partition(":")
    if kind == "perfect" and not arg:
        return text
    if kind == "noisy":
        p = float(arg)
        if not 0 <= p <= 1:
            raise argparse.ArgumentTypeError("noisy flip probability must be in [0, 1]")
        return text
    if kind == "lookup" and arg:
        return text
    raise argparse.ArgumentTypeError("expected perfect, noisy:<p> or lookup:<file>")


def _zipf_from(args, seed) -> ZipfSpec:
    scale = args.scale if args.scale is not None else args.n
    return ZipfSpec(args.n, scale, args.exponent, args.order == "shuffled", seed)


def cmd_gen_zipf(args) -> int:
    stream, gt = gen_zipf(_zipf_from(args, args.seed))
    write_stream(stream, args.out)
    if args.truth:
        gt.write_csv(args.truth)
    print(f"wrote {len(stream)} updates over {gt.distinct} items to {args.out}", file=sys.stderr)
    return 0


def cmd_truth(args) -> int:
    _, gt = ingest(args.input, args.format)
    gt.write_csv(args.out)
    return 0


def cmd_run(args) -> int:
    cthrs = args.cthr or [1.0]
    algos = []
    for name in args.algo:
        tunable = name in ("layered", "learned-layered", "parsimonious", "practical")
        for c in (cthrs if tunable else cthrs[:1]):
            label = None
            if tunable and len(cthrs) > 1:
                label = f"{name}-c{c:g}" + ("-nonneg" if args.nonneg else "")
            algos.append(AlgoSpec(name, rows=args.rows, c_thr=c, oracle=args.oracle, hh=args.hh,
                                  gamma=args.gamma, anytime=args.anytime, nonneg=args.nonneg,
                                  worst_case=args.worst_case_threshold, label=label))
    if args.input:
        dataset = args.input[0]
    else:
        dataset = _zipf_from(args, args.seed)
    plan = ExperimentPlan(algos, args.space, dataset, args.format, args.trials, args.seed,
                          args.timing)
    if args.input and len(args.input) > 1:
        reports, _ = run_longitudinal(plan, args.input, args.out)
    else:
        reports = run_experiment(plan, args.out)
    for r in reports:
        if r.error:
            print(f"warning: {r.algorithm} space={r.space} trial={r.trial}: {r.error}",
                  file=sys.stderr)
    if not args.quiet:
        for (algo, space), (mean, std) in summarize(reports).items():
            print(f"{algo:>28s}  space={space:<7d} weighted={mean:.6g} +- {std:.3g}")
    return 0


def cmd_plot(args) -> int:
    from .plotting import emit_plot
    emit_plot(args.csv, args.kind, args.out, args.metric, args.space)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="layersketch", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    def zipf_opts(sp, required):
        sp.add_argument("--n", type=int, required=required, default=None,
                        help="domain size of the synthetic Zipf stream")
        sp.add_argument("--scale", type=float, default=None, help="rank-1 frequency (default n)")
        sp.add_argument("--exponent", type=float, default=1.0)
        sp.add_argument("--order", choices=["sorted", "shuffled"], default="shuffled")

    g = sub.add_parser("gen-zipf", help="write a synthetic Zipf stream in pairs format")
    zipf_opts(g, True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True)
    g.add_argument("--truth", help="also write ground truth CSV here")
    g.set_defaults(func=cmd_gen_zipf)

    t = sub.add_parser("truth", help="exact item counts of a stream file as CSV")
    t.add_argument("--input", required=True)
    t.add_argument("--format", choices=[f.value for f in StreamFormat], default="pairs")
    t.add_argument("--out", required=True)
    t.set_defaults(func=cmd_truth)

    r = sub.add_parser("run", help="run an error experiment and write CSV")
    src = r.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", action="append",
                     help="stream file; repeat for a longitudinal run")
    src.add_argument("--n", type=int, help="use a synthetic Zipf stream over n items")
    r.add_argument("--scale", type=float, default=None)
    r.add_argument("--exponent", type=float, default=1.0)
    r.add_argument("--order", choices=["sorted", "shuffled"], default="shuffled")
    r.add_argument("--format", choices=[f.value for f in StreamFormat], default="pairs")
    r.add_argument("--algo", action="append", required=True, choices=ALGORITHMS)
    r.add_argument("--space", action="append", type=int, required=True)
    r.add_argument("--rows", type=int, default=3)
    r.add_argument("--trials", type=int, default=10)
    r.add_argument("--oracle", type=_oracle_arg, default="perfect")
    r.add_argument("--hh", type=int, default=None, help="heavy hitters (default space/2)")
    r.add_argument("--cthr", type=float, action="append",
                   help="threshold constant; repeat to sweep")
    r.add_argument("--gamma", type=float, default=1.0)
    r.add_argument("--anytime", action="store_true",
                   help="parsimonious sampling without knowing the stream length")
    r.add_argument("--nonneg", action="store_true")
    r.add_argument("--worst-case-threshold", action="store_true")
    r.add_argument("--timing", action="store_true", help="record wall time (breaks byte-determinism)")
    r.add_argument("--seed", type=int, default=0)
    r.add_argument("--out", required=True)
    r.add_argument("--quiet", action="store_true")
    r.set_defaults(func=cmd_run)

    pl = sub.add_parser("plot", help="render an experiment CSV to SVG")
    pl.add_argument("--csv", required=True)
    pl.add_argument("--kind", choices=["space", "longitudinal"], default="space")
    pl.add_argument("--metric", choices=["weighted_error", "unweighted_error"],
                    default="weighted_error")
    pl.add_argument("--space", type=int, default=None)
    pl.add_argument("--out", required=True)
    pl.set_defaults(func=cmd_plot)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
