"""Command-line entry point ``collearn``.

Exit codes: 0 success, 2 bad input or config, 3 resource cap exceeded,
4 invariant violation. Default caps can be overridden with the
COLLEARN_VC_CAP and COLLEARN_TAU_CAP environment variables.
"""
from __future__ import annotations

import argparse
import sys

from . import __version__
from .errors import CollearnError, InputError, InvariantViolation, ResourceError

EXIT_OK, EXIT_INPUT, EXIT_RESOURCE, EXIT_INVARIANT = 0, 2, 3, 4


def _int_list(text):
    try:
        return tuple(int(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text):
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def cmd_run(args):
    from .config import load_config
    from .experiments import run_experiment

    cfg = load_config(args.config)
    path = run_experiment(cfg, args.output)
    print(f"wrote {path}")
    return EXIT_OK


def cmd_verify(args):
    from .invariants import CHECKS, run_all

    unknown = [n for n in args.only or () if n not in CHECKS]
    if unknown:
        raise InputError(f"unknown check(s) {unknown}; choose from {', '.join(CHECKS)}")
    results = run_all(quick=args.quick, names=args.only)
    failed = [r.name for r in results if not r.passed]
    if failed:
        raise InvariantViolation(f"{len(failed)} check(s) failed: {', '.join(failed)}")
    print(f"all {len(results)} checks passed")
    return EXIT_OK


def cmd_tau(args):
    from .concepts import read_class_file
    from .growth import Collection, equivalence_partition, tau_of_m, write_partition_csv

    members = [read_class_file(p, name=f"{i}:{p}") for i, p in enumerate(args.class_files)]
    col = Collection(members, name="cli")
    if args.m is not None:
        est = tau_of_m(col, args.m, mode=args.mode, trials=args.trials, rng=args.seed, cap=args.cap)
        print(f"tau({args.m}) = {est.value}  [{est.mode}, witness {list(est.witness)}, {est.evaluated} sets]")
        return EXIT_OK
    if args.points is None:
        raise InputError("give --points (a point set) or --m (a set size)")
    ids = equivalence_partition(col, args.points, cap=args.cap, mode=args.equivalence)
    print(f"tau(U) = {len(set(ids))} over {len(members)} classes")
    if args.partition_out:
        write_partition_csv(col, args.points, args.partition_out, cap=args.cap, mode=args.equivalence)
    else:
        for c, cid in zip(col, ids):
            print(f"{c.name},{cid}")
    return EXIT_OK


def cmd_oig_demo(args):
    from .concepts import LabeledSample, read_class_file
    from .experiments import thresholds
    from .oig import oig_predict, oriented_graph

    cls = read_class_file(args.class_file) if args.class_file else thresholds(args.n)
    pts = args.points or tuple(range(cls.domain_size))
    g = oriented_graph(cls, pts)
    print(f"class {cls.name}: {g.n_nodes} behaviours on {list(g.support)}, {g.n_edges} edges, "
          f"max out-degree {g.max_out_degree()}")
    print("# nodeA nodeB coordinate direction")
    print(g.to_text(), end="")
    if args.sample:
        pairs = [tuple(int(v) for v in item.split(":")) for item in args.sample.split(",")]
        S = LabeledSample.from_pairs(pairs)
        for x in pts:
            print(f"predict({x}) = {oig_predict(cls, S, x)}")
    return EXIT_OK


def cmd_srm_showdown(args):
    from .config import build_config
    from .experiments import run_experiment

    cfg = build_config(dict(
        experiment="srm-showdown", m=tuple(args.m), seeds=args.seeds, seed=args.seed, delta=args.delta,
        weight_rule=args.weight_rule, c_prime=args.c_prime, support=args.support, tau_mode=args.tau_mode,
        output=args.output,
    ), source="command line")
    path = run_experiment(cfg)
    print(f"wrote {path}")
    return EXIT_OK


def cmd_bounds(args):
    from .experiments import emit_bound_curves, write_csv

    if any(m < 2 for m in args.m_grid):
        raise InputError("every m in the grid must be at least 2")
    cols, rows = emit_bound_curves(args.m_grid, args.vc, args.tau, args.delta, args.C, args.k)
    for r in rows:
        r["seed"] = 0
    if args.output:
        write_csv(args.output, cols, rows)
        print(f"wrote {args.output}")
    else:
        print(",".join(cols))
        for r in rows:
            print(",".join(repr(r[c]) if isinstance(r[c], float) else str(r[c]) for c in cols))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="collearn", description="Learning from collections of partial concept classes.")
    p.add_argument("--version", action="version", version=f"collearn {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("run", help="run an experiment config, writing CSV and .meta")
    s.add_argument("config")
    s.add_argument("--output", help="override the config's output path")
    s.set_defaults(fn=cmd_run)

    s = sub.add_parser("verify-invariants", help="run the property suite; exit 4 on any failure")
    s.add_argument("--quick", action="store_true", help="fewer instances per check")
    s.add_argument("--only", nargs="+", metavar="CHECK")
    s.set_defaults(fn=cmd_verify)

    s = sub.add_parser("tau", help="growth parameter of a collection of class files")
    s.add_argument("class_files", nargs="+")
    s.add_argument("--points", type=_int_list, help="comma-separated point set U")
    s.add_argument("--m", type=int, help="maximise over all (or sampled) sets of this size")
    s.add_argument("--mode", choices=("exact", "sampled"), default="exact")
    s.add_argument("--equivalence", choices=("exact", "upper"), default="exact")
    s.add_argument("--trials", type=int, default=200)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--cap", type=int)
    s.add_argument("--partition-out", help="write member_name,class_id CSV here")
    s.set_defaults(fn=cmd_tau)

    s = sub.add_parser("oig-demo", help="print an oriented one-inclusion graph and its predictions")
    s.add_argument("--class-file", help="class file (default: thresholds)")
    s.add_argument("--n", type=int, default=4, help="domain size of the default thresholds class")
    s.add_argument("--points", type=_int_list)
    s.add_argument("--sample", help="training pairs point:label, comma separated")
    s.set_defaults(fn=cmd_oig_demo)

    s = sub.add_parser("srm-showdown", help="SRM against the collection learner on the block-cube instance")
    s.add_argument("--m", type=_int_list, default=(256,))
    s.add_argument("--seeds", type=int, default=20)
    s.add_argument("--seed", type=int, default=0, help="first seed")
    s.add_argument("--delta", type=float, default=0.1)
    s.add_argument("--weight-rule", default="power2")
    s.add_argument("--c-prime", type=float, default=1.0)
    s.add_argument("--support", choices=("literal", "pair"), default="literal")
    s.add_argument("--tau-mode", choices=("sample", "upper", "analytic"), default="sample")
    s.add_argument("--output", default="srm-showdown.csv")
    s.set_defaults(fn=cmd_srm_showdown)

    s = sub.add_parser("bounds", help="plug-in generalisation bound curves as CSV")
    s.add_argument("--m-grid", type=_int_list, default=(8, 16, 32, 64, 128, 256, 512, 1024))
    s.add_argument("--vc", type=int, default=0)
    s.add_argument("--tau", type=int, default=1)
    s.add_argument("--delta", type=float, default=0.1)
    s.add_argument("--C", type=float, default=1.0)
    s.add_argument("--k", type=_int_list, default=())
    s.add_argument("--output")
    s.set_defaults(fn=cmd_bounds)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except InvariantViolation as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except ResourceError as exc:
        print(f"resource cap: {exc}", file=sys.stderr)
        return EXIT_RESOURCE
    except (InputError, CollearnError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
