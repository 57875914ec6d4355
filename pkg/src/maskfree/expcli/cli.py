"""Command line entry point ``maskfree``.

Exit codes: 0 every comparison passed, 2 invalid config or arguments,
3 some comparison failed, 4 a size or work budget was exceeded.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys

from ..combinat import K_MAX, PairPartition, enumerate_nc2, enumerate_pair_partitions, gamma_pi_orbit_count, \
    is_noncrossing
from ..errors import ConfigurationError, DomainError, SizeLimitError
from ..freelimits import MPLaw, Word, covariance_mixed_moment, free_family_mixed_moment, mp_moment_closed, \
    parse_word
from ..masks import density, epsilon_sets, make_mask, mask_partition_weight
from ..moments import THREADS_ENV
from .config import ExperimentConfig, load_config
from .runner import dump_first_matrix, format_cell, run, to_csv

EXIT_OK, EXIT_CONFIG, EXIT_FAIL, EXIT_BUDGET = 0, 2, 3, 4

SUBCOMMAND_SCENARIOS = {
    "simulate-moment": ("moment-sweep", "covariance-sweep"),
    "esd": ("esd",),
    "freeness": ("freeness",),
}


def _global_options() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="master seed (overrides the config)")
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS,
                        help=f"worker threads for trials (default ${THREADS_ENV} or 1)")
    common.add_argument("--format", choices=("csv", "json"), default=argparse.SUPPRESS, help="stdout format")
    common.add_argument("--out", default=argparse.SUPPRESS, help="write report.csv and report.json here")
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS,
                        help="log progress to stderr")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _global_options()
    parser = argparse.ArgumentParser(prog="maskfree", parents=[common],
                                     description="Masked random matrices: free limits and Monte Carlo checks.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    p = sub.add_parser("partitions", parents=[common], help="list pair partitions of [2k]")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--noncrossing", action="store_true", help="only non-crossing pairings")
    p.add_argument("--stats", action="store_true", help="add non-crossing flag and gamma-pi cycle count")

    p = sub.add_parser("limit-moments", parents=[common], help="exact limiting moments")
    p.add_argument("--kind", choices=("circular", "elliptic", "mp"), required=True)
    p.add_argument("--k", type=int, help="moment order (word x^k when --word is absent)")
    p.add_argument("--rho", type=float, default=0.0, help="mirror correlation, shared by all labels")
    p.add_argument("--y", type=float, help="aspect ratio p/n for mp")
    p.add_argument("--word", help='word such as "1,2,1*,2*" (mp: labels "1,2")')

    p = sub.add_parser("mask-report", parents=[common], help="density diagnostics and partition weights")
    p.add_argument("--gen", required=True, help="mask generator name")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--p", type=int, help="rows (default n)")
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE", help="generator parameter")
    p.add_argument("--eps", type=float, default=0.1)
    p.add_argument("--weight", action="store_true", help="also compute the partition weight of --pi")
    p.add_argument("--pi", help='pairing such as "(1,2)(3,4)"')

    for name, what in (("simulate-moment", "moment or covariance sweep"), ("esd", "eigenvalue distribution"),
                       ("freeness", "mixed-moment freeness battery")):
        p = sub.add_parser(name, parents=[common], help=f"run a {what} from a JSON config")
        p.add_argument("--config", required=True)
        if name == "simulate-moment":
            p.add_argument("--dump-matrix", metavar="PATH", help="write trial 0 of the first case as CSV")

    p = sub.add_parser("verify", parents=[common], help="run the acceptance battery")
    p.add_argument("--criteria", help="comma separated subset, e.g. 1,2,10")
    return parser


def _opt(args, name, default=None):
    return getattr(args, name, default)


def _emit(columns, rows, fmt) -> None:
    if fmt == "json":
        sys.stdout.write(json.dumps([{c: r.get(c) for c in columns} for r in rows], indent=2) + "\n")
    else:
        sys.stdout.write(to_csv(columns, rows))


def _partitions(args) -> int:
    if not 1 <= args.k <= K_MAX:
        raise SizeLimitError(f"k must lie in 1..{K_MAX}, got {args.k}")
    pis = enumerate_nc2(args.k) if args.noncrossing else enumerate_pair_partitions(args.k)
    fmt = _opt(args, "format")
    if fmt is None:
        for pi in pis:
            extra = f" {str(is_noncrossing(pi)).lower()} {gamma_pi_orbit_count(pi)}" if args.stats else ""
            sys.stdout.write(f"{pi}{extra}\n")
        return EXIT_OK
    columns = ["partition"] + (["noncrossing", "gamma_pi_cycles"] if args.stats or fmt == "csv" else [])
    rows = [{"partition": str(pi), "noncrossing": is_noncrossing(pi), "gamma_pi_cycles": gamma_pi_orbit_count(pi)}
            for pi in pis]
    _emit(columns, rows, fmt)
    return EXIT_OK


def _limit_moments(args) -> int:
    if args.kind == "mp":
        if args.y is None or args.y <= 0:
            raise ConfigurationError("--y > 0 is required for mp")
        law = MPLaw(args.y)
        if args.word:
            try:
                labels = [int(t) for t in args.word.split(",")]
            except ValueError:
                raise ConfigurationError(f"mp words are comma separated labels, got {args.word!r}") from None
            value = covariance_mixed_moment(labels, law.y)
            word = args.word
        else:
            if args.k is None:
                raise ConfigurationError("give --k or --word")
            value = mp_moment_closed(args.k, law.y)
            word = f"Xbar^{args.k}"
    else:
        if args.kind == "circular" and args.rho != 0:
            raise ConfigurationError("circular means rho = 0; use --kind elliptic")
        if args.word:
            w = parse_word(args.word)
        elif args.k is not None:
            if args.k < 1:
                raise ConfigurationError("--k must be positive")
            w = Word(((1, False),) * args.k)
        else:
            raise ConfigurationError("give --k or --word")
        value = free_family_mixed_moment(w, {lab: args.rho for lab in set(w.labels)})
        word = str(w)
    fmt = _opt(args, "format")
    if fmt is None:
        sys.stdout.write(f"{format_cell(float(value))}\n")
    else:
        _emit(["kind", "word", "rho", "y", "value"],
              [{"kind": args.kind, "word": word, "rho": args.rho if args.kind != "mp" else None,
                "y": args.y if args.kind == "mp" else None, "value": float(value)}], fmt)
    return EXIT_OK


def _parse_param(text: str):
    key, sep, raw = text.partition("=")
    if not sep or not key:
        raise ConfigurationError(f"--param expects KEY=VALUE, got {text!r}")
    for cast in (int, float):
        try:
            return key, cast(raw)
        except ValueError:
            pass
    return key, raw


def _mask_report(args) -> int:
    params = dict(_parse_param(t) for t in args.param)
    p = args.n if args.p is None else args.p
    D = make_mask(args.gen, p, args.n, **params)
    rep = epsilon_sets(D, args.eps)
    row = {"generator": D.label(), "n": D.n, "p": D.p, "density": density(D), "row_set": rep.row_set_size,
           "col_set": rep.col_set_size}
    columns = ["generator", "n", "p", "density", "row_set", "col_set"]
    if args.weight:
        if not args.pi:
            raise ConfigurationError("--weight needs --pi")
        row["weight"] = mask_partition_weight(D, PairPartition.parse(args.pi))
        columns.append("weight")
    _emit(columns, [row], _opt(args, "format", "csv"))
    return EXIT_OK


def _finish(report, args) -> int:
    out = _opt(args, "out")
    if out:
        for path in report.write(out):
            logging.getLogger("maskfree").info("wrote %s", path)
    sys.stdout.write(report.to_json() if _opt(args, "format") == "json" else report.to_csv())
    return EXIT_OK if report.passed else EXIT_FAIL


def _config_run(args) -> int:
    cfg = load_config(args.config)
    allowed = SUBCOMMAND_SCENARIOS[args.command]
    if cfg.scenario not in allowed:
        raise ConfigurationError(f"{args.command} runs scenarios {', '.join(allowed)}, config has {cfg.scenario}")
    if _opt(args, "seed") is not None:
        cfg = cfg.with_seed(args.seed)
    if _opt(args, "dump_matrix"):
        dump_first_matrix(cfg, args.dump_matrix)
    return _finish(run(cfg, _opt(args, "threads")), args)


def _verify(args) -> int:
    criteria = None
    if args.criteria:
        try:
            criteria = tuple(int(c) for c in args.criteria.split(","))
        except ValueError:
            raise ConfigurationError(f"--criteria expects numbers like 1,2,10, got {args.criteria!r}") from None
        if any(not 1 <= c <= 10 for c in criteria):
            raise ConfigurationError("criteria are numbered 1..10")
    return _finish(run(ExperimentConfig("verify", criteria=criteria), _opt(args, "threads")), args)


COMMANDS = {
    "partitions": _partitions,
    "limit-moments": _limit_moments,
    "mask-report": _mask_report,
    "simulate-moment": _config_run,
    "esd": _config_run,
    "freeness": _config_run,
    "verify": _verify,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    logging.basicConfig(level=logging.INFO if _opt(args, "verbose") else logging.WARNING,
                        format="%(name)s: %(message)s", stream=sys.stderr)
    threads = _opt(args, "threads")
    if threads is not None and threads < 1:
        print("maskfree: error: --threads must be positive", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return COMMANDS[args.command](args)
    except SizeLimitError as exc:
        print(f"maskfree: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (ConfigurationError, DomainError) as exc:
        print(f"maskfree: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
