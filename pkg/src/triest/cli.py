"""Command-line experiment runner.

Subcommands: run, eval, mc, matched, oracle, theory, transform. Exit codes:
0 success, 1 usage error, 2 invalid stream.
"""

from __future__ import annotations

import argparse
import hashlib
import inspect
import json
import math
import sys

import numpy as np

from . import __version__, harness, metrics, theory
from .oracle import OracleError, pair_stats, z_stat
from .stream import (
    StreamError,
    apply_mass_deletion,
    apply_sliding_window,
    gen_insertion_stream,
    read_stream,
    reorder,
    validate_stream,
    write_stream,
)

EXIT_OK, EXIT_USAGE, EXIT_STREAM = 0, 1, 2

VERSION = f"triest {__version__}"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


# --------------------------------------------------------------------------
# shared option groups


def _add_input(p):
    g = p.add_argument_group("input")
    g.add_argument("input", nargs="?", help="stream file (SIGN U V [LABEL] [TS] per line; .gz accepted; '-' for stdin)")
    g.add_argument("--gen", help="synthetic stream instead of a file: clique:N or er:N:P[:SEED]")
    g.add_argument("--mode", choices=("graph", "multigraph"), default=None)
    g.add_argument("--policy", choices=("strict", "skip-invalid"), default="strict")
    t = p.add_argument_group("transforms (applied in this order)")
    t.add_argument("--order", choices=("natural", "uar", "bfs"), default="natural")
    t.add_argument("--order-seed", type=int, default=0)
    t.add_argument("--window", type=int, help="sliding-window size (edges, or time units with --window-by time)")
    t.add_argument("--window-by", choices=("count", "time"), default="count")
    t.add_argument("--mass-q", type=float, help="per-insertion probability of a mass-deletion event")
    t.add_argument("--mass-d", type=float, help="per-edge deletion probability inside a mass-deletion event")
    t.add_argument("--transform-seed", type=int, default=0)


def _add_algo(p, need_algo=True):
    p.add_argument("--algo", choices=harness.ALL_ALGOS, required=need_algo, default=None if need_algo else "base")
    p.add_argument("--memory", "-M", type=int, help="sample size M (TRIEST variants)")
    p.add_argument("--prob", "-p", type=float, help="sampling probability p (MASCOT variants)")
    p.add_argument("--seed", type=int, default=0)


def _add_output(p, formats=("csv", "json")):
    p.add_argument("--format", choices=formats, default=formats[0])
    p.add_argument("--out", "-o", default="-", help="output path ('-' for stdout)")


def _algo_mode(algo):
    return "multigraph" if algo and algo.endswith("-m") else "graph"


def load_stream(args, mode=None):
    mode = args.mode or mode or "graph"
    if args.gen and args.input:
        raise UsageError("give either an input file or --gen, not both")
    if args.gen:
        parts = args.gen.split(":")
        try:
            if parts[0] == "clique" and len(parts) == 2:
                stream = gen_insertion_stream("clique", int(parts[1]))
            elif parts[0] in ("er", "erdos_renyi") and len(parts) in (3, 4):
                seed = int(parts[3]) if len(parts) == 4 else 0
                stream = gen_insertion_stream("erdos_renyi", int(parts[1]), float(parts[2]), seed)
            else:
                raise UsageError(f"bad --gen spec {args.gen!r}")
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        if mode == "multigraph":
            stream.mode = "multigraph"
            stream.label = np.zeros(len(stream), dtype=np.int64)
    elif args.input:
        stream = read_stream(args.input, mode=mode, policy=args.policy)
    else:
        raise UsageError("no input: pass a stream file or --gen")
    rep = validate_stream(stream, args.policy)
    if not rep.ok and args.policy == "strict":
        raise StreamError(f"stream violation at event {rep.first_violation}: {rep.reason}")
    stream = rep.stream
    if args.order != "natural":
        stream = reorder(stream, args.order, args.order_seed)
    if args.window is not None:
        stream = apply_sliding_window(stream, args.window, by=args.window_by)
    if args.mass_q is not None or args.mass_d is not None:
        if args.mass_q is None or args.mass_d is None:
            raise UsageError("--mass-q and --mass-d go together")
        if args.window is not None:
            raise UsageError("choose one deletion model")
        stream = apply_mass_deletion(stream, args.mass_q, args.mass_d, args.transform_seed)
    return stream


def _spec(args):
    try:
        return harness.AlgoSpec(args.algo, M=args.memory, p=args.prob)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _config(args, command):
    # worker count never changes results, so it stays out of the header
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("func", "out", "workers")}
    cfg["command"] = command
    return cfg


def _meta(cfg) -> dict:
    blob = json.dumps(cfg, sort_keys=True, default=str).encode()
    return {
        "config_hash": hashlib.sha256(blob).hexdigest()[:16],
        "seed": cfg.get("seed"),
        "version": VERSION,
        "config": cfg,
    }


def _fmt(x) -> str:
    if isinstance(x, float):
        if math.isnan(x):
            return "nan"
        return repr(x)
    return str(x)


def _open_out(path):
    if path == "-":
        return sys.stdout, False
    return open(path, "w", encoding="utf-8", newline="\n"), True


def _emit_csv(fh, meta, header, rows):
    fh.write(f"# config_hash={meta['config_hash']} seed={meta['seed']} version={meta['version']}\n")
    fh.write(f"# config={json.dumps(meta['config'], sort_keys=True, default=str)}\n")
    fh.write(",".join(header) + "\n")
    for row in rows:
        fh.write(",".join(_fmt(x) for x in row) + "\n")


def _emit_json(fh, payload):
    def clean(o):
        if isinstance(o, float) and math.isnan(o):
            return None
        if isinstance(o, dict):
            return {str(k): clean(v) for k, v in o.items()}
        if isinstance(o, (list, tuple)):
            return [clean(v) for v in o]
        if isinstance(o, np.generic):
            return clean(o.item())
        return o

    json.dump(clean(payload), fh, indent=2, sort_keys=True)
    fh.write("\n")


def _write(args, meta, header, rows, payload):
    fh, close = _open_out(args.out)
    try:
        if args.format == "csv":
            _emit_csv(fh, meta, header, rows)
        else:
            _emit_json(fh, payload)
    finally:
        if close:
            fh.close()


# --------------------------------------------------------------------------
# commands


def _trace_rows(trace):
    for i, t in enumerate(trace.times.tolist()):
        est = float(trace.estimates[i])
        if trace.locals is None:
            yield (t, est)
        else:
            loc = trace.locals[i]
            if not loc:
                yield (t, est, "", "")
            for v in sorted(loc):
                yield (t, est, v, float(loc[v]))


def cmd_run(args):
    spec = _spec(args)
    stream = load_stream(args, _algo_mode(args.algo))
    est = spec.build(args.seed, stream.mode == "multigraph")
    trace = harness.run_trace(est, stream, cadence=args.cadence, with_locals=args.locals, timing=args.timing)
    cfg = _config(args, "run")
    meta = _meta(cfg)
    header = ["t", "estimate_global"] + (["vertex", "estimate_local"] if args.locals else [])
    payload = {
        "meta": meta,
        "trace": [
            {"t": t, "estimate_global": float(e), **({"locals": trace.locals[i]} if args.locals else {})}
            for i, (t, e) in enumerate(zip(trace.times.tolist(), trace.estimates.tolist()))
        ],
    }
    _write(args, meta, header, _trace_rows(trace), payload)
    if args.timing:
        # wall-clock numbers stay out of the (byte-reproducible) output
        print(json.dumps({"update_time": trace.timing_summary()}), file=sys.stderr)
    return EXIT_OK


def read_trace(path):
    """Parse a ``run`` CSV into ``(times, global estimates, locals per time or None)``."""
    times, glob, locs = [], [], []
    has_locals = False
    with open(path, encoding="utf-8") as fh:
        header = None
        for line in fh:
            line = line.rstrip("\n")
            if not line or line.startswith("#"):
                continue
            if header is None:
                header = line.split(",")
                has_locals = "vertex" in header
                continue
            parts = line.split(",")
            t = int(parts[0])
            if not times or times[-1] != t:
                times.append(t)
                glob.append(float(parts[1]))
                locs.append({})
            if has_locals and parts[2] != "":
                locs[-1][int(parts[2])] = float(parts[3])
    return np.array(times, dtype=np.int64), np.array(glob), (locs if has_locals else None)


def _eval_report(times, est, truth, est_locs=None, truth_locs=None):
    rep = {
        "points": int(len(times)),
        "mape": metrics.mape(truth, est),
        "max_ape": metrics.max_ape(truth, est),
    }
    if est_locs is not None and truth_locs is not None:
        pears, epss = [], []
        for a, b in zip(truth_locs, est_locs):
            pv = metrics.local_pearson(a, b)
            ev = metrics.eps_error(a, b)
            if not math.isnan(pv):
                pears.append(pv)
            if not math.isnan(ev):
                epss.append(ev)
        rep["local_pearson"] = float(np.mean(pears)) if pears else metrics.UNDEFINED
        rep["local_eps_error"] = float(np.mean(epss)) if epss else metrics.UNDEFINED
    return rep


def cmd_eval(args):
    if args.estimate:
        if not args.truth:
            raise UsageError("--estimate needs --truth")
        t1, e1, l1 = read_trace(args.estimate)
        t2, e2, l2 = read_trace(args.truth)
        if not np.array_equal(t1, t2):
            raise UsageError("join error: query times of estimate and truth traces differ")
        rep = _eval_report(t1, e1, e2, l1, l2)
    else:
        spec = _spec(args)
        stream = load_stream(args, _algo_mode(args.algo))
        events = list(stream)
        times = harness.query_times(len(events), args.cadence)
        est = spec.build(args.seed, stream.mode == "multigraph")
        tr = harness.run_trace(est, stream, times, with_locals=args.locals, events=events)
        truth = harness.truth_trace(stream, times, with_locals=args.locals, events=events)
        rep = _eval_report(times, tr.estimates, truth.estimates, tr.locals, truth.locals)
    meta = _meta(_config(args, "eval"))
    rep["cadence"] = args.cadence
    header = list(rep)
    _write(args, meta, header, [tuple(rep[k] for k in header)], {"meta": meta, "metrics": rep})
    return EXIT_OK


def cmd_mc(args):
    if args.trials < 2:
        raise UsageError("--trials must be >= 2")
    spec = _spec(args)
    stream = load_stream(args, _algo_mode(args.algo))
    times = harness.query_times(len(stream), args.cadence)
    rep = harness.monte_carlo(spec, stream, args.trials, args.seed, times, args.workers)
    for w in rep.warnings:
        print(f"warning: {w}", file=sys.stderr)
    truth = None
    if args.truth:
        truth = harness.truth_trace(stream, times).estimates
    meta = _meta(_config(args, "mc"))
    header = ["t", "mean", "var", "se", "min", "max"] + (["truth"] if truth is not None else [])
    rows = []
    for i, r in enumerate(rep.rows()):
        row = [r["t"], r["mean"], r["var"], r["se"], r["min"], r["max"]]
        if truth is not None:
            row.append(float(truth[i]))
        rows.append(row)
    payload = {"meta": meta, "trials": rep.trials, "warnings": rep.warnings, "rows": [dict(zip(header, r)) for r in rows]}
    _write(args, meta, header, rows, payload)
    return EXIT_OK


def cmd_matched(args):
    stream = load_stream(args)
    rows = harness.matched_memory(stream, args.prob, args.trials, args.seed, args.cadence)
    summary = harness.matched_summary(rows)
    meta = _meta(_config(args, "matched"))
    header = [
        "trial",
        "M_prime",
        "M_used",
        "mape_mascot_c",
        "mape_mascot_i",
        "mape_triest_base",
        "mape_triest_impr",
    ]
    table = [
        (r.trial, r.M_prime, r.M_used, r.mascot_c, r.mascot_i, r.triest_base, r.triest_impr) for r in rows
    ]
    payload = {"meta": meta, "rows": [dict(zip(header, r)) for r in table], "summary": summary}
    _write(args, meta, header, table, payload)
    return EXIT_OK


def cmd_oracle(args):
    stream = load_stream(args)
    stats = pair_stats(stream)
    if args.z_memory is not None:
        stats.z = z_stat(stream, args.z_memory)
    out = stats.as_dict()
    out["events"] = len(stream)
    fh, close = _open_out(args.out)
    try:
        _emit_json(fh, out)
    finally:
        if close:
            fh.close()
    return EXIT_OK


THEORY_FUNCS = {
    "xi": theory.xi,
    "eta": theory.eta,
    "psi": theory.psi,
    "kappa": theory.kappa,
    "base_variance": theory.base_variance,
    "multi_variance": theory.multi_variance,
    "impr_variance_bound": theory.impr_variance_bound,
    "fd_variance_bound": theory.fd_variance_bound,
    "mascot_c_variance": theory.mascot_c_variance,
    "min_M_base": theory.min_M_base,
    "min_M_impr": theory.min_M_impr,
    "min_M_fd": theory.min_M_fd,
}


def _number(text):
    try:
        return int(text)
    except ValueError:
        return float(text)


def cmd_theory(args):
    func = THEORY_FUNCS[args.name]
    params = {}
    for item in args.params:
        if "=" not in item:
            raise UsageError(f"parameters are NAME=VALUE, got {item!r}")
        k, v = item.split("=", 1)
        try:
            params[k] = _number(v)
        except ValueError:
            raise UsageError(f"bad number for {k}: {v!r}") from None
    try:
        inspect.signature(func).bind(**params)
    except TypeError as exc:
        raise UsageError(f"{args.name}{inspect.signature(func)}: {exc}") from None
    try:
        value = func(**params)
    except theory.DomainError as exc:
        raise UsageError(str(exc)) from None
    if isinstance(value, theory.VarianceBreakdown):
        value = value.as_dict()
    fh, close = _open_out(args.out)
    try:
        _emit_json(fh, {"name": args.name, "params": params, "value": value})
    finally:
        if close:
            fh.close()
    return EXIT_OK


def cmd_transform(args):
    stream = load_stream(args)
    fh, close = _open_out(args.out)
    try:
        write_stream(stream, fh)
    finally:
        if close:
            fh.close()
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="triest", description="Fixed-memory triangle counting on edge streams.")
    parser.add_argument("--version", action="version", version=VERSION)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="stream events through one estimator and emit its trace")
    _add_input(p)
    _add_algo(p)
    p.add_argument("--cadence", "-K", type=int, default=1)
    p.add_argument("--locals", action="store_true", help="also emit local estimates")
    p.add_argument("--timing", action="store_true", help="report per-update time on stderr")
    _add_output(p)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("eval", help="error metrics of a trace against the exact counts")
    _add_input(p)
    p.add_argument("--algo", choices=harness.ALL_ALGOS, default=None)
    p.add_argument("--memory", "-M", type=int)
    p.add_argument("--prob", "-p", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--estimate", help="trace CSV produced by 'run'")
    p.add_argument("--truth", help="trace CSV of the exact counts ('run --algo exact')")
    p.add_argument("--cadence", "-K", type=int, default=1000)
    p.add_argument("--locals", action="store_true")
    _add_output(p, ("json", "csv"))
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("mc", help="Monte-Carlo moments over independent seeded trials")
    _add_input(p)
    _add_algo(p)
    p.add_argument("--trials", "-R", type=int, default=100)
    p.add_argument("--workers", type=int, default=None, help="worker processes (default: $TRIEST_WORKERS or 1)")
    p.add_argument("--cadence", "-K", type=int, default=1)
    p.add_argument("--truth", action="store_true", help="add the exact count column")
    _add_output(p)
    p.set_defaults(func=cmd_mc)

    p = sub.add_parser("matched", help="MASCOT with probability p vs TRIEST with the memory MASCOT used")
    _add_input(p)
    p.add_argument("--prob", "-p", type=float, required=True)
    p.add_argument("--trials", "-R", type=int, default=10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cadence", "-K", type=int, default=1)
    _add_output(p)
    p.set_defaults(func=cmd_matched)

    p = sub.add_parser("oracle", help="exact triangle statistics of the final graph as JSON")
    _add_input(p)
    p.add_argument("--z-memory", type=int, help="also compute the order-dependent pair count for this M")
    p.add_argument("--out", "-o", default="-")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("theory", help="evaluate a closed form, e.g. 'triest theory xi a=3 b=10 M=6'")
    p.add_argument("name", choices=sorted(THEORY_FUNCS))
    p.add_argument("params", nargs="*", help="NAME=VALUE arguments")
    p.add_argument("--out", "-o", default="-")
    p.set_defaults(func=cmd_theory)

    p = sub.add_parser("transform", help="apply ordering / deletion models and write the stream")
    _add_input(p)
    p.add_argument("--out", "-o", default="-")
    p.set_defaults(func=cmd_transform)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"triest {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (StreamError, OracleError) as exc:
        print(f"triest {args.command}: {exc}", file=sys.stderr)
        return EXIT_STREAM


if __name__ == "__main__":
    sys.exit(main())
