"""``maxdyn`` command line.

Every output starts with the fully resolved run configuration (a ``config``
object in JSON, ``#`` lines in text and CSV), and nothing in the output
depends on wall-clock time, so the same arguments and seed always produce
byte-identical output.

Exit codes: 0 success, 1 domain error, 2 usage error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from fractions import Fraction

import numpy as np

from . import dynamics, estimator, markov, params
from .errors import MaxDynError
from .graph import (FAMILIES, format_edge_list, generate, random_strongly_connected,
                    read_edge_list)
from .valuation import constant, format_valuation, parse_valuation

SEED_ENV = "MAXDYN_SEED"
COMMANDS = ("gen", "simulate", "exact", "period", "params", "mc", "worst", "scaling",
            "schedule", "couple")
NEEDS_GRAPH = {"gen", "simulate", "exact", "period", "params", "mc", "worst", "schedule"}
NEEDS_VALUATION = {"simulate", "exact", "mc", "schedule"}


class UsageError(Exception):
    pass


def _int_list(text):
    try:
        return [int(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of integers, got {text!r}")


def _float_list(text):
    try:
        return [float(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}")


def _u64(text):
    v = int(text, 0)
    if not 0 <= v < 2 ** 64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_argument_group("graph")
    src.add_argument("--family", choices=sorted(FAMILIES) + ["random-sc"])
    src.add_argument("--n", type=int, help="vertex count for --family")
    src.add_argument("--edges", metavar="FILE", help="edge-list file (\"n m\" then \"u v\" lines)")
    src.add_argument("--p", type=float, default=0.5,
                     help="edge probability for random-sc (default 0.5)")
    run = common.add_argument_group("run")
    run.add_argument("--valuation", metavar="LIST|FILE|constant:k|worst")
    run.add_argument("--seed", type=_u64, help=f"master seed (falls back to ${SEED_ENV}, then 0)")
    run.add_argument("--trials", type=int, default=1000)
    run.add_argument("--max-rounds", type=int, help="per-run round limit (default 50 n^2)")
    run.add_argument("--cap", type=int, default=markov.DEFAULT_CAP,
                     help="state budget for chain construction")
    run.add_argument("--mode", choices=["raw", "quotient"], help="chain mode")
    run.add_argument("--threads", type=int, default=1)
    out = common.add_argument_group("output")
    out.add_argument("--format", choices=["json", "csv", "text"], default="text")
    out.add_argument("--out", metavar="FILE")

    parser = argparse.ArgumentParser(prog="maxdyn",
                                     description="Asynchronous maximum dynamics on directed graphs.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    helps = {
        "gen": "emit a graph as an edge list",
        "simulate": "run one seeded trajectory",
        "exact": "exact expected convergence time from a valuation",
        "period": "period of the chain of possibilities",
        "params": "vertex expansion, orbit and bound shapes",
        "mc": "Monte Carlo convergence-time estimate",
        "worst": "exact worst-case convergence time over valuation classes",
        "scaling": "Monte Carlo scaling table for complete or path graphs",
        "schedule": "constructive update schedule to a constant valuation",
        "couple": "check the coupling of two success processes",
    }
    subs = {c: sub.add_parser(c, parents=[common], help=helps[c]) for c in COMMANDS}
    subs["scaling"].add_argument("--ns", type=_int_list, default=[8, 16, 32, 64],
                                 help="comma-separated vertex counts")
    subs["couple"].add_argument("--q", type=float, default=0.1)
    subs["couple"].add_argument("--p-seq", type=_float_list, default=[0.5],
                                help="success probabilities per round; the last repeats")
    subs["simulate"].add_argument("--digest-only", action="store_true",
                                  help="omit full valuations from round records")
    return parser


def _resolve_seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get(SEED_ENV)
    if env is None:
        return 0
    try:
        return _u64(env)
    except (ValueError, argparse.ArgumentTypeError):
        raise UsageError(f"${SEED_ENV} is not an unsigned 64-bit integer: {env!r}") from None


def _resolve_graph(args, seed):
    if args.edges and args.family:
        raise UsageError("--edges and --family are mutually exclusive")
    if args.edges:
        return read_edge_list(args.edges), {"edges": args.edges}
    if not args.family:
        raise UsageError("one of --family or --edges is required")
    if args.n is None:
        raise UsageError("--n is required with --family")
    if args.family == "random-sc":
        g = random_strongly_connected(args.n, args.p, np.random.default_rng(seed))
        return g, {"family": "random-sc", "n": args.n, "p": args.p}
    return generate(args.family, args.n), {"family": args.family, "n": args.n}


def _resolve_valuation(args, g):
    spec = args.valuation
    if spec is None:
        return estimator.two_valued_start(g.n), "default"
    if spec == "worst":
        return markov.worst_case_convergence_time(g, cap=args.cap).worst_valuation, "worst"
    if spec.startswith("constant:"):
        return constant(g.n, int(spec.split(":", 1)[1])), spec
    if os.path.isfile(spec):
        with open(spec, encoding="utf-8") as fh:
            return parse_valuation(fh.read(), g.n), spec
    return parse_valuation(spec, g.n), "literal"


def _rational(x):
    if isinstance(x, Fraction):
        return {"num": x.numerator, "den": x.denominator, "float": float(x)}
    return x


def _cmd_gen(args, g, f, seed):
    return {"n": g.n, "m": g.m, "edges": [list(e) for e in g.sorted_edges()]}


def _cmd_simulate(args, g, f, seed):
    traj = dynamics.simulate(g, f, dynamics.RngStream(seed), args.max_rounds)
    out = traj.header()
    out["records"] = traj.to_records(full=not args.digest_only)
    return out


def _cmd_exact(args, g, f, seed):
    value = markov.exact_convergence_time(g, f, cap=args.cap, mode=args.mode or "quotient")
    return {"expected_rounds": _rational(value)}


def _cmd_period(args, g, f, seed):
    return {"period": markov.period(g, cap=args.cap, mode=args.mode or "raw")}


def _cmd_params(args, g, f, seed):
    return params.bound_report(g).to_json_dict()


def _cmd_mc(args, g, f, seed):
    rep = estimator.mc_convergence(g, f, args.trials, args.max_rounds, seed, args.threads)
    return rep.to_json_dict()


def _cmd_worst(args, g, f, seed):
    rep = markov.worst_case_convergence_time(g, cap=args.cap)
    return {"worst_valuation": list(rep.worst_valuation),
            "expected_rounds": _rational(rep.worst_value),
            "exact": rep.exact, "states": len(rep.chain)}


def _cmd_scaling(args, g, f, seed):
    if args.family not in ("complete", "path"):
        raise UsageError("scaling needs --family complete or --family path")
    return {"rows": estimator.scaling_study(args.family, args.ns, args.trials, seed,
                                            args.max_rounds, args.threads)}


def _cmd_schedule(args, g, f, seed):
    sched = dynamics.constructive_schedule(g, f)
    final = dynamics.run_schedule(g, f, sched)
    last = final.rounds[-1].valuation if final.rounds else f
    return {"schedule": sched, "length": len(sched), "final_valuation": list(last)}


def _cmd_couple(args, g, f, seed):
    return estimator.coupling_test(args.q, args.p_seq, args.trials, seed).to_json_dict()


HANDLERS = {c: globals()[f"_cmd_{c}"] for c in COMMANDS}


def _config(args, seed, graph_src, f, f_src) -> dict:
    cfg = {"command": args.command, "seed": seed}
    if graph_src is not None:
        cfg["graph"] = graph_src
    if f is not None:
        cfg["valuation"] = list(f)
        cfg["valuation_source"] = f_src
    cmd = args.command
    if cmd in ("simulate", "mc", "scaling"):
        cfg["max_rounds"] = "50*n^2" if args.max_rounds is None else args.max_rounds
    if cmd in ("mc", "scaling", "couple"):
        cfg["trials"] = args.trials
    if cmd in ("mc", "scaling"):
        cfg["threads"] = args.threads
    if cmd in ("exact", "period", "worst") or f_src == "worst":
        cfg["cap"] = args.cap
    if cmd in ("exact", "period"):
        cfg["mode"] = args.mode or ("quotient" if cmd == "exact" else "raw")
    if cmd == "scaling":
        cfg["family"], cfg["ns"] = args.family, args.ns
    if cmd == "couple":
        cfg["q"], cfg["p_seq"] = args.q, args.p_seq
    cfg["format"] = args.format
    return cfg


def _flat(prefix, value, out):
    if isinstance(value, dict):
        for k, v in value.items():
            _flat(f"{prefix}.{k}" if prefix else k, v, out)
    elif isinstance(value, list):
        out[prefix] = " ".join(str(x) for x in value)
    else:
        out[prefix] = value


def _rows_of(command, result):
    if command == "scaling":
        return result["rows"]
    if command == "simulate":
        return result["records"]
    row: dict = {}
    _flat("", result, row)
    return [row]


def _text_result(command, result, g) -> str:
    if command == "gen":
        return format_edge_list(g)
    if command == "exact":
        v = result["expected_rounds"]
        return f"{v['num']}\n" if v["den"] == 1 else f"{v['num']}/{v['den']}\n"
    if command == "period":
        return f"{result['period']}\n"
    if command == "simulate":
        head = {k: v for k, v in result.items() if k != "records"}
        lines = [json.dumps(head, sort_keys=True)]
        lines += [json.dumps(r, sort_keys=True) for r in result["records"]]
        return "\n".join(lines) + "\n"
    if command == "schedule":
        return (" ".join(map(str, result["schedule"])) + "\n"
                + format_valuation(tuple(result["final_valuation"])) + "\n")
    if command == "params":
        pieces = [f"n: {result['n']}", f"delta: {result['delta']}"]
        for key in ("phi_out", "phi_in", "phi_prime"):
            r = result[key]
            pieces.append(f"{key}: {Fraction(r['num'], r['den'])}")
        pieces += [f"phi: {Fraction(result['phi_prime']['num'], result['phi_prime']['den'])}",
                   f"b: {result['orbit_b']}",
                   f"orbit_witness: {result['orbit_witness']}",
                   f"bound_undirected: {result['bound_undirected']:.6g}",
                   f"bound_strongly_connected: {result['bound_strongly_connected']:.6g}"]
        return "\n".join(pieces) + "\n"
    if command == "scaling":
        return _csv(result["rows"])
    row = _rows_of(command, result)[0]
    return "".join(f"{k}: {v}\n" for k, v in row.items())


def _csv(rows) -> str:
    if not rows:
        return ""
    fields = list(dict.fromkeys(k for r in rows for k in r))
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: (json.dumps(v) if isinstance(v, (list, dict)) else v) for k, v in r.items()})
    return buf.getvalue()


def render(args, cfg, result, g) -> str:
    if args.format == "json":
        return json.dumps({"config": cfg, "result": result}, sort_keys=True, indent=2) + "\n"
    header = "".join(f"# {k}: {json.dumps(v, sort_keys=True)}\n" for k, v in cfg.items())
    if args.format == "csv":
        return header + _csv(_rows_of(args.command, result))
    return header + _text_result(args.command, result, g)


def run(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        seed = _resolve_seed(args)
        g = graph_src = f = f_src = None
        if args.command in NEEDS_GRAPH:
            g, graph_src = _resolve_graph(args, seed)
        if args.command in NEEDS_VALUATION or (args.command in NEEDS_GRAPH and args.valuation):
            f, f_src = _resolve_valuation(args, g)
        if args.trials < 1:
            raise UsageError("--trials must be at least 1")
        if args.threads < 1:
            raise UsageError("--threads must be at least 1")
        if args.max_rounds is not None and args.max_rounds < 0:
            raise UsageError("--max-rounds must be non-negative")
        if args.max_rounds is None and g is not None:
            args.max_rounds = estimator.default_max_rounds(g.n)
        cfg = _config(args, seed, graph_src, f, f_src)
        result = HANDLERS[args.command](args, g, f, seed)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"maxdyn: error: {exc}", file=sys.stderr)
        return 2
    except (MaxDynError, OSError, ValueError) as exc:
        print(f"maxdyn: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    text = render(args, cfg, result, g)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
