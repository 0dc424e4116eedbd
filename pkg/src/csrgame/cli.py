"""Command-line interface.

Exit codes: 0 success, 1 validation error or bad usage, 2 enumeration budget
or step limit exhausted.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from . import analysis, dynamics, exact
from .errors import BudgetExceededError, ValidationError
from .game import Instance, initial_allocation, make_allocation, social_cost
from .graph import FAMILIES, generate
from .serialize import (InstanceFile, format_allocation, parse_allocation, read_instance,
                        to_dot, write_instance, write_trace)

EXIT_OK, EXIT_INVALID, EXIT_EXHAUSTED = 0, 1, 2

BENCH_COLUMNS = ["row", "repeat", "family", "n", "k", "diameter", "dynamics", "epsilon", "init",
                 "seed", "steps", "terminated", "social_cost", "potential", "step_bound",
                 "within_step_bound", "optimal_cost", "ratio"]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _parse_epsilon(text: str) -> float:
    if text.lower() == "e":
        return math.e
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not value > 1:
        raise argparse.ArgumentTypeError("epsilon must exceed 1")
    return value


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="csrgame", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate an instance file")
    g.add_argument("--family", required=True, choices=FAMILIES)
    g.add_argument("--n", type=int)
    g.add_argument("--p", type=float)
    g.add_argument("--m", type=int)
    g.add_argument("--k", type=int, required=True)
    g.add_argument("--max-retries", type=int, default=100)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--init", choices=["all-zero", "round-robin", "random"],
                   help="also store an initial allocation")
    g.add_argument("-o", "--output")

    for name in ("run-lbr", "run-ebr"):
        r = sub.add_parser(name, help=f"run {'least' if name == 'run-lbr' else 'epsilon'}-best-response dynamics")
        r.add_argument("instance")
        r.add_argument("--init", choices=["all-zero", "round-robin", "random"])
        r.add_argument("--alloc", help="explicit initial allocation, e.g. 0,1,0")
        r.add_argument("--seed", type=int, default=0)
        r.add_argument("--max-steps", type=int)
        r.add_argument("--epsilon", type=_parse_epsilon, default=math.e,
                       help="growth factor (ebr) or potential exponent base (lbr); 'e' allowed")
        r.add_argument("--trace", help="trace CSV path (default: stdout)")
        r.add_argument("-o", "--output", help="write final allocation into this instance file")
        if name == "run-ebr":
            r.add_argument("--selection", choices=["min-radius", "random"], default="min-radius")

    v = sub.add_parser("verify-ne", help="check whether an allocation is a pure Nash equilibrium")
    v.add_argument("instance")
    v.add_argument("--alloc")

    for name, help_ in (("brute-optimal", "exhaustive optimum"),
                        ("brute-ne", "enumerate all pure Nash equilibria"),
                        ("poa", "price of anarchy report")):
        b = sub.add_parser(name, help=help_)
        b.add_argument("instance")
        b.add_argument("--budget", type=int, default=exact.DEFAULT_BUDGET)
        b.add_argument("-o", "--output")
        if name == "brute-ne":
            b.add_argument("--list", action="store_true", help="include every equilibrium profile")

    bd = sub.add_parser("bounds", help="random-allocation bound vs exact and sampled expectation")
    bd.add_argument("instance")
    bd.add_argument("--samples", type=int, default=0)
    bd.add_argument("--seed", type=int, default=0)
    bd.add_argument("-o", "--output")

    be = sub.add_parser("bench", help="batch sweep from a JSON config")
    be.add_argument("config")
    be.add_argument("--seed", type=int, help="override the config seed")
    be.add_argument("--workers", type=int, default=1)
    be.add_argument("-o", "--output")

    d = sub.add_parser("export-dot", help="Graphviz export coloured by resource")
    d.add_argument("instance")
    d.add_argument("--alloc")
    d.add_argument("-o", "--output")
    return p


def _emit(text: str, output: Optional[str]) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _emit_json(doc: dict, output: Optional[str]) -> None:
    _emit(json.dumps(doc, indent=2, sort_keys=True) + "\n", output)


def _start_profile(inst: Instance, f: InstanceFile, args) -> tuple[int, ...]:
    if getattr(args, "alloc", None):
        return make_allocation(inst, parse_allocation(args.alloc))
    if getattr(args, "init", None):
        return initial_allocation(inst, args.init, args.seed)
    if f.allocation is not None:
        return f.allocation
    return initial_allocation(inst, "round-robin")


def _cmd_gen(args) -> int:
    params = {k: v for k, v in (("n", args.n), ("p", args.p), ("m", args.m)) if v is not None}
    if args.family == "poa_example":
        params["k"] = args.k
    if args.family == "gnp_connected":
        params["max_retries"] = args.max_retries
    g = generate(args.family, seed=args.seed, **params)
    inst = Instance(g, args.k)
    alloc = initial_allocation(inst, args.init, args.seed) if args.init else None
    meta = {"family": args.family, "params": params, "seed": args.seed}
    f = InstanceFile.from_instance(inst, alloc, meta)
    _emit(f.to_json(), args.output)
    return EXIT_OK


def _cmd_run(args) -> int:
    f = read_instance(args.instance)
    inst = f.instance()
    P0 = _start_profile(inst, f, args)
    if args.command == "run-lbr":
        final, trace = dynamics.run_lbr(inst, P0, args.max_steps, epsilon=args.epsilon)
    else:
        final, trace = dynamics.run_ebr(inst, P0, args.epsilon, args.max_steps,
                                        selection=args.selection, seed=args.seed)
    if args.trace:
        write_trace(trace, args.trace)
    else:
        write_trace(trace, sys.stdout)
    if args.output:
        write_instance(InstanceFile(f.n, f.edges, f.k, final, f.metadata), args.output)
    print(f"final: {format_allocation(final)}", file=sys.stderr if not args.trace else sys.stdout)
    print(f"steps: {trace.steps_taken} terminated: {str(trace.terminated).lower()} "
          f"social_cost: {social_cost(inst, final)}",
          file=sys.stderr if not args.trace else sys.stdout)
    return EXIT_OK if trace.terminated else EXIT_EXHAUSTED


def _cmd_verify(args) -> int:
    f = read_instance(args.instance)
    inst = f.instance()
    if args.alloc:
        P = make_allocation(inst, parse_allocation(args.alloc))
    elif f.allocation is not None:
        P = f.allocation
    else:
        raise ValidationError("no allocation: pass --alloc or store one in the instance file")
    ok, witness = exact.is_nash(inst, P)
    if ok:
        print("NE: true")
    else:
        print(f"NE: false (player {witness.player} -> resource {witness.resource}, "
              f"gain {witness.cost_gain})")
    return EXIT_OK


def _cmd_brute(args) -> int:
    inst = read_instance(args.instance).instance()
    if args.command == "brute-optimal":
        P, cost = exact.brute_force_optimal(inst, args.budget)
        _emit_json({"optimal_cost": cost, "optimal_profile": format_allocation(P)}, args.output)
    elif args.command == "brute-ne":
        s = exact.enumerate_nash(inst, args.budget)
        doc = {"ne_count": s.count, "ne_min_cost": s.min_cost, "ne_max_cost": s.max_cost}
        if args.list:
            doc["profiles"] = [format_allocation(P) for P in s.profiles]
        _emit_json(doc, args.output)
    else:
        rep = exact.price_of_anarchy(inst, args.budget)
        doc = rep.as_dict()
        doc["optimal_profile"] = format_allocation(rep.optimal_profile)
        _emit_json(doc, args.output)
    return EXIT_OK


def _cmd_bounds(args) -> int:
    inst = read_instance(args.instance).instance()
    g = inst.graph
    rep = analysis.exact_bound_report(g, inst.k)
    doc = {
        "bound": rep.bound_value,
        "expected_random_cost": rep.exact_or_estimate,
        "expected_with_zero_term": analysis.exact_expected_random_cost(g, inst.k, include_zero_term=True),
        "satisfied": rep.satisfied,
    }
    if args.samples:
        mc = analysis.monte_carlo_random_cost(inst, args.samples, args.seed)
        doc["monte_carlo"] = {"mean": mc.exact_or_estimate, "stderr": mc.stderr,
                              "samples": mc.samples, "satisfied": mc.satisfied}
    _emit_json(doc, args.output)
    return EXIT_OK


def _step_bound(inst: Instance, kind: str, eps: float):
    n, k, D = inst.n, inst.k, inst.D
    if kind == "ebr":
        return dynamics.default_ebr_steps(inst, eps)
    if k < 5:
        return n * min(D, k - 1)
    if k <= inst.graph.d_min:
        return 3 * n ** 3 * min(k - 1, D)
    return None


def _bench_row(job) -> list:
    row_idx, rep, spec, seed, budget = job
    family = spec["family"]
    params = dict(spec.get("params", {}))
    k = int(spec["k"])
    if family == "poa_example":
        params.setdefault("k", k)
    kind = spec.get("dynamics", "ebr")
    if kind not in ("lbr", "ebr"):
        raise ValidationError(f"rows[{row_idx}].dynamics: expected 'lbr' or 'ebr', got {kind!r}")
    eps = _parse_epsilon(str(spec.get("epsilon", "e")))
    init = spec.get("init", "round-robin")
    inst = Instance(generate(family, seed=seed, **params), k)
    P0 = initial_allocation(inst, init, seed)
    if kind == "lbr":
        final, trace = dynamics.run_lbr(inst, P0, epsilon=eps)
    else:
        final, trace = dynamics.run_ebr(inst, P0, eps)
    bound = _step_bound(inst, kind, eps)
    cost = social_cost(inst, final)
    opt = ratio = ""
    if inst.k ** inst.n <= budget:
        _, opt = exact.brute_force_optimal(inst, budget)
        ratio = f"{(cost / opt if opt else 1.0):.12g}"
    pot = trace.steps[-1].potential if trace.steps else trace.initial_potential
    return [row_idx, rep, family, inst.n, k, inst.D, kind, f"{eps:.12g}", init, seed,
            trace.steps_taken, int(trace.terminated), cost, f"{pot:.12g}",
            "" if bound is None else bound,
            "" if bound is None else int(trace.steps_taken <= bound), opt, ratio]


def run_bench(config: dict, seed: Optional[int] = None, workers: int = 1) -> str:
    """Run every row of a bench config and return the results CSV text."""
    if not isinstance(config, dict) or not isinstance(config.get("rows"), list):
        raise ValidationError("bench config: field 'rows' must be a list")
    base = int(config.get("seed", 0) if seed is None else seed)
    budget = int(config.get("budget", 10 ** 5))
    jobs = []
    for r, spec in enumerate(config["rows"]):
        if not isinstance(spec, dict) or "family" not in spec or "k" not in spec:
            raise ValidationError(f"bench config: rows[{r}] needs 'family' and 'k'")
        for rep in range(int(spec.get("repeats", 1))):
            s = int(np.random.SeedSequence([base, r, rep]).generate_state(1)[0])
            jobs.append((r, rep, spec, s, budget))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(_bench_row, jobs))
    else:
        rows = [_bench_row(j) for j in jobs]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(BENCH_COLUMNS)
    w.writerows(rows)
    return buf.getvalue()


def _cmd_bench(args) -> int:
    try:
        config = json.loads(Path(args.config).read_text())
    except OSError as exc:
        raise ValidationError(f"cannot read {args.config}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ValidationError(f"bench config is not valid JSON: {exc}") from None
    _emit(run_bench(config, args.seed, args.workers), args.output)
    return EXIT_OK


def _cmd_dot(args) -> int:
    f = read_instance(args.instance)
    inst = f.instance()
    P = make_allocation(inst, parse_allocation(args.alloc)) if args.alloc else f.allocation
    _emit(to_dot(inst, P), args.output)
    return EXIT_OK


_COMMANDS = {
    "gen": _cmd_gen,
    "run-lbr": _cmd_run,
    "run-ebr": _cmd_run,
    "verify-ne": _cmd_verify,
    "brute-optimal": _cmd_brute,
    "brute-ne": _cmd_brute,
    "poa": _cmd_brute,
    "bounds": _cmd_bounds,
    "bench": _cmd_bench,
    "export-dot": _cmd_dot,
}


def run_command(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return _COMMANDS[args.command](args)
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_EXHAUSTED
    except (ValidationError, argparse.ArgumentTypeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID


def main() -> None:
    sys.exit(run_command())


if __name__ == "__main__":
    main()
