"""Command-line front end.

`vivisat solve FILE` solves one DIMACS CNF file with SAT-competition style
output (c/s/v lines; exit codes 10 SAT, 20 UNSAT, 0 UNKNOWN, 1 error).
`vivisat batch DIR` runs every .cnf file in a directory, writes one
JSON-lines record per instance, and prints an aggregate summary.

Defaults reproduce the strongest configuration: live++ selection, threshold
activation, current literal order, preprocessing vivification on, tiered
reduction, LBD-window restarts.
"""

import argparse
import hashlib
import json
import multiprocessing
import sys
import time
from dataclasses import asdict
from pathlib import Path

from .clause_db import ReduceConfig, TierConfig
from .formula import ParseError, parse_dimacs
from .metrics import RULE_CATEGORIES
from .restart import RestartConfig
from .solver import Solver, SolverConfig, SAT, UNSAT
from .vivify import VivifyConfig

EXIT_SAT = 10
EXIT_UNSAT = 20
EXIT_UNKNOWN = 0
EXIT_ERROR = 1

_ACTIVATION_CHOICES = ("reduce", "threshold", "every",
                       "gap500", "gap1000", "gap1500")
_SORT_CHOICES = ("current", "l2h-level", "h2l-level", "l2h-act", "h2l-act",
                 "random", "reverse")


def _add_solver_flags(p: argparse.ArgumentParser):
    p.add_argument("--vivify", choices=("on", "off"), default="on")
    p.add_argument("--viv-activation", choices=_ACTIVATION_CHOICES,
                   default="threshold")
    p.add_argument("--viv-select", default="live++",
                   help="ghalf | gfrac=<fraction> | maple | live+ | live++")
    p.add_argument("--viv-sort", choices=_SORT_CHOICES, default="current")
    p.add_argument("--viv-gamma", type=int, default=20,
                   help="useful-conflict LBD bound")
    p.add_argument("--pre-vivify-cap", type=int, default=100_000_000,
                   help="propagated-literal budget for preprocessing; 0 disables")
    p.add_argument("--restart", choices=("glucose", "luby"), default="glucose")
    p.add_argument("--reduce", choices=("glucose", "tiered"), default="tiered")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cpu-lim", type=float, default=None, metavar="SEC")
    p.add_argument("--conf-lim", type=int, default=None, metavar="N")
    p.add_argument("--prop-lim", type=int, default=None, metavar="N")


def config_from_args(args) -> SolverConfig:
    selection = args.viv_select
    fraction = 0.5
    if selection.startswith("gfrac="):
        fraction = float(selection.split("=", 1)[1])
        selection = "gfrac"
    elif selection == "gfrac":
        pass
    elif selection not in ("ghalf", "maple", "live+", "live++"):
        raise ValueError("unknown --viv-select %r" % args.viv_select)
    activation = args.viv_activation
    gap = 1000
    if activation.startswith("gap"):
        gap = int(activation[3:])
        activation = "gap"
    vivify = VivifyConfig(
        enabled=args.vivify == "on",
        activation=activation,
        gap=gap,
        selection=selection,
        fraction=fraction,
        sort_order=args.viv_sort,
        useful_lbd_max=args.viv_gamma,
        preprocess=args.pre_vivify_cap > 0,
        preprocess_cap=max(args.pre_vivify_cap, 0),
    )
    return SolverConfig(
        seed=args.seed,
        restart=RestartConfig(mode=args.restart),
        reduce=ReduceConfig(mode=args.reduce),
        tiers=TierConfig(),
        vivify=vivify,
        conflict_budget=args.conf_lim,
        propagation_budget=args.prop_lim,
        time_budget=args.cpu_lim,
    )


def config_fingerprint(config: SolverConfig) -> str:
    blob = json.dumps(asdict(config), sort_keys=True, default=str)
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def _status_line(status: str) -> str:
    return {SAT: "s SATISFIABLE", UNSAT: "s UNSATISFIABLE"}.get(
        status, "s UNKNOWN")


def _exit_code(status: str) -> int:
    return {SAT: EXIT_SAT, UNSAT: EXIT_UNSAT}.get(status, EXIT_UNKNOWN)


def check_model(model, path) -> bool:
    """Independent re-check: do the v-line literals satisfy the input file?"""
    values = {abs(l): l > 0 for l in model}
    clause_ok = False
    any_clause = False
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line[0] in "cp":
                continue
            if line.startswith("%"):
                break
            for tok in line.split():
                lit = int(tok)
                if lit == 0:
                    if any_clause and not clause_ok:
                        return False
                    clause_ok = False
                    any_clause = False
                else:
                    any_clause = True
                    if values.get(abs(lit), False) == (lit > 0):
                        clause_ok = True
    return not any_clause or clause_ok


def main_solve(args) -> int:
    try:
        config = config_from_args(args)
    except ValueError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_ERROR
    try:
        text = Path(args.file).read_bytes()
        formula = parse_dimacs(text)
    except (OSError, ParseError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_ERROR
    print("c vivisat | config %s | seed %d" % (config_fingerprint(config),
                                               config.seed))
    print("c %d vars, %d clauses" % (formula.num_vars,
                                     len(formula.original_clauses)))
    solver = Solver(formula, config)
    started = time.monotonic()
    result = solver.solve()
    elapsed = time.monotonic() - started
    metrics = solver.metrics
    print("c conflicts %d | decisions %d | restarts %d | reductions %d"
          % (metrics.conflicts, metrics.decisions, metrics.restarts,
             metrics.reductions))
    print("c vivify passes %d | checked %d | shortened %d | impact %.2f%%"
          % (metrics.viv_passes, metrics.clauses_checked,
             metrics.clauses_vivified, metrics.impact()))
    print("c time %.3fs" % elapsed)
    if args.stats_json:
        Path(args.stats_json).write_text(metrics.report("json") + "\n")
    print(_status_line(result.status))
    if result.status == SAT:
        model = result.model or []
        for i in range(0, len(model), 20):
            chunk = model[i:i + 20]
            end = " 0" if i + 20 >= len(model) else ""
            print("v " + " ".join(str(l) for l in chunk) + end)
        if not model:
            print("v 0")
    sys.stdout.flush()
    return _exit_code(result.status)


def _run_one(job):
    """Batch worker: solve one file, return its RunRecord dict."""
    path, args_dict = job
    args = argparse.Namespace(**args_dict)
    config = config_from_args(args)
    record = {
        "instance": str(path),
        "seed": config.seed,
        "config": config_fingerprint(config),
    }
    started = time.monotonic()
    try:
        formula = parse_dimacs(Path(path).read_bytes())
        solver = Solver(formula, config)
        result = solver.solve()
    except (OSError, ParseError, AssertionError) as exc:
        record["answer"] = "ERROR"
        record["error"] = str(exc)
        record["wall_time_s"] = time.monotonic() - started
        return record
    record["answer"] = result.status
    record["wall_time_s"] = time.monotonic() - started
    record["metrics"] = solver.metrics.to_dict()
    if result.status == SAT:
        if not check_model(result.model, path):
            record["answer"] = "ERROR"
            record["error"] = "model failed independent re-check"
    return record


def summarize(records) -> dict:
    solved = [r for r in records if r["answer"] in (SAT, UNSAT)]
    summary = {
        "instances": len(records),
        "solved": len(solved),
        "sat": sum(1 for r in solved if r["answer"] == SAT),
        "unsat": sum(1 for r in solved if r["answer"] == UNSAT),
        "errors": sum(1 for r in records if r["answer"] == "ERROR"),
        "mean_time_solved_s": (
            sum(r["wall_time_s"] for r in solved) / len(solved)
            if solved else 0.0),
    }
    # macro averages: per instance first, then across solved instances
    for kind in ("original", "learnt"):
        key = "reduction_ratio_%s_pct" % kind
        vals = [r["metrics"][key] for r in solved
                if r["metrics"]["reduction_ratio_%s_defined" % kind]]
        summary["macro_%s" % key] = sum(vals) / len(vals) if vals else 0.0
    for name in RULE_CATEGORIES:
        vals = [r["metrics"]["rule_percentages"][name] for r in solved
                if r["metrics"]["clauses_checked"] > 0]
        summary["macro_rule_pct_%s" % name] = (
            sum(vals) / len(vals) if vals else 0.0)
    return summary


def main_batch(args) -> int:
    directory = Path(args.directory)
    if not directory.is_dir():
        print("error: %s is not a directory" % directory, file=sys.stderr)
        return EXIT_ERROR
    files = sorted(directory.glob("*.cnf"))
    args_dict = {k: v for k, v in vars(args).items()
                 if k not in ("command", "func", "directory", "jobs",
                              "jsonl", "csv")}
    jobs = [(str(f), args_dict) for f in files]
    if args.jobs > 1 and len(jobs) > 1:
        with multiprocessing.Pool(args.jobs) as pool:
            records = pool.map(_run_one, jobs)
    else:
        records = [_run_one(job) for job in jobs]
    if args.jsonl:
        with open(args.jsonl, "w") as fh:
            for record in records:
                fh.write(json.dumps(record, sort_keys=True) + "\n")
    summary = summarize(records)
    if args.csv:
        keys = list(summary.keys())
        with open(args.csv, "w") as fh:
            fh.write(",".join(keys) + "\n")
            fh.write(",".join(str(summary[k]) for k in keys) + "\n")
    print("instances %(instances)d | solved %(solved)d "
          "(sat %(sat)d, unsat %(unsat)d) | errors %(errors)d" % summary)
    print("mean time over solved: %.3fs" % summary["mean_time_solved_s"])
    print("macro reduction ratio: original %.2f%% | learnt %.2f%%"
          % (summary["macro_reduction_ratio_original_pct"],
             summary["macro_reduction_ratio_learnt_pct"]))
    print("macro rule pct: " + "  ".join(
        "%s %.1f%%" % (name, summary["macro_rule_pct_%s" % name])
        for name in RULE_CATEGORIES))
    return EXIT_ERROR if summary["errors"] else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="vivisat",
        description="CDCL SAT solver with pre-/inprocessing clause vivification")
    sub = parser.add_subparsers(dest="command", required=True)
    solve = sub.add_parser("solve", help="solve one DIMACS CNF file")
    solve.add_argument("file")
    _add_solver_flags(solve)
    solve.add_argument("--stats-json", default=None, metavar="PATH")
    solve.set_defaults(func=main_solve)
    batch = sub.add_parser("batch", help="solve every .cnf file in a directory")
    batch.add_argument("directory")
    _add_solver_flags(batch)
    batch.add_argument("--jobs", type=int, default=1)
    batch.add_argument("--jsonl", default=None, metavar="PATH")
    batch.add_argument("--csv", default=None, metavar="PATH")
    batch.set_defaults(func=main_batch)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
