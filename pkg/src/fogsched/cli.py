"""``fogsched`` command line.

Exit codes: 0 success, 1 usage or input error, 2 a task fits on no node,
3 exhaustive search over budget.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import asdict, replace
from pathlib import Path

from . import __version__
from .harness import (
    builtin_experiment,
    emit_report,
    load_config,
    report_metadata,
    run_experiment,
    spec_from_config,
)
from .model import InfeasibleTaskError
from .schedulers import (
    DEFAULT_BUDGET,
    RNG_NAME,
    SCHEDULERS,
    BudgetExceededError,
    GeneticParams,
    UnknownSchedulerError,
    make_scheduler,
    search_space_size,
)
from .workload import (
    InstanceFormatError,
    generate_nodes,
    generate_tasks,
    load_instance,
    node_distribution_from_dict,
    save_instance,
    task_distribution_from_dict,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INFEASIBLE = 2
EXIT_BUDGET = 3
CONFIG_ENV = "FOGSCHED_CONFIG"


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _config(args):
    path = getattr(args, "config", None) or os.environ.get(CONFIG_ENV)
    if not path:
        return {}
    try:
        return load_config(path)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from None


def _scheduler_names(text):
    names = [s.strip() for s in text.split(",") if s.strip()]
    for name in names:
        if name not in SCHEDULERS:
            raise UnknownSchedulerError(name)
    return names


def _scheduler_params(args, cfg):
    genetic = GeneticParams.from_dict(cfg.get("genetic") or {})
    if getattr(args, "ga_generations", None) is not None:
        genetic = replace(genetic, generations=args.ga_generations)
    return {
        **asdict(genetic),
        "random_state": args.seed,
        "raw_violation_cost": args.raw_violation_cost or bool(cfg.get("raw_violation_cost", False)),
        "budget": getattr(args, "budget", DEFAULT_BUDGET),
    }


def _write_json(path, doc):
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")


def cmd_schedule(args):
    cfg = _config(args)
    _scheduler_names(args.scheduler)
    tasks, nodes = load_instance(args.instance)
    params = _scheduler_params(args, cfg)
    est = make_scheduler(args.scheduler, **params)
    est.fit(tasks, nodes)
    rep = est.report_
    out = args.output or f"{Path(args.instance).stem}.{args.scheduler}.json"
    _write_json(
        out,
        {
            "metadata": {
                "tool_version": __version__,
                "scheduler": args.scheduler,
                "params": est.get_params(),
                "instance": str(args.instance),
                "generator": RNG_NAME,
                "raw_violation_cost": params["raw_violation_cost"],
            },
            "assignment": [{"task": t, "node": n} for t, n in est.schedule_.assignment.items()],
            "available_time_ms": {str(k): v for k, v in est.schedule_.available_time_ms.items()},
            "report": {
                "total_comp": rep.total_comp,
                "total_comm": rep.total_comm,
                "total_viol": rep.total_viol,
                "total": rep.total,
                "pdst_pct": rep.pdst_pct,
                "makespan_ms": rep.makespan_ms,
                "n_violated": rep.n_violated,
                "per_task": [asdict(tc) for tc in rep.per_task],
            },
        },
    )
    print(
        f"{args.scheduler}: {rep.n_violated}/{len(tasks)} tasks violated deadlines, "
        f"PDST {rep.pdst_pct:.2f}%, total cost {rep.total:.4f} G$ "
        f"(comp {rep.total_comp:.4f}, comm {rep.total_comm:.4f}, viol {rep.total_viol:.4f}); "
        f"seed {args.seed}; wrote {out}"
    )
    return EXIT_OK


def cmd_generate(args):
    cfg = _config(args)
    tdist = task_distribution_from_dict(cfg.get("task_distribution"))
    ndist = node_distribution_from_dict(cfg.get("node_distribution"))
    tasks = generate_tasks(args.tasks, tdist, args.seed)
    nodes = generate_nodes(args.fog, args.cloud, ndist, args.seed)
    save_instance(args.output, tasks, nodes)
    print(f"generated {len(tasks)} tasks, {args.fog} fog + {args.cloud} cloud nodes (seed {args.seed}) -> {args.output}")
    return EXIT_OK


def cmd_experiment(args):
    if args.which is not None and args.config:
        raise UsageError("give either a built-in experiment id or --config, not both")
    if args.which is not None:
        cfg = {}
        spec = builtin_experiment(args.which)
    else:
        cfg = _config(args)
        if not cfg:
            raise UsageError(f"need a built-in experiment id, --config, or ${CONFIG_ENV}")
        spec = spec_from_config(cfg)
    over = {}
    if args.trials is not None:
        over["trials"] = args.trials
    if args.seed is not None:
        over["seed"] = args.seed
    if args.schedulers:
        over["schedulers"] = tuple(_scheduler_names(args.schedulers))
    if args.raw_violation_cost:
        over["raw_violation_cost"] = True
    if args.ga_generations is not None:
        over["genetic"] = replace(spec.genetic, generations=args.ga_generations)
    spec = replace(spec, **over)

    rows = run_experiment(spec, jobs=args.jobs)
    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"{spec.name}.{args.format}"
    emit_report(rows, args.format, path, report_metadata(spec), include_timing=args.timings)

    print(f"{spec.name}: {len(rows)} rows ({len(spec.values)} x {len(spec.schedulers)}), seed {spec.seed} -> {path}")
    for row in rows:
        flag = f"  [{row.infeasible_trials} infeasible trial(s)]" if row.infeasible_trials else ""
        print(
            f"  {spec.sweep}={row.value:<5} {row.scheduler:<8} PDST {row.get('pdst'):6.2f}%  "
            f"viol {row.get('c_viol'):12.2f}  total {row.get('total'):12.2f}{flag}"
        )
    return EXIT_OK


def cmd_verify(args):
    cfg = _config(args)
    names = _scheduler_names(args.schedulers)
    if "exact" not in names:
        names.append("exact")
    tasks, nodes = load_instance(args.instance)
    states = search_space_size(len(tasks), len(nodes))
    if states > args.budget:
        print(f"search space m^n = {len(nodes)}^{len(tasks)} = {states} exceeds budget {args.budget}", file=sys.stderr)
        return EXIT_BUDGET
    params = _scheduler_params(args, cfg)
    reports = {name: make_scheduler(name, **params).fit(tasks, nodes).report_ for name in names}
    best = reports["exact"].total
    rows = []
    print(f"{'scheduler':<10} {'total':>14} {'gap':>10}")
    for name in names:
        total = reports[name].total
        gap = (total - best) / best if best else (0.0 if total == best else float("inf"))
        rows.append({"scheduler": name, "total": total, "gap": gap})
        print(f"{name:<10} {total:14.6f} {gap:10.4%}")
    if args.output:
        _write_json(args.output, {"instance": str(args.instance), "search_space": states, "rows": rows})
    return EXIT_OK


def build_parser():
    parser = _Parser(prog="fogsched", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"fogsched {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, seed_default=0):
        p.add_argument("--seed", type=int, default=seed_default, help="random seed (default %(default)s)")
        p.add_argument("--config", help=f"YAML/JSON config (falls back to ${CONFIG_ENV})")
        p.add_argument(
            "--raw-violation-cost",
            action="store_true",
            help="do not clamp negative violation costs to zero",
        )

    p = sub.add_parser("schedule", help="schedule one instance file")
    p.add_argument("instance")
    p.add_argument("--scheduler", required=True, help=f"one of: {', '.join(SCHEDULERS)}")
    p.add_argument("--output", "-o")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET, help="state budget for 'exact'")
    p.add_argument("--ga-generations", type=int)
    common(p)
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("generate", help="generate a random instance file")
    p.add_argument("--tasks", type=int, required=True)
    p.add_argument("--fog", type=int, required=True)
    p.add_argument("--cloud", type=int, required=True)
    p.add_argument("--output", "-o", required=True)
    common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("experiment", help="run a built-in or configured sweep")
    p.add_argument("which", nargs="?", type=int, choices=(1, 2, 3))
    p.add_argument("--output-dir", default="results")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--trials", type=int)
    p.add_argument("--schedulers", help="comma-separated scheduler names")
    p.add_argument("--ga-generations", type=int)
    p.add_argument("--jobs", type=int, default=1, help="worker processes for trials")
    p.add_argument("--timings", action="store_true", help="add mean wall time (breaks byte-for-byte reruns)")
    common(p, seed_default=None)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("verify", help="optimality gap of heuristics against the exhaustive optimum")
    p.add_argument("instance")
    p.add_argument("--schedulers", default="min-ccv,min-v,rr,random,ga")
    p.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    p.add_argument("--ga-generations", type=int)
    p.add_argument("--output", "-o")
    common(p)
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InfeasibleTaskError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except BudgetExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, UnknownSchedulerError, InstanceFormatError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
