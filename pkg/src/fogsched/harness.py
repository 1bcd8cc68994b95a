"""Experiment sweeps: generate workloads, run every scheduler, aggregate.

Within one trial every scheduler sees the identical instance, and the
instances at different sweep values are nested: the trial's seeds depend
only on ``(seed, trial)``, and generation is prefix-stable, so going from
100 to 150 tasks adds 50 tasks to the same 100 (likewise for fog or cloud
nodes). Adding sweep points never changes existing ones.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np
import yaml

from .model import InfeasibleTaskError, NodeKind
from .schedulers import GeneticParams, make_scheduler
from .workload import (
    GENERATOR_INFO,
    NodeDistribution,
    TaskDistribution,
    derive_seeds,
    generate_nodes,
    generate_tasks,
    instance_digest,
    node_distribution_from_dict,
    task_distribution_from_dict,
)

SWEEP_VARS = ("tasks", "fog", "cloud")
DEFAULT_SCHEDULERS = ("min-ccv", "min-v", "rr", "random", "ga")
METRICS = ("pdst", "makespan", "c_viol", "c_comp", "c_comm", "total")
TOOL_VERSION = "0.1.0"


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    sweep: str
    values: tuple
    tasks: int = 200
    fog: int = 30
    cloud: int = 15
    trials: int = 10
    seed: int = 0
    schedulers: tuple = DEFAULT_SCHEDULERS
    task_dist: TaskDistribution = field(default_factory=TaskDistribution)
    node_dist: NodeDistribution = field(default_factory=NodeDistribution)
    genetic: GeneticParams = field(default_factory=GeneticParams)
    raw_violation_cost: bool = False

    def __post_init__(self):
        if self.sweep not in SWEEP_VARS:
            raise ValueError(f"sweep must be one of {SWEEP_VARS}, got {self.sweep!r}")
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        object.__setattr__(self, "schedulers", tuple(self.schedulers))
        if not self.values:
            raise ValueError("sweep values must be nonempty")
        if self.sweep == "tasks" and any(v < 1 for v in self.values):
            raise ValueError("task counts must be positive")
        if any(v < 0 for v in self.values):
            raise ValueError("sweep values must be non-negative")
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if not self.schedulers:
            raise ValueError("scheduler list is empty")

    def counts(self, value):
        c = {"tasks": self.tasks, "fog": self.fog, "cloud": self.cloud}
        c[self.sweep] = value
        return c


def builtin_experiment(which):
    """The three sweeps: task count, fog-node count, cloud-node count."""
    if which == 1:
        return ExperimentSpec("exp1", "tasks", (50, 100, 150, 200, 250, 300), tasks=200, fog=30, cloud=15)
    if which == 2:
        return ExperimentSpec("exp2", "fog", (10, 20, 30, 40, 50), tasks=200, fog=30, cloud=15)
    if which == 3:
        return ExperimentSpec("exp3", "cloud", (5, 10, 15, 20, 25), tasks=200, fog=30, cloud=15)
    raise ValueError(f"no built-in experiment {which!r}; choose 1, 2 or 3")


# -- config files ------------------------------------------------------------

_SPEC_KEYS = {"name", "sweep", "values", "tasks", "fog", "cloud", "trials", "seed", "schedulers"}


def spec_from_config(doc):
    """Build an :class:`ExperimentSpec` from a parsed config mapping.

    ``experiment.builtin`` (1-3) selects a base spec; other ``experiment``
    keys override it. ``task_distribution``, ``node_distribution`` and
    ``genetic`` override the defaults; ``raw_violation_cost`` sets the policy.
    """
    doc = dict(doc or {})
    unknown = set(doc) - {"experiment", "task_distribution", "node_distribution", "genetic", "raw_violation_cost"}
    if unknown:
        raise ValueError(f"unknown config section(s): {', '.join(sorted(unknown))}")
    exp = dict(doc.get("experiment") or {})
    builtin = exp.pop("builtin", None)
    bad = set(exp) - _SPEC_KEYS
    if bad:
        raise ValueError(f"unknown experiment key(s): {', '.join(sorted(bad))}")
    if builtin is not None:
        spec = replace(builtin_experiment(int(builtin)), **exp)
    else:
        missing = {"name", "sweep", "values"} - set(exp)
        if missing:
            raise ValueError(f"experiment needs {', '.join(sorted(missing))} (or a builtin id)")
        spec = ExperimentSpec(**exp)
    return replace(
        spec,
        task_dist=task_distribution_from_dict(doc.get("task_distribution")),
        node_dist=node_distribution_from_dict(doc.get("node_distribution")),
        genetic=GeneticParams.from_dict(doc.get("genetic") or {}),
        raw_violation_cost=bool(doc.get("raw_violation_cost", False)),
    )


def load_config(path):
    """Read a YAML (or JSON) config file into a raw mapping."""
    with open(path, encoding="utf-8") as fh:
        doc = yaml.safe_load(fh)
    if doc is not None and not isinstance(doc, dict):
        raise ValueError(f"{path}: config must be a mapping")
    return doc or {}


# -- running -------------------------------------------------------------------


@dataclass(frozen=True)
class TrialResult:
    value: int
    trial: int
    scheduler: str
    workload_hash: str
    metrics: dict
    wall_time_ms: float
    infeasible: bool
    cloud_only_tasks: int


def _cloud_only(tasks, nodes):
    fog_mem = max((n.mem_mb for n in nodes if n.kind is NodeKind.FOG), default=-math.inf)
    cloud_mem = max((n.mem_mb for n in nodes if n.kind is NodeKind.CLOUD), default=-math.inf)
    return sum(1 for t in tasks if fog_mem < t.mem_mb <= cloud_mem)


def run_trial(spec, value, trial):
    """All schedulers on one generated instance."""
    seeds = derive_seeds(spec.seed, trial)
    counts = spec.counts(value)
    tasks = generate_tasks(counts["tasks"], spec.task_dist, seeds["tasks"])
    nodes = generate_nodes(counts["fog"], counts["cloud"], spec.node_dist, seeds["nodes"])
    digest = instance_digest(tasks, nodes)
    cloud_only = _cloud_only(tasks, nodes)

    params = {
        **asdict(spec.genetic),
        "raw_violation_cost": spec.raw_violation_cost,
    }
    out = []
    for name in spec.schedulers:
        seed = seeds["ga"] if name == "ga" else seeds["random"]
        est = make_scheduler(name, random_state=seed, **params)
        try:
            est.fit(tasks, nodes)
        except InfeasibleTaskError:
            out.append(TrialResult(value, trial, name, digest, {}, 0.0, True, cloud_only))
            continue
        out.append(
            TrialResult(value, trial, name, digest, est.report_.summary(), est.wall_time_ms_, False, cloud_only)
        )
    return out


def _run_unit(args):
    spec, value, trial = args
    return run_trial(spec, value, trial)


def run_trials(spec, jobs=1):
    units = [(spec, v, k) for v in spec.values for k in range(spec.trials)]
    if jobs and jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_run_unit, units))
    else:
        chunks = [_run_unit(u) for u in units]
    results = [r for chunk in chunks for r in chunk]
    # completion order never matters: reduce over a canonical ordering
    results.sort(key=lambda r: (r.value, r.scheduler, r.trial))
    return results


@dataclass(frozen=True)
class AggregateRow:
    sweep: str
    value: int
    scheduler: str
    trials: int
    stats: dict
    wall_time_ms: float
    workload_hash: str
    infeasible_trials: int
    cloud_only_tasks: int

    def get(self, metric, stat="avg"):
        return self.stats[metric][stat]


def aggregate(spec, results):
    groups = {}
    for r in results:
        groups.setdefault((r.value, r.scheduler), []).append(r)
    rows = []
    for (value, name), rs in sorted(groups.items()):
        ok = [r for r in rs if not r.infeasible]
        stats = {}
        for m in METRICS:
            xs = np.array([r.metrics[m] for r in ok], dtype=float)
            if xs.size:
                lo, hi = float(xs.min()), float(xs.max())
                # the rounded mean of equal values can land one ulp outside [lo, hi]
                stats[m] = {"avg": min(max(float(np.mean(xs)), lo), hi), "min": lo, "max": hi}
            else:
                stats[m] = {"avg": math.nan, "min": math.nan, "max": math.nan}
        digest = hashlib.sha256("".join(r.workload_hash for r in rs).encode()).hexdigest()[:16]
        rows.append(
            AggregateRow(
                sweep=spec.sweep,
                value=value,
                scheduler=name,
                trials=len(rs),
                stats=stats,
                wall_time_ms=float(np.mean([r.wall_time_ms for r in ok])) if ok else math.nan,
                workload_hash=digest,
                infeasible_trials=len(rs) - len(ok),
                cloud_only_tasks=sum(r.cloud_only_tasks for r in rs),
            )
        )
    return rows


def run_experiment(spec, jobs=1):
    """Rows sorted by (sweep value, scheduler name)."""
    return aggregate(spec, run_trials(spec, jobs=jobs))


# -- reports --------------------------------------------------------------------


def columns(include_timing=False):
    cols = ["sweep", "value", "scheduler", "trials"]
    for m in METRICS:
        cols += [f"{m}_avg", f"{m}_min", f"{m}_max"]
    if include_timing:
        cols.append("wall_time_ms")
    cols += ["workload_hash", "infeasible_trials", "cloud_only_tasks"]
    return cols


def row_record(row, include_timing=False):
    rec = {"sweep": row.sweep, "value": row.value, "scheduler": row.scheduler, "trials": row.trials}
    for m in METRICS:
        for s in ("avg", "min", "max"):
            rec[f"{m}_{s}"] = row.stats[m][s]
    if include_timing:
        rec["wall_time_ms"] = row.wall_time_ms
    rec.update(
        workload_hash=row.workload_hash,
        infeasible_trials=row.infeasible_trials,
        cloud_only_tasks=row.cloud_only_tasks,
    )
    return rec


def report_metadata(spec):
    return {
        "tool": "fogsched",
        "tool_version": TOOL_VERSION,
        "experiment": spec.name,
        "sweep": spec.sweep,
        "values": list(spec.values),
        "fixed_counts": {"tasks": spec.tasks, "fog": spec.fog, "cloud": spec.cloud},
        "trials": spec.trials,
        "seed": spec.seed,
        "schedulers": list(spec.schedulers),
        "raw_violation_cost": spec.raw_violation_cost,
        "genetic": asdict(spec.genetic),
        "trial_seeding": "SeedSequence([seed, trial]); instances nested across sweep values",
        **GENERATOR_INFO,
    }


def render_report(rows, fmt="csv", metadata=None, include_timing=False):
    if not rows:
        raise ValueError("no rows to report")
    metadata = metadata or {}
    cols = columns(include_timing)
    records = [row_record(r, include_timing) for r in rows]
    if fmt == "json":
        doc = {"metadata": metadata, "columns": cols, "rows": records}
        return json.dumps(doc, indent=2, allow_nan=True) + "\n"
    if fmt != "csv":
        raise ValueError(f"unknown report format {fmt!r}")
    buf = io.StringIO()
    for key, val in metadata.items():
        buf.write(f"# {key}: {json.dumps(val)}\n")
    writer = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    writer.writeheader()
    for rec in records:
        writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in rec.items()})
    return buf.getvalue()


def emit_report(rows, fmt, path, metadata=None, include_timing=False):
    """Write rows as CSV (``#``-prefixed metadata lines, then a header) or JSON."""
    text = render_report(rows, fmt, metadata, include_timing)
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise OSError(f"cannot write report to {os.fspath(path)}: {exc.strerror or exc}") from exc
    return path


def read_csv_report(path):
    """Parse a CSV report back into (metadata, records)."""
    meta, body = {}, []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if line.startswith("# "):
                key, _, val = line[2:].partition(": ")
                meta[key] = json.loads(val)
            else:
                body.append(line)
    records = list(csv.DictReader(body))
    for rec in records:
        for k, v in rec.items():
            if k.endswith(("_avg", "_min", "_max")) or k == "wall_time_ms":
                rec[k] = float(v)
            elif k in ("value", "trials", "infeasible_trials", "cloud_only_tasks"):
                rec[k] = int(v)
    return meta, records
