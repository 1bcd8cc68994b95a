"""Random task/node populations and instance files.

Generation is driven by PCG64 (numpy's ``PCG64`` bit generator, seeded
through ``SeedSequence``). Each population is built from a matrix of
uniform doubles drawn row by row, one row per task or node, and each column
is mapped onto its attribute range:

* continuous attribute: ``low + (high - low) * u``
* integer attribute (instruction count, MIPS): ``low + floor(u * (high - low + 1))``
* task type: first index whose cumulative mix weight exceeds ``u``

Because rows are consumed in order, the first ``n`` tasks drawn for a seed
are the same whatever total is requested. Fog and cloud nodes use separate
sub-streams, so changing the fog count leaves the cloud nodes untouched
and vice versa.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, fields
from importlib import resources

import numpy as np

from .model import NODE_FIELDS, TASK_FIELDS, Node, NodeKind, Task
from .schedulers.baselines import RNG_NAME

SCHEMA_VERSION = 1
FORMAT_NAME = "fogsched-instance"


def _check_range(name, rng):
    lo, hi = rng
    if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
        raise ValueError(f"{name}: invalid range {rng!r}")
    return (lo, hi)


@dataclass(frozen=True)
class TaskType:
    size_mi: tuple = (100, 372)
    deadline_ms: tuple = (100.0, 500.0)


DEFAULT_TASK_TYPES = (
    TaskType((100, 372), (100.0, 500.0)),
    TaskType((1028, 4280), (500.0, 2500.0)),
    TaskType((5123, 9784), (2500.0, 10000.0)),
)


@dataclass(frozen=True)
class TaskDistribution:
    types: tuple = DEFAULT_TASK_TYPES
    weights: tuple = (1 / 3, 1 / 3, 1 / 3)
    mem_mb: tuple = (50.0, 200.0)
    input_mb: tuple = (0.3, 1.5)
    output_mb: tuple = (0.1, 1.0)
    qos_pct: tuple = (90.0, 99.99)
    penalty_per_pct: tuple = (0.1, 0.5)

    def __post_init__(self):
        types = tuple(t if isinstance(t, TaskType) else TaskType(**t) for t in self.types)
        object.__setattr__(self, "types", types)
        if not types or len(types) != len(self.weights):
            raise ValueError("need one mix weight per task type")
        if any(w < 0 for w in self.weights) or not math.isclose(sum(self.weights), 1.0, abs_tol=1e-9):
            raise ValueError("task-type weights must be non-negative and sum to 1")
        for k, t in enumerate(types):
            _check_range(f"types[{k}].size_mi", t.size_mi)
            _check_range(f"types[{k}].deadline_ms", t.deadline_ms)
            if math.ceil(t.size_mi[0]) > math.floor(t.size_mi[1]):
                raise ValueError(f"types[{k}].size_mi contains no integer")
        for name in ("mem_mb", "input_mb", "output_mb", "qos_pct", "penalty_per_pct"):
            object.__setattr__(self, name, _check_range(name, getattr(self, name)))


@dataclass(frozen=True)
class NodeRanges:
    cpu_mips: tuple
    cost_cpu: tuple
    cost_mem: tuple
    cost_bw: tuple
    mem_mb: tuple
    delay_ms: tuple

    def __post_init__(self):
        for f in fields(self):
            object.__setattr__(self, f.name, _check_range(f.name, getattr(self, f.name)))
        if math.ceil(self.cpu_mips[0]) > math.floor(self.cpu_mips[1]):
            raise ValueError("cpu_mips range contains no integer")


FOG_DEFAULTS = NodeRanges(
    cpu_mips=(500, 2000),
    cost_cpu=(0.2, 0.5),
    cost_mem=(0.01, 0.03),
    cost_bw=(0.01, 0.02),
    mem_mb=(150.0, 250.0),
    delay_ms=(1.0, 5.0),
)
CLOUD_DEFAULTS = NodeRanges(
    cpu_mips=(3000, 10000),
    cost_cpu=(1.0, 2.1),
    cost_mem=(0.02, 0.05),
    cost_bw=(0.05, 0.1),
    mem_mb=(256.0, 4096.0),
    delay_ms=(50.0, 250.0),
)


@dataclass(frozen=True)
class NodeDistribution:
    fog: NodeRanges = FOG_DEFAULTS
    cloud: NodeRanges = CLOUD_DEFAULTS

    def __post_init__(self):
        for kind in ("fog", "cloud"):
            v = getattr(self, kind)
            if not isinstance(v, NodeRanges):
                base = FOG_DEFAULTS if kind == "fog" else CLOUD_DEFAULTS
                object.__setattr__(self, kind, NodeRanges(**{**asdict(base), **v}))


def task_distribution_from_dict(d):
    """Overrides on top of the defaults; unknown keys are an error."""
    d = dict(d or {})
    known = {f.name for f in fields(TaskDistribution)}
    unknown = set(d) - known
    if unknown:
        raise ValueError(f"unknown task distribution key(s): {', '.join(sorted(unknown))}")
    if "types" in d:
        d["types"] = tuple(TaskType(**{k: tuple(v) for k, v in t.items()}) for t in d["types"])
    for k, v in list(d.items()):
        if k != "types":
            d[k] = tuple(v)
    return TaskDistribution(**d)


def node_distribution_from_dict(d):
    d = dict(d or {})
    unknown = set(d) - {"fog", "cloud"}
    if unknown:
        raise ValueError(f"unknown node distribution key(s): {', '.join(sorted(unknown))}")
    out = {}
    for kind, base in (("fog", FOG_DEFAULTS), ("cloud", CLOUD_DEFAULTS)):
        over = d.get(kind) or {}
        bad = set(over) - {f.name for f in fields(NodeRanges)}
        if bad:
            raise ValueError(f"unknown {kind} node key(s): {', '.join(sorted(bad))}")
        out[kind] = NodeRanges(**{**asdict(base), **{k: tuple(v) for k, v in over.items()}})
    return NodeDistribution(**out)


# -- sampling -------------------------------------------------------------------


def _stream(seed, *path):
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), *path])))


def _real(u, rng):
    lo, hi = rng
    return lo + (hi - lo) * u


def _integer(u, rng):
    lo, hi = math.ceil(rng[0]), math.floor(rng[1])
    return np.minimum(lo + np.floor(u * (hi - lo + 1)), hi).astype(np.int64)


def generate_tasks(n, dist=None, seed=0):
    """Draw ``n`` tasks with ids ``0..n-1``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    dist = dist or TaskDistribution()
    u = _stream(seed, 0).random((n, 8))
    cum = np.cumsum(dist.weights)
    kind = np.minimum(np.searchsorted(cum, u[:, 0], side="right"), len(dist.types) - 1)

    size = np.empty(n, dtype=np.int64)
    deadline = np.empty(n)
    for k, t in enumerate(dist.types):
        sel = kind == k
        size[sel] = _integer(u[sel, 1], t.size_mi)
        deadline[sel] = _real(u[sel, 2], t.deadline_ms)
    mem = _real(u[:, 3], dist.mem_mb)
    inp = _real(u[:, 4], dist.input_mb)
    out = _real(u[:, 5], dist.output_mb)
    qos = _real(u[:, 6], dist.qos_pct)
    pen = _real(u[:, 7], dist.penalty_per_pct)
    return [
        Task(
            id=i,
            size_mi=int(size[i]),
            mem_mb=float(mem[i]),
            input_mb=float(inp[i]),
            output_mb=float(out[i]),
            deadline_ms=float(deadline[i]),
            qos_pct=float(qos[i]),
            penalty_per_pct=float(pen[i]),
        )
        for i in range(n)
    ]


def _draw_nodes(count, ranges, seed, stream_id):
    u = _stream(seed, stream_id).random((count, 6))
    return {
        "cpu_mips": _integer(u[:, 0], ranges.cpu_mips),
        "cost_cpu": _real(u[:, 1], ranges.cost_cpu),
        "cost_mem": _real(u[:, 2], ranges.cost_mem),
        "cost_bw": _real(u[:, 3], ranges.cost_bw),
        "mem_mb": _real(u[:, 4], ranges.mem_mb),
        "delay_ms": _real(u[:, 5], ranges.delay_ms),
    }


def generate_nodes(f, c, dist=None, seed=0):
    """``f`` fog nodes (ids ``0..f-1``) followed by ``c`` cloud nodes."""
    if f < 0 or c < 0 or f + c < 1:
        raise ValueError("need f >= 0, c >= 0 and f + c >= 1")
    dist = dist or NodeDistribution()
    nodes = []
    for kind, count, ranges, sid in ((NodeKind.FOG, f, dist.fog, 1), (NodeKind.CLOUD, c, dist.cloud, 2)):
        if count == 0:
            continue
        cols = _draw_nodes(count, ranges, seed, sid)
        for k in range(count):
            nodes.append(
                Node(
                    id=len(nodes),
                    kind=kind,
                    cpu_mips=int(cols["cpu_mips"][k]),
                    cost_cpu=float(cols["cost_cpu"][k]),
                    cost_mem=float(cols["cost_mem"][k]),
                    cost_bw=float(cols["cost_bw"][k]),
                    mem_mb=float(cols["mem_mb"][k]),
                    delay_ms=float(cols["delay_ms"][k]),
                )
            )
    return nodes


def derive_seeds(master_seed, trial):
    """Per-trial seeds: ``SeedSequence([master_seed, trial])`` expanded to four
    31-bit integers (tasks, nodes, random scheduler, genetic scheduler)."""
    state = np.random.SeedSequence([int(master_seed), int(trial)]).generate_state(4, dtype=np.uint32)
    tasks, nodes, rand, ga = (int(s) >> 1 for s in state)
    return {"tasks": tasks, "nodes": nodes, "random": rand, "ga": ga}


# -- instance files ---------------------------------------------------------------


class InstanceFormatError(ValueError):
    """Malformed instance file; ``where`` names the line or field at fault."""

    def __init__(self, message, where=None):
        super().__init__(f"{where}: {message}" if where else message)
        self.where = where


class SchemaVersionError(InstanceFormatError):
    pass


def _task_dict(t):
    return {name: getattr(t, name) for name in TASK_FIELDS}


def _node_dict(n):
    d = {name: getattr(n, name) for name in NODE_FIELDS}
    d["kind"] = n.kind.value
    return d


def instance_to_dict(tasks, nodes):
    return {
        "format": FORMAT_NAME,
        "schema_version": SCHEMA_VERSION,
        "tasks": [_task_dict(t) for t in tasks],
        "nodes": [_node_dict(n) for n in nodes],
    }


def instance_digest(tasks, nodes):
    """sha256 of the canonical JSON encoding, for tagging shared workloads."""
    blob = json.dumps(instance_to_dict(tasks, nodes), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def _build(cls, names, rows, label):
    if not isinstance(rows, list):
        raise InstanceFormatError("expected a list", label)
    out = []
    for k, row in enumerate(rows):
        where = f"{label}[{k}]"
        if not isinstance(row, dict):
            raise InstanceFormatError("expected an object", where)
        missing = [n for n in names if n not in row]
        if missing:
            raise InstanceFormatError(f"missing field '{missing[0]}'", where)
        extra = sorted(set(row) - set(names))
        if extra:
            raise InstanceFormatError(f"unknown field '{extra[0]}'", where)
        for n in names:
            v = row[n]
            if n == "kind":
                continue
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise InstanceFormatError(f"field '{n}' must be a number", where)
        if not isinstance(row["id"], int):
            raise InstanceFormatError("field 'id' must be an integer", where)
        try:
            out.append(cls(**row))
        except ValueError as exc:
            raise InstanceFormatError(str(exc), where) from None
    return out


def instance_from_dict(doc):
    if not isinstance(doc, dict):
        raise InstanceFormatError("top level must be an object")
    version = doc.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaVersionError(f"schema_version {version!r} not supported (expected {SCHEMA_VERSION})")
    tasks = _build(Task, TASK_FIELDS, doc.get("tasks"), "tasks")
    nodes = _build(Node, NODE_FIELDS, doc.get("nodes"), "nodes")
    if not tasks:
        raise InstanceFormatError("task list is empty", "tasks")
    if not nodes:
        raise InstanceFormatError("node list is empty", "nodes")
    for label, items in (("tasks", tasks), ("nodes", nodes)):
        seen = set()
        for x in items:
            if x.id in seen:
                raise InstanceFormatError(f"duplicate id {x.id}", label)
            seen.add(x.id)
    return tasks, nodes


def loads_instance(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceFormatError(exc.msg, f"line {exc.lineno} column {exc.colno}") from None
    return instance_from_dict(doc)


def load_instance(path):
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    try:
        return loads_instance(text)
    except InstanceFormatError as exc:
        raise InstanceFormatError(str(exc), str(path)) from None


def dumps_instance(tasks, nodes):
    return json.dumps(instance_to_dict(tasks, nodes), indent=2) + "\n"


def save_instance(path, tasks, nodes):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps_instance(tasks, nodes))


def load_toy_instance():
    """The 10-task, 3-node worked example (2 fog nodes, 1 cloud node)."""
    text = resources.files("fogsched.data").joinpath("toy_tables_3_4.json").read_text(encoding="utf-8")
    return loads_instance(text)


GENERATOR_INFO = {"generator": RNG_NAME, "seeding": "numpy.random.SeedSequence"}
