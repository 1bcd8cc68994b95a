"""Domain types and the cost/timing model for fog-cloud task allocation.

Every formula below is written against attribute access only, so the same
function evaluates a single (task, node) pair or broadcasts over numpy
columns (see :class:`NodeTable` and :class:`TaskTable`). Schedulers use the
vectorised form while scoring candidate nodes; :func:`evaluate_schedule` uses
it over whole schedules. Sharing one code path keeps selection and scoring
bit-identical.

Units: sizes in MI, rates in MIPS, times in ms, data in MB, money in G$.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, fields
from operator import attrgetter

import numpy as np


class ConstraintViolationError(ValueError):
    """A schedule breaks the memory or one-node-per-task constraint."""

    def __init__(self, message, task_id=None, node_id=None):
        super().__init__(message)
        self.task_id = task_id
        self.node_id = node_id


class InfeasibleTaskError(ValueError):
    """No node has enough memory for a task."""

    def __init__(self, task_id, mem_mb):
        super().__init__(f"task {task_id} needs {mem_mb} MB but no node has that much memory")
        self.task_id = task_id


class NodeKind(str, enum.Enum):
    FOG = "fog"
    CLOUD = "cloud"


def _require(cond, what):
    if not cond:
        raise ValueError(what)


@dataclass(frozen=True)
class Task:
    id: int
    size_mi: float
    mem_mb: float
    input_mb: float
    output_mb: float
    deadline_ms: float
    qos_pct: float
    penalty_per_pct: float

    def __post_init__(self):
        _require(self.size_mi > 0, f"task {self.id}: size_mi must be > 0")
        _require(self.mem_mb > 0, f"task {self.id}: mem_mb must be > 0")
        _require(self.input_mb >= 0, f"task {self.id}: input_mb must be >= 0")
        _require(self.output_mb >= 0, f"task {self.id}: output_mb must be >= 0")
        _require(self.deadline_ms > 0, f"task {self.id}: deadline_ms must be > 0")
        _require(0 < self.qos_pct <= 100, f"task {self.id}: qos_pct must be in (0, 100]")
        _require(self.penalty_per_pct >= 0, f"task {self.id}: penalty_per_pct must be >= 0")

    @property
    def data_mb(self):
        """Bandwidth demand: input plus output file size."""
        return self.input_mb + self.output_mb


@dataclass(frozen=True)
class Node:
    id: int
    kind: NodeKind
    cpu_mips: float
    cost_cpu: float
    cost_mem: float
    cost_bw: float
    mem_mb: float
    delay_ms: float

    def __post_init__(self):
        object.__setattr__(self, "kind", NodeKind(self.kind))
        _require(self.cpu_mips > 0, f"node {self.id}: cpu_mips must be > 0")
        _require(
            min(self.cost_cpu, self.cost_mem, self.cost_bw) >= 0,
            f"node {self.id}: unit costs must be >= 0",
        )
        _require(self.mem_mb > 0, f"node {self.id}: mem_mb must be > 0")
        _require(self.delay_ms >= 0, f"node {self.id}: delay_ms must be >= 0")


TASK_FIELDS = tuple(f.name for f in fields(Task))
NODE_FIELDS = tuple(f.name for f in fields(Node))


@dataclass(frozen=True)
class TaskTable:
    """Column view of a task list; one numpy array per :class:`Task` field."""

    id: np.ndarray
    size_mi: np.ndarray
    mem_mb: np.ndarray
    input_mb: np.ndarray
    output_mb: np.ndarray
    deadline_ms: np.ndarray
    qos_pct: np.ndarray
    penalty_per_pct: np.ndarray

    @classmethod
    def from_tasks(cls, tasks):
        rows = np.array(list(map(attrgetter(*TASK_FIELDS), tasks)), dtype=float).reshape(-1, len(TASK_FIELDS))
        cols = dict(zip(TASK_FIELDS, rows.T.copy()))
        cols["id"] = cols["id"].astype(np.int64)
        return cls(**cols)

    @property
    def data_mb(self):
        return self.input_mb + self.output_mb

    def __len__(self):
        return len(self.id)


@dataclass(frozen=True)
class NodeTable:
    """Column view of a node list, with the same attribute names as :class:`Node`."""

    id: np.ndarray
    is_cloud: np.ndarray
    cpu_mips: np.ndarray
    cost_cpu: np.ndarray
    cost_mem: np.ndarray
    cost_bw: np.ndarray
    mem_mb: np.ndarray
    delay_ms: np.ndarray

    @classmethod
    def from_nodes(cls, nodes):
        names = [name for name in NODE_FIELDS if name != "kind"]
        rows = np.array(list(map(attrgetter(*names), nodes)), dtype=float).reshape(-1, len(names))
        cols = dict(zip(names, rows.T.copy()))
        cols["id"] = cols["id"].astype(np.int64)
        cols["is_cloud"] = np.array([n.kind is NodeKind.CLOUD for n in nodes], dtype=bool)
        return cls(**cols)

    def take(self, idx):
        """Gather node rows by positional index (e.g. one row per task)."""
        return NodeTable(**{f.name: getattr(self, f.name)[idx] for f in fields(self)})

    def __len__(self):
        return len(self.id)


# -- cost and timing model ---------------------------------------------------


def execution_time(task, node):
    """Execution time in ms: instructions over processing rate, times 1000."""
    return task.size_mi / node.cpu_mips * 1000.0


def computation_cost(task, node):
    # cost_cpu is per second, execution time is kept in ms
    return node.cost_cpu * (execution_time(task, node) / 1000.0) + node.cost_mem * task.mem_mb


def communication_cost(task, node):
    return node.cost_bw * (task.input_mb + task.output_mb)


def response_time(task, node, waiting_ms):
    """Round-trip delay to the node, plus queueing, plus execution (ms)."""
    return 2.0 * node.delay_ms + execution_time(task, node) + waiting_ms


def violation_pct(response_ms, deadline_ms):
    """Lateness as a percentage of the deadline; zero when on time."""
    return np.maximum(0.0, response_ms - deadline_ms) / deadline_ms * 100.0


def violation_cost(v_pct, qos_pct, penalty_per_pct, raw=False):
    """Penalty for lateness beyond the tolerated ``100 - qos_pct`` percent.

    The linear penalty goes negative when a task is late by less than its
    tolerance (or not late at all). By default it is clamped at zero; pass
    ``raw=True`` for the unclamped value.
    """
    cost = (v_pct - (100.0 - qos_pct)) * penalty_per_pct
    if raw:
        return cost
    return np.maximum(0.0, cost)


def task_violation_cost(task, node, waiting_ms, raw=False):
    resp = response_time(task, node, waiting_ms)
    return violation_cost(violation_pct(resp, task.deadline_ms), task.qos_pct, task.penalty_per_pct, raw=raw)


# -- schedules and reports ---------------------------------------------------


@dataclass(frozen=True)
class Schedule:
    """Task-to-node allocation.

    ``assignment`` maps task id to node id and iterates in allocation order;
    that order is the FIFO order in which each node's queue is replayed.
    ``available_time_ms`` is each node's accumulated busy time.
    """

    assignment: dict
    available_time_ms: dict = field(default_factory=dict)

    @property
    def order(self):
        return list(self.assignment)


@dataclass(frozen=True)
class TaskCost:
    task_id: int
    node_id: int
    waiting_ms: float
    response_ms: float
    violation_pct: float
    c_comp: float
    c_comm: float
    c_viol: float

    @property
    def total(self):
        return self.c_comp + self.c_comm + self.c_viol


@dataclass(frozen=True)
class CostReport:
    per_task: list
    total_comp: float
    total_comm: float
    total_viol: float
    total: float
    pdst_pct: float
    makespan_ms: float
    n_violated: int

    def summary(self):
        return {
            "pdst": self.pdst_pct,
            "makespan": self.makespan_ms,
            "c_viol": self.total_viol,
            "c_comp": self.total_comp,
            "c_comm": self.total_comm,
            "total": self.total,
        }


def check_schedule(tasks, nodes, schedule):
    """Raise :class:`ConstraintViolationError` unless every task sits on exactly
    one existing node with enough memory."""
    node_by_id = {n.id: n for n in nodes}
    task_ids = [t.id for t in tasks]
    assigned = set(schedule.assignment)
    missing = [tid for tid in task_ids if tid not in assigned]
    if missing:
        raise ConstraintViolationError(f"task {missing[0]} is not assigned to any node", task_id=missing[0])
    extra = assigned.difference(task_ids)
    if extra:
        tid = min(extra)
        raise ConstraintViolationError(f"schedule assigns unknown task {tid}", task_id=tid)
    for t in tasks:
        nid = schedule.assignment[t.id]
        node = node_by_id.get(nid)
        if node is None:
            raise ConstraintViolationError(f"task {t.id} assigned to unknown node {nid}", t.id, nid)
        if t.mem_mb > node.mem_mb:
            raise ConstraintViolationError(
                f"task {t.id} needs {t.mem_mb} MB but node {nid} has {node.mem_mb} MB", t.id, nid
            )


def evaluate_schedule(tasks, nodes, schedule, raw_violation_cost=False):
    """Score a schedule: per-task costs, totals, PDST and makespan.

    Waiting times are recomputed by replaying each node's queue in the
    schedule's allocation order, so the result does not depend on any
    bookkeeping the scheduler did.
    """
    check_schedule(tasks, nodes, schedule)
    task_by_id = {t.id: t for t in tasks}
    node_pos = {n.id: k for k, n in enumerate(nodes)}
    node_table = NodeTable.from_nodes(nodes)

    ordered = [task_by_id[tid] for tid in schedule.assignment]
    ttab = TaskTable.from_tasks(ordered)
    npos = np.array([node_pos[schedule.assignment[t.id]] for t in ordered], dtype=np.int64)
    per_node = node_table.take(npos)

    exec_ms = execution_time(ttab, per_node)
    busy = [0.0] * len(nodes)
    waiting = np.empty(len(ordered))
    for k, (j, e) in enumerate(zip(npos.tolist(), exec_ms.tolist())):
        waiting[k] = busy[j]
        busy[j] += e

    resp = response_time(ttab, per_node, waiting)
    v = violation_pct(resp, ttab.deadline_ms)
    c_comp = computation_cost(ttab, per_node)
    c_comm = communication_cost(ttab, per_node)
    c_viol = violation_cost(v, ttab.qos_pct, ttab.penalty_per_pct, raw=raw_violation_cost)
    on_time = resp <= ttab.deadline_ms

    # per-task rows in task input order
    rank = {tid: k for k, tid in enumerate(schedule.assignment)}
    back = np.array([rank[t.id] for t in tasks], dtype=np.int64)
    columns = zip(
        [t.id for t in tasks],
        [schedule.assignment[t.id] for t in tasks],
        *(a[back].tolist() for a in (waiting, resp, v, c_comp, c_comm, c_viol)),
    )
    per_task = [TaskCost(*row) for row in columns]

    total_comp = float(np.sum(c_comp))
    total_comm = float(np.sum(c_comm))
    total_viol = float(np.sum(c_viol))
    n = len(tasks)
    n_on_time = int(np.count_nonzero(on_time))
    return CostReport(
        per_task=per_task,
        total_comp=total_comp,
        total_comm=total_comm,
        total_viol=total_viol,
        total=total_comp + total_comm + total_viol,
        pdst_pct=100.0 * n_on_time / n if n else 100.0,
        makespan_ms=max(busy) if busy else 0.0,
        n_violated=n - n_on_time,
    )
