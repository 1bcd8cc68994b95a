from __future__ import annotations

import time
from dataclasses import dataclass, fields

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from ..model import (
    CostReport,
    NodeTable,
    Schedule,
    TaskTable,
    communication_cost,
    computation_cost,
    evaluate_schedule,
    execution_time,
    response_time,
)
from ..validation import check_feasible, check_instance, feasibility_mask


@dataclass(frozen=True)
class SchedulerOutcome:
    schedule: Schedule
    report: CostReport
    wall_time_ms: float


class Instance:
    """Validated tasks and nodes plus their column tables and memory mask."""

    def __init__(self, tasks, nodes):
        self.tasks, self.nodes = check_instance(tasks, nodes)
        self.task_table = TaskTable.from_tasks(self.tasks)
        self.node_table = NodeTable.from_nodes(self.nodes)
        self.mask = feasibility_mask(self.task_table, self.node_table)
        check_feasible(self.tasks, self.mask)

    @property
    def n_tasks(self):
        return len(self.tasks)

    @property
    def n_nodes(self):
        return len(self.nodes)

    def task_columns(self):
        """Task table reshaped to (n, 1) so formulas broadcast against nodes to (n, m)."""
        tt = self.task_table
        return TaskTable(**{f.name: getattr(tt, f.name)[:, None] for f in fields(tt)})

    def cost_rows(self, order=None, block=4096):
        """Yield ``(i, task, exec_ms, comp_comm, unqueued_response)`` per task,
        the last three as length-m rows, computed in vectorised blocks.

        ``unqueued_response + waiting`` equals ``response_time(task, node,
        waiting)`` bit for bit, since the formula adds waiting last.
        """
        order = np.arange(self.n_tasks) if order is None else np.asarray(order)
        cols = self.task_columns()
        nt = self.node_table
        for start in range(0, len(order), block):
            idx = order[start : start + block]
            tb = TaskTable(**{f.name: getattr(cols, f.name)[idx] for f in fields(cols)})
            exec_ms = execution_time(tb, nt)
            cc = computation_cost(tb, nt) + communication_cost(tb, nt)
            base = response_time(tb, nt, 0.0)
            for k, i in enumerate(idx.tolist()):
                yield i, self.tasks[i], exec_ms[k], cc[k], base[k]

    def deadline_order(self):
        """Task positions sorted by (deadline, id)."""
        tt = self.task_table
        return np.lexsort((tt.id, tt.deadline_ms))

    def schedule_from_positions(self, node_pos, order=None):
        """Build a :class:`Schedule` from one positional node index per task."""
        if order is None:
            order = range(self.n_tasks)
        node_ids = self.node_table.id
        exec_ms = self.task_table.size_mi / self.node_table.cpu_mips[node_pos] * 1000.0
        busy = {int(nid): 0.0 for nid in node_ids}
        assignment = {}
        for i in order:
            nid = int(node_ids[node_pos[i]])
            assignment[self.tasks[i].id] = nid
            busy[nid] += float(exec_ms[i])
        return Schedule(assignment=assignment, available_time_ms=busy)


class BaseScheduler(BaseEstimator):
    """Common ``fit`` driver.

    Subclasses implement ``_schedule(instance) -> Schedule``. After ``fit``
    the estimator exposes ``schedule_``, ``report_``, ``wall_time_ms_`` and
    ``assignment_`` (node id per task, in task input order).
    """

    name = None

    def fit(self, tasks, nodes):
        inst = Instance(tasks, nodes)
        start = time.perf_counter()
        schedule = self._schedule(inst)
        self.wall_time_ms_ = (time.perf_counter() - start) * 1000.0
        self.schedule_ = schedule
        self.report_ = evaluate_schedule(
            inst.tasks, inst.nodes, schedule, raw_violation_cost=self.raw_violation_cost
        )
        self.assignment_ = np.array([schedule.assignment[t.id] for t in inst.tasks], dtype=np.int64)
        self.n_tasks_in_ = inst.n_tasks
        self.n_nodes_in_ = inst.n_nodes
        return self

    def fit_predict(self, tasks, nodes):
        return self.fit(tasks, nodes).assignment_

    @property
    def outcome_(self):
        check_is_fitted(self, "schedule_")
        return SchedulerOutcome(self.schedule_, self.report_, self.wall_time_ms_)

    def _schedule(self, inst):
        raise NotImplementedError
