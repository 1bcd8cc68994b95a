"""The two deadline- and cost-aware list schedulers.

Both walk the task list once and, for each task, score every node that has
enough memory against the node's current busy time. Per task the work is a
handful of numpy operations over the m nodes, so a full run is O(n*m)
(plus O(n log n) for the deadline sort in :class:`MinV`).
"""

from __future__ import annotations

import numpy as np

from ..model import (
    Schedule,
    violation_cost,
    violation_pct,
)
from .base import BaseScheduler


def _finish(inst, assignment, busy):
    ids = inst.node_table.id.tolist()
    return Schedule(assignment=assignment, available_time_ms=dict(zip(ids, busy.tolist())))


class MinCCV(BaseScheduler):
    """Greedy: put each task, in input order, on the feasible node with the
    lowest computation + communication + violation cost."""

    name = "min-ccv"

    def __init__(self, raw_violation_cost=False):
        self.raw_violation_cost = raw_violation_cost

    def _schedule(self, inst):
        ids = inst.node_table.id.tolist()
        busy = np.zeros(inst.n_nodes)
        assignment = {}
        for i, task, exec_ms, comp_comm, unqueued in inst.cost_rows():
            resp = unqueued + busy
            viol = violation_cost(
                violation_pct(resp, task.deadline_ms),
                task.qos_pct,
                task.penalty_per_pct,
                raw=self.raw_violation_cost,
            )
            j = int(np.argmin(np.where(inst.mask[i], comp_comm + viol, np.inf)))
            assignment[task.id] = ids[j]
            busy[j] += exec_ms[j]
        return _finish(inst, assignment, busy)


class MinV(BaseScheduler):
    """Earliest-deadline-first greedy that protects deadlines before cost.

    Tasks are taken in ascending deadline order (ties by task id). Among the
    feasible nodes that would still meet the deadline, the cheapest in
    computation + communication cost wins; if none meets it, the node with
    the smallest violation cost wins.
    """

    name = "min-v"

    def __init__(self, raw_violation_cost=False):
        self.raw_violation_cost = raw_violation_cost

    def _schedule(self, inst):
        ids = inst.node_table.id.tolist()
        busy = np.zeros(inst.n_nodes)
        assignment = {}
        for i, task, exec_ms, comp_comm, unqueued in inst.cost_rows(inst.deadline_order()):
            feasible = inst.mask[i]
            resp = unqueued + busy
            satisfied = feasible & (resp <= task.deadline_ms)
            if satisfied.any():
                score = np.where(satisfied, comp_comm, np.inf)
            else:
                viol = violation_cost(
                    violation_pct(resp, task.deadline_ms),
                    task.qos_pct,
                    task.penalty_per_pct,
                    raw=self.raw_violation_cost,
                )
                score = np.where(feasible, viol, np.inf)
            j = int(np.argmin(score))
            assignment[task.id] = ids[j]
            busy[j] += exec_ms[j]
        return _finish(inst, assignment, busy)

