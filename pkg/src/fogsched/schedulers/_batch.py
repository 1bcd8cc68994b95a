from __future__ import annotations

import numpy as np

from ..model import (
    TaskTable,
    communication_cost,
    computation_cost,
    response_time,
    violation_cost,
    violation_pct,
)


class BatchEvaluator:
    """Total cost of many assignment vectors at once.

    Rows of ``pop`` hold a positional node index per task (task input order).
    Queues are replayed in ``order``. The arithmetic mirrors
    :func:`fogsched.model.evaluate_schedule` term for term; only the final
    summation may differ in the last ulp.
    """

    def __init__(self, inst, order=None, raw_violation_cost=False):
        n = inst.n_tasks
        self.order = np.arange(n) if order is None else np.asarray(order)
        tt = inst.task_table
        self.tasks = TaskTable(**{k: v[self.order] for k, v in vars(tt).items()})
        self.nodes = inst.node_table
        self.m = inst.n_nodes
        self.raw = raw_violation_cost

    def totals(self, pop):
        pop = np.asarray(pop)[:, self.order]
        P, n = pop.shape
        nodes = self.nodes.take(pop)
        tasks = self.tasks
        exec_ms = tasks.size_mi / nodes.cpu_mips * 1000.0

        onehot = pop[:, :, None] == np.arange(self.m)
        contrib = np.where(onehot, exec_ms[:, :, None], 0.0)
        busy_after = np.cumsum(contrib, axis=1)
        busy_before = np.concatenate([np.zeros((P, 1, self.m)), busy_after[:, :-1]], axis=1)
        waiting = np.where(onehot, busy_before, 0.0).sum(axis=2)

        resp = response_time(tasks, nodes, waiting)
        c_viol = violation_cost(
            violation_pct(resp, tasks.deadline_ms), tasks.qos_pct, tasks.penalty_per_pct, raw=self.raw
        )
        c_comp = computation_cost(tasks, nodes)
        c_comm = communication_cost(tasks, nodes)
        return c_comp.sum(axis=1) + c_comm.sum(axis=1) + c_viol.sum(axis=1)
