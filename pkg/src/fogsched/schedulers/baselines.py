from __future__ import annotations

import numpy as np

from ..model import execution_time
from .base import BaseScheduler

RNG_NAME = "numpy.random.PCG64"


def make_rng(seed):
    """The one generator used everywhere randomness is needed."""
    return np.random.Generator(np.random.PCG64(seed))


class RoundRobin(BaseScheduler):
    """Rotate through nodes, taking the next one that fits the task in memory
    and can execute it within its deadline.

    If no node in a full cycle passes the deadline test, the next node that
    merely fits in memory is used, so no task is ever dropped. The cursor
    resumes after whichever node was chosen.
    """

    name = "rr"

    def __init__(self, raw_violation_cost=False):
        self.raw_violation_cost = raw_violation_cost

    def _schedule(self, inst):
        nt = inst.node_table
        m = inst.n_nodes
        pos = np.empty(inst.n_tasks, dtype=np.int64)
        cursor = 0
        for i, task in enumerate(inst.tasks):
            feasible = inst.mask[i]
            fast_enough = feasible & (execution_time(task, nt) < task.deadline_ms)
            ring = (cursor + np.arange(m)) % m
            hits = ring[fast_enough[ring]]
            if hits.size == 0:
                hits = ring[feasible[ring]]
            j = int(hits[0])
            pos[i] = j
            cursor = (j + 1) % m
        return inst.schedule_from_positions(pos)


class RandomScheduler(BaseScheduler):
    """Uniformly random feasible node per task, from a seeded PCG64 stream."""

    name = "random"

    def __init__(self, random_state=0, raw_violation_cost=False):
        self.random_state = random_state
        self.raw_violation_cost = raw_violation_cost

    def _schedule(self, inst):
        rng = make_rng(self.random_state)
        counts = inst.mask.sum(axis=1)
        draws = rng.integers(0, counts)
        # k-th feasible node of each row
        ranks = np.cumsum(inst.mask, axis=1) - 1
        pos = np.argmax(inst.mask & (ranks == draws[:, None]), axis=1)
        return inst.schedule_from_positions(pos)
