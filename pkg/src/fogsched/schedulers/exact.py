"""Brute-force optimum for small instances, used as an oracle.

Evaluation replays node queues in allocation order, so the cost of an
assignment depends on the dispatch order as well. The solver enumerates every
memory-feasible assignment under each dispatch order in ``dispatch_orders``:
``"input"`` (the order the tasks were given, used by Min-CCV, RR, Random and
the GA) and ``"deadline"`` (earliest deadline first, used by Min-V).
"""

from __future__ import annotations

import numpy as np

from ..model import evaluate_schedule
from ._batch import BatchEvaluator
from .base import BaseScheduler

DEFAULT_BUDGET = 10**7
_CHUNK = 1 << 15
# candidates whose batch total is this close to the best are re-scored exactly
_RESCORE_RTOL = 1e-9


def _cutoff(best):
    return best + abs(best) * _RESCORE_RTOL + 1e-12


class BudgetExceededError(ValueError):
    def __init__(self, states, budget):
        super().__init__(f"exhaustive search needs {states} states, over the budget of {budget}")
        self.states = states
        self.budget = budget


def search_space_size(n_tasks, n_nodes):
    return n_nodes**n_tasks


def _decode(codes, radices, choices):
    """Mixed-radix decode of enumeration codes into positional node indices.

    Task 0 is the most significant digit, so increasing codes walk the
    assignments in lexicographic order of node position (= node id order).
    """
    n = len(radices)
    out = np.empty((codes.size, n), dtype=np.int64)
    rest = codes.copy()
    for i in range(n - 1, -1, -1):
        digit = rest % radices[i]
        rest //= radices[i]
        out[:, i] = choices[i][digit]
    return out


class ExactScheduler(BaseScheduler):
    name = "exact"

    def __init__(self, budget=DEFAULT_BUDGET, dispatch_orders=("input", "deadline"), raw_violation_cost=False):
        self.budget = budget
        self.dispatch_orders = dispatch_orders
        self.raw_violation_cost = raw_violation_cost

    def _orders(self, inst):
        out = []
        for name in self.dispatch_orders:
            if name == "input":
                out.append(np.arange(inst.n_tasks))
            elif name == "deadline":
                out.append(inst.deadline_order())
            else:
                raise ValueError(f"unknown dispatch order {name!r}")
        return out

    def _schedule(self, inst):
        states = search_space_size(inst.n_tasks, inst.n_nodes)
        if states > self.budget:
            raise BudgetExceededError(states, self.budget)

        choices = [np.flatnonzero(row) for row in inst.mask]
        radices = np.array([c.size for c in choices], dtype=np.int64)
        total_states = int(np.prod(radices))

        candidates = []
        for k, order in enumerate(self._orders(inst)):
            evaluator = BatchEvaluator(inst, order=order, raw_violation_cost=self.raw_violation_cost)
            for start in range(0, total_states, _CHUNK):
                codes = np.arange(start, min(start + _CHUNK, total_states), dtype=np.int64)
                pop = _decode(codes, radices, choices)
                totals = evaluator.totals(pop)
                keep = np.flatnonzero(totals <= _cutoff(totals.min()))
                candidates.extend((float(totals[q]), k, pop[q]) for q in keep)
                # drop anything that can no longer win
                limit = _cutoff(min(c[0] for c in candidates))
                candidates = [c for c in candidates if c[0] <= limit]

        orders = self._orders(inst)
        node_ids = inst.node_table.id
        best_key, best_schedule = None, None
        for _, k, pos in candidates:
            schedule = inst.schedule_from_positions(pos, order=orders[k].tolist())
            total = evaluate_schedule(
                inst.tasks, inst.nodes, schedule, raw_violation_cost=self.raw_violation_cost
            ).total
            key = (total, tuple(node_ids[pos].tolist()), k)
            if best_key is None or key < best_key:
                best_key, best_schedule = key, schedule
        return best_schedule
