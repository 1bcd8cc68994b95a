"""Genetic-algorithm baseline over task-to-node assignment vectors.

A chromosome holds one gene per task, the (positional) node it runs on;
genes are only ever drawn from the task's memory-feasible nodes. Fitness is
the total cost of the schedule with queues replayed in task input order.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from ._batch import BatchEvaluator
from .base import BaseScheduler
from .baselines import make_rng


@dataclass(frozen=True)
class GeneticParams:
    population: int = 100
    generations: int = 1000
    tournament: int = 4
    crossover_rate: float = 0.8
    mutation_rate: float = 0.1
    elitism: int = 1

    def __post_init__(self):
        if self.population < 1:
            raise ValueError("population must be >= 1")
        if self.generations < 0:
            raise ValueError("generations must be >= 0")
        if self.tournament < 1:
            raise ValueError("tournament must be >= 1")
        if not (0.0 <= self.crossover_rate <= 1.0 and 0.0 <= self.mutation_rate <= 1.0):
            raise ValueError("crossover_rate and mutation_rate must lie in [0, 1]")
        if self.elitism < 0:
            raise ValueError("elitism must be >= 0")

    @classmethod
    def from_dict(cls, d):
        unknown = set(d) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown genetic parameter(s): {', '.join(sorted(unknown))}")
        return cls(**d)


class GeneticScheduler(BaseScheduler):
    name = "ga"

    def __init__(
        self,
        population=100,
        generations=1000,
        tournament=4,
        crossover_rate=0.8,
        mutation_rate=0.1,
        elitism=1,
        random_state=0,
        raw_violation_cost=False,
    ):
        self.population = population
        self.generations = generations
        self.tournament = tournament
        self.crossover_rate = crossover_rate
        self.mutation_rate = mutation_rate
        self.elitism = elitism
        self.random_state = random_state
        self.raw_violation_cost = raw_violation_cost

    @property
    def params(self):
        return GeneticParams(
            population=self.population,
            generations=self.generations,
            tournament=self.tournament,
            crossover_rate=self.crossover_rate,
            mutation_rate=self.mutation_rate,
            elitism=self.elitism,
        )

    def _schedule(self, inst):
        params = self.params
        rng = make_rng(self.random_state)
        evaluator = BatchEvaluator(inst, raw_violation_cost=self.raw_violation_cost)
        n = inst.n_tasks
        rows = np.arange(n)

        counts = inst.mask.sum(axis=1)
        table = np.zeros((n, int(counts.max())), dtype=np.int64)
        for i in range(n):
            feas = np.flatnonzero(inst.mask[i])
            table[i, : feas.size] = feas

        def random_genes(shape):
            return table[rows, rng.integers(0, counts, size=shape)]

        P = params.population
        n_elite = min(params.elitism, P)
        n_child = P - n_elite

        pop = random_genes((P, n))
        fit = evaluator.totals(pop)
        best_idx = int(np.argmin(fit))
        best, best_fit = pop[best_idx].copy(), fit[best_idx]

        for _ in range(params.generations):
            if n_child == 0:
                break
            ranked = np.argsort(fit, kind="stable")
            elite = pop[ranked[:n_elite]]

            contenders = rng.integers(0, P, size=(n_child, 2, params.tournament))
            winners = np.take_along_axis(
                contenders, np.argmin(fit[contenders], axis=2)[:, :, None], axis=2
            )[:, :, 0]
            mum, dad = pop[winners[:, 0]], pop[winners[:, 1]]

            children = mum.copy()
            if n > 1:
                crossing = rng.random(n_child) < params.crossover_rate
                cut = rng.integers(1, n, size=n_child)
                from_dad = crossing[:, None] & (rows[None, :] >= cut[:, None])
                children = np.where(from_dad, dad, mum)

            mutate = rng.random((n_child, n)) < params.mutation_rate
            children = np.where(mutate, random_genes((n_child, n)), children)

            pop = np.concatenate([elite, children])
            fit = evaluator.totals(pop)
            k = int(np.argmin(fit))
            if fit[k] < best_fit:
                best, best_fit = pop[k].copy(), fit[k]

        return inst.schedule_from_positions(best)


def genetic(tasks, nodes, params=None, seed=0, raw_violation_cost=False):
    params = params or GeneticParams()
    est = GeneticScheduler(**asdict(params), random_state=seed, raw_violation_cost=raw_violation_cost)
    return est.fit(tasks, nodes).outcome_
