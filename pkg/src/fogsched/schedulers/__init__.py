"""Schedulers behind one estimator interface, selectable by name."""

from __future__ import annotations

from .base import BaseScheduler, Instance, SchedulerOutcome
from .baselines import RNG_NAME, RandomScheduler, RoundRobin, make_rng
from .exact import DEFAULT_BUDGET, BudgetExceededError, ExactScheduler, search_space_size
from .genetic import GeneticParams, GeneticScheduler, genetic
from .greedy import MinCCV, MinV

SCHEDULERS = {
    "min-ccv": MinCCV,
    "min-v": MinV,
    "rr": RoundRobin,
    "random": RandomScheduler,
    "ga": GeneticScheduler,
    "exact": ExactScheduler,
}


class UnknownSchedulerError(ValueError):
    def __init__(self, name):
        super().__init__(f"unknown scheduler {name!r}; valid names: {', '.join(SCHEDULERS)}")
        self.name = name


def make_scheduler(name, **params):
    """Instantiate a scheduler by name, ignoring parameters it does not take.

    Lets callers pass one bag of settings (seed, policy flags, GA params) to
    every scheduler in a sweep.
    """
    try:
        cls = SCHEDULERS[name]
    except KeyError:
        raise UnknownSchedulerError(name) from None
    accepted = cls._get_param_names()
    return cls(**{k: v for k, v in params.items() if k in accepted})


def min_ccv(tasks, nodes, raw_violation_cost=False):
    return MinCCV(raw_violation_cost=raw_violation_cost).fit(tasks, nodes).outcome_


def min_v(tasks, nodes, raw_violation_cost=False):
    return MinV(raw_violation_cost=raw_violation_cost).fit(tasks, nodes).outcome_


def round_robin(tasks, nodes, raw_violation_cost=False):
    return RoundRobin(raw_violation_cost=raw_violation_cost).fit(tasks, nodes).outcome_


def random_scheduler(tasks, nodes, seed=0, raw_violation_cost=False):
    return RandomScheduler(random_state=seed, raw_violation_cost=raw_violation_cost).fit(tasks, nodes).outcome_


def exact(tasks, nodes, budget=DEFAULT_BUDGET, raw_violation_cost=False):
    return ExactScheduler(budget=budget, raw_violation_cost=raw_violation_cost).fit(tasks, nodes).outcome_


__all__ = [
    "SCHEDULERS",
    "RNG_NAME",
    "BaseScheduler",
    "BudgetExceededError",
    "ExactScheduler",
    "GeneticParams",
    "GeneticScheduler",
    "Instance",
    "MinCCV",
    "MinV",
    "RandomScheduler",
    "RoundRobin",
    "SchedulerOutcome",
    "UnknownSchedulerError",
    "exact",
    "genetic",
    "make_rng",
    "make_scheduler",
    "min_ccv",
    "min_v",
    "random_scheduler",
    "round_robin",
    "search_space_size",
]
