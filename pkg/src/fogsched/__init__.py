"""Cost- and deadline-aware task scheduling for volunteer fog-cloud systems."""

from .model import (
    ConstraintViolationError,
    CostReport,
    InfeasibleTaskError,
    Node,
    NodeKind,
    Schedule,
    Task,
    TaskCost,
    communication_cost,
    computation_cost,
    evaluate_schedule,
    execution_time,
    response_time,
    violation_cost,
    violation_pct,
)
from .schedulers import (
    SCHEDULERS,
    BudgetExceededError,
    ExactScheduler,
    GeneticParams,
    GeneticScheduler,
    MinCCV,
    MinV,
    RandomScheduler,
    RoundRobin,
    SchedulerOutcome,
    exact,
    genetic,
    make_scheduler,
    min_ccv,
    min_v,
    random_scheduler,
    round_robin,
)
from .workload import (
    NodeDistribution,
    TaskDistribution,
    generate_nodes,
    generate_tasks,
    load_instance,
    load_toy_instance,
    save_instance,
)

__version__ = "0.1.0"
