"""Input checking shared by schedulers, in the spirit of sklearn's ``check_array``."""

from __future__ import annotations

from collections.abc import Mapping

import numpy as np

from .model import InfeasibleTaskError, Node, Task


def _coerce(items, cls, what):
    out = []
    for k, item in enumerate(items):
        if isinstance(item, cls):
            out.append(item)
        elif isinstance(item, Mapping):
            try:
                out.append(cls(**item))
            except TypeError as exc:
                raise ValueError(f"{what}[{k}]: {exc}") from None
        else:
            raise TypeError(f"{what}[{k}] must be a {cls.__name__} or a mapping, got {type(item).__name__}")
    return out


def _check_unique(ids, what):
    seen = set()
    for i in ids:
        if i in seen:
            raise ValueError(f"duplicate {what} id {i}")
        seen.add(i)


def check_tasks(tasks):
    """Return ``tasks`` as a list of :class:`Task`, rejecting empty input and duplicate ids."""
    tasks = _coerce(tasks, Task, "tasks")
    if not tasks:
        raise ValueError("task list is empty")
    _check_unique((t.id for t in tasks), "task")
    return tasks


def check_nodes(nodes):
    nodes = _coerce(nodes, Node, "nodes")
    if not nodes:
        raise ValueError("node list is empty")
    _check_unique((n.id for n in nodes), "node")
    return nodes


def check_instance(tasks, nodes):
    """Validate an instance and return ``(tasks, nodes)``.

    Nodes come back sorted by id so that positional ``argmin`` breaks ties
    toward the lowest node id. Tasks keep their input order.
    """
    tasks = check_tasks(tasks)
    nodes = sorted(check_nodes(nodes), key=lambda n: n.id)
    return tasks, nodes


def feasibility_mask(task_table, node_table):
    """Boolean (n, m) matrix: task i fits in node j's memory."""
    return task_table.mem_mb[:, None] <= node_table.mem_mb[None, :]


def check_feasible(tasks, mask):
    """Raise :class:`InfeasibleTaskError` for the first task with no feasible node."""
    bad = np.flatnonzero(~mask.any(axis=1))
    if bad.size:
        t = tasks[int(bad[0])]
        raise InfeasibleTaskError(t.id, t.mem_mb)
