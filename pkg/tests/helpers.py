"""Shared test utilities: fuzzed instances and an independent cost oracle.

The oracle re-derives every quantity from raw task/node attributes in plain
Python, without touching fogsched's formula functions, so it can catch
mistakes the shared vectorised code path would hide.
"""

from __future__ import annotations

import itertools

import numpy as np

from fogsched import Node, Task


def fuzz_instance(seed, n_range=(1, 6), m_range=(2, 3), tight=False):
    """Small random instance with at least one fog and one cloud node.

    Values are drawn directly here (not through fogsched.workload) so the
    fuzz corpus does not share code with the generator under test.
    """
    rng = np.random.default_rng(seed)
    n = int(rng.integers(n_range[0], n_range[1] + 1))
    m = int(rng.integers(m_range[0], m_range[1] + 1))
    f = int(rng.integers(1, m))
    nodes = []
    for j in range(m):
        fog = j < f
        nodes.append(
            Node(
                id=j + 1,
                kind="fog" if fog else "cloud",
                cpu_mips=float(rng.uniform(500, 2000) if fog else rng.uniform(3000, 10000)),
                cost_cpu=float(rng.uniform(0.2, 0.5) if fog else rng.uniform(1.0, 2.1)),
                cost_mem=float(rng.uniform(0.01, 0.03) if fog else rng.uniform(0.02, 0.05)),
                cost_bw=float(rng.uniform(0.01, 0.02) if fog else rng.uniform(0.05, 0.1)),
                mem_mb=float(rng.uniform(150, 250) if fog else rng.uniform(256, 4096)),
                delay_ms=float(rng.uniform(1, 5) if fog else rng.uniform(50, 250)),
            )
        )
    hi_deadline = 2000 if tight else 10000
    tasks = [
        Task(
            id=i + 1,
            size_mi=float(rng.uniform(100, 9784)),
            mem_mb=float(rng.uniform(50, 200)),
            input_mb=float(rng.uniform(0.3, 1.5)),
            output_mb=float(rng.uniform(0.1, 1.0)),
            deadline_ms=float(rng.uniform(100, hi_deadline)),
            qos_pct=float(rng.uniform(90, 99.99)),
            penalty_per_pct=float(rng.uniform(0.1, 0.5)),
        )
        for i in range(n)
    ]
    return tasks, nodes


def oracle_evaluate(tasks, nodes, assignment, raw=False):
    """Plain-Python scoring of an allocation-ordered ``{task_id: node_id}`` map."""
    task_by_id = {t.id: t for t in tasks}
    node_by_id = {n.id: n for n in nodes}
    busy = {n.id: 0.0 for n in nodes}
    rows = {}
    for tid, nid in assignment.items():
        t, nd = task_by_id[tid], node_by_id[nid]
        exec_s = t.size_mi / nd.cpu_mips
        exec_ms = exec_s * 1000.0
        wait = busy[nid]
        busy[nid] = wait + exec_ms
        resp = 2 * nd.delay_ms + exec_ms + wait
        late = max(0.0, resp - t.deadline_ms) / t.deadline_ms * 100.0
        viol = (late - (100.0 - t.qos_pct)) * t.penalty_per_pct
        if not raw:
            viol = max(0.0, viol)
        comp = nd.cost_cpu * exec_s + nd.cost_mem * t.mem_mb
        comm = nd.cost_bw * (t.input_mb + t.output_mb)
        rows[tid] = {"wait": wait, "resp": resp, "v": late, "comp": comp, "comm": comm, "viol": viol}
    comp = sum(r["comp"] for r in rows.values())
    comm = sum(r["comm"] for r in rows.values())
    viol = sum(r["viol"] for r in rows.values())
    on_time = sum(1 for tid, r in rows.items() if r["resp"] <= task_by_id[tid].deadline_ms)
    return {
        "rows": rows,
        "comp": comp,
        "comm": comm,
        "viol": viol,
        "total": comp + comm + viol,
        "n_violated": len(tasks) - on_time,
        "pdst": 100.0 * on_time / len(tasks),
        "makespan": max(busy.values()),
    }


def brute_force_optimum(tasks, nodes, orders=("input", "deadline"), raw=False):
    """Minimum total over every memory-feasible assignment and dispatch order."""
    by_deadline = sorted(tasks, key=lambda t: (t.deadline_ms, t.id))
    sequences = {"input": list(tasks), "deadline": by_deadline}
    choices = [[n.id for n in nodes if n.mem_mb >= t.mem_mb] for t in tasks]
    best = float("inf")
    for combo in itertools.product(*choices):
        node_of = {t.id: nid for t, nid in zip(tasks, combo)}
        for name in orders:
            assignment = {t.id: node_of[t.id] for t in sequences[name]}
            best = min(best, oracle_evaluate(tasks, nodes, assignment, raw)["total"])
    return best


def make_task(id=1, size_mi=1000.0, mem_mb=100.0, input_mb=0.0, output_mb=0.0, deadline_ms=1e6, qos_pct=100.0, penalty_per_pct=0.0):
    return Task(id, size_mi, mem_mb, input_mb, output_mb, deadline_ms, qos_pct, penalty_per_pct)


def make_node(id=1, kind="fog", cpu_mips=1000.0, cost_cpu=0.0, cost_mem=0.0, cost_bw=0.0, mem_mb=1000.0, delay_ms=0.0):
    return Node(id, kind, cpu_mips, cost_cpu, cost_mem, cost_bw, mem_mb, delay_ms)


# -- reference heuristics, written straight from the algorithm descriptions ----------


def _costs(t, nd, wait, raw=False):
    exec_ms = t.size_mi / nd.cpu_mips * 1000.0
    resp = 2 * nd.delay_ms + exec_ms + wait
    late = max(0.0, resp - t.deadline_ms) / t.deadline_ms * 100.0
    viol = (late - (100.0 - t.qos_pct)) * t.penalty_per_pct
    comp = nd.cost_cpu * exec_ms / 1000.0 + nd.cost_mem * t.mem_mb
    comm = nd.cost_bw * (t.input_mb + t.output_mb)
    return exec_ms, resp, comp + comm, viol if raw else max(0.0, viol)


def ref_min_ccv(tasks, nodes, raw=False):
    nodes = sorted(nodes, key=lambda n: n.id)
    busy = {n.id: 0.0 for n in nodes}
    out = {}
    for t in tasks:
        best = None
        for nd in nodes:
            if nd.mem_mb < t.mem_mb:
                continue
            e, _, cc, v = _costs(t, nd, busy[nd.id], raw)
            if best is None or cc + v < best[0]:
                best = (cc + v, nd, e)
        out[t.id] = best[1].id
        busy[best[1].id] += best[2]
    return out


def ref_min_v(tasks, nodes, raw=False):
    nodes = sorted(nodes, key=lambda n: n.id)
    busy = {n.id: 0.0 for n in nodes}
    out = {}
    for t in sorted(tasks, key=lambda t: (t.deadline_ms, t.id)):
        sat, unsat = [], []
        for nd in nodes:
            if nd.mem_mb < t.mem_mb:
                continue
            e, resp, cc, v = _costs(t, nd, busy[nd.id], raw)
            (sat if resp <= t.deadline_ms else unsat).append((cc if resp <= t.deadline_ms else v, nd, e))
        pool = sat or unsat
        score, nd, e = min(pool, key=lambda x: x[0])  # min() keeps the first, i.e. lowest id
        out[t.id] = nd.id
        busy[nd.id] += e
    return out


def ref_round_robin(tasks, nodes):
    nodes = sorted(nodes, key=lambda n: n.id)
    m, cursor, out = len(nodes), 0, {}
    for t in tasks:
        ring = [(cursor + k) % m for k in range(m)]
        fits = [j for j in ring if nodes[j].mem_mb >= t.mem_mb]
        fast = [j for j in fits if t.size_mi / nodes[j].cpu_mips * 1000.0 < t.deadline_ms]
        j = (fast or fits)[0]
        out[t.id] = nodes[j].id
        cursor = (j + 1) % m
    return out
