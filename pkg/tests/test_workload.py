import json
from dataclasses import replace

import numpy as np
import pytest

from fogsched import NodeKind, generate_nodes, generate_tasks, load_instance, load_toy_instance, save_instance
from fogsched.workload import (
    CLOUD_DEFAULTS,
    FOG_DEFAULTS,
    InstanceFormatError,
    NodeDistribution,
    NodeRanges,
    SchemaVersionError,
    TaskDistribution,
    TaskType,
    derive_seeds,
    dumps_instance,
    instance_digest,
    loads_instance,
    node_distribution_from_dict,
    task_distribution_from_dict,
)
from helpers import fuzz_instance

# Worked example, one row per attribute, columns are tasks 1..10 / nodes 1..3.
TOY_TASKS = {
    "size_mi": [2000, 3000, 100, 8000, 1500, 6000, 300, 4000, 9000, 200],
    "mem_mb": [100, 200, 50, 180, 70, 120, 150, 180, 100, 150],
    "input_mb": [0.5, 1, 0.3, 1.5, 0.4, 1.2, 0.8, 1, 0.5, 1.4],
    "output_mb": [0.1, 0.8, 0.5, 0.5, 0.8, 1, 0.5, 0.6, 0.4, 0.2],
    "deadline_ms": [1500, 1000, 200, 5000, 2200, 3500, 400, 1200, 8000, 100],
    "qos_pct": [96, 93, 95, 92, 99, 94, 98, 91, 90, 95],
    "penalty_per_pct": [0.2, 0.1, 0.4, 0.5, 0.2, 0.1, 0.3, 0.3, 0.4, 0.1],
}
TOY_NODES = {
    "cpu_mips": [1500, 750, 6000],
    "cost_cpu": [0.3, 0.4, 1.5],
    "cost_mem": [0.03, 0.02, 0.05],
    "cost_bw": [0.01, 0.02, 0.08],
    "mem_mb": [220, 170, 1024],
    "delay_ms": [1, 2, 150],
}


def test_toy_instance_field_for_field(toy):
    tasks, nodes = toy
    assert [t.id for t in tasks] == list(range(1, 11))
    assert [n.id for n in nodes] == [1, 2, 3]
    assert [n.kind for n in nodes] == [NodeKind.FOG, NodeKind.FOG, NodeKind.CLOUD]
    for name, row in TOY_TASKS.items():
        assert [getattr(t, name) for t in tasks] == row, name
    for name, row in TOY_NODES.items():
        assert [getattr(n, name) for n in nodes] == row, name


# -- generation -----------------------------------------------------------------------


def test_task_ranges_defaults():
    tasks = generate_tasks(10_000, seed=1)
    size = np.array([t.size_mi for t in tasks])
    deadline = np.array([t.deadline_ms for t in tasks])
    assert size.min() >= 100 and size.max() <= 9784
    assert deadline.min() >= 100 and deadline.max() <= 10000
    for attr, (lo, hi) in [("mem_mb", (50, 200)), ("input_mb", (0.3, 1.5)), ("output_mb", (0.1, 1.0)), ("qos_pct", (90, 99.99)), ("penalty_per_pct", (0.1, 0.5))]:
        xs = np.array([getattr(t, attr) for t in tasks])
        assert xs.min() >= lo and xs.max() <= hi, attr
    assert all(isinstance(t.size_mi, int) for t in tasks)


def test_task_types_respect_their_ranges():
    tasks = generate_tasks(10_000, seed=2)
    hits = [0, 0, 0]
    for t in tasks:
        matches = [
            k for k, tt in enumerate(TaskDistribution().types)
            if tt.size_mi[0] <= t.size_mi <= tt.size_mi[1] and tt.deadline_ms[0] <= t.deadline_ms <= tt.deadline_ms[1]
        ]
        assert matches, t
        hits[matches[0]] += 1
    # uniform mix: each type within 6 sigma of 1/3
    assert all(abs(h / 10_000 - 1 / 3) < 6 * np.sqrt(2 / 9 / 10_000) for h in hits)


def test_integer_bounds_are_inclusive():
    dist = TaskDistribution(types=(TaskType((1, 2), (1.0, 2.0)),), weights=(1.0,))
    sizes = {t.size_mi for t in generate_tasks(2000, dist, seed=0)}
    assert sizes == {1, 2}


def test_node_ranges_defaults():
    nodes = generate_nodes(30, 15, seed=3)
    assert [n.kind for n in nodes] == [NodeKind.FOG] * 30 + [NodeKind.CLOUD] * 15
    assert [n.id for n in nodes] == list(range(45))
    for n in nodes:
        r = FOG_DEFAULTS if n.kind is NodeKind.FOG else CLOUD_DEFAULTS
        for attr in ("cpu_mips", "cost_cpu", "cost_mem", "cost_bw", "mem_mb", "delay_ms"):
            lo, hi = getattr(r, attr)
            assert lo <= getattr(n, attr) <= hi, (n, attr)
    assert all(1 <= n.delay_ms <= 5 for n in nodes[:30])
    assert all(50 <= n.delay_ms <= 250 for n in nodes[30:])


def test_node_ranges_large_sample():
    nodes = generate_nodes(5000, 5000, seed=4)
    fog = np.array([n.cpu_mips for n in nodes[:5000]])
    cloud = np.array([n.cpu_mips for n in nodes[5000:]])
    assert fog.min() >= 500 and fog.max() <= 2000
    assert cloud.min() >= 3000 and cloud.max() <= 10000


def test_single_cloud_node():
    (node,) = generate_nodes(0, 1, seed=0)
    assert node.kind is NodeKind.CLOUD


def test_degenerate_ranges():
    point = NodeRanges(cpu_mips=(1000, 1000), cost_cpu=(0.5, 0.5), cost_mem=(0.1, 0.1), cost_bw=(0.2, 0.2), mem_mb=(300.0, 300.0), delay_ms=(7.0, 7.0))
    nodes = generate_nodes(3, 2, NodeDistribution(fog=point, cloud=point), seed=9)
    strip = {replace(n, id=0, kind="fog") for n in nodes}
    assert len(strip) == 1

    dist = TaskDistribution(
        types=(TaskType((500, 500), (900.0, 900.0)),) * 3,
        mem_mb=(60.0, 60.0), input_mb=(1.0, 1.0), output_mb=(0.5, 0.5), qos_pct=(95.0, 95.0), penalty_per_pct=(0.2, 0.2),
    )
    tasks = generate_tasks(50, dist, seed=1)
    assert len({replace(t, id=0) for t in tasks}) == 1
    assert tasks[0].size_mi == 500 and tasks[0].deadline_ms == 900.0


def test_deterministic_and_seed_sensitive():
    assert generate_tasks(100, seed=5) == generate_tasks(100, seed=5)
    assert generate_nodes(4, 2, seed=5) == generate_nodes(4, 2, seed=5)
    assert generate_tasks(100, seed=5) != generate_tasks(100, seed=6)


def test_prefix_stability():
    assert generate_tasks(300, seed=7)[:50] == generate_tasks(50, seed=7)
    assert generate_nodes(10, 15, seed=7)[10:] == [replace(n, id=n.id + 10) for n in generate_nodes(0, 15, seed=7)]
    assert generate_nodes(50, 5, seed=7)[:10] == generate_nodes(10, 5, seed=7)[:10]


def test_derive_seeds():
    a = derive_seeds(0, 0)
    assert set(a) == {"tasks", "nodes", "random", "ga"}
    assert a == derive_seeds(0, 0)
    assert a != derive_seeds(0, 1) and a != derive_seeds(1, 0)
    assert all(0 <= v < 2**31 for v in a.values())


def test_distribution_validation():
    with pytest.raises(ValueError):
        TaskDistribution(weights=(0.5, 0.5, 0.5))
    with pytest.raises(ValueError):
        TaskDistribution(mem_mb=(5.0, 1.0))
    with pytest.raises(ValueError):
        NodeRanges(**{**FOG_DEFAULTS.__dict__, "delay_ms": (3.0, 1.0)})
    with pytest.raises(ValueError, match="nope"):
        task_distribution_from_dict({"nope": 1})
    with pytest.raises(ValueError):
        node_distribution_from_dict({"fog": {"bogus": [1, 2]}})


def test_distribution_overrides_from_dict():
    d = task_distribution_from_dict({"weights": [1, 0, 0], "mem_mb": [10, 20]})
    tasks = generate_tasks(200, d, seed=0)
    assert all(t.size_mi <= 372 and 10 <= t.mem_mb <= 20 for t in tasks)
    nd = node_distribution_from_dict({"cloud": {"delay_ms": [60, 60]}})
    assert {n.delay_ms for n in generate_nodes(1, 4, nd, seed=0)[1:]} == {60.0}


# -- instance files ----------------------------------------------------------------------------


@pytest.mark.parametrize("seed", range(100))
def test_round_trip(seed, tmp_path):
    if seed % 2:
        tasks, nodes = fuzz_instance(seed, n_range=(1, 40), m_range=(2, 8))
    else:
        tasks, nodes = generate_tasks(1 + seed, seed=seed), generate_nodes(1 + seed % 5, 1 + seed % 3, seed=seed)
    path = tmp_path / "x.json"
    save_instance(path, tasks, nodes)
    back = load_instance(path)
    assert back == (tasks, nodes)
    save_instance(tmp_path / "y.json", *back)
    assert (tmp_path / "x.json").read_bytes() == (tmp_path / "y.json").read_bytes()
    assert instance_digest(*back) == instance_digest(tasks, nodes)


def _toy_doc():
    return json.loads(dumps_instance(*load_toy_instance()))


def test_rejects_empty_task_list():
    doc = _toy_doc()
    doc["tasks"] = []
    with pytest.raises(InstanceFormatError, match="tasks.*empty"):
        loads_instance(json.dumps(doc))


def test_schema_version_mismatch():
    doc = _toy_doc()
    doc["schema_version"] = 2
    with pytest.raises(SchemaVersionError, match="schema_version"):
        loads_instance(json.dumps(doc))


@pytest.mark.parametrize(
    "mutate,pattern",
    [
        (lambda d: d["tasks"][3].pop("mem_mb"), r"tasks\[3\]: missing field 'mem_mb'"),
        (lambda d: d["nodes"][1].update(speed=1), r"nodes\[1\]: unknown field 'speed'"),
        (lambda d: d["tasks"][0].update(size_mi="big"), r"tasks\[0\]: field 'size_mi' must be a number"),
        (lambda d: d["tasks"][2].update(deadline_ms=-5), r"tasks\[2\]: .*deadline_ms"),
        (lambda d: d["nodes"][0].update(kind="edge"), r"nodes\[0\]"),
        (lambda d: d["tasks"][4].update(id=1), r"tasks: duplicate id 1"),
    ],
)
def test_field_diagnostics(mutate, pattern):
    doc = _toy_doc()
    mutate(doc)
    with pytest.raises(InstanceFormatError, match=pattern):
        loads_instance(json.dumps(doc))


def test_parse_error_has_line_and_column(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "schema_version": 1,\n  "tasks": [,]\n}\n')
    with pytest.raises(InstanceFormatError, match=r"bad\.json: line 3 column"):
        load_instance(path)
