import io
import math

import numpy as np
import pytest

from edgeflow import (SynthConfig, compute_basis, pearson, random_labels, relative_l2,
                      run_sweep, spectral_ratio, synth_flow)
from edgeflow.experiments import ExperimentResult, label_count, parse_ratios
from edgeflow.generators import barbell_grid, complete_graph, grid_graph, path_graph, ring_graph

from conftest import random_graphs


def test_synth_k3(k3):
    b = compute_basis(k3)
    p = b.V.T @ synth_flow(b)
    np.testing.assert_allclose(p, [0.2, 0.02 / (np.sqrt(3) + 0.1), 0.02 / (np.sqrt(3) + 0.1)],
                               atol=1e-14)
    assert p[1] == pytest.approx(0.010917, abs=1e-6)


def test_synth_tree_bound():
    net = path_graph(8)
    b = compute_basis(net)
    p = b.V.T @ synth_flow(b)
    assert b.c == 0
    assert np.linalg.norm(p) < 0.02 * math.sqrt(net.m) / (b.sigma.min() + 0.1)


@pytest.mark.parametrize("net", random_graphs(10, seed=61)
                         + [grid_graph(8, 8), ring_graph(9), complete_graph(6), barbell_grid(4, 4)],
                         ids=repr)
def test_synth_is_cycle_dominated(net):
    b = compute_basis(net)
    assert spectral_ratio(b, synth_flow(b)) < 1


def test_synth_config_validation():
    with pytest.raises(ValueError):
        SynthConfig(eps=0)
    b = compute_basis(ring_graph(5))
    np.testing.assert_allclose(synth_flow(b, SynthConfig(b=0.04)), 2 * synth_flow(b))


def test_pearson_examples():
    a = np.array([0.3, -1.0, 2.0, 5.0])
    assert pearson(a, a) == 1.0
    assert pearson(a, -a) == -1.0
    assert pearson([1, 2, 3], [1, 2, 4]) == pytest.approx(9 / math.sqrt(84), abs=1e-14)
    assert pearson([1, 2, 3], [1, 2, 4]) == pytest.approx(0.98198, abs=1e-5)


def test_pearson_matches_numpy():
    rng = np.random.default_rng(0)
    a, b = rng.standard_normal((2, 50))
    assert pearson(a, b) == pytest.approx(np.corrcoef(a, b)[0, 1], abs=1e-14)


@pytest.mark.parametrize("a,b", [([1, 1, 1], [1, 2, 3]), ([1.0], [2.0]), ([1, 2], [1, 2, 3])])
def test_pearson_undefined(a, b):
    with pytest.raises(ValueError):
        pearson(a, b)


def test_relative_l2():
    assert relative_l2([1, 1], [1, 0]) == 1.0
    assert relative_l2([2, 0], [2, 0]) == 0.0


def test_random_labels():
    assert len(random_labels(3303, 0.4, seed=1)) == 1321
    assert sorted(random_labels(17, 1.0, seed=2)) == list(range(17))
    np.testing.assert_array_equal(random_labels(100, 0.3, seed=9), random_labels(100, 0.3, seed=9))
    idx = random_labels(100, 0.3, seed=9)
    assert np.unique(idx).size == 30
    for bad in (0, -0.1, 1.2):
        with pytest.raises(ValueError):
            random_labels(10, bad)


def test_label_count_floor_is_robust():
    # 0.7 * 10 is 6.999... in floating point
    assert label_count(10, 0.7) == 7
    assert label_count(760, 0.1) == 76


def test_parse_ratios():
    assert parse_ratios("0.1:0.1:0.9") == [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]
    assert parse_ratios("0.2,0.4") == [0.2, 0.4]
    with pytest.raises(ValueError):
        parse_ratios("0.1:0:1")


def test_sweep_all_labeled_is_exact():
    net = grid_graph(4, 4)
    truth = synth_flow(compute_basis(net))
    res = run_sweep(net, truth, methods=("flowssl", "zerofill", "linegraph"),
                    selections=("random", "rrqr", "rb"), ratios=(1.0,), trials=2)
    assert len(res.rows) == 3 * 3 * 2
    assert all(r["rho"] == pytest.approx(1.0, abs=1e-12) for r in res.rows)


def test_sweep_trends_and_ordering():
    net = grid_graph(10, 10)
    truth = synth_flow(compute_basis(net))
    res = run_sweep(net, truth, methods=("flowssl", "zerofill"), ratios=(0.2, 0.4, 0.6),
                    trials=10)
    s = res.summary()
    for method in ("flowssl", "zerofill"):
        means = [s[(method, "random", q)][0] for q in (0.2, 0.4, 0.6)]
        assert means == sorted(means)
    assert s[("flowssl", "random", 0.4)][0] > s[("zerofill", "random", 0.4)][0]
    for mean, se, n_ok in s.values():
        assert -1 <= mean <= 1 and se >= 0 and n_ok == 10


def test_sweep_records_failed_cells():
    net = grid_graph(3, 3)
    truth = np.ones(net.m)  # constant truth: correlation undefined
    seen = []
    res = run_sweep(net, truth, ratios=(0.5,), trials=3, on_error=lambda cell, e: seen.append(cell))
    assert all(math.isnan(r["rho"]) for r in res.rows)
    assert len(seen) == 3
    assert res.summary()[("flowssl", "random", 0.5)][2] == 0


def test_sweep_rejects_bad_truth():
    with pytest.raises(ValueError):
        run_sweep(grid_graph(3, 3), np.ones(4))


def test_sweep_csv_deterministic():
    net = grid_graph(5, 5)
    truth = synth_flow(compute_basis(net))

    def dump():
        buf = io.StringIO()
        run_sweep(net, truth, methods=("flowssl", "linegraph"), selections=("random", "rb"),
                  ratios=(0.2, 0.5), trials=3).write_csv(buf, timing=False)
        return buf.getvalue()

    a, b = dump(), dump()
    assert a == b
    lines = a.splitlines()
    assert lines[0] == "method,selection,ratio,seed,rho,runtime_ms"
    assert len(lines) == 1 + 2 * 2 * 2 * 3
    assert all(line.endswith(",NA") for line in lines[1:])


def test_write_csv_to_path(tmp_path):
    res = ExperimentResult([dict(method="flowssl", selection="random", ratio=0.5, seed=1,
                                 rho=0.25, runtime_ms=1.23456)])
    p = tmp_path / "out.csv"
    res.write_csv(p)
    assert p.read_text() == "method,selection,ratio,seed,rho,runtime_ms\nflowssl,random,0.5,1,0.25,1.235\n"
