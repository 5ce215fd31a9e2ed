import math

import numpy as np
import pytest

from sqaoa.model import ProblemInstance
from sqaoa.qaoa import (DICKE_XY, DUAL, STANDARD, Ansatz, AnsatzConfig, estimate_cost,
                        grid_scan, initial_params, optimize, split_params)


def test_config_validation():
    with pytest.raises(ValueError):
        AnsatzConfig("qaoa")
    with pytest.raises(ValueError):
        AnsatzConfig(depth=0)
    with pytest.raises(ValueError):
        AnsatzConfig(shots=0)
    with pytest.raises(ValueError):
        split_params([0.1, 0.2, 0.3], 1)


def test_zero_angles_dicke_xy_is_uniform(square4):
    ans = Ansatz(square4, AnsatzConfig(DICKE_XY))
    # no evolution: expectation equals the plain mean over the feasible set
    assert ans.expectation([0.0, 0.0]) == pytest.approx(ans.basis.conflicts.mean())


def test_estimate_seeded(square4):
    cfg = AnsatzConfig(DICKE_XY, shots=256, seed=3)
    a, ha = estimate_cost(square4, cfg, [0.4, 0.7])
    b, hb = estimate_cost(square4, cfg, [0.4, 0.7])
    assert a == b and ha.as_dict() == hb.as_dict()
    assert ha.feasibility_ratio() == 1.0


def test_optimize_trace_and_budget(square4):
    cfg = AnsatzConfig(DICKE_XY, shots=256, seed=1)
    res = optimize(square4, cfg, budget=25)
    assert 1 <= len(res.trace) <= 25
    assert res.best_cost == min(t.cost for t in res.trace)
    assert res.best_feasible_conflict is not None
    best_so_far = [t.best_feasible for t in res.trace]
    assert best_so_far == sorted(best_so_far, reverse=True)
    one = optimize(square4, cfg, budget=1)
    assert len(one.trace) == 1
    np.testing.assert_allclose(one.trace[0].params, initial_params(1, 1))
    again = optimize(square4, cfg, budget=25)
    assert [t.cost for t in again.trace] == [t.cost for t in res.trace]


def test_optimize_improves_on_start(square4):
    cfg = AnsatzConfig(DICKE_XY, shots=2048, seed=0)
    res = optimize(square4, cfg, budget=60)
    assert res.best_cost <= res.trace[0].cost
    with pytest.raises(ValueError):
        optimize(square4, cfg, budget=0)


def test_standard_low_feasibility(square4):
    cfg = AnsatzConfig(STANDARD, shots=2048, seed=2)
    cost, hist = estimate_cost(square4, cfg, [0.0, 0.0])
    # |+>^n: fraction of node-feasible strings is prod C(3,k)/8
    assert hist.feasibility_ratio() == pytest.approx(81 / 4096, abs=0.01)


def test_standard_expectation_matches_shots(path3):
    cfg = AnsatzConfig(STANDARD, shots=20_000, seed=4)
    ans = Ansatz(path3, cfg)
    cost, _ = ans.estimate([0.3, 0.6])
    assert cost == pytest.approx(ans.expectation([0.3, 0.6]), rel=0.05)


def test_dual_grid_feasible():
    inst = ProblemInstance(4, 3, [(0, 1), (1, 2), (2, 3)], [2, 1, 2, 1], [2, 2, 2])
    scan = grid_scan(inst, AnsatzConfig(DUAL, shots=128, seed=0), steps=3)
    assert scan.mean_conflict.shape == (3, 3)
    assert np.all(scan.node_feas == 1.0) and np.all(scan.channel_feas == 1.0)
    assert len(list(scan.rows())) == 9
    assert scan.gammas[-1] == pytest.approx(math.pi)


def test_dual_exact_vs_trotter_close_for_small_beta():
    inst = ProblemInstance(4, 3, [(0, 1), (1, 2), (2, 3)], [2, 1, 2, 1], [2, 2, 2])
    a = Ansatz(inst, AnsatzConfig(DUAL))
    b = Ansatz(inst, AnsatzConfig(DUAL, exact_dual=True))
    pa = a.state([0.2, 0.01]).probabilities()
    pb = b.state([0.2, 0.01]).probabilities()
    assert np.abs(pa - pb).max() < 1e-3
