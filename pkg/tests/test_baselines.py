from itertools import combinations, product

import numpy as np
import pytest

from conftest import brute_conflicts, random_instance
from sqaoa.baselines import (SearchTooLargeError, exact_optimum, exact_optimum_dfs,
                             greedy_multicolor)
from sqaoa.model import ProblemInstance, conflict_count, node_deviation


def _enumerate_min(inst):
    """Plain itertools enumeration of every node-feasible allocation."""
    per = [list(combinations(range(inst.m), k)) for k in inst.demands]
    best, count = None, 0
    for choice in product(*per):
        x = np.zeros((inst.n, inst.m), dtype=np.uint8)
        for i, cs in enumerate(choice):
            x[i, list(cs)] = 1
        c = brute_conflicts(inst, x.ravel())
        if best is None or c < best:
            best, count = c, 1
        elif c == best:
            count += 1
    return best, count


def test_trivial_cases():
    inst = ProblemInstance(3, 2, [], [1, 2, 1])
    assert exact_optimum(inst).optimum_conflicts == 0
    assert exact_optimum_dfs(inst).optimum_conflicts == 0
    forced = ProblemInstance(2, 1, [(0, 1)], [1, 1])
    assert exact_optimum(forced).optimum_conflicts == 1
    assert exact_optimum_dfs(forced).optimum_conflicts == 1


@pytest.mark.parametrize("seed", range(12))
def test_exact_matches_enumeration(seed):
    inst = random_instance(np.random.default_rng(100 + seed), n_max=5, m_max=4)
    best, count = _enumerate_min(inst)
    a, b = exact_optimum(inst), exact_optimum_dfs(inst)
    assert a.optimum_conflicts == b.optimum_conflicts == best
    assert a.n_optimal == b.n_optimal == count
    assert conflict_count(inst, a.witness) == best
    assert node_deviation(inst, a.witness) == 0
    assert conflict_count(inst, b.witness) == best


def test_exact_guard():
    inst = ProblemInstance(16, 4, [], [2] * 16)
    with pytest.raises(SearchTooLargeError, match="greedy"):
        exact_optimum(inst)


def test_greedy_edgeless_and_triangle():
    g = greedy_multicolor(ProblemInstance(3, 3, [], [1, 2, 3]))
    assert g.conflicts == 0 and g.unmet_demand == 0
    tri = ProblemInstance(3, 2, [(0, 1), (1, 2), (0, 2)], [1, 1, 1])
    assert greedy_multicolor(tri).conflicts >= 1


def test_greedy_deterministic_and_feasible():
    rng = np.random.default_rng(7)
    for _ in range(20):
        inst = random_instance(rng, n_max=6, m_max=4)
        a = greedy_multicolor(inst)
        b = greedy_multicolor(inst, seed=123)
        assert np.array_equal(a.allocation, b.allocation)
        assert a.unmet_demand == 0
        assert a.conflicts == conflict_count(inst, a.allocation)
        assert exact_optimum(inst).optimum_conflicts <= a.conflicts


def test_greedy_random_ties_seeded():
    inst = ProblemInstance(4, 3, [(0, 1), (2, 3)], [1, 1, 1, 1])
    a = greedy_multicolor(inst, seed=5, randomize=True)
    b = greedy_multicolor(inst, seed=5, randomize=True)
    assert np.array_equal(a.allocation, b.allocation)
    assert a.conflicts == 0
