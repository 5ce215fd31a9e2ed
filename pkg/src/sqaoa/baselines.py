"""Classical references: exact optimum over the node-feasible set and a greedy
multi-coloring heuristic."""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .combinatorics import product_basis
from .model import ProblemInstance, conflict_count, node_deviation, search_space_stats

MAX_EXACT_STATES = 10 ** 7


class SearchTooLargeError(RuntimeError):
    pass


@dataclass(frozen=True)
class ExactResult:
    optimum_conflicts: int
    witness: np.ndarray
    n_optimal: int


@dataclass(frozen=True)
class GreedyResult:
    allocation: np.ndarray
    conflicts: int
    unmet_demand: int


def _guard(inst: ProblemInstance) -> None:
    stats = search_space_stats(inst)
    if stats.feasible_count is None or stats.feasible_count > MAX_EXACT_STATES:
        raise SearchTooLargeError(
            f"feasible set has ~10^{stats.log10_feasible_count:.1f} states; exact search is "
            f"limited to {MAX_EXACT_STATES:.0e}. Use greedy_multicolor or a smaller instance."
        )


def exact_optimum(inst: ProblemInstance) -> ExactResult:
    """Minimum conflicts by scanning the whole product basis (ties to lowest rank)."""
    _guard(inst)
    basis = product_basis(inst)
    conf = basis.conflicts
    best = int(conf.min())
    hits = np.nonzero(conf == best)[0]
    return ExactResult(best, basis.unrank(int(hits[0])), len(hits))


def exact_optimum_dfs(inst: ProblemInstance) -> ExactResult:
    """Branch and bound over nodes, each choosing one ``k_i``-subset of channels.

    The bound is the conflict count among already-placed nodes, which can only
    grow as more nodes are placed.  Written independently of the basis
    machinery so it can cross-check :func:`exact_optimum`.
    """
    _guard(inst)
    n, m = inst.n, inst.m
    choices = [[sum(1 << c for c in combo) for combo in combinations(range(m), k)]
               for k in inst.demands]
    earlier = [[j for j in nbrs if j < i] for i, nbrs in enumerate(inst.neighbors())]
    masks = [0] * n
    best = [math.inf, None, 0]

    def rec(i: int, cost: int):
        if cost > best[0]:
            return
        if i == n:
            if cost < best[0]:
                best[0], best[1], best[2] = cost, list(masks), 1
            else:
                best[2] += 1
            return
        for mask in choices[i]:
            add = sum(bin(mask & masks[j]).count("1") for j in earlier[i])
            masks[i] = mask
            rec(i + 1, cost + add)
        masks[i] = 0

    rec(0, 0)
    bits = np.array([(best[1][i] >> c) & 1 for i in range(n) for c in range(m)], dtype=np.uint8)
    return ExactResult(int(best[0]), bits, best[2])


def greedy_multicolor(inst: ProblemInstance, seed=None, randomize: bool = False) -> GreedyResult:
    """Assign channels one at a time.

    Each step takes the node with the largest residual demand (ties: higher
    degree, then lower index; or uniformly at random when ``randomize``).  It
    gets a channel not held by any neighbour, preferring channels least used
    in its two-hop neighbourhood, then the lowest index.  When every free
    channel clashes with a neighbour, the channel with the fewest clashes is
    taken anyway.
    """
    rng = np.random.default_rng(seed)
    n, m = inst.n, inst.m
    nbrs = inst.neighbors()
    deg = inst.degree()
    two_hop = []
    for i in range(n):
        hop = set()
        for j in nbrs[i]:
            hop.update(nbrs[j])
        hop.discard(i)
        hop.difference_update(nbrs[i])
        two_hop.append(sorted(hop))
    X = np.zeros((n, m), dtype=np.uint8)
    residual = list(inst.demands)

    while any(residual):
        top = max(residual)
        cands = [i for i in range(n) if residual[i] == top]
        if randomize:
            i = int(rng.choice(cands))
        else:
            i = min(cands, key=lambda v: (-deg[v], v))
        free = [c for c in range(m) if not X[i, c]]
        if not free:
            break
        clash = {c: int(sum(X[j, c] for j in nbrs[i])) for c in free}
        usage = {c: int(sum(X[j, c] for j in two_hop[i])) for c in free}
        ok = [c for c in free if clash[c] == 0]
        if ok:
            c = min(ok, key=lambda ch: (usage[ch], ch))
        else:
            c = min(free, key=lambda ch: (clash[ch], usage[ch], ch))
        X[i, c] = 1
        residual[i] -= 1

    x = X.ravel()
    return GreedyResult(x, conflict_count(inst, x), node_deviation(inst, x))
