"""Both row (demand) and column (capacity) sums fixed: plaquette mixing from a
greedy start state."""
import numpy as np

from sqaoa.combinatorics import enumerate_dual_basis, greedy_dual_fill, reachable_component
from sqaoa.model import conflict_count, format_bits
from sqaoa.qaoa import DUAL, AnsatzConfig, grid_scan
from sqaoa.reports import CANONICAL_CAPACITIES, calibrate_topology

inst = calibrate_topology().instance(8, CANONICAL_CAPACITIES)
db = enumerate_dual_basis(inst)
x0 = greedy_dual_fill(inst)
print("dual basis size", db.size, "reachable from x0", len(reachable_component(db, x0)))
print("x0 =", format_bits(x0, 3), "conflicts", conflict_count(inst, x0))
print("best dual-feasible allocation has", db.conflicts.min(), "conflicts")

scan = grid_scan(inst, AnsatzConfig(DUAL, shots=512, seed=42), steps=5)
np.set_printoptions(precision=2, suppress=True)
print("mean conflicts (rows gamma, cols beta):\n", scan.mean_conflict)
print("node / channel feasibility everywhere:", scan.node_feas.min(), scan.channel_feas.min())
