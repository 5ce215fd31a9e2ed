"""Instances, allocation bitstrings and how much the demand constraints shrink
the search space."""
import numpy as np

from sqaoa.combinatorics import enumerate_johnson, product_basis
from sqaoa.model import (ProblemInstance, conflict_count, format_bits, metrics, parse_bits,
                         search_space_stats)
from sqaoa.reports import calibrate_topology

# A path of three base stations, three channels, demands 2-1-2
inst = ProblemInstance(3, 3, [(0, 1), (1, 2)], [2, 1, 2])
x = parse_bits("110|001|011")
print(format_bits(x, 3), "conflicts:", conflict_count(inst, x))
print(metrics(inst, x))

# Each node register lives on a Johnson graph J(m, k)
for k in range(4):
    jb = enumerate_johnson(3, k)
    print(f"J(3,{k}):", [format(int(s), "03b")[::-1] for s in jb.states])

# The canonical 8-node instance, after calibrating its two cross edges
fam = calibrate_topology()
canon = fam.instance(8)
print("chords:", fam.chords, "exact optima for N=6,7,8:", fam.optima)
stats = search_space_stats(canon)
print(f"2^{canon.n_qubits} = {stats.full_dim} states, {stats.feasible_count} node-feasible, "
      f"reduction x{stats.reduction_factor:.1f}")

pb = product_basis(canon)
print("basis size", pb.size, "min conflicts over basis", pb.conflicts.min())
print("histogram of conflict counts:", np.bincount(pb.conflicts))
