"""The Dicke-initialized XY ansatz never leaves the feasible subspace; the
standard penalty ansatz mostly does."""
import numpy as np

from sqaoa import fullspace, subspace
from sqaoa.combinatorics import product_basis
from sqaoa.reports import calibrate_topology

inst = calibrate_topology().instance(4)  # 12 qubits, small enough for the dense engine
pb = product_basis(inst)

st = subspace.init_dicke_product(inst, pb)
subspace.apply_cost_phase(st, inst, 0.8)
subspace.apply_xy_mixer(st, subspace.XYMixerSpec.for_instance(inst), 0.4)
full = st.to_full()
inside = np.abs(full[pb.codes]) ** 2
print("XY ansatz: probability inside feasible set =", inside.sum())
print("expected conflicts:", st.expectation(pb.conflicts), "vs uniform", pb.conflicts.mean())

std = fullspace.standard_qaoa_state(inst, [0.8], [0.4])
p = std.probabilities()
print("standard ansatz: probability inside feasible set =", p[pb.codes].sum())

# Per-register XY spectrum for k=1 on three channels (a triangle)
spec = subspace.XYMixerSpec.for_instance(inst)
print("H_XY for a k=1 register:\n", spec.hamiltonian(1))
print("eigenvalues", np.linalg.eigvalsh(spec.hamiltonian(1)))
