"""Depolarizing noise by Pauli trajectories on a 5-node (15-qubit) truncation.
Uses fewer trajectories than the acceptance run."""
from sqaoa import fullspace
from sqaoa.reports import calibrate_topology

inst = calibrate_topology().instance(5)
dev = fullspace.deviation_diagonal(inst)
for ansatz, (g, b) in (("dicke-xy", (0.9, 0.5)), ("standard", (0.9, 0.5))):
    sim = fullspace.build_trajectory_simulator(inst, ansatz, [g], [b])
    row = []
    for p in (0.0, 0.02, 0.05):
        codes = sim.run(150, fullspace.NoiseModel(p), seed=1)
        row.append(f"p={p:.2f}: {dev[codes].mean():.2f}")
    print(f"{ansatz:9s} ({sim.n_slots} error slots)  " + "  ".join(row))
