"""A short version of the method comparison: exact, greedy and the Dicke-XY
ansatz on the calibrated family.  The full tables (10 seeds, standard ansatz on
2^24 amplitudes) come from ``sqaoa experiment tables``."""
from sqaoa.baselines import exact_optimum, greedy_multicolor
from sqaoa.model import format_bits
from sqaoa.qaoa import DICKE_XY, AnsatzConfig, optimize
from sqaoa.reports import calibrate_topology

fam = calibrate_topology()
for N in (6, 7, 8):
    inst = fam.instance(N)
    ex = exact_optimum(inst)
    gr = greedy_multicolor(inst)
    best = None
    for seed in range(3):
        res = optimize(inst, AnsatzConfig(DICKE_XY, shots=1024, seed=seed), budget=40)
        if res.best_feasible_conflict is not None:
            best = res.best_feasible_conflict if best is None else min(best, res.best_feasible_conflict)
    print(f"N={N}: exact {ex.optimum_conflicts} ({ex.n_optimal} optimal), greedy {gr.conflicts}, "
          f"dicke-xy best {best}, feasibility {res.histogram.feasibility_ratio():.3f}")
    print("   exact witness", format_bits(ex.witness, inst.m))
