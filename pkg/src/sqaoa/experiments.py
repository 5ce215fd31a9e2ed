"""Seeded drivers for the reduction table, method comparison tables, dual
heatmap and noise scan, plus the cross-edge calibration they all share."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import fullspace
from .baselines import exact_optimum, exact_optimum_dfs, greedy_multicolor
from .combinatorics import enumerate_dual_basis, greedy_dual_fill, reachable_component
from .model import conflict_count
from .qaoa import DICKE_XY, DUAL, STANDARD, AnsatzConfig, grid_scan, initial_params, optimize
from .reports import (CANONICAL_CAPACITIES, CANONICAL_DEMANDS, CANONICAL_M, DEFAULT_SEEDS,
                      NOISE_LEVELS, PAPER_FEASIBLE_COUNT, TARGET_OPTIMA, CanonicalFamily,
                      ExperimentReport, calibrate_topology, read_csv, ring_chords, ring_edges,
                      run_reduction_table, save_reduction_svg)

# ---------------------------------------------------------------------------
# Tables 2-3: comparison against classical baselines

@dataclass
class MethodSummary:
    best_conflict: int | None
    witness: np.ndarray | None
    feasibility: float
    seed_best: int | None


def _qaoa_over_seeds(inst, kind, seeds, budget, shots, threads) -> MethodSummary:
    def one(seed):
        cfg = AnsatzConfig(kind, depth=1, shots=shots, seed=seed)
        return optimize(inst, cfg, budget, x0=initial_params(1, seed))

    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(one, seeds))
    else:
        results = [one(s) for s in seeds]
    best, witness, seed_best = None, None, None
    feas_shots = total = 0
    for seed, res in zip(seeds, results):
        h = res.histogram
        feas_shots += int(h.counts[h.feasible_mask()].sum())
        total += h.shots
        if res.witness is not None:
            c = conflict_count(inst, res.witness)
            if best is None or c < best:
                best, witness, seed_best = c, res.witness, seed
    return MethodSummary(best, witness, feas_shots / total, seed_best)


def run_comparison_tables(seeds=DEFAULT_SEEDS, family: CanonicalFamily | None = None,
                          sizes=(6, 7, 8), budget_dicke: int = 80, budget_standard: int = 30,
                          shots: int = 1024, threads: int = 1) -> ExperimentReport:
    fam = family or calibrate_topology()
    seeds = tuple(int(s) for s in seeds)
    rep = ExperimentReport("tables", ["N", "method", "best_conflict", "gap",
                                      "feasibility_ratio", "seed_best"])
    rep.meta.update(seeds=" ".join(map(str, seeds)), chords=fam.chords,
                    calibrated=fam.calibrated, budget_dicke=budget_dicke,
                    budget_standard=budget_standard, shots=shots)
    for N in sizes:
        inst = fam.instance(N)
        ex = exact_optimum(inst)
        opt = conflict_count(inst, ex.witness)
        rep.rows.append(dict(N=N, method="exact", best_conflict=opt, gap=0,
                             feasibility_ratio=1.0, seed_best=None))
        gr = greedy_multicolor(inst)
        gc = conflict_count(inst, gr.allocation)
        rep.rows.append(dict(N=N, method="greedy", best_conflict=gc, gap=gc - opt,
                             feasibility_ratio=float(gr.unmet_demand == 0), seed_best=None))
        for kind, budget in ((STANDARD, budget_standard), (DICKE_XY, budget_dicke)):
            s = _qaoa_over_seeds(inst, kind, seeds, budget, shots, threads)
            rep.rows.append(dict(N=N, method=kind, best_conflict=s.best_conflict,
                                 gap=None if s.best_conflict is None else s.best_conflict - opt,
                                 feasibility_ratio=s.feasibility, seed_best=s.seed_best))
    _table_checks(rep, fam, sizes)
    return rep


def _table_checks(rep: ExperimentReport, fam: CanonicalFamily, sizes) -> None:
    exact = {N: table_lookup(rep, N, "exact")["best_conflict"] for N in sizes}
    dxy = {N: table_lookup(rep, N, DICKE_XY) for N in sizes}
    if fam.calibrated and tuple(sizes) == tuple(sorted(TARGET_OPTIMA)):
        rep.checks["exact optima match targets"] = all(exact[N] == TARGET_OPTIMA[N] for N in sizes)
        gaps = [dxy[N]["gap"] for N in sizes]
        rep.checks["dicke-xy gaps (0, 0, <=1)"] = (
            None not in gaps and gaps[0] == 0 and gaps[1] == 0 and gaps[2] <= 1)
    else:
        rep.checks["DEGRADED: exact <= dicke-xy best <= greedy"] = all(
            dxy[N]["best_conflict"] is not None
            and exact[N] <= dxy[N]["best_conflict"] <= table_lookup(rep, N, "greedy")["best_conflict"]
            for N in sizes)
    rep.checks["dicke-xy feasibility 1.0"] = all(dxy[N]["feasibility_ratio"] == 1.0 for N in sizes)
    big = max(sizes)
    rep.checks[f"standard feasibility <= 0.01 at N={big}"] = (
        table_lookup(rep, big, STANDARD)["feasibility_ratio"] <= 0.01)


def table_lookup(rep: ExperimentReport, N: int, method: str) -> dict:
    return next(r for r in rep.rows if r["N"] == N and r["method"] == method)


# ---------------------------------------------------------------------------
# Fig. 3 analogue: dual-constraint grid scan

def run_dual_heatmap(family: CanonicalFamily | None = None, steps: int = 9, shots: int = 2048,
                     seed: int = 42, capacities=CANONICAL_CAPACITIES) -> ExperimentReport:
    fam = family or calibrate_topology()
    inst = fam.instance(8, capacities)
    cfg = AnsatzConfig(DUAL, depth=1, shots=shots, seed=seed)
    scan = grid_scan(inst, cfg, steps=steps)
    rep = ExperimentReport("dual_heatmap", ["gamma", "beta", "mean_conflict",
                                            "node_feas", "channel_feas"])
    for g, b, mc, nf, cf in scan.rows():
        rep.rows.append(dict(gamma=g, beta=b, mean_conflict=mc, node_feas=nf, channel_feas=cf))
    x0 = greedy_dual_fill(inst)
    basis = enumerate_dual_basis(inst)
    greedy = greedy_multicolor(inst.with_capacities(None)).conflicts
    min_cell = float(scan.mean_conflict.min())
    rep.meta.update(seed=seed, chords=fam.chords, capacities=capacities, shots=shots,
                    x0_conflicts=conflict_count(inst, x0), greedy_conflicts=greedy,
                    exact_optimum=exact_optimum(inst.with_capacities(None)).optimum_conflicts,
                    dual_optimum=int(basis.conflicts.min()), dual_basis_size=basis.size,
                    reachable_component=len(reachable_component(basis, x0)),
                    min_cell_mean_conflict=f"{min_cell:.6g}")
    rep.checks["node feasibility 1.0 in all cells"] = bool(np.all(scan.node_feas == 1.0))
    rep.checks["channel feasibility 1.0 in all cells"] = bool(np.all(scan.channel_feas == 1.0))
    rep.checks["min-cell mean conflict < greedy"] = min_cell < greedy
    rep.scan = scan
    return rep


# ---------------------------------------------------------------------------
# Fig. 1b analogue: depolarizing noise

def run_noise_scan(seeds=(0,), family: CanonicalFamily | None = None, N: int = 5,
                   levels=NOISE_LEVELS, trajectories: int = 2000, budget: int = 80,
                   shots: int = 1024) -> ExperimentReport:
    """Mean node deviation against gate error rate for both ansatze.

    Angles come from a noiseless optimization with the first seed (shared
    start point); ``trajectories`` are split evenly across ``seeds``.
    """
    fam = family or calibrate_topology()
    inst = fam.instance(N)
    seeds = tuple(int(s) for s in seeds)
    dev_of = fullspace.deviation_diagonal(inst)
    rep = ExperimentReport("noise", ["p_err", "ansatz", "mean_deviation", "stderr",
                                     "trajectories"])
    x0 = initial_params(1, seeds[0])
    per_seed = [trajectories // len(seeds) + (r < trajectories % len(seeds))
                for r in range(len(seeds))]
    curves = {}
    for a_idx, kind in enumerate((STANDARD, DICKE_XY)):
        res = optimize(inst, AnsatzConfig(kind, shots=shots, seed=seeds[0]), budget, x0=x0)
        g, b = res.best_params
        sim = fullspace.build_trajectory_simulator(inst, kind, [g], [b])
        rep.meta[f"params_{kind}"] = f"{g:.6f} {b:.6f}"
        rep.meta[f"error_slots_{kind}"] = sim.n_slots
        curve = []
        for l_idx, p in enumerate(levels):
            codes = np.concatenate([
                sim.run(t, fullspace.NoiseModel(p), np.random.SeedSequence([s, a_idx, l_idx]))
                for s, t in zip(seeds, per_seed)])
            dev = dev_of[codes]
            mean = float(dev.mean())
            se = float(dev.std(ddof=1) / math.sqrt(len(dev))) if len(dev) > 1 else 0.0
            curve.append((p, mean, se))
            rep.rows.append(dict(p_err=p, ansatz=kind, mean_deviation=mean, stderr=se,
                                 trajectories=len(dev)))
        curves[kind] = curve
    rep.meta.update(seeds=" ".join(map(str, seeds)), chords=fam.chords, nodes=N)
    prop = curves[DICKE_XY]
    rep.checks["proposed deviation 0 at p_err=0"] = prop[0][1] == 0.0
    rep.checks["proposed deviation < 1.0 at largest p_err"] = prop[-1][1] < 1.0
    rep.checks["proposed deviation nondecreasing within 2 stderr"] = all(
        b[1] + 2 * math.hypot(a[2], b[2]) >= a[1] for a, b in zip(prop, prop[1:]))
    rep.checks["standard deviation >= 1.0 at all levels"] = all(
        c[1] >= 1.0 for c in curves[STANDARD])
    rep.curves = curves
    return rep


# ---------------------------------------------------------------------------
# plots

def _pyplot():
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    plt.rcParams["svg.hashsalt"] = "sqaoa"
    return plt


def save_heatmap_svg(rep: ExperimentReport, path: str | Path) -> Path:
    plt = _pyplot()
    scan = rep.scan
    fig, ax = plt.subplots(figsize=(5, 4))
    im = ax.imshow(scan.mean_conflict, origin="lower", aspect="auto", cmap="viridis",
                   extent=[scan.betas[0], scan.betas[-1], scan.gammas[0], scan.gammas[-1]])
    ax.set_xlabel("beta")
    ax.set_ylabel("gamma")
    ax.set_title("dual-constraint QAOA, mean conflicts (p=1)")
    fig.colorbar(im, ax=ax, label="mean conflicts")
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return Path(path)


def save_noise_svg(rep: ExperimentReport, path: str | Path) -> Path:
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 3.5))
    for kind, curve in rep.curves.items():
        p, mean, se = (np.array(v) for v in zip(*curve))
        ax.errorbar(p, mean, yerr=se, marker="o", capsize=3, label=kind)
    ax.set_xlabel("depolarizing error rate p_err")
    ax.set_ylabel("mean Hamming-weight deviation")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return Path(path)


def save_tables_svg(rep: ExperimentReport, path: str | Path) -> Path:
    """Grouped bars of best conflict per method and size."""
    plt = _pyplot()
    sizes = sorted({r["N"] for r in rep.rows})
    methods = list(dict.fromkeys(r["method"] for r in rep.rows))
    width = 0.8 / len(methods)
    fig, ax = plt.subplots(figsize=(5.5, 3.5))
    for k, meth in enumerate(methods):
        vals = [table_lookup(rep, N, meth)["best_conflict"] for N in sizes]
        vals = [np.nan if v is None else v for v in vals]
        ax.bar(np.arange(len(sizes)) + k * width, vals, width, label=meth)
    ax.set_xticks(np.arange(len(sizes)) + 0.4 - width / 2, [str(N) for N in sizes])
    ax.set_xlabel("nodes N")
    ax.set_ylabel("best conflict count")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return Path(path)


def check_oracle_equivalence(instances) -> bool:
    return all(exact_optimum(i).optimum_conflicts == exact_optimum_dfs(i).optimum_conflicts
               for i in instances)
