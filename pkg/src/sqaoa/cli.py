"""Command-line front end: ``sqaoa info | solve | experiment``."""
from __future__ import annotations

import argparse
import csv
import os
import sys
from pathlib import Path

from . import reports
from .baselines import SearchTooLargeError, exact_optimum, greedy_multicolor
from .combinatorics import enumerate_dual_basis
from .model import (DEFAULT_LAMBDA, InstanceError, format_bits, load_instance, metrics,
                    search_space_stats)

# scipy, numba and matplotlib load only for subcommands that need them
METHODS = ("exact", "greedy", "standard", "dicke-xy", "dual")
EXPERIMENTS = ("reduction", "tables", "dual-heatmap", "noise")


def _positive(kind):
    def parse(text):
        val = kind(text)
        if val <= 0:
            raise argparse.ArgumentTypeError(f"must be positive, got {text}")
        return val
    return parse


def _nonneg_float(text):
    val = float(text)
    if val < 0:
        raise argparse.ArgumentTypeError(f"must be >= 0, got {text}")
    return val


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="sqaoa", description=__doc__)
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--out", type=Path, default=None)
    common.add_argument("--threads", type=_positive(int), default=None)

    info = sub.add_parser("info", help="print search-space statistics")
    info.add_argument("--instance", type=Path, required=True)

    solve = sub.add_parser("solve", parents=[common], help="run one method on an instance")
    solve.add_argument("--instance", type=Path, required=True)
    solve.add_argument("--method", choices=METHODS, default="dicke-xy")
    solve.add_argument("--depth", type=_positive(int), default=1)
    solve.add_argument("--shots", type=_positive(int), default=1024)
    solve.add_argument("--lambda", dest="lam", type=_nonneg_float, default=DEFAULT_LAMBDA)
    solve.add_argument("--budget", type=_positive(int), default=80)
    solve.add_argument("--topology", choices=("complete", "ring"), default="complete")

    exp = sub.add_parser("experiment", parents=[common], help="reproduce a table or figure")
    exp.add_argument("name", choices=EXPERIMENTS)
    exp.add_argument("--seeds", type=int, nargs="+", default=None)
    exp.add_argument("--budget", type=_positive(int), default=80)
    exp.add_argument("--budget-standard", type=_positive(int), default=30)
    exp.add_argument("--shots", type=_positive(int), default=None)
    exp.add_argument("--grid", type=int, default=9)
    exp.add_argument("--trajectories", type=_positive(int), default=2000)
    exp.add_argument("--noise-levels", type=float, nargs="+", default=list(reports.NOISE_LEVELS))
    return p


def _threads(args) -> int:
    if args.threads:
        return args.threads
    env = os.environ.get("SQAOA_THREADS")
    return int(env) if env and env.isdigit() and int(env) > 0 else 1


def cmd_info(args) -> int:
    inst = load_instance(args.instance)
    st = search_space_stats(inst)
    print(f"name            {inst.name}")
    print(f"n, m            {inst.n}, {inst.m}")
    print(f"demands         {list(inst.demands)}")
    print(f"edges           {[list(e) for e in inst.edges]}")
    print(f"qubits          {inst.n_qubits}")
    print(f"full_dim        {st.full_dim if st.full_dim is not None else f'10^{st.log10_full_dim:.2f}'}")
    print(f"feasible_count  {st.feasible_count if st.feasible_count is not None else f'10^{st.log10_feasible_count:.2f}'}")
    print(f"reduction       {st.reduction_factor:.6g}")
    print(f"feasible_frac   {st.feasible_fraction:.6g}")
    if inst.capacities is not None:
        print(f"capacities      {list(inst.capacities)}")
        print(f"dual_basis      {enumerate_dual_basis(inst).size}")
    return 0


def cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    out = args.out or Path(f"sqaoa-solve-{args.method}-seed{args.seed}")
    out.mkdir(parents=True, exist_ok=True)
    trace_rows = []
    feas = 1.0
    if args.method == "exact":
        res = exact_optimum(inst)
        witness = res.witness
    elif args.method == "greedy":
        witness = greedy_multicolor(inst, seed=args.seed).allocation
    else:
        from .qaoa import DUAL, AnsatzConfig, optimize
        cfg = AnsatzConfig(args.method, depth=args.depth, lam=args.lam, topology=args.topology,
                           shots=args.shots, seed=args.seed)
        res = optimize(inst, cfg, args.budget)
        witness = res.witness
        feas = res.histogram.feasibility_ratio(dual=args.method == DUAL)
        for t, e in enumerate(res.trace):
            trace_rows.append([t, " ".join(f"{v:.6f}" for v in e.params), f"{e.cost:.6g}",
                               f"{e.feasibility:.6g}",
                               "n/a" if e.best_feasible == float("inf") else int(e.best_feasible)])
    header = f"# seed={args.seed}\n# method={args.method}\n# instance={args.instance}\n"
    lines = [header, "key,value\n"]
    if witness is None:
        lines.append("witness,n/a\nconflicts,n/a\n")
    else:
        mr = metrics(inst, witness, args.lam if hasattr(args, "lam") else DEFAULT_LAMBDA)
        lines.append(f"witness,{format_bits(witness, inst.m)}\n")
        lines.append(f"conflicts,{mr.conflicts}\n")
        lines.append(f"node_feasible,{mr.node_feasible}\n")
        lines.append(f"deviation,{mr.deviation}\n")
        if mr.channel_feasible is not None:
            lines.append(f"channel_feasible,{mr.channel_feasible}\n")
    lines.append(f"feasibility_ratio,{feas:.6g}\n")
    (out / "report.csv").write_text("".join(lines))
    if trace_rows:
        with open(out / "trace.csv", "w", newline="") as fh:
            fh.write(header)
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["step", "params", "cost", "feasibility", "best_feasible"])
            w.writerows(trace_rows)
    print("".join(lines[1:]), end="")
    print(f"wrote {out}")
    return 0


def cmd_experiment(args) -> int:
    out = args.out or Path(f"sqaoa-{args.name}-seed{args.seed}")
    out.mkdir(parents=True, exist_ok=True)
    if args.name == "reduction":
        rep = reports.run_reduction_table()
        reports.save_reduction_svg(rep, out / "reduction.svg")
    else:
        rep = _run_heavy_experiment(args, out)
    rep.meta = {"seed": args.seed, **rep.meta}
    path = rep.write(out)
    print(f"wrote {path}")
    print(rep.summary())
    return 0


def _run_heavy_experiment(args, out: Path):
    from . import experiments as ex
    fam = ex.calibrate_topology()
    if args.name == "tables":
        seeds = args.seeds if args.seeds is not None else list(ex.DEFAULT_SEEDS)
        rep = ex.run_comparison_tables(seeds, fam, budget_dicke=args.budget,
                                       budget_standard=args.budget_standard,
                                       shots=args.shots or 1024, threads=_threads(args))
        ex.save_tables_svg(rep, out / "tables.svg")
    elif args.name == "dual-heatmap":
        rep = ex.run_dual_heatmap(fam, steps=args.grid, shots=args.shots or 2048, seed=args.seed)
        ex.save_heatmap_svg(rep, out / "dual_heatmap.svg")
    else:
        seeds = args.seeds if args.seeds is not None else [args.seed]
        rep = ex.run_noise_scan(seeds, fam, levels=tuple(args.noise_levels),
                                trajectories=args.trajectories, budget=args.budget,
                                shots=args.shots or 1024)
        ex.save_noise_svg(rep, out / "noise.svg")
    return rep


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "info":
            return cmd_info(args)
        if args.command == "solve":
            return cmd_solve(args)
        return cmd_experiment(args)
    except (InstanceError, SearchTooLargeError, MemoryError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
