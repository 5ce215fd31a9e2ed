import numpy as np
import pytest

from sqaoa import experiments as ex
from sqaoa.baselines import exact_optimum


def test_ring_helpers():
    assert ex.ring_edges(4) == [(0, 1), (0, 3), (1, 2), (2, 3)]
    assert len(ex.ring_chords(8)) == 28 - 8


def test_calibration_hits_targets():
    fam = ex.calibrate_topology()
    assert fam.calibrated
    assert fam.optima == (3, 2, 2)
    for N, want in ex.TARGET_OPTIMA.items():
        assert exact_optimum(fam.instance(N)).optimum_conflicts == want


def test_family_truncation():
    fam = ex.CanonicalFamily(((0, 2), (1, 6)))
    inst = fam.instance(6)
    assert (0, 2) in inst.edges and (1, 6) not in inst.edges and (0, 5) in inst.edges
    assert inst.demands == ex.CANONICAL_DEMANDS[:6]


def test_reduction_report_roundtrip(tmp_path):
    rep = ex.run_reduction_table()
    assert all(rep.checks.values())
    path = rep.write(tmp_path)
    meta, rows = ex.read_csv(path)
    assert meta["discrepancy"] == "True"
    assert rows[0]["feasible_states"] == "6561"
    assert rows[1]["feasible_states"] == "2916"
    assert ex.save_reduction_svg(rep, tmp_path / "r.svg").read_text().startswith("<?xml")


def test_small_tables(tmp_path):
    fam = ex.calibrate_topology()
    rep = ex.run_comparison_tables(seeds=(0,), family=fam, sizes=(6,), budget_dicke=4,
                                   budget_standard=2, shots=64)
    assert [r["method"] for r in rep.rows] == ["exact", "greedy", "standard", "dicke-xy"]
    assert ex.table_lookup(rep, 6, "exact")["best_conflict"] == 3
    assert ex.table_lookup(rep, 6, "dicke-xy")["feasibility_ratio"] == 1.0
    assert "DEGRADED: exact <= dicke-xy best <= greedy" in rep.checks
    meta, rows = ex.read_csv(rep.write(tmp_path))
    assert len(rows) == 4 and meta["seeds"] == "0"
    ex.save_tables_svg(rep, tmp_path / "t.svg")


def test_small_heatmap_and_noise(tmp_path):
    fam = ex.calibrate_topology()
    rep = ex.run_dual_heatmap(fam, steps=3, shots=64)
    assert len(rep.rows) == 9
    assert rep.checks["node feasibility 1.0 in all cells"]
    assert rep.meta["dual_basis_size"] == 570
    ex.save_heatmap_svg(rep, tmp_path / "h.svg")

    nz = ex.run_noise_scan((0,), fam, N=3, levels=(0.0, 0.05), trajectories=40, budget=5,
                           shots=64)
    assert len(nz.rows) == 4
    assert nz.rows[2]["mean_deviation"] == 0.0  # dicke-xy at p=0
    ex.save_noise_svg(nz, tmp_path / "n.svg")


def test_oracle_equivalence_helper():
    fam = ex.calibrate_topology()
    assert ex.check_oracle_equivalence([fam.instance(N) for N in (6, 7)])
