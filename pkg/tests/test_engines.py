"""Subspace and full-space engines against dense Kronecker-product oracles."""
import math

import numpy as np
import pytest
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from conftest import all_bits, brute_conflicts, dense_x_hamiltonian, dense_xy_hamiltonian
from sqaoa import fullspace, subspace
from sqaoa.combinatorics import (enumerate_dual_basis, greedy_dual_fill, plaquette_masks,
                                 product_basis)
from sqaoa.model import ProblemInstance, node_deviation, penalty_cost


def _conflict_diag(inst):
    return np.array([brute_conflicts(inst, x) for x in all_bits(inst.n_qubits)], dtype=float)


def _dense_dicke_xy(inst, gammas, betas, topology="complete"):
    nq = inst.n_qubits
    bits = all_bits(nq)
    ok = np.all(bits.reshape(-1, inst.n, inst.m).sum(axis=2) == np.array(inst.demands), axis=1)
    psi = ok.astype(complex) / math.sqrt(ok.sum())
    C = _conflict_diag(inst)
    H = dense_xy_hamiltonian(inst, subspace.xy_pairs(inst.m, topology))
    for g, b in zip(gammas, betas):
        psi = np.exp(-1j * g * C) * psi
        psi = expm_multiply(-1j * b * H, psi)
    return psi


@pytest.mark.parametrize("topology", ["complete", "ring"])
@pytest.mark.parametrize("gb", [(0.0, 0.0), (0.7, 0.3), (2.1, 1.4), (3.0, 2.9)])
def test_dicke_xy_matches_dense(square4, topology, gb):
    g, b = gb
    pb = product_basis(square4)
    st = subspace.init_dicke_product(square4, pb)
    subspace.apply_cost_phase(st, square4, g)
    subspace.apply_xy_mixer(st, subspace.XYMixerSpec.for_instance(square4, topology), b)
    want = _dense_dicke_xy(square4, [g], [b], topology)
    np.testing.assert_allclose(st.to_full(), want, atol=1e-10)


def test_dicke_xy_depth2_matches_dense(path3):
    pb = product_basis(path3)
    st = subspace.init_dicke_product(path3, pb)
    spec = subspace.XYMixerSpec.for_instance(path3)
    for g, b in [(0.4, 1.1), (1.3, 0.2)]:
        subspace.apply_cost_phase(st, path3, g)
        subspace.apply_xy_mixer(st, spec, b)
    want = _dense_dicke_xy(path3, [0.4, 1.3], [1.1, 0.2])
    np.testing.assert_allclose(st.to_full(), want, atol=1e-10)


def test_xy_mixer_unitary(square4):
    pb = product_basis(square4)
    rng = np.random.default_rng(3)
    amp = rng.normal(size=pb.size) + 1j * rng.normal(size=pb.size)
    st = subspace.SubspaceState(pb, amp / np.linalg.norm(amp))
    subspace.apply_xy_mixer(st, subspace.XYMixerSpec.for_instance(square4), 0.83)
    assert st.norm() == pytest.approx(1.0, abs=1e-12)


def _dual_instance():
    return ProblemInstance(4, 3, [(0, 1), (1, 2), (2, 3), (0, 3)], [2, 1, 2, 1], [2, 2, 2])


def test_plaquette_layer_matches_sequential_dense():
    inst = _dual_instance()
    db = enumerate_dual_basis(inst)
    x0 = greedy_dual_fill(inst)
    beta = 0.61
    st = subspace.init_basis_state(db, x0)
    subspace.apply_plaquette_layer(st, subspace.PlaquetteSpec.for_instance(inst, beta))
    # oracle: product of 2x2 rotations applied as dense matrices over the full space
    nq = inst.n_qubits
    psi = np.zeros(2 ** nq, dtype=complex)
    psi[int(db.codes[db.rank(x0)])] = 1.0
    idx = np.arange(2 ** nq)
    for *_, a, b in plaquette_masks(inst):
        both = a | b
        src = idx[(idx & both) == a]
        dst = src ^ both
        rows = np.concatenate([src, dst])
        cols = np.concatenate([dst, src])
        H = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(2 ** nq, 2 ** nq))
        psi = expm_multiply(-1j * beta * H, psi)
    np.testing.assert_allclose(st.to_full(), psi, atol=1e-10)


def test_dual_support_preserved():
    inst = _dual_instance()
    db = enumerate_dual_basis(inst)
    st = subspace.init_basis_state(db, greedy_dual_fill(inst))
    for g, b in [(0.3, 0.9), (1.7, 2.2)]:
        subspace.apply_cost_phase(st, inst, g)
        subspace.apply_plaquette_layer(st, subspace.PlaquetteSpec.for_instance(inst, b))
    assert st.norm() == pytest.approx(1.0, abs=1e-12)
    ex = subspace.init_basis_state(db, greedy_dual_fill(inst))
    subspace.apply_dual_mixer_exact(ex, 0.4)
    assert ex.norm() == pytest.approx(1.0, abs=1e-10)
    H = subspace.dual_mixer_hamiltonian(db)
    assert abs(H - H.T).max() == 0


def test_sampling_frequencies():
    p = np.array([0.1, 0.0, 0.6, 0.3])
    idx = subspace.sample_indices(p, 100_000, np.random.default_rng(1))
    freq = np.bincount(idx, minlength=4) / len(idx)
    np.testing.assert_allclose(freq, p, atol=0.01)
    assert freq[1] == 0
    with pytest.raises(ValueError):
        subspace.sample_indices(p, 0, np.random.default_rng(1))


def test_subspace_sample_deterministic(square4):
    st = subspace.init_dicke_product(square4, product_basis(square4))
    a = subspace.sample(st, 500, seed=9)
    b = subspace.sample(st, 500, seed=9)
    assert a.as_dict() == b.as_dict()
    assert a.feasibility_ratio() == 1.0


# ---------------------------------------------------------------------------
# full space

@pytest.mark.parametrize("gb", [(0.0, 0.0), (0.35, 0.8), (1.9, 2.5)])
def test_standard_matches_dense(path3, gb):
    g, b = gb
    lam = 5.0
    nq = path3.n_qubits
    st = fullspace.standard_qaoa_state(path3, [g], [b], lam)
    pen = penalty_cost(path3, all_bits(nq), lam)
    psi = np.full(2 ** nq, 2 ** (-nq / 2), dtype=complex)
    psi = np.exp(-1j * g * pen) * psi
    psi = expm_multiply(-1j * b * dense_x_hamiltonian(nq), psi)
    np.testing.assert_allclose(st.amplitudes, psi, atol=1e-10)


def test_diagonals_match_bruteforce(square4):
    bits = all_bits(square4.n_qubits)
    np.testing.assert_array_equal(fullspace.conflict_diagonal(square4), _conflict_diag(square4))
    np.testing.assert_array_equal(fullspace.deviation_diagonal(square4),
                                  node_deviation(square4, bits))
    np.testing.assert_allclose(fullspace.penalty_diagonal(square4, 2.5),
                               penalty_cost(square4, bits, 2.5))


def test_full_guard():
    with pytest.raises(MemoryError):
        fullspace.init_plus(27)


def test_apply_matrix_qubit_order():
    # CNOT with control on matrix bit 0 (qubit 2) and target on bit 1 (qubit 0)
    U = np.eye(4, dtype=complex)[[0, 3, 2, 1]]
    psi = np.zeros(8, dtype=complex)
    psi[0b100] = 1.0
    out = fullspace.apply_matrix(psi, U, (2, 0), 3)
    assert np.argmax(np.abs(out)) == 0b101


def test_trajectories_noiseless_equal_engines(path3):
    params = (0.7, 0.45)
    sim = fullspace.build_trajectory_simulator(path3, "dicke-xy", [params[0]], [params[1]])
    st = subspace.init_dicke_product(path3, product_basis(path3))
    subspace.apply_cost_phase(st, path3, params[0])
    subspace.apply_xy_mixer(st, subspace.XYMixerSpec.for_instance(path3), params[1])
    np.testing.assert_allclose(sim.final_probs, np.abs(st.to_full()) ** 2, atol=1e-10)

    sim_std = fullspace.build_trajectory_simulator(path3, "standard", [params[0]], [params[1]])
    full = fullspace.standard_qaoa_state(path3, [params[0]], [params[1]])
    np.testing.assert_allclose(sim_std.final_probs, full.probabilities(), atol=1e-10)

    codes = sim.run(300, fullspace.NoiseModel(0.0), seed=1)
    assert np.all(fullspace.deviation_diagonal(path3)[codes] == 0)


def _depolarize(rho, support, p, n):
    """Exact depolarizing channel on ``support`` via Pauli sum."""
    P = fullspace._PAULI
    labels = ["X", "Y", "Z"] if len(support) == 1 else [
        a + b for a in "IXYZ" for b in "IXYZ" if a + b != "II"]
    acc = np.zeros_like(rho)
    for lab in labels:
        full = np.eye(1)
        # qubit q on bit q, so the highest qubit is the leftmost factor
        for q in reversed(range(n)):
            op = P[lab[support.index(q)]] if q in support else np.eye(2)
            full = np.kron(full, op)
        acc += full @ rho @ full.conj().T
    return (1 - p) * rho + p / len(labels) * acc


def test_trajectories_match_density_matrix():
    n = 2
    H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
    CZ = np.diag([1, 1, 1, -1]).astype(complex)
    RX = np.array([[math.cos(0.4), -1j * math.sin(0.4)], [-1j * math.sin(0.4), math.cos(0.4)]])
    ops = [fullspace.Op("unitary", (0,), H, ((0,),)),
           fullspace.Op("unitary", (1,), H, ((1,),)),
           fullspace.Op("unitary", (0, 1), CZ, ((0, 1),)),
           fullspace.Op("unitary", (1,), RX, ((1,),))]
    init = np.zeros(4, dtype=complex)
    init[0] = 1
    p = 0.15
    sim = fullspace.TrajectorySimulator(n, ops, init)
    shots = 40_000
    codes = sim.run(shots, fullspace.NoiseModel(p), seed=5)
    freq = np.bincount(codes, minlength=4) / shots

    rho = np.outer(init, init.conj())
    for op in ops:
        cols = [fullspace.apply_matrix(np.eye(4, dtype=complex)[:, c].copy(), op.data, op.qubits, n)
                for c in range(4)]
        U = np.stack(cols, axis=1)
        rho = U @ rho @ U.conj().T
        for s in op.slots:
            rho = _depolarize(rho, list(s), p, n)
    exact = np.real(np.diag(rho))
    sigma = np.sqrt(exact * (1 - exact) / shots)
    assert np.all(np.abs(freq - exact) < 4 * sigma + 1e-12)


def test_noise_model_validation():
    with pytest.raises(ValueError):
        fullspace.NoiseModel(1.5)
