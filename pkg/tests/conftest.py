import numpy as np
import pytest
import scipy.sparse as sp

from sqaoa.model import ProblemInstance


def random_instance(rng, n_max=5, m_max=4, p_edge=0.5, k_min=1):
    n = int(rng.integers(1, n_max + 1))
    m = int(rng.integers(1, m_max + 1))
    edges = [(i, j) for i in range(n) for j in range(i + 1, n) if rng.random() < p_edge]
    demands = [int(rng.integers(k_min, m + 1)) if k_min <= m else m for _ in range(n)]
    return ProblemInstance(n, m, edges, demands)


def brute_conflicts(inst, x):
    """Shared channels summed over edges, by plain loops."""
    X = np.asarray(x).reshape(inst.n, inst.m)
    return sum(int(X[i, c]) * int(X[j, c]) for i, j in inst.edges for c in range(inst.m))


# Dense operators with qubit q mapped to bit q of the basis index, built with
# Kronecker products (the leftmost factor is the highest qubit).

_I = sp.identity(2, format="csr", dtype=complex)
_X = sp.csr_matrix(np.array([[0, 1], [1, 0]], dtype=complex))
_Y = sp.csr_matrix(np.array([[0, -1j], [1j, 0]], dtype=complex))


def pauli_string(n_qubits, ops):
    """``ops`` maps qubit -> 2x2 sparse matrix."""
    out = sp.identity(1, format="csr", dtype=complex)
    for q in reversed(range(n_qubits)):
        out = sp.kron(out, ops.get(q, _I), format="csr")
    return out


def dense_xy_hamiltonian(inst, pairs):
    nq = inst.n_qubits
    H = sp.csr_matrix((2 ** nq, 2 ** nq), dtype=complex)
    for i in range(inst.n):
        for a, b in pairs:
            qa, qb = inst.index(i, a), inst.index(i, b)
            H = H + 0.5 * (pauli_string(nq, {qa: _X, qb: _X}) + pauli_string(nq, {qa: _Y, qb: _Y}))
    return H


def dense_x_hamiltonian(n_qubits):
    H = sp.csr_matrix((2 ** n_qubits, 2 ** n_qubits), dtype=complex)
    for q in range(n_qubits):
        H = H + pauli_string(n_qubits, {q: _X})
    return H


def all_bits(n_qubits):
    idx = np.arange(2 ** n_qubits)
    return ((idx[:, None] >> np.arange(n_qubits)) & 1).astype(np.uint8)


@pytest.fixture
def path3():
    # 0 - 1 - 2, m=3
    return ProblemInstance(3, 3, [(0, 1), (1, 2)], [2, 1, 2])


@pytest.fixture
def square4():
    return ProblemInstance(4, 3, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)], [2, 1, 2, 1])


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in sorted(RESULTS, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
