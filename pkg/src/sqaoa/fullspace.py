"""Dense ``2**(n*m)`` statevector engine for the penalty baseline, plus a
gate-level trajectory simulator for depolarizing noise.

Basis index convention: bit ``b`` of the integer index is qubit ``b``, and
qubit ``i*m + c`` carries ``x_{i,c}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numba
import numpy as np

from .combinatorics import enumerate_johnson
from .model import DEFAULT_LAMBDA, ProblemInstance, SampleHistogram, code_to_bits
from .subspace import COMPLETE, make_rng, sample_indices, xy_pairs

MAX_FULL_QUBITS = 26
MAX_TRAJECTORY_QUBITS = 20


class FullState:
    """Dense amplitudes over all ``2**n_qubits`` basis states."""

    def __init__(self, amplitudes, n_qubits: int):
        if n_qubits > MAX_FULL_QUBITS:
            raise MemoryError(f"{n_qubits} qubits exceeds the {MAX_FULL_QUBITS}-qubit guard")
        self.n_qubits = n_qubits
        self.amplitudes = np.asarray(amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (2 ** n_qubits,):
            raise ValueError("amplitude length does not match qubit count")

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return self.amplitudes.real ** 2 + self.amplitudes.imag ** 2


def init_plus(n_qubits: int) -> FullState:
    if n_qubits > MAX_FULL_QUBITS:
        raise MemoryError(f"{n_qubits} qubits exceeds the {MAX_FULL_QUBITS}-qubit guard")
    return FullState(np.full(2 ** n_qubits, 2.0 ** (-n_qubits / 2), dtype=np.complex128), n_qubits)


# ---------------------------------------------------------------------------
# diagonal cost

@lru_cache(maxsize=2)
def _cost_keys(inst: ProblemInstance):
    """Integer key per basis state encoding (conflicts, squared demand gap).

    Built by broadcasting per-register tables over a tensor whose axis
    ``n-1-i`` is node ``i``'s register value.
    """
    n, m = inst.n, inst.m
    if inst.n_qubits > MAX_FULL_QUBITS:
        raise MemoryError(f"{inst.n_qubits} qubits exceeds the {MAX_FULL_QUBITS}-qubit guard")
    R = 2 ** m
    pop = np.array([bin(r).count("1") for r in range(R)], dtype=np.int32)
    shape = (R,) * n

    def axis_shape(node):
        s = [1] * n
        s[n - 1 - node] = R
        return s

    pen = np.zeros(shape, dtype=np.int32)
    for i, k in enumerate(inst.demands):
        pen += ((pop - k) ** 2).reshape(axis_shape(i))
    conf = np.zeros(shape, dtype=np.int32)
    overlap = pop[np.bitwise_and.outer(np.arange(R), np.arange(R))]
    for i, j in inst.edges:
        # axis order is descending node index, so the larger node comes first
        hi, lo = max(i, j), min(i, j)
        s = [1] * n
        s[n - 1 - hi] = R
        s[n - 1 - lo] = R
        conf += overlap.reshape(s)
    pen_max = int(sum(max((0 - k) ** 2, (m - k) ** 2) for k in inst.demands))
    keys = (conf * (pen_max + 1) + pen).reshape(-1)
    n_conf = len(inst.edges) * m + 1
    key_conf = np.repeat(np.arange(n_conf), pen_max + 1)
    key_pen = np.tile(np.arange(pen_max + 1), n_conf)
    return keys, key_conf, key_pen


def penalty_diagonal(inst: ProblemInstance, lam: float = DEFAULT_LAMBDA) -> np.ndarray:
    """``conflicts + lam * sum_i (w_i - k_i)**2`` for every basis index."""
    keys, kc, kp = _cost_keys(inst)
    return (kc + lam * kp)[keys]


def conflict_diagonal(inst: ProblemInstance) -> np.ndarray:
    keys, kc, _ = _cost_keys(inst)
    return kc[keys]


def deviation_diagonal(inst: ProblemInstance) -> np.ndarray:
    """Per-index node deviation, small instances only (used by tests and noise runs)."""
    idx = np.arange(2 ** inst.n_qubits, dtype=np.int64)
    dev = np.zeros(len(idx), dtype=np.int64)
    mask = (1 << inst.m) - 1
    pop = np.array([bin(r).count("1") for r in range(mask + 1)])
    for i, k in enumerate(inst.demands):
        dev += np.abs(pop[(idx >> (i * inst.m)) & mask] - k)
    return dev


def apply_penalty_phase(state: FullState, inst: ProblemInstance, gamma: float,
                        lam: float = DEFAULT_LAMBDA) -> FullState:
    keys, kc, kp = _cost_keys(inst)
    table = np.exp(-1j * gamma * (kc + lam * kp))
    state.amplitudes *= table[keys]
    return state


@numba.njit(cache=True)
def _x_mixer_kernel(psi, c, s, n_qubits):
    # exp(-i beta X) on every qubit, two qubits per sweep
    dim = psi.shape[0]
    q = 0
    while q + 1 < n_qubits:
        s0 = 1 << q
        s1 = 1 << (q + 1)
        for base in range(0, dim, 2 * s1):
            for j in range(base, base + s0):
                a = psi[j]
                b = psi[j + s0]
                cc = psi[j + s1]
                d = psi[j + s0 + s1]
                a1 = c * a + s * b
                b1 = c * b + s * a
                c1 = c * cc + s * d
                d1 = c * d + s * cc
                psi[j] = c * a1 + s * c1
                psi[j + s1] = c * c1 + s * a1
                psi[j + s0] = c * b1 + s * d1
                psi[j + s0 + s1] = c * d1 + s * b1
        q += 2
    if q < n_qubits:
        st = 1 << q
        for base in range(0, dim, 2 * st):
            for j in range(base, base + st):
                a = psi[j]
                b = psi[j + st]
                psi[j] = c * a + s * b
                psi[j + st] = c * b + s * a


def apply_x_mixer(state: FullState, beta: float) -> FullState:
    """Transverse-field mixer ``exp(-i beta sum_j X_j)``."""
    _x_mixer_kernel(state.amplitudes, complex(math.cos(beta)), complex(-1j * math.sin(beta)),
                    state.n_qubits)
    return state


def standard_qaoa_state(inst: ProblemInstance, gammas, betas,
                        lam: float = DEFAULT_LAMBDA) -> FullState:
    state = init_plus(inst.n_qubits)
    for g, b in zip(gammas, betas):
        apply_penalty_phase(state, inst, g, lam)
        apply_x_mixer(state, b)
    return state


def sample(state: FullState, inst: ProblemInstance, shots: int, seed=None) -> SampleHistogram:
    rng = make_rng(seed)
    idx = sample_indices(state.probabilities(), shots, rng)
    return SampleHistogram.from_samples(inst, idx)


# ---------------------------------------------------------------------------
# gate-level circuits and noisy trajectories

@dataclass(frozen=True)
class NoiseModel:
    """Depolarizing error probability attached to every gate."""

    p_err: float = 0.0

    def __post_init__(self):
        if not 0.0 <= self.p_err <= 1.0:
            raise ValueError(f"p_err must be in [0, 1], got {self.p_err}")


@dataclass
class Op:
    """One circuit step.

    ``kind`` is ``"diag"`` (``data`` is a full-length phase vector),
    ``"unitary"`` (``data`` is a ``2**k`` matrix on ``qubits``, qubit
    ``qubits[t]`` on bit ``t`` of the matrix index) or ``"idle"``.
    Errors are injected after the op on each support in ``slots``.
    """

    kind: str
    qubits: tuple[int, ...]
    data: np.ndarray | None = None
    slots: tuple[tuple[int, ...], ...] = ()
    label: str = ""


def apply_matrix(psi: np.ndarray, U: np.ndarray, qubits, n_qubits: int) -> np.ndarray:
    """Apply ``U`` to ``qubits`` of a flat state vector; returns a new flat array."""
    k = len(qubits)
    t = psi.reshape((2,) * n_qubits)
    # C-order reshape puts the most significant matrix bit first
    axes = [n_qubits - 1 - q for q in reversed(qubits)]
    Ut = U.reshape((2,) * (2 * k))
    out = np.tensordot(Ut, t, axes=(list(range(k, 2 * k)), axes))
    out = np.moveaxis(out, list(range(k)), axes)
    return np.ascontiguousarray(out).reshape(-1)


_PAULI = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}
_PAULI_1Q = ("X", "Y", "Z")
_PAULI_2Q = tuple(a + b for a in "IXYZ" for b in "IXYZ" if a + b != "II")


def _diag_vector(n_qubits: int, qubits, phases: np.ndarray) -> np.ndarray:
    idx = np.arange(2 ** n_qubits, dtype=np.int64)
    sub = np.zeros(len(idx), dtype=np.int64)
    for t, q in enumerate(qubits):
        sub |= ((idx >> q) & 1) << t
    return phases[sub]


def register_xy_unitary(m: int, beta: float, topology: str = COMPLETE) -> np.ndarray:
    """``exp(-i beta H_XY)`` on one ``m``-qubit register, indexed by channel mask."""
    U = np.zeros((2 ** m, 2 ** m), dtype=complex)
    pairs = xy_pairs(m, topology)
    for k in range(m + 1):
        states = enumerate_johnson(m, k).states
        H = np.zeros((len(states), len(states)))
        look = {int(s): r for r, s in enumerate(states)}
        for r, s in enumerate(states):
            s = int(s)
            for a, b in pairs:
                if ((s >> a) & 1) != ((s >> b) & 1):
                    H[r, look[s ^ ((1 << a) | (1 << b))]] = 1.0
        w, V = np.linalg.eigh(H)
        U[np.ix_(states, states)] = (V * np.exp(-1j * beta * w)) @ V.conj().T
    return U


def standard_circuit(inst: ProblemInstance, gammas, betas,
                     lam: float = DEFAULT_LAMBDA) -> list[Op]:
    """Penalty QAOA as H gates, one- and two-qubit phase gates and RX rotations.

    The penalty is expanded as ``sum_c n_c (1 - 2k) + 2 sum_{c<c'} n_c n_c'``
    per node (the constant ``k**2`` only contributes a global phase).
    """
    N, m = inst.n_qubits, inst.m
    h = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
    ops = [Op("unitary", (q,), h, ((q,),), "h") for q in range(N)]
    for g, b in zip(gammas, betas):
        for i, k in enumerate(inst.demands):
            for c in range(m):
                q = inst.index(i, c)
                ph = np.array([1.0, np.exp(-1j * g * lam * (1 - 2 * k))])
                ops.append(Op("diag", (q,), _diag_vector(N, (q,), ph), ((q,),), "pen1"))
            for c in range(m):
                for c2 in range(c + 1, m):
                    qs = (inst.index(i, c), inst.index(i, c2))
                    ph = np.array([1, 1, 1, np.exp(-2j * g * lam)])
                    ops.append(Op("diag", qs, _diag_vector(N, qs, ph), (qs,), "pen2"))
        for i, j in inst.edges:
            for c in range(m):
                qs = (inst.index(i, c), inst.index(j, c))
                ph = np.array([1, 1, 1, np.exp(-1j * g)])
                ops.append(Op("diag", qs, _diag_vector(N, qs, ph), (qs,), "conflict"))
        rx = np.array([[math.cos(b), -1j * math.sin(b)], [-1j * math.sin(b), math.cos(b)]])
        ops.extend(Op("unitary", (q,), rx, ((q,),), "rx") for q in range(N))
    return ops


def dicke_xy_circuit(inst: ProblemInstance, gammas, betas,
                     topology: str = COMPLETE) -> list[Op]:
    """Subspace-confined QAOA with error slots matching a two-qubit gate census.

    Dicke preparation is exact; ``m - 1`` idle two-qubit slots per register
    stand in for its ladder.  Each register's XY propagator is applied exactly
    with one two-qubit error slot per coupled pair.
    """
    N, m = inst.n_qubits, inst.m
    ops: list[Op] = []
    for i in range(inst.n):
        for c in range(m - 1):
            qs = (inst.index(i, c), inst.index(i, c + 1))
            ops.append(Op("idle", qs, None, (qs,), "dicke"))
    pairs = xy_pairs(m, topology)
    for g, b in zip(gammas, betas):
        for i, j in inst.edges:
            for c in range(m):
                qs = (inst.index(i, c), inst.index(j, c))
                ph = np.array([1, 1, 1, np.exp(-1j * g)])
                ops.append(Op("diag", qs, _diag_vector(N, qs, ph), (qs,), "conflict"))
        U = register_xy_unitary(m, b, topology)
        for i in range(inst.n):
            qs = tuple(inst.index(i, c) for c in range(m))
            slots = tuple((qs[a], qs[c2]) for a, c2 in pairs)
            ops.append(Op("unitary", qs, U, slots, "xy"))
    return ops


def dicke_product_full(inst: ProblemInstance) -> np.ndarray:
    psi = np.ones(1, dtype=complex)
    for k in inst.demands:
        reg = np.zeros(2 ** inst.m, dtype=complex)
        reg[enumerate_johnson(inst.m, k).states] = 1 / math.sqrt(math.comb(inst.m, k))
        # later nodes sit on higher bits
        psi = np.kron(reg, psi)
    return psi


def _apply_op(psi: np.ndarray, op: Op, n_qubits: int) -> np.ndarray:
    if op.kind == "diag":
        return psi * op.data
    if op.kind == "unitary":
        return apply_matrix(psi, op.data, op.qubits, n_qubits)
    return psi


def _apply_pauli(psi: np.ndarray, label: str, support, n_qubits: int) -> np.ndarray:
    for p, q in zip(label, support):
        if p != "I":
            psi = apply_matrix(psi, _PAULI[p], (q,), n_qubits)
    return psi


@dataclass
class TrajectorySimulator:
    """Stochastic Pauli unraveling of per-gate depolarizing noise.

    After every op, each error slot independently suffers a uniformly random
    non-identity Pauli on its support with probability ``p_err``.  States
    after each op of the noiseless circuit are cached so that a trajectory
    restarts at its first error.
    """

    n_qubits: int
    ops: list[Op]
    initial: np.ndarray
    prefix: list[np.ndarray] = field(init=False, repr=False)

    def __post_init__(self):
        if self.n_qubits > MAX_TRAJECTORY_QUBITS:
            raise MemoryError(f"trajectory simulation is limited to {MAX_TRAJECTORY_QUBITS} qubits")
        psi = np.asarray(self.initial, dtype=complex)
        self.prefix = []
        for op in self.ops:
            psi = _apply_op(psi, op, self.n_qubits)
            self.prefix.append(psi)
        self.final_probs = np.abs(psi) ** 2
        self.slot_owner = np.array([k for k, op in enumerate(self.ops) for _ in op.slots],
                                   dtype=np.int64)
        self.slot_support = [s for op in self.ops for s in op.slots]

    @property
    def n_slots(self) -> int:
        return len(self.slot_support)

    def run(self, trajectories: int, noise: NoiseModel, seed=None) -> np.ndarray:
        """Measured basis indices, one per trajectory."""
        rng = make_rng(seed)
        out = np.empty(trajectories, dtype=np.int64)
        for t in range(trajectories):
            hits = np.nonzero(rng.random(self.n_slots) < noise.p_err)[0] if noise.p_err > 0 else []
            if len(hits) == 0:
                out[t] = sample_indices(self.final_probs, 1, rng)[0]
                continue
            errors: dict[int, list[tuple[str, tuple[int, ...]]]] = {}
            for h in hits:
                sup = self.slot_support[h]
                labels = _PAULI_1Q if len(sup) == 1 else _PAULI_2Q
                lab = labels[rng.integers(len(labels))]
                errors.setdefault(int(self.slot_owner[h]), []).append((lab, sup))
            first = min(errors)
            psi = self.prefix[first]
            for k in range(first, len(self.ops)):
                if k > first:
                    psi = _apply_op(psi, self.ops[k], self.n_qubits)
                for lab, sup in errors.get(k, ()):
                    psi = _apply_pauli(psi, lab, sup, self.n_qubits)
            out[t] = sample_indices(np.abs(psi) ** 2, 1, rng)[0]
        return out


def build_trajectory_simulator(inst: ProblemInstance, ansatz: str, gammas, betas,
                               lam: float = DEFAULT_LAMBDA,
                               topology: str = COMPLETE) -> TrajectorySimulator:
    N = inst.n_qubits
    if ansatz == "standard":
        ops = standard_circuit(inst, gammas, betas, lam)
        initial = np.zeros(2 ** N, dtype=complex)
        initial[0] = 1.0
    elif ansatz == "dicke-xy":
        ops = dicke_xy_circuit(inst, gammas, betas, topology)
        initial = dicke_product_full(inst)
    else:
        raise ValueError(f"unknown ansatz {ansatz!r}")
    return TrajectorySimulator(N, ops, initial)


def run_noisy_trajectory(inst: ProblemInstance, params, noise: NoiseModel, seed=None,
                         ansatz: str = "dicke-xy", lam: float = DEFAULT_LAMBDA,
                         topology: str = COMPLETE) -> np.ndarray:
    """One noisy shot of a depth-p circuit; ``params = (gammas..., betas...)``."""
    params = np.asarray(params, dtype=float)
    p = len(params) // 2
    sim = build_trajectory_simulator(inst, ansatz, params[:p], params[p:], lam, topology)
    code = int(sim.run(1, noise, seed)[0])
    return code_to_bits(code, inst.n_qubits)
