"""Statevector engine restricted to a feasible basis.

States over a :class:`~sqaoa.combinatorics.ProductBasis` evolve under the
node-wise XY mixer; states over a :class:`~sqaoa.combinatorics.DualBasis`
evolve under the plaquette mixer.  Amplitudes outside the basis are never
represented, so leaving the feasible subspace is impossible by construction.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import expm_multiply

from .combinatorics import (DualBasis, NotInBasisError, ProductBasis, johnson_adjacency,
                            plaquette_masks)
from .model import ProblemInstance, SampleHistogram

COMPLETE = "complete"
RING = "ring"


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


class SubspaceState:
    """Complex amplitudes indexed by basis rank."""

    def __init__(self, basis, amplitudes):
        self.basis = basis
        self.amplitudes = np.asarray(amplitudes, dtype=complex)
        if self.amplitudes.shape != (basis.size,):
            raise ValueError(f"expected {basis.size} amplitudes, got {self.amplitudes.shape}")

    def copy(self) -> "SubspaceState":
        return SubspaceState(self.basis, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def expectation(self, values) -> float:
        return float(self.probabilities() @ np.asarray(values, dtype=float))

    def to_full(self) -> np.ndarray:
        """Embed into the dense ``2**(n*m)`` vector (small instances only)."""
        nq = self.basis.inst.n_qubits
        if nq > 26:
            raise MemoryError(f"refusing to embed into 2**{nq} amplitudes")
        full = np.zeros(2 ** nq, dtype=complex)
        full[self.basis.codes] = self.amplitudes
        return full


def init_dicke_product(inst: ProblemInstance, basis: ProductBasis) -> SubspaceState:
    """Tensor product of node-wise Dicke states: uniform over the product basis."""
    if basis.inst.demands != inst.demands or basis.inst.m != inst.m:
        raise ValueError("basis does not match instance")
    amp = np.full(basis.size, 1.0 / math.sqrt(basis.size), dtype=complex)
    return SubspaceState(basis, amp)


def init_basis_state(basis, x0) -> SubspaceState:
    r = basis.rank(x0)
    amp = np.zeros(basis.size, dtype=complex)
    amp[r] = 1.0
    return SubspaceState(basis, amp)


def apply_cost_phase(state: SubspaceState, inst: ProblemInstance, gamma: float) -> SubspaceState:
    """Multiply each amplitude by ``exp(-i gamma C)`` with C the conflict count."""
    state.amplitudes *= np.exp(-1j * gamma * state.basis.conflicts)
    return state


def xy_pairs(m: int, topology: str = COMPLETE) -> list[tuple[int, int]]:
    if topology == COMPLETE:
        return [(a, b) for a in range(m) for b in range(a + 1, m)]
    if topology == RING:
        pairs = {tuple(sorted((c, (c + 1) % m))) for c in range(m) if m > 1}
        return sorted(p for p in pairs if p[0] != p[1])
    raise ValueError(f"unknown XY mixer topology {topology!r}")


@lru_cache(maxsize=None)
def _xy_eigensystem(m: int, k: int, topology: str):
    H = johnson_adjacency(m, k, xy_pairs(m, topology))
    w, V = np.linalg.eigh(H)
    return H, w, V


@dataclass(frozen=True)
class XYMixerSpec:
    """Per-node XY couplings; ``topology`` is ``"complete"`` or ``"ring"``."""

    m: int
    demands: tuple[int, ...]
    topology: str = COMPLETE

    @classmethod
    def for_instance(cls, inst: ProblemInstance, topology: str = COMPLETE) -> "XYMixerSpec":
        xy_pairs(inst.m, topology)
        return cls(inst.m, inst.demands, topology)

    def hamiltonian(self, node: int) -> np.ndarray:
        return _xy_eigensystem(self.m, self.demands[node], self.topology)[0]

    def propagator(self, node: int, beta: float) -> np.ndarray:
        _, w, V = _xy_eigensystem(self.m, self.demands[node], self.topology)
        return (V * np.exp(-1j * beta * w)) @ V.conj().T


def apply_xy_mixer(state: SubspaceState, spec: XYMixerSpec, beta: float) -> SubspaceState:
    """Exact ``prod_i exp(-i beta H_XY^(i))``, one small matrix per node register."""
    basis = state.basis
    if not isinstance(basis, ProductBasis):
        raise TypeError("XY mixer needs a state over a ProductBasis")
    if basis.inst.demands != spec.demands or basis.inst.m != spec.m:
        raise ValueError("mixer spec does not match basis")
    psi = state.amplitudes.reshape(basis.dims)
    for i in range(len(basis.dims)):
        if basis.dims[i] == 1:
            continue
        U = spec.propagator(i, beta)
        psi = np.moveaxis(np.tensordot(U, psi, axes=([1], [i])), 0, i)
    state.amplitudes = np.ascontiguousarray(psi).reshape(-1)
    return state


@dataclass(frozen=True)
class PlaquetteSpec:
    """Ordered plaquettes ``(i, j, c, c')`` and the rotation angle."""

    plaquettes: tuple[tuple[int, int, int, int], ...]
    beta: float

    @classmethod
    def for_instance(cls, inst: ProblemInstance, beta: float) -> "PlaquetteSpec":
        return cls(tuple(p[:4] for p in plaquette_masks(inst)), beta)


def apply_plaquette_layer(state: SubspaceState, spec: PlaquetteSpec) -> SubspaceState:
    """Sequential plaquette rotations, each ``exp(-i beta (|1001><0110| + h.c.))``."""
    basis = state.basis
    if not isinstance(basis, DualBasis):
        raise TypeError("plaquette layer needs a state over a DualBasis")
    pairs = basis.plaquette_pairs
    if len(pairs) != len(spec.plaquettes):
        raise ValueError("plaquette spec does not match basis")
    c, s = math.cos(spec.beta), -1j * math.sin(spec.beta)
    amp = state.amplitudes
    for sel, partner in pairs:
        if len(sel) == 0:
            continue
        a = amp[sel]
        b = amp[partner]
        amp[sel] = c * a + s * b
        amp[partner] = c * b + s * a
    return state


def dual_mixer_hamiltonian(basis: DualBasis) -> sp.csr_matrix:
    rows, cols = [], []
    for sel, partner in basis.plaquette_pairs:
        rows.extend([sel, partner])
        cols.extend([partner, sel])
    if rows:
        r = np.concatenate(rows)
        col = np.concatenate(cols)
    else:
        r = col = np.zeros(0, dtype=np.int64)
    data = np.ones(len(r))
    return sp.csr_matrix((data, (r, col)), shape=(basis.size, basis.size))


def apply_dual_mixer_exact(state: SubspaceState, beta: float) -> SubspaceState:
    """``exp(-i beta H_mix^dual)`` applied without splitting into plaquettes."""
    H = dual_mixer_hamiltonian(state.basis)
    state.amplitudes = expm_multiply(-1j * beta * H, state.amplitudes)
    return state


def sample_indices(probs: np.ndarray, shots: int, rng: np.random.Generator) -> np.ndarray:
    """Categorical draws by inverse CDF; ``probs`` need not be exactly normalized."""
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    cdf = np.cumsum(probs)
    u = rng.random(shots) * cdf[-1]
    return np.minimum(np.searchsorted(cdf, u, side="right"), len(probs) - 1)


def sample(state: SubspaceState, shots: int, seed=None) -> SampleHistogram:
    rng = make_rng(seed)
    idx = sample_indices(state.probabilities(), shots, rng)
    return SampleHistogram.from_samples(state.basis.inst, state.basis.codes[idx])


__all__ = [
    "COMPLETE", "RING", "SubspaceState", "XYMixerSpec", "PlaquetteSpec", "NotInBasisError",
    "init_dicke_product", "init_basis_state", "apply_cost_phase", "apply_xy_mixer",
    "apply_plaquette_layer", "apply_dual_mixer_exact", "dual_mixer_hamiltonian",
    "sample", "sample_indices", "make_rng", "xy_pairs",
]
