"""Feasible bases: Johnson spaces, their tensor product, Dicke amplitudes and
the dual (row + column sum) basis.

Register masks use bit ``c`` for channel ``c``; within a node the masks of
weight ``k`` are listed in increasing integer order, which is colexicographic
order of the corresponding ``k``-subsets.
"""
from __future__ import annotations

import math
import warnings
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from .model import (ConfigurationError, ProblemInstance, bits_to_code, codes_to_bits,
                    conflict_count)

MAX_REGISTER = 30


class NotInBasisError(KeyError):
    """Raised when ranking an allocation that is not a member of a basis."""


class InfeasibleFillError(RuntimeError):
    """Raised when the greedy dual fill leaves demand unassigned."""


@dataclass(frozen=True)
class JohnsonBasis:
    """All ``m``-bit masks of Hamming weight ``k``, in colex order."""

    m: int
    k: int
    states: np.ndarray = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.states)

    def rank(self, mask: int) -> int:
        """Combinatorial-number-system rank of a weight-``k`` mask."""
        mask = int(mask)
        if mask < 0 or mask >> self.m or bin(mask).count("1") != self.k:
            raise NotInBasisError(f"mask {mask:b} is not in J({self.m},{self.k})")
        r, j = 0, 0
        for c in range(self.m):
            if (mask >> c) & 1:
                j += 1
                r += math.comb(c, j)
        return r

    @cached_property
    def _lookup(self) -> dict[int, int]:
        return {int(s): r for r, s in enumerate(self.states)}

    def rank_many(self, masks) -> np.ndarray:
        look = self._lookup
        try:
            return np.array([look[int(s)] for s in np.ravel(masks)], dtype=np.int64)
        except KeyError as exc:
            raise NotInBasisError(f"mask {exc.args[0]:b} is not in J({self.m},{self.k})") from None


@lru_cache(maxsize=None)
def enumerate_johnson(m: int, k: int) -> JohnsonBasis:
    if not 0 <= m <= MAX_REGISTER:
        raise ValueError(f"register width must be in [0, {MAX_REGISTER}], got {m}")
    if not 0 <= k <= m:
        raise ValueError(f"weight k={k} outside [0, {m}]")
    states = []
    # Gosper's hack walks weight-k masks in increasing order.
    if k == 0:
        states = [0]
    else:
        s = (1 << k) - 1
        limit = 1 << m
        while s < limit:
            states.append(s)
            c = s & -s
            r = s + c
            s = (((r ^ s) >> 2) // c) | r
    arr = np.array(states, dtype=np.int64)
    arr.setflags(write=False)
    return JohnsonBasis(m, k, arr)


def johnson_adjacency(m: int, k: int, pairs=None) -> np.ndarray:
    """Restricted XY Hamiltonian on ``J(m, k)``.

    Entry ``(r, s)`` is 1 when masks ``r`` and ``s`` differ by moving one
    excitation along an allowed channel pair.  ``pairs=None`` allows every
    pair, which gives the Johnson-graph adjacency matrix.
    """
    jb = enumerate_johnson(m, k)
    if pairs is None:
        pairs = [(a, b) for a in range(m) for b in range(a + 1, m)]
    look = jb._lookup
    H = np.zeros((jb.size, jb.size))
    for r, s in enumerate(jb.states):
        s = int(s)
        for a, b in pairs:
            if ((s >> a) & 1) != ((s >> b) & 1):
                t = s ^ ((1 << a) | (1 << b))
                H[r, look[t]] = 1.0
    return H


class ProductBasis:
    """Tensor product of per-node Johnson bases, ranked in C order (node 0 slowest)."""

    def __init__(self, inst: ProblemInstance):
        self.inst = inst
        self.per_node = [enumerate_johnson(inst.m, k) for k in inst.demands]
        self.dims = tuple(jb.size for jb in self.per_node)
        self.size = math.prod(self.dims)
        self.strides = tuple(math.prod(self.dims[i + 1:]) for i in range(inst.n))

    def __len__(self):
        return self.size

    def unrank(self, index: int) -> np.ndarray:
        if not 0 <= index < self.size:
            raise IndexError(f"rank {index} outside [0, {self.size})")
        return self.bits[index].copy()

    def rank(self, x) -> int:
        x = np.asarray(x).ravel()
        m = self.inst.m
        if len(x) != self.inst.n_qubits:
            raise NotInBasisError(f"length {len(x)} != {self.inst.n_qubits}")
        r = 0
        for i, jb in enumerate(self.per_node):
            mask = bits_to_code(x[i * m:(i + 1) * m])
            r += jb.rank(mask) * self.strides[i]
        return r

    @cached_property
    def node_masks(self) -> np.ndarray:
        """``(size, n)`` register masks per basis state."""
        idx = np.unravel_index(np.arange(self.size), self.dims)
        return np.stack([jb.states[ix] for jb, ix in zip(self.per_node, idx)], axis=1)

    @cached_property
    def codes(self) -> np.ndarray:
        shifts = np.arange(self.inst.n, dtype=np.int64) * self.inst.m
        return (self.node_masks << shifts).sum(axis=1)

    @cached_property
    def bits(self) -> np.ndarray:
        return codes_to_bits(self.codes, self.inst.n_qubits)

    @cached_property
    def conflicts(self) -> np.ndarray:
        return conflict_count(self.inst, self.bits)


def product_basis(inst: ProblemInstance) -> ProductBasis:
    return ProductBasis(inst)


class DualBasis:
    """Allocations meeting both row sums ``k`` and column sums ``L``, sorted by code."""

    def __init__(self, inst: ProblemInstance, codes: np.ndarray):
        self.inst = inst
        self.codes = np.asarray(codes, dtype=np.int64)
        self.size = len(self.codes)

    def __len__(self):
        return self.size

    @cached_property
    def bits(self) -> np.ndarray:
        return codes_to_bits(self.codes, self.inst.n_qubits)

    def rank(self, x) -> int:
        code = bits_to_code(x)
        pos = int(np.searchsorted(self.codes, code))
        if pos >= self.size or self.codes[pos] != code:
            raise NotInBasisError("allocation is not in the dual-feasible basis")
        return pos

    def rank_codes(self, codes) -> np.ndarray:
        """Ranks of many codes; ``-1`` for codes outside the basis."""
        codes = np.asarray(codes, dtype=np.int64)
        pos = np.searchsorted(self.codes, codes)
        pos_c = np.minimum(pos, self.size - 1)
        hit = self.codes[pos_c] == codes
        return np.where(hit, pos_c, -1)

    def unrank(self, index: int) -> np.ndarray:
        return self.bits[index].copy()

    @cached_property
    def conflicts(self) -> np.ndarray:
        return conflict_count(self.inst, self.bits)

    @cached_property
    def plaquette_pairs(self) -> list[tuple[np.ndarray, np.ndarray]]:
        return plaquette_pairs(self)


def _require_capacities(inst: ProblemInstance) -> tuple[int, ...]:
    if inst.capacities is None:
        raise ConfigurationError("dual basis needs per-channel capacities")
    if sum(inst.capacities) != sum(inst.demands):
        raise ConfigurationError("sum of demands must equal sum of capacities")
    return inst.capacities


def enumerate_dual_basis(inst: ProblemInstance) -> DualBasis:
    """Backtrack over rows, choosing weight-``k_i`` masks that fit the
    remaining column capacities."""
    caps = _require_capacities(inst)
    n, m = inst.n, inst.m
    cand = [enumerate_johnson(m, k).states.tolist() for k in inst.demands]
    out: list[int] = []
    remaining = list(caps)

    def rec(i: int, code: int):
        if i == n:
            if not any(remaining):
                out.append(code)
            return
        rows_left = n - i - 1
        for mask in cand[i]:
            if any(((mask >> c) & 1) > remaining[c] for c in range(m)):
                continue
            for c in range(m):
                remaining[c] -= (mask >> c) & 1
            if all(r <= rows_left for r in remaining):
                rec(i + 1, code | (mask << (i * m)))
            for c in range(m):
                remaining[c] += (mask >> c) & 1

    rec(0, 0)
    return DualBasis(inst, np.unique(np.array(out, dtype=np.int64)))


def greedy_dual_fill(inst: ProblemInstance, fallback: bool = True) -> np.ndarray:
    """Canonical dual-feasible matrix by row-major greedy placement.

    Nodes are visited in ascending order and channels in ascending order; a
    one goes in whenever both the node's remaining demand and the channel's
    remaining capacity are positive.  If that leaves demand unmet the first
    member of the dual basis is returned instead (with a warning), or
    :class:`InfeasibleFillError` is raised when ``fallback`` is false.
    """
    caps = _require_capacities(inst)
    n, m = inst.n, inst.m
    X = np.zeros((n, m), dtype=np.uint8)
    rem_k = list(inst.demands)
    rem_L = list(caps)
    for i in range(n):
        for c in range(m):
            if rem_k[i] > 0 and rem_L[c] > 0:
                X[i, c] = 1
                rem_k[i] -= 1
                rem_L[c] -= 1
    if any(rem_k) or any(rem_L):
        msg = f"greedy fill left demand {rem_k} / capacity {rem_L} unassigned"
        if not fallback:
            raise InfeasibleFillError(msg)
        basis = enumerate_dual_basis(inst)
        if basis.size == 0:
            raise InfeasibleFillError(msg + "; dual basis is empty")
        warnings.warn(msg + "; using first dual-basis element", stacklevel=2)
        return basis.unrank(0)
    return X.ravel()


def plaquette_masks(inst: ProblemInstance) -> list[tuple[int, int, int, int, int, int]]:
    """Plaquettes in lexicographic ``(i, j, c, c')`` order with their bit masks.

    Each entry is ``(i, j, c, c2, mask_1001, mask_0110)`` where the masks select
    the qubits set in the two exchange patterns over
    ``(i,c), (i,c'), (j,c), (j,c')``.
    """
    n, m = inst.n, inst.m
    out = []
    for i in range(n):
        for j in range(i + 1, n):
            for c in range(m):
                for c2 in range(c + 1, m):
                    a = (1 << inst.index(i, c)) | (1 << inst.index(j, c2))
                    b = (1 << inst.index(i, c2)) | (1 << inst.index(j, c))
                    out.append((i, j, c, c2, a, b))
    return out


def plaquette_pairs(basis: DualBasis) -> list[tuple[np.ndarray, np.ndarray]]:
    """For every plaquette, ranks of the ``|1001>`` states and their ``|0110>`` partners."""
    codes = basis.codes
    pairs = []
    for *_, a, b in plaquette_masks(basis.inst):
        both = a | b
        sel = np.nonzero((codes & both) == a)[0]
        partner = basis.rank_codes(codes[sel] ^ both)
        if np.any(partner < 0):
            raise AssertionError("plaquette move left the dual basis")
        pairs.append((sel, partner))
    return pairs


def reachable_component(basis: DualBasis, x0) -> np.ndarray:
    """Ranks reachable from ``x0`` by plaquette exchanges (BFS), sorted."""
    start = basis.rank(x0)
    nbrs: list[list[int]] = [[] for _ in range(basis.size)]
    for sel, partner in basis.plaquette_pairs:
        for a, b in zip(sel.tolist(), partner.tolist()):
            nbrs[a].append(b)
            nbrs[b].append(a)
    seen = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in nbrs[u]:
            if v not in seen:
                seen.add(v)
                queue.append(v)
    return np.array(sorted(seen), dtype=np.int64)


@dataclass(frozen=True)
class DickeVector:
    """Equal superposition of all ``m``-qubit basis states of weight ``k``."""

    m: int
    k: int

    @property
    def support(self) -> np.ndarray:
        return enumerate_johnson(self.m, self.k).states

    @property
    def amplitude(self) -> float:
        return 1.0 / math.sqrt(math.comb(self.m, self.k))

    def to_dense(self) -> np.ndarray:
        vec = np.zeros(2 ** self.m, dtype=complex)
        vec[self.support] = self.amplitude
        return vec


def dicke(m: int, k: int) -> DickeVector:
    if not 0 <= k <= m:
        raise ValueError(f"Dicke weight k={k} outside [0, {m}]")
    enumerate_johnson(m, k)
    return DickeVector(m, k)
