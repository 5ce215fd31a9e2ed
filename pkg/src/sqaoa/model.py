"""Problem instances, bit layout, the conflict objective and constraint metrics.

An allocation for an ``n``-node, ``m``-channel instance is a binary vector of
length ``n * m`` in node-major order: ``x[i * m + c]`` is 1 when channel ``c``
is assigned to node ``i``.  Every metric below accepts either a single vector
(returns a Python scalar) or a 2-D batch of shape ``(S, n * m)`` (returns an
array of length ``S``).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Sequence

import numpy as np

DEFAULT_LAMBDA = 5.0
MAX_EXACT_QUBITS = 63


class InstanceError(ValueError):
    """Raised for malformed or inconsistent problem instances."""


class DimensionError(ValueError):
    """Raised when an allocation does not match its instance."""


class ConfigurationError(ValueError):
    """Raised when an operation needs data the instance does not carry."""


@dataclass(frozen=True)
class ProblemInstance:
    """Interference graph with per-node channel demands.

    Edges are stored as sorted ``(i, j)`` pairs with ``i < j``.  ``capacities``
    is only required for the dual-constraint (row + column sum) setting.
    """

    n: int
    m: int
    edges: tuple[tuple[int, int], ...]
    demands: tuple[int, ...]
    capacities: tuple[int, ...] | None = None
    name: str = ""
    _edge_array: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n < 1:
            raise InstanceError(f"n must be >= 1, got {self.n}")
        if self.m < 1:
            raise InstanceError(f"m must be >= 1, got {self.m}")

        norm = []
        seen = set()
        for e in self.edges:
            if len(e) != 2:
                raise InstanceError(f"edge {e!r} is not a pair")
            i, j = int(e[0]), int(e[1])
            if i == j:
                raise InstanceError(f"self-loop on node {i}")
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise InstanceError(f"edge ({i}, {j}) out of range for n={self.n}")
            key = (min(i, j), max(i, j))
            if key in seen:
                raise InstanceError(f"duplicate edge {key}")
            seen.add(key)
            norm.append(key)
        object.__setattr__(self, "edges", tuple(norm))

        demands = tuple(int(k) for k in self.demands)
        if len(demands) != self.n:
            raise InstanceError(f"expected {self.n} demands, got {len(demands)}")
        for i, k in enumerate(demands):
            if not 0 <= k <= self.m:
                raise InstanceError(f"demand k[{i}]={k} outside [0, {self.m}]")
        object.__setattr__(self, "demands", demands)

        if self.capacities is not None:
            caps = tuple(int(L) for L in self.capacities)
            if len(caps) != self.m:
                raise InstanceError(f"expected {self.m} capacities, got {len(caps)}")
            for c, L in enumerate(caps):
                if not 0 <= L <= self.n:
                    raise InstanceError(f"capacity L[{c}]={L} outside [0, {self.n}]")
            if sum(caps) != sum(demands):
                raise InstanceError(
                    f"unbalanced dual constraints: sum(k)={sum(demands)} != sum(L)={sum(caps)}"
                )
            object.__setattr__(self, "capacities", caps)

        arr = np.array(self.edges, dtype=np.int64).reshape(-1, 2)
        object.__setattr__(self, "_edge_array", arr)

    @property
    def n_qubits(self) -> int:
        return self.n * self.m

    @property
    def edge_array(self) -> np.ndarray:
        return self._edge_array

    def index(self, i: int, c: int) -> int:
        """Qubit position of variable x_{i,c}."""
        return i * self.m + c

    def degree(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        for i, j in self.edges:
            deg[i] += 1
            deg[j] += 1
        return deg

    def neighbors(self) -> list[list[int]]:
        nbrs: list[list[int]] = [[] for _ in range(self.n)]
        for i, j in self.edges:
            nbrs[i].append(j)
            nbrs[j].append(i)
        return nbrs

    def with_capacities(self, capacities: Sequence[int] | None) -> "ProblemInstance":
        return ProblemInstance(self.n, self.m, self.edges, self.demands,
                               None if capacities is None else tuple(capacities), self.name)

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "n": self.n,
            "m": self.m,
            "edges": [list(e) for e in self.edges],
            "demands": list(self.demands),
            "capacities": None if self.capacities is None else list(self.capacities),
        }


# ---------------------------------------------------------------------------
# instance JSON I/O

_REQUIRED = {"n": int, "m": int, "edges": list, "demands": list}


def instance_from_dict(data: dict, source: str = "<dict>") -> ProblemInstance:
    """Validate a decoded JSON object and build a :class:`ProblemInstance`."""
    if not isinstance(data, dict):
        raise InstanceError(f"{source}: top level must be an object")
    for key, typ in _REQUIRED.items():
        if key not in data:
            raise InstanceError(f"{source}: missing field '{key}'")
        if not isinstance(data[key], typ) or isinstance(data[key], bool):
            raise InstanceError(f"{source}: field '{key}' must be {typ.__name__}")
    unknown = set(data) - set(_REQUIRED) - {"name", "capacities"}
    if unknown:
        raise InstanceError(f"{source}: unknown field(s) {sorted(unknown)}")
    name = data.get("name", "")
    if not isinstance(name, str):
        raise InstanceError(f"{source}: field 'name' must be str")
    for pos, e in enumerate(data["edges"]):
        if (not isinstance(e, list) or len(e) != 2
                or not all(isinstance(v, int) and not isinstance(v, bool) for v in e)):
            raise InstanceError(f"{source}: edges[{pos}] must be a pair of ints, got {e!r}")
    for pos, k in enumerate(data["demands"]):
        if not isinstance(k, int) or isinstance(k, bool):
            raise InstanceError(f"{source}: demands[{pos}] must be int, got {k!r}")
    caps = data.get("capacities")
    if caps is not None:
        if not isinstance(caps, list):
            raise InstanceError(f"{source}: field 'capacities' must be list or null")
        for pos, L in enumerate(caps):
            if not isinstance(L, int) or isinstance(L, bool):
                raise InstanceError(f"{source}: capacities[{pos}] must be int, got {L!r}")
    try:
        return ProblemInstance(
            n=data["n"], m=data["m"],
            edges=tuple(tuple(e) for e in data["edges"]),
            demands=tuple(data["demands"]),
            capacities=None if caps is None else tuple(caps),
            name=name,
        )
    except InstanceError as exc:
        raise InstanceError(f"{source}: {exc}") from None


def load_instance(path: str | Path) -> ProblemInstance:
    path = Path(path)
    text = path.read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InstanceError(f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}") from None
    return instance_from_dict(data, source=str(path))


def save_instance(inst: ProblemInstance, path: str | Path) -> None:
    Path(path).write_text(json.dumps(inst.to_dict(), indent=2) + "\n")


# ---------------------------------------------------------------------------
# bit helpers

def parse_bits(s: str) -> np.ndarray:
    """``"110|010"`` -> ``array([1, 1, 0, 0, 1, 0])``.  Separators are ignored."""
    return np.array([int(ch) for ch in s if ch in "01"], dtype=np.uint8)


def format_bits(x, m: int | None = None) -> str:
    s = "".join(str(int(b)) for b in np.asarray(x).ravel())
    if m:
        s = "|".join(s[i:i + m] for i in range(0, len(s), m))
    return s


def bits_to_code(x) -> int:
    """Integer basis index with bit ``b`` holding qubit ``b``."""
    x = np.asarray(x).ravel()
    return int(sum(int(b) << pos for pos, b in enumerate(x)))


def code_to_bits(code: int, n_qubits: int) -> np.ndarray:
    return np.array([(int(code) >> b) & 1 for b in range(n_qubits)], dtype=np.uint8)


def codes_to_bits(codes, n_qubits: int) -> np.ndarray:
    codes = np.asarray(codes, dtype=np.int64)
    shifts = np.arange(n_qubits, dtype=np.int64)
    return ((codes[:, None] >> shifts) & 1).astype(np.uint8)


def _as_matrix(inst: ProblemInstance, x) -> tuple[np.ndarray, bool]:
    arr = np.asarray(x)
    single = arr.ndim == 1
    if single:
        arr = arr[None, :]
    if arr.ndim != 2 or arr.shape[1] != inst.n_qubits:
        raise DimensionError(
            f"allocation has shape {np.asarray(x).shape}, instance needs length {inst.n_qubits}"
        )
    return arr.reshape(arr.shape[0], inst.n, inst.m).astype(np.int64), single


# ---------------------------------------------------------------------------
# metrics

def conflict_count(inst: ProblemInstance, x):
    """Number of (edge, channel) pairs where both endpoints hold the channel."""
    X, single = _as_matrix(inst, x)
    if len(inst.edges) == 0:
        out = np.zeros(X.shape[0], dtype=np.int64)
    else:
        e = inst.edge_array
        out = (X[:, e[:, 0], :] * X[:, e[:, 1], :]).sum(axis=(1, 2))
    return int(out[0]) if single else out


def node_weights(inst: ProblemInstance, x) -> np.ndarray:
    X, single = _as_matrix(inst, x)
    w = X.sum(axis=2)
    return w[0] if single else w


def node_deviation(inst: ProblemInstance, x):
    """Sum over nodes of ``|weight_i - k_i|``; zero iff every demand is met."""
    X, single = _as_matrix(inst, x)
    dev = np.abs(X.sum(axis=2) - np.asarray(inst.demands)).sum(axis=1)
    return int(dev[0]) if single else dev


def node_feasible(inst: ProblemInstance, x):
    return node_deviation(inst, x) == 0


def channel_loads(inst: ProblemInstance, x) -> np.ndarray:
    X, single = _as_matrix(inst, x)
    loads = X.sum(axis=1)
    return loads[0] if single else loads


def channel_feasible(inst: ProblemInstance, x):
    if inst.capacities is None:
        raise ConfigurationError("channel feasibility needs per-channel capacities")
    ok = np.all(channel_loads(inst, np.asarray(x)) == np.asarray(inst.capacities), axis=-1)
    return bool(ok) if np.ndim(ok) == 0 else ok


def penalty_cost(inst: ProblemInstance, x, lam: float = DEFAULT_LAMBDA):
    """Conflicts plus ``lam * sum_i (weight_i - k_i)**2``."""
    if lam < 0:
        raise ValueError(f"penalty coefficient must be >= 0, got {lam}")
    X, single = _as_matrix(inst, x)
    pen = ((X.sum(axis=2) - np.asarray(inst.demands)) ** 2).sum(axis=1)
    cost = conflict_count(inst, X.reshape(X.shape[0], -1)) + lam * pen
    return float(cost[0]) if single else cost.astype(float)


@dataclass(frozen=True)
class MetricsReport:
    conflicts: int
    node_feasible: bool
    channel_feasible: bool | None
    deviation: int
    penalty_cost: float


def metrics(inst: ProblemInstance, x, lam: float = DEFAULT_LAMBDA) -> MetricsReport:
    x = np.asarray(x)
    dev = node_deviation(inst, x)
    return MetricsReport(
        conflicts=conflict_count(inst, x),
        node_feasible=dev == 0,
        channel_feasible=None if inst.capacities is None else channel_feasible(inst, x),
        deviation=dev,
        penalty_cost=penalty_cost(inst, x, lam),
    )


@dataclass(frozen=True)
class SearchSpaceStats:
    full_dim: int | None
    feasible_count: int | None
    reduction_factor: float
    feasible_fraction: float
    log10_full_dim: float
    log10_feasible_count: float


def search_space_stats(inst: ProblemInstance) -> SearchSpaceStats:
    """Full Hilbert-space size against the node-feasible count ``prod C(m, k_i)``.

    Exact integers are reported up to 63 qubits; past that only the log10
    values and ratios are meaningful and the integer fields are ``None``.
    """
    nq = inst.n_qubits
    log_full = nq * math.log10(2)
    log_feas = sum(math.log10(math.comb(inst.m, k)) for k in inst.demands)
    if nq <= MAX_EXACT_QUBITS:
        full = 2 ** nq
        feas = math.prod(math.comb(inst.m, k) for k in inst.demands)
        return SearchSpaceStats(full, feas, full / feas, feas / full, log_full, log_feas)
    return SearchSpaceStats(None, None, 10 ** (log_full - log_feas),
                            10 ** (log_feas - log_full), log_full, log_feas)


class SampleHistogram:
    """Shot counts over allocations, keyed internally by integer code.

    Codes put qubit ``b`` on bit ``b``; :meth:`as_dict` renders keys as
    layout-order bitstrings.
    """

    def __init__(self, inst: ProblemInstance, codes, counts):
        codes = np.asarray(codes, dtype=np.int64)
        counts = np.asarray(counts, dtype=np.int64)
        order = np.argsort(codes, kind="stable")
        self.inst = inst
        self.codes = codes[order]
        self.counts = counts[order]

    @classmethod
    def from_samples(cls, inst: ProblemInstance, sampled_codes) -> "SampleHistogram":
        codes, counts = np.unique(np.asarray(sampled_codes, dtype=np.int64), return_counts=True)
        return cls(inst, codes, counts)

    @property
    def shots(self) -> int:
        return int(self.counts.sum())

    @cached_property
    def bits(self) -> np.ndarray:
        return codes_to_bits(self.codes, self.inst.n_qubits)

    @cached_property
    def conflicts(self) -> np.ndarray:
        return conflict_count(self.inst, self.bits)

    @cached_property
    def deviations(self) -> np.ndarray:
        return node_deviation(self.inst, self.bits)

    def feasible_mask(self, dual: bool = False) -> np.ndarray:
        ok = self.deviations == 0
        if dual:
            ok = ok & channel_feasible(self.inst, self.bits)
        return ok

    def feasibility_ratio(self, dual: bool = False) -> float:
        return float(self.counts[self.feasible_mask(dual)].sum() / self.shots)

    def channel_feasibility_ratio(self) -> float:
        ok = channel_feasible(self.inst, self.bits)
        return float(self.counts[ok].sum() / self.shots)

    def mean_conflicts(self) -> float:
        return float((self.conflicts * self.counts).sum() / self.shots)

    def mean_penalty_cost(self, lam: float = DEFAULT_LAMBDA) -> float:
        cost = penalty_cost(self.inst, self.bits, lam)
        return float((cost * self.counts).sum() / self.shots)

    def mean_deviation(self) -> float:
        return float((self.deviations * self.counts).sum() / self.shots)

    def best_feasible(self, dual: bool = False) -> tuple[int, np.ndarray] | None:
        """Lowest-conflict feasible sample (ties to the smallest code), or None."""
        ok = np.nonzero(self.feasible_mask(dual))[0]
        if len(ok) == 0:
            return None
        pos = ok[np.argmin(self.conflicts[ok])]
        return int(self.conflicts[pos]), self.bits[pos].copy()

    def as_dict(self) -> dict[str, int]:
        return {format_bits(b): int(c) for b, c in zip(self.bits, self.counts)}

    def __len__(self):
        return len(self.codes)
