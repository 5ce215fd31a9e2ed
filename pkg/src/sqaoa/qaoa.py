"""Variational loop: shot-based cost estimation, Nelder-Mead parameter search
and (gamma, beta) grid scans for the three ansatz families."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.optimize import minimize

from . import fullspace, subspace
from .combinatorics import enumerate_dual_basis, greedy_dual_fill, product_basis
from .model import DEFAULT_LAMBDA, ProblemInstance, SampleHistogram

STANDARD = "standard"
DICKE_XY = "dicke-xy"
DUAL = "dual"
KINDS = (STANDARD, DICKE_XY, DUAL)

SIMPLEX_EDGE = 0.3


@dataclass(frozen=True)
class AnsatzConfig:
    kind: str = DICKE_XY
    depth: int = 1
    lam: float = DEFAULT_LAMBDA
    topology: str = subspace.COMPLETE
    shots: int = 1024
    seed: int = 42
    exact_dual: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown ansatz kind {self.kind!r}; expected one of {KINDS}")
        if self.depth < 1:
            raise ValueError(f"depth must be >= 1, got {self.depth}")
        if self.shots < 1:
            raise ValueError(f"shots must be >= 1, got {self.shots}")
        if self.lam < 0:
            raise ValueError(f"lambda must be >= 0, got {self.lam}")


def split_params(params, depth: int) -> tuple[np.ndarray, np.ndarray]:
    params = np.asarray(params, dtype=float).ravel()
    if len(params) != 2 * depth:
        raise ValueError(f"expected {2 * depth} parameters for depth {depth}, got {len(params)}")
    return params[:depth], params[depth:]


class Ansatz:
    """Prepares states and shot estimates for one (instance, config) pair.

    Bases, the canonical dual start state and cost tables are built once and
    reused across evaluations.
    """

    def __init__(self, inst: ProblemInstance, config: AnsatzConfig):
        self.inst = inst
        self.config = config
        if config.kind == STANDARD and inst.n_qubits > fullspace.MAX_FULL_QUBITS:
            raise MemoryError(f"{inst.n_qubits} qubits exceeds the full-space guard")

    @cached_property
    def basis(self):
        if self.config.kind == DICKE_XY:
            return product_basis(self.inst)
        if self.config.kind == DUAL:
            return enumerate_dual_basis(self.inst)
        return None

    @cached_property
    def x0(self) -> np.ndarray:
        return greedy_dual_fill(self.inst)

    @cached_property
    def _xy_spec(self):
        return subspace.XYMixerSpec.for_instance(self.inst, self.config.topology)

    def state(self, params):
        gammas, betas = split_params(params, self.config.depth)
        kind = self.config.kind
        if kind == STANDARD:
            return fullspace.standard_qaoa_state(self.inst, gammas, betas, self.config.lam)
        if kind == DICKE_XY:
            st = subspace.init_dicke_product(self.inst, self.basis)
            for g, b in zip(gammas, betas):
                subspace.apply_cost_phase(st, self.inst, g)
                subspace.apply_xy_mixer(st, self._xy_spec, b)
            return st
        st = subspace.init_basis_state(self.basis, self.x0)
        for g, b in zip(gammas, betas):
            subspace.apply_cost_phase(st, self.inst, g)
            if self.config.exact_dual:
                subspace.apply_dual_mixer_exact(st, b)
            else:
                subspace.apply_plaquette_layer(st, subspace.PlaquetteSpec.for_instance(self.inst, b))
        return st

    def sample(self, params, shots: int | None = None, seed=None) -> SampleHistogram:
        shots = self.config.shots if shots is None else shots
        seed = self.config.seed if seed is None else seed
        st = self.state(params)
        if self.config.kind == STANDARD:
            return fullspace.sample(st, self.inst, shots, seed)
        return subspace.sample(st, shots, seed)

    def objective(self, hist: SampleHistogram) -> float:
        if self.config.kind == STANDARD:
            return hist.mean_penalty_cost(self.config.lam)
        return hist.mean_conflicts()

    def expectation(self, params) -> float:
        """Exact expectation of the sampled objective from amplitudes."""
        st = self.state(params)
        if self.config.kind == STANDARD:
            return float(st.probabilities() @ fullspace.penalty_diagonal(self.inst, self.config.lam))
        return st.expectation(st.basis.conflicts)

    def feasibility(self, hist: SampleHistogram) -> float:
        return hist.feasibility_ratio(dual=self.config.kind == DUAL)

    def estimate(self, params, seed=None) -> tuple[float, SampleHistogram]:
        hist = self.sample(params, seed=seed)
        return self.objective(hist), hist


def estimate_cost(inst: ProblemInstance, config: AnsatzConfig, params,
                  seed=None) -> tuple[float, SampleHistogram]:
    """Shot-mean objective: penalty cost for ``standard``, conflicts otherwise."""
    return Ansatz(inst, config).estimate(params, seed)


@dataclass
class TraceEntry:
    params: np.ndarray
    cost: float
    feasibility: float
    best_feasible: float  # inf until a feasible sample has been seen


@dataclass
class OptimizationResult:
    best_params: np.ndarray
    best_cost: float
    trace: list[TraceEntry]
    histogram: SampleHistogram = field(repr=False)
    best_feasible_conflict: int | None
    witness: np.ndarray | None

    @property
    def feasibility(self) -> float:
        return self.histogram.feasibility_ratio()


def initial_params(depth: int, seed) -> np.ndarray:
    """Uniform draws from ``[0, pi)`` for every angle."""
    return np.random.default_rng(seed).uniform(0.0, math.pi, size=2 * depth)


def optimize(inst: ProblemInstance, config: AnsatzConfig, budget: int = 80,
             x0=None) -> OptimizationResult:
    """Nelder-Mead over shot-estimated cost with at most ``budget`` evaluations.

    Evaluation ``t`` samples with a seed spawned from ``config.seed``, so a
    given config always reproduces the same trace.
    """
    if not 1 <= budget <= 10_000:
        raise ValueError(f"budget must be in [1, 10000], got {budget}")
    ans = Ansatz(inst, config)
    x0 = initial_params(config.depth, config.seed) if x0 is None else np.asarray(x0, float)
    dim = len(x0)
    seeds = iter(np.random.SeedSequence(config.seed).spawn(budget))
    dual = config.kind == DUAL

    trace: list[TraceEntry] = []
    best = {"cost": math.inf, "params": x0, "hist": None}
    feas = {"conflict": None, "bits": None}

    def f(x):
        if len(trace) >= budget:
            return best["cost"]
        cost, hist = ans.estimate(x, seed=next(seeds))
        found = hist.best_feasible(dual=dual)
        if found is not None and (feas["conflict"] is None or found[0] < feas["conflict"]):
            feas["conflict"], feas["bits"] = found
        if cost < best["cost"] or best["hist"] is None:
            best.update(cost=cost, params=np.array(x, float), hist=hist)
        trace.append(TraceEntry(np.array(x, float), cost, ans.feasibility(hist),
                                math.inf if feas["conflict"] is None else feas["conflict"]))
        return cost

    if budget == 1:
        f(x0)
    else:
        simplex = np.vstack([x0] + [x0 + SIMPLEX_EDGE * np.eye(dim)[d] for d in range(dim)])
        minimize(f, x0, method="Nelder-Mead",
                 options={"maxfev": budget, "initial_simplex": simplex,
                          "xatol": 1e-8, "fatol": 1e-10, "adaptive": False})
    return OptimizationResult(best["params"], best["cost"], trace, best["hist"],
                              feas["conflict"], feas["bits"])


@dataclass
class GridScan:
    gammas: np.ndarray
    betas: np.ndarray
    mean_conflict: np.ndarray
    node_feas: np.ndarray
    channel_feas: np.ndarray

    def rows(self):
        """``(gamma, beta, mean_conflict, node_feas, channel_feas)`` with gamma outer."""
        for a, g in enumerate(self.gammas):
            for b, be in enumerate(self.betas):
                yield (float(g), float(be), float(self.mean_conflict[a, b]),
                       float(self.node_feas[a, b]), float(self.channel_feas[a, b]))


def grid_scan(inst: ProblemInstance, config: AnsatzConfig, gamma_range=(0.0, math.pi),
              beta_range=(0.0, math.pi), steps: int = 9) -> GridScan:
    """Depth-1 scan on an inclusive ``steps x steps`` mesh; each cell samples
    with its own seed spawned from ``config.seed``."""
    if steps < 2:
        raise ValueError(f"steps must be >= 2, got {steps}")
    if config.depth != 1:
        raise ValueError("grid scans are defined for depth 1")
    ans = Ansatz(inst, config)
    gammas = np.linspace(*gamma_range, steps)
    betas = np.linspace(*beta_range, steps)
    seeds = np.random.SeedSequence(config.seed).spawn(steps * steps)
    mc = np.empty((steps, steps))
    nf = np.empty((steps, steps))
    cf = np.full((steps, steps), np.nan)
    for a, g in enumerate(gammas):
        for b, be in enumerate(betas):
            hist = ans.sample([g, be], seed=seeds[a * steps + b])
            mc[a, b] = hist.mean_conflicts()
            nf[a, b] = hist.feasibility_ratio()
            if inst.capacities is not None:
                cf[a, b] = hist.channel_feasibility_ratio()
    return GridScan(gammas, betas, mc, nf, cf)
