"""Attack algorithms: LP-based constraint generation and two greedy baselines.

All three algorithms produce a nonnegative per-edge perturbation vector that
makes the protected path the shortest route between its endpoints, with every
competing path at least `buffer` longer. Edges of the protected path are
never perturbed.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import lp
from .graph import Graph, GraphError, Path, _coerce_delta, path_length
from .oracle import DEFAULT_EPS, constraint_oracle

ALGO_PATHPERTURB = "pathperturb"
ALGO_GREEDY_FIRST = "greedy_first"
ALGO_GREEDY_MIN = "greedy_min"
ALGORITHMS = (ALGO_PATHPERTURB, ALGO_GREEDY_FIRST, ALGO_GREEDY_MIN)


@dataclass(frozen=True)
class AttackConfig:
    """Shared knobs: required margin, tolerance, and safety caps.

    budget_cap never changes what the optimizer computes; it only marks the
    result as unsuccessful when the minimized budget exceeds the cap.
    """

    buffer: float
    eps: float = DEFAULT_EPS
    budget_cap: Optional[float] = None
    max_iterations: int = 10_000

    def __post_init__(self):
        if self.buffer < 0:
            raise GraphError("buffer must be nonnegative")
        if self.eps < 0:
            raise GraphError("eps must be nonnegative")
        if self.max_iterations < 1:
            raise GraphError("max_iterations must be positive")


@dataclass(frozen=True, eq=False)
class AttackResult:
    delta: np.ndarray
    budget: float
    iterations: int
    constraints_generated: int
    wall_time: float
    algorithm: str
    success: bool


def pathperturb(g: Graph, pstar: Path, cfg: AttackConfig) -> AttackResult:
    """Constraint-generation attack: minimal total perturbation.

    Alternates solving the covering LP over the constraints generated so far
    with an oracle call that either certifies optimality or contributes the
    currently shortest competing path as a new row. The first solve runs over
    an empty row set (the protected path itself contributes no row: all its
    variables are eliminated).
    """
    t0 = time.perf_counter()
    pstar = g.path(pstar.nodes)
    delta = np.zeros(g.n_edges)
    rows: list[Path] = []
    seen: set[Path] = set()
    previous_objective = -1.0
    iterations = 0
    success = True
    while True:
        if iterations >= cfg.max_iterations:
            success = False
            break
        model = lp.build_model(g, pstar, rows, cfg.buffer)
        solution = lp.solve(model)
        if solution.status != lp.STATUS_OPTIMAL:
            raise lp.SimplexError(f"unexpected LP status {solution.status}")
        if solution.objective_value < previous_objective - 1e-9:
            raise lp.SimplexError("LP objective decreased after adding a constraint")
        previous_objective = solution.objective_value
        delta = solution.delta
        iterations += 1
        result = constraint_oracle(g, delta, pstar, cfg.buffer, cfg.eps)
        if result.is_empty:
            break
        if result.path in seen:
            raise lp.SimplexError("oracle repeated a constraint; tolerances are inconsistent")
        seen.add(result.path)
        rows.append(result.path)
    budget = float(delta.sum())
    if cfg.budget_cap is not None and budget > cfg.budget_cap + cfg.eps:
        success = False
    return AttackResult(
        delta=delta,
        budget=budget,
        iterations=iterations,
        constraints_generated=len(rows),
        wall_time=time.perf_counter() - t0,
        algorithm=ALGO_PATHPERTURB,
        success=success,
    )


def _pick_first(candidates: list[int], weights: np.ndarray) -> int:
    return candidates[0]


def _pick_min_weight(candidates: list[int], weights: np.ndarray) -> int:
    return min(candidates, key=lambda eid: (weights[eid], eid))


def _greedy(
    g: Graph,
    pstar: Path,
    cfg: AttackConfig,
    pick: Callable[[list[int], np.ndarray], int],
    algorithm: str,
) -> AttackResult:
    t0 = time.perf_counter()
    pstar = g.path(pstar.nodes)
    protected = frozenset(pstar.edge_ids)
    threshold = path_length(g, pstar) + cfg.buffer
    delta = np.zeros(g.n_edges)
    iterations = 0
    success = True
    while True:
        result = constraint_oracle(g, delta, pstar, cfg.buffer, cfg.eps)
        if result.is_empty:
            break
        if iterations >= cfg.max_iterations:
            success = False
            break
        p = result.path
        candidates = [eid for eid in p.edge_ids if eid not in protected]
        if not candidates:
            raise RuntimeError("violating path has no edge off the protected path")
        eid = pick(candidates, g.weights + delta)
        increment = threshold - result.perturbed_length
        if increment <= 0:
            raise RuntimeError("oracle returned a non-violating path")
        delta[eid] += increment
        iterations += 1
        raised = path_length(g, p, delta)
        if not (raised > result.perturbed_length and abs(raised - threshold) <= 1e-9):
            raise RuntimeError(
                f"increment failed to raise the path to the threshold ({raised} vs {threshold})"
            )
    budget = float(delta.sum())
    if cfg.budget_cap is not None and budget > cfg.budget_cap + cfg.eps:
        success = False
    return AttackResult(
        delta=delta,
        budget=budget,
        iterations=iterations,
        constraints_generated=0,
        wall_time=time.perf_counter() - t0,
        algorithm=algorithm,
        success=success,
    )


def greedy_first(g: Graph, pstar: Path, cfg: AttackConfig) -> AttackResult:
    """Baseline: raise the first edge (in traversal order) of the violating
    path that is not on the protected path, enough to hit the threshold."""
    return _greedy(g, pstar, cfg, _pick_first, ALGO_GREEDY_FIRST)


def greedy_min(g: Graph, pstar: Path, cfg: AttackConfig) -> AttackResult:
    """Baseline: raise the lightest off-path edge (current perturbed weight,
    ties to the smallest edge id) of the violating path."""
    return _greedy(g, pstar, cfg, _pick_min_weight, ALGO_GREEDY_MIN)


def run_algorithm(name: str, g: Graph, pstar: Path, cfg: AttackConfig) -> AttackResult:
    """Dispatch by algorithm tag."""
    try:
        fn = _DISPATCH[name]
    except KeyError:
        raise GraphError(f"unknown algorithm {name!r}; expected one of {ALGORITHMS}") from None
    return fn(g, pstar, cfg)


_DISPATCH = {
    ALGO_PATHPERTURB: pathperturb,
    ALGO_GREEDY_FIRST: greedy_first,
    ALGO_GREEDY_MIN: greedy_min,
}


def apply_perturbation(g: Graph, delta) -> Graph:
    """New graph with weights w + delta; the input graph is untouched."""
    arr = _coerce_delta(g, delta)
    if arr is None:
        raise GraphError("delta is required")
    if g.n_edges and float(arr.min()) < 0:
        raise GraphError("delta entries must be nonnegative")
    return g.with_weights(g.weights + arr)


@dataclass(frozen=True)
class VerifyResult:
    ok: bool
    reason: Optional[str] = None
    violating_path: Optional[Path] = None
    violating_length: Optional[float] = None

    def __bool__(self) -> bool:
        return self.ok


def verify_attack(g: Graph, pstar: Path, delta, buffer: float, eps: float = DEFAULT_EPS) -> VerifyResult:
    """Check that delta is a valid attack for pstar.

    Valid means: delta is nonnegative, exactly zero on pstar's edges, and
    the oracle finds no competing path shorter than the threshold.
    """
    try:
        pstar = g.path(pstar.nodes)
        arr = _coerce_delta(g, delta)
    except GraphError as exc:
        return VerifyResult(False, reason=str(exc))
    if arr is None:
        arr = np.zeros(g.n_edges)
    if g.n_edges and float(arr.min()) < 0:
        return VerifyResult(False, reason="negative perturbation entry")
    for eid in pstar.edge_ids:
        if arr[eid] != 0.0:
            return VerifyResult(False, reason=f"perturbed protected edge {eid}")
    result = constraint_oracle(g, arr, pstar, buffer, eps)
    if result.is_empty:
        return VerifyResult(True)
    return VerifyResult(
        False,
        reason="a competing path is still too short",
        violating_path=result.path,
        violating_length=result.perturbed_length,
    )
