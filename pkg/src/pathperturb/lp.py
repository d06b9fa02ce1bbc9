"""Linear program for forcing a target path: model builder and simplex solver.

The model minimizes the total added weight subject to one covering row per
competing path: the perturbation mass placed on that path's free edges must
push its length to the target length plus the buffer. Edges on the protected
path are not variables at all; they are eliminated at build time, which makes
"never perturb the protected path" a structural fact of every solution
rather than a constraint the solver must respect numerically.

The solver is a self-contained two-phase primal simplex on a dense numpy
tableau. Models generated here are small (one row per generated constraint),
so an auditable dense implementation is preferred over an external solver.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .graph import Graph, GraphError, Path, path_length

DEFAULT_EPS_FEAS = 1e-9
DEFAULT_EPS_PIVOT = 1e-10

STATUS_OPTIMAL = "optimal"
STATUS_INFEASIBLE = "infeasible"
STATUS_UNBOUNDED = "unbounded"

# Degenerate pivots tolerated before switching to Bland's anti-cycling rule.
_BLAND_THRESHOLD = 1000


class SimplexError(RuntimeError):
    """Internal solver failure (iteration cap or inconsistent tableau)."""


class LpRow(NamedTuple):
    """One covering row: sum of delta over `support` must reach `rhs`."""

    support: tuple[int, ...]
    rhs: float


@dataclass(frozen=True)
class LpModel:
    n_vars: int
    fixed_zero: frozenset[int]
    rows: tuple[LpRow, ...]

    def dump(self) -> str:
        """Plain-text dump for external cross-checking.

        One line per row in the form ``ge <rhs> : e<i> e<j> ...``, preceded
        by the objective, variable bounds, and the eliminated edges.
        """
        lines = [
            "min sum delta",
            f"vars {self.n_vars}",
            "bounds delta >= 0",
            "fixed " + " ".join(f"e{e}" for e in sorted(self.fixed_zero)),
        ]
        for support, rhs in self.rows:
            lines.append(f"ge {float(rhs)!r} : " + " ".join(f"e{e}" for e in support))
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class LpSolution:
    status: str
    delta: np.ndarray
    objective_value: float


def build_model(g: Graph, pstar: Path, constraint_paths: Sequence[Path], buffer: float) -> LpModel:
    """Build the covering LP for the given competing paths.

    Each row keeps only edges off the protected path; the right-hand side is
    the gap between the required threshold and the competing path's original
    length. Rows with nonpositive gap are kept in the model (they are
    trivially satisfied and the solver drops them from the tableau).
    """
    if buffer < 0:
        raise GraphError("buffer must be nonnegative")
    pstar = g.path(pstar.nodes)
    protected = frozenset(pstar.edge_ids)
    ell = path_length(g, pstar)
    rows = []
    for p in constraint_paths:
        if p == pstar:
            raise GraphError("constraint path equals the protected path")
        rhs = ell + buffer - path_length(g, p)
        support = tuple(sorted(e for e in p.edge_ids if e not in protected))
        rows.append(LpRow(support, float(rhs)))
    return LpModel(g.n_edges, protected, tuple(rows))


def solve(
    model: LpModel,
    eps_feas: float = DEFAULT_EPS_FEAS,
    eps_pivot: float = DEFAULT_EPS_PIVOT,
) -> LpSolution:
    """Minimize total perturbation subject to the model's covering rows.

    Deterministic: Dantzig entering rule with lowest-index tie-breaks,
    switching to Bland's rule after repeated degenerate pivots. Raises
    SimplexError if the pivot cap (50 * (columns + rows)) is exceeded.
    """
    delta = np.zeros(model.n_vars)
    active = [row for row in model.rows if row.rhs > 0.0]
    if not active:
        return LpSolution(STATUS_OPTIMAL, delta, 0.0)
    for row in active:
        if not row.support:
            # No free edge can absorb the required gap.
            return LpSolution(STATUS_INFEASIBLE, delta, math.inf)

    used = sorted({e for row in active for e in row.support})
    col_of = {e: j for j, e in enumerate(used)}
    n = len(used)
    m = len(active)

    # Columns: n originals, m surplus, m artificials, then the rhs column.
    total_cols = n + 2 * m
    T = np.zeros((m + 1, total_cols + 1))
    basis = list(range(n + m, n + 2 * m))
    for i, row in enumerate(active):
        for e in row.support:
            T[i, col_of[e]] = 1.0
        T[i, n + i] = -1.0
        T[i, n + m + i] = 1.0
        T[i, -1] = row.rhs

    state = _SimplexState(T, basis, eps_pivot, max_pivots=50 * (total_cols + m))

    # Phase 1: minimize the artificial total. Basis is all-artificial, so the
    # reduced-cost row is the cost vector minus the sum of the constraint rows.
    T[-1, :] = 0.0
    T[-1, n + m : n + 2 * m] = 1.0
    for i in range(m):
        T[-1, :] -= T[i, :]
    status = state.minimize(enterable=n + m)
    if status != STATUS_OPTIMAL:
        raise SimplexError("phase 1 reported unbounded; tableau is inconsistent")
    if -T[-1, -1] > eps_feas * max(1.0, sum(r.rhs for r in active)):
        return LpSolution(STATUS_INFEASIBLE, delta, math.inf)

    # Drive leftover artificials out of the basis where possible; rows whose
    # every structural coefficient vanished are redundant and stay put at 0.
    for i in range(m):
        if basis[i] >= n + m:
            for j in range(n + m):
                if abs(T[i, j]) > eps_pivot:
                    state.pivot(i, j)
                    break

    # Phase 2: original objective (unit cost on every original variable).
    T[-1, :] = 0.0
    T[-1, :n] = 1.0
    for i, bv in enumerate(basis):
        if bv < n:
            T[-1, :] -= T[i, :]
    status = state.minimize(enterable=n + m)
    if status == STATUS_UNBOUNDED:
        return LpSolution(STATUS_UNBOUNDED, delta, -math.inf)

    x = np.zeros(n)
    for i, bv in enumerate(basis):
        if bv < n:
            x[bv] = T[i, -1]
    if float(x.min(initial=0.0)) < -1e-6:
        raise SimplexError("solver produced a significantly negative variable")
    np.maximum(x, 0.0, out=x)
    delta[used] = x
    for row in active:
        lhs = float(sum(delta[e] for e in row.support))
        if lhs < row.rhs - max(eps_feas, eps_feas * abs(row.rhs)):
            raise SimplexError(f"solution violates a row by {row.rhs - lhs}")
    return LpSolution(STATUS_OPTIMAL, delta, float(delta.sum()))


class _SimplexState:
    """Pivot loop shared by both phases, with anti-cycling bookkeeping."""

    def __init__(self, T: np.ndarray, basis: list[int], eps_pivot: float, max_pivots: int):
        self.T = T
        self.basis = basis
        self.eps_pivot = eps_pivot
        self.max_pivots = max_pivots
        self.pivots = 0
        self.degenerate = 0
        self.bland = False

    def pivot(self, row: int, col: int) -> None:
        T = self.T
        T[row, :] /= T[row, col]
        column = T[:, col].copy()
        column[row] = 0.0
        T -= np.outer(column, T[row, :])
        self.basis[row] = col

    def minimize(self, enterable: int) -> str:
        """Run pivots until optimal or unbounded. `enterable` bounds the
        columns allowed to enter (artificials never re-enter)."""
        T = self.T
        eps = self.eps_pivot
        while True:
            reduced = T[-1, :enterable]
            if self.bland:
                entering = -1
                for j in range(enterable):
                    if reduced[j] < -eps:
                        entering = j
                        break
                if entering < 0:
                    return STATUS_OPTIMAL
            else:
                entering = int(np.argmin(reduced))
                if reduced[entering] >= -eps:
                    return STATUS_OPTIMAL
            colvals = T[:-1, entering]
            rows = np.nonzero(colvals > eps)[0]
            if rows.size == 0:
                return STATUS_UNBOUNDED
            ratios = T[:-1, -1][rows] / colvals[rows]
            min_ratio = float(ratios.min())
            tied = rows[np.nonzero(ratios <= min_ratio + eps)[0]]
            if self.bland:
                leaving = int(min(tied, key=lambda i: self.basis[i]))
            else:
                leaving = int(tied[0])
            if min_ratio <= 1e-12:
                self.degenerate += 1
                if self.degenerate > _BLAND_THRESHOLD:
                    self.bland = True
            self.pivot(leaving, entering)
            self.pivots += 1
            if self.pivots > self.max_pivots:
                raise SimplexError(f"pivot cap {self.max_pivots} exceeded")
