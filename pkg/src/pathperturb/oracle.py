"""Separation oracle: find the most-violated path constraint, if any.

Given a candidate perturbation, the oracle returns the shortest competing
path whose perturbed length still falls short of the required threshold
(target length plus buffer), or an empty result certifying that no such
path exists.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

from .graph import (
    Graph,
    GraphError,
    Path,
    _coerce_delta,
    dijkstra,
    path_length,
    second_shortest_excluding,
)

DEFAULT_EPS = 1e-9


@dataclass(frozen=True)
class OracleResult:
    """A violating path and its perturbed length, or empty (path=None, inf)."""

    path: Optional[Path]
    perturbed_length: float

    @property
    def is_empty(self) -> bool:
        return self.path is None


def constraint_oracle(
    g: Graph,
    delta,
    pstar: Path,
    buffer: float,
    eps: float = DEFAULT_EPS,
) -> OracleResult:
    """Most-violated constraint for the current perturbation.

    Finds the shortest path between pstar's endpoints under w + delta,
    falling back to the second shortest when that path is pstar itself.
    Returns empty when no competing path is shorter than
    ``length(pstar) + buffer - eps``; the threshold uses pstar's original
    (unperturbed) length, which is valid because perturbing pstar's own
    edges is rejected up front.
    """
    if buffer < 0:
        raise GraphError("buffer must be nonnegative")
    if eps < 0:
        raise GraphError("eps must be nonnegative")
    pstar = g.path(pstar.nodes)
    arr = _coerce_delta(g, delta)
    if arr is not None:
        for eid in pstar.edge_ids:
            if arr[eid] != 0.0:
                raise GraphError(f"perturbation on protected edge {eid}")
    ell = path_length(g, pstar)
    source, target = pstar.source, pstar.target
    p = dijkstra(g, source, target, arr)
    if p == pstar:
        p = second_shortest_excluding(g, source, target, pstar, arr)
    if p is None:
        return OracleResult(None, math.inf)
    plen = path_length(g, p, arr)
    if plen >= ell + buffer - eps:
        return OracleResult(None, math.inf)
    return OracleResult(p, plen)
