"""Weighted undirected graphs with deterministic shortest-path algorithms.

Graphs are immutable after construction. Every algorithm in this module is a
pure function of its inputs, so graphs can be shared freely across workers.

Determinism contract: whenever two paths have equal length, the one whose
node-id sequence is lexicographically smaller wins. Path lengths are always
the left-to-right sum of edge weights in traversal order, and comparisons use
those computed sums exactly (no epsilon). Tolerance handling lives in the
oracle and LP layers, not here.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np


class GraphError(ValueError):
    """Raised for structurally invalid graphs, paths, or arguments."""


@dataclass(frozen=True)
class Path:
    """A simple path: node sequence plus the derived edge-id sequence.

    Build instances through :meth:`Graph.path`, which validates adjacency
    and simplicity. Equality and hashing use the node sequence, so a path
    and its reversal are distinct.
    """

    nodes: tuple[int, ...]
    edge_ids: tuple[int, ...]

    @property
    def source(self) -> int:
        return self.nodes[0]

    @property
    def target(self) -> int:
        return self.nodes[-1]

    @property
    def n_edges(self) -> int:
        return len(self.edge_ids)

    def __len__(self) -> int:
        return len(self.nodes)


class Graph:
    """Undirected graph with nonnegative edge weights and dense ids.

    Nodes are ``0 .. n_nodes-1``. Each undirected edge {u, v} is stored once,
    normalized to ``u < v``, and its EdgeId is the insertion position. Self
    loops and duplicate edges are rejected.
    """

    __slots__ = ("n_nodes", "_us", "_vs", "_weights", "_adj", "_edge_index")

    def __init__(self, n_nodes: int, edges: Iterable[tuple[int, int, float]]):
        if n_nodes < 0:
            raise GraphError("node count must be nonnegative")
        self.n_nodes = int(n_nodes)
        us: list[int] = []
        vs: list[int] = []
        ws: list[float] = []
        index: dict[tuple[int, int], int] = {}
        adj: list[list[tuple[int, int]]] = [[] for _ in range(self.n_nodes)]
        for u, v, w in edges:
            u, v, w = int(u), int(v), float(w)
            if not (0 <= u < self.n_nodes and 0 <= v < self.n_nodes):
                raise GraphError(f"edge ({u}, {v}) references a node out of range")
            if u == v:
                raise GraphError(f"self-loop on node {u}")
            if u > v:
                u, v = v, u
            if (u, v) in index:
                raise GraphError(f"duplicate edge ({u}, {v})")
            if not np.isfinite(w) or w < 0:
                raise GraphError(f"edge ({u}, {v}) has invalid weight {w}")
            eid = len(us)
            index[(u, v)] = eid
            us.append(u)
            vs.append(v)
            ws.append(w)
            adj[u].append((v, eid))
            adj[v].append((u, eid))
        self._us = us
        self._vs = vs
        self._weights = np.asarray(ws, dtype=np.float64)
        self._weights.setflags(write=False)
        self._edge_index = index
        for lst in adj:
            lst.sort()
        self._adj = adj

    @property
    def n_edges(self) -> int:
        return len(self._us)

    @property
    def weights(self) -> np.ndarray:
        """Read-only weight vector indexed by EdgeId."""
        return self._weights

    def endpoints(self, edge_id: int) -> tuple[int, int]:
        return self._us[edge_id], self._vs[edge_id]

    def weight(self, edge_id: int) -> float:
        return float(self._weights[edge_id])

    def edge_id(self, u: int, v: int) -> int:
        """EdgeId of the undirected edge {u, v}; raises if absent."""
        key = (u, v) if u < v else (v, u)
        try:
            return self._edge_index[key]
        except KeyError:
            raise GraphError(f"no edge between {u} and {v}") from None

    def has_edge(self, u: int, v: int) -> bool:
        key = (u, v) if u < v else (v, u)
        return key in self._edge_index

    def neighbors(self, u: int) -> Sequence[tuple[int, int]]:
        """(neighbor, edge_id) pairs of u, sorted by neighbor id."""
        self._check_node(u)
        return tuple(self._adj[u])

    def edges(self) -> Iterator[tuple[int, int, float]]:
        for eid in range(self.n_edges):
            yield self._us[eid], self._vs[eid], float(self._weights[eid])

    def degree(self, u: int) -> int:
        self._check_node(u)
        return len(self._adj[u])

    def path(self, nodes: Sequence[int]) -> Path:
        """Validate a node sequence and derive its edge ids.

        Raises GraphError when the sequence is empty, repeats a node, or
        steps between nonadjacent nodes.
        """
        seq = tuple(int(x) for x in nodes)
        if not seq:
            raise GraphError("a path needs at least one node")
        for x in seq:
            self._check_node(x)
        if len(set(seq)) != len(seq):
            raise GraphError(f"path {seq} repeats a node")
        edge_ids = tuple(self.edge_id(a, b) for a, b in zip(seq, seq[1:]))
        return Path(seq, edge_ids)

    def with_weights(self, new_weights: Sequence[float]) -> "Graph":
        """Copy of this graph with the same topology and new weights."""
        arr = np.asarray(new_weights, dtype=np.float64)
        if arr.shape != (self.n_edges,):
            raise GraphError(f"expected {self.n_edges} weights, got {arr.shape}")
        if not np.all(np.isfinite(arr)) or np.any(arr < 0):
            raise GraphError("weights must be finite and nonnegative")
        clone = object.__new__(Graph)
        clone.n_nodes = self.n_nodes
        clone._us = self._us
        clone._vs = self._vs
        arr = arr.copy()
        arr.setflags(write=False)
        clone._weights = arr
        clone._adj = self._adj
        clone._edge_index = self._edge_index
        return clone

    def _check_node(self, u: int) -> None:
        if not (0 <= u < self.n_nodes):
            raise GraphError(f"node {u} out of range for {self.n_nodes}-node graph")

    def __repr__(self) -> str:
        return f"Graph(n_nodes={self.n_nodes}, n_edges={self.n_edges})"


def _coerce_delta(g: Graph, delta) -> Optional[np.ndarray]:
    if delta is None:
        return None
    arr = np.asarray(delta, dtype=np.float64)
    if arr.shape != (g.n_edges,):
        raise GraphError(f"perturbation vector must have length {g.n_edges}, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise GraphError("perturbation vector has non-finite entries")
    return arr


def _effective_weights(g: Graph, delta) -> np.ndarray:
    arr = _coerce_delta(g, delta)
    wt = g._weights if arr is None else g._weights + arr
    if g.n_edges and float(wt.min()) < 0:
        raise GraphError("perturbed weights must be nonnegative")
    return wt


def path_length(g: Graph, p: Path, delta=None) -> float:
    """Length of p under w + delta, summed in traversal order.

    A missing delta counts as all zeros; a single-node path has length 0.
    """
    wt = g._weights if delta is None else _effective_weights(g, delta)
    total = 0.0
    for eid in p.edge_ids:
        total += wt[eid]
    return float(total)


def _nodes_length(g: Graph, wt: np.ndarray, nodes: Sequence[int]) -> float:
    total = 0.0
    for a, b in zip(nodes, nodes[1:]):
        total += wt[g.edge_id(a, b)]
    return float(total)


def _distances_from(
    g: Graph,
    wt: np.ndarray,
    source: int,
    excluded_nodes: frozenset[int] | set[int],
    banned_edges: frozenset[int] | set[int],
) -> dict[int, float]:
    """Plain Dijkstra distances from source, skipping excluded nodes/edges."""
    dist: dict[int, float] = {source: 0.0}
    heap: list[tuple[float, int]] = [(0.0, source)]
    done: set[int] = set()
    adj = g._adj
    while heap:
        d, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        for v, eid in adj[u]:
            if v in done or v in excluded_nodes or eid in banned_edges:
                continue
            nd = d + wt[eid]
            if v not in dist or nd < dist[v]:
                dist[v] = nd
                heapq.heappush(heap, (nd, v))
    return {u: dist[u] for u in done}


def _lexmin_shortest_zero_mode(
    g: Graph,
    wt: np.ndarray,
    source: int,
    target: int,
    banned_nodes: frozenset[int] | set[int],
    banned_edges: frozenset[int] | set[int],
) -> Optional[tuple[int, ...]]:
    """Shortest-then-lexicographic path when zero-weight edges are present.

    Greedy front-to-back construction. Each step re-solves distances to the
    target in the graph minus the nodes already used, which keeps the walk
    simple even across zero-weight cycles.
    """
    visited = set(banned_nodes)
    visited.add(source)
    nodes = [source]
    prefix = 0.0
    u = source
    while u != target:
        dist = _distances_from(g, wt, target, visited, banned_edges)
        best: tuple[float, int, int] | None = None
        for v, eid in g._adj[u]:
            if v in visited or eid in banned_edges:
                continue
            d = dist.get(v)
            if d is None:
                continue
            key = (prefix + wt[eid] + d, v, eid)
            if best is None or key < best:
                best = key
        if best is None:
            return None
        _, v, eid = best
        prefix += wt[eid]
        visited.add(v)
        nodes.append(v)
        u = v
    return tuple(nodes)


def _shortest_restricted(
    g: Graph,
    wt: np.ndarray,
    source: int,
    target: int,
    banned_nodes: frozenset[int] | set[int],
    banned_edges: frozenset[int] | set[int],
) -> Optional[tuple[int, ...]]:
    """Node sequence of the (length, lexicographic)-minimal simple path.

    Heap entries carry the whole candidate node sequence, so ties in length
    resolve to the lexicographically smallest sequence. With strictly
    positive weights every shortest walk is simple and the first pop per
    node is final; zero weights fall back to the robust greedy mode.
    """
    if source in banned_nodes or target in banned_nodes:
        return None
    if source == target:
        return (source,)
    if g.n_edges and float(wt.min()) == 0.0:
        return _lexmin_shortest_zero_mode(g, wt, source, target, banned_nodes, banned_edges)
    heap: list[tuple[float, tuple[int, ...]]] = [(0.0, (source,))]
    done: set[int] = set()
    adj = g._adj
    while heap:
        d, nodes = heapq.heappop(heap)
        u = nodes[-1]
        if u in done:
            continue
        done.add(u)
        if u == target:
            return nodes
        for v, eid in adj[u]:
            if v in done or v in banned_nodes or eid in banned_edges:
                continue
            heapq.heappush(heap, (d + wt[eid], nodes + (v,)))
    return None


def dijkstra(g: Graph, source: int, target: int, delta=None) -> Optional[Path]:
    """Minimum-length simple path from source to target under w + delta.

    Returns None when the endpoints are disconnected. Among equal-length
    paths the lexicographically smallest node sequence is returned.
    """
    g._check_node(source)
    g._check_node(target)
    wt = _effective_weights(g, delta)
    nodes = _shortest_restricted(g, wt, source, target, frozenset(), frozenset())
    return g.path(nodes) if nodes is not None else None


def shortest_simple_paths(g: Graph, source: int, target: int, delta=None) -> Iterator[Path]:
    """Yield simple source-to-target paths in (length, lexicographic) order.

    Lazy sequential enumeration: deviations of a yielded path are only
    explored once the next path is requested.
    """
    g._check_node(source)
    g._check_node(target)
    wt = _effective_weights(g, delta)
    first = _shortest_restricted(g, wt, source, target, frozenset(), frozenset())
    if first is None:
        return
    selected: list[tuple[int, ...]] = []
    candidates: list[tuple[float, tuple[int, ...]]] = []
    pushed: set[tuple[int, ...]] = {first}
    current = first
    while True:
        selected.append(current)
        yield g.path(current)
        for i in range(len(current) - 1):
            root = current[: i + 1]
            spur_node = root[-1]
            banned_nodes = frozenset(root[:-1])
            banned_edges = {
                g.edge_id(sel[i], sel[i + 1]) for sel in selected if sel[: i + 1] == root
            }
            spur = _shortest_restricted(g, wt, spur_node, target, banned_nodes, banned_edges)
            if spur is None:
                continue
            cand = root[:-1] + spur
            if cand in pushed:
                continue
            pushed.add(cand)
            heapq.heappush(candidates, (_nodes_length(g, wt, cand), cand))
        if not candidates:
            return
        _, current = heapq.heappop(candidates)


def yen_k_shortest(g: Graph, source: int, target: int, k: int, delta=None) -> list[Path]:
    """Up to k shortest simple paths, nondecreasing in (length, sequence)."""
    if k < 1:
        raise GraphError("k must be at least 1")
    out: list[Path] = []
    for p in shortest_simple_paths(g, source, target, delta):
        out.append(p)
        if len(out) == k:
            break
    return out


def second_shortest_excluding(g: Graph, source: int, target: int, pstar: Path, delta=None) -> Optional[Path]:
    """Shortest simple source-to-target path different from pstar, or None."""
    for p in shortest_simple_paths(g, source, target, delta):
        if p != pstar:
            return p
    return None


def _bfs_hops(g: Graph, source: int) -> dict[int, int]:
    g._check_node(source)
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v, _ in g._adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def _induced_subgraph(g: Graph, kept: Sequence[int]) -> tuple[Graph, list[int]]:
    """Induced subgraph on kept nodes (given sorted); node_map[new] = old."""
    node_map = list(kept)
    new_id = {old: new for new, old in enumerate(node_map)}
    edges = []
    for eid in range(g.n_edges):
        u, v = g._us[eid], g._vs[eid]
        if u in new_id and v in new_id:
            edges.append((new_id[u], new_id[v], float(g._weights[eid])))
    return Graph(len(node_map), edges), node_map


def largest_connected_component(g: Graph) -> tuple[Graph, list[int]]:
    """Induced subgraph on the largest component, plus node_map[new] = old.

    Components of equal size tie-break to the one containing the lowest
    original node id. Raises on an empty graph.
    """
    if g.n_nodes == 0:
        raise GraphError("empty graph has no components")
    seen = [False] * g.n_nodes
    best: list[int] = []
    for start in range(g.n_nodes):
        if seen[start]:
            continue
        comp = [start]
        seen[start] = True
        queue = deque([start])
        while queue:
            u = queue.popleft()
            for v, _ in g._adj[u]:
                if not seen[v]:
                    seen[v] = True
                    comp.append(v)
                    queue.append(v)
        if len(comp) > len(best):
            best = comp
    return _induced_subgraph(g, sorted(best))


def nodes_at_hop_distance(g: Graph, source: int, hops: int) -> set[int]:
    """Nodes whose unweighted BFS distance from source is exactly hops."""
    if hops < 0:
        raise GraphError("hop count must be nonnegative")
    dist = _bfs_hops(g, source)
    return {u for u, d in dist.items() if d == hops}


def induced_subgraph_within_hops(g: Graph, source: int, hops: int) -> tuple[Graph, list[int]]:
    """Induced subgraph on nodes at BFS distance <= hops from source."""
    if hops < 0:
        raise GraphError("hop count must be nonnegative")
    dist = _bfs_hops(g, source)
    kept = sorted(u for u, d in dist.items() if d <= hops)
    return _induced_subgraph(g, kept)
