"""Turn a social graph into a weighted affinity system, and graph-side checks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, shortest_path

from .core import (
    CommunityParams,
    InvalidInput,
    SolverFailure,
    WeightedSystem,
    as_fraction,
    verify_weighted_community,
)

__all__ = [
    "SocialGraph",
    "LiftConfig",
    "direct_lift",
    "shortest_path_lift",
    "ppr_matrix",
    "ppr_lift",
    "effective_resistance",
    "resistance_lift",
    "lift",
    "verify_graph_community",
    "verify_alpha_beta_cluster",
]


class SocialGraph:
    """Directed or undirected graph with edge weights in ``(0, 1]``.

    Undirected edges are stored in both directions. ``selfloops`` marks a
    graph in which every vertex carries a self-loop (needed for cluster
    checks); the loops are then part of the edge set.
    """

    def __init__(self, n: int, edges=(), directed: bool = True, selfloops: bool = False):
        if n < 1:
            raise InvalidInput("a graph needs at least one vertex")
        self.n = int(n)
        self.directed = bool(directed)
        self.selfloops = bool(selfloops)
        self.adj: list[dict[int, Fraction]] = [{} for _ in range(self.n)]
        for edge in edges:
            i, j = int(edge[0]), int(edge[1])
            w = as_fraction(edge[2]) if len(edge) > 2 else Fraction(1)
            self.add_edge(i, j, w)
        if self.selfloops:
            for i in range(self.n):
                self.adj[i].setdefault(i, Fraction(1))

    def add_edge(self, i: int, j: int, w=1):
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise InvalidInput(f"edge ({i}, {j}) out of range")
        w = as_fraction(w)
        if not 0 < w <= 1:
            raise InvalidInput(f"edge weight {w} outside (0, 1]")
        for a, b in ((i, j),) if self.directed else ((i, j), (j, i)):
            if b in self.adj[a] and self.adj[a][b] != w:
                raise InvalidInput(f"parallel edge ({a}, {b}) with a different weight")
            self.adj[a][b] = w

    def edges(self):
        """Stored directed edges ``(i, j, w)``; undirected edges appear once per direction."""
        return [(i, j, w) for i in range(self.n) for j, w in sorted(self.adj[i].items())]

    def has_edge(self, i: int, j: int) -> bool:
        return j in self.adj[i]

    def out_degree(self, i: int) -> int:
        return len(self.adj[i])

    def is_unweighted(self) -> bool:
        return all(w == 1 for row in self.adj for w in row.values())

    def weight_matrix(self) -> np.ndarray:
        out = np.zeros((self.n, self.n))
        for i, row in enumerate(self.adj):
            for j, w in row.items():
                out[i, j] = float(w)
        return out

    def __repr__(self):
        kind = "directed" if self.directed else "undirected"
        return f"SocialGraph(n={self.n}, {kind}, edges={sum(map(len, self.adj))})"


@dataclass(frozen=True)
class LiftConfig:
    method: str = "direct"
    teleport: float = 0.15
    ppr_tol: float = 1e-9
    ppr_max_iter: int = 10_000
    resistance_tol: float = 1e-9

    def __post_init__(self):
        if self.method not in {"direct", "shortest-path", "ppr", "resistance"}:
            raise InvalidInput(f"unknown lifting method {self.method!r}")
        if not 0 < self.teleport < 1:
            raise InvalidInput("teleport probability must lie in (0, 1)")
        if self.ppr_tol <= 0 or self.resistance_tol <= 0:
            raise InvalidInput("tolerances must be positive")


def direct_lift(graph: SocialGraph) -> WeightedSystem:
    """``a[i, j] = w[i, j]`` on edges and zero elsewhere."""
    return WeightedSystem(graph.n, {(i, j): w for i, j, w in graph.edges()})


def shortest_path_lift(graph: SocialGraph) -> WeightedSystem:
    """``a[i, j] = 1 / d[i, j]`` with distances divided by the smallest positive one.

    Edge weights are used as lengths. ``a[i, i] = 1``; unreachable pairs get 0.
    """
    dense = graph.weight_matrix()
    np.fill_diagonal(dense, 0.0)
    dist = shortest_path(csr_matrix(dense), directed=graph.directed, method="D")
    positive = dist[np.isfinite(dist) & (dist > 0)]
    scale = positive.min() if positive.size else 1.0
    weights = {}
    for i in range(graph.n):
        weights[(i, i)] = 1
        for j in np.nonzero(np.isfinite(dist[i]) & (dist[i] > 0))[0]:
            weights[(i, int(j))] = scale / dist[i, j]
    return WeightedSystem(graph.n, weights)


def ppr_matrix(graph: SocialGraph, teleport: float = 0.15, tol: float = 1e-9, max_iter: int = 10_000) -> np.ndarray:
    """Personalized PageRank vectors of every source, one per row.

    The walk follows out-edges proportionally to weight and restarts at the
    source with probability ``teleport``; vertices without out-edges send
    their mass back to the source. Iterates until the L1 change is below
    ``tol``.
    """
    W = graph.weight_matrix()
    out = W.sum(axis=1)
    dangling = out == 0
    T = np.divide(W, out[:, None], out=np.zeros_like(W), where=~dangling[:, None])
    eye = np.eye(graph.n)
    P = eye.copy()
    for _ in range(max_iter):
        walk = P @ T + np.diag(P[:, dangling].sum(axis=1))
        nxt = teleport * eye + (1 - teleport) * walk
        if np.abs(nxt - P).sum(axis=1).max() < tol:
            return nxt
        P = nxt
    raise SolverFailure(f"personalized PageRank did not converge within {max_iter} iterations")


def ppr_lift(graph: SocialGraph, config: LiftConfig | None = None) -> WeightedSystem:
    """``a[i, j] = p_i[j] / max_k p_i[k]``, so every row peaks at exactly 1."""
    config = config or LiftConfig(method="ppr")
    P = ppr_matrix(graph, config.teleport, config.ppr_tol, config.ppr_max_iter)
    weights = {}
    for i in range(graph.n):
        row = P[i]
        top = row.max()
        for j in np.nonzero(row > 0)[0]:
            weights[(i, int(j))] = 1 if row[j] == top else float(row[j] / top)
    return WeightedSystem(graph.n, weights)


def effective_resistance(graph: SocialGraph, tol: float = 1e-9) -> np.ndarray:
    """Pairwise effective resistance; ``inf`` across components.

    Edges are resistors of resistance ``1 / w``; direction is ignored and
    self-loops carry no current.
    """
    W = graph.weight_matrix()
    C = np.maximum(W, W.T)
    np.fill_diagonal(C, 0.0)
    R = np.full((graph.n, graph.n), np.inf)
    _, labels = connected_components(csr_matrix(C), directed=False)
    for comp in np.unique(labels):
        idx = np.nonzero(labels == comp)[0]
        if len(idx) == 1:
            R[idx[0], idx[0]] = 0.0
            continue
        sub = C[np.ix_(idx, idx)]
        lap = np.diag(sub.sum(axis=1)) - sub
        pinv = np.linalg.pinv(lap, hermitian=True)
        check = lap @ pinv @ lap - lap
        if np.abs(check).max() > max(tol, 1e-9) * max(1.0, np.abs(lap).max()) * len(idx):
            raise SolverFailure("Laplacian pseudo-inverse is inaccurate")
        d = np.diag(pinv)
        R[np.ix_(idx, idx)] = d[:, None] + d[None, :] - 2 * pinv
    np.fill_diagonal(R, 0.0)
    return np.maximum(R, 0.0)


def _snap(x: float, tol: float) -> float:
    return 1.0 if abs(x - 1.0) <= tol else x


def resistance_lift(graph: SocialGraph, config: LiftConfig | None = None) -> WeightedSystem:
    """``a[i, j] = min_{k != i} r[i, k] / r[i, j]`` within components, ``a[i, i] = 1``."""
    config = config or LiftConfig(method="resistance")
    R = effective_resistance(graph, config.resistance_tol)
    weights = {}
    for i in range(graph.n):
        weights[(i, i)] = 1
        others = [j for j in range(graph.n) if j != i and math.isfinite(R[i, j]) and R[i, j] > 0]
        if not others:
            continue
        nearest = min(R[i, j] for j in others)
        for j in others:
            weights[(i, j)] = _snap(nearest / R[i, j], config.resistance_tol)
    return WeightedSystem(graph.n, weights)


def lift(graph: SocialGraph, config: LiftConfig) -> WeightedSystem:
    if config.method == "direct":
        return direct_lift(graph)
    if config.method == "shortest-path":
        return shortest_path_lift(graph)
    if config.method == "ppr":
        return ppr_lift(graph, config)
    return resistance_lift(graph, config)


def verify_graph_community(graph: SocialGraph, S, params: CommunityParams) -> bool:
    """Community check on the graph itself.

    For unweighted graphs each voter ``i`` in ``S`` gives
    ``min(1, theta |S| / d_i)`` to each out-neighbour; weighted graphs go
    through :func:`direct_lift` and the weighted verifier.
    """
    members = {int(s) for s in S}
    if not members:
        raise InvalidInput("S must be nonempty")
    if not graph.is_unweighted():
        return bool(verify_weighted_community(direct_lift(graph), members, params))
    t = len(members)
    budget = params.theta * t
    received: dict[int, Fraction] = {}
    for i in members:
        d = graph.out_degree(i)
        if d == 0:
            continue
        share = min(Fraction(1), budget / d)
        for j in graph.adj[i]:
            received[j] = received.get(j, Fraction(0)) + share
    if any(received.get(i, 0) < params.alpha * t for i in members):
        return False
    return all(v <= params.beta * t for j, v in received.items() if j not in members)


def verify_alpha_beta_cluster(graph: SocialGraph, S, alpha, beta) -> bool:
    """Internally dense / externally sparse check on an undirected self-looped graph."""
    if graph.directed:
        raise InvalidInput("(alpha, beta)-clusters are defined on undirected graphs")
    if not all(graph.has_edge(i, i) for i in range(graph.n)):
        raise InvalidInput("every vertex needs a self-loop")
    members = {int(s) for s in S}
    if not members:
        raise InvalidInput("S must be nonempty")
    alpha, beta = as_fraction(alpha), as_fraction(beta)
    t = len(members)
    for i in range(graph.n):
        inner = sum(1 for j in graph.adj[i] if j in members)
        if i in members and inner < alpha * t:
            return False
        if i not in members and inner > beta * t:
            return False
    return True
