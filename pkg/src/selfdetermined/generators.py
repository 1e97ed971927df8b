"""Seeded fixtures: blob instances, the overlapping pair, planted systems and random graphs."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

from .core import (
    BudgetExceeded,
    CommunityParams,
    InvalidInput,
    RankedSystem,
    WeightedSystem,
    weighted_vote_tally,
)
from .lifting import SocialGraph, verify_alpha_beta_cluster
from .multifacet import FacetedSystem

__all__ = [
    "make_rng",
    "gen_blob_instance",
    "gen_overlap_pair",
    "gen_planted_ranked",
    "gen_random_ranked",
    "gen_planted_weighted",
    "gen_planted_faceted",
    "gen_gnp",
    "gen_gnp_planted_clique",
    "hidden_clique_setup",
    "count_alpha_beta_clusters",
    "counting_report",
]


def make_rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def _grouped_table(n: int, groups: list[list[int]], member_group: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    # each row: self, rest of own group ascending, then the other members in random order
    table = np.empty((n, n), dtype=np.int32)
    all_ids = np.arange(n)
    for g, block in enumerate(groups):
        block = np.asarray(block)
        outside = all_ids[member_group != g]
        for i in block:
            table[i, 0] = i
            table[i, 1 : len(block)] = block[block != i]
            table[i, len(block) :] = outside[rng.permutation(len(outside))]
    return table


def gen_blob_instance(L: int, b: int, rng=None, theta=1, max_union: int = 1):
    """``L`` blobs of size ``b``; each member ranks itself, its blob, then everyone else at random.

    Returns
    -------
    RankedSystem
        ``n = L * b`` members with total rankings.
    list of (tuple, CommunityParams)
        Every union of ``l <= max_union`` blobs, tagged ``(theta, 1/l, 1/(2l))``.
    """
    if L < 1 or b < 1:
        raise InvalidInput("need L >= 1 and b >= 1")
    rng = make_rng(rng)
    n = L * b
    groups = [list(range(g * b, (g + 1) * b)) for g in range(L)]
    member_group = np.repeat(np.arange(L), b)
    system = RankedSystem.from_table(_grouped_table(n, groups, member_group, rng))
    planted = []
    for l in range(1, min(max_union, L) + 1):
        params = CommunityParams(theta, Fraction(1, l), Fraction(1, 2 * l))
        for combo in itertools.combinations(range(L), l):
            planted.append((tuple(m for g in combo for m in groups[g]), params))
    return system, planted


def gen_overlap_pair(n: int):
    """Two communities of size ``n/2`` sharing ``n/8`` members, both ``(1, 3/4, 1/4)``.

    Members only in ``A_i`` rank ``A_i`` then the rest of ``A_j``; shared
    members rank ``A_1 | A_2``; all lists end with the remaining ids, and every
    block is in id order.
    """
    if n < 16 or n % 16:
        raise InvalidInput(f"n must be a positive multiple of 16, got {n}")
    half, shared = n // 2, n // 8
    A1 = list(range(half))
    A2 = list(range(half - shared, n - shared))
    s1, s2 = set(A1), set(A2)
    rankings = []
    for i in range(n):
        if i in s1 and i in s2:
            head = sorted(s1 | s2)
        elif i in s1:
            head = A1 + [j for j in A2 if j not in s1]
        elif i in s2:
            head = A2 + [j for j in A1 if j not in s2]
        else:
            head = []
        seen = set(head)
        rankings.append(head + [j for j in range(n) if j not in seen])
    params = CommunityParams(1, Fraction(3, 4), Fraction(1, 4))
    return RankedSystem(rankings), [(tuple(A1), params), (tuple(A2), params)]


def gen_planted_ranked(n: int, sizes, rng=None, partial: int | None = None):
    """Disjoint planted groups of the given sizes; other members are singletons.

    Rankings follow the blob convention (self, own group, random rest). With
    ``partial``, every list is cut to its first ``partial`` entries (never
    shorter than the member's own group).
    """
    rng = make_rng(rng)
    if sum(sizes) > n:
        raise InvalidInput("planted groups exceed n")
    perm = rng.permutation(n)
    groups, pos = [], 0
    for size in sizes:
        groups.append(sorted(perm[pos : pos + size].tolist()))
        pos += size
    groups += [[int(i)] for i in perm[pos:]]
    member_group = np.empty(n, dtype=np.int64)
    for g, block in enumerate(groups):
        member_group[block] = g
    table = _grouped_table(n, groups, member_group, rng)
    if partial is None:
        return RankedSystem.from_table(table), [tuple(g) for g in groups[: len(sizes)]]
    lengths = np.array([max(partial, len(groups[member_group[i]])) for i in range(n)])
    lengths = np.minimum(lengths, n)
    return RankedSystem([table[i, : lengths[i]].tolist() for i in range(n)]), [tuple(g) for g in groups[: len(sizes)]]


def gen_random_ranked(n: int, rng=None, partial_prob: float = 0.0, self_first: bool = False) -> RankedSystem:
    """Uniform random rankings; with probability ``partial_prob`` a list is truncated at random."""
    rng = make_rng(rng)
    rows = []
    for i in range(n):
        row = rng.permutation(n).tolist()
        if self_first:
            row.remove(i)
            row.insert(0, i)
        if rng.random() < partial_prob:
            row = row[: int(rng.integers(1, n + 1))]
        rows.append(row)
    return RankedSystem(rows)


def gen_planted_weighted(n: int, t: int, rng=None, theta=1):
    """Weighted system with a planted community of size ``t``.

    Members of ``S`` weight each other in ``[0.7, 1]`` and outsiders in
    ``[0, 0.2]``; outsiders weight everyone uniformly in ``[0, 1]``. All
    weights are multiples of 1/100. The returned parameters are the
    tightest ones the planted set satisfies: ``alpha`` is the smallest
    inside tally over ``t`` and ``beta`` the largest outside tally over ``t``.

    Returns
    -------
    WeightedSystem, tuple, CommunityParams or None
        ``None`` when the draw happens not to separate (``beta >= alpha``).
    """
    rng = make_rng(rng)
    S = tuple(sorted(rng.choice(n, size=t, replace=False).tolist()))
    inside = set(S)
    weights = {}
    for i in range(n):
        for j in range(n):
            if i in inside:
                lo, hi = (70, 100) if j in inside else (0, 20)
            else:
                lo, hi = 0, 100
            w = int(rng.integers(lo, hi + 1))
            if w:
                weights[(i, j)] = Fraction(w, 100)
    system = WeightedSystem(n, weights)
    tally = weighted_vote_tally(system, S, t, theta)
    alpha = min(tally[i] for i in S) / t
    beta = max((tally[j] for j in range(n) if j not in inside), default=Fraction(0)) / t
    if beta >= alpha or alpha > 1:
        return system, S, None
    return system, S, CommunityParams(theta, alpha, beta)


def gen_planted_faceted(n: int, b: int, rng=None, f: int = 2):
    """Planted block ``S`` whose facet 1 ranks ``S`` first; every other facet is random.

    Outsiders get ``f`` random facets. ``S`` with all-ones assignment is a
    ``(1, 1, 0)`` multi-faceted community.
    """
    rng = make_rng(rng)
    S = sorted(rng.choice(n, size=b, replace=False).tolist())
    inside = set(S)
    rest = [j for j in range(n) if j not in inside]
    rankings = []
    for i in range(n):
        facets = []
        for j in range(f):
            if j == 0 and i in inside:
                own = [i] + [s for s in S if s != i]
                facets.append(own + [rest[k] for k in rng.permutation(len(rest))])
            else:
                facets.append(rng.permutation(n).tolist())
        rankings.append(facets)
    return FacetedSystem(rankings, f=f), tuple(S)


def gen_gnp(n: int, p: float, selfloops: bool = False, rng=None) -> SocialGraph:
    """Undirected ``G(n, p)``."""
    if not 0 <= p <= 1:
        raise InvalidInput("p must lie in [0, 1]")
    rng = make_rng(rng)
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(len(iu)) < p
    return SocialGraph(n, zip(iu[keep].tolist(), ju[keep].tolist()), directed=False, selfloops=selfloops)


def gen_gnp_planted_clique(n: int, p: float, k: int, rng=None, selfloops: bool = True):
    """``G(n, p)`` with a clique on ``k`` uniformly chosen vertices."""
    if k > n:
        raise InvalidInput(f"clique size {k} exceeds n = {n}")
    rng = make_rng(rng)
    graph = gen_gnp(n, p, selfloops=selfloops, rng=rng)
    clique = tuple(sorted(rng.choice(n, size=k, replace=False).tolist()))
    for a, b in itertools.combinations(clique, 2):
        if not graph.has_edge(a, b):
            graph.add_edge(a, b)
    return graph, clique


def hidden_clique_setup(n: int, gamma: float, eps: float):
    """Clique size ``ceil(ln(n) / eps^2)`` clipped to ``n/4`` and edge density ``1 - gamma - eps``."""
    gamma, eps = Fraction(repr(gamma)), Fraction(repr(eps))
    k = min(math.ceil(math.log(n) / float(eps) ** 2), n // 4)
    return k, float(1 - gamma - eps)


def count_alpha_beta_clusters(graph: SocialGraph, alpha, beta, size_range, budget: int = 5_000_000):
    """Exhaustively test every vertex subset whose size lies in ``size_range``."""
    sizes = list(size_range)
    work = sum(math.comb(graph.n, s) for s in sizes)
    if work > budget:
        raise BudgetExceeded(f"cluster scan needs {work} subsets (budget {budget})")
    hits = []
    for s in sizes:
        for S in itertools.combinations(range(graph.n), s):
            if verify_alpha_beta_cluster(graph, S, alpha, beta):
                hits.append(S)
    return len(hits), hits


def counting_report(ns, l: int, eps: float, delta: float, seeds, budget: int = 5_000_000):
    """Monte-Carlo rows for the cluster-counting experiment on ``G(n, 2^-l)``.

    Cluster parameters are ``alpha = 1`` and ``beta = 1/2 + eps``; the
    subset size is ``k = max(2, round(2 log2(n) (1 - delta) / l))``. Each
    row reports the exhaustive count on one seeded graph next to the
    heuristic ``0.5 * C(n, k) * n^(-k (1 - delta))``.
    """
    rows = []
    p = 2.0**-l
    beta = Fraction(1, 2) + Fraction(repr(eps))
    for n in ns:
        k = max(2, round(2 * math.log2(n) * (1 - delta) / l))
        heuristic = 0.5 * math.comb(n, k) * n ** (-k * (1 - delta))
        for seed in seeds:
            graph = gen_gnp(n, p, selfloops=True, rng=seed)
            count, _ = count_alpha_beta_clusters(graph, 1, beta, [k], budget=budget)
            rows.append({"n": n, "l": l, "p": p, "k": k, "eps": eps, "delta": delta,
                         "seed": seed, "clusters": count, "heuristic_mean": heuristic})
    return rows
