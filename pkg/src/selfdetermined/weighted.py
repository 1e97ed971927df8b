"""Reduce a weighted affinity system to a ranked one with partial lists.

Every member ``s`` becomes a blob of ``k = ceil(1/eps)`` nodes. When ``s``
casts capped weight ``p`` on ``s'``, each node of ``s``'s blob lists
``floor(p k)`` nodes of ``s'``'s blob, wired as a circulant so that every
target node is listed exactly ``floor(p k)`` times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .core import (
    Community,
    CommunityParams,
    CommunitySet,
    InvalidInput,
    RankedSystem,
    WeightedSystem,
    _capped_row,
    as_fraction,
    verify_weighted_community,
)

__all__ = ["BlobMap", "build_bipartite_regular", "reduce", "blob_image", "map_back", "default_epsilon"]


@dataclass(frozen=True)
class BlobMap:
    """Blob ``s`` owns reduced nodes ``s*k .. s*k + k - 1``."""

    k: int
    n: int

    def forward(self, s: int) -> range:
        return range(s * self.k, (s + 1) * self.k)

    def backward(self, node: int) -> int:
        return node // self.k

    @property
    def reduced_n(self) -> int:
        return self.n * self.k


def build_bipartite_regular(k: int, d: int) -> list[tuple[int, int]]:
    """Circulant ``d``-regular bipartite graph on ``k + k`` nodes.

    Left node ``i`` links to right nodes ``(i + r) mod k`` for ``r < d``.
    """
    if k < 1:
        raise InvalidInput("k must be positive")
    if not 0 <= d <= k:
        raise InvalidInput(f"degree {d} outside [0, {k}]")
    return [(i, (i + r) % k) for i in range(k) for r in range(d)]


def default_epsilon(params: CommunityParams) -> Fraction:
    return params.gamma / 2


def reduce(system: WeightedSystem, params: CommunityParams, t: int, epsilon=None):
    """Build the ranked instance for target size ``t``.

    Returns
    -------
    RankedSystem
        ``n * k`` members with partial lists; each node lists its
        out-neighbours ordered by the target blob's capped weight
        (descending), then by node id.
    BlobMap
        The node-to-member mapping.
    """
    if t < 1:
        raise InvalidInput("target size must be positive")
    eps = default_epsilon(params) if epsilon is None else as_fraction(epsilon)
    if eps <= 0 or eps >= params.alpha:
        raise InvalidInput(f"need 0 < epsilon < alpha, got epsilon={eps}")
    k = math.ceil(1 / eps)
    blobs = BlobMap(k, system.n)
    cap = params.theta * t
    rankings: list[list[int]] = [[] for _ in range(blobs.reduced_n)]
    for s in range(system.n):
        capped = _capped_row(system, s, cap)
        targets = sorted(capped.items(), key=lambda item: (-item[1], item[0]))
        for target, p in targets:
            d = math.floor(p * k)
            if d == 0:
                continue
            base = target * k
            for left, right in build_bipartite_regular(k, d):
                rankings[s * k + left].append(base + right)
    return RankedSystem(rankings, n=blobs.reduced_n), blobs


def blob_image(S, blob_map: BlobMap) -> frozenset[int]:
    return frozenset(node for s in S for node in blob_map.forward(int(s)))


def map_back(communities, blob_map: BlobMap, original: WeightedSystem, params: CommunityParams) -> CommunitySet:
    """Project reduced communities to the original members and re-verify.

    A blob counts as selected when at least half of its nodes are present.
    Only projections that are communities of ``original`` at ``params``
    are kept.
    """
    out = CommunitySet()
    for community in communities:
        nodes = community.members if isinstance(community, Community) else community
        counts: dict[int, int] = {}
        for node in nodes:
            s = blob_map.backward(int(node))
            counts[s] = counts.get(s, 0) + 1
        selected = tuple(sorted(s for s, c in counts.items() if 2 * c >= blob_map.k))
        if selected and verify_weighted_community(original, selected, params):
            out.add(Community(selected, params, True, "reduction"))
    return out
