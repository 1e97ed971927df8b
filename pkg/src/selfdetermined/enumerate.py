"""Global enumeration of self-determined communities.

Two-stage search: build rough supersets that nearly contain a community
(greedy cover / exhaustive pickers, or the two-hop variant), then purify them
by sampling. A quasi-polynomial multiset search and a brute-force oracle are
included as baselines.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .core import (
    BudgetExceeded,
    Community,
    CommunityParams,
    CommunitySet,
    InvalidInput,
    RankedSystem,
    WeightedSystem,
    _count_prefix_votes,
    as_fraction,
    prefix_length,
    verify_community,
    verify_ranked_community,
    weighted_vote_tally,
)

__all__ = [
    "EnumConfig",
    "default_k1",
    "default_k2",
    "greedy_cover",
    "union_of_prefixes",
    "rough_list_exhaustive",
    "rough_list_nested",
    "select_by_votes",
    "purify",
    "enumerate_main",
    "enumerate_sizes",
    "rr_probability",
    "rr_distribution",
    "rough_list_alt",
    "alt_k1",
    "quasipoly_k",
    "witness_set",
    "enumerate_quasipoly",
    "naive_verify",
    "brute_force_oracle",
]


def default_k1(alpha, gamma) -> int:
    """Number of pickers whose prefixes cover all but ``gamma/16`` of a community."""
    return max(1, math.ceil(math.log(16 / as_fraction(gamma)) / as_fraction(alpha)))


def default_k2(theta, gamma, delta, spread) -> int:
    """Sample size for purification when the rough set has size ``spread * theta * t``."""
    gamma = float(gamma)
    return max(1, math.ceil(8 / gamma**2 * math.log(32 * float(theta) * float(spread) / (gamma * float(delta)))))


def _capped_repetitions(base: float, exponent: int, delta: float, cap: int) -> int:
    # ceil(base**exponent * ln(1/delta)) evaluated in log space; cap is the practical budget
    tail = math.log(1 / delta)
    if tail <= 0:
        return 1
    log_value = exponent * math.log(base) + math.log(tail)
    if log_value >= math.log(cap):
        return cap
    return max(1, math.ceil(math.exp(log_value)))


@dataclass(frozen=True)
class EnumConfig:
    """Settings for :func:`enumerate_main`.

    ``k1``, ``k2`` and ``n2`` default to the formulas of the two-stage
    analysis. ``n2`` is additionally capped at ``n2_cap`` because the
    worst-case formula is astronomically large; ``budget`` bounds the number
    of picker subsets the exhaustive rough step may visit.
    """

    params: CommunityParams
    size: int
    delta: float = 0.1
    k1: int | None = None
    k2: int | None = None
    n2: int | None = None
    rng_seed: int = 0
    budget: int = 2_000_000
    n2_cap: int = 32
    early_exit: bool = True

    def __post_init__(self):
        if self.size < 1:
            raise InvalidInput("community size must be positive")
        if not 0 < self.delta < 1:
            raise InvalidInput("delta must lie in (0, 1)")
        for name in ("k1", "k2", "n2"):
            value = getattr(self, name)
            if value is not None and value < 1:
                raise InvalidInput(f"{name} override must be >= 1")

    @property
    def theta(self) -> Fraction:
        return self.params.theta

    @property
    def alpha(self) -> Fraction:
        return self.params.alpha

    @property
    def gamma(self) -> Fraction:
        return self.params.gamma

    @property
    def prefix(self) -> int:
        return prefix_length(self.theta, self.size)

    @property
    def picker_count(self) -> int:
        return self.k1 if self.k1 is not None else default_k1(self.alpha, self.gamma)

    @property
    def sample_size(self) -> int:
        if self.k2 is not None:
            return self.k2
        return default_k2(self.theta, self.gamma, self.delta, default_k1(self.alpha, self.gamma))

    @property
    def repetitions(self) -> int:
        if self.n2 is not None:
            return self.n2
        base = 2 * float(self.theta) * default_k1(self.alpha, self.gamma)
        return _capped_repetitions(base, self.sample_size, self.delta, self.n2_cap)

    def with_size(self, size: int) -> "EnumConfig":
        return EnumConfig(**{**self.__dict__, "size": size})


def _validate_set(system, S) -> frozenset[int]:
    members = frozenset(int(x) for x in S)
    if not members:
        raise InvalidInput("set must be nonempty")
    if min(members) < 0 or max(members) >= system.n:
        raise InvalidInput("set contains ids outside the system")
    return members


def greedy_cover(system: RankedSystem, S, params: CommunityParams):
    """Pick members of ``S`` whose prefixes cover almost all of ``S``.

    Each step takes the member of ``S`` (smallest id on ties) voting for the
    most still-uncovered members. Stops once at most ``gamma/16 * |S|`` remain
    uncovered or the picker budget ``ceil(ln(16/gamma)/alpha)`` is spent.

    Returns
    -------
    pickers : list of int
        Chosen members, in pick order.
    covered : frozenset of int
        Union of the pickers' prefixes (may reach outside ``S``).
    """
    members = _validate_set(system, S)
    t = len(members)
    L = prefix_length(params.theta, t)
    limit = default_k1(params.alpha, params.gamma)
    slack = params.gamma / 16 * t
    prefixes = {s: set(system.prefix(s, L).tolist()) for s in sorted(members)}
    uncovered = set(members)
    pickers: list[int] = []
    covered: set[int] = set()
    while len(uncovered) > slack and len(pickers) < limit:
        best = max(sorted(members), key=lambda s: len(prefixes[s] & uncovered))
        pickers.append(best)
        covered |= prefixes[best]
        uncovered -= prefixes[best]
    return pickers, frozenset(covered)


def union_of_prefixes(system: RankedSystem, pickers, length: int) -> frozenset[int]:
    out: set[int] = set()
    for s in pickers:
        out.update(system.prefix(int(s), length).tolist())
    return frozenset(out)


def rough_list_exhaustive(system: RankedSystem, config: EnumConfig) -> list[frozenset[int]]:
    """Union of prefixes for every picker subset of size ``k1``.

    The list has exactly ``C(n, k1)`` entries, in lexicographic order of the
    picker subsets; equal unions are not merged here.
    """
    k1 = min(config.picker_count, system.n)
    count = math.comb(system.n, k1)
    if count > config.budget:
        raise BudgetExceeded(
            f"exhaustive rough step needs C({system.n}, {k1}) = {count} subsets "
            f"(budget {config.budget}); lower k1, raise the budget, or use the "
            "local or two-hop strategies"
        )
    L = config.prefix
    prefixes = [frozenset(system.prefix(s, L).tolist()) for s in range(system.n)]
    return [frozenset().union(*(prefixes[s] for s in U)) for U in itertools.combinations(range(system.n), k1)]


def rough_list_nested(system: RankedSystem, config: EnumConfig) -> list[frozenset[int]]:
    """Prefix unions for every picker subset of size ``1..k1``.

    Contains the size-``k1`` list of :func:`rough_list_exhaustive`. Smaller
    picker sets give tighter supersets, which purification handles much
    better when the practical ``k2`` is small.
    """
    k1 = min(config.picker_count, system.n)
    count = sum(math.comb(system.n, j) for j in range(1, k1 + 1))
    if count > config.budget:
        raise BudgetExceeded(
            f"rough step needs {count} picker subsets of size <= {k1} "
            f"(budget {config.budget}); lower k1, raise the budget, or use the "
            "local or two-hop strategies"
        )
    L = config.prefix
    prefixes = [frozenset(system.prefix(s, L).tolist()) for s in range(system.n)]
    out = []
    for j in range(1, k1 + 1):
        out.extend(frozenset().union(*(prefixes[s] for s in U)) for U in itertools.combinations(range(system.n), j))
    return out


def select_by_votes(system: RankedSystem, voters, length: int, fraction, pool=None) -> frozenset[int]:
    """Members of ``pool`` (default: everyone) voted by at least ``fraction * len(voters)``.

    ``voters`` is a multiset; repeated voters count repeatedly.
    """
    voters = list(voters)
    if not voters:
        return frozenset()
    need = math.ceil(as_fraction(fraction) * len(voters))
    votes = _count_prefix_votes(system, voters, length)
    chosen = (i for i, v in votes.items() if v >= need)
    if pool is not None:
        return frozenset(i for i in chosen if i in pool)
    return frozenset(chosen)


def _purify_once(system, S1_sorted, S1, size, params, k2, rng, memo=None):
    L = prefix_length(params.theta, size)
    fraction = params.alpha - params.gamma / 2
    U2 = [S1_sorted[i] for i in rng.integers(len(S1_sorted), size=k2)]
    S2 = select_by_votes(system, U2, L, fraction, pool=S1)
    if not S2:
        return frozenset(), S2
    if memo is None:
        return select_by_votes(system, sorted(S2), L, fraction), S2
    # the second vote depends only on S2, so repeated S2 reuse it
    key = ("S3", S2)
    if key not in memo:
        memo[key] = select_by_votes(system, sorted(S2), L, fraction)
    return memo[key], S2


def _verified(system, S3, params, memo) -> bool:
    key = ("ok", S3)
    if key not in memo:
        memo[key] = bool(verify_ranked_community(system, S3, params))
    return memo[key]


def purify(system: RankedSystem, S1, config: EnumConfig, rng: np.random.Generator, return_intermediate=False):
    """One purification pass over the rough superset ``S1``.

    Draws ``k2`` members of ``S1`` with replacement, keeps the members of
    ``S1`` they vote for in at least an ``alpha - gamma/2`` fraction, then
    re-votes with that set over all of ``V``. The result is not verified.
    """
    S1 = _validate_set(system, S1)
    S3, S2 = _purify_once(system, sorted(S1), S1, config.size, config.params, config.sample_size, rng)
    if return_intermediate:
        return S3, S2
    return S3


def _stream(seed: int, *keys: int) -> np.random.Generator:
    return np.random.default_rng([int(seed) & (2**64 - 1), *[int(k) for k in keys]])


def _dedupe_preserving_order(items):
    seen = set()
    out = []
    for item in items:
        if item and item not in seen:
            seen.add(item)
            out.append(item)
    return out


def _purify_candidate(system, S1, index, config, memo):
    found = []
    S1_sorted = sorted(S1)
    rng = _stream(config.rng_seed, config.size, index)
    for _ in range(config.repetitions):
        S3, _ = _purify_once(system, S1_sorted, S1, config.size, config.params, config.sample_size, rng, memo)
        if not S3 or not _verified(system, S3, config.params, memo):
            continue
        found.append(S3)
        if config.early_exit:
            # stable under re-purification: the set purifies back to itself
            again, _ = _purify_once(system, sorted(S3), S3, config.size, config.params, config.sample_size, rng, memo)
            if again == S3:
                break
    return found


def _run_candidates(system, candidates, config, workers):
    jobs = list(enumerate(candidates))
    # memo entries are pure functions of their keys, so sharing across threads is safe
    memo: dict = {}
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda job: _purify_candidate(system, job[1], job[0], config, memo), jobs))
    else:
        results = [_purify_candidate(system, S1, idx, config, memo) for idx, S1 in jobs]
    out = CommunitySet()
    for sets in results:
        for S3 in sets:
            out.add(Community(tuple(S3), config.params, True, "exhaustive+purify"))
    return out


def enumerate_main(system: RankedSystem, config: EnumConfig, workers: int = 1) -> CommunitySet:
    """Find communities of size ``config.size`` by rough listing plus purification.

    Rough supersets come from :func:`rough_list_nested` (picker subsets of
    every size up to ``k1``).

    Identical rough supersets are purified once. Each (candidate,
    repetition) pair draws from its own random stream derived from
    ``config.rng_seed``, so the output does not depend on ``workers``.
    Every returned set passes the ranked verifier at ``config.params``.
    """
    candidates = _dedupe_preserving_order(rough_list_nested(system, config))
    return _run_candidates(system, candidates, config, workers)


def enumerate_sizes(system: RankedSystem, config: EnumConfig, sizes=None, workers: int = 1) -> CommunitySet:
    """Run :func:`enumerate_main` for every size in ``sizes`` (default ``1..n``) and merge."""
    sizes = range(1, system.n + 1) if sizes is None else sizes
    out = CommunitySet()
    for t in sizes:
        out.update(enumerate_main(system, config.with_size(t), workers=workers))
    return out


def _window(system: RankedSystem, v: int, length: int) -> np.ndarray:
    prefix = system.prefix(v, length)
    if not len(prefix):
        raise InvalidInput(f"member {v} has an empty preference list")
    return prefix


def rr_distribution(system: RankedSystem, y: int, t: int, theta) -> dict[int, Fraction]:
    """Exact distribution of the two-hop sample ``R(R(y))``.

    ``R(v)`` is uniform over the first ``min(ceil(theta t), len(pi_v))``
    entries of ``pi_v``; a first-hop member with an empty list contributes
    no mass.
    """
    L = prefix_length(theta, t)
    first = _window(system, y, L).tolist()
    out: dict[int, Fraction] = {}
    for z in first:
        second = system.prefix(z, L).tolist()
        if not second:
            continue
        w = Fraction(1, len(first) * len(second))
        for x in second:
            out[x] = out.get(x, Fraction(0)) + w
    return out


def rr_probability(system: RankedSystem, y: int, x: int, t: int, theta) -> Fraction:
    """Exact ``Pr[R(R(y)) = x]``."""
    return rr_distribution(system, y, t, theta).get(int(x), Fraction(0))


def alt_k1(alpha) -> int:
    alpha = as_fraction(alpha)
    return math.ceil(math.log(1 / alpha) / alpha) + 1


def rough_list_alt(system: RankedSystem, config: EnumConfig, k1: int | None = None) -> list[frozenset[int]]:
    """Two-hop rough supersets: one per subset ``U0`` of size ``ceil(ln(1/alpha)/alpha) + 1``.

    ``S1`` collects every ``x`` whose summed two-hop probability from ``U0``
    reaches ``alpha / (2 theta^2 t)``.
    """
    k = min(k1 if k1 is not None else alt_k1(config.alpha), system.n)
    count = math.comb(system.n, k)
    if count > config.budget:
        raise BudgetExceeded(f"two-hop rough step needs C({system.n}, {k}) = {count} subsets (budget {config.budget})")
    t = config.size
    threshold = config.alpha / (2 * config.theta**2 * t)
    dists = []
    for y in range(system.n):
        dists.append(rr_distribution(system, y, t, config.theta) if system.lengths[y] else {})
    out = []
    for U0 in itertools.combinations(range(system.n), k):
        score: dict[int, Fraction] = {}
        for y in U0:
            for x, p in dists[y].items():
                score[x] = score.get(x, Fraction(0)) + p
        out.append(frozenset(x for x, p in score.items() if p >= threshold))
    return out


def quasipoly_k(n: int, gamma) -> int:
    """Witness multiset size ``ceil(2 ln(4n) / gamma^2)``."""
    return math.ceil(2 * math.log(4 * n) / float(as_fraction(gamma)) ** 2)


def witness_set(system, U, t: int, params: CommunityParams) -> frozenset[int]:
    """Members receiving at least ``(alpha - gamma/2) |U|`` votes from multiset ``U`` at size ``t``."""
    U = list(U)
    fraction = params.alpha - params.gamma / 2
    if isinstance(system, WeightedSystem):
        tally = weighted_vote_tally(system, U, t, params.theta)
        return frozenset(tally.members_at_least(fraction * len(U)))
    return select_by_votes(system, U, prefix_length(params.theta, t), fraction)


def enumerate_quasipoly(system, params: CommunityParams, k_override: int | None = None,
                        size_range=None, budget: int = 2_000_000) -> CommunitySet:
    """Exhaustive multiset search: every size-``k`` multiset ``U`` and every size ``t``.

    Works for ranked and weighted systems. ``k`` defaults to
    ``ceil(2 ln(4n) / gamma^2)``, which is only feasible for tiny ``n``.
    """
    n = system.n
    k = k_override if k_override is not None else quasipoly_k(n, params.gamma)
    sizes = list(range(1, n + 1) if size_range is None else size_range)
    work = math.comb(n + k - 1, k) * max(len(sizes), 1)
    if work > budget:
        raise BudgetExceeded(
            f"multiset search needs {work} (multiset, size) pairs with k={k} "
            f"(budget {budget}); pass k_override or restrict size_range"
        )
    out = CommunitySet()
    for U in itertools.combinations_with_replacement(range(n), k):
        for t in sizes:
            S = witness_set(system, U, t, params)
            if S and verify_community(system, S, params):
                out.add(Community(tuple(S), params, True, "quasipoly"))
    return out


def _naive_ranked_ok(system: RankedSystem, members: tuple[int, ...], params: CommunityParams) -> bool:
    t = len(members)
    L = math.ceil(params.theta * t)
    tops = [set(system.ranking(s).tolist()[:L]) for s in members]
    inside = set(members)
    for i in range(system.n):
        votes = sum(1 for top in tops if i in top)
        if i in inside and votes < params.alpha * t:
            return False
        if i not in inside and votes > params.beta * t:
            return False
    return True


def _naive_weighted_ok(system: WeightedSystem, members: tuple[int, ...], params: CommunityParams) -> bool:
    t = len(members)
    cap = params.theta * t
    received = [Fraction(0)] * system.n
    for s in members:
        row = [system.weight(s, j) for j in range(system.n)]
        order = sorted(range(system.n), key=lambda j: -row[j])
        budget = cap
        pos = 0
        while pos < len(order) and budget > 0 and row[order[pos]] > 0:
            value = row[order[pos]]
            tied = [j for j in order[pos:] if row[j] == value]
            if value * len(tied) <= budget:
                for j in tied:
                    received[j] += value
                budget -= value * len(tied)
            else:
                for j in tied:
                    received[j] += budget / len(tied)
                budget = Fraction(0)
            pos += len(tied)
    inside = set(members)
    for i in range(system.n):
        if i in inside and received[i] < params.alpha * t:
            return False
        if i not in inside and received[i] > params.beta * t:
            return False
    return True


def naive_verify(system, members, params: CommunityParams) -> bool:
    """Reference verifier: plain loops over all members, no sparse tallies."""
    members = tuple(sorted(set(members)))
    if isinstance(system, WeightedSystem):
        return _naive_weighted_ok(system, members, params)
    return _naive_ranked_ok(system, members, params)


def brute_force_oracle(system, params: CommunityParams, size_range=None, limit: int = 14) -> CommunitySet:
    """Exact set of communities found by testing every nonempty subset.

    Uses the independent :func:`naive_verify`; refuses systems with more
    than ``limit`` members.
    """
    if system is None or system.n < 1:
        raise InvalidInput("oracle needs a nonempty system")
    if system.n > limit:
        raise BudgetExceeded(f"brute-force oracle limited to n <= {limit}, got n = {system.n}")
    sizes = range(1, system.n + 1) if size_range is None else size_range
    out = CommunitySet()
    for t in sizes:
        for members in itertools.combinations(range(system.n), t):
            if naive_verify(system, members, params):
                out.add(Community(members, params, True, "oracle"))
    return out
