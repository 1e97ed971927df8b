"""Multi-faceted affinity systems: each member holds up to ``f`` rankings.

A community here is a pair ``(S, psi)`` where ``psi`` picks the facet each
member of ``S`` votes with. Enumeration guesses facets for the sampled
members; given ``S``, a facet assignment is recovered either exhaustively or
by a feasibility LP followed by randomized rounding.
"""

from __future__ import annotations

import itertools
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .core import (
    BudgetExceeded,
    CommunityParams,
    InvalidInput,
    RankedSystem,
    SolverFailure,
    VoteTally,
    as_fraction,
    prefix_length,
)
from .enumerate import _stream, default_k1

__all__ = [
    "FacetedSystem",
    "RetryExhausted",
    "faceted_vote_tally",
    "verify_multifaceted",
    "recover_facets",
    "solve_facet_lp",
    "MultifacetConfig",
    "enumerate_multifaceted",
]


class RetryExhausted(SolverFailure):
    """Randomized rounding failed to produce a valid assignment within the retry budget."""


class FacetedSystem:
    """Members ``0..n-1``, each with between 1 and ``f`` ranked facets.

    ``rankings[i][j]`` is member ``i``'s facet ``j + 1``; facet indices in
    assignments and files are 1-based.
    """

    def __init__(self, rankings: Sequence[Sequence[Sequence[int]]], f: int | None = None):
        n = len(rankings)
        if n < 1:
            raise InvalidInput("a faceted system needs at least one member")
        counts = [len(r) for r in rankings]
        if min(counts) < 1:
            raise InvalidInput("every member needs at least one facet")
        self.n = n
        self.f = max(counts) if f is None else int(f)
        if max(counts) > self.f:
            raise InvalidInput(f"a member has more than f={self.f} facets")
        self.facet_counts = counts
        self.layers = []
        for j in range(max(counts)):
            self.layers.append(RankedSystem([r[j] if j < len(r) else [] for r in rankings], n=n))

    @classmethod
    def from_ranked(cls, *systems: RankedSystem) -> "FacetedSystem":
        n = systems[0].n
        return cls([[sys.ranking(i).tolist() for sys in systems] for i in range(n)])

    def facet(self, i: int, j: int):
        """Member ``i``'s facet ``j`` (1-based)."""
        if not 1 <= j <= self.facet_counts[i]:
            raise InvalidInput(f"member {i} has no facet {j}")
        return self.layers[j - 1].ranking(i)

    def prefix(self, i: int, j: int, length: int):
        if not 1 <= j <= self.facet_counts[i]:
            raise InvalidInput(f"member {i} has no facet {j}")
        return self.layers[j - 1].prefix(i, length)


def _check_psi(system: FacetedSystem, members, psi: Mapping[int, int]):
    for s in members:
        if s not in psi:
            raise InvalidInput(f"facet assignment missing member {s}")
        if not 1 <= psi[s] <= system.facet_counts[s]:
            raise InvalidInput(f"member {s} has no facet {psi[s]}")


def _faceted_votes(system: FacetedSystem, voters, facets, length: int) -> dict[int, int]:
    votes: dict[int, int] = {}
    for s, j in zip(voters, facets):
        for x in system.layers[j - 1].prefix(s, length).tolist():
            votes[x] = votes.get(x, 0) + 1
    return votes


def faceted_vote_tally(system: FacetedSystem, S, psi: Mapping[int, int], theta) -> VoteTally:
    """Votes from ``S`` where each voter uses facet ``psi[s]`` at prefix ``ceil(theta |S|)``."""
    members = sorted({int(s) for s in S})
    if not members:
        raise InvalidInput("S must be nonempty")
    _check_psi(system, members, psi)
    L = prefix_length(theta, len(members))
    votes = _faceted_votes(system, members, [psi[s] for s in members], L)
    return VoteTally(system.n, votes, len(members), L)


def verify_multifaceted(system: FacetedSystem, S, psi: Mapping[int, int], params: CommunityParams) -> bool:
    """Inside members need ``>= alpha |S|`` votes, outsiders at most ``beta |S|``."""
    members = {int(s) for s in S}
    tally = faceted_vote_tally(system, members, psi, params.theta)
    t = len(members)
    if any(tally[i] < params.alpha * t for i in members):
        return False
    return all(v <= params.beta * t for j, v in tally.votes.items() if j not in members)


def _case_threshold(n: int, gamma) -> float:
    return 8 * math.log(n) / float(gamma) ** 2


def solve_facet_lp(system: FacetedSystem, S, params: CommunityParams):
    """Fractional facet weights making ``S`` a community on average.

    Returns ``(members, weights)`` where ``weights[s]`` is a probability
    vector over member ``s``'s facets, or ``None`` when the LP is
    infeasible. The strict outside bound is enforced as
    ``<= beta t - 1/(4t)``.
    """
    members = sorted({int(s) for s in S})
    t = len(members)
    L = prefix_length(params.theta, t)
    columns = [(s, j) for s in members for j in range(1, system.facet_counts[s] + 1)]
    col_index = {c: k for k, c in enumerate(columns)}
    inside = set(members)
    hits: dict[int, list[int]] = {}
    for (s, j), k in col_index.items():
        for x in system.prefix(s, j, L).tolist():
            hits.setdefault(x, []).append(k)
    A_ub, b_ub = [], []
    alpha_t = float(params.alpha * t)
    for x in members:
        row = np.zeros(len(columns))
        row[hits.get(x, [])] = -1.0
        A_ub.append(row)
        b_ub.append(-alpha_t)
    bound = float(params.beta * t) - 1 / (4 * t)
    for y, ks in sorted(hits.items()):
        if y in inside:
            continue
        row = np.zeros(len(columns))
        row[ks] = 1.0
        A_ub.append(row)
        b_ub.append(bound)
    A_eq = np.zeros((t, len(columns)))
    for (s, _), k in col_index.items():
        A_eq[members.index(s), k] = 1.0
    result = linprog(
        np.zeros(len(columns)), A_ub=np.array(A_ub) if A_ub else None, b_ub=b_ub or None,
        A_eq=A_eq, b_eq=np.ones(t), bounds=(0, 1), method="highs",
    )
    if result.status == 2:
        return None
    if result.status != 0:
        raise SolverFailure(f"facet LP failed: {result.message}")
    weights = {}
    for s in members:
        ks = [col_index[(s, j)] for j in range(1, system.facet_counts[s] + 1)]
        w = np.clip(result.x[ks], 0, None)
        weights[s] = w / w.sum()
    return members, weights


def recover_facets(system: FacetedSystem, S, params: CommunityParams, rng: np.random.Generator | None = None,
                   max_retries: int = 200, exhaustive_budget: int = 2_000_000, case: int | None = None):
    """Find a facet assignment for the known set ``S``.

    Small sets (``t <= 8 ln n / gamma^2``) are searched exhaustively for an
    assignment valid at ``params``. Larger sets solve the facet LP and
    round it by sampling until the assignment is valid at
    ``(alpha - gamma/4, beta + gamma/4)``.

    Returns
    -------
    dict or None
        The assignment, or ``None`` when no assignment exists (exhaustive
        case) or the LP is infeasible.

    Raises
    ------
    RetryExhausted
        If rounding never produced a valid assignment.
    """
    members = sorted({int(s) for s in S})
    if not members:
        raise InvalidInput("S must be nonempty")
    t = len(members)
    if case is None:
        case = 1 if t <= _case_threshold(system.n, params.gamma) else 2
    if case == 1:
        space = math.prod(system.facet_counts[s] for s in members)
        if space > exhaustive_budget:
            raise BudgetExceeded(f"exhaustive facet search needs {space} assignments (budget {exhaustive_budget})")
        ranges = [range(1, system.facet_counts[s] + 1) for s in members]
        for combo in itertools.product(*ranges):
            psi = dict(zip(members, combo))
            if verify_multifaceted(system, members, psi, params):
                return psi
        return None
    solution = solve_facet_lp(system, members, params)
    if solution is None:
        return None
    _, weights = solution
    relaxed = CommunityParams(params.theta, params.alpha - params.gamma / 4, params.beta + params.gamma / 4)
    rng = rng if rng is not None else np.random.default_rng(0)
    for _ in range(max_retries):
        psi = {s: int(rng.choice(len(weights[s]), p=weights[s])) + 1 for s in members}
        if verify_multifaceted(system, members, psi, relaxed):
            return psi
    raise RetryExhausted(f"no rounding of the facet LP verified after {max_retries} tries")


@dataclass(frozen=True)
class MultifacetConfig:
    """Practical budgets for :func:`enumerate_multifaceted`.

    ``m`` is the final-stage sample size; it defaults to
    ``ceil(8 ln n / gamma^2)`` and is clipped to ``m_cap``. ``final_guesses``
    random facet guesses are tried for each final sample.
    """

    params: CommunityParams
    size: int
    k1: int | None = None
    k2: int = 4
    n2: int = 8
    m: int | None = None
    m_cap: int = 12
    final_samples: int = 4
    final_guesses: int = 8
    rng_seed: int = 0
    budget: int = 2_000_000

    @property
    def picker_count(self) -> int:
        return self.k1 if self.k1 is not None else default_k1(self.params.alpha, self.params.gamma)


def _exhaustive_or_random_guesses(counts, budget, rng, tries):
    space = math.prod(counts)
    if space <= budget:
        return list(itertools.product(*[range(1, c + 1) for c in counts]))
    return [tuple(int(rng.integers(c)) + 1 for c in counts) for _ in range(tries)]


def enumerate_multifaceted(system: FacetedSystem, config: MultifacetConfig):
    """Enumerate multi-faceted communities of size ``config.size``.

    Rough sets come from every ``k1`` pickers under every facet guess;
    purification samples ``k2`` members and tries every facet guess on them.
    Each resulting approximation is sharpened by sampling ``m`` of its
    members with guessed facets, and each sharpened set gets its facets
    recovered. Returns sorted ``(S, psi)`` pairs valid at ``config.params``.
    """
    params = config.params
    n, t = system.n, config.size
    L = prefix_length(params.theta, t)
    k1 = min(config.picker_count, n)
    cost = math.comb(n, k1) * system.f ** (k1 + config.k2)
    if cost > config.budget:
        raise BudgetExceeded(f"multifacet search needs about {cost} rough guesses (budget {config.budget})")
    fraction = params.alpha - params.gamma / 2
    rough = []
    seen = set()
    for U in itertools.combinations(range(n), k1):
        for guess in itertools.product(*[range(1, system.facet_counts[s] + 1) for s in U]):
            S1 = frozenset(x for s, j in zip(U, guess) for x in system.prefix(s, j, L).tolist())
            if S1 and S1 not in seen:
                seen.add(S1)
                rough.append(S1)
    approximations = []
    approx_seen = set()
    for idx, S1 in enumerate(rough):
        S1_sorted = sorted(S1)
        for rep in range(config.n2):
            rng = _stream(config.rng_seed, t, idx, rep)
            U2 = [S1_sorted[i] for i in rng.integers(len(S1_sorted), size=config.k2)]
            counts = [system.facet_counts[s] for s in U2]
            for guess in _exhaustive_or_random_guesses(counts, 256, rng, 64):
                votes = _faceted_votes(system, U2, guess, L)
                S2 = frozenset(i for i, v in votes.items() if i in S1 and v >= fraction * len(U2))
                if S2 and S2 not in approx_seen:
                    approx_seen.add(S2)
                    approximations.append(S2)
    m = config.m if config.m is not None else math.ceil(8 * math.log(n) / float(params.gamma) ** 2)
    m = max(1, min(m, config.m_cap))
    results: dict[frozenset, dict] = {}
    tried = set()
    for idx, S2 in enumerate(approximations):
        S2_sorted = sorted(S2)
        for rep in range(config.final_samples):
            rng = _stream(config.rng_seed, t, idx, rep, 2)
            U3 = [S2_sorted[i] for i in rng.integers(len(S2_sorted), size=m)]
            counts = [system.facet_counts[s] for s in U3]
            for guess in _exhaustive_or_random_guesses(counts, config.final_guesses, rng, config.final_guesses):
                votes = _faceted_votes(system, U3, guess, L)
                S = frozenset(i for i, v in votes.items() if v >= fraction * len(U3))
                if not S or S in tried:
                    continue
                tried.add(S)
                try:
                    psi = recover_facets(system, S, params, rng=rng)
                except (BudgetExceeded, RetryExhausted):
                    continue
                if psi is not None and verify_multifaceted(system, S, psi, params):
                    results[S] = psi
    return [(tuple(sorted(S)), results[S]) for S in sorted(results, key=lambda s: tuple(sorted(s)))]
