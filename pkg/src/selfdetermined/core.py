"""Affinity systems, vote tallies and community verification.

Everything else in the package is checked against the functions in this
module, so they favour exactness over speed: ranked tallies are integers and
weighted tallies are :class:`fractions.Fraction` values, which keeps the
``alpha * |S|`` / ``beta * |S|`` comparisons free of float rounding.
"""

from __future__ import annotations

import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from numbers import Rational

import numpy as np

__all__ = [
    "InvalidInput",
    "BudgetExceeded",
    "SolverFailure",
    "UnsupportedParameters",
    "as_fraction",
    "prefix_length",
    "RankedSystem",
    "WeightedSystem",
    "CommunityParams",
    "VoteTally",
    "Verification",
    "Community",
    "CommunitySet",
    "vote_count_ranked",
    "capped_vote_vector",
    "weighted_vote_tally",
    "verify_ranked_community",
    "verify_weighted_community",
    "verify_community",
    "is_good_seed",
]


class InvalidInput(ValueError):
    """Raised when an argument violates an operation's precondition."""


class UnsupportedParameters(ValueError):
    """Raised when parameters fall outside the regime an algorithm handles."""


class BudgetExceeded(RuntimeError):
    """Raised when an exhaustive search would exceed its configured budget."""


class SolverFailure(RuntimeError):
    """Raised when a numerical solver does not converge or fails."""


def as_fraction(value) -> Fraction:
    """Convert ``value`` to an exact :class:`~fractions.Fraction`.

    Floats go through their shortest ``repr`` so that ``0.1`` becomes
    ``1/10`` rather than the nearest binary double. Strings such as
    ``"3/4"`` or ``"0.25"`` are accepted as well.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)):
        return Fraction(int(value))
    if isinstance(value, Rational):
        return Fraction(value.numerator, value.denominator)
    if isinstance(value, (float, np.floating)):
        if not math.isfinite(value):
            raise InvalidInput(f"non-finite value {value!r}")
        return Fraction(repr(float(value)))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise InvalidInput(f"cannot parse {value!r} as a number") from exc
    raise InvalidInput(f"cannot convert {type(value).__name__} to a fraction")


def prefix_length(theta, size: int) -> int:
    """Return ``ceil(theta * size)``, the number of top entries that vote."""
    return math.ceil(as_fraction(theta) * size)


def _member_list(members: Iterable[int], n: int, what: str = "member") -> list[int]:
    out = [int(m) for m in members]
    for m in out:
        if not 0 <= m < n:
            raise InvalidInput(f"{what} id {m} out of range [0, {n})")
    return out


class RankedSystem:
    """Preference lists ``pi_0 .. pi_{n-1}`` over members ``0 .. n-1``.

    Lists may be partial and may or may not include their owner. Rankings are
    stored in a padded ``(n, width)`` integer table plus a length vector, which
    lets samplers gather second-hop picks for many draws at once.

    Parameters
    ----------
    rankings : sequence of sequences of int
        ``rankings[i]`` is member ``i``'s ordered preference list.
    n : int, optional
        Member count; defaults to ``len(rankings)``.
    """

    def __init__(self, rankings: Sequence[Sequence[int]], n: int | None = None):
        if n is None:
            n = len(rankings)
        if n < 1:
            raise InvalidInput("a ranked system needs at least one member")
        if len(rankings) > n:
            raise InvalidInput(f"{len(rankings)} rankings for {n} members")
        rows = [np.asarray(r, dtype=np.int64).ravel() for r in rankings]
        rows += [np.empty(0, dtype=np.int64)] * (n - len(rows))
        width = max((len(r) for r in rows), default=0)
        table = np.full((n, max(width, 1)), -1, dtype=np.int32 if n < 2**31 else np.int64)
        lengths = np.zeros(n, dtype=np.int64)
        for i, r in enumerate(rows):
            if len(r) and (r.min() < 0 or r.max() >= n):
                raise InvalidInput(f"ranking of member {i} lists an id outside [0, {n})")
            if len(np.unique(r)) != len(r):
                raise InvalidInput(f"ranking of member {i} contains duplicates")
            table[i, : len(r)] = r
            lengths[i] = len(r)
        self._build(n, table, lengths)

    def _build(self, n, table, lengths):
        self.n = int(n)
        self.table = table
        self.lengths = lengths
        self.table.setflags(write=False)
        self.lengths.setflags(write=False)

    @classmethod
    def from_table(cls, table: np.ndarray, lengths: np.ndarray | None = None) -> "RankedSystem":
        """Wrap a prebuilt padded table without per-row validation.

        Used by generators that produce millions of entries; callers are
        responsible for the no-duplicates / in-range invariants.
        """
        table = np.ascontiguousarray(table)
        n = table.shape[0]
        if lengths is None:
            lengths = np.full(n, table.shape[1], dtype=np.int64)
        obj = cls.__new__(cls)
        obj._build(n, table, np.asarray(lengths, dtype=np.int64).copy())
        return obj

    def ranking(self, i: int) -> np.ndarray:
        return self.table[i, : self.lengths[i]]

    @property
    def rankings(self) -> list[np.ndarray]:
        return [self.ranking(i) for i in range(self.n)]

    def prefix(self, i: int, length: int) -> np.ndarray:
        """First ``min(length, len(pi_i))`` entries of member ``i``'s list."""
        return self.table[i, : min(int(length), int(self.lengths[i]))]

    def is_total(self) -> bool:
        return bool(np.all(self.lengths == self.n))

    def __eq__(self, other):
        if not isinstance(other, RankedSystem) or other.n != self.n:
            return NotImplemented
        return all(np.array_equal(a, b) for a, b in zip(self.rankings, other.rankings))

    def __repr__(self):
        return f"RankedSystem(n={self.n})"


class WeightedSystem:
    """Affinity weights ``a[i, j]`` in ``[0, 1]``, stored sparsely and exactly.

    Parameters
    ----------
    n : int
        Member count.
    weights : mapping or array-like
        Either a mapping ``(i, j) -> w`` (absent pairs are zero) or a dense
        ``n x n`` array.
    """

    def __init__(self, n: int, weights):
        if n < 1:
            raise InvalidInput("a weighted system needs at least one member")
        self.n = int(n)
        rows: list[dict[int, Fraction]] = [{} for _ in range(self.n)]
        if isinstance(weights, Mapping):
            items = weights.items()
        else:
            arr = np.asarray(weights)
            if arr.shape != (self.n, self.n):
                raise InvalidInput(f"dense weights must have shape ({n}, {n})")
            items = (((i, j), arr[i, j]) for i, j in zip(*np.nonzero(arr)))
        for (i, j), w in items:
            i, j = int(i), int(j)
            if not (0 <= i < self.n and 0 <= j < self.n):
                raise InvalidInput(f"weight index ({i}, {j}) out of range")
            w = as_fraction(w)
            if w < 0 or w > 1:
                raise InvalidInput(f"weight a[{i},{j}] = {w} outside [0, 1]")
            if w:
                rows[i][j] = w
        self.rows = rows

    def row(self, i: int) -> dict[int, Fraction]:
        return self.rows[i]

    def weight(self, i: int, j: int) -> Fraction:
        return self.rows[i].get(j, Fraction(0))

    def dense(self) -> np.ndarray:
        out = np.zeros((self.n, self.n))
        for i, row in enumerate(self.rows):
            for j, w in row.items():
                out[i, j] = float(w)
        return out

    def __eq__(self, other):
        if not isinstance(other, WeightedSystem):
            return NotImplemented
        return self.n == other.n and self.rows == other.rows

    def __repr__(self):
        nnz = sum(len(r) for r in self.rows)
        return f"WeightedSystem(n={self.n}, nnz={nnz})"


@dataclass(frozen=True)
class CommunityParams:
    """Robustness parameters ``(theta, alpha, beta)``; ``gamma = alpha - beta``."""

    theta: Fraction
    alpha: Fraction
    beta: Fraction

    def __post_init__(self):
        theta, alpha, beta = (as_fraction(x) for x in (self.theta, self.alpha, self.beta))
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        if theta <= 0:
            raise InvalidInput(f"theta must be positive, got {theta}")
        if not 0 <= beta < alpha <= 1:
            raise InvalidInput(f"need 0 <= beta < alpha <= 1, got alpha={alpha}, beta={beta}")

    @property
    def gamma(self) -> Fraction:
        return self.alpha - self.beta

    def __str__(self):
        return f"theta={self.theta} alpha={self.alpha} beta={self.beta}"


@dataclass(frozen=True)
class VoteTally:
    """Votes received by each member from a voting set.

    Only members with a nonzero total are stored; indexing any other member
    returns zero.
    """

    n: int
    votes: dict
    voters: int
    budget: object  # prefix length (ranked) or weight cap (weighted)

    def __getitem__(self, i: int):
        return self.votes.get(int(i), 0)

    def dense(self) -> np.ndarray:
        out = np.zeros(self.n, dtype=object if self._exact() else np.int64)
        if out.dtype == object:
            out[:] = Fraction(0)
        for i, v in self.votes.items():
            out[i] = v
        return out

    def _exact(self) -> bool:
        return any(isinstance(v, Fraction) for v in self.votes.values())

    def total(self):
        return sum(self.votes.values(), 0)

    def members_at_least(self, threshold) -> set[int]:
        return {i for i, v in self.votes.items() if v >= threshold}

    def as_list(self) -> list:
        return [self[i] for i in range(self.n)]


class Verification:
    """Outcome of a verification: truthy iff the set is a community.

    ``tally`` is the certificate; ``failures`` lists members that broke
    the inside (``"inside"``) or outside (``"outside"``) condition.
    """

    __slots__ = ("is_community", "tally", "failures")

    def __init__(self, is_community: bool, tally: VoteTally, failures=()):
        self.is_community = bool(is_community)
        self.tally = tally
        self.failures = tuple(failures)

    def __bool__(self):
        return self.is_community

    def __repr__(self):
        return f"Verification({self.is_community}, failures={list(self.failures)[:5]})"


@dataclass(frozen=True, order=True)
class Community:
    members: tuple[int, ...]
    params: CommunityParams | None = field(default=None, compare=False)
    verified: bool = field(default=False, compare=False)
    source: str = field(default="", compare=False)

    def __post_init__(self):
        members = tuple(sorted({int(m) for m in self.members}))
        if not members:
            raise InvalidInput("a community must be nonempty")
        object.__setattr__(self, "members", members)

    def __len__(self):
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def __contains__(self, item):
        return item in set(self.members)

    @property
    def member_set(self) -> frozenset[int]:
        return frozenset(self.members)


class CommunitySet:
    """Verified communities deduplicated by member set.

    The first entry added for a given member set wins; its ``source`` tag
    records which strategy produced it. Iteration is in lexicographic order of
    the sorted member tuples.
    """

    def __init__(self, communities: Iterable[Community] = ()):
        self._by_members: dict[tuple[int, ...], Community] = {}
        for c in communities:
            self.add(c)

    def add(self, community: Community) -> bool:
        if not community.verified:
            raise InvalidInput("only verified communities may enter a CommunitySet")
        if community.members in self._by_members:
            return False
        self._by_members[community.members] = community
        return True

    def update(self, other: Iterable[Community]):
        for c in other:
            self.add(c)

    def __iter__(self):
        return iter(self._by_members[k] for k in sorted(self._by_members))

    def __len__(self):
        return len(self._by_members)

    def __contains__(self, members):
        key = members.members if isinstance(members, Community) else tuple(sorted(members))
        return key in self._by_members

    def member_sets(self) -> set[frozenset[int]]:
        return {frozenset(k) for k in self._by_members}

    def __repr__(self):
        return f"CommunitySet({[list(c.members) for c in self]})"


def _count_prefix_votes(system: RankedSystem, voters: Sequence[int], length: int) -> dict[int, int]:
    if not len(voters) or length < 1:
        return {}
    voters = np.asarray(voters, dtype=np.int64)
    width = min(int(length), system.table.shape[1])
    block = system.table[voters, :width]
    mask = np.arange(width) < np.minimum(system.lengths[voters], width)[:, None]
    ids = block[mask]
    if not ids.size:
        return {}
    if system.n <= 4 * ids.size:
        # dense counting is cheaper once the ballots are comparable to n
        counts = np.bincount(ids, minlength=system.n)
        uniq = np.flatnonzero(counts)
        return dict(zip(uniq.tolist(), counts[uniq].tolist()))
    uniq, counts = np.unique(ids, return_counts=True)
    return dict(zip(uniq.tolist(), counts.tolist()))


def vote_count_ranked(system: RankedSystem, voters: Iterable[int], prefix_len: int) -> VoteTally:
    """Count, for every member, how many voters list it in their top ``prefix_len``.

    ``voters`` is treated as a multiset: a repeated voter votes repeatedly.
    """
    if prefix_len < 1:
        raise InvalidInput("prefix length must be at least 1")
    voters = _member_list(voters, system.n, "voter")
    votes = _count_prefix_votes(system, voters, prefix_len)
    return VoteTally(system.n, votes, len(voters), int(prefix_len))


def capped_vote_vector(weights: Sequence, cap) -> list[Fraction]:
    """Cap one voter's weights so their total is ``min(cap, sum(weights))``.

    Weights are taken from the largest value down and kept in full while
    they fit under ``cap``. The group of entries sharing the first value
    that does not fit splits the remaining budget equally, and everything
    smaller is zeroed. The result is indexed like the input.

    Examples
    --------
    >>> [str(x) for x in capped_vote_vector([1, 0.7, 0.5, 0.2], 2)]
    ['1', '7/10', '3/10', '0']
    """
    cap = as_fraction(cap)
    if cap <= 0:
        raise InvalidInput("cap must be positive")
    ws = [as_fraction(w) for w in weights]
    if any(w < 0 for w in ws):
        raise InvalidInput("weights must be nonnegative")
    out = [Fraction(0)] * len(ws)
    groups: dict[Fraction, list[int]] = {}
    for idx, w in enumerate(ws):
        if w:
            groups.setdefault(w, []).append(idx)
    used = Fraction(0)
    for value in sorted(groups, reverse=True):
        idxs = groups[value]
        block = value * len(idxs)
        if used + block <= cap:
            for idx in idxs:
                out[idx] = value
            used += block
            continue
        share = (cap - used) / len(idxs)
        for idx in idxs:
            out[idx] = share
        break
    return out


def _capped_row(system: WeightedSystem, s: int, cap: Fraction) -> dict[int, Fraction]:
    row = system.rows[s]
    if sum(row.values(), Fraction(0)) <= cap:
        return row
    keys = list(row)
    capped = capped_vote_vector([row[k] for k in keys], cap)
    return {k: w for k, w in zip(keys, capped) if w}


def weighted_vote_tally(system: WeightedSystem, voters: Iterable[int], target_size: int, theta) -> VoteTally:
    """Sum the capped weight rows of ``voters``; each row is capped at ``theta * target_size``."""
    if target_size < 1:
        raise InvalidInput("target size must be positive")
    voters = _member_list(voters, system.n, "voter")
    cap = as_fraction(theta) * target_size
    votes: dict[int, Fraction] = {}
    for s in voters:
        for j, w in _capped_row(system, s, cap).items():
            votes[j] = votes.get(j, Fraction(0)) + w
    return VoteTally(system.n, votes, len(voters), cap)


def _check_thresholds(tally: VoteTally, members: set[int], params: CommunityParams) -> Verification:
    t = len(members)
    inside = params.alpha * t
    outside = params.beta * t
    if not tally._exact():
        # integer tallies: compare against integer cut-offs
        inside, outside = math.ceil(inside), math.floor(outside)
    failures = [("inside", i) for i in sorted(members) if tally[i] < inside]
    failures += [("outside", j) for j, v in sorted(tally.votes.items()) if j not in members and v > outside]
    return Verification(not failures, tally, failures)


def _as_member_set(S, n) -> set[int]:
    members = set(_member_list(S, n))
    if not members:
        raise InvalidInput("the candidate set must be nonempty")
    return members


def verify_ranked_community(system: RankedSystem, S: Iterable[int], params: CommunityParams) -> Verification:
    """Check the ranked community conditions at prefix ``ceil(theta |S|)``."""
    members = _as_member_set(S, system.n)
    tally = vote_count_ranked(system, sorted(members), prefix_length(params.theta, len(members)))
    return _check_thresholds(tally, members, params)


def verify_weighted_community(system: WeightedSystem, S: Iterable[int], params: CommunityParams) -> Verification:
    """Check the weighted community conditions with rows capped at ``theta |S|``."""
    members = _as_member_set(S, system.n)
    tally = weighted_vote_tally(system, sorted(members), len(members), params.theta)
    return _check_thresholds(tally, members, params)


def verify_community(system, S, params: CommunityParams) -> Verification:
    """Dispatch to the ranked or weighted verifier."""
    if isinstance(system, RankedSystem):
        return verify_ranked_community(system, S, params)
    if isinstance(system, WeightedSystem):
        return verify_weighted_community(system, S, params)
    raise InvalidInput(f"unsupported system type {type(system).__name__}")


def is_good_seed(system: RankedSystem, S: Iterable[int], v: int, theta) -> bool:
    """True iff ``v``'s top ``ceil(theta |S|)`` hits at least half of ``S``."""
    members = _as_member_set(S, system.n)
    if v not in members:
        raise InvalidInput(f"seed {v} is not a member of S")
    hits = sum(1 for x in system.prefix(v, prefix_length(theta, len(members))).tolist() if x in members)
    return 2 * hits >= len(members)
