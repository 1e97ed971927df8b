"""Local community discovery from a single seed member.

A seed samples the two-hop walk ``R(R(v))`` a few thousand times, keeps the
members hit often enough as a rough superset, and purifies it. Nothing
outside the prefix lists of sampled members is touched, so the cost of one
search does not grow with ``n``.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .core import (
    Community,
    CommunityParams,
    CommunitySet,
    InvalidInput,
    RankedSystem,
    UnsupportedParameters,
    as_fraction,
    prefix_length,
    verify_ranked_community,
)
from .enumerate import _purify_once, _stream, default_k2

__all__ = [
    "LocalConfig",
    "sample_r",
    "two_hop_samples",
    "local_rough",
    "local_find",
    "local_epsilon",
    "size_cells",
    "enumerate_all_local",
]

HALF = Fraction(1, 2)


def local_epsilon(params: CommunityParams) -> Fraction:
    """Default size/parameter slack ``min(gamma, alpha - 1/2) / 100``."""
    return min(params.gamma, params.alpha - HALF) / 100


@dataclass(frozen=True)
class LocalConfig:
    """Settings for a single-seed search.

    Defaults follow the local recovery analysis: ``draws`` two-hop samples,
    members hit at least ``hit_threshold`` times form the rough set, and
    purification uses ``k2`` samples repeated up to ``n2`` times (``n2`` is
    capped at ``n2_cap``).
    """

    params: CommunityParams
    size: int
    delta: float = 0.1
    draws: int | None = None
    hit_threshold: int | None = None
    k2: int | None = None
    n2: int | None = None
    rng_seed: int = 0
    n2_cap: int = 16
    prefix: int | None = None  # overrides ceil(theta * size) for the sampling walk

    def __post_init__(self):
        if self.params.alpha <= HALF:
            raise UnsupportedParameters(
                f"single-seed local search needs alpha > 1/2 (got {self.params.alpha}); "
                "the multi-seed variant is not implemented"
            )
        if self.size < 1:
            raise InvalidInput("size must be positive")
        if not 0 < self.delta < 1:
            raise InvalidInput("delta must lie in (0, 1)")
        if self.draw_count < self.hits_needed:
            raise InvalidInput("draws must be at least hit_threshold")

    @property
    def margin(self) -> float:
        return float(self.params.alpha - HALF)

    @property
    def walk_prefix(self) -> int:
        return self.prefix if self.prefix is not None else prefix_length(self.params.theta, self.size)

    @property
    def draw_count(self) -> int:
        if self.draws is not None:
            return self.draws
        theta = float(self.params.theta)
        return math.ceil(8 * theta**2 * self.size / self.margin * math.log(2 * self.size / self.delta))

    @property
    def hits_needed(self) -> int:
        if self.hit_threshold is not None:
            return self.hit_threshold
        return math.ceil(4 * math.log(2 * self.size / self.delta))

    @property
    def sample_size(self) -> int:
        if self.k2 is not None:
            return self.k2
        theta = float(self.params.theta)
        return default_k2(theta, self.params.gamma, self.delta, theta / self.margin)

    @property
    def repetitions(self) -> int:
        if self.n2 is not None:
            return self.n2
        base = 2 * float(self.params.theta) ** 2 / self.margin
        log_value = self.sample_size * math.log(base) + math.log(math.log(2 / self.delta))
        if log_value >= math.log(self.n2_cap):
            return self.n2_cap
        return max(1, math.ceil(math.exp(log_value)))

    @property
    def size_cap(self) -> float:
        """Largest possible rough set: ``2 theta^2 t / (alpha - 1/2)``."""
        return 2 * float(self.params.theta) ** 2 * self.size / self.margin


def sample_r(system: RankedSystem, v: int, t: int, theta, rng: np.random.Generator) -> int:
    """Uniform pick from the first ``min(ceil(theta t), len(pi_v))`` entries of ``pi_v``."""
    prefix = system.prefix(v, prefix_length(theta, t))
    if not len(prefix):
        raise InvalidInput(f"member {v} has an empty preference list")
    return int(prefix[rng.integers(len(prefix))])


def two_hop_samples(system: RankedSystem, v: int, length: int, draws: int, rng: np.random.Generator) -> np.ndarray:
    """``draws`` independent samples of ``R(R(v))`` with prefix length ``length``.

    Second hops from members with empty lists are dropped.
    """
    first_len = min(length, int(system.lengths[v]))
    if first_len == 0:
        raise InvalidInput(f"member {v} has an empty preference list")
    mids = system.table[v, rng.integers(first_len, size=draws)]
    mid_len = np.minimum(system.lengths[mids], length)
    keep = mid_len > 0
    mids, mid_len = mids[keep], mid_len[keep]
    cols = (rng.random(len(mids)) * mid_len).astype(np.int64)
    return system.table[mids, cols]


def local_rough(system: RankedSystem, v: int, config: LocalConfig, rng: np.random.Generator) -> frozenset[int]:
    """Members hit at least ``hit_threshold`` times in ``draws`` two-hop samples from ``v``."""
    samples = two_hop_samples(system, v, config.walk_prefix, config.draw_count, rng)
    ids, hits = np.unique(samples, return_counts=True)
    return frozenset(ids[hits >= config.hits_needed].tolist())


def _search(system, v, config, rng, purify_params, reps):
    S1 = local_rough(system, v, config, rng)
    if not S1:
        return
    S1_sorted = sorted(S1)
    for _ in range(reps):
        S3, _ = _purify_once(system, S1_sorted, S1, config.size, purify_params, config.sample_size, rng)
        if S3:
            yield S3


def local_find(system: RankedSystem, v: int, config: LocalConfig, rng: np.random.Generator | None = None):
    """Search for a community of size ``config.size`` containing ``v``.

    Tries the target size first, then ``floor(t/(1+eps))`` and
    ``ceil(t(1+eps))`` as sampling sizes, since the size may only be known
    approximately. Returns the first verified community of size ``t`` that
    contains ``v``, or ``None``.
    """
    if not 0 <= v < system.n:
        raise InvalidInput(f"seed {v} out of range")
    if system.lengths[v] == 0:
        raise InvalidInput(f"seed {v} has an empty preference list")
    if rng is None:
        rng = _stream(config.rng_seed, v, config.size)
    t = config.size
    eps = float(local_epsilon(config.params))
    tries = [t] + sorted({max(1, math.floor(t / (1 + eps))), math.ceil(t * (1 + eps))} - {t})
    for size in tries:
        cfg = config if size == t else replace(config, size=size)
        for S3 in _search(system, v, cfg, rng, config.params, config.repetitions):
            if len(S3) == t and v in S3 and verify_ranked_community(system, S3, config.params):
                return Community(tuple(S3), config.params, True, "local")
    return None


def size_cells(n: int, eps, max_size: int | None = None) -> list[tuple[int, int]]:
    """Integer sizes from the grid ``(1+eps)^i`` with the prefix each one uses.

    Each returned ``(t, top)`` covers true sizes ``t .. top``; sampling at
    ``t`` with prefix ``ceil(theta * top)`` plays the role of the inflated
    ``theta (1 + eps)``, without inflating prefixes where the grid already
    hits every integer.
    """
    eps = float(eps)
    upper = n if max_size is None else min(n, max_size)
    steps = math.ceil(math.log(n) / math.log1p(eps)) if n > 1 else 0
    values = set()
    for i in range(steps + 1):
        g = (1 + eps) ** i
        values.update((math.floor(g), math.ceil(g)))
    grid = sorted(x for x in values if 1 <= x <= upper)
    if not grid:
        return []
    cells = []
    for a, b in zip(grid, grid[1:] + [upper + 1]):
        cells.append((a, max(a, b - 1)))
    return cells


def _cell_job(system, params, relaxed, v, t, top, rng_seed, delta, repetitions):
    config = LocalConfig(
        relaxed, t, delta=delta, rng_seed=rng_seed, n2=repetitions,
        prefix=prefix_length(params.theta, top),
    )
    rng = _stream(rng_seed, v, t)
    found = []
    for S3 in _search(system, v, config, rng, relaxed, repetitions):
        if verify_ranked_community(system, S3, params):
            found.append(S3)
    return found


def enumerate_all_local(system: RankedSystem, params: CommunityParams, epsilon_override=None,
                        rng_seed: int = 0, seeds=None, max_size: int | None = None,
                        repetitions: int = 1, delta: float = 0.1, workers: int = 1) -> CommunitySet:
    """Enumerate communities by running a short local search from every (seed, size) cell.

    Sampling and purification use the relaxed parameters
    ``alpha - 4 eps``, ``beta + 4 eps``; every output is verified at the
    original ``params``.

    Parameters
    ----------
    epsilon_override : optional
        Slack ``eps``; defaults to ``min(gamma, alpha - 1/2) / 100``.
    seeds : iterable of int, optional
        Seeds to start from; defaults to every member with a nonempty list.
    max_size : int, optional
        Largest size cell to visit (default ``n``).
    repetitions : int
        Purification passes per cell.
    """
    if params.alpha <= HALF:
        raise UnsupportedParameters("enumerate_all_local needs alpha > 1/2")
    eps = as_fraction(epsilon_override) if epsilon_override is not None else local_epsilon(params)
    if eps <= 0:
        raise InvalidInput("epsilon must be positive")
    try:
        relaxed = CommunityParams(params.theta, params.alpha - 4 * eps, params.beta + 4 * eps)
    except InvalidInput as exc:
        raise InvalidInput(f"epsilon {eps} too large for these parameters: {exc}") from exc
    if relaxed.alpha <= HALF:
        raise InvalidInput(f"epsilon {eps} pushes alpha - 4 eps to {relaxed.alpha} <= 1/2")
    if seeds is None:
        seeds = [v for v in range(system.n) if system.lengths[v] > 0]
    cells = size_cells(system.n, eps, max_size)
    jobs = [(v, t, top) for t, top in cells for v in seeds]

    def run(job):
        v, t, top = job
        return _cell_job(system, params, relaxed, v, t, top, rng_seed, delta, repetitions)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, jobs))
    else:
        results = [run(job) for job in jobs]
    out = CommunitySet()
    for found in results:
        for S3 in found:
            out.add(Community(tuple(S3), params, True, "local"))
    return out
