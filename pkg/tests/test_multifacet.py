import itertools
from fractions import Fraction

import numpy as np
import pytest

from selfdetermined import (
    CommunityParams,
    FacetedSystem,
    InvalidInput,
    MultifacetConfig,
    brute_force_oracle,
    enumerate_multifaceted,
    recover_facets,
    verify_multifaceted,
    verify_ranked_community,
    vote_count_ranked,
)
from selfdetermined.generators import gen_planted_faceted
from selfdetermined.multifacet import faceted_vote_tally, solve_facet_lp

F = Fraction


def faceted_oracle(system, params, size):
    """Every (S, psi) pair of the given size, checked directly."""
    out = set()
    for S in itertools.combinations(range(system.n), size):
        for combo in itertools.product(*[range(1, system.facet_counts[s] + 1) for s in S]):
            if verify_multifaceted(system, S, dict(zip(S, combo)), params):
                out.add(S)
                break
    return out


class TestTally:
    def test_all_first_facet(self, two_pairs_faceted):
        assert faceted_vote_tally(two_pairs_faceted, {0, 1}, {0: 1, 1: 1}, 1).as_list() == [2, 2, 0, 0]

    def test_reversed_facet(self, two_pairs_faceted):
        assert faceted_vote_tally(two_pairs_faceted, {0, 1}, {0: 2, 1: 1}, 1).as_list() == [1, 1, 1, 1]

    def test_missing_assignment(self, two_pairs_faceted):
        with pytest.raises(InvalidInput):
            faceted_vote_tally(two_pairs_faceted, {0, 1}, {0: 1}, 1)

    def test_bad_facet(self, two_pairs_faceted):
        with pytest.raises(InvalidInput):
            faceted_vote_tally(two_pairs_faceted, {0}, {0: 3}, 1)

    def test_single_facet_matches_ranked(self, two_pairs):
        single = FacetedSystem.from_ranked(two_pairs)
        for S in itertools.combinations(range(4), 2):
            psi = dict.fromkeys(S, 1)
            assert faceted_vote_tally(single, S, psi, 1).as_list() == vote_count_ranked(two_pairs, S, 2).as_list()


class TestVerify:
    def test_two_pairs_faceted(self, two_pairs_faceted, half):
        assert verify_multifaceted(two_pairs_faceted, {0, 1}, {0: 1, 1: 1}, half)
        assert not verify_multifaceted(two_pairs_faceted, {0, 1}, {0: 2, 1: 1}, half)

    def test_degenerates_to_ranked(self, two_pairs, half):
        single = FacetedSystem.from_ranked(two_pairs)
        for size in range(1, 5):
            for S in itertools.combinations(range(4), size):
                expected = bool(verify_ranked_community(two_pairs, S, half))
                assert verify_multifaceted(single, S, dict.fromkeys(S, 1), half) == expected


class TestRecover:
    def test_case_one_two_pairs_faceted(self, two_pairs_faceted, half):
        assert recover_facets(two_pairs_faceted, {0, 1}, half) == {0: 1, 1: 1}

    def test_case_one_infeasible(self, two_pairs_faceted, half):
        assert recover_facets(two_pairs_faceted, {0, 2}, half) is None

    def test_lp_infeasible(self, two_pairs_faceted, half):
        assert recover_facets(two_pairs_faceted, {0, 2}, half, case=2) is None

    def test_lp_accepts_integral_witness(self):
        system, S = gen_planted_faceted(40, 30, rng=0)
        params = CommunityParams(1, F(9, 10), F(1, 10))
        members, weights = solve_facet_lp(system, S, params)
        assert members == list(S)
        for s in members:
            assert np.isclose(weights[s].sum(), 1)

    @pytest.mark.parametrize("seed", range(5))
    def test_case_two_planted(self, seed):
        system, S = gen_planted_faceted(100, 60, rng=seed)
        params = CommunityParams(1, F(9, 10), F(1, 10))
        psi = recover_facets(system, S, params, rng=np.random.default_rng(seed))
        relaxed = CommunityParams(1, params.alpha - params.gamma / 4, params.beta + params.gamma / 4)
        assert psi is not None and verify_multifaceted(system, S, psi, relaxed)


class TestEnumerate:
    def test_two_pairs_faceted(self, two_pairs_faceted, half):
        found = enumerate_multifaceted(two_pairs_faceted, MultifacetConfig(half, 2, k1=1))
        assert ((0, 1), {0: 1, 1: 1}) in found
        assert {S for S, _ in found} <= faceted_oracle(two_pairs_faceted, half, 2)
        for S, psi in found:
            assert verify_multifaceted(two_pairs_faceted, S, psi, half)

    def test_single_facet_matches_ranked_oracle(self, two_pairs, half):
        single = FacetedSystem.from_ranked(two_pairs)
        found = {S for S, _ in enumerate_multifaceted(single, MultifacetConfig(half, 2, k1=1))}
        assert found == {c.members for c in brute_force_oracle(two_pairs, half, size_range=[2])}

    def test_planted_small(self):
        system, S = gen_planted_faceted(30, 6, rng=4)
        params = CommunityParams(1, 1, F(1, 2))
        found = enumerate_multifaceted(system, MultifacetConfig(params, 6, k1=1, n2=2, final_samples=2))
        assert S in {members for members, _ in found}
