from fractions import Fraction

import numpy as np
import pytest

from selfdetermined import (
    CommunityParams,
    CommunitySet,
    Community,
    InvalidInput,
    RankedSystem,
    WeightedSystem,
    capped_vote_vector,
    is_good_seed,
    verify_ranked_community,
    verify_weighted_community,
    vote_count_ranked,
    weighted_vote_tally,
)
from selfdetermined.core import prefix_length

F = Fraction


class TestRankedSystem:
    def test_rejects_duplicates(self):
        with pytest.raises(InvalidInput):
            RankedSystem([[0, 0], [1]])

    def test_rejects_out_of_range(self):
        with pytest.raises(InvalidInput):
            RankedSystem([[0, 2], [1]])

    def test_partial_lists_and_missing_owner(self):
        system = RankedSystem([[1], [], [0, 1]])
        assert system.n == 3
        assert system.ranking(1).tolist() == []
        assert not system.is_total()
        assert system.prefix(2, 5).tolist() == [0, 1]

    def test_table_is_read_only(self, two_pairs):
        with pytest.raises(ValueError):
            two_pairs.table[0, 0] = 3


class TestParams:
    @pytest.mark.parametrize("theta,alpha,beta", [(0, 1, 0.5), (1, 0.5, 0.5), (1, 1.2, 0.1), (1, 0.5, -0.1)])
    def test_invalid(self, theta, alpha, beta):
        with pytest.raises(InvalidInput):
            CommunityParams(theta, alpha, beta)

    def test_gamma_exact(self):
        params = CommunityParams(1, 0.75, 0.25)
        assert params.gamma == F(1, 2)
        assert isinstance(params.alpha, Fraction)

    def test_beta_zero_allowed(self):
        assert CommunityParams(1, 1, 0).beta == 0

    def test_prefix_length_ceiling(self):
        assert prefix_length(F(3, 2), 3) == 5
        assert prefix_length(1, 4) == 4


class TestVoteCount:
    def test_two_pairs_pair(self, two_pairs):
        assert vote_count_ranked(two_pairs, [0, 1], 2).as_list() == [2, 2, 0, 0]

    def test_two_pairs_full_lists(self, two_pairs):
        assert vote_count_ranked(two_pairs, [2, 3], 4).as_list() == [2, 2, 2, 2]

    def test_empty_voters(self, two_pairs):
        assert vote_count_ranked(two_pairs, [], 3).as_list() == [0, 0, 0, 0]

    def test_voter_out_of_range(self, two_pairs):
        with pytest.raises(InvalidInput):
            vote_count_ranked(two_pairs, [7], 2)

    def test_multiset_voters(self, two_pairs):
        assert vote_count_ranked(two_pairs, [0, 0, 1], 1).as_list() == [2, 1, 0, 0]


class TestCapping:
    def test_binding_cap(self):
        assert capped_vote_vector([1.0, 0.7, 0.5, 0.2], 2) == [1, F(7, 10), F(3, 10), 0]

    def test_cap_not_binding(self):
        assert capped_vote_vector([0.4, 0.3], 2) == [F(2, 5), F(3, 10)]

    def test_boundary_ties_share_equally(self):
        # all three entries sit at the boundary value, so they split 1.25 evenly
        assert capped_vote_vector([0.5, 0.5, 0.5], 1.25) == [F(5, 12)] * 3

    def test_ties_below_fitting_group(self):
        assert capped_vote_vector([1, 0.5, 0.5], 1.5) == [1, F(1, 4), F(1, 4)]

    def test_negative_weight(self):
        with pytest.raises(InvalidInput):
            capped_vote_vector([0.5, -0.1], 1)

    @pytest.mark.parametrize("cap", [0.3, 1, 1.7, 5])
    def test_total_is_min_of_cap_and_sum(self, cap):
        ws = [0.9, 0.4, 0.4, 0.1, 0.0]
        out = capped_vote_vector(ws, cap)
        assert sum(out) == min(F(repr(cap)), sum(F(repr(w)) for w in ws))


class TestWeightedTally:
    def test_tri_weighted_pair(self, tri_weighted):
        assert weighted_vote_tally(tri_weighted, [0, 1], 2, 1).as_list() == [1, 1, F(2, 5)]

    def test_tri_weighted_binding_cap(self, tri_weighted):
        assert weighted_vote_tally(tri_weighted, [0], 1, F(1, 2)).as_list() == [0, F(1, 2), 0]

    def test_all_zero(self):
        system = WeightedSystem(3, {})
        assert weighted_vote_tally(system, [0, 1, 2], 3, 1).as_list() == [0, 0, 0]

    def test_zero_target(self, tri_weighted):
        with pytest.raises(InvalidInput):
            weighted_vote_tally(tri_weighted, [0], 0, 1)


class TestVerify:
    def test_two_pairs_true(self, two_pairs, half):
        result = verify_ranked_community(two_pairs, {0, 1}, half)
        assert result
        assert result.tally.as_list() == [2, 2, 0, 0]

    def test_two_pairs_false(self, two_pairs, half):
        result = verify_ranked_community(two_pairs, {0, 2}, half)
        assert not result
        assert result.tally[0] == 1
        assert ("inside", 0) in result.failures

    def test_overlap16(self, overlap16):
        system, (A1, A2) = overlap16
        params = CommunityParams(1, F(3, 4), F(1, 4))
        assert A1 == tuple(range(8)) and A2 == tuple(range(6, 14))
        assert verify_ranked_community(system, A1, params)
        assert verify_ranked_community(system, A2, params)

    def test_empty_set(self, two_pairs, half):
        with pytest.raises(InvalidInput):
            verify_ranked_community(two_pairs, [], half)

    def test_tri_weighted_true(self, tri_weighted):
        assert verify_weighted_community(tri_weighted, {0, 1}, CommunityParams(1, 0.5, 0.25))

    def test_tri_weighted_false(self, tri_weighted):
        assert not verify_weighted_community(tri_weighted, {0, 1}, CommunityParams(1, 0.6, 0.25))

    def test_whole_set_no_outsiders(self, tri_weighted):
        # caps do not bind; member 2 receives the least, 0.4 = (2/15) * 3
        assert verify_weighted_community(tri_weighted, {0, 1, 2}, CommunityParams(1, F(2, 15), 0))
        assert not verify_weighted_community(tri_weighted, {0, 1, 2}, CommunityParams(1, F(1, 7), 0))

    def test_exact_boundary(self):
        # 0.1 + 0.2 sits exactly on alpha * |S| = 0.3 only in exact arithmetic
        system = WeightedSystem(2, {(0, 0): 0.1, (0, 1): 0.2, (1, 0): 0.2, (1, 1): 0.1})
        assert verify_weighted_community(system, {0, 1}, CommunityParams(1, 0.15, 0))


class TestGoodSeed:
    @pytest.mark.parametrize("v", [0, 1])
    def test_two_pairs(self, two_pairs, v):
        assert is_good_seed(two_pairs, {0, 1}, v, 1)

    def test_prefix_misses(self):
        system = RankedSystem([[0, 1], [1, 0], [2, 3], [3, 2]])
        assert not is_good_seed(system, {0, 1, 2, 3}, 0, F(1, 4))

    def test_seed_outside(self, two_pairs):
        with pytest.raises(InvalidInput):
            is_good_seed(two_pairs, {0, 1}, 2, 1)


class TestCommunitySet:
    def test_dedup_and_order(self, half):
        out = CommunitySet()
        assert out.add(Community((2, 3), half, True, "a"))
        assert not out.add(Community((3, 2), half, True, "b"))
        out.add(Community((0, 1), half, True, "c"))
        assert [c.members for c in out] == [(0, 1), (2, 3)]

    def test_rejects_unverified(self, half):
        with pytest.raises(InvalidInput):
            CommunitySet([Community((0,), half, False)])


def test_dense_weights_match_sparse(tri_weighted):
    assert np.allclose(tri_weighted.dense(), [[0, 1, 0.2], [1, 0, 0.2], [0.5, 0.5, 0]])
