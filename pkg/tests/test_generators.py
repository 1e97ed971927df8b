import math
from fractions import Fraction

import numpy as np
import pytest
from scipy import stats

from selfdetermined import CommunityParams, InvalidInput, SocialGraph, verify_alpha_beta_cluster, verify_ranked_community
from selfdetermined.generators import (
    count_alpha_beta_clusters,
    counting_report,
    gen_blob_instance,
    gen_gnp,
    gen_gnp_planted_clique,
    gen_overlap_pair,
    gen_planted_faceted,
    gen_planted_ranked,
    gen_planted_weighted,
    gen_random_ranked,
    hidden_clique_setup,
)
from selfdetermined.io import write_faceted, write_graph, write_ranked, write_weighted
from selfdetermined.multifacet import verify_multifaceted

F = Fraction


def union_success_prediction(L, b, l=2):
    """Chance that every outsider stays at or below beta |S| for one union of ``l`` blobs.

    Each of the ``l b`` voters spends ``(l - 1) b`` prefix slots on a
    uniformly random sample of its ``(L - 1) b`` outsiders, so a member of a
    third blob collects roughly Binomial(l b, (l - 1) / (L - 1)) votes.
    """
    voters, share = l * b, (l - 1) / (L - 1)
    tail = stats.binom.sf(b // 2, voters, share)
    return (1 - tail) ** ((L - l) * b)


class TestBlob:
    @pytest.mark.parametrize("seed", range(5))
    def test_singles_verify(self, seed):
        system, planted = gen_blob_instance(4, 4, rng=seed)
        assert system.n == 16 and len(planted) == 4
        for S, params in planted:
            assert params == CommunityParams(1, 1, F(1, 2))
            assert verify_ranked_community(system, S, params)

    def test_ranking_layout(self):
        system, _ = gen_blob_instance(3, 4, rng=0)
        row = system.ranking(5).tolist()
        assert row[:4] == [5, 4, 6, 7]
        assert sorted(row[4:]) == [0, 1, 2, 3, 8, 9, 10, 11]

    def test_unit_blobs(self):
        system, planted = gen_blob_instance(5, 1, rng=1)
        for S, params in planted:
            assert len(S) == 1 and verify_ranked_community(system, S, params)

    def test_union_tags(self):
        _, planted = gen_blob_instance(4, 2, rng=0, max_union=2)
        assert len(planted) == 4 + 6
        assert {p for S, p in planted if len(S) == 4} == {CommunityParams(1, F(1, 2), F(1, 4))}

    def test_invalid(self):
        with pytest.raises(InvalidInput):
            gen_blob_instance(0, 3)

    def test_union_rate_tracks_binomial_prediction(self):
        # L=10, b=20 sits in the regime where roughly 4 in 10 unions lose an outsider check
        hits = trials = 0
        for seed in range(10):
            system, planted = gen_blob_instance(10, 20, rng=seed, max_union=2)
            for S, params in planted:
                if len(S) == 40:
                    trials += 1
                    hits += bool(verify_ranked_community(system, S, params))
        predicted = union_success_prediction(10, 20)
        assert abs(hits / trials - predicted) < 0.08

    def test_unions_of_large_blobs_verify(self):
        # every one of the 45 unions must verify for a seed to count
        ok = 0
        for seed in range(20):
            system, planted = gen_blob_instance(10, 80, rng=seed, max_union=2)
            unions = [(S, p) for S, p in planted if len(S) == 160]
            ok += all(verify_ranked_community(system, S, p) for S, p in unions)
        assert union_success_prediction(10, 80) ** 45 > 0.99
        assert ok >= 18


class TestOverlapPair:
    @pytest.mark.parametrize("n", [16, 32, 64])
    def test_both_verify(self, n):
        system, planted = gen_overlap_pair(n)
        (A1, p1), (A2, p2) = planted
        assert len(A1) == len(A2) == n // 2
        assert len(set(A1) & set(A2)) == n // 8
        assert verify_ranked_community(system, A1, p1)
        assert verify_ranked_community(system, A2, p2)

    @pytest.mark.parametrize("n", [8, 24, 0])
    def test_divisibility(self, n):
        with pytest.raises(InvalidInput):
            gen_overlap_pair(n)


class TestPlanted:
    def test_ranked_groups_disjoint(self):
        system, groups = gen_planted_ranked(30, [5, 7], rng=2)
        assert [len(g) for g in groups] == [5, 7]
        assert not set(groups[0]) & set(groups[1])
        for g in groups:
            assert verify_ranked_community(system, g, CommunityParams(1, 1, F(1, 2)))

    def test_partial_lists_keep_group(self):
        system, groups = gen_planted_ranked(20, [6], rng=3, partial=2)
        for i in groups[0]:
            assert set(system.ranking(i).tolist()) == set(groups[0])

    def test_random_self_first(self):
        system = gen_random_ranked(12, rng=1, partial_prob=0.5, self_first=True)
        assert all(system.ranking(i)[0] == i for i in range(12))

    @pytest.mark.parametrize("seed", range(5))
    def test_weighted_params_are_tight(self, seed):
        from selfdetermined import verify_weighted_community

        system, S, params = gen_planted_weighted(20, 6, rng=seed)
        assert params is not None
        assert verify_weighted_community(system, S, params)
        tighter = CommunityParams(1, params.alpha + F(1, 1000), params.beta)
        assert not verify_weighted_community(system, S, tighter)

    def test_faceted(self):
        system, S = gen_planted_faceted(20, 5, rng=0)
        assert verify_multifaceted(system, S, dict.fromkeys(S, 1), CommunityParams(1, 1, 0))


class TestGnp:
    def test_extremes(self):
        assert sum(map(len, gen_gnp(10, 0, rng=0).adj)) == 0
        assert all(len(row) == 9 for row in gen_gnp(10, 1, rng=0).adj)

    def test_edge_count(self):
        n, p = 200, 0.1
        pairs = math.comb(n, 2)
        sigma = math.sqrt(pairs * p * (1 - p))
        for seed in range(20):
            edges = sum(map(len, gen_gnp(n, p, rng=seed).adj)) // 2
            assert abs(edges - pairs * p) <= 4 * sigma

    def test_bad_p(self):
        with pytest.raises(InvalidInput):
            gen_gnp(5, 1.5)

    @pytest.mark.parametrize("seed", range(5))
    def test_clique(self, seed):
        graph, clique = gen_gnp_planted_clique(40, 0.2, 8, rng=seed)
        assert len(clique) == 8
        assert all(graph.has_edge(a, b) for a in clique for b in clique)

    def test_clique_too_large(self):
        with pytest.raises(InvalidInput):
            gen_gnp_planted_clique(5, 0.5, 6)

    def test_hidden_clique_setup(self):
        k, p = hidden_clique_setup(300, 0.3, 0.1)
        assert k == 75 and p == pytest.approx(0.6)
        assert hidden_clique_setup(10**6, 0.3, 0.1)[0] == 1382


class TestClusterCount:
    def test_two_triangles(self):
        g = SocialGraph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)], directed=False, selfloops=True)
        count, hits = count_alpha_beta_clusters(g, 1, F(1, 3), [3])
        assert count == 2 and hits == [(0, 1, 2), (3, 4, 5)]

    def test_edgeless(self):
        g = SocialGraph(7, [], directed=False, selfloops=True)
        assert count_alpha_beta_clusters(g, 1, F(1, 2), [1])[0] == 7

    def test_empty_range(self):
        g = SocialGraph(4, [], directed=False, selfloops=True)
        assert count_alpha_beta_clusters(g, 1, F(1, 2), []) == (0, [])

    def test_budget(self):
        from selfdetermined import BudgetExceeded

        g = SocialGraph(30, [], directed=False, selfloops=True)
        with pytest.raises(BudgetExceeded):
            count_alpha_beta_clusters(g, 1, F(1, 2), [10], budget=1000)

    def test_hits_verify(self):
        g = gen_gnp(14, 0.5, selfloops=True, rng=4)
        _, hits = count_alpha_beta_clusters(g, 1, F(3, 5), [3])
        assert all(verify_alpha_beta_cluster(g, S, 1, F(3, 5)) for S in hits)

    def test_report_rows(self):
        rows = counting_report([12], l=1, eps=0.1, delta=0.5, seeds=[0, 1])
        assert len(rows) == 2
        assert rows[0]["k"] == round(2 * math.log2(12) * 0.5)
        assert set(rows[0]) == {"n", "l", "p", "k", "eps", "delta", "seed", "clusters", "heuristic_mean"}


class TestReproducibility:
    def test_blob(self):
        assert write_ranked(gen_blob_instance(5, 4, rng=7)[0]) == write_ranked(gen_blob_instance(5, 4, rng=7)[0])

    def test_weighted(self):
        assert write_weighted(gen_planted_weighted(10, 4, rng=3)[0]) == write_weighted(gen_planted_weighted(10, 4, rng=3)[0])

    def test_faceted(self):
        assert write_faceted(gen_planted_faceted(10, 4, rng=3)[0]) == write_faceted(gen_planted_faceted(10, 4, rng=3)[0])

    def test_graph(self):
        a = write_graph(gen_gnp_planted_clique(30, 0.3, 5, rng=9)[0])
        assert a == write_graph(gen_gnp_planted_clique(30, 0.3, 5, rng=9)[0])

    def test_different_seeds_differ(self):
        assert write_ranked(gen_blob_instance(5, 4, rng=1)[0]) != write_ranked(gen_blob_instance(5, 4, rng=2)[0])

    def test_generator_accepted(self):
        a = gen_random_ranked(6, rng=np.random.default_rng(3))
        assert write_ranked(a) == write_ranked(gen_random_ranked(6, rng=3))
