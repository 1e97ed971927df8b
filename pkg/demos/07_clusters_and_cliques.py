"""Dense clusters in random graphs.

An ``(alpha, beta)``-cluster is a vertex set where every member is adjacent
to at least an ``alpha`` share of the set (self-loops included) and every
outsider to at most a ``beta`` share. We count them on small random graphs
and check how a planted clique fares as a cluster.
"""

# %%
from fractions import Fraction

from scipy import stats

from selfdetermined import verify_alpha_beta_cluster
from selfdetermined.generators import counting_report, gen_gnp_planted_clique, hidden_clique_setup

# %%
for row in counting_report([12, 16], l=1, eps=0.1, delta=0.5, seeds=range(3)):
    print(row)

# %% [markdown]
# A clique of size k in G(n, p) is a (1, 1 - gamma) cluster when no outsider
# has more than (1 - gamma) k neighbours inside it. Outsider degrees into the
# clique are Binomial(k, p), so the chance is roughly the tail raised to the
# number of outsiders.

# %%
n, gamma = 300, 0.3
for eps in (0.1, 0.2, 0.25):
    k, p = hidden_clique_setup(n, gamma, eps)
    passed = sum(
        verify_alpha_beta_cluster(*gen_gnp_planted_clique(n, p, k, rng=seed), 1, Fraction(7, 10)) for seed in range(30)
    )
    tail = stats.binom.sf(int(0.7 * k), k, p)
    print(f"eps={eps}: k={k}, p={p:.2f}, passed {passed}/30, predicted {(1 - tail) ** (n - k):.3f}")
