"""Checking whether a set of people is a self-determined community.

Four people each rank everyone. A set ``S`` is a ``(theta, alpha, beta)``
community when, counting only the top ``ceil(theta |S|)`` entries of every
member's list, each member of ``S`` collects at least ``alpha |S|`` votes
from ``S`` and each outsider at most ``beta |S|``.
"""

# %%
from fractions import Fraction

from selfdetermined import CommunityParams, RankedSystem, brute_force_oracle, vote_count_ranked, verify_ranked_community

system = RankedSystem([
    [0, 1, 2, 3],
    [1, 0, 2, 3],
    [2, 3, 0, 1],
    [3, 2, 0, 1],
])
params = CommunityParams(theta=1, alpha=1, beta=Fraction(1, 2))

# %% [markdown]
# Members 0 and 1 put each other in their top two, so each receives two
# votes from the pair while 2 and 3 receive none.

# %%
print("tally for {0, 1}:", vote_count_ranked(system, [0, 1], prefix_len=2).as_list())
result = verify_ranked_community(system, {0, 1}, params)
print("{0, 1} is a community:", bool(result))

# %% [markdown]
# Mixing the two pairs fails: member 0 only gets one vote from {0, 2}.

# %%
result = verify_ranked_community(system, {0, 2}, params)
print("{0, 2} is a community:", bool(result), "failures:", result.failures)

# %% [markdown]
# With four people we can afford to test every subset.

# %%
for community in brute_force_oracle(system, params):
    print(community.members)
