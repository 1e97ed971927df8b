"""Weighted affinities and the reduction to rankings.

When people give graded affinities instead of rankings, each voter's row
is capped at ``theta |S|`` total weight. The reduction replaces every person
by a blob of ``ceil(1/eps)`` copies and wires the blobs so that ranked
communities of the copy system map back to weighted communities.
"""

# %%
from fractions import Fraction

from selfdetermined import (
    CommunityParams,
    EnumConfig,
    WeightedSystem,
    capped_vote_vector,
    enumerate_main,
    map_back,
    reduce,
    verify_weighted_community,
)
from selfdetermined.weighted import blob_image

# %% [markdown]
# Capping keeps the heaviest weights and trims the rest.

# %%
print(capped_vote_vector([1.0, 0.7, 0.5, 0.2], cap=2))

# %%
system = WeightedSystem(3, [[0, 1, Fraction(1, 5)], [1, 0, Fraction(1, 5)], [Fraction(1, 2), Fraction(1, 2), 0]])
params = CommunityParams(1, Fraction(1, 2), Fraction(1, 4))
print("{0, 1} verifies:", bool(verify_weighted_community(system, {0, 1}, params)))

# %%
reduced, blobs = reduce(system, params, 2, epsilon=Fraction(1, 4))
print(f"reduced system has {reduced.n} members, blobs of {blobs.k}")
print("image of {0, 1}:", blob_image({0, 1}, blobs))

relaxed = CommunityParams(1, params.alpha - Fraction(1, 8), params.beta)
found = enumerate_main(reduced, EnumConfig(relaxed, 2 * blobs.k, k1=1, k2=6, n2=6))
print("mapped back:", [c.members for c in map_back(found, blobs, system, params)])
