"""People with several rankings, one per facet of their life.

Each person may hold a work ranking, a hobby ranking and so on; a
community also chooses which facet each member uses. For a known set, a
small linear program finds fractional facet choices and random rounding
turns them into a concrete assignment.
"""

# %%
from fractions import Fraction

import numpy as np

from selfdetermined import CommunityParams, FacetedSystem, MultifacetConfig, enumerate_multifaceted, recover_facets, verify_multifaceted
from selfdetermined.generators import gen_planted_faceted

rows = [[0, 1, 2, 3], [1, 0, 2, 3], [2, 3, 0, 1], [3, 2, 0, 1]]
system = FacetedSystem([[row, row[::-1]] for row in rows])
params = CommunityParams(1, 1, Fraction(1, 2))

# %%
print("{0,1} with facet 1 each:", verify_multifaceted(system, {0, 1}, {0: 1, 1: 1}, params))
print("{0,1} with member 0 on facet 2:", verify_multifaceted(system, {0, 1}, {0: 2, 1: 1}, params))
print("recovered assignment:", recover_facets(system, {0, 1}, params))
print("size-2 communities:", enumerate_multifaceted(system, MultifacetConfig(params, 2, k1=1)))

# %% [markdown]
# A planted 60-member block among 100 people, found by the LP route.

# %%
system, S = gen_planted_faceted(100, 60, rng=0)
params = CommunityParams(1, Fraction(9, 10), Fraction(1, 10))
psi = recover_facets(system, S, params, rng=np.random.default_rng(0))
relaxed = CommunityParams(1, params.alpha - params.gamma / 4, params.beta + params.gamma / 4)
print("facet 1 share:", sum(v == 1 for v in psi.values()) / len(psi))
print("verifies at relaxed parameters:", verify_multifaceted(system, S, psi, relaxed))
