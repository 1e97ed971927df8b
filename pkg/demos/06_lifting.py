"""Turning a social graph into affinities.

Four liftings are available: the edge weights themselves, inverse
shortest-path distance, personalized PageRank and effective resistance.
"""

# %%
import numpy as np

from selfdetermined import LiftConfig, SocialGraph, lift
from selfdetermined.lifting import effective_resistance

np.set_printoptions(precision=3, suppress=True)

# two triangles joined by a single bridge
graph = SocialGraph(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5), (2, 3)], directed=False)

# %%
for method in ("direct", "shortest-path", "ppr", "resistance"):
    print(method)
    print(lift(graph, LiftConfig(method=method)).dense())

# %% [markdown]
# Resistance treats each edge of weight ``w`` as a conductance ``w``. The
# bridge carries all current between the triangles, so cross pairs sit
# much farther apart than pairs within a triangle.

# %%
print(effective_resistance(graph))
