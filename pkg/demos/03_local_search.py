"""Finding a community from a single member without reading the whole system.

Starting from one member, two-hop samples (a random pick from the member's
top list, then a random pick from that person's list) land inside the
community far more often than outside it. Only a few hundred list entries
are touched, so the cost barely moves when the population doubles.
"""

# %%
import time
from fractions import Fraction

import numpy as np

from selfdetermined import CommunityParams, LocalConfig, enumerate_all_local, local_find
from selfdetermined.generators import gen_blob_instance

params = CommunityParams(1, 1, Fraction(1, 2))

# %%
for blobs in (40, 80):
    system, planted = gen_blob_instance(blobs, 50, rng=7)
    rng = np.random.default_rng(0)
    hits, times = 0, []
    for trial in range(20):
        S = planted[int(rng.integers(blobs))][0]
        start = time.perf_counter()
        found = local_find(system, int(rng.choice(S)), LocalConfig(params, 50, rng_seed=trial))
        times.append(time.perf_counter() - start)
        hits += found is not None and found.members == S
    print(f"n = {system.n}: recovered {hits}/20, median {1000 * np.median(times):.2f} ms")

# %% [markdown]
# Running the local search from every member and every size lists all
# communities: singletons, the blobs themselves, and the prefixes of each
# blob that happen to satisfy the thresholds as well.

# %%
system, planted = gen_blob_instance(5, 20, rng=1)
found = enumerate_all_local(system, params, max_size=25)
sizes = [len(c.members) for c in found]
print({size: sizes.count(size) for size in sorted(set(sizes))})
print("all blobs present:", all(frozenset(S) in found.member_sets() for S, _ in planted))
