"""Find and verify self-determined communities in ranked, weighted and multi-faceted affinity systems."""

from .core import (
    BudgetExceeded,
    Community,
    CommunityParams,
    CommunitySet,
    InvalidInput,
    RankedSystem,
    SolverFailure,
    UnsupportedParameters,
    Verification,
    VoteTally,
    WeightedSystem,
    capped_vote_vector,
    is_good_seed,
    verify_community,
    verify_ranked_community,
    verify_weighted_community,
    vote_count_ranked,
    weighted_vote_tally,
)
from .enumerate import (
    EnumConfig,
    brute_force_oracle,
    enumerate_main,
    enumerate_quasipoly,
    enumerate_sizes,
    greedy_cover,
    purify,
    rough_list_alt,
    rr_probability,
)
from .lifting import LiftConfig, SocialGraph, lift, verify_alpha_beta_cluster, verify_graph_community
from .local import LocalConfig, enumerate_all_local, local_find
from .multifacet import FacetedSystem, MultifacetConfig, enumerate_multifaceted, recover_facets, verify_multifaceted
from .weighted import BlobMap, map_back, reduce

__version__ = "0.1.0"
