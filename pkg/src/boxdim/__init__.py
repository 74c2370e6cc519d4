"""Box-counting dimensions of hierarchical graphs, growth models, and trees.

The package builds three families of graph sequences — hierarchical word
graphs over a bipartite base, randomized leaf-growth graphs, and rooted
trees (deterministic profiles or random offspring draws) — counts minimum
box covers on them exactly or by certified bounds, and fits the resulting
decay rates: the classical box exponent from a log-log law and the
exponential-decay rate from a log-linear law, plus its averaged variant
for oscillating sequences.
"""

from .boxing import (BoxCover, WitnessSet, greedy_boxing,
                     greedy_witness_clique, min_boxes_bruteforce,
                     min_boxes_exact, verify_cover, verify_witness_set)
from .dimension import (BoxRow, DimensionFit, fit_dB, fit_tau,
                        fit_tau_cesaro, flags_oscillation, load_box_table,
                        load_fits, save_box_table, save_fits,
                        validate_box_table)
from .errors import (BoxdimError, DomainError, FormatError, InputError,
                     PreconditionError, RegimeError, ResourceError)
from .graphs import (Graph, MetricMode, bfs_distances, diameter,
                     distance_matrix, is_connected, is_ell_box,
                     read_edge_list, write_edge_list)
from .hm import (BaseGraph, build_hm, cherry, fan, hm_construct_path,
                 hm_diameter_formula, hm_ell, hm_extremal_pair,
                 hm_prefix_boxing, hm_witness_set, read_base_graph,
                 write_base_graph)
from .scenarios import (DEFAULT_SEED, ScenarioReport, SCENARIOS,
                        run_scenario)
from .shm import (ShmRun, shm_center_boxing, shm_counts, shm_ell,
                  shm_evolve, shm_witness_set, star5, triangle)
from .trees import (DegreeProfile, OffspringDistribution, RootedTree,
                    build_gw, build_spherical, greedy_tree_boxing,
                    level_sizes, lmcs, read_offspring, read_profile,
                    sample_gw_levels, total_size_bound, tree_box_bounds,
                    tree_witnesses, write_offspring, write_profile)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
