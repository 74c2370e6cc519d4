"""Tree profiles, generation sizes, layered boxing, offspring sampling."""

import math
import random

import pytest

from boxdim.boxing import verify_cover, verify_witness_set
from boxdim.errors import (FormatError, InputError, PreconditionError,
                           RegimeError, ResourceError)
from boxdim.graphs import bfs_distances
from boxdim.trees import (DegreeProfile, OffspringDistribution, RootedTree,
                          build_gw, build_spherical, format_offspring,
                          format_profile, greedy_count, greedy_tree_boxing,
                          layer_generations, level_sizes, lmcs,
                          parse_offspring, parse_profile, read_offspring,
                          read_profile, sample_gw_levels, total_size,
                          total_size_bound, tree_box_bounds, tree_witnesses,
                          window_growth_averages, write_offspring,
                          write_profile, gw_martingale_diagnostics)


def test_constant_and_twothree_profiles():
    const = DegreeProfile.constant(2)
    assert [const.branching(h) for h in range(4)] == [2, 2, 2, 2]
    alt = DegreeProfile.twothree()
    assert [alt.branching(h) for h in range(5)] == [2, 3, 2, 3, 2]


def test_blocks_profile_prefix():
    prof = DegreeProfile.blocks(2, 3)
    got = [prof.branching(h) for h in range(14)]
    assert got == [3, 2, 3, 2, 2, 3, 3, 2, 2, 2, 3, 3, 3, 2]


def test_spikes_profile_hits_factorials():
    prof = DegreeProfile.spikes(1)
    assert prof.branching(0) == 1
    assert prof.branching(1) == 2      # floor(e)
    assert prof.branching(2) == 7      # floor(e^2)
    assert prof.branching(6) == 20     # floor(e^3)
    assert prof.branching(24) == 54    # floor(e^4)
    assert prof.branching(5) == 1 and prof.branching(23) == 1


def test_explicit_profile_bounds_height():
    prof = DegreeProfile.explicit([2, 1, 3])
    assert prof.max_height == 3
    assert prof.branching(2) == 3
    with pytest.raises(InputError):
        prof.branching(3)
    with pytest.raises(InputError):
        DegreeProfile.explicit([2, 0, 1])


def test_lmcs_longest_run():
    assert lmcs([2, 1, 1, 1, 3, 1], 1) == 3
    assert lmcs([2, 3, 2], 1) == 0
    assert lmcs([], 1) == 0
    assert lmcs(DegreeProfile.constant(1), 1) == math.inf
    assert lmcs(DegreeProfile.constant(2), 1) == 0
    assert lmcs(DegreeProfile.twothree(), 2) == 1
    assert lmcs(DegreeProfile.spikes(1), 1) == math.inf


def test_level_sizes_products():
    assert level_sizes(DegreeProfile.constant(2), 4) == [1, 2, 4, 8, 16]
    assert level_sizes(DegreeProfile.twothree(), 4) == [1, 2, 6, 12, 36]
    with pytest.raises(InputError):
        level_sizes(DegreeProfile.explicit([2]), 2)  # beyond the profile


def test_build_spherical_structure():
    tree = build_spherical(DegreeProfile.twothree(), 3)
    assert tree.num_vertices == 1 + 2 + 6 + 12
    assert tree.height == 3
    assert tree.level_sizes() == [1, 2, 6, 12]
    assert len(tree.children[tree.root]) == 2
    # depths agree with BFS distance from the root
    dist = bfs_distances(tree.graph, tree.root)
    assert all(dist[v] == tree.depth[v] for v in range(tree.num_vertices))


def test_build_spherical_budget():
    with pytest.raises(ResourceError, match="level_sizes"):
        build_spherical(DegreeProfile.constant(3), 12, budget=10_000)


def test_offspring_distribution_validation():
    q = OffspringDistribution((0.0, 0.5, 0.5))
    assert q.mean == 1.5
    with pytest.raises(InputError):
        OffspringDistribution((0.5, 0.4))  # does not sum to 1
    with pytest.raises(InputError):
        OffspringDistribution((-0.1, 1.1))


def test_gw_requires_no_extinction_at_zero():
    with pytest.raises(RegimeError):
        build_gw(OffspringDistribution((0.1, 0.4, 0.5)), 3, seed=1)


def test_gw_build_and_level_sampler_agree():
    q = OffspringDistribution((0.0, 0.5, 0.5))
    for seed in (0, 1, 7, 123):
        tree = build_gw(q, 8, seed=seed)
        levels = sample_gw_levels(q, 8, seed=seed)
        assert tree.level_sizes() == levels


def test_gw_level_cap_carries_partial_levels():
    q = OffspringDistribution((0.0, 0.0, 0.0, 1.0))  # always 3 children
    with pytest.raises(ResourceError) as info:
        sample_gw_levels(q, 20, seed=0, level_cap=100)
    partial = info.value.partial
    assert partial == [1, 3, 9, 27, 81]


def test_layer_generations_tiling():
    gens, b = layer_generations(4, 1)
    assert gens == [1, 3] and b == 1
    gens, b = layer_generations(5, 1)
    assert gens == [0, 2, 4] and b == 0
    gens, b = layer_generations(3, 5)
    assert gens == [] and b == 4


def test_greedy_count_formula():
    levels = level_sizes(DegreeProfile.constant(2), 4)
    # anchors at generations 3 and 1, plus a residual root box
    assert greedy_count(levels, 4, 1) == 8 + 2 + 1
    assert greedy_count(levels, 4, 4) == 1
    assert greedy_count(levels, 4, 9) == 1


def test_greedy_tree_boxing_is_valid_and_counted():
    for profile, n in ((DegreeProfile.constant(2), 4),
                       (DegreeProfile.twothree(), 4),
                       (DegreeProfile.explicit([3, 1, 2]), 3)):
        tree = build_spherical(profile, n)
        for k in (1, 2, 3):
            cover = greedy_tree_boxing(tree, k)
            assert cover.num_boxes == greedy_count(tree.level_sizes(), n, k)
            assert verify_cover(tree.graph, cover)


def test_tree_witnesses_are_pairwise_far():
    tree = build_spherical(DegreeProfile.constant(2), 5)
    for k in (1, 2):
        tips = tree_witnesses(tree, k)
        assert len(tips) == tree.level_sizes()[5 - k]
        verify_witness_set(tree.graph, tips, 2 * k + 1)
    assert tree_witnesses(tree, 9) == [tree.root]


def test_tree_box_bounds_sandwich_values():
    levels = level_sizes(DegreeProfile.constant(2), 4)
    assert tree_box_bounds(levels, 4, 1) == (8, 11)
    assert tree_box_bounds(levels, 4, 2) == (4, min(greedy_count(levels, 4, 2), 7))
    assert tree_box_bounds(levels, 4, 9) == (1, 1)


def test_total_size_bound_on_regular_profiles():
    rec = total_size_bound(DegreeProfile.constant(2), 10)
    assert rec["K"] == 0 and rec["holds"]
    assert rec["total"] == 2 ** 11 - 1
    assert rec["bound"] == 2 * 1 * 2 ** 10
    rec = total_size_bound(DegreeProfile.explicit([2, 1, 1, 3]), 4)
    assert rec["K"] == 2
    assert rec["top_level"] <= rec["total"] <= rec["bound"]
    with pytest.raises(RegimeError):
        total_size_bound(DegreeProfile.spikes(1), 5)


def test_total_size_helper():
    assert total_size([1, 2, 4]) == 7


def test_window_growth_averages_oscillate_for_blocks():
    values = window_growth_averages(DegreeProfile.blocks(2, 3), 5, 10, 200)
    assert max(values) - min(values) > 0.05


def test_martingale_diagnostics_require_supercritical():
    q = OffspringDistribution((0.0, 1.0))
    with pytest.raises(RegimeError):
        gw_martingale_diagnostics([[1, 1]], q)


def test_profile_file_round_trips(tmp_path):
    for prof in (DegreeProfile.constant(3), DegreeProfile.twothree(),
                 DegreeProfile.blocks(2, 3), DegreeProfile.spikes(2),
                 DegreeProfile.explicit([2, 3, 1])):
        text = format_profile(prof)
        assert parse_profile(text) == prof
        path = tmp_path / "prof.txt"
        write_profile(prof, path)
        assert read_profile(path) == prof


def test_profile_parse_errors():
    with pytest.raises(FormatError):
        parse_profile("")
    with pytest.raises(FormatError):
        parse_profile("rule constant 2\nf 0 3\n")  # rule and values mixed
    with pytest.raises(FormatError):
        parse_profile("f 0 2\nf 2 3\n")  # gap in depths
    with pytest.raises(FormatError):
        parse_profile("rule blocks 2\n")  # missing parameter


def test_offspring_file_round_trips(tmp_path):
    q = OffspringDistribution((0.0, 0.25, 0.5, 0.25))
    text = format_offspring(q)
    assert parse_offspring(text) == q
    path = tmp_path / "q.txt"
    write_offspring(q, path)
    assert read_offspring(path) == q
    # sparse entries fill the gaps with zeros
    sparse = parse_offspring("q 1 0.5\nq 3 0.5\n")
    assert sparse.q == (0.0, 0.5, 0.0, 0.5)


def test_offspring_parse_errors():
    with pytest.raises(FormatError):
        parse_offspring("q 1 0.5\nq 1 0.5\n")  # repeated index
    with pytest.raises(FormatError):
        parse_offspring("probability 1 1.0\n")
