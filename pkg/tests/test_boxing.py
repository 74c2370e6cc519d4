"""Covers, witness sets, and the exact minimum-box solver."""

import random

import pytest

from boxdim.boxing import (BoxCover, METHOD_EXACT, METHOD_GREEDY,
                           greedy_boxing, greedy_witness_clique,
                           min_boxes_bruteforce, min_boxes_exact,
                           cover_violation, verify_cover, verify_witness_set,
                           format_cover, write_cover, read_cover)
from boxdim.errors import DomainError, InputError, ResourceError
from boxdim.graphs import Graph, MetricMode, distance_matrix


def path_graph(n):
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def random_connected(rng, n, extra=0.25):
    edges = {(rng.randrange(v), v) for v in range(1, n)}
    for u in range(n):
        for v in range(u + 1, n):
            if (u, v) not in edges and rng.random() < extra:
                edges.add((u, v))
    return Graph(n, edges)


def test_witness_set_certifies_pairwise_distance():
    g = path_graph(7)
    w = verify_witness_set(g, [0, 3, 6], 3)
    assert len(w) == 3
    assert w.min_pairwise_distance == 3
    with pytest.raises(DomainError, match=r"\(0, 2\)"):
        verify_witness_set(g, [0, 2, 6], 3)
    with pytest.raises(InputError):
        verify_witness_set(g, [0, 0, 6], 3)


def test_witness_set_treats_unreachable_as_far():
    g = Graph(4, [(0, 1), (2, 3)])
    w = verify_witness_set(g, [0, 2], 5)
    assert w.min_pairwise_distance is None


def test_cover_violations_are_named():
    g = path_graph(4)
    overlap = BoxCover(3, MetricMode.GLOBAL, ((0, 1), (1, 2, 3)), METHOD_GREEDY)
    assert "more than one box" in cover_violation(g, overlap)
    gap = BoxCover(3, MetricMode.GLOBAL, ((0, 1),), METHOD_GREEDY)
    assert "not covered" in cover_violation(g, gap)
    wide = BoxCover(2, MetricMode.GLOBAL, ((0, 1, 2), (3,)), METHOD_GREEDY)
    assert "not an ell-box" in cover_violation(g, wide)
    good = BoxCover(3, MetricMode.GLOBAL, ((0, 1, 2), (3,)), METHOD_GREEDY)
    assert cover_violation(g, good) is None and verify_cover(g, good)


def test_greedy_boxing_is_valid_in_both_modes():
    rng = random.Random(4)
    for _ in range(10):
        g = random_connected(rng, rng.randint(3, 10))
        for mode in (MetricMode.GLOBAL, MetricMode.SUBGRAPH):
            cover = greedy_boxing(g, 3, mode, seed=rng.randrange(100))
            assert verify_cover(g, cover)


def test_greedy_witness_clique_is_certified():
    g = path_graph(10)
    clique = greedy_witness_clique(g, 3, distance_matrix(g))
    verify_witness_set(g, clique, 3)
    assert len(clique) >= 3


def test_exact_on_a_path():
    # a path of 6 splits into two boxes of 3 consecutive vertices at ell=3
    g = path_graph(6)
    cover = min_boxes_exact(g, 3)
    assert cover.num_boxes == 2 and cover.optimal
    assert verify_cover(g, cover)
    assert cover.certificate in ("lower bound met", "search exhausted")


def test_exact_subgraph_mode_accepts_nonmonotone_boxes():
    # 0-2-1 path: the only 1-box cover at ell=3 is {0,1,2}, whose prefix
    # {0,1} is not itself a box in the induced metric.  The solver must
    # not prune that prefix away.
    g = Graph(3, [(0, 2), (1, 2)])
    cover = min_boxes_exact(g, 3, MetricMode.SUBGRAPH)
    assert cover.num_boxes == 1 and cover.optimal


def test_exact_subgraph_mode_counts_exceed_global():
    # star with two long arms: global mode can pair arm tips via the hub
    g = Graph(5, [(0, 2), (1, 2), (2, 3), (3, 4)])
    glob = min_boxes_exact(g, 3, MetricMode.GLOBAL)
    sub = min_boxes_exact(g, 3, MetricMode.SUBGRAPH)
    assert glob.num_boxes <= sub.num_boxes
    assert sub.num_boxes == min_boxes_bruteforce(g, 3, MetricMode.SUBGRAPH)


def test_exact_agrees_with_bruteforce_on_random_graphs():
    rng = random.Random(99)
    for _ in range(12):
        g = random_connected(rng, rng.randint(3, 8))
        for ell in (2, 3):
            for mode in (MetricMode.GLOBAL, MetricMode.SUBGRAPH):
                cover = min_boxes_exact(g, ell, mode)
                assert cover.optimal
                assert cover.num_boxes == min_boxes_bruteforce(g, ell, mode)
                assert verify_cover(g, cover)


def test_warm_starts_do_not_change_the_optimum():
    rng = random.Random(7)
    g = random_connected(rng, 9)
    plain = min_boxes_exact(g, 3)
    seeded = min_boxes_exact(
        g, 3, initial_cover=greedy_boxing(g, 3, seed=5),
        witnesses=greedy_witness_clique(g, 3, distance_matrix(g)))
    assert plain.num_boxes == seeded.num_boxes


def test_bad_warm_starts_are_rejected():
    g = path_graph(4)
    wrong_ell = greedy_boxing(g, 5)
    with pytest.raises(InputError):
        min_boxes_exact(g, 3, initial_cover=wrong_ell)
    broken = BoxCover(3, MetricMode.GLOBAL, ((0, 1),), METHOD_GREEDY)
    with pytest.raises(InputError):
        min_boxes_exact(g, 3, initial_cover=broken)


def test_budget_exhaustion_returns_a_valid_cover():
    rng = random.Random(9)
    g = random_connected(rng, 14, extra=0.25)
    cover = min_boxes_exact(g, 3, budget=5)
    assert not cover.optimal
    assert "budget exhausted" in cover.certificate
    assert verify_cover(g, cover)
    assert cover.num_boxes > min_boxes_exact(g, 3).num_boxes


def test_exact_rejects_disconnected_graphs():
    with pytest.raises(DomainError):
        min_boxes_exact(Graph(3, [(0, 1)]), 3)


def test_bruteforce_refuses_large_graphs():
    with pytest.raises(ResourceError, match="12 vertices, got 13"):
        min_boxes_bruteforce(path_graph(13), 3)


def test_cover_file_round_trip(tmp_path):
    g = path_graph(6)
    cover = min_boxes_exact(g, 3)
    path = tmp_path / "cover.txt"
    write_cover(cover, path)
    back = read_cover(path)
    assert back.ell == cover.ell and back.mode is cover.mode
    assert back.boxes == cover.boxes and back.method == cover.method
    assert format_cover(back) == format_cover(cover)
