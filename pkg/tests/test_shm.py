"""Leaf-growth model: counts, anchor boxing, witness tips."""

import pytest

from boxdim.boxing import verify_cover
from boxdim.errors import (InputError, PreconditionError, RegimeError,
                           ResourceError)
from boxdim.graphs import bfs_distances, diameter
from boxdim.shm import (ShmRun, shm_anchor, shm_center_boxing,
                        shm_center_count, shm_counts, shm_ell, shm_evolve,
                        shm_witness_count, shm_witness_set,
                        shm_witness_vertices, snapshot_extras, star5,
                        triangle)
from boxdim.graphs import read_edge_list, write_edge_list


def test_count_recursion():
    # V(n) = V(n-1) + 2m E(n-1), E(n) = (2m+1) E(n-1)
    assert shm_counts(3, 3, 2, 0) == (3, 3)
    assert shm_counts(3, 3, 2, 1) == (15, 15)
    assert shm_counts(3, 3, 2, 4) == (1875, 1875)
    assert shm_counts(5, 4, 2, 2) == (101, 100)
    assert shm_counts(5, 4, 1, 1) == (13, 12)


def test_closed_form_when_counts_start_equal():
    for m in (1, 2, 3):
        for n in range(6):
            v, e = shm_counts(3, 3, m, n)
            assert v == e == 3 * (2 * m + 1) ** n


def test_evolution_matches_counts_for_every_p():
    for m in (1, 2):
        for p in (0.0, 0.3, 1.0):
            run = shm_evolve(triangle(), m, p, steps=3, seed=42)
            assert run.steps == 3
            for t, snap in enumerate(run.snapshots):
                assert (snap.num_vertices, snap.num_edges) == \
                    shm_counts(3, 3, m, t)


def test_evolution_is_deterministic_per_seed():
    a = shm_evolve(triangle(), 2, 0.5, steps=3, seed=9)
    b = shm_evolve(triangle(), 2, 0.5, steps=3, seed=9)
    c = shm_evolve(triangle(), 2, 0.5, steps=3, seed=10)
    assert a.final == b.final
    assert a.final != c.final  # a different stream rewires differently


def test_keep_all_edges_when_p_is_one():
    run = shm_evolve(star5(), 1, 1.0, steps=2, seed=0)
    for old, new in zip(run.snapshots, run.snapshots[1:]):
        assert old.edges <= new.edges


def test_rewiring_moves_every_old_edge_when_p_is_zero():
    run = shm_evolve(triangle(), 2, 0.0, steps=1, seed=1)
    assert not (run.initial.edges & run.final.edges)


def test_birth_and_parent_tracking():
    run = shm_evolve(triangle(), 2, 1.0, steps=2, seed=3)
    assert run.birth[:3] == (0, 0, 0)
    assert all(t == 1 for t in run.birth[3:15])
    assert run.parent[0] is None
    assert all(run.parent[v] is not None for v in range(3, 15))
    assert shm_anchor(run, 0, 0) == 0
    # a step-2 vertex anchors to its step-1 parent chain
    v = 20
    assert run.birth[v] == 2
    assert shm_anchor(run, v, 1) == run.parent[v] or \
        run.birth[shm_anchor(run, v, 1)] <= 1


def test_evolution_input_validation():
    with pytest.raises(InputError):
        shm_evolve(triangle(), 0, 1.0, steps=1)
    with pytest.raises(InputError):
        shm_evolve(triangle(), 1, 1.5, steps=1)
    with pytest.raises(InputError):
        shm_evolve(triangle(), 1, 0.5, steps=-1)


def test_budget_exhaustion_carries_partial_run():
    with pytest.raises(ResourceError) as info:
        shm_evolve(triangle(), 3, 1.0, steps=8, budget=2000)
    partial = info.value.partial
    assert isinstance(partial, ShmRun)
    assert partial.steps >= 1
    assert partial.final.num_vertices <= 2000


def test_center_boxing_counts_and_validity():
    # star (diameter 2): anchor classes stay within the box limit
    run = shm_evolve(star5(), 1, 1.0, steps=3, seed=8)
    cover = shm_center_boxing(run, 1)
    assert cover.num_boxes == shm_center_count(5, 4, 1, 3, 1)
    assert cover.ell == shm_ell(2, 1)
    assert verify_cover(run.final, cover)


def test_center_boxing_fails_when_start_is_too_tight():
    # triangle (diameter 1): anchor classes reach diameter 2(k+1) = ell,
    # one over the limit, so the partition is not a valid cover
    run = shm_evolve(triangle(), 2, 1.0, steps=3, seed=8)
    cover = shm_center_boxing(run, 1)
    assert cover.num_boxes == shm_center_count(3, 3, 2, 3, 1)
    assert not verify_cover(run.final, cover)


def test_center_boxing_needs_pure_growth():
    run = shm_evolve(triangle(), 2, 0.5, steps=3, seed=8)
    with pytest.raises(RegimeError):
        shm_center_boxing(run, 1)
    good = shm_evolve(triangle(), 2, 1.0, steps=3, seed=8)
    with pytest.raises(PreconditionError):
        shm_center_boxing(good, 3)  # k must stay below steps


def test_witness_tips_are_far_apart():
    run = shm_evolve(triangle(), 2, 1.0, steps=4, seed=2)
    for k in (1, 2):
        tips = shm_witness_vertices(run, k)
        assert len(tips) == shm_witness_count(3, 3, 2, 4, k, 1)
        witness = shm_witness_set(run, k)
        assert witness.min_pairwise_distance >= shm_ell(1, k)


def test_snapshot_extras_round_trip(tmp_path):
    run = shm_evolve(triangle(), 1, 1.0, steps=2, seed=6)
    extras = snapshot_extras(run)
    path = tmp_path / "shm.txt"
    write_edge_list(run.final, path, extras=extras)
    graph, back = read_edge_list(path)
    assert graph == run.final
    assert back["birth"] == extras["birth"]
    assert back["parent"] == extras["parent"]


def test_ell_schedule():
    assert shm_ell(1, 0) == 2
    assert shm_ell(1, 3) == 8
    assert shm_ell(2, 1) == 5
    with pytest.raises(InputError):
        shm_ell(0, 1)
    with pytest.raises(InputError):
        shm_ell(1, -1)
