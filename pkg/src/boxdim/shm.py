"""Leaf-growth model with optional edge rewiring.

One growth step on a connected graph attaches m*deg(v) fresh leaves to
every vertex v, then revisits each pre-existing edge (u, v): with
probability p the edge is kept as is, otherwise it is replaced by
(u', v') where u' and v' are drawn uniformly from the children u and v
just received.  Vertex and edge counts follow

    V(n) = V(n-1) + 2m E(n-1),        E(n) = (2m+1) E(n-1),

independent of p.  With p = 1 (no rewiring) every new vertex hangs off
its parent forever, the diameter grows by exactly 2 per step, and the
anchor classes of the vertices alive at step n-k-1 cover the final graph
with boxes of diameter at most 2(k+1).
"""

from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass
from typing import Optional

from .boxing import (METHOD_CONSTRUCTIVE, BoxCover, WitnessSet,
                     verify_witness_set)
from .errors import (InputError, PreconditionError, RegimeError,
                     ResourceError)
from .graphs import Graph, MetricMode, is_connected


def triangle() -> Graph:
    return Graph(3, [(0, 1), (0, 2), (1, 2)])


def star5() -> Graph:
    return Graph(5, [(0, 1), (0, 2), (0, 3), (0, 4)])


INITIAL_GRAPHS = {"triangle": triangle, "star5": star5}


@dataclass(frozen=True)
class ShmRun:
    """Evolution record: snapshots[t] is the graph after t growth steps.

    Vertex indices are stable across steps, so one birth/parent array for
    the final vertex set describes every intermediate graph: vertex w was
    born at step birth[w] attached to parent[w] (None for initial
    vertices, whose birth is 0).
    """

    snapshots: tuple[Graph, ...]
    birth: tuple[int, ...]
    parent: tuple[Optional[int], ...]
    m: int
    p: float
    seed: Optional[int] = None

    @property
    def steps(self) -> int:
        return len(self.snapshots) - 1

    @property
    def initial(self) -> Graph:
        return self.snapshots[0]

    @property
    def final(self) -> Graph:
        return self.snapshots[-1]

    def size(self, step: int) -> int:
        return self.snapshots[step].num_vertices

    def diam0(self) -> int:
        from .graphs import diameter
        return diameter(self.initial)


def shm_counts(v0: int, e0: int, m: int, n: int) -> tuple[int, int]:
    """Exact vertex/edge counts after n steps from (v0, e0)."""
    if v0 < 1 or e0 < 0 or m < 1 or n < 0:
        raise InputError("need v0 >= 1, e0 >= 0, m >= 1, n >= 0")
    v, e = v0, e0
    for _ in range(n):
        v, e = v + 2 * m * e, (2 * m + 1) * e
    return v, e


def shm_evolve(initial: Graph, m: int, p: float, steps: int,
               seed: Optional[int] = None, budget: int = 500_000) -> ShmRun:
    """Run the model for the given number of steps.

    Raises ResourceError (with the completed prefix attached as .partial)
    as soon as a step would push the vertex count past the budget.
    """
    if m < 1:
        raise InputError(f"m must be >= 1, got {m}")
    if not 0.0 <= p <= 1.0:
        raise InputError(f"p must lie in [0, 1], got {p}")
    if steps < 0:
        raise InputError(f"steps must be >= 0, got {steps}")
    if initial.num_vertices < 2 or not is_connected(initial):
        raise InputError("initial graph must be connected with >= 2 vertices")
    rng = random.Random(seed)
    snapshots = [initial]
    birth = [0] * initial.num_vertices
    parent: list[Optional[int]] = [None] * initial.num_vertices
    graph = initial
    for step in range(1, steps + 1):
        old_n = graph.num_vertices
        next_n = old_n + 2 * m * graph.num_edges
        if next_n > budget:
            raise ResourceError(
                f"step {step} needs {next_n} vertices, over the budget of {budget}",
                partial=ShmRun(tuple(snapshots), tuple(birth), tuple(parent),
                               m, p, seed))
        children: list[list[int]] = [[] for _ in range(old_n)]
        new_edges = []
        nxt = old_n
        for v in range(old_n):
            for _ in range(m * graph.degree(v)):
                children[v].append(nxt)
                new_edges.append((v, nxt))
                birth.append(step)
                parent.append(v)
                nxt += 1
        kept_or_moved = []
        for u, v in sorted(graph.edges):
            if rng.random() < p:
                kept_or_moved.append((u, v))
            else:
                u2 = rng.choice(children[u])
                v2 = rng.choice(children[v])
                if u2 == v2:  # unreachable for a simple graph; keep the guard
                    kept_or_moved.append((u, v))
                else:
                    kept_or_moved.append((u2, v2))
        graph = Graph(next_n, new_edges + kept_or_moved)
        snapshots.append(graph)
    return ShmRun(tuple(snapshots), tuple(birth), tuple(parent), m, p, seed)


def shm_ell(diam0: int, k: int) -> int:
    """Box-size ladder diam0 + 2k + 1 (one past the step-k diameter at p=1)."""
    if diam0 < 1 or k < 0:
        raise InputError("need diam0 >= 1 and k >= 0")
    return diam0 + 2 * k + 1


def shm_anchor(run: ShmRun, vertex: int, step: int) -> int:
    """Ancestor of `vertex` that is alive at the given step."""
    limit = run.size(step)
    while vertex >= limit:
        vertex = run.parent[vertex]  # type: ignore[assignment]
    return vertex


def shm_center_boxing(run: ShmRun, k: int) -> BoxCover:
    """Anchor-class cover of the final graph for box size ell_k.

    Groups the final vertices by their ancestor alive at step n-k-1,
    giving V(n-k-1) candidate boxes of diameter at most 2(k+1).  That fits
    under ell_k - 1 = diam0 + 2k exactly when diam0 >= 2; for diam0 = 1
    the partition is still returned but fails cover verification.
    """
    if run.p != 1.0:
        raise RegimeError(
            "anchor-class boxing needs p = 1; rewiring detaches subtrees")
    n = run.steps
    if k < 0 or n - k - 1 < 0:
        raise PreconditionError(
            f"need 0 <= k <= steps-1 = {n - 1}, got k={k}")
    s = n - k - 1
    groups: dict[int, list[int]] = {}
    for v in range(run.final.num_vertices):
        groups.setdefault(shm_anchor(run, v, s), []).append(v)
    boxes = tuple(tuple(groups[a]) for a in sorted(groups))
    return BoxCover(shm_ell(run.diam0(), k), MetricMode.GLOBAL, boxes,
                    METHOD_CONSTRUCTIVE, optimal=False,
                    certificate=f"anchor classes at step {s}")


def _min_child_map(run: ShmRun) -> dict[tuple[int, int], int]:
    out: dict[tuple[int, int], int] = {}
    for w, (t, u) in enumerate(zip(run.birth, run.parent)):
        if u is not None:
            out.setdefault((t, u), w)  # children are indexed in birth order
    return out


def shm_witness_vertices(run: ShmRun, k: int) -> list[int]:
    """Chain tips below the vertices alive at step n - k - ceil(diam0/2).

    Following first-born children down to step n puts each tip at depth
    n - s below its seed; paths between tips of distinct seeds must climb
    both chains, so tips are pairwise at least 2(n-s) + 1 >= ell_k apart.
    """
    if run.p != 1.0:
        raise RegimeError(
            "chain-tip witnesses need p = 1; rewiring detaches subtrees")
    n = run.steps
    half = (run.diam0() + 1) // 2
    s = n - k - half
    if k < 0 or s < 0:
        raise PreconditionError(
            f"need 0 <= k <= steps - {half} = {n - half}, got k={k}")
    min_child = _min_child_map(run)
    tips = []
    for seed_vertex in range(run.size(s)):
        cur = seed_vertex
        for t in range(s + 1, n + 1):
            cur = min_child[(t, cur)]
        tips.append(cur)
    return tips


def shm_witness_set(run: ShmRun, k: int) -> WitnessSet:
    """BFS-certified witness set for box size ell_k on the final graph."""
    tips = shm_witness_vertices(run, k)
    return verify_witness_set(run.final, tips, shm_ell(run.diam0(), k))


def shm_center_count(v0: int, e0: int, m: int, n: int, k: int) -> int:
    """Anchor-class box count V(n-k-1) by the count recursion."""
    if k < 0 or n - k - 1 < 0:
        raise PreconditionError(f"need 0 <= k <= n-1 = {n - 1}, got k={k}")
    return shm_counts(v0, e0, m, n - k - 1)[0]


def shm_witness_count(v0: int, e0: int, m: int, n: int, k: int,
                      diam0: int) -> int:
    """Chain-tip witness count V(n - k - ceil(diam0/2)) by the recursion."""
    half = (diam0 + 1) // 2
    if k < 0 or n - k - half < 0:
        raise PreconditionError(
            f"need 0 <= k <= n - {half} = {n - half}, got k={k}")
    return shm_counts(v0, e0, m, n - k - half)[0]


def snapshot_extras(run: ShmRun) -> dict[str, list[str]]:
    """Extra header lines for the edge-list export of the final snapshot."""
    extras = {
        "model": [f"shm m={run.m} p={run.p} steps={run.steps}"],
        "birth": [f"{w} {t}" for w, t in enumerate(run.birth)],
        "parent": [f"{w} {u}" for w, u in enumerate(run.parent)
                   if u is not None],
    }
    return extras
