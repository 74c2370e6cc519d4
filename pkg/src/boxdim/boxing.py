"""Box covers: exact branch-and-bound, randomized greedy, and certificates.

A box cover partitions the vertex set into ell-boxes (see graphs.is_ell_box).
The exact solver keeps a witness clique - vertices pairwise at distance
>= ell - as a certified lower bound: no two of them ever fit in one box.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .errors import DomainError, FormatError, InputError, ResourceError
from .graphs import (Graph, MetricMode, bfs_distances, distance_matrix,
                     induced_subgraph, is_connected, is_ell_box)

METHOD_EXACT = "Exact"
METHOD_GREEDY = "Greedy"
METHOD_CONSTRUCTIVE = "Constructive"
METHOD_LOWER = "LowerBound"
METHOD_UPPER = "UpperBound"


@dataclass(frozen=True)
class BoxCover:
    ell: int
    mode: MetricMode
    boxes: tuple[tuple[int, ...], ...]
    method: str
    optimal: bool = False
    certificate: str = ""

    @property
    def num_boxes(self) -> int:
        return len(self.boxes)


@dataclass(frozen=True)
class WitnessSet:
    vertices: tuple[int, ...]
    min_pairwise_distance: Optional[int]

    def __len__(self):
        return len(self.vertices)


def verify_witness_set(graph: Graph, vertices: Iterable[int], ell: int) -> WitnessSet:
    """Certify that `vertices` are pairwise at distance >= ell.

    Returns the witness set with its true minimum pairwise distance, or
    raises DomainError naming the first offending pair.  A certified set of
    size w forces every ell-box cover to use at least w boxes.
    """
    if ell < 2:
        raise InputError(f"ell must be >= 2, got {ell}")
    verts = [int(v) for v in vertices]
    for v in verts:
        if not 0 <= v < graph.num_vertices:
            raise InputError(f"vertex {v} out of range")
    if len(verts) != len(set(verts)):
        raise InputError("witness vertices must be distinct")
    best: Optional[int] = None
    for i, u in enumerate(verts):
        if i + 1 == len(verts):
            break
        dist = bfs_distances(graph, u)
        for v in verts[i + 1:]:
            d = dist[v]
            if d is None:
                continue  # unreachable pairs are infinitely far apart
            if d < ell:
                raise DomainError(
                    f"witness pair ({u}, {v}) has distance {d} < ell={ell}")
            if best is None or d < best:
                best = d
    return WitnessSet(tuple(verts), best)


def cover_violation(graph: Graph, cover: BoxCover) -> Optional[str]:
    """First violated cover condition as text, or None when valid."""
    seen: set[int] = set()
    for i, box in enumerate(cover.boxes):
        for v in box:
            if not 0 <= v < graph.num_vertices:
                return f"box {i} contains out-of-range vertex {v}"
            if v in seen:
                return f"vertex {v} appears in more than one box"
            seen.add(v)
    if len(seen) != graph.num_vertices:
        missing = next(v for v in range(graph.num_vertices) if v not in seen)
        return f"vertex {missing} is not covered"
    for i, box in enumerate(cover.boxes):
        if not box:
            return f"box {i} is empty"
        if not is_ell_box(graph, box, cover.ell, cover.mode):
            return (f"box {i} is not an ell-box for ell={cover.ell} "
                    f"in {cover.mode.value} mode")
    return None


def verify_cover(graph: Graph, cover: BoxCover) -> bool:
    return cover_violation(graph, cover) is None


def _box_feasible_global(dmat, limit, box: Sequence[int], v: int) -> bool:
    row = dmat[v]
    for u in box:
        d = row[u]
        if d is None or d > limit:
            return False
    return True


def _box_feasible_subgraph(graph, ell, box: Sequence[int], v: int) -> bool:
    # No incremental shortcut: induced distances can change non-locally,
    # so the full candidate box is re-checked after each insertion.
    return is_ell_box(graph, list(box) + [v], ell, MetricMode.SUBGRAPH)


def greedy_boxing(graph: Graph, ell: int, mode: MetricMode = MetricMode.GLOBAL,
                  seed: int = 0) -> BoxCover:
    """First-fit boxing over a seeded random vertex order.

    Boxes are tried in creation order; a vertex opens a new box when it fits
    in none.  Deterministic for a fixed seed.
    """
    if ell < 2:
        raise InputError(f"ell must be >= 2, got {ell}")
    if not is_connected(graph):
        raise DomainError("greedy_boxing expects a connected graph")
    n = graph.num_vertices
    order = list(range(n))
    random.Random(seed).shuffle(order)
    limit = ell - 1
    boxes: list[list[int]] = []
    if mode is MetricMode.GLOBAL:
        dmat = distance_matrix(graph)
        fits = lambda box, v: _box_feasible_global(dmat, limit, box, v)
    else:
        fits = lambda box, v: _box_feasible_subgraph(graph, ell, box, v)
    for v in order:
        for box in boxes:
            if fits(box, v):
                box.append(v)
                break
        else:
            boxes.append([v])
    return BoxCover(ell, mode, tuple(tuple(sorted(b)) for b in boxes),
                    METHOD_GREEDY, optimal=False, certificate="heuristic")


def greedy_witness_clique(graph: Graph, ell: int,
                          dmat=None, seeds: Sequence[int] = (0, 1, 2, 3),
                          start: Iterable[int] = ()) -> list[int]:
    """Largest pairwise-far vertex set found over a few seeded orders."""
    if dmat is None:
        dmat = distance_matrix(graph)
    n = graph.num_vertices
    base = list(start)
    for i, u in enumerate(base):
        for v in base[i + 1:]:
            d = dmat[u][v]
            if d is not None and d < ell:
                raise InputError(f"witness hint pair ({u}, {v}) is too close")
    orders = [list(range(n))]
    for s in seeds:
        order = list(range(n))
        random.Random(s).shuffle(order)
        orders.append(order)
    best = list(base)
    for order in orders:
        clique = list(base)
        members = set(clique)
        for v in order:
            if v in members:
                continue
            row = dmat[v]
            if all(row[u] is None or row[u] >= ell for u in clique):
                clique.append(v)
                members.add(v)
        if len(clique) > len(best):
            best = clique
    return best


class _SearchDone(Exception):
    pass


class _BudgetExhausted(Exception):
    pass


def min_boxes_exact(graph: Graph, ell: int, mode: MetricMode = MetricMode.GLOBAL,
                    budget: int = 500_000,
                    initial_cover: Optional[BoxCover] = None,
                    witnesses: Optional[Iterable[int]] = None) -> BoxCover:
    """Minimum number of ell-boxes by branch-and-bound.

    Branches on the lowest-indexed unassigned vertex; children are the
    feasible existing boxes in creation order, then a fresh box.  Prunes on
    box count against the incumbent and on a witness-clique bound.  The
    result carries an optimality certificate: "search exhausted" or
    "lower bound met".  When the node budget runs out the best cover found
    is returned with optimal=False.

    In subgraph mode a box's validity is not monotone under growing it
    vertex by vertex (a valid box can have invalid prefixes while its
    connecting vertices are still unassigned), so partial boxes are only
    filtered by the global-metric relaxation and the induced-metric check
    runs on complete partitions before they become incumbents.

    Optional warm starts: `initial_cover` seeds the incumbent, `witnesses`
    seeds the clique.  Neither changes the optimum, only the search effort.
    """
    if ell < 2:
        raise InputError(f"ell must be >= 2, got {ell}")
    if not is_connected(graph):
        raise DomainError("min_boxes_exact expects a connected graph")
    n = graph.num_vertices
    if n == 0:
        return BoxCover(ell, mode, (), METHOD_EXACT, True, "search exhausted")
    limit = ell - 1
    dmat = distance_matrix(graph)

    clique = greedy_witness_clique(graph, ell, dmat,
                                   start=() if witnesses is None else witnesses)
    lower = max(1, len(clique))

    candidates: list[tuple[tuple[int, ...], ...]] = []
    if initial_cover is not None:
        if initial_cover.ell != ell or initial_cover.mode is not mode:
            raise InputError("initial_cover has a different ell or mode")
        flaw = cover_violation(graph, initial_cover)
        if flaw is not None:
            raise InputError(f"initial_cover is not a valid cover: {flaw}")
        candidates.append(initial_cover.boxes)
    for s in (0, 1, 2):
        candidates.append(greedy_boxing(graph, ell, mode, seed=s).boxes)
    incumbent = min(candidates, key=len)

    if len(incumbent) <= lower:
        return BoxCover(ell, mode, tuple(tuple(sorted(b)) for b in incumbent),
                        METHOD_EXACT, True, "lower bound met")

    # Partial filters.  Global mode: pairwise global distances <= ell-1,
    # which is exact.  Subgraph mode: additionally, every box member must be
    # reachable from the joining vertex within ell-1 hops using only box
    # members and not-yet-assigned vertices (indices >= v).  The final box
    # is a subset of that vertex pool, so induced distances only grow as
    # the search descends: the filter is monotone and sound, but complete
    # partitions still need the re-check below (a pair's connectors may be
    # assigned elsewhere after the pair was admitted).
    adj = graph.adjacency

    def fits(i: int, v: int) -> bool:
        box = boxes[i]
        if not _box_feasible_global(dmat, limit, box, v):
            return False
        if mode is MetricMode.GLOBAL:
            return True
        members = box_sets[i]
        want = set(box)
        seen = {v}
        frontier = [v]
        hops = 0
        while frontier and want and hops < limit:
            hops += 1
            nxt = []
            for u in frontier:
                for w in adj[u]:
                    if w in seen or (w < v and w not in members):
                        continue
                    seen.add(w)
                    want.discard(w)
                    nxt.append(w)
            frontier = nxt
        return not want

    subgraph_ok: dict[frozenset, bool] = {}

    def final_boxes_ok() -> bool:
        if mode is MetricMode.GLOBAL:
            return True
        for box in boxes:
            key = frozenset(box)
            hit = subgraph_ok.get(key)
            if hit is None:
                hit = is_ell_box(graph, box, ell, MetricMode.SUBGRAPH)
                subgraph_ok[key] = hit
            if not hit:
                return False
        return True

    is_witness = [False] * n
    for v in clique:
        is_witness[v] = True
    # unassigned witnesses when processing vertex v = clique members >= v
    witness_suffix = [0] * (n + 1)
    for v in range(n - 1, -1, -1):
        witness_suffix[v] = witness_suffix[v + 1] + (1 if is_witness[v] else 0)

    best_boxes = [list(b) for b in incumbent]
    best_count = len(best_boxes)
    boxes: list[list[int]] = []
    box_sets: list[set[int]] = []
    box_witnesses: list[int] = []
    state = {"nodes": 0, "witness_boxes": 0}

    def descend(v: int):
        state["nodes"] += 1
        if state["nodes"] > budget:
            raise _BudgetExhausted
        nonlocal best_boxes, best_count
        if v == n:
            if len(boxes) < best_count and final_boxes_ok():
                best_boxes = [list(b) for b in boxes]
                best_count = len(boxes)
                if best_count <= lower:
                    raise _SearchDone
            return
        count = len(boxes)
        bound = max(count, state["witness_boxes"] + witness_suffix[v])
        if bound >= best_count:
            return
        wit = is_witness[v]
        for i in range(count):
            if wit and box_witnesses[i] > 0:
                continue  # two witnesses never share a box
            if fits(i, v):
                boxes[i].append(v)
                box_sets[i].add(v)
                if wit:
                    box_witnesses[i] += 1
                    state["witness_boxes"] += 1
                descend(v + 1)
                if wit:
                    box_witnesses[i] -= 1
                    state["witness_boxes"] -= 1
                boxes[i].pop()
                box_sets[i].discard(v)
        if count + 1 < best_count:
            boxes.append([v])
            box_sets.append({v})
            box_witnesses.append(1 if wit else 0)
            if wit:
                state["witness_boxes"] += 1
            descend(v + 1)
            if wit:
                state["witness_boxes"] -= 1
            box_witnesses.pop()
            box_sets.pop()
            boxes.pop()

    optimal = True
    certificate = "search exhausted"
    try:
        descend(0)
    except _SearchDone:
        certificate = "lower bound met"
    except _BudgetExhausted:
        optimal = False
        certificate = f"budget exhausted after {budget} nodes"

    return BoxCover(ell, mode, tuple(tuple(sorted(b)) for b in best_boxes),
                    METHOD_EXACT, optimal, certificate)


def min_boxes_bruteforce(graph: Graph, ell: int,
                         mode: MetricMode = MetricMode.GLOBAL,
                         max_vertices: int = 12) -> int:
    """Minimum box count by exhaustive enumeration of all set partitions.

    Independent of the branch-and-bound path on purpose; usable as an
    oracle on small graphs only (Bell numbers grow fast).
    """
    n = graph.num_vertices
    if n > max_vertices:
        raise ResourceError(f"brute force limited to {max_vertices} vertices, got {n}")
    if n == 0:
        return 0
    feasible: dict[frozenset, bool] = {}

    def box_ok(block: tuple[int, ...]) -> bool:
        key = frozenset(block)
        hit = feasible.get(key)
        if hit is None:
            hit = is_ell_box(graph, block, ell, mode)
            feasible[key] = hit
        return hit

    best = n  # singletons always work (every 1-set is a box)
    blocks: list[list[int]] = []

    def rec(v: int):
        nonlocal best
        if v == n:
            if len(blocks) < best and all(box_ok(tuple(b)) for b in blocks):
                best = len(blocks)
            return
        for b in blocks:
            b.append(v)
            rec(v + 1)
            b.pop()
        blocks.append([v])
        rec(v + 1)
        blocks.pop()

    rec(0)
    return best


# ── cover text format ────────────────────────────────────────────────────
#
#   # ell=<l> mode=<mode> method=<m> optimal=<true|false>
#   box <i>: v1 v2 ...


def format_cover(cover: BoxCover) -> str:
    lines = [f"# ell={cover.ell} mode={cover.mode.value} "
             f"method={cover.method} optimal={'true' if cover.optimal else 'false'}"]
    for i, box in enumerate(cover.boxes):
        lines.append(f"box {i}: " + " ".join(str(v) for v in box))
    return "\n".join(lines) + "\n"


def write_cover(cover: BoxCover, path) -> None:
    with open(path, "w") as fp:
        fp.write(format_cover(cover))


def parse_cover(text: str) -> BoxCover:
    header = None
    boxes: list[tuple[int, ...]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            if header is not None:
                raise FormatError(f"line {lineno}: repeated header")
            fields = dict(part.split("=", 1) for part in line[1:].split()
                          if "=" in part)
            for want in ("ell", "mode", "method", "optimal"):
                if want not in fields:
                    raise FormatError(f"line {lineno}: header missing {want!r}")
            try:
                header = (int(fields["ell"]), MetricMode.parse(fields["mode"]),
                          fields["method"], fields["optimal"] == "true")
            except (ValueError, InputError) as exc:
                raise FormatError(f"line {lineno}: {exc}")
            continue
        if not line.startswith("box "):
            raise FormatError(f"line {lineno}: expected 'box <i>: ...'")
        _, _, body = line.partition(":")
        try:
            boxes.append(tuple(int(v) for v in body.split()))
        except ValueError:
            raise FormatError(f"line {lineno}: non-integer vertex in box")
    if header is None:
        raise FormatError("missing '# ell=... mode=...' header line")
    ell, mode, method, optimal = header
    return BoxCover(ell, mode, tuple(boxes), method, optimal)


def read_cover(path) -> BoxCover:
    with open(path) as fp:
        return parse_cover(fp.read())
