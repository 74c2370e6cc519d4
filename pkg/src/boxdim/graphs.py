"""Immutable undirected graphs and the two shortest-path metrics.

Vertices are 0..n-1.  Distances come in two flavours everywhere in this
package: GLOBAL measures inside the whole graph, SUBGRAPH measures inside
the induced subgraph on a vertex set (which therefore also has to be
connected).  A set S is an ell-box when all pairwise distances in the
chosen metric are <= ell - 1.
"""

from __future__ import annotations

import enum
from collections import deque
from typing import Iterable, Optional, Sequence

from .errors import DomainError, FormatError, InputError


class MetricMode(enum.Enum):
    GLOBAL = "global"
    SUBGRAPH = "subgraph"

    @staticmethod
    def parse(text: str) -> "MetricMode":
        wanted = text.strip().lower()
        for mode in MetricMode:
            if mode.value == wanted:
                return mode
        raise InputError(f"unknown metric mode {text!r} (use 'global' or 'subgraph')")


class Graph:
    """Simple undirected graph, frozen after construction. No loops."""

    __slots__ = ("num_vertices", "edges", "labels", "_adj")

    def __init__(self, num_vertices: int, edges: Iterable[tuple[int, int]],
                 labels: Optional[Sequence[str]] = None):
        if num_vertices < 0:
            raise InputError("num_vertices must be >= 0")
        canon = set()
        for u, v in edges:
            if not (0 <= u < num_vertices and 0 <= v < num_vertices):
                raise InputError(f"edge ({u}, {v}) out of range for {num_vertices} vertices")
            if u == v:
                raise InputError(f"loop ({u}, {u}) not allowed in a generated graph")
            canon.add((u, v) if u < v else (v, u))
        object.__setattr__(self, "num_vertices", num_vertices)
        object.__setattr__(self, "edges", frozenset(canon))
        if labels is not None:
            labels = tuple(str(x) for x in labels)
            if len(labels) != num_vertices:
                raise InputError("labels length must equal num_vertices")
        object.__setattr__(self, "labels", labels)
        adj: list[list[int]] = [[] for _ in range(num_vertices)]
        for u, v in canon:
            adj[u].append(v)
            adj[v].append(u)
        object.__setattr__(self, "_adj", tuple(tuple(sorted(a)) for a in adj))

    def __setattr__(self, name, value):
        raise AttributeError("Graph is immutable")

    @property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        return self._adj

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return len(self._adj[v])

    def neighbors(self, v: int) -> tuple[int, ...]:
        return self._adj[v]

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.num_vertices == other.num_vertices
                and self.edges == other.edges
                and self.labels == other.labels)

    def __hash__(self):
        return hash((self.num_vertices, self.edges, self.labels))

    def __repr__(self):
        return f"Graph({self.num_vertices} vertices, {self.num_edges} edges)"


def bfs_distances(graph: Graph, source: int) -> list[Optional[int]]:
    """Distances from source; None marks unreachable vertices."""
    n = graph.num_vertices
    if not 0 <= source < n:
        raise InputError(f"source {source} out of range for {n} vertices")
    dist: list[Optional[int]] = [None] * n
    dist[source] = 0
    queue = deque([source])
    adj = graph.adjacency
    while queue:
        u = queue.popleft()
        du = dist[u]
        for w in adj[u]:
            if dist[w] is None:
                dist[w] = du + 1
                queue.append(w)
    return dist


def is_connected(graph: Graph) -> bool:
    if graph.num_vertices == 0:
        return True
    return all(d is not None for d in bfs_distances(graph, 0))


def distance_matrix(graph: Graph) -> list[list[Optional[int]]]:
    """All-pairs BFS distances. Quadratic memory; meant for desk-scale graphs."""
    return [bfs_distances(graph, s) for s in range(graph.num_vertices)]


def diameter(graph: Graph) -> int:
    """Exact diameter by BFS from every vertex."""
    n = graph.num_vertices
    if n == 0:
        raise InputError("empty graph has no diameter")
    best = 0
    for s in range(n):
        dist = bfs_distances(graph, s)
        for v, d in enumerate(dist):
            if d is None:
                raise DomainError(f"graph is disconnected: no path between {s} and {v}")
            if d > best:
                best = d
    return best


def eccentricity(graph: Graph, v: int) -> int:
    dist = bfs_distances(graph, v)
    for u, d in enumerate(dist):
        if d is None:
            raise DomainError(f"graph is disconnected: no path between {v} and {u}")
    return max(d for d in dist if d is not None)


def _check_vertex_set(graph: Graph, vertices: Iterable[int]) -> list[int]:
    verts = sorted(set(int(v) for v in vertices))
    for v in verts:
        if not 0 <= v < graph.num_vertices:
            raise InputError(f"vertex {v} out of range for {graph.num_vertices} vertices")
    return verts


def is_ell_box(graph: Graph, vertices: Iterable[int], ell: int,
               mode: MetricMode = MetricMode.GLOBAL) -> bool:
    """True when all pairwise distances inside `vertices` are <= ell - 1.

    GLOBAL uses distances of the ambient graph; SUBGRAPH re-measures inside
    the induced subgraph, so the set also has to induce a connected graph.
    """
    if ell < 2:
        raise InputError(f"ell must be >= 2, got {ell}")
    verts = _check_vertex_set(graph, vertices)
    if len(verts) <= 1:
        return True
    limit = ell - 1
    if mode is MetricMode.GLOBAL:
        for s in verts:
            dist = bfs_distances(graph, s)
            for v in verts:
                if v == s:
                    continue
                d = dist[v]
                if d is None or d > limit:
                    return False
        return True
    sub, _ = induced_subgraph(graph, verts)
    for s in range(sub.num_vertices):
        dist = bfs_distances(sub, s)
        for d in dist:
            if d is None or d > limit:
                return False
    return True


def induced_subgraph(graph: Graph, vertices: Iterable[int]) -> tuple[Graph, tuple[int, ...]]:
    """Induced subgraph reindexed 0..|S|-1 plus the index map (new -> old)."""
    verts = _check_vertex_set(graph, vertices)
    index_of = {old: new for new, old in enumerate(verts)}
    edges = [(index_of[u], index_of[v]) for u, v in graph.edges
             if u in index_of and v in index_of]
    labels = None
    if graph.labels is not None:
        labels = tuple(graph.labels[v] for v in verts)
    return Graph(len(verts), edges, labels), tuple(verts)


# ── edge-list text format ────────────────────────────────────────────────
#
#   # vertices=<N>
#   # label <v> <string>          (optional, one per labelled vertex)
#   # <key> <payload...>          (optional annotations, e.g. "# birth 4 1")
#   u v                           (one edge per line, 0-based)


def format_edge_list(graph: Graph, extras: Optional[dict[str, list[str]]] = None) -> str:
    lines = [f"# vertices={graph.num_vertices}"]
    if graph.labels is not None:
        for v, lab in enumerate(graph.labels):
            lines.append(f"# label {v} {lab}")
    if extras:
        for key in sorted(extras):
            if key in ("vertices", "label"):
                raise InputError(f"reserved annotation key {key!r}")
            for payload in extras[key]:
                lines.append(f"# {key} {payload}")
    for u, v in sorted(graph.edges):
        lines.append(f"{u} {v}")
    return "\n".join(lines) + "\n"


def parse_edge_list(text: str) -> tuple[Graph, dict[str, list[str]]]:
    num_vertices = None
    labels: dict[int, str] = {}
    extras: dict[str, list[str]] = {}
    edges: list[tuple[int, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if body.startswith("vertices="):
                try:
                    num_vertices = int(body.split("=", 1)[1])
                except ValueError:
                    raise FormatError(f"line {lineno}: bad vertex count {body!r}")
            elif body.startswith("label "):
                parts = body.split(" ", 2)
                if len(parts) < 3:
                    raise FormatError(f"line {lineno}: label needs a vertex and a value")
                try:
                    labels[int(parts[1])] = parts[2]
                except ValueError:
                    raise FormatError(f"line {lineno}: bad label vertex {parts[1]!r}")
            else:
                parts = body.split(" ", 1)
                key = parts[0]
                payload = parts[1] if len(parts) > 1 else ""
                extras.setdefault(key, []).append(payload)
            continue
        parts = line.split()
        if len(parts) != 2:
            raise FormatError(f"line {lineno}: expected 'u v', got {raw!r}")
        try:
            edges.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise FormatError(f"line {lineno}: non-integer endpoint in {raw!r}")
    if num_vertices is None:
        raise FormatError("missing '# vertices=<N>' header line")
    label_tuple = None
    if labels:
        label_tuple = tuple(labels.get(v, "") for v in range(num_vertices))
    try:
        graph = Graph(num_vertices, edges, label_tuple)
    except InputError as exc:
        raise FormatError(str(exc))
    return graph, extras


def write_edge_list(graph: Graph, path, extras: Optional[dict[str, list[str]]] = None) -> None:
    with open(path, "w") as fp:
        fp.write(format_edge_list(graph, extras))


def read_edge_list(path) -> tuple[Graph, dict[str, list[str]]]:
    with open(path) as fp:
        return parse_edge_list(fp.read())
