"""Hierarchical graphs built from words over a two-part base graph.

The base graph has letters of type 1 and type 2 (a bipartition; loops are
permitted and exempt from the cross-type rule).  The level-n graph has all
length-n words as vertices.  Two words x != y are adjacent when

  (a) after their common prefix both postfixes are uniformly typed, with
      opposite types, and
  (b) every coordinate pair past the common prefix is a base-graph edge.

Since a letter has exactly one type, (a) forces the postfixes to differ in
every coordinate; loops therefore only matter to rule (b)'s membership test
and to the base graph's own shape, never as same-letter coordinate steps.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass
from typing import Optional, Sequence

from .boxing import (METHOD_CONSTRUCTIVE, BoxCover, WitnessSet,
                     verify_witness_set)
from .errors import (DomainError, FormatError, InputError, PreconditionError,
                     ResourceError)
from .graphs import Graph, MetricMode

Code = tuple[int, ...]

_DIGITS = "0123456789abcdefghijklmnopqrstuvwxyz"


@dataclass(frozen=True)
class BaseGraph:
    """Typed base graph: letters 0..N-1, each of type 1 or 2.

    Non-loop edges must join opposite types; loops may sit anywhere.  The
    type classes are normalized so the type-1 class is the smaller one
    (ties keep the given labelling).  `reconstructed` marks a base whose
    edge list is a representative reconstruction rather than a pinned-down
    standard; counts derived from such a base should be checked through
    structural formulas, not hard-coded.
    """

    num_letters: int
    types: tuple[int, ...]
    edges: frozenset[tuple[int, int]]
    name: str = ""
    reconstructed: bool = False

    def __post_init__(self):
        n = self.num_letters
        if n < 2:
            raise InputError("a base graph needs at least 2 letters")
        if len(self.types) != n or any(t not in (1, 2) for t in self.types):
            raise InputError("types must assign 1 or 2 to every letter")
        canon = set()
        for x, y in self.edges:
            if not (0 <= x < n and 0 <= y < n):
                raise InputError(f"edge ({x}, {y}) out of range")
            if x != y and self.types[x] == self.types[y]:
                raise InputError(
                    f"non-loop edge ({x}, {y}) joins two letters of type {self.types[x]}")
            canon.add((x, y) if x <= y else (y, x))
        object.__setattr__(self, "edges", frozenset(canon))
        ones = sum(1 for t in self.types if t == 1)
        twos = n - ones
        if ones == 0 or twos == 0:
            raise InputError("both letter types must be non-empty")
        if ones > twos:
            object.__setattr__(self, "types",
                               tuple(3 - t for t in self.types))
        if not self._connected_without_loops():
            raise InputError("base graph must be connected (ignoring loops)")

    def _nonloop_adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in range(self.num_letters)]
        for x, y in self.edges:
            if x != y:
                adj[x].append(y)
                adj[y].append(x)
        return [sorted(a) for a in adj]

    def _connected_without_loops(self) -> bool:
        adj = self._nonloop_adjacency()
        seen = {0}
        queue = deque([0])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    queue.append(w)
        return len(seen) == self.num_letters

    @property
    def n1(self) -> int:
        return sum(1 for t in self.types if t == 1)

    @property
    def n2(self) -> int:
        return self.num_letters - self.n1

    def letters_of_type(self, t: int) -> tuple[int, ...]:
        return tuple(x for x in range(self.num_letters) if self.types[x] == t)

    def has_edge(self, x: int, y: int) -> bool:
        return ((x, y) if x <= y else (y, x)) in self.edges

    def diameter(self) -> int:
        """Diameter of the base in the usual metric (loops never shorten paths)."""
        adj = self._nonloop_adjacency()
        n = self.num_letters
        best = 0
        for s in range(n):
            dist = [-1] * n
            dist[s] = 0
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for w in adj[u]:
                    if dist[w] < 0:
                        dist[w] = dist[u] + 1
                        queue.append(w)
            m = max(dist)
            if min(dist) < 0:
                raise DomainError("base graph is disconnected")
            best = max(best, m)
        return best


def cherry() -> BaseGraph:
    """Three letters: the middle letter (type 1) joined to both outer ones."""
    return BaseGraph(3, (2, 1, 2), frozenset({(0, 1), (1, 2)}), name="cherry")


def fan() -> BaseGraph:
    """Six letters, type-1 hubs 2 and 4, plus a loop at every letter.

    The precise published edge set exists only as a drawing; this encoding
    is a faithful-looking reconstruction (flagged via `reconstructed`), so
    downstream checks use formulas in n1, N and the base diameter instead
    of hard-coded counts.
    """
    spokes = {(0, 2), (1, 2), (2, 3), (3, 4), (4, 5)}
    loops = {(x, x) for x in range(6)}
    return BaseGraph(6, (2, 2, 1, 2, 1, 2), frozenset(spokes | loops),
                     name="fan", reconstructed=True)


BUILTIN_BASES = {"cherry": cherry, "fan": fan}


# ── words ────────────────────────────────────────────────────────────────


def code_index(code: Code, num_letters: int) -> int:
    idx = 0
    for digit in code:
        idx = idx * num_letters + digit
    return idx


def index_code(idx: int, num_letters: int, length: int) -> Code:
    out = [0] * length
    for pos in range(length - 1, -1, -1):
        idx, out[pos] = divmod(idx, num_letters)
    return tuple(out)


def code_label(code: Code) -> str:
    return "".join(_DIGITS[d] for d in code)


def word_type(base: BaseGraph, word: Sequence[int]) -> int:
    """1 or 2 when uniformly typed, 0 otherwise."""
    first = base.types[word[0]]
    for letter in word[1:]:
        if base.types[letter] != first:
            return 0
    return first


def hm_adjacent(base: BaseGraph, x: Code, y: Code) -> bool:
    """Edge rule applied directly to a pair of words (see module docstring)."""
    n = len(x)
    if len(y) != n:
        raise InputError("words must have equal length")
    k = 0
    while k < n and x[k] == y[k]:
        k += 1
    if k == n:
        return False
    tx = base.types[x[k]]
    ty = base.types[y[k]]
    if tx == ty:
        return False
    for i in range(k, n):
        if base.types[x[i]] != tx or base.types[y[i]] != ty:
            return False
        if not base.has_edge(x[i], y[i]):
            return False
    return True


def _typed_words(base: BaseGraph, t: int, n: int):
    return itertools.product(base.letters_of_type(t), repeat=n)


def _hm_edge_indices(base: BaseGraph, n: int) -> list[tuple[int, int]]:
    # Level n splits into N first-letter copies of level n-1 plus the
    # cross edges, whose endpoints are whole uniformly-typed words.
    if n == 1:
        return [(x, y) for x, y in sorted(base.edges) if x != y]
    prev = _hm_edge_indices(base, n - 1)
    big = base.num_letters ** (n - 1)
    out = []
    for a in range(base.num_letters):
        off = a * big
        for i, j in prev:
            out.append((off + i, off + j))
    for u in _typed_words(base, 1, n):
        for w in _typed_words(base, 2, n):
            if all(base.has_edge(ui, wi) for ui, wi in zip(u, w)):
                out.append((code_index(u, base.num_letters),
                            code_index(w, base.num_letters)))
    return out


def build_hm(base: BaseGraph, n: int, budget: int = 200_000) -> Graph:
    """Materialize the level-n graph; vertex labels are the words."""
    if n < 1:
        raise InputError(f"level must be >= 1, got {n}")
    size = base.num_letters ** n
    if size > budget:
        raise ResourceError(
            f"level {n} has {size} vertices, over the budget of {budget}")
    if base.num_letters > len(_DIGITS):
        raise InputError("at most 36 letters supported for word labels")
    labels = [code_label(index_code(i, base.num_letters, n)) for i in range(size)]
    return Graph(size, _hm_edge_indices(base, n), labels)


def hm_diameter_formula(base: BaseGraph, n: int) -> int:
    """Closed form 2(n-1) + diam(base) for the level-n diameter."""
    if n < 1:
        raise InputError(f"level must be >= 1, got {n}")
    return 2 * (n - 1) + base.diameter()


def hm_ell(base: BaseGraph, k: int) -> int:
    """Box-size ladder: one more than the level-k diameter."""
    if k < 1:
        raise InputError(f"ladder index must be >= 1, got {k}")
    return hm_diameter_formula(base, k) + 1


def hm_prefix_boxing(base: BaseGraph, n: int, k: int) -> BoxCover:
    """Partition level n into its length-(n-k) prefix classes.

    Each class induces a copy of level min(k, n) and therefore fits in an
    ell_k-box; for k >= n the whole graph is the single box.
    """
    if n < 1 or k < 1:
        raise InputError("need n >= 1 and k >= 1")
    kk = min(k, n)
    block = base.num_letters ** kk
    count = base.num_letters ** (n - kk)
    boxes = tuple(tuple(range(j * block, (j + 1) * block)) for j in range(count))
    return BoxCover(hm_ell(base, k), MetricMode.SUBGRAPH, boxes,
                    METHOD_CONSTRUCTIVE, optimal=False,
                    certificate="prefix classes")


def _lowest_of_type(base: BaseGraph, t: int) -> int:
    for x in range(base.num_letters):
        if base.types[x] == t:
            return x
    raise InputError(f"no letter of type {t}")


def _alternating_tail(base: BaseGraph, start: int, length: int) -> list[int]:
    tail = [start]
    while len(tail) < length:
        tail.append(_lowest_of_type(base, 3 - base.types[tail[-1]]))
    return tail


def hm_witness_codes(base: BaseGraph, n: int, k: int) -> list[Code]:
    """One witness per (free prefix, starting letter): an arbitrary prefix of
    length n-k-n1 followed by a type-alternating tail.  Needs n-k >= n1."""
    if k < 1:
        raise InputError(f"ladder index must be >= 1, got {k}")
    n1 = base.n1
    if n - k < n1:
        raise PreconditionError(
            f"witness construction needs n-k >= n1 ({n}-{k} < {n1})")
    free = n - k - n1
    tails = {x: _alternating_tail(base, x, n1 + k) for x in range(base.num_letters)}
    codes = []
    for prefix in itertools.product(range(base.num_letters), repeat=free):
        for x in range(base.num_letters):
            codes.append(tuple(prefix) + tuple(tails[x]))
    return codes


def hm_witness_set(base: BaseGraph, n: int, k: int,
                   graph: Optional[Graph] = None) -> WitnessSet:
    """BFS-certified witness set of size N^(n-k+1-n1) for box size ell_k."""
    codes = hm_witness_codes(base, n, k)
    if graph is None:
        graph = build_hm(base, n)
    if graph.num_vertices != base.num_letters ** n:
        raise InputError("graph does not match the requested level")
    indices = [code_index(c, base.num_letters) for c in codes]
    return verify_witness_set(graph, indices, hm_ell(base, k))


# ── explicit short paths ─────────────────────────────────────────────────


def _self_map(base: BaseGraph) -> list[int]:
    p = []
    adj = base._nonloop_adjacency()
    for x in range(base.num_letters):
        if not adj[x]:
            raise InputError(f"letter {x} has no cross-type neighbour")
        p.append(adj[x][0])
    return p


def _base_shortest_path(base: BaseGraph, a: int, b: int) -> list[int]:
    if a == b:
        return [a]
    adj = base._nonloop_adjacency()
    parent = {a: a}
    queue = deque([a])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if w not in parent:
                parent[w] = u
                if w == b:
                    path = [b]
                    while path[-1] != a:
                        path.append(parent[path[-1]])
                    return path[::-1]
                queue.append(w)
    raise DomainError(f"letters {a} and {b} are not connected in the base")


def _postfix_blocks(base: BaseGraph, word: Code, k: int) -> list[int]:
    """Start positions of the maximal same-type runs of word[k:]."""
    starts = [k]
    for i in range(k + 1, len(word)):
        if base.types[word[i]] != base.types[word[i - 1]]:
            starts.append(i)
    return starts


def _collapse_blocks(base: BaseGraph, word: Code, k: int,
                     p: list[int]) -> list[Code]:
    """Sequence of words that folds the postfix into a single typed run.

    Each step rewrites the suffix from the start of the last surviving
    block through the self-map p; the rewritten suffix merges with the
    block before it, so after r-1 steps the whole postfix is one run.
    """
    starts = _postfix_blocks(base, word, k)
    words = [tuple(word)]
    cur = list(word)
    for cut in reversed(starts[1:]):
        cur = cur[:cut] + [p[c] for c in cur[cut:]]
        words.append(tuple(cur))
    return words


def _dedupe_walk(words: list[Code]) -> list[Code]:
    out: list[Code] = []
    pos: dict[Code, int] = {}
    for w in words:
        if w in pos:
            del out[pos[w] + 1:]
            pos = {x: i for i, x in enumerate(out)}
        else:
            pos[w] = len(out)
            out.append(w)
    return out


def hm_construct_path(base: BaseGraph, x: Code, y: Code) -> list[Code]:
    """Explicit path between two words, at most r+q+diam(base)-2 edges long
    (r, q = numbers of same-type runs in the two postfixes).

    Both postfixes are first folded into single typed runs; the two typed
    words are then joined by synchronous per-coordinate walks in the base
    (coordinates that finish early bounce across an edge, which keeps every
    intermediate word uniformly typed).  Every consecutive pair is verified
    against the edge rule before returning.
    """
    x = tuple(x)
    y = tuple(y)
    n = len(x)
    if n == 0 or len(y) != n:
        raise InputError("words must be non-empty and of equal length")
    for w in (x, y):
        for letter in w:
            if not 0 <= letter < base.num_letters:
                raise InputError(f"letter {letter} out of range")
    if x == y:
        raise InputError("words must differ")
    k = 0
    while x[k] == y[k]:
        k += 1
    p = _self_map(base)
    from_x = _collapse_blocks(base, x, k, p)
    from_y = _collapse_blocks(base, y, k, p)
    a = from_x[-1]
    b = from_y[-1]
    words = list(from_x)
    if a != b:
        paths = {}
        for i in range(k, n):
            if (a[i], b[i]) not in paths:
                paths[(a[i], b[i])] = _base_shortest_path(base, a[i], b[i])
        steps = max(len(paths[(a[i], b[i])]) - 1 for i in range(k, n))
        walks = []
        for i in range(k, n):
            walk = list(paths[(a[i], b[i])])
            if (steps - (len(walk) - 1)) % 2 != 0:
                raise DomainError(
                    "postfixes do not share a type parity; is the base bipartite?")
            while len(walk) - 1 < steps:
                walk.append(p[walk[-1]])
                walk.append(walk[-2])
            walks.append(walk)
        for t in range(1, steps + 1):
            words.append(x[:k] + tuple(walk[t] for walk in walks))
    words.extend(reversed(from_y[:-1]))
    words = _dedupe_walk(words)
    r = len(_postfix_blocks(base, x, k))
    q = len(_postfix_blocks(base, y, k))
    bound = r + q + base.diameter() - 2
    if len(words) - 1 > bound:
        raise DomainError(
            f"constructed walk has {len(words) - 1} edges, over the bound {bound}")
    for u, w in zip(words, words[1:]):
        if not hm_adjacent(base, u, w):
            raise DomainError(f"constructed pair {u} -> {w} is not an edge")
    return words


def hm_extremal_pair(base: BaseGraph, n: int) -> tuple[Code, Code]:
    """Fully type-alternating words whose first letters realize the base
    diameter; their distance meets the level-n diameter exactly."""
    if n < 1:
        raise InputError(f"level must be >= 1, got {n}")
    diam = base.diameter()
    adj = base._nonloop_adjacency()
    pick = None
    for a in range(base.num_letters):
        dist = {a: 0}
        queue = deque([a])
        while queue:
            u = queue.popleft()
            for w in adj[u]:
                if w not in dist:
                    dist[w] = dist[u] + 1
                    queue.append(w)
        for b in range(base.num_letters):
            if dist.get(b) == diam:
                pick = (a, b)
                break
        if pick:
            break
    assert pick is not None
    a, b = pick
    return (tuple(_alternating_tail(base, a, n)),
            tuple(_alternating_tail(base, b, n)))


# ── base graph text format ───────────────────────────────────────────────
#
#   letters=<N>
#   type <x> <1|2>
#   edge <x> <y>


def format_base_graph(base: BaseGraph) -> str:
    lines = [f"letters={base.num_letters}"]
    if base.name:
        lines.append(f"name {base.name}")
    if base.reconstructed:
        lines.append("reconstructed true")
    for x in range(base.num_letters):
        lines.append(f"type {x} {base.types[x]}")
    for x, y in sorted(base.edges):
        lines.append(f"edge {x} {y}")
    return "\n".join(lines) + "\n"


def parse_base_graph(text: str) -> BaseGraph:
    num = None
    name = ""
    reconstructed = False
    types: dict[int, int] = {}
    edges = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("name "):
            name = line.split(None, 1)[1]
        elif line.startswith("reconstructed "):
            reconstructed = line.split(None, 1)[1] == "true"
        elif line.startswith("letters="):
            try:
                num = int(line.split("=", 1)[1])
            except ValueError:
                raise FormatError(f"line {lineno}: bad letter count {line!r}")
        elif line.startswith("type "):
            parts = line.split()
            if len(parts) != 3:
                raise FormatError(f"line {lineno}: expected 'type <x> <1|2>'")
            try:
                types[int(parts[1])] = int(parts[2])
            except ValueError:
                raise FormatError(f"line {lineno}: bad type line {raw!r}")
        elif line.startswith("edge "):
            parts = line.split()
            if len(parts) != 3:
                raise FormatError(f"line {lineno}: expected 'edge <x> <y>'")
            try:
                edges.add((int(parts[1]), int(parts[2])))
            except ValueError:
                raise FormatError(f"line {lineno}: bad edge line {raw!r}")
        else:
            raise FormatError(f"line {lineno}: unrecognized line {raw!r}")
    if num is None:
        raise FormatError("missing 'letters=<N>' line")
    missing = [x for x in range(num) if x not in types]
    if missing:
        raise FormatError(f"letter {missing[0]} has no type line")
    try:
        return BaseGraph(num, tuple(types[x] for x in range(num)),
                         frozenset(edges), name=name,
                         reconstructed=reconstructed)
    except InputError as exc:
        raise FormatError(str(exc))


def write_base_graph(base: BaseGraph, path) -> None:
    with open(path, "w") as fp:
        fp.write(format_base_graph(base))


def read_base_graph(path) -> BaseGraph:
    with open(path) as fp:
        return parse_base_graph(fp.read())
