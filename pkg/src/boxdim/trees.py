"""Rooted trees: spherically symmetric builds, random offspring sampling,
layered boxing with its count formula, and growth-rate helpers.

A degree profile f assigns every depth h >= 0 a branching number f(h) >= 1;
the spherically symmetric tree of height n gives every depth-h vertex
exactly f(h) children, so the generation sizes are L_0 = 1 and
L_{i+1} = L_i * f(i).  Layered boxing with parameter k >= 1 writes
n + 1 = a(k+1) + b and anchors one box at every vertex of the generations
n+1-i(k+1) (i = 1..a) — the anchor's subtree truncated k levels down —
plus one residual box of the top b generations when b > 0.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Optional, Sequence, Union

from .boxing import METHOD_CONSTRUCTIVE, BoxCover
from .errors import (FormatError, InputError, PreconditionError, RegimeError,
                     ResourceError)
from .graphs import Graph, MetricMode

PROFILE_KINDS = ("constant", "twothree", "blocks", "spikes", "explicit")


@dataclass(frozen=True)
class DegreeProfile:
    """Branching numbers, either rule-generated or an explicit finite list.

    Kinds: constant(d); twothree (2 at even depths, 3 at odd); blocks(a, b)
    — value a on the index blocks (s(s+1), (s+1)^2] and b elsewhere, so the
    run lengths of both values grow linearly; spikes(c) — floor(e^j) at
    index j! for the largest matching j, c everywhere else; explicit(values).
    Rule profiles are evaluated lazily from the index rules; explicit
    profiles only define f(0..len-1).
    """

    kind: str
    params: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.kind not in PROFILE_KINDS:
            raise InputError(f"unknown profile kind {self.kind!r}")
        object.__setattr__(self, "params", tuple(int(x) for x in self.params))
        want = {"constant": 1, "twothree": 0, "blocks": 2, "spikes": 1}
        if self.kind in want and len(self.params) != want[self.kind]:
            raise InputError(
                f"profile kind {self.kind!r} takes {want[self.kind]} parameter(s)")
        if self.kind == "explicit" and not self.params:
            raise InputError("explicit profile needs at least one value")
        if any(x < 1 for x in self.params):
            raise InputError("branching values must be >= 1")

    # factories
    @staticmethod
    def constant(d: int) -> "DegreeProfile":
        return DegreeProfile("constant", (d,))

    @staticmethod
    def twothree() -> "DegreeProfile":
        return DegreeProfile("twothree")

    @staticmethod
    def blocks(a: int, b: int) -> "DegreeProfile":
        return DegreeProfile("blocks", (a, b))

    @staticmethod
    def spikes(c: int) -> "DegreeProfile":
        return DegreeProfile("spikes", (c,))

    @staticmethod
    def explicit(values: Sequence[int]) -> "DegreeProfile":
        return DegreeProfile("explicit", tuple(values))

    @property
    def max_height(self) -> Union[int, float]:
        """Largest height this profile can drive (inf for rule profiles)."""
        return len(self.params) if self.kind == "explicit" else math.inf

    def branching(self, h: int) -> int:
        if h < 0:
            raise InputError(f"depth must be >= 0, got {h}")
        if self.kind == "constant":
            return self.params[0]
        if self.kind == "twothree":
            return 2 if h % 2 == 0 else 3
        if self.kind == "blocks":
            a, b = self.params
            if h == 0:
                return b
            s = math.isqrt(h - 1)
            return a if h > s * s + s else b
        if self.kind == "spikes":
            return _spike_value(h, self.params[0])
        values = self.params
        if h >= len(values):
            raise InputError(
                f"explicit profile only defines f(0..{len(values) - 1})")
        return values[h]

    def longest_run(self, target: int) -> Union[int, float]:
        """Length of the longest run of `target`; 0 if absent, inf when the
        rule produces arbitrarily long runs."""
        if self.kind == "constant":
            return math.inf if self.params[0] == target else 0
        if self.kind == "twothree":
            return 1 if target in (2, 3) else 0
        if self.kind == "blocks":
            a, b = self.params
            if target in (a, b):
                return math.inf  # block lengths grow linearly
            return 0
        if self.kind == "spikes":
            c = self.params[0]
            if target == c:
                return math.inf  # gaps between factorials grow
            return 1 if _is_spike_value(target) else 0
        return lmcs(self.params, target)


def _spike_value(i: int, c: int) -> int:
    best = None
    j, fact = 0, 1
    while fact <= i:
        if fact == i:
            best = j
        j += 1
        fact *= j
    return math.floor(math.exp(best)) if best is not None else c


def _is_spike_value(target: int) -> bool:
    j = 1
    while True:
        v = math.floor(math.exp(j))
        if v == target:
            return True
        if v > target:
            return False
        j += 1


def lmcs(sequence, target) -> Union[int, float]:
    """Longest run of `target` in a sequence (0 if absent); profiles are
    answered from their generating rule and may report inf."""
    if isinstance(sequence, DegreeProfile):
        return sequence.longest_run(target)
    best = run = 0
    for x in sequence:
        run = run + 1 if x == target else 0
        best = max(best, run)
    return best


def level_sizes(profile: DegreeProfile, n: int) -> list[int]:
    """Exact generation sizes L_0..L_n (arbitrary-precision)."""
    if n < 0:
        raise InputError(f"height must be >= 0, got {n}")
    if n > profile.max_height:
        raise InputError(
            f"profile only supports heights up to {profile.max_height}")
    out = [1]
    for h in range(n):
        out.append(out[-1] * profile.branching(h))
    return out


# ── rooted trees ─────────────────────────────────────────────────────────


@dataclass(frozen=True)
class RootedTree:
    """Tree with breadth-first vertex numbering (root = 0)."""

    graph: Graph
    root: int
    depth: tuple[int, ...]
    parent: tuple[Optional[int], ...]
    children: tuple[tuple[int, ...], ...]

    @property
    def height(self) -> int:
        return max(self.depth)

    @property
    def num_vertices(self) -> int:
        return self.graph.num_vertices

    def levels(self) -> list[list[int]]:
        out: list[list[int]] = [[] for _ in range(self.height + 1)]
        for v, d in enumerate(self.depth):
            out[d].append(v)
        return out

    def level_sizes(self) -> list[int]:
        counts = [0] * (self.height + 1)
        for d in self.depth:
            counts[d] += 1
        return counts


def _assemble_tree(parents: list[Optional[int]],
                   depths: list[int]) -> RootedTree:
    n = len(parents)
    children: list[list[int]] = [[] for _ in range(n)]
    edges = []
    for v, p in enumerate(parents):
        if p is not None:
            children[p].append(v)
            edges.append((p, v))
    return RootedTree(Graph(n, edges), 0, tuple(depths), tuple(parents),
                      tuple(tuple(c) for c in children))


def build_spherical(profile: DegreeProfile, n: int,
                    budget: int = 200_000) -> RootedTree:
    """Materialize the spherically symmetric tree of height n."""
    sizes = level_sizes(profile, n)
    total = sum(sizes)
    if total > budget:
        raise ResourceError(
            f"tree has {total} vertices, over the budget of {budget}; "
            "generation sizes alone are available via level_sizes")
    parents: list[Optional[int]] = [None]
    depths = [0]
    level = [0]
    nxt = 1
    for h in range(n):
        f = profile.branching(h)
        new_level = []
        for v in level:
            for _ in range(f):
                parents.append(v)
                depths.append(h + 1)
                new_level.append(nxt)
                nxt += 1
        level = new_level
    return _assemble_tree(parents, depths)


# ── offspring sampling ───────────────────────────────────────────────────


@dataclass(frozen=True)
class OffspringDistribution:
    """Finite-support offspring law: q[i] = chance of i children."""

    q: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "q", tuple(float(x) for x in self.q))
        if not self.q:
            raise InputError("offspring law needs at least one entry")
        if any(x < 0 for x in self.q):
            raise InputError("offspring probabilities must be >= 0")
        if abs(sum(self.q) - 1.0) > 1e-9:
            raise InputError(f"offspring probabilities sum to {sum(self.q)}, not 1")

    @property
    def mean(self) -> float:
        return sum(i * p for i, p in enumerate(self.q))

    def sample(self, rng: random.Random) -> int:
        u = rng.random()
        acc = 0.0
        for i, p in enumerate(self.q):
            acc += p
            if u < acc:
                return i
        return len(self.q) - 1  # guard against float round-off in the tail


def build_gw(q: OffspringDistribution, n: int, seed: Optional[int] = None,
             level_cap: int = 100_000) -> RootedTree:
    """Sample a random tree of height n, one offspring draw per vertex in
    breadth-first order (deterministic for a fixed seed).

    Only laws with q_0 = 0 are supported, so every vertex above the cut
    has at least one child and the tree reaches height n surely.
    """
    if n < 0:
        raise InputError(f"height must be >= 0, got {n}")
    if q.q[0] != 0.0:
        raise RegimeError(
            "offspring laws with q_0 > 0 (possible extinction) are not supported")
    rng = random.Random(seed)
    parents: list[Optional[int]] = [None]
    depths = [0]
    level = [0]
    nxt = 1
    for h in range(n):
        new_level = []
        for v in level:
            for _ in range(q.sample(rng)):
                parents.append(v)
                depths.append(h + 1)
                new_level.append(nxt)
                nxt += 1
        if len(new_level) > level_cap:
            raise ResourceError(
                f"generation {h + 1} has {len(new_level)} vertices, over the "
                f"cap of {level_cap}",
                partial=_gw_completed_levels(depths, h))
        level = new_level
    return _assemble_tree(parents, depths)


def _gw_completed_levels(depths: list[int], last_full: int) -> list[int]:
    counts = [0] * (last_full + 1)
    for d in depths:
        if d <= last_full:
            counts[d] += 1
    return counts


def sample_gw_levels(q: OffspringDistribution, n: int,
                     seed: Optional[int] = None,
                     level_cap: int = 10_000_000) -> list[int]:
    """Generation sizes of build_gw(q, n, seed) without building the graph.

    Draws the same offspring sequence as build_gw, so the two agree for a
    fixed seed.
    """
    if n < 0:
        raise InputError(f"height must be >= 0, got {n}")
    if q.q[0] != 0.0:
        raise RegimeError(
            "offspring laws with q_0 > 0 (possible extinction) are not supported")
    rng = random.Random(seed)
    sizes = [1]
    for h in range(n):
        z = sum(q.sample(rng) for _ in range(sizes[-1]))
        if z > level_cap:
            raise ResourceError(
                f"generation {h + 1} has {z} vertices, over the cap of {level_cap}",
                partial=list(sizes))
        sizes.append(z)
    return sizes


# ── layered boxing ───────────────────────────────────────────────────────


def layer_generations(n: int, k: int) -> tuple[list[int], int]:
    """Anchor generations n+1-i(k+1) (descending i) and the residual b."""
    if k < 1:
        raise InputError(f"k must be >= 1, got {k}")
    if n < 0:
        raise InputError(f"height must be >= 0, got {n}")
    a, b = divmod(n + 1, k + 1)
    return [n + 1 - i * (k + 1) for i in range(a, 0, -1)], b


def greedy_count(levels: Sequence[int], n: int, k: int) -> int:
    """Box count of the layered cover, straight from the generation sizes."""
    if n >= len(levels):
        raise InputError(f"need generation sizes up to L_{n}")
    gens, b = layer_generations(n, k)
    return sum(levels[g] for g in gens) + (1 if b > 0 else 0)


def greedy_tree_boxing(tree: RootedTree, k: int) -> BoxCover:
    """Layered cover of the tree by (2k+1)-boxes (see module docstring).

    Each box is an anchor's subtree truncated k levels down, so it is
    connected with diameter at most 2k; the residual top box spans the
    first b generations.  Requires every vertex above the final generation
    to have a child, so anchors tile the depth range exactly.
    """
    n = tree.height
    for v in range(tree.num_vertices):
        if tree.depth[v] < n and not tree.children[v]:
            raise PreconditionError(
                f"vertex {v} at depth {tree.depth[v]} < height {n} has no children")
    gens, b = layer_generations(n, k)
    gen_set = set(gens)
    boxes = []
    root_box = []
    anchor_box: dict[int, int] = {}
    for v in range(tree.num_vertices):
        d = tree.depth[v]
        if d < b:
            root_box.append(v)
        elif d in gen_set:
            anchor_box[v] = len(boxes)
            boxes.append([v])
        else:
            anchor_box[v] = anchor_box[tree.parent[v]]  # type: ignore[index]
            boxes[anchor_box[v]].append(v)
    if b > 0:
        boxes.append(root_box)
    return BoxCover(2 * k + 1, MetricMode.SUBGRAPH,
                    tuple(tuple(box) for box in boxes),
                    METHOD_CONSTRUCTIVE, optimal=False,
                    certificate=f"layered cover, generations {gens}, residual {b}")


def tree_witnesses(tree: RootedTree, k: int) -> list[int]:
    """One bottom-generation descendant per generation-(n-k) vertex.

    First-child chains put each tip n-(n-k) = k levels below a distinct
    generation-(n-k) vertex, so two tips' paths meet strictly above that
    generation and the tips are pairwise at least 2k+2 apart.
    """
    n = tree.height
    if k < 1:
        raise InputError(f"k must be >= 1, got {k}")
    if k > n:
        return [tree.root]
    tips = []
    for v in range(tree.num_vertices):
        if tree.depth[v] != n - k:
            continue
        cur = v
        while tree.depth[cur] < n:
            if not tree.children[cur]:
                raise PreconditionError(
                    f"vertex {cur} at depth {tree.depth[cur]} has no children; "
                    "cannot chain down to the bottom generation")
            cur = tree.children[cur][0]
        tips.append(cur)
    return tips


def tree_box_bounds(levels: Sequence[int], n: int, k: int) -> tuple[int, int]:
    """Sandwich L_{n-k} <= N_B(2k+1) <= min(greedy count, sum_{i<=n-k} L_i).

    The lower bound counts the pairwise-far bottom descendants of the
    generation-(n-k) vertices; the second upper bound covers with the
    generation-(n-k) subtrees plus all strictly higher vertices as
    singletons.  k > n degenerates to (1, 1).
    """
    if k < 1:
        raise InputError(f"k must be >= 1, got {k}")
    if k > n:
        return (1, 1)
    if n >= len(levels):
        raise InputError(f"need generation sizes up to L_{n}")
    lower = levels[n - k]
    level_sum = sum(levels[: n - k + 1])
    return (lower, min(greedy_count(levels, n, k), level_sum))


def total_size(levels: Sequence[int]) -> int:
    return sum(levels)


def total_size_bound(profile: DegreeProfile, n: int) -> dict:
    """Check L_n <= sum L_i <= 2(K+1) L_n with K the longest 1-run of f.

    In any K+1 consecutive generations some branching is >= 2, so the
    sizes at least double every K+1 steps walking down; summing the
    geometric tail gives the bound.  Inapplicable (regime error) when the
    profile has unbounded 1-runs.
    """
    k_run = lmcs(profile, 1)
    if k_run == math.inf:
        raise RegimeError(
            "profile has unbounded runs of branching 1; the two-sided "
            "size bound does not apply")
    sizes = level_sizes(profile, n)
    sigma = sum(sizes)
    bound = 2 * (int(k_run) + 1) * sizes[n]
    return {
        "n": n,
        "K": int(k_run),
        "top_level": sizes[n],
        "total": sigma,
        "bound": bound,
        "holds": sizes[n] <= sigma <= bound,
        "ratio": sigma / sizes[n],
    }


def window_growth_averages(profile: DegreeProfile, k: int,
                           n_lo: int, n_hi: int) -> list[float]:
    """(1/k) * sum_{h=n-k}^{n-1} log f(h) for n = n_lo..n_hi."""
    if k < 1 or n_lo < k or n_hi < n_lo:
        raise InputError("need k >= 1 and k <= n_lo <= n_hi")
    logs = [math.log(profile.branching(h)) for h in range(n_hi)]
    acc = [0.0]
    for x in logs:
        acc.append(acc[-1] + x)
    return [(acc[n] - acc[n - k]) / k for n in range(n_lo, n_hi + 1)]


# ── martingale diagnostics ───────────────────────────────────────────────


def gw_martingale_diagnostics(level_samples: Sequence[Sequence[int]],
                              q: OffspringDistribution) -> dict:
    """Per-sample normalized generation sizes W_i = Z_i / mu^i and the
    discounted sums D_n = sum_i W_i mu^(i-n).

    Reports the spread of the final W across samples (its mean should sit
    within Monte Carlo error of 1) and how the discounted sums settle
    (successive differences shrinking).
    """
    mu = q.mean
    if mu <= 1.0:
        raise RegimeError(f"need a mean offspring count > 1, got {mu}")
    if not level_samples:
        raise InputError("need at least one sample")
    n = len(level_samples[0]) - 1
    w_final = []
    d_final = []
    diff_sums = [0.0] * n
    for sizes in level_samples:
        if len(sizes) != n + 1:
            raise InputError("all samples must share one height")
        w_prev = None
        disc = 0.0
        for i, z in enumerate(sizes):
            w = z / mu ** i
            new_disc = disc / mu + w
            if i > 0:
                diff_sums[i - 1] += abs(new_disc - disc)
            disc = new_disc
            w_prev = w
        w_final.append(w_prev)
        d_final.append(disc)
    m = len(level_samples)
    w_mean = sum(w_final) / m
    var = (sum((w - w_mean) ** 2 for w in w_final) / (m - 1)) if m > 1 else 0.0
    w_se = math.sqrt(var / m) if m > 1 else float("inf")
    diff_means = [s / m for s in diff_sums]
    half = max(1, n // 2)
    return {
        "mu": mu,
        "num_samples": m,
        "height": n,
        "w_final": w_final,
        "w_mean": w_mean,
        "w_sd": math.sqrt(var),
        "w_se": w_se,
        "w_within_3se": abs(w_mean - 1.0) <= 3 * w_se,
        "discounted_final_mean": sum(d_final) / m,
        "discounted_diff_means": diff_means,
        "discounted_stabilizes": n < 2 or diff_means[-1] <= diff_means[half - 1],
    }


# ── file formats ─────────────────────────────────────────────────────────
#
#   Profile: either one `rule <kind> [params]` line or `f <h> <value>`
#   lines covering h = 0..H.  Offspring: `q <i> <prob>` lines.


def format_profile(profile: DegreeProfile) -> str:
    if profile.kind == "explicit":
        lines = [f"f {h} {v}" for h, v in enumerate(profile.params)]
    else:
        lines = ["rule " + " ".join([profile.kind] +
                                    [str(x) for x in profile.params])]
    return "\n".join(lines) + "\n"


def parse_profile(text: str) -> DegreeProfile:
    rule: Optional[DegreeProfile] = None
    values: dict[int, int] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] == "rule":
            if rule is not None:
                raise FormatError(f"line {lineno}: second rule line")
            try:
                rule = DegreeProfile(parts[1], tuple(int(x) for x in parts[2:]))
            except (IndexError, ValueError, InputError) as exc:
                raise FormatError(f"line {lineno}: bad rule: {exc}")
        elif parts[0] == "f":
            if len(parts) != 3:
                raise FormatError(f"line {lineno}: expected 'f <h> <value>'")
            try:
                h, v = int(parts[1]), int(parts[2])
            except ValueError:
                raise FormatError(f"line {lineno}: bad f line {raw!r}")
            if h in values:
                raise FormatError(f"line {lineno}: duplicate entry for depth {h}")
            values[h] = v
        else:
            raise FormatError(f"line {lineno}: unrecognized line {raw!r}")
    if rule is not None and values:
        raise FormatError("profile mixes a rule line with explicit f lines")
    if rule is not None:
        return rule
    if not values:
        raise FormatError("empty profile")
    missing = [h for h in range(len(values)) if h not in values]
    if missing:
        raise FormatError(f"profile has no entry for depth {missing[0]}")
    try:
        return DegreeProfile.explicit(tuple(values[h] for h in range(len(values))))
    except InputError as exc:
        raise FormatError(str(exc))


def write_profile(profile: DegreeProfile, path) -> None:
    with open(path, "w") as fp:
        fp.write(format_profile(profile))


def read_profile(path) -> DegreeProfile:
    with open(path) as fp:
        return parse_profile(fp.read())


def format_offspring(q: OffspringDistribution) -> str:
    return "".join(f"q {i} {p!r}\n" for i, p in enumerate(q.q))


def parse_offspring(text: str) -> OffspringDistribution:
    entries: dict[int, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if parts[0] != "q" or len(parts) != 3:
            raise FormatError(f"line {lineno}: expected 'q <i> <prob>'")
        try:
            i, p = int(parts[1]), float(parts[2])
        except ValueError:
            raise FormatError(f"line {lineno}: bad entry {raw!r}")
        if i < 0:
            raise FormatError(f"line {lineno}: negative index")
        if i in entries:
            raise FormatError(f"line {lineno}: duplicate entry for {i}")
        entries[i] = p
    if not entries:
        raise FormatError("empty offspring file")
    top = max(entries)
    try:
        return OffspringDistribution(
            tuple(entries.get(i, 0.0) for i in range(top + 1)))
    except InputError as exc:
        raise FormatError(str(exc))


def write_offspring(q: OffspringDistribution, path) -> None:
    with open(path, "w") as fp:
        fp.write(format_offspring(q))


def read_offspring(path) -> OffspringDistribution:
    with open(path) as fp:
        return parse_offspring(fp.read())
