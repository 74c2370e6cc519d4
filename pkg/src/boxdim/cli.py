"""Command-line front end: generate graphs, count boxes, fit decay rates.

Subcommands
-----------
generate   build a graph (hm / shm / spherical / gw) and write an edge list
           plus a manifest of counts and diameters
box        append box-count rows (exact / greedy / bounds / witness) to a
           delimited table
dim        fit a decay rate from a table and check configured tolerances
repro      run a named end-to-end scenario (or `all`) with figures

Every command echoes its configuration to `run.toml` in the output
directory (grammar: one `key = value` line per entry — integers and floats
bare, booleans `true`/`false`, strings double-quoted, lists in `[ ... ]`).
Identical configurations produce byte-identical outputs.

Exit codes: 0 success, 1 a configured check failed, 2 bad input or refusal.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys
from pathlib import Path
from typing import Optional

from . import boxing, dimension, graphs, hm, plotting, scenarios, shm, trees
from .dimension import BoxRow
from .errors import BoxdimError, InputError
from .graphs import MetricMode
from .scenarios import DEFAULT_SEED, derive_seed

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2

MAX_EXACT_VERTICES = 60


# ── shared plumbing ──────────────────────────────────────────────────────


def _prepare_out(args) -> Path:
    out = Path(args.out)
    os.makedirs(out, exist_ok=True)
    entries = {"command": args.command}
    if getattr(args, "model", None):
        entries["model"] = args.model
    for key in sorted(vars(args)):
        if key in ("command", "model", "func") or key in entries:
            continue
        value = getattr(args, key)
        if value is None:
            continue
        entries[key] = value
    scenarios.write_config(out, entries)
    return out


def _write_manifest(path: Path, pairs: list[tuple[str, object]]) -> None:
    with open(path, "w", newline="") as fp:
        writer = csv.writer(fp)
        writer.writerow(["key", "value"])
        writer.writerows(pairs)


def _maybe_diameter(graph: graphs.Graph, cap: int = 1500) -> Optional[int]:
    if graph.num_vertices > cap:
        return None
    return graphs.diameter(graph)


def _load_base(args) -> hm.BaseGraph:
    if getattr(args, "base_file", None):
        return hm.read_base_graph(args.base_file)
    return hm.BUILTIN_BASES[args.base]()


def _load_initial(args) -> graphs.Graph:
    if getattr(args, "initial_file", None):
        return graphs.read_edge_list(args.initial_file)[0]
    return shm.INITIAL_GRAPHS[args.initial]()


def _load_profile(args) -> trees.DegreeProfile:
    given = [x for x in (args.profile_file, args.rule, args.values) if x]
    if len(given) != 1:
        raise InputError(
            "give exactly one of --profile-file, --rule, --values")
    if args.profile_file:
        return trees.read_profile(args.profile_file)
    if args.rule:
        return trees.parse_profile("rule " + args.rule + "\n")
    values = [int(x) for x in args.values.replace(",", " ").split()]
    return trees.DegreeProfile.explicit(values)


def _parse_q(text: str) -> trees.OffspringDistribution:
    """Parse `i:prob` pairs, e.g. "0:0,1:0.5,2:0.5"."""
    probs: dict[int, float] = {}
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        try:
            key, _, val = item.partition(":")
            i = int(key)
            p = float(val)
        except ValueError:
            raise InputError(f"bad offspring entry {item!r}; want i:prob")
        if i < 0 or i in probs:
            raise InputError(f"bad or repeated offspring index {i}")
        probs[i] = p
    if not probs:
        raise InputError("empty offspring distribution")
    q = [0.0] * (max(probs) + 1)
    for i, p in probs.items():
        q[i] = p
    return trees.OffspringDistribution(tuple(q))


def _load_q(args) -> trees.OffspringDistribution:
    if getattr(args, "q_file", None):
        return trees.read_offspring(args.q_file)
    if getattr(args, "q", None):
        return _parse_q(args.q)
    raise InputError("give --q or --q-file")


# ── generate ─────────────────────────────────────────────────────────────


def _generate_hm(args, out: Path) -> int:
    base = _load_base(args)
    graph = hm.build_hm(base, args.n, budget=args.budget)
    graphs.write_edge_list(graph, out / "graph.txt")
    hm.write_base_graph(base, out / "base.txt")
    diam = _maybe_diameter(graph)
    pairs = [("model", "hm"), ("base", base.name), ("n", args.n),
             ("vertices", graph.num_vertices), ("edges", graph.num_edges),
             ("diameter_formula", hm.hm_diameter_formula(base, args.n))]
    if diam is not None:
        pairs.append(("diameter", diam))
    _write_manifest(out / "manifest.csv", pairs)
    print(f"wrote {out / 'graph.txt'}: {graph.num_vertices} vertices, "
          f"{graph.num_edges} edges")
    return EXIT_OK


def _generate_shm(args, out: Path) -> int:
    initial = _load_initial(args)
    run = shm.shm_evolve(initial, args.m, args.p, args.steps,
                         seed=derive_seed(args.seed, "generate-shm"),
                         budget=args.budget)
    graphs.write_edge_list(run.final, out / "graph.txt",
                           extras=shm.snapshot_extras(run))
    pairs: list[tuple[str, object]] = [("model", "shm"), ("m", args.m),
                                       ("p", args.p), ("steps", args.steps)]
    for t, snap in enumerate(run.snapshots):
        pairs.append((f"vertices_step_{t}", snap.num_vertices))
        pairs.append((f"edges_step_{t}", snap.num_edges))
    diam = _maybe_diameter(run.final)
    if diam is not None:
        pairs.append(("diameter", diam))
    _write_manifest(out / "manifest.csv", pairs)
    print(f"wrote {out / 'graph.txt'}: {run.final.num_vertices} vertices "
          f"after {args.steps} steps")
    return EXIT_OK


def _generate_spherical(args, out: Path) -> int:
    profile = _load_profile(args)
    tree = trees.build_spherical(profile, args.n, budget=args.budget)
    graphs.write_edge_list(tree.graph, out / "graph.txt")
    trees.write_profile(profile, out / "profile.txt")
    levels = tree.level_sizes()
    _write_manifest(out / "manifest.csv", [
        ("model", "spherical"), ("n", args.n),
        ("vertices", tree.num_vertices),
        ("edges", tree.graph.num_edges),
        ("height", tree.height),
        ("level_sizes", "-".join(map(str, levels)))])
    print(f"wrote {out / 'graph.txt'}: height-{tree.height} tree with "
          f"{tree.num_vertices} vertices")
    return EXIT_OK


def _generate_gw(args, out: Path) -> int:
    q = _load_q(args)
    tree = trees.build_gw(q, args.height,
                          seed=derive_seed(args.seed, "generate-gw"),
                          level_cap=args.level_cap)
    graphs.write_edge_list(tree.graph, out / "graph.txt")
    trees.write_offspring(q, out / "offspring.txt")
    levels = tree.level_sizes()
    _write_manifest(out / "manifest.csv", [
        ("model", "gw"), ("height", tree.height), ("seed", args.seed),
        ("vertices", tree.num_vertices), ("edges", tree.graph.num_edges),
        ("level_sizes", "-".join(map(str, levels)))])
    print(f"wrote {out / 'graph.txt'}: sampled tree with "
          f"{tree.num_vertices} vertices, height {tree.height}")
    return EXIT_OK


def cmd_generate(args) -> int:
    out = _prepare_out(args)
    handler = {"hm": _generate_hm, "shm": _generate_shm,
               "spherical": _generate_spherical, "gw": _generate_gw}
    return handler[args.model](args, out)


# ── box ──────────────────────────────────────────────────────────────────


def _resolve_ell_k(args, ell_of_k, k_of_ell) -> tuple[int, Optional[int]]:
    if (args.ell is None) == (args.k is None):
        raise InputError("give exactly one of --ell and --k")
    if args.ell is not None:
        return args.ell, (None if k_of_ell is None else k_of_ell(args.ell))
    if ell_of_k is None:
        raise InputError("--k only applies to model graphs; give --ell")
    return ell_of_k(args.k), args.k


def _hm_k_of_ell(base: hm.BaseGraph, ell: int) -> int:
    k2 = ell + 1 - base.diameter()
    if k2 < 2 or k2 % 2:
        raise InputError(
            f"ell={ell} is not 2(k-1)+diam+1 for any k >= 1 on this base")
    return k2 // 2


def _tree_k_of_ell(ell: int) -> int:
    if ell < 3 or ell % 2 == 0:
        raise InputError(f"ell={ell} is not 2k+1 for any k >= 1")
    return (ell - 1) // 2


def _shm_k_of_ell(diam0: int, ell: int) -> int:
    k2 = ell - diam0 - 1
    if k2 < 0 or k2 % 2:
        raise InputError(
            f"ell={ell} is not diam0+2k+1 for any k >= 0 (diam0={diam0})")
    return k2 // 2


def _box_rows_for_model(args) -> tuple[list[BoxRow], Optional[graphs.Graph],
                                       int]:
    """Rows for bounds/witness methods, plus the graph when one was built."""
    method = args.method
    if args.model == "hm":
        base = _load_base(args)
        n = _require_n(args)
        ell, k = _resolve_ell_k(args, lambda kk: hm.hm_ell(base, kk),
                                lambda e: _hm_k_of_ell(base, e))
        size = base.num_letters ** n
        if method == "bounds":
            if n - k < base.n1:
                raise InputError(
                    f"witness construction needs n-k >= {base.n1}")
            lower = base.num_letters ** (n - k + 1 - base.n1)
            upper = base.num_letters ** (n - min(k, n))
            rows = [BoxRow(ell, n, lower, boxing.METHOD_LOWER, size),
                    BoxRow(ell, n, upper, boxing.METHOD_UPPER, size)]
            return rows, None, ell
        graph = hm.build_hm(base, n, budget=args.budget)
        witness = hm.hm_witness_set(base, n, k, graph=graph)
        rows = [BoxRow(ell, n, len(witness), boxing.METHOD_LOWER, size)]
        return rows, graph, ell
    if args.model == "shm":
        initial = _load_initial(args)
        diam0 = graphs.diameter(initial)
        n = args.steps if args.steps is not None else _require_n(args)
        ell, k = _resolve_ell_k(args, lambda kk: shm.shm_ell(diam0, kk),
                                lambda e: _shm_k_of_ell(diam0, e))
        if args.p != 1.0:
            raise InputError(
                "bounds/witness counts apply to the p=1 regime only")
        v0, e0 = initial.num_vertices, initial.num_edges
        size = shm.shm_counts(v0, e0, args.m, n)[0]
        lower = shm.shm_witness_count(v0, e0, args.m, n, k, diam0)
        if method == "witness":
            return [BoxRow(ell, n, lower, boxing.METHOD_LOWER, size)], None, ell
        upper = shm.shm_center_count(v0, e0, args.m, n, k)
        return [BoxRow(ell, n, lower, boxing.METHOD_LOWER, size),
                BoxRow(ell, n, upper, boxing.METHOD_UPPER, size)], None, ell
    # spherical and gw trees share the level-size bound arithmetic
    if args.model == "spherical":
        profile = _load_profile(args)
        n = _require_n(args)
        levels = trees.level_sizes(profile, n)
    else:
        q = _load_q(args)
        n = args.height if args.height is not None else _require_n(args)
        levels = trees.sample_gw_levels(q, n,
                                        derive_seed(args.seed, "box-gw"))
    ell, k = _resolve_ell_k(args, lambda kk: 2 * kk + 1, _tree_k_of_ell)
    size = sum(levels[: n + 1])
    lower, upper = trees.tree_box_bounds(levels[: n + 1], n, k)
    if method == "witness":
        return [BoxRow(ell, n, lower, boxing.METHOD_LOWER, size)], None, ell
    return [BoxRow(ell, n, lower, boxing.METHOD_LOWER, size),
            BoxRow(ell, n, upper, boxing.METHOD_UPPER, size)], None, ell


def _require_n(args) -> int:
    if args.n is None:
        raise InputError("this model/method needs --n")
    return args.n


def _build_model_graph(args) -> tuple[graphs.Graph, int]:
    """Concrete graph for exact/greedy methods, plus its level label."""
    if args.model == "hm":
        base = _load_base(args)
        n = _require_n(args)
        return hm.build_hm(base, n, budget=args.budget), n
    if args.model == "shm":
        if args.steps is None:
            raise InputError("shm needs --steps")
        run = shm.shm_evolve(_load_initial(args), args.m, args.p, args.steps,
                             seed=derive_seed(args.seed, "box-shm"),
                             budget=args.budget)
        return run.final, args.steps
    if args.model == "spherical":
        profile = _load_profile(args)
        n = _require_n(args)
        return trees.build_spherical(profile, n, budget=args.budget).graph, n
    q = _load_q(args)
    if args.height is None:
        raise InputError("gw needs --height")
    tree = trees.build_gw(q, args.height,
                          seed=derive_seed(args.seed, "box-gw"))
    return tree.graph, args.height


def cmd_box(args) -> int:
    if (args.graph is None) == (args.model is None):
        raise InputError("give exactly one of --graph and --model")
    out = _prepare_out(args)
    table = Path(args.table) if args.table else out / "table.csv"
    mode = MetricMode.parse(args.mode)
    rows: list[BoxRow]
    cover = None

    if args.model and args.method in ("bounds", "witness"):
        rows, graph, ell = _box_rows_for_model(args)
    else:
        if args.model:
            graph, n = _build_model_graph(args)
        else:
            if args.method == "bounds":
                raise InputError(
                    "--method bounds needs a model spec; a bare edge list "
                    "carries no level structure")
            graph, _extras = graphs.read_edge_list(args.graph)
            n = args.n if args.n is not None else 0
        ell, _k = _resolve_ell_k(args, None, None) if args.model is None \
            else (_model_ell(args), None)
        if args.method == "witness":
            clique = boxing.greedy_witness_clique(
                graph, ell, graphs.distance_matrix(graph))
            witness = boxing.verify_witness_set(graph, clique, ell)
            rows = [BoxRow(ell, n, len(witness), boxing.METHOD_LOWER,
                           graph.num_vertices)]
        elif args.method == "greedy":
            cover = boxing.greedy_boxing(graph, ell, mode, seed=args.seed)
            rows = [BoxRow(ell, n, cover.num_boxes, boxing.METHOD_GREEDY,
                           graph.num_vertices)]
        else:
            if graph.num_vertices > args.max_exact:
                print(f"error: exact method refused: graph has "
                      f"{graph.num_vertices} vertices, over the limit of "
                      f"{args.max_exact} (raise --max-exact to insist)",
                      file=sys.stderr)
                return EXIT_USAGE
            cover = boxing.min_boxes_exact(graph, ell, mode,
                                           budget=args.budget)
            method = boxing.METHOD_EXACT if cover.optimal \
                else boxing.METHOD_UPPER
            if not cover.optimal:
                print(f"note: {cover.certificate}; recording the best cover "
                      f"found as an upper bound")
            rows = [BoxRow(ell, n, cover.num_boxes, method,
                           graph.num_vertices)]

    existing = dimension.load_box_table(table) if table.exists() else []
    dimension.validate_box_table(existing + rows)
    dimension.save_box_table(rows, table, append=True)
    if cover is not None:
        cover_path = out / f"cover_ell{ell}.txt"
        boxing.write_cover(cover, cover_path)
        print(f"wrote {cover_path}")
    for row in rows:
        print(f"{row.method}: ell={row.ell} n={row.n} count={row.count} "
              f"size={row.size} -> {table}")
    return EXIT_OK


def _model_ell(args) -> int:
    """ell for exact/greedy on a model graph (accepts --ell or --k)."""
    if args.model == "hm":
        base = _load_base(args)
        ell, _ = _resolve_ell_k(args, lambda kk: hm.hm_ell(base, kk),
                                lambda e: _hm_k_of_ell(base, e))
    elif args.model == "shm":
        diam0 = graphs.diameter(_load_initial(args))
        ell, _ = _resolve_ell_k(args, lambda kk: shm.shm_ell(diam0, kk),
                                lambda e: _shm_k_of_ell(diam0, e))
    else:
        ell, _ = _resolve_ell_k(args, lambda kk: 2 * kk + 1, _tree_k_of_ell)
    return ell


# ── dim ──────────────────────────────────────────────────────────────────


def cmd_dim(args) -> int:
    out = _prepare_out(args)
    rows = dimension.load_box_table(args.table)
    fit_fn = {"db": dimension.fit_dB, "tau": dimension.fit_tau,
              "cesaro": dimension.fit_tau_cesaro}[args.kind]
    fit = fit_fn(rows)
    dimension.save_fits([fit], out / "fits.csv")
    line = (f"{fit.kind}: slope {fit.slope:.6f}, intercept "
            f"{fit.intercept:.6f}, max residual {fit.max_residual:.6f}")
    if fit.bracket is not None:
        line += f", bracket [{fit.bracket[0]:.6f}, {fit.bracket[1]:.6f}]"
    print(line)
    if not args.no_plot:
        print(f"wrote {plotting.plot_fit(fit, out / 'fit.png')}")
    ok = True
    if args.expect is not None:
        hit = fit.within(args.expect, args.tol)
        ok &= hit
        print(f"[{'PASS' if hit else 'FAIL'}] slope within {args.tol} "
              f"of {args.expect}")
    if args.residual_max is not None:
        hit = fit.looks_linear(args.residual_max)
        ok &= hit
        print(f"[{'PASS' if hit else 'FAIL'}] max residual <= "
              f"{args.residual_max}")
    return EXIT_OK if ok else EXIT_CHECK_FAILED


# ── repro ────────────────────────────────────────────────────────────────


def cmd_repro(args) -> int:
    names = list(scenarios.ACCEPTANCE_ORDER) if args.scenario == "all" \
        else [args.scenario]
    all_passed = True
    for name in names:
        sub = Path(args.out) / name if args.scenario == "all" \
            else Path(args.out)
        report = scenarios.run_scenario(name, sub, args.seed)
        for line in report.lines():
            print(line)
        all_passed &= report.passed
    return EXIT_OK if all_passed else EXIT_CHECK_FAILED


# ── parser ───────────────────────────────────────────────────────────────


def _add_out(p, default="."):
    p.add_argument("--out", default=default,
                   help="output directory (default: %(default)s)")


def _add_model_flags(p):
    p.add_argument("--base", default="cherry",
                   choices=sorted(hm.BUILTIN_BASES),
                   help="built-in base graph for hm")
    p.add_argument("--base-file", help="base-graph file for hm")
    p.add_argument("--initial", default="triangle",
                   choices=sorted(shm.INITIAL_GRAPHS),
                   help="built-in initial graph for shm")
    p.add_argument("--initial-file", help="edge-list file for shm's start")
    p.add_argument("--m", type=int, default=1, help="leaves per unit degree")
    p.add_argument("--p", type=float, default=1.0,
                   help="probability of keeping an old edge")
    p.add_argument("--steps", type=int, help="shm growth steps")
    p.add_argument("--rule", help='profile rule, e.g. "constant 2"')
    p.add_argument("--values", help="explicit branching values, e.g. 2,3,1")
    p.add_argument("--profile-file", help="branching-profile file")
    p.add_argument("--q", help='offspring law, e.g. "0:0,1:0.5,2:0.5"')
    p.add_argument("--q-file", help="offspring-distribution file")
    p.add_argument("--height", type=int, help="gw tree height")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="boxdim",
        description="box-counting dimensions of hierarchical graphs, "
                    "growth models, and trees")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="build a graph and write files")
    gsub = gen.add_subparsers(dest="model", required=True)
    g_hm = gsub.add_parser("hm", help="hierarchical word graph")
    g_hm.add_argument("--base", default="cherry",
                      choices=sorted(hm.BUILTIN_BASES))
    g_hm.add_argument("--base-file")
    g_hm.add_argument("--n", type=int, required=True, help="word length")
    g_hm.add_argument("--budget", type=int, default=200_000)
    _add_out(g_hm)
    g_shm = gsub.add_parser("shm", help="random leaf-growth graph")
    g_shm.add_argument("--initial", default="triangle",
                       choices=sorted(shm.INITIAL_GRAPHS))
    g_shm.add_argument("--initial-file")
    g_shm.add_argument("--m", type=int, required=True)
    g_shm.add_argument("--p", type=float, required=True)
    g_shm.add_argument("--steps", type=int, required=True)
    g_shm.add_argument("--seed", type=int, default=DEFAULT_SEED)
    g_shm.add_argument("--budget", type=int, default=500_000)
    _add_out(g_shm)
    g_sph = gsub.add_parser("spherical", help="spherically symmetric tree")
    g_sph.add_argument("--rule")
    g_sph.add_argument("--values")
    g_sph.add_argument("--profile-file")
    g_sph.add_argument("--n", type=int, required=True, help="height")
    g_sph.add_argument("--budget", type=int, default=200_000)
    _add_out(g_sph)
    g_gw = gsub.add_parser("gw", help="random offspring tree")
    g_gw.add_argument("--q")
    g_gw.add_argument("--q-file")
    g_gw.add_argument("--height", type=int, required=True)
    g_gw.add_argument("--seed", type=int, default=DEFAULT_SEED)
    g_gw.add_argument("--level-cap", type=int, default=100_000)
    _add_out(g_gw)
    for g in (g_hm, g_shm, g_sph, g_gw):
        g.set_defaults(func=cmd_generate)

    box = sub.add_parser("box", help="append box counts to a table")
    box.add_argument("--graph", help="edge-list file to box")
    box.add_argument("--model", choices=["hm", "shm", "spherical", "gw"],
                     help="build the graph from a model instead")
    _add_model_flags(box)
    box.add_argument("--method", required=True,
                     choices=["exact", "greedy", "bounds", "witness"])
    box.add_argument("--ell", type=int, help="box size")
    box.add_argument("--k", type=int, help="model depth parameter")
    box.add_argument("--mode", default="subgraph",
                     choices=["global", "subgraph"],
                     help="metric inside boxes (default: %(default)s)")
    box.add_argument("--n", type=int, help="sequence label for the rows")
    box.add_argument("--table", help="table to append to "
                                     "(default: <out>/table.csv)")
    box.add_argument("--seed", type=int, default=DEFAULT_SEED)
    box.add_argument("--budget", type=int, default=500_000)
    box.add_argument("--max-exact", type=int, default=MAX_EXACT_VERTICES,
                     help="refuse exact solves above this many vertices")
    _add_out(box)
    box.set_defaults(func=cmd_box)

    dim = sub.add_parser("dim", help="fit a decay rate from a table")
    dim.add_argument("--table", required=True)
    dim.add_argument("--kind", required=True,
                     choices=["db", "tau", "cesaro"])
    dim.add_argument("--expect", type=float,
                     help="check the slope against this target")
    dim.add_argument("--tol", type=float, default=0.05)
    dim.add_argument("--residual-max", type=float,
                     help="check the fit's worst residual")
    dim.add_argument("--no-plot", action="store_true")
    _add_out(dim)
    dim.set_defaults(func=cmd_dim)

    rep = sub.add_parser("repro", help="run an end-to-end scenario")
    rep.add_argument("scenario",
                     choices=sorted(scenarios.SCENARIOS) + ["all"])
    rep.add_argument("--seed", type=int, default=DEFAULT_SEED)
    _add_out(rep)
    rep.set_defaults(func=cmd_repro)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except BoxdimError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
