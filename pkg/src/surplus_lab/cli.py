"""Command-line surface: sampling, enumeration, exploration, verification.

Exit codes: 0 success, 1 usage error, 2 verification failure, 3 I/O error.
Every run writes ``manifest.json`` into the output directory; rerunning with
the same seed reproduces byte-identical CSV/JSON outputs.  The environment
variable ``SURPLUS_LAB_THREADS`` caps the worker threads used when several
verification suites run in one invocation.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__, checks, estimators, persistence
from .lattice_paths import PlaneTree, tree_of_contour
from .maps import AdmissibleCorners, bf_explore, df_explore, insert_edges
from .samplers import (
    DegenerateEnsembleError,
    RngStream,
    sample_surplus_graph,
    sample_uniform_excursion,
    sample_uniform_map,
    sample_unicellular_decoration,
    enumerate_maps,
    enumerate_surplus_graphs,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VERIFY = 2
EXIT_IO = 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); route to exit code 1
        raise UsageError(message)


def max_threads() -> int:
    raw = os.environ.get("SURPLUS_LAB_THREADS", "1")
    try:
        value = int(raw)
    except ValueError:
        raise UsageError(f"SURPLUS_LAB_THREADS={raw!r} is not an integer")
    return max(1, value)


def build_parser() -> _Parser:
    p = _Parser(prog="surplus-lab", description=__doc__)
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("sample", help="draw objects and write them to --out")
    sp.add_argument("kind", choices=["tree", "excursion", "map", "graph", "crum"])
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--s", type=int, default=0)
    sp.add_argument("--g", type=int, default=1)
    sp.add_argument("--reps", type=int, default=1)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--out", type=Path, default=Path("out"))

    ep = sub.add_parser("enumerate", help="exhaustively list a small family")
    ep.add_argument("--family", choices=["f", "m", "h", "um"], required=True)
    ep.add_argument("--n", type=int, required=True)
    ep.add_argument("--s", type=int, default=0)
    ep.add_argument("--g", type=int, default=1)
    ep.add_argument("--out", type=Path, default=Path("out"))

    xp = sub.add_parser("explore", help="spanning-tree exploration of a stored map")
    xp.add_argument("--mode", choices=["bf", "df"], required=True)
    xp.add_argument("--in", dest="infile", type=Path, required=True)
    xp.add_argument("--out", type=Path, default=Path("out"))

    ip = sub.add_parser("invert", help="rebuild a map from a tree and corner decoration")
    ip.add_argument("--tree", required=True, help="parenthesized contour word")
    ip.add_argument("--corners", required=True, help="comma-separated corner indices")
    ip.add_argument("--tags", default="", help="comma-separated tags (default: canonical)")
    ip.add_argument("--mode", choices=["bf", "df"], default="bf")
    ip.add_argument("--out", type=Path, default=Path("out"))

    vp = sub.add_parser("verify", help="run an identity suite; exit 2 on failure")
    vp.add_argument("--suite", required=True,
                    choices=["bijection", "counts", "w1", "psi", "vervaat", "sg",
                             "dichotomy", "decoration", "radius", "lemma3", "jeulin"])
    vp.add_argument("--n", type=int, default=0)
    vp.add_argument("--s", type=int, default=0)
    vp.add_argument("--reps", type=int, default=0)
    vp.add_argument("--seed", type=int, default=0)
    vp.add_argument("--threshold", type=float, default=0.0,
                    help="statistic threshold for the statistical suites (default per suite)")
    vp.add_argument("--out", type=Path, default=Path("out"))

    tp = sub.add_parser("estimate", help="Monte Carlo laws for radius/two-point/profile")
    tp.add_argument("--target", choices=["radius", "two-point", "profile"], required=True)
    tp.add_argument("--model", choices=["h", "um"], default="h")
    tp.add_argument("--n", type=int, required=True)
    tp.add_argument("--s", type=int, default=1)
    tp.add_argument("--g", type=int, default=1)
    tp.add_argument("--reps", type=int, default=1000)
    tp.add_argument("--seed", type=int, default=0)
    tp.add_argument("--out", type=Path, default=Path("out"))

    cp = sub.add_parser("counts", help="exact counts vs asymptotic predictions")
    cp.add_argument("--asymptotics", action="store_true")
    cp.add_argument("--out", type=Path, default=Path("out"))

    st = sub.add_parser("selftest", help="run the quick exact-identity suites")
    st.add_argument("--out", type=Path, default=Path("out"))
    return p


def _outdir(args) -> Path:
    out = args.out
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise IOError(f"cannot create output directory {out}: {exc}") from exc
    return out


def _finish(manifest: persistence.RunManifest, outdir: Path, *files: Path) -> None:
    for f in files:
        manifest.record_output(f)
    manifest.finished = persistence._now()
    manifest.save(outdir / "manifest.json")


# -- sample -----------------------------------------------------------------


def cmd_sample(args) -> int:
    outdir = _outdir(args)
    manifest = persistence.new_manifest(
        args.seed, "sample", argv=args.argv,
        parameters={"kind": args.kind, "n": args.n, "s": args.s,
                    "g": args.g, "reps": args.reps})
    rng = RngStream(args.seed)
    files = []
    if args.kind == "excursion":
        lines = [sample_uniform_excursion(args.n, rng.substream(r)).steps_string()
                 for r in range(args.reps)]
        path = outdir / "excursions.txt"
        path.write_text("\n".join(lines) + "\n")
        files.append(path)
    elif args.kind == "tree":
        lines = []
        for r in range(args.reps):
            exc = sample_uniform_excursion(args.n, rng.substream(r))
            lines.append(tree_of_contour(exc).to_parens())
        path = outdir / "trees.txt"
        path.write_text("\n".join(lines) + "\n")
        files.append(path)
    elif args.kind == "map":
        rows = []
        for r in range(args.reps):
            m, weight = sample_uniform_map(args.n, args.s, rng.substream(r))
            path = outdir / f"map_{r}.json"
            persistence.save_map(m, path)
            files.append(path)
            rows.append([r, weight])
        wpath = outdir / "map_weights.csv"
        persistence.write_csv(wpath, ["replicate", "weight"], rows)
        files.append(wpath)
    elif args.kind == "graph":
        rows = []
        for r in range(args.reps):
            graph, weight = sample_surplus_graph(args.n, args.s, rng.substream(r))
            rows.append([r, graph.root, json.dumps(sorted(graph.edges)).replace(",", ";"),
                         weight])
        path = outdir / "graphs.csv"
        persistence.write_csv(path, ["replicate", "root", "edges", "weight"], rows)
        files.append(path)
    else:  # crum
        rows = []
        for r in range(args.reps):
            gen = rng.substream(r).generator()
            exc = sample_uniform_excursion(args.n, gen)
            try:
                pairing, heights, corners = sample_unicellular_decoration(exc, args.g, gen)
            except DegenerateEnsembleError:
                rows.append([r, "degenerate", "", ""])
                continue
            from .maps import unicellular_glue

            m, unicellular = unicellular_glue(tree_of_contour(exc), pairing, corners)
            if not unicellular:
                raise AssertionError("glued sample is not unicellular")
            path = outdir / f"crum_{r}.json"
            persistence.save_map(m, path)
            files.append(path)
            rows.append([r, str(pairing), ";".join(map(str, corners)),
                         ";".join(map(str, heights))])
        cpath = outdir / "crum_decorations.csv"
        persistence.write_csv(cpath, ["replicate", "pairing", "corners", "heights"], rows)
        files.append(cpath)
    _finish(manifest, outdir, *files)
    print(f"wrote {len(files)} file(s) to {outdir}")
    return EXIT_OK


# -- enumerate ---------------------------------------------------------------


def cmd_enumerate(args) -> int:
    from .lattice_paths import enumerate_excursions

    outdir = _outdir(args)
    manifest = persistence.new_manifest(
        0, "enumerate", argv=args.argv,
        parameters={"family": args.family, "n": args.n, "s": args.s, "g": args.g})
    if args.family == "f":
        items = [f.steps_string() for f in enumerate_excursions(args.n)]
    elif args.family == "m":
        items = [json.dumps(m.to_json_dict(), sort_keys=True)
                 for m in enumerate_maps(args.n, args.s)]
    elif args.family == "h":
        items = [f"root={g.root} edges={sorted(g.edges)}"
                 for g in enumerate_surplus_graphs(args.n, args.s)]
    else:
        items = []
        for m in enumerate_maps(args.n, 2 * args.g):
            if m.is_unicellular():
                items.append(json.dumps(m.to_json_dict(), sort_keys=True))
    path = outdir / f"family_{args.family}.txt"
    path.write_text("\n".join(items) + ("\n" if items else ""))
    _finish(manifest, outdir, path)
    print(f"count {len(items)}")
    for item in items[:20]:
        print(item)
    if len(items) > 20:
        print(f"... ({len(items) - 20} more in {path})")
    return EXIT_OK


# -- explore / invert -----------------------------------------------------------


def cmd_explore(args) -> int:
    outdir = _outdir(args)
    manifest = persistence.new_manifest(
        0, "explore", argv=args.argv,
        parameters={"mode": args.mode, "in": str(args.infile)})
    m = persistence.load_map(args.infile)
    tree, xi = bf_explore(m) if args.mode == "bf" else df_explore(m)
    result = {
        "mode": args.mode,
        "tree": tree.to_parens(),
        "indices": list(xi.indices),
        "tags": list(xi.tags),
    }
    path = outdir / "exploration.json"
    path.write_text(json.dumps(result, indent=2, sort_keys=True) + "\n")
    _finish(manifest, outdir, path)
    print(json.dumps(result))
    return EXIT_OK


def cmd_invert(args) -> int:
    outdir = _outdir(args)
    manifest = persistence.new_manifest(
        0, "invert", argv=args.argv,
        parameters={"tree": args.tree, "corners": args.corners,
                    "tags": args.tags, "mode": args.mode})
    tree = PlaneTree.from_parens(args.tree)
    indices = tuple(int(x) for x in args.corners.split(",") if x)
    if args.tags:
        tags = tuple(int(x) for x in args.tags.split(",") if x)
    else:
        tags = tuple(1 for _ in indices)
    xi = AdmissibleCorners(args.mode, indices, tags)
    m = insert_edges(tree, xi)
    path = outdir / "map.json"
    persistence.save_map(m, path)
    _finish(manifest, outdir, path)
    print(f"map with {m.num_edges} edges, genus {m.genus()} -> {path}")
    return EXIT_OK


# -- verify -----------------------------------------------------------------------


def _statistical_suite(args):
    """The two seeded Monte Carlo suites, as (lines, passed, rows)."""
    seed = args.seed or 7
    if args.suite == "jeulin":
        n = args.n or 2000
        reps = args.reps or 10_000
        res = estimators.jeulin_check(n, reps, RngStream(seed))
        threshold = args.threshold or 0.05
        ok = res.ks <= threshold
        lines = [f"{'PASS' if ok else 'FAIL'} jeulin:ks n={n} reps={reps} "
                 f"ks={res.ks:.5f} threshold={threshold}"]
        rows = [["jeulin-ks", res.ks, threshold, int(ok)],
                ["jeulin-mean-sq", res.mean_sq, "", ""],
                ["jeulin-mean-area", res.mean_area, "", ""]]
        return lines, ok, rows
    # decoration-count gap decreasing in n, for both exploration orders
    n_list = (50, 100, 200, 400)
    s = args.s or 1
    reps = args.reps or 400
    ok = True
    rows = []
    lines = []
    for stream, mode in enumerate(("bf", "df")):
        ests = estimators.decoration_gap_estimates(n_list, s, reps,
                                                   RngStream(seed).substream(stream), mode)
        for prev, cur in zip(ests, ests[1:]):
            slack = 2.0 * (prev.se ** 2 + cur.se ** 2) ** 0.5
            step_ok = cur.mean <= prev.mean + slack
            ok = ok and step_ok
            lines.append(f"{'PASS' if step_ok else 'FAIL'} lemma3:{mode}-step "
                         f"n={prev.n}->{cur.n} {prev.mean:.6f}->{cur.mean:.6f} "
                         f"slack={slack:.6f}")
        for est in ests:
            rows.append([f"{mode}-gap-n{est.n}", est.mean, est.se, ""])
    return lines, ok, rows


def cmd_verify(args) -> int:
    outdir = _outdir(args)
    manifest = persistence.new_manifest(
        args.seed, "verify", argv=args.argv,
        parameters={"suite": args.suite, "n": args.n, "s": args.s, "reps": args.reps})
    exact = {
        "bijection": lambda: checks.bijection_suite(args.n or 5, args.s or 2),
        "counts": lambda: checks.count_suite(args.n or 10),
        "w1": lambda: checks.w1_suite(2, args.n or 6),
        "psi": lambda: checks.psi_suite(args.n or 5),
        "vervaat": lambda: checks.vervaat_suite(args.n or 6),
        "sg": lambda: checks.sg_suite(),
        "dichotomy": lambda: checks.gluing_dichotomy_suite(args.n or 5),
        "decoration": lambda: checks.decoration_count_suite(args.n or 5),
        "radius": lambda: checks.radius_invariance_suite(
            n_sample=args.n or 1000, reps=args.reps or 10_000,
            seed=args.seed or 20_240_501),
    }
    if args.suite in exact:
        res = exact[args.suite]()
        lines = res.lines()
        ok = res.passed
        rows = [[label, int(good), detail, ""] for label, good, detail in res.checks]
    else:
        lines, ok, rows = _statistical_suite(args)
    for line in lines:
        print(line)
    path = outdir / f"verify_{args.suite}.csv"
    persistence.write_csv(path, ["check", "value", "detail", "ok"], rows)
    _finish(manifest, outdir, path)
    return EXIT_OK if ok else EXIT_VERIFY


# -- estimate ---------------------------------------------------------------------


def cmd_estimate(args) -> int:
    outdir = _outdir(args)
    manifest = persistence.new_manifest(
        args.seed, "estimate", argv=args.argv,
        parameters={"target": args.target, "model": args.model, "n": args.n,
                    "s": args.s, "g": args.g, "reps": args.reps})
    rng = RngStream(args.seed)
    summary: dict = {"target": args.target, "model": args.model, "n": args.n,
                     "reps": args.reps, "seed": args.seed}
    files = []
    if args.model == "um":
        lines, rows, header = _estimate_um(args, rng, summary)
    elif args.target == "radius":
        laws = estimators.radius_laws(args.n, args.s, args.reps, rng)
        summary.update(ks_map_bf=laws.ks_map_bf, ks_bf_df=laws.ks_bf_df,
                       ks_map_df=laws.ks_map_df, ess=laws.ess)
        ens = laws.ensembles
        header = ["replicate", "map", "map_w", "bf", "bf_w", "df", "df_w"]
        rows = [[r,
                 ens["map"].columns["radius"][r], ens["map"].weights[r],
                 ens["bf"].columns["sup"][r], ens["bf"].weights[r],
                 ens["df"].columns["invheight"][r], ens["df"].weights[r]]
                for r in range(args.reps)]
        lines = [f"ks(map,bf)={laws.ks_map_bf:.5f}", f"ks(bf,df)={laws.ks_bf_df:.5f}",
                 f"ks(map,df)={laws.ks_map_df:.5f}"]
    elif args.target == "two-point":
        laws = estimators.two_point_law(args.n, args.s, args.reps, rng)
        summary.update(ks=laws.ks, ess=laws.ess)
        ens = laws.ensembles
        header = ["replicate", "map", "map_w", "excursion", "excursion_w"]
        rows = [[r,
                 ens["map"].columns["dist"][r], ens["map"].weights[r],
                 ens["excursion"].columns["height"][r], ens["excursion"].weights[r]]
                for r in range(args.reps)]
        lines = [f"ks(map,excursion)={laws.ks:.5f}"]
    else:
        laws = estimators.profile_laws(args.n, args.s, args.reps, rng)
        summary.update(sup_map_vs_tree=laws.sup_map_vs_tree, ess=laws.ess,
                       mass_map=laws.mass_map, mass_tree=laws.mass_tree)
        header = ["r", "mean_map", "mean_tree", "mean_localtime"]
        rows = [[float(laws.grid[k]), laws.mean_map[k], laws.mean_tree[k],
                 laws.mean_localtime[k]] for k in range(len(laws.grid))]
        lines = [f"sup|map-tree|={laws.sup_map_vs_tree:.5f}"]
    path = outdir / f"estimate_{args.target.replace('-', '_')}.csv"
    persistence.write_csv(path, header, rows)
    files.append(path)
    spath = outdir / "summary.json"
    spath.write_text(json.dumps(summary, indent=2, sort_keys=True, default=float) + "\n")
    files.append(spath)
    _finish(manifest, outdir, *files)
    for line in lines:
        print(line)
    return EXIT_OK


def _estimate_um(args, rng: RngStream, summary: dict):
    """Unicellular-model estimates: glued-map route against the contour route."""
    from math import sqrt

    from .samplers import tilted_ensemble

    n, g, reps = args.n, args.g, args.reps
    root = sqrt(2.0 * n)
    if args.target == "radius":
        map_ens = tilted_ensemble(n, g, "um", reps, rng.substream(0),
                                  {"val": lambda smp: max(smp.distances_from_root()) / root})
        exc_ens = tilted_ensemble(n, g, "um", reps, rng.substream(1),
                                  {"val": lambda smp: smp.exc.max_height() / root})
    elif args.target == "two-point":
        map_ens = tilted_ensemble(n, g, "um", reps, rng.substream(0),
                                  {"val": _um_two_point(n)})
        exc_ens = tilted_ensemble(n, g, "um", reps, rng.substream(1),
                                  {"val": lambda smp: smp.vals[int(smp.gen.random() * 2 * n)] / root})
    else:
        raise UsageError("profile estimation is available for --model h only")
    law_m = estimators.EmpiricalLaw.from_ensemble(map_ens, "val")
    law_e = estimators.EmpiricalLaw.from_ensemble(exc_ens, "val")
    ks = estimators.ks_distance(law_m, law_e)
    summary.update(ks=ks, ess={"map": map_ens.ess(), "excursion": exc_ens.ess()})
    header = ["replicate", "map", "map_w", "excursion", "excursion_w"]
    rows = [[r,
             map_ens.columns["val"][r], map_ens.weights[r],
             exc_ens.columns["val"][r], exc_ens.weights[r]]
            for r in range(reps)]
    return [f"ks(map,excursion)={ks:.5f}"], rows, header


def _um_two_point(n: int):
    from math import sqrt

    root = sqrt(2.0 * n)

    def fn(smp):
        x1 = int(smp.gen.integers(1, n + 1))
        x2 = int(smp.gen.integers(1, n + 1))
        return smp.graph_distance(x1, x2) / root

    return fn


# -- counts -----------------------------------------------------------------------


def cmd_counts(args) -> int:
    outdir = _outdir(args)
    manifest = persistence.new_manifest(
        0, "counts", argv=args.argv,
        parameters={"asymptotics": args.asymptotics})
    ratios, anchor = estimators.omega1_anchor()
    rows = []
    lines = [f"growth-constant anchor (extrapolated): {anchor:.6f}"]
    for n, ratio in ratios.items():
        rows.append(["m-s1-ratio", n, 1, ratio, anchor])
    if args.asymptotics:
        for n in range(2, 11):
            t = estimators.count_asymptotics("f", n, 0)
            rows.append(["f", n, 0, t.exact, t.prediction])
        for s in (1, 2):
            for n in range(2, 11):
                t = estimators.count_asymptotics("m", n, s)
                rows.append(["m", n, s, t.exact, t.prediction])
        for s in (0, 1):
            for n in range(3, 7):
                t = estimators.count_asymptotics("h", n, s)
                rows.append(["h", n, s, t.exact, t.prediction])
        for n in range(2, 6):
            t = estimators.count_asymptotics("umstar", n, 1)
            rows.append(["umstar", n, 1, t.exact, t.prediction])
    path = outdir / "counts.csv"
    persistence.write_csv(path, ["family", "n", "param", "exact", "prediction"],
                          [[r[0], r[1], r[2], "" if r[3] is None else r[3], r[4]]
                           for r in rows])
    _finish(manifest, outdir, path)
    for line in lines:
        print(line)
    print(f"wrote {path}")
    return EXIT_OK


# -- selftest --------------------------------------------------------------------


def cmd_selftest(args) -> int:
    outdir = _outdir(args)
    manifest = persistence.new_manifest(0, "selftest", argv=args.argv, parameters={})
    suites = [
        ("bijection", lambda: checks.bijection_suite(4, 2)),
        ("counts", lambda: checks.count_suite(8)),
        ("w1", lambda: checks.w1_suite(2, 5)),
        ("psi", lambda: checks.psi_suite(4)),
        ("vervaat", lambda: checks.vervaat_suite(5)),
        ("sg", lambda: checks.sg_suite()),
        ("dichotomy", lambda: checks.gluing_dichotomy_suite(4)),
        ("decoration", lambda: checks.decoration_count_suite(4)),
    ]
    with ThreadPoolExecutor(max_workers=min(max_threads(), len(suites))) as pool:
        futures = [(name, pool.submit(fn)) for name, fn in suites]
        results = [(name, fut.result()) for name, fut in futures]
    ok = True
    rows = []
    for name, res in results:
        for line in res.lines():
            print(line)
        for label, good, detail in res.checks:
            rows.append([label, int(good), detail, ""])
        ok = ok and res.passed
    path = outdir / "selftest.csv"
    persistence.write_csv(path, ["check", "ok", "detail", "note"], rows)
    _finish(manifest, outdir, path)
    print("selftest:", "PASS" if ok else "FAIL")
    return EXIT_OK if ok else EXIT_VERIFY


# -- dispatch --------------------------------------------------------------------


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        args.argv = list(argv) if argv is not None else list(sys.argv[1:])
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    handlers = {
        "sample": cmd_sample,
        "enumerate": cmd_enumerate,
        "explore": cmd_explore,
        "invert": cmd_invert,
        "verify": cmd_verify,
        "estimate": cmd_estimate,
        "counts": cmd_counts,
        "selftest": cmd_selftest,
    }
    try:
        return handlers[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, persistence.PersistenceError, json.JSONDecodeError) as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, DegenerateEnsembleError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
