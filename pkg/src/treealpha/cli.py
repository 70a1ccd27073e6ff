"""treealpha command line.

    treealpha generate  --kind unit-disks --n 50 --seed 1 --out inst.json
    treealpha decompose inst.json --out dec.json
    treealpha cover     inst.json --method fat --r 3 --out cover.json
    treealpha solve     inst.json --problem mwis --out sol.json
    treealpha ptas      inst.json --method fat-cover --r 3 --out sol.json --report rep.json
    treealpha verify    sol.json --instance inst.json
    treealpha bench     --suite ratio --max-n 18 --out-dir bench/

Exit codes: 0 success, 2 verification failure, 3 guard exceeded, 4 bad input.
"""
import argparse
import csv
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from fractions import Fraction
from pathlib import Path

from . import io
from .decomposition import (
    DecompositionError,
    check_cover,
    check_layering,
    cover_from_layering,
    heuristic_td,
    layered_independence_number,
    lift_td_to_power,
    td_independence_number,
    trivial_layering,
    validate_td,
)
from .fatcover import general_cover_fat
from .generators import GENERATOR_KINDS, generate_instance, random_weights
from .geometry import GeometryError, scale_collection
from .graph import GraphError, SubgraphFamily, WeightedGraph, intersection_graph
from .layered import layered_td, strip_bound, strip_td
from .oracles import AlphaCache, GuardExceeded, bruteforce_mwis, bruteforce_packing, pairwise_distance_ok
from .packing import distance_d_packing_exact, max_weight_independent_packing, mwis_on_td
from .ptas import (
    PtasError,
    ptas_distance_d,
    ptas_mwis_fat,
    ptas_mwis_shifting_geom,
    ptas_mwis_shifting_paths,
    ptas_packing_from_cover,
)

EXIT_OK = 0
EXIT_VERIFY = 2
EXIT_GUARD = 3
EXIT_INPUT = 4

PROBLEMS = ("mwis", "dissociation", "induced-matching", "distance")


class VerificationFailed(Exception):
    pass


# ---------------------------------------------------------------------------
# helpers


def _emit(doc, out):
    if out:
        io.write_json(out, doc)
    else:
        sys.stdout.write(io.dumps(doc))


def _info(msg, quiet_stdout):
    print(msg, file=sys.stderr if quiet_stdout else sys.stdout)


def _load_instance(path):
    return io.instance_from_dict(io.read_json(path))


def _weights(n, how, seed):
    if how == "unit":
        return tuple(Fraction(1) for _ in range(n))
    if how == "random":
        return random_weights(n, seed)
    raise ValueError(f"unknown weight scheme {how!r}")


def _family(g, problem, weights):
    if problem in ("mwis", "distance"):
        return SubgraphFamily.singletons(g.n, weights)
    if problem == "dissociation":
        return SubgraphFamily.edges_and_vertices(g)
    if problem == "induced-matching":
        return SubgraphFamily.all_edges(g)
    raise ValueError(f"unknown problem {problem!r}")


def _layered_context(coll, g):
    """Layered decomposition from the geometry when the kind has one, else an elimination decomposition."""
    try:
        td, lay, bound, tag = layered_td(coll)
    except GeometryError:
        td = heuristic_td(g)
        lay = trivial_layering(g)
        bound = td_independence_number(g, td)
        tag = "elimination-order"
    return td, lay, bound, tag


def _check_even(d):
    if d < 2 or d % 2:
        raise PtasError("distance d must be even and >= 2; odd d has no known scheme here (open question)")


# ---------------------------------------------------------------------------
# subcommands


def cmd_generate(args):
    spec = {"kind": args.kind, "n": args.n, "seed": args.seed}
    for key in ("window", "radius", "rmin", "rmax", "k", "width", "hmax", "l", "bends"):
        value = getattr(args, key)
        if value is not None:
            spec[key] = value
    coll = generate_instance(spec)
    _emit(io.instance_to_dict(coll), args.out)
    declared = {k: v for k, v in coll.params.items() if k in ("radius", "width", "l", "k", "c", "bends")}
    _info(f"generated {len(coll)} objects, kind={coll.kind}, declared={declared}", not args.out)
    return EXIT_OK


def cmd_decompose(args):
    coll = _load_instance(args.instance)
    g = intersection_graph(coll)
    cache = AlphaCache(g)
    if args.method == "strip":
        if args.l is None:
            raise ValueError("--l is required for the strip method")
        td = strip_td(coll, args.l)
        lay, bound, tag = None, strip_bound(coll, args.l), "strip"
        value, witness = td_independence_number(g, td, cache), None
    else:
        td, lay, bound, tag = _layered_context(coll, g)
        value, witness = layered_independence_number(g, td, lay, cache, witness=True)
    bad = validate_td(g, td) or (check_layering(g, lay) if lay is not None else None)
    if bad:
        raise VerificationFailed(f"construction produced an invalid decomposition: {bad}")
    prov = {"construction": tag, "declared_bound": bound, "verified_alpha": value, "n": g.n,
            "measure": "layered" if lay is not None else "bag"}
    if value > bound:
        raise VerificationFailed(f"independence {value} exceeds declared bound {bound}; witness (bag, layer, set) = {witness}")
    _emit(io.decomposition_to_dict(td, lay, prov), args.out)
    _info(f"{tag}: {len(td)} nodes, verified {prov['measure']} independence {value} <= {bound}", not args.out)
    return EXIT_OK


def cmd_cover(args):
    coll = _load_instance(args.instance)
    g = intersection_graph(coll)
    if args.method == "fat":
        scaled, _ = scale_collection(coll)
        if intersection_graph(scaled) != g:
            raise GeometryError("rescaling changed the intersection graph")
        c = args.c if args.c is not None else int(coll.params.get("c", 16))
        cover = general_cover_fat(scaled, c, args.r)
    else:
        td, lay, bound, _ = _layered_context(coll, g)
        cover = cover_from_layering(g, td, lay, args.r, bound)
    bad = check_cover(g, cover)
    if bad:
        raise VerificationFailed(str(bad))
    _emit(io.cover_to_dict(cover), args.out)
    mult = cover.multiplicity(g.n)
    worst = min((Fraction(m, len(cover)) for m in mult), default=Fraction(1))
    _info(f"cover with {len(cover)} elements, min coverage {worst} (beta {cover.beta}), bound {cover.bound}", not args.out)
    return EXIT_OK


def _exact_solution(coll, g, fam, problem, d, method):
    stats = {}
    if method == "brute":
        dist = d if problem == "distance" else 2
        chosen, value = bruteforce_packing(g, fam, dist)
        return chosen, value, stats
    td, lay, bound, tag = _layered_context(coll, g)
    stats["construction"] = tag
    if problem == "distance" and d > 2:
        ptd, _ = lift_td_to_power(g, td, lay, d // 2 - 1)
        chosen, value = distance_d_packing_exact(g, fam, ptd, d, stats)
    elif problem == "mwis":
        chosen, value = mwis_on_td(WeightedGraph(g, fam.weights), td, stats)
    else:
        chosen, value = max_weight_independent_packing(g, fam, td, stats)
    return chosen, value, stats


def cmd_solve(args):
    coll = _load_instance(args.instance)
    g = intersection_graph(coll)
    d = args.d if args.problem == "distance" else 2
    _check_even(d)
    weights = _weights(g.n, args.weights, args.seed)
    fam = _family(g, args.problem, weights)
    chosen, value, stats = _exact_solution(coll, g, fam, args.problem, d, args.method)
    stats.update({"problem": args.problem, "d": d, "method": args.method})
    cert = "independent" if args.problem == "mwis" else "packing"
    if cert == "independent":
        stats["weights"] = [str(w) for w in weights]
    else:
        stats["family"] = io.family_to_dict(fam)
    _emit(io.solution_to_dict(value, chosen, cert, stats), args.out)
    _info(f"{args.problem} optimum {value} with {len(chosen)} {'vertices' if cert == 'independent' else 'members'}",
          not args.out)
    return EXIT_OK


def run_ptas(coll, method, r, eps, d, problem, weights, instance_id=""):
    """Dispatch one approximation run; returns (chosen, value, report, family, graph)."""
    g = intersection_graph(coll)
    if method == "fat-cover":
        c = int(coll.params.get("c", 16))
        chosen, value, rep = ptas_mwis_fat(coll, c, weights, r, instance_id)
        return chosen, value, rep, SubgraphFamily.singletons(g.n, weights), g
    if method == "cover-packing":
        fam = _family(g, problem, weights)
        td, lay, bound, _ = _layered_context(coll, g)
        cover = cover_from_layering(g, td, lay, r, bound)
        chosen, value, rep = ptas_packing_from_cover(g, cover, fam, r, instance_id)
        return chosen, value, rep, fam, g
    if method == "distance":
        _check_even(d)
        fam = SubgraphFamily.singletons(g.n, weights)
        td, lay, bound, _ = _layered_context(coll, g)
        chosen, value, rep = ptas_distance_d(g, td, lay, bound, fam, d, r, instance_id)
        return chosen, value, rep, fam, g
    if method == "shifting":
        if coll.kind in ("grid-paths-v", "grid-paths-e"):
            ell = int(coll.params.get("l") or 1)
            chosen, value, rep = ptas_mwis_shifting_paths(coll, coll.kind[-1], ell, eps, weights, instance_id)
        else:
            chosen, value, rep = ptas_mwis_shifting_geom(coll, eps, weights, instance_id)
        return chosen, value, rep, SubgraphFamily.singletons(g.n, weights), g
    raise ValueError(f"unknown method {method!r}")


def cmd_ptas(args):
    coll = _load_instance(args.instance)
    n = len(coll)
    weights = _weights(n, args.weights, args.seed)
    problem = args.problem if args.method == "cover-packing" else "mwis"
    d = args.d if args.method == "distance" else 2
    chosen, value, rep, fam, g = run_ptas(coll, args.method, args.r, args.eps, d, problem, weights,
                                         Path(args.instance).stem)
    if args.exact:
        opt = bruteforce_packing(g, fam, d)[1] if (problem != "mwis" or d > 2) else bruteforce_mwis(WeightedGraph(g, weights))[1]
        rep.with_optimum(opt)
    singles = problem == "mwis"
    cert = "independent" if singles else "packing"
    stats = {"method": args.method, "d": d, "problem": problem}
    if singles:
        stats["weights"] = [str(w) for w in weights]
    else:
        stats["family"] = io.family_to_dict(fam)
    _emit(io.solution_to_dict(value, chosen, cert, stats), args.out)
    if args.report:
        io.write_json(args.report, io.report_to_dict(rep))
    line = f"{rep.method} {rep.parameter}: achieved {value}, guaranteed ratio {rep.guaranteed}"
    if rep.optimum is not None:
        line += f", optimum {rep.optimum}, ratio {rep.achieved_ratio}"
    _info(line, not args.out)
    if rep.optimum is not None and not rep.meets_guarantee():
        raise VerificationFailed(f"achieved {value} below {rep.guaranteed} x optimum {rep.optimum}")
    return EXIT_OK


def verify_document(doc, coll):
    """Re-check one parsed artifact against its instance; returns a one-line summary."""
    kind = io.artifact_kind(doc)
    if kind == "instance":
        io.instance_from_dict(doc)
        return "instance parses and satisfies its kind constraints"
    if coll is None:
        raise ValueError(f"--instance is required to verify a {kind}")
    g = intersection_graph(coll)
    if kind in ("td", "decomposition"):
        if kind == "td":
            td, lay, prov = io.td_from_dict(doc), None, {}
        else:
            td, lay, prov = io.decomposition_from_dict(doc)
        bad = validate_td(g, td) or (check_layering(g, lay) if lay is not None else None)
        if bad:
            raise VerificationFailed(f"{bad.code} violated: {bad.message}")
        bound = prov.get("declared_bound")
        if bound is not None:
            cache = AlphaCache(g)
            if lay is not None:
                value, wit = layered_independence_number(g, td, lay, cache, witness=True)
            else:
                value, wit = td_independence_number(g, td, cache), None
            if value > bound:
                raise VerificationFailed(f"independence {value} exceeds declared bound {bound}; witness {wit}")
            return f"valid decomposition, independence {value} <= {bound}"
        return "valid decomposition"
    if kind == "cover":
        cover = io.cover_from_dict(doc)
        bad = check_cover(g, cover)
        if bad:
            raise VerificationFailed(f"{bad.code} violated: {bad.message}")
        if cover.bound is not None:
            cache = AlphaCache(g)
            worst = max(td_independence_number(g, td, cache) for td in cover.tds)
            if worst > cover.bound:
                raise VerificationFailed(f"element independence {worst} exceeds bound {cover.bound}")
        return f"valid cover with {len(cover)} elements"
    if kind == "solution":
        value, chosen, cert, stats = io.solution_from_dict(doc)
        if cert == "independent":
            if any(not 0 <= v < g.n for v in chosen):
                raise VerificationFailed("solution references a vertex outside the instance")
            if not g.is_independent(chosen):
                raise VerificationFailed("solution vertices are not independent")
            if "weights" in stats:
                total = sum((Fraction(stats["weights"][v]) for v in chosen), Fraction(0))
                if total != value:
                    raise VerificationFailed(f"stated value {value} differs from recomputed {total}")
            return f"independence certified ({len(chosen)} vertices, value {value})"
        fam = io.family_from_dict(stats["family"])
        if any(not 0 <= j < len(fam) for j in chosen):
            raise VerificationFailed("solution references an unknown family member")
        d = int(stats.get("d", 2))
        if not pairwise_distance_ok(g, fam, chosen, d):
            raise VerificationFailed(f"members are not pairwise at distance >= {d}")
        if fam.total(chosen) != value:
            raise VerificationFailed(f"stated value {value} differs from recomputed {fam.total(chosen)}")
        return f"distance-{d} packing certified ({len(chosen)} members, value {value})"
    if kind == "report":
        rep = io.report_from_dict(doc)
        if rep.optimum is not None and not rep.meets_guarantee():
            raise VerificationFailed("report ratio is below its guarantee")
        return "report consistent"
    if kind == "layering":
        bad = check_layering(g, io.layering_from_dict(doc))
        if bad:
            raise VerificationFailed(f"{bad.code} violated: {bad.message}")
        return "valid layering"
    if kind == "graph":
        if io.graph_from_dict(doc) != g:
            raise VerificationFailed("graph differs from the instance intersection graph")
        return "graph equals the intersection graph"
    if kind == "family":
        io.family_from_dict(doc).check_connected(g)
        return "family members are connected"
    raise ValueError(f"cannot verify a {kind}")


def cmd_verify(args):
    doc = io.read_json(args.artifact)
    coll = _load_instance(args.instance) if args.instance else None
    print(f"ok: {verify_document(doc, coll)}")
    return EXIT_OK


BENCH_FIELDS = ["method", "parameter", "kind", "n", "seed", "guaranteed", "achieved", "optimum", "ratio", "ok", "time"]


def _bench_cases(suite, max_n):
    if suite == "ratio":
        ns = sorted({max(6, max_n // 2), max_n})
        cases = []
        for r in (2, 3):
            cases.append(("fat-cover", {"r": r}, "disks"))
        cases.append(("cover-packing", {"r": 3}, "unit-disks"))
        cases.append(("distance", {"r": 5, "d": 4}, "unit-disks"))
        for eps in (0.5, 0.34):
            cases.append(("shifting", {"eps": eps}, "unit-disks"))
            cases.append(("shifting", {"eps": eps}, "unit-width-rects"))
            cases.append(("shifting", {"eps": eps}, "grid-paths-v"))
        return ns, cases, True
    ns = [n for n in (25, 50, 100, 200, 400) if n <= max_n] or [max_n]
    cases = [("shifting", {"eps": 0.5}, "unit-disks"), ("shifting", {"eps": 0.5}, "unit-width-rects"),
             ("cover-packing", {"r": 3}, "unit-disks")]
    return ns, cases, False


def bench_row(task):
    """One benchmark run; module level so that worker processes can pickle it."""
    method, params, kind, n, seed, with_opt = task
    spec = {"kind": kind, "n": n, "seed": seed}
    if kind.startswith("grid-paths"):
        spec["l"] = 1
    coll = generate_instance(spec)
    weights = random_weights(n, seed)
    d = params.get("d", 2)
    t0 = time.perf_counter()
    chosen, value, rep, fam, g = run_ptas(coll, method, params.get("r", 2), params.get("eps", 0.5), d, "mwis",
                                          weights, f"{kind}-{n}-{seed}")
    elapsed = time.perf_counter() - t0
    row = {"method": rep.method, "parameter": rep.parameter, "kind": kind, "n": n, "seed": seed,
           "guaranteed": str(rep.guaranteed), "achieved": str(value), "optimum": "", "ratio": "",
           "ok": "", "time": f"{elapsed:.6f}"}
    if with_opt:
        opt = bruteforce_packing(g, fam, d)[1] if d > 2 else bruteforce_mwis(WeightedGraph(g, weights))[1]
        rep.with_optimum(opt)
        row.update({"optimum": str(opt), "ratio": f"{float(rep.achieved_ratio):.6f}",
                    "ok": str(rep.meets_guarantee())})
    return row


def cmd_bench(args):
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    ns, cases, with_opt = _bench_cases(args.suite, args.max_n)
    if with_opt and args.max_n > 40:
        raise ValueError("the ratio suite needs brute-force optima; keep --max-n <= 40")
    if args.jobs < 1:
        raise ValueError("--jobs must be positive")
    tasks = [(method, params, kind, n, seed, with_opt)
             for method, params, kind in cases for n in ns for seed in range(args.seeds)]
    if args.jobs == 1:
        rows = [bench_row(t) for t in tasks]
    else:
        # map() keeps task order, so the CSV matches a sequential run apart from timings
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(bench_row, tasks))
    csv_path = out_dir / f"bench_{args.suite}.csv"
    with open(csv_path, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=BENCH_FIELDS)
        writer.writeheader()
        writer.writerows(rows)
    from .plotting import plot_ratios, plot_times

    figures = [out_dir / f"bench_{args.suite}_time.png"]
    plot_times(rows, figures[0])
    if with_opt:
        figures.append(out_dir / f"bench_{args.suite}_ratio.png")
        plot_ratios(rows, figures[1])
    bad = [r for r in rows if r["ok"] == "False"]
    print(f"{len(rows)} rows -> {csv_path}; figures: {', '.join(str(f) for f in figures)}")
    if with_opt:
        print(f"guarantee violations: {len(bad)}")
    if bad:
        raise VerificationFailed(f"{len(bad)} runs fell below their guaranteed ratio")
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser


def build_parser():
    p = argparse.ArgumentParser(prog="treealpha", description="Tree-independence-number decompositions, covers and approximation schemes.")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a seeded instance")
    g.add_argument("--kind", required=True, choices=GENERATOR_KINDS)
    g.add_argument("--n", type=int, required=True)
    g.add_argument("--seed", type=int, required=True)
    g.add_argument("--window", type=float)
    g.add_argument("--radius", type=float)
    g.add_argument("--rmin", type=float)
    g.add_argument("--rmax", type=float)
    g.add_argument("--k", type=float, help="similarity ratio")
    g.add_argument("--width", type=float)
    g.add_argument("--hmax", type=float)
    g.add_argument("--l", type=int, help="horizontal-part bound for grid paths")
    g.add_argument("--bends", type=int)
    g.add_argument("--out", "-o")
    g.set_defaults(func=cmd_generate)

    d = sub.add_parser("decompose", help="layered (or strip) decomposition with exact verification")
    d.add_argument("instance")
    d.add_argument("--method", choices=("auto", "strip"), default="auto")
    d.add_argument("--l", type=float, help="window width for the strip method")
    d.add_argument("--out", "-o")
    d.set_defaults(func=cmd_decompose)

    c = sub.add_parser("cover", help="general cover with per-element decompositions")
    c.add_argument("instance")
    c.add_argument("--method", choices=("fat", "layering"), default="fat")
    c.add_argument("--r", type=int, default=2)
    c.add_argument("--c", type=int, help="declared fatness constant")
    c.add_argument("--out", "-o")
    c.set_defaults(func=cmd_cover)

    s = sub.add_parser("solve", help="exact optimum by tree-decomposition DP or brute force")
    s.add_argument("instance")
    s.add_argument("--problem", choices=PROBLEMS, default="mwis")
    s.add_argument("--d", type=int, default=2)
    s.add_argument("--method", choices=("dp", "brute"), default="dp")
    s.add_argument("--weights", choices=("unit", "random"), default="unit")
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--out", "-o")
    s.set_defaults(func=cmd_solve)

    a = sub.add_parser("ptas", help="approximation scheme run with report")
    a.add_argument("instance")
    a.add_argument("--method", choices=("fat-cover", "cover-packing", "distance", "shifting"), required=True)
    a.add_argument("--r", type=int, default=3)
    a.add_argument("--eps", type=float, default=0.5)
    a.add_argument("--d", type=int, default=4)
    a.add_argument("--problem", choices=("mwis", "dissociation", "induced-matching"), default="mwis")
    a.add_argument("--weights", choices=("unit", "random"), default="unit")
    a.add_argument("--seed", type=int, default=0)
    a.add_argument("--exact", action="store_true", help="also compute the optimum by brute force")
    a.add_argument("--out", "-o")
    a.add_argument("--report")
    a.set_defaults(func=cmd_ptas)

    v = sub.add_parser("verify", help="re-check any artifact against its instance")
    v.add_argument("artifact")
    v.add_argument("--instance")
    v.set_defaults(func=cmd_verify)

    b = sub.add_parser("bench", help="seeded sweep writing CSV and figures")
    b.add_argument("--suite", choices=("ratio", "scaling"), default="ratio")
    b.add_argument("--max-n", type=int, default=18)
    b.add_argument("--seeds", type=int, default=3)
    b.add_argument("--out-dir", default="bench_output")
    b.add_argument("--jobs", type=int, default=1, help="worker processes")
    b.set_defaults(func=cmd_bench)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (VerificationFailed, AssertionError) as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except GuardExceeded as exc:
        print(f"guard exceeded: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except (io.FormatError, GeometryError, GraphError, DecompositionError, PtasError, ValueError, KeyError, OSError) as exc:
        print(f"bad input: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
