"""Command-line interface.

Every command prints one JSON document carrying ``"schema": "chromplane/1"``.
Wall-clock measurements are kept under ``"timing"`` so the rest of the output
is reproducible byte for byte.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time
from pathlib import Path

from . import __version__
from .config import load_config

SCHEMA = "chromplane/1"


class CliError(Exception):
    pass


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def emit(command: str, result, timing: dict | None = None, out=None) -> None:
    doc = {"schema": SCHEMA, "command": command, "result": result, "timing": timing or {}}
    text = json.dumps(doc, sort_keys=True, indent=2, default=_default)
    (out or sys.stdout).write(text + "\n")


def _default(obj):
    if hasattr(obj, "tolist"):
        return obj.tolist()
    if hasattr(obj, "value"):
        return obj.value
    raise TypeError(f"not serialisable: {type(obj).__name__}")


# --------------------------------------------------------------------------
# graphs


def _graph_from_args(args):
    from .graphs import (BiPlacement, EGraphSpec, WGraphSpec, attach_polychromatic,
                         build_egraph, build_wgraph, default_bi)

    if args.family == "egraph":
        g = build_egraph(EGraphSpec(args.m, args.a, args.b))
        bi = BiPlacement(s_squared=args.bi_s2) if args.bi_s2 is not None else None
    else:
        g = build_wgraph(WGraphSpec(args.p, args.c, args.d, args.radii, args.offsets))
        bi = BiPlacement(s=args.bi_s) if args.bi_s is not None else None
    if args.bi and bi is None:
        bi = default_bi(g)
    return g, bi


def _prepared(args, bi_override=None):
    from .graphs import attach_polychromatic, precolor_clique

    g, bi = _graph_from_args(args)
    if bi_override is not None:
        bi = bi_override
    if args.tri or bi is not None:
        g = attach_polychromatic(g, args.tri, bi)
    clique = None
    if not args.no_precolor:
        g, clique = precolor_clique(g, time_budget=args.clique_budget)
    return g, clique


def _solver_settings(args, cfg):
    from .hunt import SolverSettings

    cmd = args.solver.split() if args.solver else cfg.solver_command
    return SolverSettings(cmd, args.timeout if args.timeout is not None else cfg.timeout,
                          args.internal, args.budget)


def cmd_graph(args, cfg) -> int:
    from .colorsat import encode, exact_color, run_external, Status

    t0 = time.monotonic()
    if args.action == "build":
        g, _ = _prepared(args)
        data = g.to_json()
        if args.out:
            Path(args.out).write_text(json.dumps(data) + "\n")
            emit(f"{args.family} build", {"path": args.out, "vertices": g.n,
                                          "expanded": g.n_expanded, "edges": len(g.edges)},
                 {"seconds": time.monotonic() - t0})
        else:
            emit(f"{args.family} build", data, {"seconds": time.monotonic() - t0})
        return 0
    if args.action == "encode":
        if args.colors is None:
            raise CliError("--colors is required")
        g, _ = _prepared(args)
        cnf = encode(g, args.colors)
        if args.out:
            cnf.write(args.out)
            emit(f"{args.family} encode", {"path": args.out, "variables": cnf.variable_count,
                                           "clauses": len(cnf.clauses), "hash": cnf.tag},
                 {"seconds": time.monotonic() - t0})
        else:
            sys.stdout.write(cnf.to_dimacs())
        return 0
    if args.action == "solve":
        if args.colors is None:
            raise CliError("--colors is required")
        g, clique = _prepared(args)
        settings = _solver_settings(args, cfg)
        if settings.internal:
            out = exact_color(g, args.colors, budget=settings.budget, cap=cfg.internal_cap)
        else:
            out = run_external(encode(g, args.colors), settings.command, settings.timeout)
        result = {"status": out.status.value, "colors": args.colors, "spec": g.params,
                  "vertices": g.n, "expanded": g.n_expanded, "edges": len(g.edges),
                  "precolored": list(g.precolored), "clique_exact": clique.exact if clique else None,
                  "model": out.model, "solver": "internal" if settings.internal else "external"}
        emit(f"{args.family} solve", result, {"seconds": time.monotonic() - t0,
                                              "solver_seconds": out.wall_time})
        if args.exit_status:
            return {Status.SAT: 10, Status.UNSAT: 20}.get(out.status, 0)
        return 0
    if args.action == "sweep-bi":
        return _sweep_bi(args, cfg, t0)
    raise CliError(f"unknown action {args.action}")


def _sweep_bi(args, cfg, t0) -> int:
    from .graphs import BiPlacement, attach_polychromatic, precolor_clique, sweep_bichromatic
    from .hunt import solve_many
    from .store import ResultStore

    if args.colors is None:
        raise CliError("--colors is required")
    g, _ = _graph_from_args(args)
    cands = None
    if args.s_values:
        cands = list(args.s_values)
    elif args.family == "wgraph":
        raise CliError("w-graph sweeps need --s-values")
    variants = sweep_bichromatic(g, cands, tri_at_center=args.tri)
    tasks = []
    for s, inst in variants:
        if not args.no_precolor:
            inst, _ = precolor_clique(inst, time_budget=args.clique_budget)
        tasks.append((inst, args.colors))
    store = ResultStore(args.store) if args.store else None
    rows = solve_many(tasks, _solver_settings(args, cfg), store, cfg.parallelism)
    result = [{"s": s, "status": r["status"], "hash": r["hash"]} for (s, _), r in zip(variants, rows)]
    emit(f"{args.family} sweep-bi", {"colors": args.colors, "spec": g.params, "outcomes": result},
         {"seconds": time.monotonic() - t0})
    return 0


# --------------------------------------------------------------------------
# hunt


def cmd_hunt(args, cfg) -> int:
    from .hunt import FRONTIER_HEADER, SweepPlan, hunt
    from .store import ResultStore

    t0 = time.monotonic()
    plan = SweepPlan(args.colors, args.a, args.b, args.m, args.m_ratio, args.max_solves,
                     args.max_seconds, _solver_settings(args, cfg))
    store = ResultStore(args.store or cfg.store)
    res = hunt(plan, store)
    emit("hunt", {"frontier_header": FRONTIER_HEADER[:-1],
                  "frontier": [r.as_list()[:-1] for r in res.frontier],
                  "probes": [{k: v for k, v in p.items() if k != "solved"} for p in res.probes],
                  "stopped": res.stopped},
         {"seconds": time.monotonic() - t0, "solver_invocations": res.solves,
          "solve_times": [r.time for r in res.frontier]})
    return 0


# --------------------------------------------------------------------------
# tilings and packing


def cmd_tiling(args, cfg) -> int:
    from . import tilings

    t0 = time.monotonic()
    if args.action == "verify":
        try:
            spec = tilings.TilingSpec.from_json(json.loads(Path(args.file).read_text()))
        except (OSError, ValueError, KeyError) as exc:
            raise CliError(f"{args.file}: {exc}") from exc
        rep = tilings.verify_tiling(spec, shell=args.shell)
        emit("tiling verify", rep.to_json(), {"seconds": time.monotonic() - t0})
    elif args.action == "sublattice":
        from .lattice import is_loeschian

        if args.regular or (is_loeschian(args.k) and args.restarts == 0):
            col = max(tilings.regular_sublattice_colorings(args.k), key=lambda c: c.d)
        else:
            _, col = tilings.general_sublattice_distance(args.k, args.restarts, args.seed)
        emit("tiling sublattice", {"k": args.k, "d": round(col.d, 10), "coloring": col.to_json()},
             {"seconds": time.monotonic() - t0})
    elif args.action == "radial":
        d, col = tilings.radial_optimum(args.k, args.n_max)
        emit("tiling radial", {"k": args.k, "d": round(d, 10), "coloring": col.to_json()},
             {"seconds": time.monotonic() - t0})
    return 0


def cmd_pack(args, cfg) -> int:
    from .packing import pack

    t0 = time.monotonic()
    iters = args.iterations or cfg.pack_iterations
    res = pack(args.q, args.restarts, args.seed, iters, args.cycles or cfg.pack_cycles,
               workers=min(cfg.parallelism, args.restarts))
    emit("pack", res.to_json(), {"seconds": time.monotonic() - t0})
    return 0


# --------------------------------------------------------------------------
# ledger


def cmd_ledger(args, cfg) -> int:
    from . import bounds, datasets

    path = Path(args.ledger or cfg.ledger)
    t0 = time.monotonic()
    if args.action == "import":
        ledger = bounds.BoundsLedger(path)
        added = 0
        if args.paper:
            added += ledger.extend(datasets.main_bounds())
        for f in args.files or []:
            for lineno, line in enumerate(Path(f).read_text().splitlines(), 1):
                if not line.strip():
                    continue
                try:
                    entry = bounds.BoundEntry.from_json(json.loads(line))
                except (ValueError, KeyError, TypeError) as exc:
                    raise CliError(f"{f}:{lineno}: {exc}") from exc
                added += ledger.add(entry)
        emit("ledger import", {"ledger": str(path), "added": added, "entries": len(ledger.entries)})
        return 0
    ledger = bounds.BoundsLedger(path)
    preds = None
    if getattr(args, "reference_predictions", False):
        preds = {r["chi"]: (r["pred"], r["slope"]) for r in datasets.main_table()
                 if isinstance(r["pred"], float)}
    if args.action == "islands":
        rows = bounds.compute_islands(ledger.records(), {c: p[0] for c, p in (preds or {}).items()})
        emit("ledger islands", [row.__dict__ for row in rows],
             {"seconds": time.monotonic() - t0})
        return 0
    if args.action == "table":
        chis = [r.chi for r in bounds.compute_islands(ledger.records()) if r.status != "unknown"]
        rows = bounds.table_rows(ledger, preds, chis)
        text = bounds.table_csv(rows) if args.format == "csv" else bounds.table_text(rows)
        if args.out:
            Path(args.out).write_text(text)
        emit("ledger table", {"rows": rows, "path": args.out})
        return 0
    if args.action == "extrapolate":
        fit = _fit_for(args)
        emit("ledger extrapolate", {"k": args.k, "source": args.source, **fit.to_json()})
        return 0
    if args.action == "plot":
        from . import plots

        if args.kind == "chi":
            plots.chi_staircase(ledger.records(), bounds.compute_islands(ledger.records()), args.out)
        else:
            plots.fit_plot({f"k={args.k}": _fit_for(args)}, args.out)
        emit("ledger plot", {"kind": args.kind, "path": args.out})
        return 0
    raise CliError(f"unknown action {args.action}")


def _fit_for(args):
    from . import bounds, datasets

    if args.points:
        pts = []
        for lineno, line in enumerate(Path(args.points).read_text().splitlines(), 1):
            if not line.strip() or line.startswith("#"):
                continue
            try:
                r, d = (float(x) for x in line.replace(",", " ").split()[:2])
            except ValueError as exc:
                raise CliError(f"{args.points}:{lineno}: {exc}") from exc
            pts.append((r, d))
        return bounds.extrapolate(pts)
    if args.k is None:
        raise CliError("give --k or --points")
    if args.source == "wgraph":
        raise CliError("single w-graph rows cannot be fitted; pass --points")
    rows = [r for r in datasets.record_graphs() if r["k"] == args.k]
    if not rows:
        raise CliError(f"no reference rows for k={args.k}")
    if args.envelope:
        return bounds.extrapolate(bounds.lower_envelope((r["a"], r["b"]) for r in rows))
    return bounds.extrapolate(bounds.egraph_point(r["a"], r["b"]) for r in rows)


# --------------------------------------------------------------------------
# parser


def _graph_parser(sub, family: str) -> None:
    p = sub.add_parser(family, help=f"{family} instances")
    p.add_argument("action", choices=["build", "encode", "solve", "sweep-bi"])
    if family == "egraph":
        p.add_argument("--m", type=int, required=True)
        p.add_argument("--a", type=int, required=True)
        p.add_argument("--b", type=int, required=True)
        p.add_argument("--bi-s2", type=int, help="squared centre-to-bi distance")
    else:
        p.add_argument("--p", type=int, required=True)
        p.add_argument("--c", type=int, default=1)
        p.add_argument("--d", type=float, required=True)
        p.add_argument("--radii", type=_floats)
        p.add_argument("--offsets", type=_floats)
        p.add_argument("--bi-s", type=float, help="centre-to-bi distance")
    p.add_argument("--tri", action="store_true", help="tri-chromatic vertex at the centre")
    p.add_argument("--bi", action="store_true", help="bi-chromatic vertex at the default distance")
    p.add_argument("--no-precolor", action="store_true")
    p.add_argument("--clique-budget", type=float, default=120.0)
    p.add_argument("--colors", type=int)
    p.add_argument("--s-values", type=_floats, help="sweep candidates (s^2 for e-graphs)")
    p.add_argument("--store")
    p.add_argument("--out")
    _solver_flags(p)
    p.add_argument("--exit-status", action="store_true", help="exit 10/20 on SAT/UNSAT")
    p.set_defaults(func=cmd_graph, family=family)


def _solver_flags(p) -> None:
    p.add_argument("--solver", help="solver command; the CNF path is appended")
    p.add_argument("--timeout", type=float)
    p.add_argument("--internal", action="store_true", help="use the built-in exact colourer")
    p.add_argument("--budget", type=int, default=2_000_000, help="node budget of the built-in colourer")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="chromplane", description=__doc__.splitlines()[0])
    ap.add_argument("--config")
    ap.add_argument("--version", action="version", version=f"chromplane {__version__}")
    sub = ap.add_subparsers(dest="cmd", required=True)
    _graph_parser(sub, "egraph")
    _graph_parser(sub, "wgraph")

    h = sub.add_parser("hunt", help="record search over (a, b)")
    h.add_argument("--colors", type=int, required=True)
    h.add_argument("--a", type=int, required=True)
    h.add_argument("--b", type=int, required=True)
    h.add_argument("--m", type=int)
    h.add_argument("--m-ratio", type=float, default=1.3)
    h.add_argument("--max-solves", type=int, default=20)
    h.add_argument("--max-seconds", type=float)
    h.add_argument("--store")
    _solver_flags(h)
    h.set_defaults(func=cmd_hunt)

    t = sub.add_parser("tiling", help="tilings and annulus colourings")
    tsub = t.add_subparsers(dest="action", required=True)
    tv = tsub.add_parser("verify")
    tv.add_argument("file")
    tv.add_argument("--shell", type=int, default=2)
    ts = tsub.add_parser("sublattice")
    ts.add_argument("--k", type=int, required=True)
    ts.add_argument("--restarts", type=int, default=0)
    ts.add_argument("--seed", type=int, default=0)
    ts.add_argument("--regular", action="store_true")
    tr = tsub.add_parser("radial")
    tr.add_argument("--k", type=int, required=True)
    tr.add_argument("--n-max", type=int)
    t.set_defaults(func=cmd_tiling)

    pk = sub.add_parser("pack", help="narrowest q-clique")
    pk.add_argument("--q", type=int, required=True)
    pk.add_argument("--restarts", type=int, default=16)
    pk.add_argument("--seed", type=int, default=0)
    pk.add_argument("--iterations", type=_ints)
    pk.add_argument("--cycles", type=int)
    pk.set_defaults(func=cmd_pack)

    lg = sub.add_parser("ledger", help="bounds ledger")
    lsub = lg.add_subparsers(dest="action", required=True)
    li = lsub.add_parser("import")
    li.add_argument("--paper", action="store_true", help="load the bundled reference bounds")
    li.add_argument("files", nargs="*")
    isl = lsub.add_parser("islands")
    isl.add_argument("--reference-predictions", action="store_true")
    tb = lsub.add_parser("table")
    tb.add_argument("--format", choices=["csv", "text"], default="text")
    tb.add_argument("--out")
    tb.add_argument("--reference-predictions", action="store_true")
    ex = lsub.add_parser("extrapolate")
    pl = lsub.add_parser("plot")
    pl.add_argument("--kind", choices=["chi", "fit"], default="chi")
    pl.add_argument("--out", required=True)
    for q in (ex, pl):
        q.add_argument("--k", type=int)
        q.add_argument("--source", choices=["egraph", "wgraph"], default="egraph")
        q.add_argument("--points", help="file with one 'r d' pair per line")
        q.add_argument("--envelope", action="store_true", help="smallest b per a only")
    for q in (li, isl, tb, ex, pl):
        q.add_argument("--ledger")
    lg.set_defaults(func=cmd_ledger)
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        cfg = load_config(args.config)
        return args.func(args, cfg)
    except (CliError, FileNotFoundError) as exc:
        print(json.dumps({"schema": SCHEMA, "error": str(exc)}), file=sys.stderr)
        return 1
    except ValueError as exc:
        # precondition failures of the library (bad window, non-Loeschian a, ...)
        print(json.dumps({"schema": SCHEMA, "error": str(exc)}), file=sys.stderr)
        return 2
    except KeyboardInterrupt:
        print(json.dumps({"schema": SCHEMA, "error": "interrupted"}), file=sys.stderr)
        return 130


if __name__ == "__main__":
    sys.exit(main())
