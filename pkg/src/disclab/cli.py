"""``disclab`` command-line front-end.

Exit codes: 0 on success, 1 on domain errors (bad input, failed
preconditions, usage errors), 2 when a search budget or size cap is exceeded.
With ``--json`` the result is printed to stdout as a JSON document.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Any, Sequence

from . import io as dio
from .discrepancy import (
    FAMILIES,
    exact_tree_discrepancy,
    local_search_colouring,
    naive_tree_discrepancy_of_colouring,
    subgraph_family_discrepancy,
    tree_discrepancy_of_colouring,
)
from .dual import extract_separator
from .errors import BudgetError, DiscLabError, TheoryViolationError
from .experiments import EXPERIMENTS, ExperimentConfig, run_experiment
from .extremal import (
    SequenceSpec,
    clique_cover_colouring,
    clique_cycle_colouring,
    hamilton_extremal,
    lemma_dc_scan,
    phi_exact,
    phi_tightness_probe,
)
from .generators import (
    HedgehogSpec,
    gen_clique_cycle,
    gen_complete,
    gen_cycle,
    gen_grid,
    gen_hedgehog,
    gen_hypercube,
    gen_path,
    gen_petersen,
    gen_random_regular,
    gen_star,
    grid_layers,
)
from .graph import to_dot
from .hamilton import dfs_long_path, hamilton_with_forced_edges, monochromatic_matching
from .separation import exact_separation_number, is_balanced_separation, layered_separator, separation_lower_bounds

GEN_FAMILIES = (
    "complete", "path", "cycle", "star", "petersen", "hedgehog", "clique-cycle",
    "grid", "hypercube", "rrg", "hamilton-extremal",
)


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _global_flags(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=int, default=d(0), help="random seed")
    p.add_argument("--budget", type=int, default=d(None), help="search budget (nodes or cap)")
    p.add_argument("--json", action="store_true", default=d(False), help="print JSON to stdout")
    p.add_argument("--out", default=d(None), help="write the primary result to this file")


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    _global_flags(common, suppress=True)
    parser = _Parser(prog="disclab", description="Graph discrepancy and balanced separators.")
    _global_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("gen", parents=[common], help="generate a graph")
    p.add_argument("family", choices=GEN_FAMILIES)
    p.add_argument("--n", type=int)
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--k", type=int)
    p.add_argument("--d", type=int)
    p.add_argument("--x", type=int, nargs="+")
    p.add_argument("--plus", action="store_true", help="grid: add the corner cycle")
    p.add_argument("--regular", type=int, help="hedgehog: degree of the regular variant")
    p.add_argument("--colouring-out", help="write the canonical colouring here")
    p.add_argument("--meta-out", help="write clique-cycle metadata or layers here")
    p.add_argument("--dot", action="store_true", help="print DOT instead of JSON")

    p = sub.add_parser("disc", parents=[common], help="discrepancy of a colouring or of a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--colouring")
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--family", choices=FAMILIES, default="spanning-tree")
    p.add_argument("--naive", action="store_true", help="enumerate spanning trees instead of the formula")
    p.add_argument("--heuristic", action="store_true", help="local search instead of exact search")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("sep", parents=[common], help="balanced separations")
    p.add_argument("--graph", required=True)
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--cap", type=int, default=16)
    p.add_argument("--bounds", action="store_true", help="also report lower bounds")
    p.add_argument("--layers", help="JSON list of layers: run the layered separator instead")
    p.add_argument("--check", help="validate this separation JSON instead of searching")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("extract", parents=[common], help="separator from a low-discrepancy colouring")
    p.add_argument("--graph", required=True)
    p.add_argument("--colouring", required=True)
    p.add_argument("--trace")

    p = sub.add_parser("extremal", parents=[common], help="extremal sequences and constructions")
    p.add_argument("what", choices=["dc-scan", "phi", "build", "probe"])
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--k", type=int)
    p.add_argument("--n", type=int)
    p.add_argument("--x", type=int, nargs="+")
    p.add_argument("--construction", choices=["clique-cycle", "hamilton", "cover"], default="clique-cycle")
    p.add_argument("--colouring-out")

    p = sub.add_parser("ham", parents=[common], help="Hamilton cycles, long paths, matchings")
    p.add_argument("what", choices=["match", "path", "forced", "cycle"])
    p.add_argument("--graph", required=True)
    p.add_argument("--colouring")
    p.add_argument("--alpha", type=float, default=0.1)
    p.add_argument("--forced", help="JSON list of edges")
    p.add_argument("--sides", help="JSON [X, Y] for the bipartite path search")
    p.add_argument("--k", type=int, default=1)
    p.add_argument("--cap", type=int, default=14)

    p = sub.add_parser("experiment", parents=[common], help="run a seeded experiment")
    p.add_argument("id", nargs="?", choices=EXPERIMENTS)
    p.add_argument("--config", help="experiment config JSON")
    p.add_argument("--param", action="append", default=[], metavar="KEY=VALUE",
                   help="experiment parameter; VALUE is parsed as JSON when possible")
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--seeds", help="comma list or range a-b (inclusive)")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("io", parents=[common], help="file interchange")
    p.add_argument("what", choices=["roundtrip", "validate", "dot"])
    p.add_argument("path")
    p.add_argument("--colouring")
    return parser


# ---------------------------------------------------------------------------
# Output helpers
# ---------------------------------------------------------------------------


def _emit(args, payload: dict, text: str | None = None, primary: Any = None) -> None:
    if args.out is not None:
        dio.write_json(args.out, payload if primary is None else primary)
    if args.json:
        sys.stdout.write(dio.dumps(payload))
    elif text is not None:
        print(text)
    else:
        sys.stdout.write(dio.dumps(payload))


def _parse_seeds(spec: str | None, default: int) -> list[int]:
    if not spec:
        return [default]
    out: list[int] = []
    for part in spec.split(","):
        if "-" in part.strip()[1:]:
            a, b = part.split("-", 1)
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(part))
    return out


def _parse_param(text: str) -> tuple[str, Any]:
    if "=" not in text:
        raise DiscLabError(f"parameter {text!r} is not KEY=VALUE")
    key, value = text.split("=", 1)
    try:
        return key, json.loads(value)
    except json.JSONDecodeError:
        return key, value


def _require(args, *names: str) -> None:
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise DiscLabError(f"{args.command}: missing {' '.join(missing)}")


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------


def cmd_gen(args) -> None:
    fam = args.family
    colouring = meta = None
    if fam == "complete":
        _require(args, "n"); g = gen_complete(args.n)
    elif fam == "path":
        _require(args, "n"); g = gen_path(args.n)
    elif fam == "cycle":
        _require(args, "n"); g = gen_cycle(args.n)
    elif fam == "star":
        _require(args, "n"); g = gen_star(args.n - 1)
    elif fam == "petersen":
        g = gen_petersen()
    elif fam == "hedgehog":
        _require(args, "n")
        g, colouring = gen_hedgehog(HedgehogSpec(args.r, args.n, args.regular), seed=args.seed)
    elif fam == "clique-cycle":
        _require(args, "k", "x")
        g, m = gen_clique_cycle(args.r, args.k, args.x)
        colouring, meta = clique_cycle_colouring(g, m), dio.meta_to_json(m)
    elif fam == "grid":
        _require(args, "k", "d")
        g, meta = gen_grid(args.k, args.d, plus=args.plus), grid_layers(args.k, args.d)
    elif fam == "hypercube":
        _require(args, "d"); g, meta = gen_hypercube(args.d)
    elif fam == "rrg":
        _require(args, "n", "d")
        kw = {} if args.budget is None else {"max_rejections": args.budget}
        g = gen_random_regular(args.n, args.d, args.seed, **kw)
    else:  # hamilton-extremal
        _require(args, "n"); g, colouring, meta = hamilton_extremal(args.r, args.n)
    if args.colouring_out and colouring is not None:
        dio.write_json(args.colouring_out, dio.colouring_to_json(colouring))
    if args.meta_out and meta is not None:
        dio.write_json(args.meta_out, meta)
    if args.dot:
        print(to_dot(g, colouring), end="")
        return
    payload = {"graph": dio.graph_to_json(g)}
    if colouring is not None:
        payload["colouring"] = dio.colouring_to_json(colouring)
    if meta is not None:
        payload["meta"] = meta
    text = None if args.out is None else f"{fam}: n={g.n} m={g.m} -> {args.out}"
    _emit(args, payload, text, primary=dio.graph_to_json(g))


def cmd_disc(args) -> None:
    g = dio.load_graph(args.graph)
    if args.colouring:
        f = dio.load_colouring(args.colouring, g)
        if args.family == "spanning-tree":
            if args.naive:
                kw = {} if args.budget is None else {"budget": args.budget}
                rep = naive_tree_discrepancy_of_colouring(g, f, **kw)
            else:
                rep = tree_discrepancy_of_colouring(g, f)
        else:
            rep = subgraph_family_discrepancy(g, f, args.family, cap=args.budget)
        _emit(args, rep.to_json(), f"D_f = {rep.value} ({rep.family})")
        return
    if args.family != "spanning-tree":
        raise DiscLabError("graph discrepancy without a colouring is only supported for spanning trees")
    if args.heuristic:
        f, ranks = local_search_colouring(g, args.r, seed=args.seed)
        value = args.r * max(ranks) - (g.n - 1)
        payload = {"value": value, "kind": "heuristic upper bound", "ranks": ranks,
                   "colouring": dio.colouring_to_json(f)}
        _emit(args, payload, f"D_{args.r} <= {value} (heuristic)")
        return
    kw = {"budget": args.budget} if args.budget is not None else {}
    rep = exact_tree_discrepancy(g, args.r, workers=args.workers, seed=args.seed, **kw)
    _emit(args, rep.to_json(), f"D_{args.r}(G, trees) = {rep.value}")


def cmd_sep(args) -> None:
    g = dio.load_graph(args.graph)
    if args.check:
        sep = dio.separation_from_json(dio.read_json(args.check))
        ok, problems = is_balanced_separation(g, sep)
        _emit(args, {"valid": ok, "problems": problems}, "valid" if ok else "invalid: " + "; ".join(problems))
        if not ok:
            raise DiscLabError("not a balanced separation")
        return
    if args.layers:
        data = dio.read_json(args.layers)
        layers = data["layers"] if isinstance(data, dict) else data
        sep = layered_separator(g, layers, args.r)
        payload = {"separation": dio.separation_to_json(sep), "size": sep.size}
        _emit(args, payload, f"layered separator: |S| = {sep.size}", primary=dio.separation_to_json(sep))
        return
    cap = args.cap if args.budget is None else args.budget
    res = exact_separation_number(g, args.r, cap=cap, workers=args.workers)
    payload = {"s": res.s, "separation": dio.separation_to_json(res.witness),
               "candidates_checked": res.candidates_checked}
    text = f"s_{args.r} = {res.s}"
    if args.bounds:
        b = separation_lower_bounds(g, args.r)
        payload["lower_bounds"] = {"kappa": b.kappa_bound, "iso": b.iso_bound,
                                   "iota": None if b.iota is None else str(b.iota)}
        text += f" (lower bounds: kappa {b.kappa_bound}, iso {b.iso_bound})"
    _emit(args, payload, text, primary=dio.separation_to_json(res.witness))


def cmd_extract(args) -> None:
    g = dio.load_graph(args.graph)
    f = dio.load_colouring(args.colouring, g)
    try:
        sep, trace = extract_separator(g, f)
    except TheoryViolationError as exc:
        if args.trace:
            dio.write_json(args.trace, exc.trace)
        raise
    if args.trace:
        dio.write_json(args.trace, trace.to_json())
    payload = {"separation": dio.separation_to_json(sep), "size": sep.size, "d": trace.d_used,
               "discrepancy": trace.discrepancy, "degenerate": trace.degenerate}
    _emit(args, payload, f"|S| = {sep.size}, parts of size {sep.part_size}, d = {trace.d_used}",
          primary=dio.separation_to_json(sep))


def cmd_extremal(args) -> None:
    if args.what == "dc-scan":
        _require(args, "k", "x")
        res = lemma_dc_scan(SequenceSpec(args.r, args.k, tuple(args.x)))
        payload = {"slack": str(res.slack), "holds": res.holds, "subsets": res.subsets,
                   "witness": list(res.witness.indices)}
        _emit(args, payload, f"min slack {res.slack} over {res.subsets} subsets")
        if not res.holds:
            raise DiscLabError("negative slack")
    elif args.what == "phi":
        _require(args, "n")
        kw = {} if args.budget is None else {"budget": args.budget}
        res = phi_exact(args.r, args.n, **kw)
        payload = {"r": res.r, "n": res.n, "phi": res.k, "floor": res.floor, "cover": [list(a) for a in res.cover]}
        _emit(args, payload, f"phi({res.r},{res.n}) = {res.k}")
    elif args.what == "probe":
        _require(args, "n")
        kw = {} if args.budget is None else {"budget": args.budget}
        pr = phi_tightness_probe(args.r, args.n, **kw)
        _emit(args, pr.__dict__, f"phi={pr.phi}, min max rank={pr.min_max_rank}, holds={pr.holds}")
    else:
        if args.construction == "clique-cycle":
            _require(args, "k", "x")
            g, meta = gen_clique_cycle(args.r, args.k, args.x)
            f = clique_cycle_colouring(g, meta)
            extra = {"meta": dio.meta_to_json(meta)}
        elif args.construction == "hamilton":
            _require(args, "n")
            g, f, blocks = hamilton_extremal(args.r, args.n)
            extra = {"blocks": blocks}
        else:
            _require(args, "n")
            res = phi_exact(args.r, args.n)
            g = gen_complete(args.n)
            f = clique_cover_colouring(g, res.cover)
            extra = {"cover": [list(a) for a in res.cover]}
        if args.colouring_out:
            dio.write_json(args.colouring_out, dio.colouring_to_json(f))
        payload = {"graph": dio.graph_to_json(g), "colouring": dio.colouring_to_json(f), **extra}
        _emit(args, payload, None, primary=dio.graph_to_json(g))


def cmd_ham(args) -> None:
    g = dio.load_graph(args.graph)
    if args.what == "match":
        if not args.colouring:
            raise DiscLabError("ham match needs --colouring")
        f = dio.load_colouring(args.colouring, g)
        res = monochromatic_matching(g, f, args.alpha, cap=args.cap)
        payload = {"colour": res.colour, "matching": [list(e) for e in res.matching],
                   "size": res.size, "bound": res.bound, "trace": res.trace}
        _emit(args, payload, f"colour {res.colour} matching of size {res.size} (bound {res.bound:.2f})")
    elif args.what == "path":
        if not args.sides:
            raise DiscLabError("ham path needs --sides")
        X, Y = dio.read_json(args.sides)
        res = dfs_long_path(g, X, Y, args.k)
        payload = {"path": list(res.path), "length": res.length, "bound": res.bound,
                   "expansion": res.expansion}
        _emit(args, payload, f"path of length {res.length} (2n-4k = {res.bound}, expansion {res.expansion})")
    else:
        forced = dio.read_json(args.forced) if args.forced else []
        cyc = hamilton_with_forced_edges(g, forced, cap=args.cap)
        payload = {"found": cyc is not None, "cycle": None if cyc is None else list(cyc)}
        _emit(args, payload, "no Hamilton cycle" if cyc is None else " ".join(map(str, cyc)))


def cmd_experiment(args) -> None:
    if args.config:
        cfg = ExperimentConfig.from_json(dio.read_json(args.config))
    else:
        if not args.id:
            raise DiscLabError("experiment needs an id or --config")
        cfg = ExperimentConfig(args.id, dict(_parse_param(p) for p in args.param), args.r,
                               _parse_seeds(args.seeds, args.seed))
    if args.budget is not None:
        cfg.budgets.setdefault("nodes", args.budget)
    if args.out is not None:
        cfg.output = args.out
    out, cfg_out = args.out, cfg.output
    report = run_experiment(cfg, workers=args.workers)
    args.out = None  # run_experiment already wrote the report
    text = f"{cfg.experiment}: {json.dumps(report['summary'], sort_keys=True)}"
    if cfg_out and out is None:
        text += f" -> {cfg_out}"
    _emit(args, report, text)
    statuses = {it.get("status") for it in report["items"]}
    if "budget-exceeded" in statuses:
        raise BudgetError("some items exceeded their budget")


def cmd_io(args) -> None:
    if args.what == "roundtrip":
        obj = dio.io_roundtrip(args.path)
        _emit(args, {"kind": dio.detect_kind(dio.read_json(args.path)), "ok": True},
              f"{type(obj).__name__}: roundtrip ok")
    elif args.what == "validate":
        data = dio.read_json(args.path)
        kind = dio.detect_kind(data)
        dio.io_roundtrip(args.path)
        _emit(args, {"kind": kind, "valid": True}, f"valid {kind}")
    else:
        g = dio.load_graph(args.path)
        f = dio.load_colouring(args.colouring, g) if args.colouring else None
        text = to_dot(g, f)
        if args.out:
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            print(text, end="")


COMMANDS = {
    "gen": cmd_gen, "disc": cmd_disc, "sep": cmd_sep, "extract": cmd_extract,
    "extremal": cmd_extremal, "ham": cmd_ham, "experiment": cmd_experiment, "io": cmd_io,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        COMMANDS[args.command](args)
    except BudgetError as exc:
        print(f"disclab: budget exceeded: {exc}", file=sys.stderr)
        return 2
    except TheoryViolationError as exc:
        print(f"disclab: theory violation: {exc}", file=sys.stderr)
        return 1
    except DiscLabError as exc:
        print(f"disclab: {exc}", file=sys.stderr)
        return 1
    except (OSError, KeyError, ValueError) as exc:
        print(f"disclab: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
