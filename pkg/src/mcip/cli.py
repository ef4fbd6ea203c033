"""Command-line interface.

Exit codes: 0 success, 1 input error, 2 numeric failure (singular matrix,
degenerate or non-converged fit, failed oracle verification).
"""

from __future__ import annotations

import argparse
import json
import sys

from . import ci, graph, io, joint_oracle, loglinear
from .ci import MutualCIStatement
from .exceptions import InputError, NumericError
from .gaussian import ci_test_gaussian, mcip_gaussian_check

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2


def render_json(doc) -> str:
    return json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _labels(text: str | None) -> list[str]:
    if not text:
        return []
    return [x.strip() for x in text.split(",") if x.strip()]


def _blocks(text: str | None) -> list[list[str]]:
    """``a,b+c`` -> ``[[a], [b, c]]``."""
    return [[y.strip() for y in x.split("+") if y.strip()] for x in _labels(text)]


def cmd_amis(args, out) -> int:
    g = io.load_graph(args.graph)
    sets = [list(g.ordered(s)) for s in graph.enumerate_maximal_independent_sets(g)]
    if args.json:
        out.write(render_json({"sets": sets}))
    else:
        out.write("".join(",".join(s) + "\n" for s in sets))
    return EXIT_OK


def cmd_reconstruct(args, out) -> int:
    g = graph.reconstruct_from_amis(io.load_sets(args.sets))
    out.write(render_json(io.graph_to_dict(g)) if args.json else io.format_graph(g))
    return EXIT_OK


RELATION_KINDS = {
    "pairwise": ci.pairwise_relations,
    "local": ci.local_relations,
    "mcip": ci.mcip_relations,
    "pairwise-from-mcip": ci.pairwise_from_mcip,
}


def _statement_doc(s) -> dict:
    if isinstance(s, MutualCIStatement):
        return {"blocks": [sorted(b) for b in s.blocks], "given": sorted(s.given)}
    return {"blocks": [sorted(s.left), sorted(s.right)], "given": sorted(s.given)}


def cmd_relations(args, out) -> int:
    g = io.load_graph(args.graph)
    stmts = RELATION_KINDS[args.kind](g)
    if args.json:
        out.write(render_json({
            "kind": args.kind,
            "statements": [str(s) for s in stmts],
            "structured": [_statement_doc(s) for s in stmts],
        }))
    else:
        out.write(ci.format_statements(stmts))
    return EXIT_OK


def cmd_fit(args, out) -> int:
    table = io.read_table_csv(args.table)
    g = io.load_graph(args.graph) if args.graph else None
    extra = {}
    if args.model == "mcip":
        blocks = _blocks(args.blocks)
        if not blocks:
            raise InputError("--model mcip needs --blocks")
        given = _labels(args.given) if args.given is not None else \
            [v for v in table.labels if not any(v in b for b in blocks)]
        result = loglinear.fit_mcip(table, blocks, given)
        if g is not None:
            extra["graph_df"] = loglinear.degrees_of_freedom(table, loglinear.graph_generators(g))
    elif args.model == "decomposable":
        if g is None:
            raise InputError("--model decomposable needs --graph")
        result = loglinear.fit_decomposable(table, g)
    else:
        if args.generators:
            gens = _blocks(args.generators)
        elif g is not None:
            gens = loglinear.graph_generators(g)
        else:
            raise InputError("--model ipf needs --graph or --generators")
        result = loglinear.fit_ipf(table, gens, tol=args.tol, max_iter=args.max_iter)
    doc = result.to_dict()
    doc.update(extra)
    if args.show_fitted:
        doc["fitted"] = [{"cell": list(names), "count": c} for names, c in result.fitted.cells()]
    if args.json:
        out.write(render_json(doc))
    else:
        lines = [
            f"model: {result.model}",
            "generators: " + " ".join("[" + ",".join(sorted(gen)) + "]" for gen in result.generators),
            f"X2 = {result.x2:.5f}  (p = {result.p_value_x2:.4f})",
            f"G2 = {result.g2:.5f}  (p = {result.p_value_g2:.4f})",
            f"df = {result.df}",
        ]
        if "graph_df" in extra:
            lines.append(f"df of the reference graph model = {extra['graph_df']}")
        lines.append(f"iterations = {result.iterations}  converged = {str(result.converged).lower()}")
        if args.show_fitted:
            lines.append(",".join([*table.labels, "fitted"]))
            lines += [",".join([*names, f"{c:.6f}"]) for names, c in result.fitted.cells()]
        out.write("\n".join(lines) + "\n")
    return EXIT_OK if result.converged else EXIT_NUMERIC


def cmd_citest(args, out) -> int:
    d = io.read_data_csv(args.data)
    pair = _labels(args.pair)
    if len(pair) != 2:
        raise InputError("--pair needs exactly two comma-separated variables")
    given = _labels(args.given) if args.given is not None else \
        [v for v in d.variables if v not in pair]
    r = ci_test_gaussian(d, pair[0], pair[1], given)
    if args.json:
        out.write(render_json(r.to_dict()))
    else:
        cond = f" | {','.join(r.given)}" if r.given else ""
        out.write(
            f"test: {r.u} _||_ {r.v}{cond}\n"
            f"statistic: {r.statistic:.3f}  df: {r.df}  p-value: {r.p_value:.4f}\n"
            f"partial correlation: {r.partial_correlation:.6f}  n: {r.n}\n")
    return EXIT_OK


def cmd_mcip_check(args, out) -> int:
    d = io.read_data_csv(args.data)
    blocks = _labels(args.blocks)
    given = _labels(args.given) if args.given is not None else None
    rep = mcip_gaussian_check(d, blocks, given, args.alpha)
    if args.json:
        out.write(render_json(rep.to_dict()))
    else:
        lines = []
        for t in rep.tests:
            lines.append(f"{t.u} _||_ {t.v} | {','.join(t.given)}: "
                         f"statistic {t.statistic:.3f}  df {t.df}  p-value {t.p_value:.4f}")
        verdict = "MCIP-consistent" if rep.consistent else "not MCIP-consistent"
        lines.append(f"verdict at alpha={rep.alpha:g}: {verdict}")
        if rep.consistent:
            lines.append(f"=> {' _||_ '.join(rep.blocks)} | {','.join(rep.given)}")
        lines.append(f"rationale: {rep.rationale}")
        out.write("\n".join(lines) + "\n")
    return EXIT_OK


def cmd_oracle_verify(args, out) -> int:
    rep = joint_oracle.verify_ensemble(
        n_graphs=args.graphs, max_vertices=args.max_vertices, seed=args.seed,
        tol=args.tol, inject_coupling=args.inject_coupling)
    if args.json:
        out.write(render_json(rep.to_dict()))
    else:
        lines = [f"graphs checked: {rep.graphs}"]
        lines += [f"{kind}: {n} statements" for kind, n in rep.checks.items()]
        lines += [f"FAIL [{f['case']}] {f['kind']}: {f['statement']}" for f in rep.failures]
        lines.append("all checks passed" if rep.passed else f"{len(rep.failures)} check(s) failed")
        out.write("\n".join(lines) + "\n")
    return EXIT_OK if rep.passed else EXIT_NUMERIC


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="mcip",
        description="Mutual conditional independence tools for Markov networks.")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_)
        sp.add_argument("--json", action="store_true", help="machine-readable output")
        sp.set_defaults(func=func)
        return sp

    sp = add("amis", cmd_amis, "list all maximal independent sets of a graph")
    sp.add_argument("graph")

    sp = add("reconstruct", cmd_reconstruct, "rebuild a graph from its maximal independent sets")
    sp.add_argument("sets", help="file with one comma-separated set per line ('-' for stdin)")

    sp = add("relations", cmd_relations, "list conditional-independence relations of a graph")
    sp.add_argument("graph")
    sp.add_argument("--kind", choices=list(RELATION_KINDS), default="mcip")

    sp = add("fit", cmd_fit, "fit a log-linear model to a contingency table")
    sp.add_argument("table")
    sp.add_argument("--model", choices=["mcip", "decomposable", "ipf"], required=True)
    sp.add_argument("--graph")
    sp.add_argument("--generators", help="comma-separated generators, variables joined by '+'")
    sp.add_argument("--blocks", help="comma-separated blocks, variables joined by '+'")
    sp.add_argument("--given")
    sp.add_argument("--tol", type=float, default=1e-8)
    sp.add_argument("--max-iter", type=int, default=1000)
    sp.add_argument("--show-fitted", action="store_true")

    sp = add("citest", cmd_citest, "Gaussian partial-correlation test of one missing edge")
    sp.add_argument("data")
    sp.add_argument("--pair", required=True)
    sp.add_argument("--given")

    sp = add("mcip-check", cmd_mcip_check, "pairwise Gaussian tests within an independent set")
    sp.add_argument("data")
    sp.add_argument("--blocks", required=True)
    sp.add_argument("--given")
    sp.add_argument("--alpha", type=float, default=0.05)

    sp = add("oracle-verify", cmd_oracle_verify, "check the relation families on random networks")
    sp.add_argument("--graphs", type=int, default=100)
    sp.add_argument("--max-vertices", type=int, default=6)
    sp.add_argument("--seed", type=int, default=0)
    sp.add_argument("--tol", type=float, default=joint_oracle.DEFAULT_TOL)
    sp.add_argument("--inject-coupling", action="store_true", help=argparse.SUPPRESS)
    return p


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        # usage errors are input errors; --help exits 0
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args, out)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except NumericError as exc:
        print(f"numeric error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
