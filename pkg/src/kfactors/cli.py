"""Command-line entry point.

Every subcommand prints one JSON summary line on stdout; anything meant for
people goes to stderr.  Exit status: 0 success, 1 structural or I/O error
(including a failed verification), 2 unsupported parameters.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Callable, Sequence

from . import io
from .errors import FactorError, UnsupportedParameters
from .experiments import (
    mean_disagreement,
    median_residuals,
    parity_obstruction_experiment,
    window_residual_experiment,
    write_csv,
)
from .generators import (
    HEX_ORACLE,
    LINE_ORACLE,
    SQUARE4_ORACLE,
    BoundariedForest,
    OracleGraph,
    gen_boundaried_forest,
    gen_oracle,
    gen_random_regular_bipartite,
    torus,
    window,
)
from .graph import FactorSubgraph, FractionalMatching, is_fractional_k_matching
from .pipeline import (
    PARITY_CONDITION,
    balanced_orientation,
    corollary_factor,
    k_factor,
    random_even_regular,
    two_factor,
)
from .rounding import random_sigma, resolve_path_components, round_to_acyclic, sigma_round
from .trees import match_forest
from .verification import verify_factor

log = logging.getLogger("kfactors")

JOBS_ENV = "KFACTORS_JOBS"
NAMED_ORACLES = {"hex": HEX_ORACLE, "line": LINE_ORACLE, "square4": SQUARE4_ORACLE}


def _summary(**fields: Any) -> None:
    sys.stdout.write(json.dumps(fields, sort_keys=True, separators=(",", ":")) + "\n")


def _ints(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _load_oracle(spec: str) -> OracleGraph:
    if spec in NAMED_ORACLES:
        return NAMED_ORACLES[spec]
    doc = io.read_json(spec)
    try:
        return gen_oracle(int(doc["m"]), doc["shifts"])
    except (KeyError, TypeError, ValueError) as exc:
        raise FactorError(f"{spec}: bad oracle spec ({exc})") from exc


def _load_matching(path: str, d: int | None, k: int) -> FractionalMatching:
    """A matching document as is, or the uniform k/d matching on a graph document."""
    doc = io.read_json(path)
    if "weights" in doc:
        return io.matching_from_dict(doc)
    G = io.graph_from_dict(doc)
    if d is None:
        d = max((G.degree(v) for v in G.interior()), default=0)
    if d == 0:
        raise FactorError("cannot build a uniform matching on a graph with no interior edges")
    return FractionalMatching.uniform(G, d, k)


class _TraceFile:
    def __init__(self, path: str | None):
        self.fh = open(path, "w") if path else None

    def __call__(self, event: dict) -> None:
        assert self.fh is not None
        self.fh.write(json.dumps(event, sort_keys=True, separators=(",", ":")) + "\n")

    @property
    def sink(self) -> Callable[[dict], None] | None:
        return self if self.fh else None

    def close(self) -> None:
        if self.fh:
            self.fh.close()


def _write_graph_outputs(args: argparse.Namespace, doc: dict, dot: str | None) -> None:
    if args.output:
        io.write_json(doc, args.output)
    if getattr(args, "dot", None) and dot is not None:
        Path(args.dot).write_text(dot)


# --- subcommands -----------------------------------------------------------


def cmd_gen(args: argparse.Namespace) -> int:
    fam = args.family
    if fam == "random":
        if args.n is None or args.d is None or args.seed is None:
            raise FactorError("gen --family random needs --n, --d and --seed")
        G = gen_random_regular_bipartite(args.n, args.d, args.seed)
        _write_graph_outputs(args, io.graph_to_dict(G), io.to_dot(G))
        _summary(command="gen", family=fam, vertices=len(G.sides), edges=len(G.edges))
    elif fam == "oracle":
        if args.radius is None:
            raise FactorError("gen --family oracle needs --radius")
        O = _load_oracle(args.oracle)
        center = args.center or [0] * O.m
        if len(center) != O.m:
            raise FactorError(f"center needs {O.m} coordinates")
        W = window(O, center, args.radius, args.seed)
        _write_graph_outputs(args, io.graph_to_dict(W.graph), io.to_dot(W.graph))
        _summary(
            command="gen", family=fam, vertices=len(W.graph.sides),
            edges=len(W.graph.edges), boundary=len(W.boundary),
        )
    elif fam == "torus":
        if args.size is None:
            raise FactorError("gen --family torus needs --size")
        G = torus(_load_oracle(args.oracle), args.size)
        _write_graph_outputs(args, io.graph_to_dict(G), io.to_dot(G))
        _summary(command="gen", family=fam, vertices=len(G.sides), edges=len(G.edges))
    else:  # forest
        spec = json.loads(args.forest_spec) if args.forest_spec else {"kind": "random"}
        if spec.get("kind") == "random" and args.seed is None:
            raise FactorError("random forests need --seed")
        F = gen_boundaried_forest(spec, args.seed or 0)
        _write_graph_outputs(args, io.forest_to_dict(F), io.to_dot(F.graph))
        _summary(command="gen", family=fam, vertices=len(F.graph.sides), stubs=len(F.stubs))
    return 0


def cmd_round(args: argparse.Namespace) -> int:
    f = _load_matching(args.input, args.d, args.k)
    trace = _TraceFile(args.emit_trace)
    try:
        if args.mode == "sigma":
            if args.seed is None:
                raise FactorError("round --mode sigma needs --seed")
            f = sigma_round(
                f, random_sigma(args.seed, args.max_rounds), max_branch=args.max_branch, trace=trace.sink
            )
        g = round_to_acyclic(f, trace=trace.sink)
    finally:
        trace.close()
    if args.resolve_paths and g.k == 1:
        g = resolve_path_components(g)
    if not is_fractional_k_matching(g):
        raise FactorError("rounding broke the vertex sums")
    _write_graph_outputs(args, io.matching_to_dict(g), io.to_dot(g.graph, g))
    support = sum(1 for w in g.weights.values() if 0 < w < g.denominator)
    _summary(command="round", mode=args.mode, support=support, integral=g.is_integral())
    return 0


def cmd_treematch(args: argparse.Namespace) -> int:
    doc = io.read_json(args.input)
    if "stubs" in doc:
        F = io.forest_from_dict(doc)
    else:
        F = BoundariedForest.from_support(io.matching_from_dict(doc))
    edges, unresolved, reps = match_forest(F)
    if F.origin is not None:
        unresolved = {F.origin[v] for v in unresolved}
    if args.emit_matching:
        io.write_json({"k": 1, "edges": sorted(edges), "unresolved": sorted(unresolved)}, args.emit_matching)
    if args.report:
        io.write_json([r.to_dict() for r in reps], args.report)
    _summary(command="treematch", edges=len(edges), unresolved=len(unresolved), bad_rays=len(reps))
    return 0


def _factor_output(args: argparse.Namespace, H: FactorSubgraph, command: str) -> int:
    if args.output:
        io.write_json(io.factor_to_dict(H), args.output)
    ok = verify_factor(H.graph, H) if not H.unresolved else None
    _summary(command=command, k=H.k, edges=len(H.edges), unresolved=len(H.unresolved), verified=ok)
    return 0


def cmd_kfactor(args: argparse.Namespace) -> int:
    if args.d % 2 == 0 and args.k % 2 == 1:
        raise UnsupportedParameters(f"d={args.d}, k={args.k}: {PARITY_CONDITION}")
    G = io.load_graph(args.input)
    trace = _TraceFile(args.emit_trace)
    try:
        H = k_factor(G, args.d, args.k, trace=trace.sink)
    finally:
        trace.close()
    return _factor_output(args, H, "kfactor")


def cmd_twofactor(args: argparse.Namespace) -> int:
    G = io.load_graph(args.input)
    return _factor_output(args, two_factor(G, args.d), "twofactor")


def cmd_corollary(args: argparse.Namespace) -> int:
    if args.input:
        G = io.multigraph_from_dict(io.read_json(args.input))
    else:
        if args.n is None or args.half_degree is None or args.seed is None:
            raise FactorError("corollary without --input needs --n, --half-degree and --seed")
        G = random_even_regular(args.n, args.half_degree, args.seed)
    O = balanced_orientation(G)
    C = corollary_factor(G, O)
    degs = set(C.degrees())
    if args.output:
        io.write_json({"graph": io.multigraph_to_dict(G), "k": C.k, "edges": sorted(C.edges)}, args.output)
    ok = degs == {C.k}
    _summary(command="corollary", orient=args.orient, k=C.k, edges=len(C.edges), verified=ok)
    return 0 if ok else 1


def cmd_verify(args: argparse.Namespace) -> int:
    G = io.load_graph(args.graph)
    H = io.factor_from_dict(io.read_json(args.factor), G)
    k = args.k if args.k is not None else H.k
    ok = verify_factor(G, H.edges, k)
    _summary(command="verify", k=k, edges=len(H.edges), verified=ok)
    if not ok:
        log.error("not a %d-factor", k)
    return 0 if ok else 1


def cmd_experiment(args: argparse.Namespace) -> int:
    O = _load_oracle(args.oracle)
    seeds = range(args.seed_base, args.seed_base + args.seeds)
    if args.kind == "residual":
        reps = window_residual_experiment(O, args.radii, seeds, k=args.k, jobs=args.jobs)
        rows = [r.row() for r in reps]
        stats = {str(r): f"{m.numerator}/{m.denominator}" for r, m in median_residuals(reps).items()}
        key = "median_residual"
    else:
        reps = parity_obstruction_experiment(O, args.radii, seeds, jobs=args.jobs)
        rows = [r.row() for r in reps]
        stats = {str(r): round(m, 6) for r, m in mean_disagreement(reps).items()}
        key = "mean_disagreement"
    if args.csv:
        write_csv(args.csv, rows)
    for row in rows:
        log.info("%s", row)
    _summary(command="experiment", kind=args.kind, runs=len(rows), **{key: stats})
    return 0


# --- parser ----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="kfactors", description=__doc__.splitlines()[0])
    p.add_argument("-v", "--verbose", action="store_true", help="log details to stderr")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a graph, window, torus or forest")
    g.add_argument("--family", choices=["random", "oracle", "torus", "forest"], required=True)
    g.add_argument("--n", type=int)
    g.add_argument("--d", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--oracle", default="hex", help="hex, line, square4 or a JSON spec file")
    g.add_argument("--center", type=_ints)
    g.add_argument("--radius", type=int)
    g.add_argument("--size", type=int)
    g.add_argument("--forest-spec", help='JSON, e.g. {"kind":"spider","legs":3,"length":4}')
    g.add_argument("-o", "--output")
    g.add_argument("--dot", help="also write Graphviz DOT here")
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("round", help="round a fractional matching to an acyclic support")
    r.add_argument("--input", required=True, help="matching document, or graph (uniform k/d weights)")
    r.add_argument("--d", type=int)
    r.add_argument("--k", type=int, default=1)
    r.add_argument("--mode", choices=["saturate", "sigma"], default="saturate")
    r.add_argument("--seed", type=int)
    r.add_argument("--max-rounds", type=int, default=50)
    r.add_argument("--max-branch", type=int)
    r.add_argument("--resolve-paths", action="store_true")
    r.add_argument("--emit-trace")
    r.add_argument("-o", "--output")
    r.add_argument("--dot")
    r.set_defaults(func=cmd_round)

    t = sub.add_parser("treematch", help="match an acyclic support")
    t.add_argument("--input", required=True, help="forest document or matching document")
    t.add_argument("--emit-matching")
    t.add_argument("--report", help="write bad-ray reports here")
    t.set_defaults(func=cmd_treematch)

    kf = sub.add_parser("kfactor", help="k-factor of a d-regular bipartite graph")
    kf.add_argument("--input", required=True)
    kf.add_argument("--d", type=int, required=True)
    kf.add_argument("--k", type=int, required=True)
    kf.add_argument("-o", "--output", "--emit", dest="output")
    kf.add_argument("--emit-trace", help="JSON-lines rounding trace")
    kf.set_defaults(func=cmd_kfactor)

    tf = sub.add_parser("twofactor", help="2-factor of a d-regular bipartite graph, d even")
    tf.add_argument("--input", required=True)
    tf.add_argument("--d", type=int, required=True)
    tf.add_argument("-o", "--output", "--emit", dest="output")
    tf.set_defaults(func=cmd_twofactor)

    c = sub.add_parser("corollary", help="2- or 4-factor of an even-regular multigraph")
    c.add_argument("--input", help="multigraph document")
    c.add_argument("--n", type=int)
    c.add_argument("--half-degree", type=int)
    c.add_argument("--seed", type=int)
    c.add_argument("--orient", choices=["euler"], default="euler")
    c.add_argument("-o", "--output")
    c.set_defaults(func=cmd_corollary)

    v = sub.add_parser("verify", help="check a factor file against a graph")
    v.add_argument("--graph", required=True)
    v.add_argument("--factor", required=True)
    v.add_argument("--k", type=int)
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("experiment", help="window experiments on an oracle graph")
    e.add_argument("kind", choices=["residual", "parity"])
    e.add_argument("--oracle", default="hex")
    e.add_argument("--radii", type=_ints, default=[8, 16, 32])
    e.add_argument("--seeds", type=int, required=True, help="number of seeds")
    e.add_argument("--seed-base", type=int, default=0)
    e.add_argument("--k", type=int, default=1)
    e.add_argument("--csv")
    e.add_argument("--jobs", type=int, default=int(os.environ.get(JOBS_ENV, "1")))
    e.set_defaults(func=cmd_experiment)
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        stream=sys.stderr,
        format="%(levelname)s %(message)s",
    )
    try:
        return args.func(args)
    except UnsupportedParameters as exc:
        log.error("%s", exc)
        _summary(command=args.command, error="unsupported", message=str(exc))
        return 2
    except (FactorError, ValueError, OSError) as exc:
        log.error("%s", exc)
        _summary(command=args.command, error=type(exc).__name__, message=str(exc))
        return 1


if __name__ == "__main__":
    sys.exit(main())
