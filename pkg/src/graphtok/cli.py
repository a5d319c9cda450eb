"""Command-line front end.

Exit codes: 0 success, 1 verification failure, 2 usage or input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import constructions as C
from .analysis import GROUPS, SuiteConfig, run_verification_suite
from .graph import GraphError, graph_from_dict, graph_to_dict, laplacian, parse_graphs
from .io import atomic_write, dump_json
from .planarity import is_planar
from .spectra import eigendecompose
from .tokenizers import (
    TokenizationError,
    adjacency_projected_tokens,
    adjacency_tokens,
    combined_tokens,
    rw_tokens,
    spectral_tokens,
    write_tokens,
)

DEFAULT_SEED = 0
GENERATE_KINDS = ("gm_pair", "bipartite_twin", "clique_join_twin", "s5_gadget", "disjointness", "bridge_pairs", "er")


class UsageError(Exception):
    pass


def _read_graphs(path: str):
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"no such graph file: {path}")
    try:
        return parse_graphs(p.read_text(encoding="utf-8"))
    except GraphError as exc:
        raise UsageError(f"{path}: {exc}") from exc


def _emit(text: str, out: str | None) -> None:
    if out:
        atomic_write(out, text)
    else:
        sys.stdout.write(text)


# -- tokenize ----------------------------------------------------------------


def _tokenize_one(g, args):
    fam = args.family
    if fam == "spectral":
        return spectral_tokens(g, args.k, args.kind, args.which, args.drop_trivial)
    if fam == "rw":
        return rw_tokens(g, args.t)
    if fam == "adjacency":
        return adjacency_tokens(g)
    if fam == "adjacency_projected":
        return adjacency_projected_tokens(g, args.d_tr, args.seed)
    parts = [
        spectral_tokens(g, args.k, args.kind, args.which, args.drop_trivial),
        rw_tokens(g, args.t),
        adjacency_tokens(g),
    ]
    return combined_tokens(parts)


def cmd_tokenize(args) -> int:
    graphs = _read_graphs(args.graph)
    if args.t < 1:
        raise UsageError("--t must be >= 1")
    if args.decimals is not None and args.decimals < 0:
        raise UsageError("--decimals must be >= 0")
    out = Path(args.out) if args.out else Path(Path(args.graph).stem + f".{args.family}.csv")
    try:
        mats = [_tokenize_one(g, args) for g in graphs]
    except TokenizationError as exc:
        raise UsageError(str(exc)) from exc
    if len(mats) == 1:
        write_tokens(mats[0], out, decimals=args.decimals)
    else:
        for i, tm in enumerate(mats):
            write_tokens(tm, out.with_name(f"{out.stem}_{i}{out.suffix}"), decimals=args.decimals)
    return 0


# -- generate ----------------------------------------------------------------


def _generate(args) -> dict:
    kind = args.kind
    rng = np.random.default_rng(args.seed)
    if kind == "gm_pair":
        return C.planar_gm_pair().to_dict()
    if kind in ("bipartite_twin", "clique_join_twin"):
        n = 6 if args.n is None else args.n
        maker = C.bipartite_twin_pair if kind == "bipartite_twin" else C.clique_join_twin_pair
        return maker(n).to_dict()
    if kind == "s5_gadget":
        k = args.k if args.k is not None else 4
        perms = C.random_permutations(k, rng)
        s, t = (int(x) for x in rng.integers(5, size=2))
        gadget = C.s5_walk_gadget(perms, s, t)
        return {
            "graph": graph_to_dict(gadget.graph),
            "perms": [list(p) for p in gadget.perms],
            "s": s,
            "t": t,
            "spanning_length": gadget.spanning_length,
            "walk_exists": C.compose_permutations(perms, s) == t,
        }
    if kind == "disjointness":
        n = 3 if args.n is None else args.n
        a = (rng.random((n, n)) < args.p).astype(int)
        b = (rng.random((n, n)) < args.p).astype(int)
        return {
            "graph": graph_to_dict(C.disjointness_triangle_gadget(a, b)),
            "a": a.tolist(),
            "b": b.tolist(),
            "intersecting": C.disjointness_holds(a, b),
        }
    if kind == "bridge_pairs":
        n = 32 if args.n is None else args.n
        graphs, labels = C.bridge_pair_dataset(n, args.count, args.p, args.seed)
        return C.dataset_to_dict(graphs, labels)
    n = 16 if args.n is None else args.n
    graphs = [C.erdos_renyi(n, args.p, rng) for _ in range(args.count)]
    if args.count == 1:
        return graph_to_dict(graphs[0])
    return C.dataset_to_dict(graphs)


def cmd_generate(args) -> int:
    if args.count < 1:
        raise UsageError("--count must be >= 1")
    try:
        obj = _generate(args)
    except (ValueError, C.GenerationError) as exc:
        raise UsageError(str(exc)) from exc
    _emit(dump_json(obj), args.out)
    return 0


# -- planarity / spectrum ----------------------------------------------------


def cmd_planarity(args) -> int:
    verdicts = [is_planar(g).to_dict() for g in _read_graphs(args.graph)]
    _emit(dump_json(verdicts[0] if len(verdicts) == 1 else verdicts), args.out)
    return 0


def cmd_spectrum(args) -> int:
    graphs = _read_graphs(args.graph)
    if len(graphs) != 1:
        raise UsageError("spectrum expects a single graph")
    eig = eigendecompose(laplacian(graphs[0], args.kind))
    lines = ["index,eigenvalue"] + [f"{i},{format(float(v), '.17g')}" for i, v in enumerate(eig.values)]
    _emit("\n".join(lines) + "\n", args.out)
    return 0


# -- verify / report ---------------------------------------------------------


def _load_pair(path: str) -> C.GadgetPair:
    p = Path(path)
    if not p.is_file():
        raise UsageError(f"no such gadget file: {path}")
    try:
        obj = json.loads(p.read_text(encoding="utf-8"))
        return C.GadgetPair(graph_from_dict(obj["g1"], "g1"), graph_from_dict(obj["g2"], "g2"), obj.get("label", "custom"))
    except (KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"{path}: not a gadget pair ({exc})") from exc


def cmd_verify(args) -> int:
    groups = tuple(args.only) if args.only else GROUPS
    cfg = SuiteConfig(groups=groups, seed=args.seed)
    if args.gm_pair:
        cfg.gm_pair = _load_pair(args.gm_pair)
    report = run_verification_suite(cfg)
    if args.out:
        atomic_write(args.out, dump_json(report.to_dict(timings=args.timings)))
    stream = sys.stderr if args.out is None and args.json else sys.stdout
    if args.json and args.out is None:
        sys.stdout.write(dump_json(report.to_dict(timings=args.timings)))
    print(report.summary(), file=stream)
    return 0 if report.overall else 1


def cmd_report(args) -> int:
    p = Path(args.report)
    if not p.is_file():
        raise UsageError(f"no such report: {args.report}")
    try:
        obj = json.loads(p.read_text(encoding="utf-8"))
        checks = obj["checks"]
        for c in checks:
            print(f"{'PASS' if c['pass'] else 'FAIL'}  {c['name']:<28} residual={c['residual']:.3e}")
        overall = bool(obj["overall"])
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"{args.report}: malformed report ({exc})") from exc
    print(f"overall: {'PASS' if overall else 'FAIL'}")
    return 0 if overall else 1


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="graphtok", description="Graph tokenizations and their verification gadgets.")
    sub = parser.add_subparsers(dest="command", required=True)

    tok = sub.add_parser("tokenize", help="tokenize a graph file into CSV + JSON sidecar")
    tok.add_argument("graph")
    tok.add_argument("--family", required=True, choices=["spectral", "rw", "adjacency", "adjacency_projected", "combined"])
    tok.add_argument("--k", type=int, default=None, help="spectral level (default: full)")
    tok.add_argument("--which", choices=["smallest", "largest"], default="smallest")
    tok.add_argument("--kind", choices=["combinatorial", "sym_normalized"], default="combinatorial")
    tok.add_argument("--drop-trivial", action="store_true")
    tok.add_argument("--t", type=int, default=8, help="random-walk length")
    tok.add_argument("--d-tr", type=int, default=8, help="projection dimension")
    tok.add_argument("--seed", type=int, default=DEFAULT_SEED)
    tok.add_argument(
        "--decimals", type=int, default=None, help="round to this many decimal places (default: 17 significant digits)"
    )
    tok.add_argument("--out")
    tok.set_defaults(func=cmd_tokenize)

    gen = sub.add_parser("generate", help="emit a gadget pair or synthetic dataset as JSON")
    gen.add_argument("kind", choices=GENERATE_KINDS)
    gen.add_argument("--n", type=int, default=None)
    gen.add_argument("--p", type=float, default=0.5)
    gen.add_argument("--k", type=int, default=None, help="number of permutations for s5_gadget")
    gen.add_argument("--count", type=int, default=1)
    gen.add_argument("--seed", type=int, default=DEFAULT_SEED)
    gen.add_argument("--out")
    gen.set_defaults(func=cmd_generate)

    pl = sub.add_parser("planarity", help="left-right planarity verdict as JSON")
    pl.add_argument("graph")
    pl.add_argument("--out")
    pl.set_defaults(func=cmd_planarity)

    sp = sub.add_parser("spectrum", help="Laplacian eigenvalues as CSV")
    sp.add_argument("graph")
    sp.add_argument("--kind", choices=["combinatorial", "sym_normalized"], default="combinatorial")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_spectrum)

    ver = sub.add_parser("verify", help="run the construction checks")
    ver.add_argument("--only", nargs="+", choices=GROUPS)
    ver.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ver.add_argument("--gm-pair", help="gadget-pair JSON to use instead of the built-in GM pair")
    ver.add_argument("--out", help="write the report JSON here")
    ver.add_argument("--json", action="store_true", help="print the report JSON to stdout")
    ver.add_argument("--no-timings", dest="timings", action="store_false", help="write elapsed_ms as null")
    ver.set_defaults(func=cmd_verify)

    rep = sub.add_parser("report", help="summarize a saved report JSON")
    rep.add_argument("report")
    rep.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"graphtok {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
