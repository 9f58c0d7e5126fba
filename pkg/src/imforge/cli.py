"""Batch driver: generate or load a graph, certify it spectrally, run a
construction pipeline, verify the emitted certificate, and write artifacts.

Every run is reproducible from its flags: one root seed derives every
stream, certificates serialize canonically, and the metrics CSV is
byte-stable apart from the wall-clock column.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import os
import sys
import time
from typing import Optional

from . import generators
from .certify import EmbeddingCertificate, verify
from .errors import ImforgeError
from .graphs import Graph
from .immersion_dense import build_dense_immersion
from .immersion_medium import build_medium_immersion
from .gadgets import bipartite_k3_immersion
from .nibble import edge_disjoint_triangles, triangle_hypergraph
from .spectral import adjacency_spectrum
from .subdivision import build_balanced_subdivision
from .util import derive_seed, np_rng

CSV_COLUMNS = ["command", "run_id", "n", "d", "lambda", "eta", "t", "M1", "M2",
               "reds_total", "reds_replaced_2path", "pairs_3path", "stuck",
               "achieved_order", "seconds"]


def thread_cap() -> int:
    raw = os.environ.get("IMFORGE_THREADS", "1")
    try:
        cap = int(raw)
    except ValueError:
        raise ImforgeError(f"IMFORGE_THREADS must be an integer, got {raw!r}")
    if cap < 1:
        raise ImforgeError("IMFORGE_THREADS must be at least 1")
    return cap


def run_id_for(command: str, payload: dict) -> str:
    blob = json.dumps({"command": command, **payload}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def write_metrics(path: Optional[str], rows: list[dict]) -> None:
    if not path:
        return
    exists = os.path.exists(path)
    with open(path, "a", newline="", encoding="ascii") as fh:
        writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
        if not exists:
            writer.writeheader()
        for row in rows:
            writer.writerow({col: row.get(col, "") for col in CSV_COLUMNS})


def resolve_graph(args, seed: int) -> tuple[Graph, dict]:
    if getattr(args, "graph", None):
        return generators.load_graph(args.graph), {"source": args.graph}
    if getattr(args, "q", None):
        return generators.paley(args.q), {"source": f"paley({args.q})"}
    if getattr(args, "n", None) and getattr(args, "d", None):
        g = generators.random_regular(args.n, args.d,
                                      derive_seed(seed, "gen:random-regular"))
        return g, {"source": f"random_regular({args.n},{args.d})"}
    raise ImforgeError("supply --graph PATH, --q Q, or both --n and --d")


def emit(path: Optional[str], text: str) -> None:
    if path:
        with open(path, "w", encoding="ascii") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


def cmd_gen(args) -> int:
    if args.kind == "paley":
        g = generators.paley(args.q)
    else:
        g = generators.random_regular(args.n, args.d,
                                      derive_seed(args.seed, "gen:random-regular"))
    if args.out:
        generators.save_graph(g, args.out)
    else:
        sys.stdout.write(f"{g.n} {g.m}\n")
    return 0


def cmd_spectral(args) -> int:
    g, _ = resolve_graph(args, args.seed)
    report = adjacency_spectrum(g, tol=args.tol)
    emit(args.out, report.to_json())
    return 0


def _finish_pipeline(args, g, report, cert, row_fields, started) -> int:
    rep = verify(g, cert)
    if args.out:
        emit(args.out, cert.to_json())
    if args.report:
        emit(args.report, rep.to_json())
    seconds = time.time() - started
    row = {"command": row_fields.pop("command"),
           "run_id": run_id_for(row_fields["source"],
                                {k: str(v) for k, v in row_fields.items()} |
                                {"seed": args.seed}),
           "n": g.n, "d": report.d, "lambda": f"{report.lam:.6f}",
           "seconds": f"{seconds:.3f}"}
    row.update({k: v for k, v in row_fields.items() if k in CSV_COLUMNS})
    write_metrics(args.metrics, [row])
    if args.mode == "strict":
        return 0 if rep.valid else 1
    return 0 if rep.valid else 1


def cmd_immerse_medium(args) -> int:
    started = time.time()
    g, meta = resolve_graph(args, args.seed)
    report = adjacency_spectrum(g)
    h_params = None
    if args.h1 is not None or args.h2 is not None or args.h3 is not None:
        if None in (args.h1, args.h2, args.h3):
            raise ImforgeError("--h1/--h2/--h3 must be given together")
        h_params = (args.h1, args.h2, args.h3)
    cert, diag = build_medium_immersion(
        g, report, eta=args.eta, seed=args.seed, mode=args.mode, y=args.y,
        h_params=h_params, target_order=args.target, max_len=args.max_len)
    fields = {"command": "immerse-medium", "source": meta["source"],
              "eta": args.eta, "t": diag.h_params[0], "M1": 0, "M2": 0,
              "reds_total": 0, "reds_replaced_2path": 0,
              "pairs_3path": 0, "stuck": diag.pairs_missing,
              "achieved_order": diag.achieved_order}
    return _finish_pipeline(args, g, report, cert, fields, started)


def cmd_immerse_dense(args) -> int:
    started = time.time()
    g, meta = resolve_graph(args, args.seed)
    report = adjacency_spectrum(g)
    cert, diag = build_dense_immersion(g, report, eta=args.eta,
                                       seed=args.seed, mode=args.mode)
    fields = {"command": "immerse-dense", "source": meta["source"],
              "eta": args.eta, "t": diag.t, "M1": diag.m1, "M2": diag.m2,
              "reds_total": diag.reds_total,
              "reds_replaced_2path": diag.reds_replaced_2path,
              "pairs_3path": diag.pairs_3path, "stuck": diag.stuck,
              "achieved_order": diag.achieved_order}
    return _finish_pipeline(args, g, report, cert, fields, started)


def cmd_subdivide(args) -> int:
    started = time.time()
    g, meta = resolve_graph(args, args.seed)
    report = adjacency_spectrum(g)
    cert, diag = build_balanced_subdivision(
        g, report, eta=args.eta, eps=args.eps, seed=args.seed,
        mode=args.mode, variant=args.variant)
    fields = {"command": "subdivide", "source": meta["source"],
              "eta": args.eta, "t": diag.t, "M1": 0, "M2": 0,
              "reds_total": 0, "reds_replaced_2path": 0,
              "pairs_3path": 0, "stuck": diag.failed_pairs,
              "achieved_order": diag.achieved_order}
    return _finish_pipeline(args, g, report, cert, fields, started)


def cmd_k3_bipartite(args) -> int:
    started = time.time()
    rng = np_rng(args.seed, "k3-bipartite-host")
    n1, n2 = args.n1, args.n2
    if args.density >= 1.0:
        edges = [(i, n1 + j) for i in range(n1) for j in range(n2)]
    else:
        mask = rng.random((n1, n2)) < args.density
        edges = [(i, n1 + j) for i in range(n1) for j in range(n2) if mask[i, j]]
    from .graphs import build_graph, pair_density

    g = build_graph(n1 + n2, edges)
    a_side, b_side = list(range(n1)), list(range(n1, n1 + n2))
    p = args.p
    if p is None:
        alpha = pair_density(g, a_side, b_side)
        p = int(min(alpha * n1 / 16, alpha * alpha * n2 / 192))
    cert = bipartite_k3_immersion(g, a_side, b_side, p=p, seed=args.seed,
                                  mode=args.mode)
    report = adjacency_spectrum(g) if args.metrics else None
    rep = verify(g, cert)
    if args.out:
        emit(args.out, cert.to_json())
    if args.report:
        emit(args.report, rep.to_json())
    if args.metrics:
        seconds = time.time() - started
        write_metrics(args.metrics, [{
            "command": "k3-bipartite",
            "run_id": run_id_for("k3", {"n1": n1, "n2": n2, "p": p, "seed": args.seed}),
            "n": g.n, "d": report.d if report else "",
            "lambda": f"{report.lam:.6f}" if report else "",
            "eta": "", "t": p, "M1": 0, "M2": 0, "reds_total": 0,
            "reds_replaced_2path": 0, "pairs_3path": 0, "stuck": 0,
            "achieved_order": len(cert.branch), "seconds": f"{seconds:.3f}"}])
    return 0 if rep.valid else 1


def cmd_nibble(args) -> int:
    g, _ = resolve_graph(args, args.seed)
    sizes = [int(x) for x in args.parts.split(",")]
    if len(sizes) != 3 or sum(sizes) > g.n:
        raise ImforgeError("--parts must be three sizes summing to at most n")
    bounds = [0, sizes[0], sizes[0] + sizes[1], sum(sizes)]
    parts = tuple(range(bounds[i], bounds[i + 1]) for i in range(3))
    if args.dump:
        emit(args.dump, triangle_hypergraph(g, parts).dump())
    triangles, uncovered, diag = edge_disjoint_triangles(
        g, parts, beta=args.beta, seed=args.seed)
    payload = {"triangles": [list(t) for t in triangles],
               "uncovered": [list(e) for e in uncovered],
               "diagnostics": {k: v for k, v in diag.items()}}
    emit(args.out, json.dumps(payload, sort_keys=True))
    return 0


def cmd_verify(args) -> int:
    g = generators.load_graph(args.graph)
    with open(args.cert, "r", encoding="ascii") as fh:
        cert = EmbeddingCertificate.from_json(fh.read())
    rep = verify(g, cert)
    emit(args.report, rep.to_json())
    return 0 if rep.valid else 1


def cmd_sweep(args) -> int:
    etas = [float(x) for x in args.eta_grid.split(",") if x.strip()]
    rows: list[dict] = []
    failures = 0
    for eta in etas:
        cell = argparse.Namespace(**vars(args))
        cell.eta = eta
        cell.out = None
        cell.report = None
        cell.metrics = None
        started = time.time()
        try:
            g, meta = resolve_graph(cell, cell.seed)
            report = adjacency_spectrum(g)
            if args.command_name == "immerse-dense":
                cert, diag = build_dense_immersion(g, report, eta=eta,
                                                   seed=cell.seed, mode=cell.mode)
                stats = {"t": diag.t, "M1": diag.m1, "M2": diag.m2,
                         "reds_total": diag.reds_total,
                         "reds_replaced_2path": diag.reds_replaced_2path,
                         "pairs_3path": diag.pairs_3path, "stuck": diag.stuck,
                         "achieved_order": diag.achieved_order}
            else:
                cert, diag = build_balanced_subdivision(
                    g, report, eta=eta, seed=cell.seed, mode=cell.mode)
                stats = {"t": diag.t, "M1": 0, "M2": 0, "reds_total": 0,
                         "reds_replaced_2path": 0, "pairs_3path": 0,
                         "stuck": diag.failed_pairs,
                         "achieved_order": diag.achieved_order}
            valid = verify(g, cert).valid
            if not valid:
                failures += 1
            rows.append({"command": args.command_name,
                         "run_id": run_id_for(args.command_name,
                                              {"eta": eta, "seed": cell.seed,
                                               "source": meta["source"]}),
                         "n": g.n, "d": report.d, "lambda": f"{report.lam:.6f}",
                         "eta": eta, **stats,
                         "seconds": f"{time.time() - started:.3f}"})
        except ImforgeError as err:
            failures += 1
            rows.append({"command": args.command_name,
                         "run_id": run_id_for(args.command_name,
                                              {"eta": eta, "seed": args.seed,
                                               "error": str(err)}),
                         "eta": eta, "achieved_order": 0,
                         "seconds": f"{time.time() - started:.3f}"})
    write_metrics(args.metrics, rows)
    if not args.metrics:
        writer = csv.DictWriter(sys.stdout, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for row in rows:
            writer.writerow({col: row.get(col, "") for col in CSV_COLUMNS})
    return 0


def _add_common(sub, graph_inputs=True):
    sub.add_argument("--seed", type=int, default=0)
    sub.add_argument("--mode", choices=["strict", "best-effort"],
                     default="best-effort")
    sub.add_argument("--out", default=None, help="certificate/output path")
    sub.add_argument("--report", default=None, help="verify-report JSON path")
    sub.add_argument("--metrics", default=None, help="metrics CSV path (appended)")
    if graph_inputs:
        sub.add_argument("--graph", default=None, help="edge-list file")
        sub.add_argument("--q", type=int, default=None, help="quadratic-residue modulus")
        sub.add_argument("--n", type=int, default=None)
        sub.add_argument("--d", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="imforge",
        description="clique immersions and balanced subdivisions in "
                    "certified regular graphs")
    subs = parser.add_subparsers(dest="command", required=True)

    gen = subs.add_parser("gen", help="generate a graph file")
    gen.add_argument("--kind", choices=["random-regular", "paley"], required=True)
    gen.add_argument("--n", type=int, default=None)
    gen.add_argument("--d", type=int, default=None)
    gen.add_argument("--q", type=int, default=None)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", default=None)
    gen.set_defaults(func=cmd_gen)

    spec = subs.add_parser("spectral", help="spectral report for a graph")
    _add_common(spec)
    spec.add_argument("--tol", type=float, default=None)
    spec.set_defaults(func=cmd_spectral)

    med = subs.add_parser("immerse-medium", help="unit-based clique immersion")
    _add_common(med)
    med.add_argument("--eta", type=float, required=True)
    med.add_argument("--y", type=float, default=1.0)
    med.add_argument("--h1", type=int, default=None)
    med.add_argument("--h2", type=int, default=None)
    med.add_argument("--h3", type=int, default=None)
    med.add_argument("--target", type=int, default=None)
    med.add_argument("--max-len", type=int, default=None)
    med.set_defaults(func=cmd_immerse_medium)

    den = subs.add_parser("immerse-dense", help="partition-based clique immersion")
    _add_common(den)
    den.add_argument("--eta", type=float, required=True)
    den.set_defaults(func=cmd_immerse_dense)

    sub = subs.add_parser("subdivide", help="balanced clique subdivision")
    _add_common(sub)
    sub.add_argument("--eta", type=float, required=True)
    sub.add_argument("--eps", type=float, default=0.05)
    sub.add_argument("--variant", choices=["d0-3", "d0-power"], default="d0-3")
    sub.set_defaults(func=cmd_subdivide)

    k3 = subs.add_parser("k3-bipartite", help="length-4 clique immersion in a "
                                              "bipartite host")
    k3.add_argument("--n1", type=int, required=True)
    k3.add_argument("--n2", type=int, required=True)
    k3.add_argument("--density", type=float, default=1.0)
    k3.add_argument("--p", type=int, default=None)
    k3.add_argument("--seed", type=int, default=0)
    k3.add_argument("--mode", choices=["strict", "best-effort"],
                    default="best-effort")
    k3.add_argument("--out", default=None)
    k3.add_argument("--report", default=None)
    k3.add_argument("--metrics", default=None)
    k3.set_defaults(func=cmd_k3_bipartite)

    nib = subs.add_parser("nibble", help="edge-disjoint triangles of a "
                                         "tripartite graph")
    _add_common(nib)
    nib.add_argument("--parts", required=True, help="three part sizes a,b,c")
    nib.add_argument("--beta", type=float, default=0.2)
    nib.add_argument("--dump", default=None, help="hypergraph dump path")
    nib.set_defaults(func=cmd_nibble)

    ver = subs.add_parser("verify", help="verify a certificate against a graph")
    ver.add_argument("--graph", required=True)
    ver.add_argument("--cert", required=True)
    ver.add_argument("--report", default=None)
    ver.set_defaults(func=cmd_verify)

    swp = subs.add_parser("sweep", help="run a pipeline over an eta grid")
    _add_common(swp)
    swp.add_argument("--command-name", choices=["immerse-dense", "subdivide"],
                     required=True)
    swp.add_argument("--eta-grid", required=True, help="comma-separated etas")
    swp.set_defaults(func=cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        thread_cap()
        return args.func(args)
    except ImforgeError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except OSError as err:
        print(f"io error: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
