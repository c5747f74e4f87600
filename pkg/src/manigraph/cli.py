"""Command-line interface.

Subcommands wire the library into reproducible pipelines with stable file
contracts. Every file-producing command also writes a run manifest (command
name, resolved flags, input digests, tool version, seed, wall-clock) so any
output can be reproduced from the manifest alone.

Exit codes: 0 success, 1 threshold exceeded, 2 input error, 3 graph
precondition violated (e.g. disconnected input), 4 solver failure.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .centrality import betweenness
from .clustering import (
    evaluate,
    kmeans,
    load_labels_csv,
    normalize_rows,
    save_labels_csv,
)
from .eigensolver import SolverConfig
from .embedding import embed, laplacian_eigenmaps, load_embedding_csv, save_embedding_csv
from .errors import ConvergenceError, DisconnectedGraphError, InputError
from .graph import knn_graph, load_edge_list, load_features_csv, save_edge_list

EXIT_OK = 0
EXIT_THRESHOLD = 1
EXIT_INPUT = 2
EXIT_GRAPH = 3
EXIT_SOLVER = 4


def fnv1a64(data: bytes) -> str:
    """64-bit FNV-1a digest as a fixed-width hex string."""
    h = 0xCBF29CE484222325
    for byte in data:
        h ^= byte
        h = (h * 0x100000001B3) & 0xFFFFFFFFFFFFFFFF
    return f"{h:016x}"


def _digest_file(path) -> str:
    with open(path, "rb") as fh:
        return fnv1a64(fh.read())


def _write_json(path, payload: dict) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _write_manifest(args, command: str, flags: dict, inputs: list, started: float,
                    default_anchor: str | None) -> None:
    path = getattr(args, "manifest", None)
    if path is None and default_anchor:
        path = default_anchor + ".manifest.json"
    if path is None:
        return
    manifest = {
        "command": command,
        "version": __version__,
        "flags": flags,
        "inputs": {str(p): _digest_file(p) for p in inputs},
        "seed": flags.get("seed"),
        "wall_clock_ms": round((time.perf_counter() - started) * 1000.0, 3),
    }
    _write_json(path, manifest)


def _parse_size(text: str):
    if "x" in text:
        r, c = text.split("x", 1)
        return (int(r), int(c))
    return int(text)


# -- commands -------------------------------------------------------------------


def cmd_knn(args) -> int:
    started = time.perf_counter()
    X = load_features_csv(args.input, header=args.header)
    g = knn_graph(X, args.k, weighted=args.weighted)
    save_edge_list(g, args.output)
    flags = {
        "input": str(args.input),
        "k": args.k,
        "weighted": args.weighted,
        "header": args.header,
        "output": str(args.output),
        "seed": None,
        "threads": args.threads,
    }
    _write_manifest(args, "knn", flags, [args.input], started, str(args.output))
    return EXIT_OK


def cmd_embed(args) -> int:
    started = time.perf_counter()
    g = load_edge_list(args.graph)
    cfg = SolverConfig(
        k=max(args.dim, 1),
        tol=args.tol,
        max_iter=args.max_iter,
        seed=args.seed,
        preconditioner=args.preconditioner,
    )
    if args.method == "proposed":
        emb = embed(g, args.dim, cfg=cfg, literal_diagonal=args.literal_two_hop_diag)
    else:
        emb = laplacian_eigenmaps(g, args.dim, cfg=cfg)
    save_embedding_csv(emb, args.output)
    diagnostics = dict(emb.diagnostics)
    diagnostics["method"] = emb.method
    diagnostics["eigenvalues"] = [float(v) for v in emb.eigenvalues]
    diagnostics["wall_clock_ms"] = round((time.perf_counter() - started) * 1000.0, 3)
    if args.diagnostics:
        _write_json(args.diagnostics, diagnostics)
    flags = {
        "graph": str(args.graph),
        "dim": args.dim,
        "method": args.method,
        "tol": args.tol,
        "max_iter": args.max_iter,
        "seed": args.seed,
        "preconditioner": args.preconditioner,
        "literal_two_hop_diag": args.literal_two_hop_diag,
        "output": str(args.output),
        "diagnostics": str(args.diagnostics) if args.diagnostics else None,
        "threads": args.threads,
    }
    _write_manifest(args, "embed", flags, [args.graph], started, str(args.output))
    return EXIT_OK


def cmd_vbc(args) -> int:
    started = time.perf_counter()
    g = load_edge_list(args.graph)
    report = betweenness(g, ordered=args.ordered, threads=args.threads)
    payload = report.summary()
    json.dump(payload, sys.stdout)
    sys.stdout.write("\n")
    flags = {
        "graph": str(args.graph),
        "ordered": args.ordered,
        "threshold": args.threshold,
        "seed": None,
        "threads": args.threads,
    }
    _write_manifest(args, "vbc", flags, [args.graph], started, None)
    if args.threshold is not None and report.vbc > args.threshold:
        return EXIT_THRESHOLD
    return EXIT_OK


def cmd_cluster(args) -> int:
    started = time.perf_counter()
    P = load_embedding_csv(args.embedding)
    if args.clusters < 1:
        raise InputError(f"--clusters must be >= 1, got {args.clusters}")
    points = P if args.raw_coords else normalize_rows(P)
    labels = kmeans(points, args.clusters, restarts=args.restarts,
                    seed=args.seed, threads=args.threads)
    save_labels_csv(labels, args.output)
    flags = {
        "embedding": str(args.embedding),
        "clusters": args.clusters,
        "restarts": args.restarts,
        "raw_coords": args.raw_coords,
        "seed": args.seed,
        "output": str(args.output),
        "threads": args.threads,
    }
    _write_manifest(args, "cluster", flags, [args.embedding], started, str(args.output))
    return EXIT_OK


def cmd_eval(args) -> int:
    started = time.perf_counter()
    pred = load_labels_csv(args.pred)
    truth = load_labels_csv(args.truth)
    if pred.size != truth.size:
        raise InputError(
            f"label files disagree on length: {pred.size} vs {truth.size}"
        )
    report = evaluate(pred, truth, nmi_norm=args.nmi_norm)
    json.dump(report.to_dict(), sys.stdout)
    sys.stdout.write("\n")
    flags = {
        "pred": str(args.pred),
        "truth": str(args.truth),
        "nmi_norm": args.nmi_norm,
        "seed": None,
    }
    _write_manifest(args, "eval", flags, [args.pred, args.truth], started, None)
    return EXIT_OK


def cmd_pipeline(args) -> int:
    started = time.perf_counter()
    g = load_edge_list(args.graph)
    cfg = SolverConfig(
        k=max(args.dim, 1),
        tol=args.tol,
        max_iter=args.max_iter,
        seed=args.seed,
        preconditioner=args.preconditioner,
    )
    if args.method == "proposed":
        emb = embed(g, args.dim, cfg=cfg)
    else:
        emb = laplacian_eigenmaps(g, args.dim, cfg=cfg)
    prefix = str(args.output_prefix)
    emb_path = prefix + ".embedding.csv"
    labels_path = prefix + ".labels.csv"
    save_embedding_csv(emb, emb_path)
    points = emb.P if args.raw_coords else normalize_rows(emb.P)
    labels = kmeans(points, args.clusters, restarts=args.restarts,
                    seed=args.seed, threads=args.threads)
    save_labels_csv(labels, labels_path)
    inputs = [args.graph]
    if args.truth:
        truth = load_labels_csv(args.truth)
        if truth.size != labels.size:
            raise InputError(
                f"truth labels have length {truth.size}, graph has {labels.size} nodes"
            )
        report = evaluate(truth=truth, pred=labels)
        _write_json(prefix + ".metrics.json", report.to_dict())
        inputs.append(args.truth)
    diagnostics = dict(emb.diagnostics)
    diagnostics["method"] = emb.method
    diagnostics["wall_clock_ms"] = round((time.perf_counter() - started) * 1000.0, 3)
    _write_json(prefix + ".diagnostics.json", diagnostics)
    flags = {
        "graph": str(args.graph),
        "dim": args.dim,
        "method": args.method,
        "clusters": args.clusters,
        "restarts": args.restarts,
        "raw_coords": args.raw_coords,
        "truth": str(args.truth) if args.truth else None,
        "tol": args.tol,
        "max_iter": args.max_iter,
        "seed": args.seed,
        "preconditioner": args.preconditioner,
        "output_prefix": prefix,
        "threads": args.threads,
    }
    _write_manifest(args, "pipeline", flags, inputs, started, prefix)
    return EXIT_OK


# -- parser ---------------------------------------------------------------------


def _add_solver_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--tol", type=float, default=1e-8, help="residual tolerance")
    p.add_argument("--max-iter", type=int, default=500, help="iteration budget")
    p.add_argument("--seed", type=int, default=42, help="RNG seed")
    p.add_argument(
        "--preconditioner", choices=("jacobi", "none"), default="jacobi",
        help="residual preconditioner",
    )


def build_parser() -> argparse.ArgumentParser:
    root = argparse.ArgumentParser(
        prog="manigraph",
        description="Spectral embedding toolkit for manifold-like graphs",
    )
    root.add_argument("--version", action="version", version=f"manigraph {__version__}")
    sub = root.add_subparsers(dest="command", required=True)

    p = sub.add_parser("knn", help="build a kNN graph from a feature CSV")
    p.add_argument("--input", required=True, help="feature CSV, one sample per row")
    p.add_argument("--header", action="store_true", help="skip the first CSV row")
    p.add_argument("--k", type=int, required=True, help="neighbors per point")
    grp = p.add_mutually_exclusive_group()
    grp.add_argument("--weighted", dest="weighted", action="store_true", default=True,
                     help="Gaussian edge weights (default)")
    grp.add_argument("--unweighted", dest="weighted", action="store_false",
                     help="unit edge weights")
    p.add_argument("--output", required=True, help="edge-list TSV to write")
    p.add_argument("--manifest", default=None)
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_knn)

    p = sub.add_parser("embed", help="embed a graph into K dimensions")
    p.add_argument("--graph", required=True, help="edge-list TSV")
    p.add_argument("--dim", type=int, required=True, help="embedding dimension K")
    p.add_argument("--method", choices=("proposed", "le"), default="proposed")
    p.add_argument("--literal-two-hop-diag", action="store_true",
                   help="debug: literal per-set diagonal in the repulsion matrix")
    _add_solver_flags(p)
    p.add_argument("--output", required=True, help="embedding CSV to write")
    p.add_argument("--diagnostics", default=None, help="diagnostics JSON to write")
    p.add_argument("--manifest", default=None)
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_embed)

    p = sub.add_parser("vbc", help="betweenness-variance manifold gate")
    p.add_argument("--graph", required=True, help="edge-list TSV")
    p.add_argument("--ordered", action="store_true",
                   help="count ordered endpoint pairs (doubles scores)")
    p.add_argument("--threshold", type=float, default=None,
                   help="exit 1 if the variance exceeds this value")
    p.add_argument("--manifest", default=None)
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_vbc)

    p = sub.add_parser("cluster", help="k-means on an embedding CSV")
    p.add_argument("--embedding", required=True)
    p.add_argument("--clusters", type=int, required=True)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--raw-coords", action="store_true",
                   help="cluster raw coordinates instead of unit-normalized rows")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--output", required=True, help="labels CSV to write")
    p.add_argument("--manifest", default=None)
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("eval", help="clustering agreement metrics")
    p.add_argument("--pred", required=True, help="predicted labels CSV")
    p.add_argument("--truth", required=True, help="ground-truth labels CSV")
    p.add_argument("--nmi-norm", choices=("arithmetic", "geometric"),
                   default="arithmetic")
    p.add_argument("--manifest", default=None)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("pipeline", help="embed, cluster, and evaluate in one run")
    p.add_argument("--graph", required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--method", choices=("proposed", "le"), default="proposed")
    p.add_argument("--clusters", type=int, required=True)
    p.add_argument("--restarts", type=int, default=20)
    p.add_argument("--raw-coords", action="store_true")
    p.add_argument("--truth", default=None, help="optional ground-truth labels CSV")
    _add_solver_flags(p)
    p.add_argument("--output-prefix", required=True)
    p.add_argument("--manifest", default=None)
    p.add_argument("--threads", type=int, default=None)
    p.set_defaults(func=cmd_pipeline)
    return root


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code not in (0, None) else EXIT_OK
    if getattr(args, "threads", None) is not None and args.threads < 1:
        print("error: --threads must be >= 1", file=sys.stderr)
        return EXIT_INPUT
    try:
        return args.func(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except DisconnectedGraphError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_GRAPH
    except ConvergenceError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_SOLVER


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
