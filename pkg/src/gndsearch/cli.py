"""Command-line surface: generation, hypergraph export, index build, querying, bench.

Every run writes a manifest JSON next to its primary output recording the
command, the full configuration, input fingerprints, and output paths, so a
run can be reproduced byte-for-byte (timing fields excluded).

Exit codes: 0 success, 2 usage, 3 validation/format, 4 fingerprint mismatch,
5 oracle mismatch.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import statistics
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from . import __version__
from .embedding import EmbeddingTable, fallback_embeddings, load_embeddings
from .engine import EngineOptions, s3gnd_query
from .errors import FingerprintMismatchError, GndSearchError
from .graph import Graph, load_graph, save_graph
from .hypergraph import build_hypergraph, export_hypergraph, sample_pairs
from .index import build_index, compute_aux, load_index, save_index
from .semantics import (
    Aggregate,
    QueryParams,
    brute_force_s3gnd,
    dedupe_answers,
    write_answers,
)
from .workload import (
    DEFAULT_QUERIES_PER_WORKLOAD,
    KeywordDist,
    QueryGenConfig,
    SynthConfig,
    gen_queries,
    gen_synthetic,
)

USAGE_EXIT = 2
VALIDATION_EXIT = 3
FINGERPRINT_EXIT = 4
ORACLE_MISMATCH_EXIT = 5

DEFAULT_FANOUT = 16
DEFAULT_DIM = 64


class OracleMismatch(GndSearchError):
    pass


def _sha256_file(path: str | Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def _write_manifest(
    out_path: Path,
    command: str,
    args: argparse.Namespace,
    inputs: dict[str, str],
    outputs: list[str],
    timings: dict[str, float],
) -> None:
    config = {k: v for k, v in vars(args).items() if k != "func"}
    manifest = {
        "tool": f"gndsearch {__version__}",
        "command": command,
        "config": config,
        "inputs": inputs,
        "outputs": outputs,
        "timings_ms": {k: round(v * 1000.0, 3) for k, v in timings.items()},
    }
    out_path.write_text(json.dumps(manifest, indent=2, default=str) + "\n", encoding="utf-8")


def _resolve_table(spec: str, graph: Graph, dim: int, seed: int) -> EmbeddingTable:
    if spec == "fallback":
        return fallback_embeddings(graph.keyword_domain(), dim, seed)
    return load_embeddings(spec)


def _embedding_input_entry(spec: str) -> dict[str, str]:
    return {} if spec == "fallback" else {spec: _sha256_file(spec)}


# -- commands -------------------------------------------------------------------


def cmd_gen_graph(args) -> int:
    cfg = SynthConfig(
        n=args.n,
        ring_k=args.ring_k,
        p_shortcut=args.p_shortcut,
        sigma_size=args.sigma,
        kw_per_vertex=args.kw_per_vertex,
        kw_dist=KeywordDist.parse(args.kw_dist),
        weight_range=(args.weight_min, args.weight_max),
        seed=args.seed,
    )
    started = time.perf_counter()
    g = gen_synthetic(cfg)
    out = Path(args.out)
    save_graph(g, out)
    _write_manifest(
        out.with_suffix(out.suffix + ".manifest.json"),
        "gen-graph",
        args,
        inputs={},
        outputs=[str(out)],
        timings={"generate": time.perf_counter() - started},
    )
    print(f"wrote {out}: {g}")
    return 0


def cmd_gen_queries(args) -> int:
    g = load_graph(args.graph)
    cfg = QueryGenConfig(
        qsize=args.qsize,
        kw_sample_rate=args.kw_rate,
        edge_sample_rate=args.edge_rate,
        seed=args.seed,
    )
    started = time.perf_counter()
    queries = gen_queries(g, cfg, args.count)
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs = []
    for i, q in enumerate(queries):
        path = out_dir / f"query_{i:03d}.txt"
        save_graph(q, path)
        outputs.append(str(path))
    _write_manifest(
        out_dir / "manifest.json",
        "gen-queries",
        args,
        inputs={args.graph: _sha256_file(args.graph)},
        outputs=outputs,
        timings={"generate": time.perf_counter() - started},
    )
    print(f"wrote {len(queries)} queries to {out_dir}")
    return 0


def cmd_build(args) -> int:
    g = load_graph(args.graph)
    table = _resolve_table(args.embeddings, g, args.dim, args.seed)
    t0 = time.perf_counter()
    aux = compute_aux(g, table)
    t1 = time.perf_counter()
    ix = build_index(
        aux,
        fanout=args.fanout,
        max_iter=args.max_iter,
        seed=args.seed,
        embedding_fingerprint=table.fingerprint(),
        graph_fingerprint=g.fingerprint(),
    )
    t2 = time.perf_counter()
    out = Path(args.out)
    save_index(ix, out)
    _write_manifest(
        out.with_suffix(out.suffix + ".manifest.json"),
        "build",
        args,
        inputs={args.graph: _sha256_file(args.graph), **_embedding_input_entry(args.embeddings)},
        outputs=[str(out)],
        timings={"aux": t1 - t0, "index": t2 - t1},
    )
    print(
        f"indexed {g.num_vertices} vertices: height={ix.height()} "
        f"fanout={ix.fanout} dim={ix.dim} -> {out}"
    )
    return 0


def cmd_query(args) -> int:
    g = load_graph(args.graph)
    q = load_graph(args.query, kind="query")
    ix = load_index(args.index)
    table = _resolve_table(args.embeddings, g, args.dim, args.seed)
    params = QueryParams(args.delta, Aggregate.parse(args.agg))
    disabled = set(filter(None, (args.disable_prune or "").split(",")))
    try:
        options = EngineOptions.from_disabled(disabled)
    except ValueError as exc:
        raise GndSearchError(str(exc)) from exc
    if args.early_connect:
        options = EngineOptions(
            use_mbr=options.use_mbr,
            use_nd=options.use_nd,
            use_gnd=options.use_gnd,
            early_connect=True,
        )

    answers, stats = s3gnd_query(g, ix, q, table, params, options)
    result = sorted(answers)
    if args.dedupe:
        result = dedupe_answers(result)

    out = Path(args.out)
    write_answers(result, out)
    print(stats.stats_line())

    exit_code = 0
    oracle_report = None
    if args.oracle_check:
        oracle = brute_force_s3gnd(g, q, params, cap=args.oracle_cap)
        got = {a.mapping for a in answers}
        want = {a.mapping for a in oracle}
        if got == want:
            oracle_report = f"oracle MATCH ({len(want)} answers)"
            print(oracle_report)
        else:
            oracle_report = (
                f"oracle MISMATCH: engine={len(got)} oracle={len(want)} "
                f"missing={len(want - got)} spurious={len(got - want)}"
            )
            print(oracle_report, file=sys.stderr)
            exit_code = ORACLE_MISMATCH_EXIT

    _write_manifest(
        out.with_suffix(out.suffix + ".manifest.json"),
        "query",
        args,
        inputs={
            args.graph: _sha256_file(args.graph),
            args.query: _sha256_file(args.query),
            args.index: _sha256_file(args.index),
            **_embedding_input_entry(args.embeddings),
        },
        outputs=[str(out)],
        timings={"query": stats.wall_time},
    )
    return exit_code


def cmd_export_hypergraph(args) -> int:
    g = load_graph(args.graph)
    started = time.perf_counter()
    h = build_hypergraph(g)
    if h.num_hyperedges == 0:
        print("warning: graph has no keyword-bearing vertices; empty hypergraph", file=sys.stderr)
    out = Path(args.out)
    if h.num_hyperedges >= 2:
        ds = sample_pairs(h, args.base_count, args.seed)
    else:
        from .hypergraph import PairDataset

        ds = PairDataset(d1=[], d2=[], d3=[], seed=args.seed)
    export_hypergraph(h, ds, out, dim=args.dim)
    _write_manifest(
        out.with_suffix(out.suffix + ".manifest.json"),
        "export-hypergraph",
        args,
        inputs={args.graph: _sha256_file(args.graph)},
        outputs=[str(out)],
        timings={"export": time.perf_counter() - started},
    )
    print(
        f"wrote {out}: {h.num_keywords} keywords, {h.num_hyperedges} hyperedges, "
        f"pairs d1={len(ds.d1)} d2={len(ds.d2)} d3={len(ds.d3)}"
    )
    return 0


def cmd_convert(args) -> int:
    """Edge-list + labels file pair into the graph text format.

    Edge list: one ``<u> <v> [<weight>]`` per line (weight defaults to 1);
    labels: one ``<v> <kw1>,<kw2>,...`` per line, ``-`` for none. Vertices
    appearing in either file are kept; unlabeled vertices get empty sets.
    """
    keywords: dict[int, list[str]] = {}
    edges = []
    try:
        for raw in Path(args.labels).read_text(encoding="utf-8").splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split()
            if len(fields) != 2:
                raise GndSearchError(f"bad label record: {line!r}")
            vid = int(fields[0])
            keywords[vid] = [] if fields[1] == "-" else fields[1].split(",")
        for raw in Path(args.edges).read_text(encoding="utf-8").splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            fields = line.split()
            if len(fields) not in (2, 3):
                raise GndSearchError(f"bad edge record: {line!r}")
            u, v = int(fields[0]), int(fields[1])
            w = float(fields[2]) if len(fields) == 3 else 1.0
            keywords.setdefault(u, [])
            keywords.setdefault(v, [])
            edges.append((u, v, w))
    except ValueError as exc:
        raise GndSearchError(f"malformed convert input: {exc}") from exc
    g = Graph(keywords, edges)
    out = Path(args.out)
    save_graph(g, out)
    _write_manifest(
        out.with_suffix(out.suffix + ".manifest.json"),
        "convert",
        args,
        inputs={args.edges: _sha256_file(args.edges), args.labels: _sha256_file(args.labels)},
        outputs=[str(out)],
        timings={},
    )
    print(f"wrote {out}: {g}")
    return 0


_BENCH_MODES = {
    "mbr": EngineOptions(use_mbr=True, use_nd=False, use_gnd=False),
    "mbr+nd": EngineOptions(use_mbr=True, use_nd=True, use_gnd=False),
    "mbr+nd+gnd": EngineOptions(use_mbr=True, use_nd=True, use_gnd=True),
}

_GRAPH_KEYS = ("n", "ring_k", "p_shortcut", "sigma_size", "kw_per_vertex", "kw_dist", "weight_min", "weight_max")


def _bench_point(base: dict, param: str, value, seed: int, caches: dict) -> dict:
    cfg = dict(base)
    cfg[param] = value
    graph_key = tuple(cfg.get(k) for k in _GRAPH_KEYS) + (seed,)
    if graph_key not in caches:
        g = gen_synthetic(
            SynthConfig(
                n=int(cfg.get("n", 2000)),
                ring_k=int(cfg.get("ring_k", 4)),
                p_shortcut=float(cfg.get("p_shortcut", 0.1)),
                sigma_size=int(cfg.get("sigma_size", 50)),
                kw_per_vertex=int(cfg.get("kw_per_vertex", 3)),
                kw_dist=KeywordDist.parse(cfg.get("kw_dist", "uniform")),
                weight_range=(int(cfg.get("weight_min", 1)), int(cfg.get("weight_max", 5))),
                seed=seed,
            )
        )
        table = fallback_embeddings(g.keyword_domain(), int(cfg.get("dim", DEFAULT_DIM)), seed)
        ix = build_index(
            compute_aux(g, table),
            fanout=int(cfg.get("fanout", DEFAULT_FANOUT)),
            max_iter=int(cfg.get("max_iter", 3)),
            seed=seed,
        )
        caches[graph_key] = (g, table, ix)
    g, table, ix = caches[graph_key]
    queries = gen_queries(
        g,
        QueryGenConfig(qsize=int(cfg.get("qsize", 5)), seed=seed),
        int(cfg.get("query_count", DEFAULT_QUERIES_PER_WORKLOAD)),
    )
    return {"graph": g, "table": table, "index": ix, "queries": queries, "cfg": cfg}


def cmd_bench(args) -> int:
    config = json.loads(Path(args.config).read_text(encoding="utf-8"))
    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    records_path = out_dir / "bench.jsonl"
    records = []

    base = config.get("base")
    sweeps = config.get("sweeps") or {}
    modes = config.get("modes") or list(_BENCH_MODES)
    points: list[tuple[str, object]] = []
    if base is not None:
        points.append(("default", base.get("delta", 1.0)))
        for param, values in sweeps.items():
            points.extend((param, v) for v in values)

    caches: dict = {}
    rows = []
    for param, value in points:
        key = "delta" if param == "default" else param
        point = _bench_point(base, key, value, args.seed, caches)
        cfg = point["cfg"]
        agg = Aggregate.parse(cfg.get("aggregate", "max"))
        params = QueryParams(float(cfg.get("delta", 1.0)), agg)
        for mode in modes:
            options = _BENCH_MODES[mode]

            def run_one(iq):
                i, q = iq
                answers, stats = s3gnd_query(
                    point["graph"], point["index"], q, point["table"], params, options
                )
                return i, stats

            tasks = list(enumerate(point["queries"]))
            if args.workers > 1:
                with ThreadPoolExecutor(max_workers=args.workers) as pool:
                    results = list(pool.map(run_one, tasks))
            else:
                results = [run_one(t) for t in tasks]
            results.sort()
            powers = [s.pruning_power for _, s in results]
            walls = [s.wall_time * 1000.0 for _, s in results]
            for i, s in results:
                records.append(
                    {
                        "sweep": param,
                        "value": value,
                        "mode": mode,
                        "query": i,
                        "pruning_power": s.pruning_power,
                        "candidates": s.candidates_total,
                        "refined_mappings": s.refined_mappings,
                        "answers": s.answers,
                        "wall_ms": round(s.wall_time * 1000.0, 3),
                    }
                )
            rows.append(
                (
                    param,
                    value,
                    mode,
                    statistics.mean(powers) if powers else 0.0,
                    statistics.mean(walls) if walls else 0.0,
                    sum(s.candidates_total for _, s in results),
                    sum(s.answers for _, s in results),
                )
            )

    with records_path.open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec) + "\n")

    header = f"{'sweep':<14} {'value':>8} {'mode':<12} {'power':>8} {'wall_ms':>10} {'cands':>8} {'answers':>8}"
    print(header)
    print("-" * len(header))
    for param, value, mode, power, wall, cands, answers in rows:
        print(f"{param:<14} {value!s:>8} {mode:<12} {power:>8.4f} {wall:>10.2f} {cands:>8} {answers:>8}")
    if not rows:
        print("(empty corpus: nothing to run)")

    _write_manifest(
        out_dir / "manifest.json",
        "bench",
        args,
        inputs={args.config: _sha256_file(args.config)},
        outputs=[str(records_path)],
        timings={},
    )
    return 0


# -- parser ----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gndsearch",
        description="Subgraph similarity search over weighted keyword graphs.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-graph", help="generate a synthetic small-world data graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--ring-k", type=int, default=4)
    p.add_argument("--p-shortcut", type=float, default=0.1)
    p.add_argument("--sigma", type=int, default=50)
    p.add_argument("--kw-per-vertex", type=int, default=3)
    p.add_argument("--kw-dist", choices=["uniform", "gaussian", "zipf"], default="uniform")
    p.add_argument("--weight-min", type=int, default=1)
    p.add_argument("--weight-max", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_graph)

    p = sub.add_parser("gen-queries", help="extract a query workload from a data graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--qsize", type=int, default=5)
    p.add_argument("--count", type=int, default=DEFAULT_QUERIES_PER_WORKLOAD)
    p.add_argument("--kw-rate", type=float, default=0.9)
    p.add_argument("--edge-rate", type=float, default=0.7)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_gen_queries)

    p = sub.add_parser("build", help="compute auxiliary data and build the index")
    p.add_argument("--graph", required=True)
    p.add_argument("--embeddings", default="fallback", help="embedding file or 'fallback'")
    p.add_argument("--dim", type=int, default=DEFAULT_DIM, help="fallback embedding dimension")
    p.add_argument("--fanout", type=int, default=DEFAULT_FANOUT)
    p.add_argument("--max-iter", type=int, default=3)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_build)

    p = sub.add_parser("query", help="answer one query against a built index")
    p.add_argument("--graph", required=True)
    p.add_argument("--index", required=True)
    p.add_argument("--embeddings", default="fallback")
    p.add_argument("--dim", type=int, default=DEFAULT_DIM)
    p.add_argument("--query", required=True)
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--agg", choices=["max", "sum"], required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--dedupe", action="store_true")
    p.add_argument("--oracle-check", action="store_true")
    p.add_argument("--oracle-cap", type=int, default=500)
    p.add_argument("--disable-prune", default="", help="comma list from mbr,nd,gnd")
    p.add_argument("--early-connect", action="store_true")
    p.set_defaults(func=cmd_query)

    p = sub.add_parser("export-hypergraph", help="write the trainer input file")
    p.add_argument("--graph", required=True)
    p.add_argument("--base-count", type=int, default=None)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--dim", type=int, default=DEFAULT_DIM)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_hypergraph)

    p = sub.add_parser("convert", help="convert an edge-list + labels pair to the graph format")
    p.add_argument("--edges", required=True, help="lines: <u> <v> [<weight>] (default weight 1)")
    p.add_argument("--labels", required=True, help="lines: <v> <kw1>,<kw2>,... or <v> -")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_convert)

    p = sub.add_parser("bench", help="run workload sweeps from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_bench)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except FingerprintMismatchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return FINGERPRINT_EXIT
    except GndSearchError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return VALIDATION_EXIT


if __name__ == "__main__":
    sys.exit(main())
