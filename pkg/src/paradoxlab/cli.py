"""Command-line front end.

Exit codes: 0 success, 1 I/O failure, 2 invalid configuration, 3 numerical
degeneracy. Failures also print a one-line JSON object on stderr.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import secrets
import sys
from pathlib import Path

import numpy as np

from paradoxlab import __version__
from paradoxlab.errors import DegenerateComponentError, IngestError, ParadoxError
from paradoxlab.graph import AttributedGraph, build_undirected, filter_min_degree, load_snapshot, save_snapshot
from paradoxlab.groups import analyze_subjects, group_report
from paradoxlab.ingest import (
    lexicon_swb_score,
    read_attributes_csv,
    read_corpus,
    read_edge_list,
    read_lexicon,
    render_report,
    write_attributes_csv,
)
from paradoxlab.metrics import correlate_degree_attribute
from paradoxlab.mixture import GroupLabel, build_plane_points, demarcate, fit_gmm_em, node_labels
from paradoxlab.reports import ParadoxReport, Report
from paradoxlab.resampling import (
    STATISTICS,
    bootstrap,
    null_model,
    percentile_ci,
    summarize,
    write_distribution_csv,
)
from paradoxlab import synth

logger = logging.getLogger("paradoxlab")

EXIT_OK, EXIT_IO, EXIT_CONFIG, EXIT_NUMERIC = 0, 1, 2, 3
DEFAULT_MIN_DEGREE = 15
WORKERS_ENV = "PARADOXLAB_WORKERS"


class ConfigError(ValueError):
    pass


def derive_seed(seed: int, stream: int) -> int:
    """Independent master seed for one randomized section of a run."""
    return int(np.random.SeedSequence([seed, stream]).generate_state(1, np.uint64)[0])


def _percentiles(text: str | None):
    if text is None:
        return None
    try:
        lo, hi = (float(p) for p in text.split(","))
    except ValueError as exc:
        raise ConfigError(f"--percentiles expects 'LO,HI', got {text!r}") from exc
    return lo, hi


def resolve_workers(args) -> int:
    env = os.environ.get(WORKERS_ENV)
    if env:
        try:
            args.workers = int(env)
        except ValueError as exc:
            raise ConfigError(f"{WORKERS_ENV} must be an integer, got {env!r}") from exc
    args.workers = max(1, args.workers)
    return args.workers


def resolve_seed(args) -> int:
    if getattr(args, "seed", None) is None:
        args.seed = secrets.randbits(63)
        print(f"seed: {args.seed}", file=sys.stderr)
    return args.seed


def effective_config(args) -> dict:
    cfg = {}
    for key, value in sorted(vars(args).items()):
        if key == "func":
            continue
        cfg[key] = str(value) if isinstance(value, Path) else value
    return cfg


def header(args) -> dict:
    return {"tool": "paradoxlab", "version": __version__, "seed": getattr(args, "seed", None), "config": effective_config(args)}


def load_graph(args) -> tuple[AttributedGraph, dict]:
    """Build or load the analysis graph, filter it, and attach attributes."""
    info: dict = {}
    if args.graph:
        g = load_snapshot(args.graph) if Path(args.graph).exists() else _missing(args.graph)
        if args.min_degree is None:
            args.min_degree = 0
    elif args.edges:
        edges = read_edge_list(args.edges)
        info["edge_list"] = {
            "lines": edges.lines_read,
            "edges": len(edges),
            "malformed": edges.malformed,
            "self_edges": edges.self_edges,
        }
        g = build_undirected(edges, mode=args.mode)
        if args.min_degree is None:
            args.min_degree = DEFAULT_MIN_DEGREE
    else:
        raise ConfigError("one of --edges or --graph is required")
    if args.min_degree < 0:
        raise ConfigError("--min-degree must be non-negative")
    n_before = g.n
    g = filter_min_degree(g, args.min_degree, iterate=args.kcore)
    info["filter"] = {"min_degree": args.min_degree, "kcore": args.kcore, "removed": n_before - g.n}
    if getattr(args, "attributes", None):
        table = read_attributes_csv(args.attributes)
        g = g.with_attributes(table.values)
        info["attributes"] = {
            "rows": len(table),
            "rejected": table.rejected,
            "duplicates": table.duplicates,
            "unmatched": g.meta.get("unmatched_attributes", 0),
        }
    info["graph"] = {"nodes": g.n, "edges": g.m, "attributed": int(g.has_attribute.sum())}
    return g, info


def _missing(path):
    raise IngestError(f"no such file: {path}")


def emit(report, args) -> None:
    text = render_report(report, args.format)
    if args.out:
        try:
            Path(args.out).write_text(text, encoding="utf-8")
        except OSError as exc:
            raise IngestError(f"cannot write report {args.out}: {exc}") from exc
    else:
        sys.stdout.write(text)


def _validate_resampling(args) -> None:
    if not 0.0 < args.sample_frac <= 1.0:
        raise ConfigError("--sample-frac must lie in (0, 1]")
    if not 0.0 < args.ci_level < 1.0:
        raise ConfigError("--ci-level must lie in (0, 1)")
    for name in ("bootstrap_reps", "null_reps"):
        reps = getattr(args, name, 0)
        if reps and reps < 100:
            raise ConfigError(f"--{name.replace('_', '-')} must be 0 or at least 100")


def cmd_ingest(args) -> int:
    g, info = load_graph(args)
    if args.snapshot:
        save_snapshot(g, args.snapshot)
    emit(Report("ingest", header(args), info), args)
    return EXIT_OK


def cmd_analyze(args) -> int:
    _validate_resampling(args)
    seed = resolve_seed(args)
    workers = resolve_workers(args)
    pct = _percentiles(args.percentiles)
    g, info = load_graph(args)
    sections: dict = {"input": info}
    parts = analyze_subjects(
        g, None, args.bootstrap_reps, args.sample_frac, derive_seed(seed, 0), args.ci_level, pct, workers
    )
    sections["degree_paradox"] = parts["degree_paradox"]
    sections["attribute_paradox"] = parts["attribute_paradox"]
    corr = parts["correlation"]
    if corr is not None:
        sections["correlation"] = corr
        dist = None
        if args.bootstrap_reps:
            try:
                dist = bootstrap(g, "pearson", args.sample_frac, args.bootstrap_reps, derive_seed(seed, 1), workers=workers)
            except ParadoxError as exc:
                sections["pearson_r_note"] = f"bootstrap skipped: {exc}"
        sections["pearson_r"] = summarize(corr.pearson_r, dist, "pearson_r", args.ci_level, pct, corr.n)
    if args.null_reps:
        dist = null_model(g, args.null_mode, args.null_reps, derive_seed(seed, 2), workers=workers)
        if args.dist_out:
            write_distribution_csv(dist, args.dist_out)
        ci = percentile_ci(dist, args.ci_level, pct)
        sections["null_model"] = ParadoxReport(
            dist.mean(), ci.lo, ci.hi, dist.replicates, "null_attribute_paradox", ci.level, None, dist.missing
        )
    emit(Report("analyze", header(args), sections), args)
    return EXIT_OK


def cmd_bootstrap(args) -> int:
    _validate_resampling(args)
    seed = resolve_seed(args)
    workers = resolve_workers(args)
    pct = _percentiles(args.percentiles)
    g, info = load_graph(args)
    parts = analyze_subjects(g)
    if args.statistic == "pearson":
        if parts["correlation"] is None:
            raise ParadoxError("undefined correlation")
        value = parts["correlation"].pearson_r
    else:
        value = parts[args.statistic].value
    dist = bootstrap(g, args.statistic, args.sample_frac, args.bootstrap_reps, seed, workers=workers)
    if args.dist_out:
        write_distribution_csv(dist, args.dist_out)
    rep = summarize(value, dist, args.statistic, args.ci_level, pct)
    emit(Report("bootstrap", header(args), {"input": info, args.statistic: rep}), args)
    return EXIT_OK


def cmd_nullmodel(args) -> int:
    _validate_resampling(args)
    seed = resolve_seed(args)
    workers = resolve_workers(args)
    pct = _percentiles(args.percentiles)
    g, info = load_graph(args)
    observed = analyze_subjects(g)["attribute_paradox"]
    dist = null_model(g, args.null_mode, args.null_reps, seed, workers=workers)
    if args.dist_out:
        write_distribution_csv(dist, args.dist_out)
    ci = percentile_ci(dist, args.ci_level, pct)
    null = ParadoxReport(dist.mean(), ci.lo, ci.hi, dist.replicates, "null_attribute_paradox", ci.level, None, dist.missing)
    emit(Report("nullmodel", header(args), {"input": info, "attribute_paradox": observed, "null_model": null}), args)
    return EXIT_OK


def cmd_gmm_groups(args) -> int:
    _validate_resampling(args)
    seed = resolve_seed(args)
    workers = resolve_workers(args)
    pct = _percentiles(args.percentiles)
    g, info = load_graph(args)
    plane = build_plane_points(g)
    model = fit_gmm_em(
        plane.points, tol=args.gmm_tol, max_iter=args.gmm_max_iter, seed=derive_seed(seed, 3), n_init=args.gmm_restarts
    )
    point_labels = demarcate(plane.points, model, args.radius)
    labels = node_labels(plane, point_labels, g.n)
    if args.points_out:
        _write_points(args.points_out, g, plane, point_labels)

    sections: dict = {"input": info, "gmm": model}
    counts = {lab.name.lower(): int((point_labels == lab).sum()) for lab in GroupLabel}
    sections["group_sizes"] = counts
    all_parts = analyze_subjects(
        g, None, args.bootstrap_reps, args.sample_frac, derive_seed(seed, 0), args.ci_level, pct, workers
    )
    sections["all"] = all_parts
    for k, lab in enumerate((GroupLabel.HAPPY, GroupLabel.UNHAPPY)):
        try:
            sections[lab.name.lower()] = group_report(
                g, labels, lab, args.bootstrap_reps, args.sample_frac, derive_seed(seed, 10 + k),
                args.ci_level, pct, induced=args.induced, workers=workers,
            )
        except ParadoxError as exc:
            sections[lab.name.lower()] = {"error": str(exc)}
    emit(Report("gmm-groups", header(args), sections), args)
    return EXIT_OK


def _write_points(path, g: AttributedGraph, plane, labels) -> None:
    lines = ["node,x,y,label"]
    for node, (x, y), lab in zip(plane.nodes.tolist(), plane.points.tolist(), labels.tolist()):
        lines.append(f"{g.ids[node]},{x!r},{y!r},{GroupLabel(lab).name.lower()}")
    try:
        Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
    except OSError as exc:
        raise IngestError(f"cannot write points {path}: {exc}") from exc


def synth_spec_from_args(args) -> synth.SynthSpec:
    if args.paperlike:
        return synth.paperlike_spec(args.seed)
    if args.degree_model == "pa":
        degree_model = synth.PreferentialAttachment(args.m)
    else:
        degree_model = synth.ConfigurationModel(args.gamma, args.kmin)
    if args.attr_model == "bimodal":
        attr_model = synth.Bimodal(args.mu1, args.mu2, args.sigma, args.p)
    else:
        attr_model = synth.Mono(args.mu, args.sigma)
    return synth.SynthSpec(args.n, degree_model, attr_model, args.degree_corr, args.homophily_rounds, args.seed)


def cmd_synth(args) -> int:
    if args.paperlike and args.seed is None:
        args.seed = synth.PAPERLIKE_SEED
    seed = resolve_seed(args)
    try:
        spec = synth_spec_from_args(args)
        g = synth.generate(spec)
    except (ParadoxError, ValueError) as exc:
        raise ConfigError(str(exc)) from exc
    prefix = Path(args.out_prefix)
    save_snapshot(g, f"{prefix}.pdxg")
    edges = g.edges()
    ids = g.ids
    with open(f"{prefix}.edges", "w", encoding="utf-8") as fh:
        fh.write(f"# paradoxlab synth seed={seed} n={g.n} m={g.m}\n")
        fh.writelines(f"{ids[u]} {ids[v]}\n{ids[v]} {ids[u]}\n" for u, v in edges.tolist())
    write_attributes_csv({ids[i]: g.attribute[i] for i in range(g.n)}, f"{prefix}.attributes.csv")
    print(json.dumps({"nodes": g.n, "edges": g.m, "prefix": str(prefix), "seed": seed}))
    return EXIT_OK


def cmd_score_text(args) -> int:
    lex = read_lexicon(args.lexicon)
    corpus = read_corpus(args.corpus)
    if not corpus:
        raise IngestError(f"{args.corpus}: no documents")
    scores = {node: lexicon_swb_score(docs, lex) for node, docs in corpus.items()}
    write_attributes_csv(scores, args.out)
    return EXIT_OK


def _input_options(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("input")
    g.add_argument("--edges", help="directed edge list, two IDs per line")
    g.add_argument("--graph", help="binary snapshot written by 'ingest' or 'synth'")
    g.add_argument("--attributes", help="node,value CSV")
    g.add_argument("--mode", choices=["reciprocal", "symmetrize"], default="reciprocal")
    g.add_argument("--min-degree", type=int, default=None,
                   help=f"drop nodes with fewer friends (default {DEFAULT_MIN_DEGREE} for edge lists, 0 for snapshots)")
    g.add_argument("--kcore", action="store_true", help="repeat the degree filter to a fixed point")


def _output_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", help="report path (default stdout)")
    p.add_argument("--format", choices=["json", "csv"], default="json")


def _resampling_options(p: argparse.ArgumentParser, null: bool = True) -> None:
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--workers", type=int, default=1, help=f"threads; {WORKERS_ENV} overrides")
    p.add_argument("--sample-frac", type=float, default=0.1)
    p.add_argument("--bootstrap-reps", type=int, default=5000)
    if null:
        p.add_argument("--null-reps", type=int, default=20000)
        p.add_argument("--null-mode", choices=["permute", "resample"], default="permute")
    p.add_argument("--ci-level", type=float, default=0.95)
    p.add_argument("--percentiles", default=None, metavar="LO,HI",
                   help="explicit percentile pair, e.g. 5,95, instead of the central --ci-level interval")
    p.add_argument("--dist-out", default=None, help="write the replicate distribution as one-column CSV")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="paradoxlab", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"paradoxlab {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="build, filter and snapshot a graph")
    _input_options(p)
    _output_options(p)
    p.add_argument("--snapshot", help="write the filtered graph here")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("analyze", help="paradox fractions, correlation and null model")
    _input_options(p)
    _output_options(p)
    _resampling_options(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("gmm-groups", help="fit the two-group mixture and analyze each group")
    _input_options(p)
    _output_options(p)
    _resampling_options(p, null=False)
    p.add_argument("--radius", type=float, default=2.0)
    p.add_argument("--gmm-tol", type=float, default=1e-7)
    p.add_argument("--gmm-max-iter", type=int, default=500)
    p.add_argument("--gmm-restarts", type=int, default=8)
    p.add_argument("--induced", action="store_true", help="analyze each group on its induced subgraph")
    p.add_argument("--points-out", help="CSV of plane points: node,x,y,label")
    p.set_defaults(func=cmd_gmm_groups)

    p = sub.add_parser("nullmodel", help="attribute-shuffling null distribution")
    _input_options(p)
    _output_options(p)
    _resampling_options(p)
    p.set_defaults(func=cmd_nullmodel)

    p = sub.add_parser("bootstrap", help="bootstrap distribution of one statistic")
    _input_options(p)
    _output_options(p)
    _resampling_options(p, null=False)
    p.add_argument("--statistic", choices=STATISTICS, default="attribute_paradox")
    p.set_defaults(func=cmd_bootstrap)

    p = sub.add_parser("synth", help="generate a synthetic attributed network")
    p.add_argument("--out-prefix", required=True, help="writes PREFIX.pdxg, PREFIX.edges, PREFIX.attributes.csv")
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--paperlike", action="store_true", help="the calibrated 39,110-node fixture (pinned seed unless --seed is given)")
    p.add_argument("--n", type=int, default=1000)
    p.add_argument("--degree-model", choices=["pa", "config"], default="pa")
    p.add_argument("--m", type=int, default=3)
    p.add_argument("--gamma", type=float, default=2.5)
    p.add_argument("--kmin", type=int, default=2)
    p.add_argument("--attr-model", choices=["bimodal", "mono"], default="bimodal")
    p.add_argument("--mu1", type=float, default=0.2)
    p.add_argument("--mu2", type=float, default=0.0)
    p.add_argument("--mu", type=float, default=0.0)
    p.add_argument("--sigma", type=float, default=0.05)
    p.add_argument("--p", type=float, default=0.5)
    p.add_argument("--degree-corr", type=float, default=0.0)
    p.add_argument("--homophily-rounds", type=int, default=0)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("score-text", help="lexicon SWB score per node from a node<TAB>text corpus")
    p.add_argument("--corpus", required=True)
    p.add_argument("--lexicon", required=True, help="term,polarity CSV (pos/neg)")
    p.add_argument("--out", required=True, help="node,value CSV")
    p.set_defaults(func=cmd_score_text)
    return parser


def _fail(code: int, exc: BaseException) -> int:
    print(json.dumps({"error": type(exc).__name__, "message": str(exc), "exit_code": code}), file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except ConfigError as exc:
        return _fail(EXIT_CONFIG, exc)
    except (IngestError, OSError) as exc:
        return _fail(EXIT_IO, exc)
    except DegenerateComponentError as exc:
        code = _fail(EXIT_NUMERIC, exc)
        print(json.dumps({"diagnostics": exc.diagnostics}, default=str), file=sys.stderr)
        return code
    except ParadoxError as exc:
        return _fail(EXIT_NUMERIC, exc)
    except ValueError as exc:
        return _fail(EXIT_CONFIG, exc)


if __name__ == "__main__":
    sys.exit(main())
