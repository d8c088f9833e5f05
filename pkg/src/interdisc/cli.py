"""Command-line interface.

Subcommands: indicators, rank, correlate, factor, subset, synth,
export-matrix.  Options may come from a JSON config file (--config); command
line flags override the file.  Exit codes: 0 success, 1 usage error, 2 data
error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .corpus import SubsetMode
from .errors import DataError, InterdiscError, NumericalError, UsageError
from .netspace import cooccurrence, cosine_matrix, distance_matrix, export_matrix_market
from .pipeline import (
    RunConfig,
    compute_indicator_table,
    load_corpus,
    ranking,
    scope_table,
    write_combined_json,
    write_correlations,
    write_factors,
    write_indicator_csv,
    write_ranking_csv,
)
from .stats import pca, spearman_matrix, varimax
from .synth import (
    BridgeSpec,
    GeneralistSpec,
    SyntheticSpec,
    generate,
    uniform_spec,
    write_corpus,
)

DEFAULT_CORRELATE_COLUMNS = [
    "gini_cited",
    "entropy_cited",
    "gini_citing",
    "entropy_citing",
]

DEFAULT_FACTOR_COLUMNS = [
    "entropy_cited",
    "gini_cited",
    "rao_stirling_one_minus_cosine_cited",
    "rao_stirling_relative_euclidean_cited",
    "betweenness_citations_cited",
    "betweenness_cosine_cited",
]


class Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage problems, not argparse's 2
        raise UsageError(message)


def _add_input_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--edges", help="edge-list CSV with header citing,cited,count")
    p.add_argument("--matrix-market", help="square integer Matrix Market file")
    p.add_argument("--names", dest="names_file", help="sidecar name file for --matrix-market")
    p.add_argument("--metadata", help="metadata CSV: name,category,total_cites,impact_factor,immediacy")
    p.add_argument("--min-count", type=int, help="drop cells with summed count below this")


def _add_run_options(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON file with RunConfig fields; flags override")
    p.add_argument("--outdir", help="output directory (default: out)")
    p.add_argument("--directions", help="comma-separated subset of cited,citing")
    p.add_argument("--metrics", help="comma-separated subset of one_minus_cosine,relative_euclidean")
    p.add_argument("--cosine-threshold", type=float, help="binarize cosine strictly above this")
    p.add_argument("--gini-include-zeros", action="store_true", default=None,
                   help="include zero cells in the Gini population (sensitivity)")
    p.add_argument("--triangle-sum", action="store_true", default=None,
                   help="sum diversity over the lower triangle only (halves values)")
    p.add_argument("--exclude-self-citations-from-p", action="store_true", default=None,
                   help="drop the diagonal from diversity distributions (sensitivity)")
    p.add_argument("-k", "--factors", dest="factors_k", type=int, help="factor count")
    p.add_argument("--jobs", type=int, help="parallel workers for betweenness")
    p.add_argument("--seed", type=int, help="random seed (synthetic data only)")


_CONFIG_FLAGS = [
    "edges",
    "matrix_market",
    "names_file",
    "metadata",
    "outdir",
    "min_count",
    "cosine_threshold",
    "gini_include_zeros",
    "triangle_sum",
    "exclude_self_citations_from_p",
    "factors_k",
    "jobs",
    "seed",
]


def resolve_config(args: argparse.Namespace) -> RunConfig:
    data: dict = {}
    if getattr(args, "config", None):
        try:
            data = json.loads(Path(args.config).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise DataError(f"config file not found: {args.config}") from None
        except json.JSONDecodeError as exc:
            raise DataError(f"config file is not valid JSON: {exc}") from None
    for name in _CONFIG_FLAGS:
        value = getattr(args, name, None)
        if value is not None:
            data[name] = value
    for name in ("directions", "metrics"):
        value = getattr(args, name, None)
        if value is not None:
            data[name] = [part.strip() for part in value.split(",") if part.strip()]
    config = RunConfig.from_dict(data)
    for direction in config.directions:
        if direction not in ("cited", "citing"):
            raise UsageError(f"unknown direction: {direction!r}")
    for metric in config.metrics:
        if metric not in ("one_minus_cosine", "relative_euclidean"):
            raise UsageError(f"unknown metric: {metric!r}")
    return config


def _outdir(config: RunConfig) -> Path:
    out = Path(config.outdir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_indicators(args) -> int:
    config = resolve_config(args)
    corpus = load_corpus(config)
    table = compute_indicator_table(corpus.matrix, corpus.registry, config)
    out = _outdir(config)
    for direction in config.directions:
        write_indicator_csv(
            table, direction, out / f"indicators_{direction}.csv", config, corpus.digests
        )
    write_combined_json(table, out / "indicators.json", config, corpus.digests)
    print(f"wrote indicators for {len(table)} journals to {out}")
    return 0


def cmd_rank(args) -> int:
    config = resolve_config(args)
    corpus = load_corpus(config)
    table = compute_indicator_table(corpus.matrix, corpus.registry, config)
    rows = ranking(
        table,
        args.indicator,
        direction=args.direction,
        top_n=args.top,
        exclude_degenerate=not args.include_degenerate,
        append_journal=args.append_journal,
        sqrt_values=args.sqrt,
    )
    out = _outdir(config)
    path = out / f"ranking_{args.indicator}.csv"
    write_ranking_csv(rows, args.indicator, path, config, corpus.digests)
    for row in rows:
        marker = " (appended)" if row.appended else ""
        print(f"{row.rank:>4}  {row.name}  {row.value:.9g}{marker}")
    print(f"wrote {path}")
    return 0


def _table_for_stats(args, config: RunConfig):
    corpus = load_corpus(config)
    table = compute_indicator_table(corpus.matrix, corpus.registry, config)
    if not args.include_degenerate:
        mask = np.ones(len(table), dtype=bool)
        for direction in config.directions:
            flag = table.flags.get(f"degenerate_{direction}")
            if flag is not None:
                mask &= ~flag
        table = table.select_rows(mask)
    return corpus, table


def cmd_correlate(args) -> int:
    config = resolve_config(args)
    columns = (
        [c.strip() for c in args.columns.split(",") if c.strip()]
        if args.columns
        else DEFAULT_CORRELATE_COLUMNS
    )
    corpus, table = _table_for_stats(args, config)
    missing = [c for c in columns if c not in table.columns]
    if missing:
        raise UsageError(f"unknown indicator columns: {missing}")
    corr = spearman_matrix(table, columns)
    out = _outdir(config)
    write_correlations(
        corr, out / "correlations.csv", out / "correlations.json", config, corpus.digests
    )
    print(f"wrote correlations for {len(columns)} columns to {out}")
    return 0


def cmd_factor(args) -> int:
    config = resolve_config(args)
    columns = (
        [c.strip() for c in args.columns.split(",") if c.strip()]
        if args.columns
        else DEFAULT_FACTOR_COLUMNS
    )
    corpus, table = _table_for_stats(args, config)
    missing = [c for c in columns if c not in table.columns]
    if missing:
        raise UsageError(f"unknown indicator columns: {missing}")
    pca_result = pca(table, columns, config.factors_k)
    solution = varimax(pca_result.loadings)
    out = _outdir(config)
    write_factors(
        pca_result,
        solution,
        out / "factors.csv",
        out / "factors.json",
        config,
        corpus.digests,
    )
    cumulative = solution.cumulative_variance[-1]
    print(
        f"{config.factors_k} factors explain {cumulative:.1f}% of the variance; "
        f"rotation converged in {solution.iterations} iterations"
        if solution.converged
        else f"{config.factors_k} factors; rotation did not converge"
    )
    print(f"wrote {out / 'factors.csv'} and {out / 'factors.json'}")
    return 0


def cmd_subset(args) -> int:
    config = resolve_config(args)
    corpus = load_corpus(config)
    if args.category:
        ids = corpus.registry.ids_in_category(args.category)
        if not ids:
            raise DataError(f"no journals in category {args.category!r}")
    elif args.ids:
        ids = [int(part) for part in args.ids.split(",") if part.strip()]
    else:
        raise UsageError("subset needs --category or --ids")
    table, registry = scope_table(corpus, ids, args.mode, config)
    out = _outdir(config)
    for direction in config.directions:
        write_indicator_csv(
            table, direction, out / f"indicators_{direction}.csv", config, corpus.digests
        )
    write_combined_json(table, out / "indicators.json", config, corpus.digests)
    print(f"wrote subset indicators ({len(table)} journals, {args.mode}) to {out}")
    return 0


def _synth_spec_from_args(args) -> SyntheticSpec:
    if args.spec_json:
        data = json.loads(Path(args.spec_json).read_text(encoding="utf-8"))
        bridges = [BridgeSpec(**b) for b in data.pop("bridges", [])]
        generalists = [GeneralistSpec(**g) for g in data.pop("generalists", [])]
        if "evenness_range" in data:
            data["evenness_range"] = tuple(data["evenness_range"])
        return SyntheticSpec(bridges=bridges, generalists=generalists, **data)
    if not args.clusters:
        raise UsageError("synth needs --clusters or --spec-json")
    sizes = [int(part) for part in args.clusters.split(",") if part.strip()]
    return uniform_spec(
        sizes,
        within_rate=args.within_rate,
        leakage_rate=args.leakage,
        n_bridges=args.bridges,
        n_generalists=args.generalists,
        generalist_volume=args.generalist_volume,
        seed=args.seed if args.seed is not None else 0,
    )


def cmd_synth(args) -> int:
    spec = _synth_spec_from_args(args)
    corpus = generate(spec)
    out = Path(args.outdir if args.outdir else "out")
    out.mkdir(parents=True, exist_ok=True)
    edges = out / "edges.csv"
    truth = out / "synth_truth.json"
    write_corpus(corpus, edges, truth)
    print(
        f"wrote {len(corpus.names)} journals, {len(corpus.counts)} cells "
        f"to {edges} (truth: {truth})"
    )
    return 0


def cmd_export_matrix(args) -> int:
    config = resolve_config(args)
    corpus = load_corpus(config)
    if args.kind == "cosine":
        sym = cosine_matrix(corpus.matrix, args.axis)
    elif args.kind == "cooccurrence":
        sym = cooccurrence(corpus.matrix, args.axis)
    else:
        sym = distance_matrix(corpus.matrix, args.axis, args.kind)
    export_matrix_market(sym, args.out)
    print(f"wrote {args.kind} matrix ({args.axis}) to {args.out}")
    return 0


def build_parser() -> Parser:
    parser = Parser(prog="interdisc", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("indicators", help="compute all indicators and write reports")
    _add_input_options(p)
    _add_run_options(p)
    p.set_defaults(func=cmd_indicators)

    p = sub.add_parser("rank", help="rank journals by one indicator")
    _add_input_options(p)
    _add_run_options(p)
    p.add_argument("indicator", help="indicator column, e.g. gini or entropy")
    p.add_argument("--direction", default="cited", choices=["cited", "citing"])
    p.add_argument("--top", type=int, default=20)
    p.add_argument("--include-degenerate", action="store_true")
    p.add_argument("--append-journal", help="also list this journal below the table")
    p.add_argument("--sqrt", action="store_true", help="display sqrt of diversity values")
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("correlate", help="Spearman correlation matrix")
    _add_input_options(p)
    _add_run_options(p)
    p.add_argument("--columns", help="comma-separated indicator columns")
    p.add_argument("--include-degenerate", action="store_true")
    p.set_defaults(func=cmd_correlate)

    p = sub.add_parser("factor", help="PCA plus varimax-rotated component matrix")
    _add_input_options(p)
    _add_run_options(p)
    p.add_argument("--columns", help="comma-separated indicator columns")
    p.add_argument("--include-degenerate", action="store_true")
    p.set_defaults(func=cmd_factor)

    p = sub.add_parser("subset", help="indicators for a journal subset")
    _add_input_options(p)
    _add_run_options(p)
    p.add_argument("--category", help="registry category to select")
    p.add_argument("--ids", help="comma-separated journal ids")
    p.add_argument(
        "--mode",
        default=SubsetMode.GLOBAL_CONTEXT.value,
        choices=[m.value for m in SubsetMode],
    )
    p.set_defaults(func=cmd_subset)

    p = sub.add_parser("synth", help="generate a synthetic corpus with ground truth")
    p.add_argument("--clusters", help="comma-separated cluster sizes, e.g. 30,30,30")
    p.add_argument("--within-rate", type=float, default=0.7)
    p.add_argument("--leakage", type=float, default=0.02)
    p.add_argument("--bridges", type=int, default=0)
    p.add_argument("--generalists", type=int, default=0)
    p.add_argument("--generalist-volume", type=float, default=12.0)
    p.add_argument("--seed", type=int, default=None)
    p.add_argument("--outdir")
    p.add_argument("--spec-json", help="full SyntheticSpec as JSON (overrides flags)")
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("export-matrix", help="export a pairwise matrix as Matrix Market")
    _add_input_options(p)
    _add_run_options(p)
    p.add_argument(
        "--kind",
        default="cosine",
        choices=["cosine", "cooccurrence", "one_minus_cosine", "relative_euclidean"],
    )
    p.add_argument("--axis", default="cited", choices=["cited", "citing"])
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_matrix)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except NumericalError as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return 3
    except InterdiscError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return exc.exit_code
    except FileNotFoundError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
