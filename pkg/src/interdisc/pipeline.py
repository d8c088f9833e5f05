"""End-to-end runs: configuration, indicator assembly, and report files.

Every report embeds the resolved configuration and a SHA-256 digest of each
input file, and contains nothing run-dependent beyond that, so identical
inputs and options produce byte-identical outputs.
"""

from __future__ import annotations

import hashlib
import json
import warnings
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import centrality as ct
from . import vector_indicators as vi
from .corpus import (
    CitationMatrix,
    Direction,
    JournalRegistry,
    SubsetMode,
    load_edge_list,
    load_matrix_market,
    load_metadata,
    subset,
)
from .diversity import diversity_all
from .errors import DataError, UsageError
from .netspace import binarize, binarize_directed, cooccurrence_support, cosine_matrix
from .stats import (
    CorrelationMatrix,
    IndicatorTable,
    PcaResult,
    RotatedFactorSolution,
    rank_column,
    significance_stars,
)

VECTOR_INDICATORS = ["gini", "gini_normalized", "entropy", "entropy_normalized"]
BETWEENNESS_INDICATORS = [
    "betweenness_citations",
    "betweenness_citations_normalized",
    "betweenness_cosine",
    "betweenness_cosine_normalized",
]
DIVERSITY_INDICATORS = [
    "rao_stirling_one_minus_cosine",
    "rao_stirling_relative_euclidean",
]
SIZE_INDICATORS = ["degree", "total_citations"]
INDICATOR_NAMES = (
    VECTOR_INDICATORS + BETWEENNESS_INDICATORS + DIVERSITY_INDICATORS + SIZE_INDICATORS
)

METRIC_COLUMN = {
    "one_minus_cosine": "rao_stirling_one_minus_cosine",
    "relative_euclidean": "rao_stirling_relative_euclidean",
}

# Indicators where small values mean interdisciplinary, ranked ascending.
ASCENDING_INDICATORS = ("gini", "gini_normalized")

LOADING_DISPLAY_THRESHOLD = 0.1


@dataclass
class RunConfig:
    edges: str | None = None
    matrix_market: str | None = None
    names_file: str | None = None
    metadata: str | None = None
    outdir: str = "out"
    directions: tuple[str, ...] = ("cited", "citing")
    metrics: tuple[str, ...] = ("one_minus_cosine", "relative_euclidean")
    min_count: int = 1
    cosine_threshold: float = 0.0
    gini_include_zeros: bool = False
    triangle_sum: bool = False
    exclude_self_citations_from_p: bool = False
    factors_k: int = 3
    seed: int = 0
    jobs: int = 1

    def to_dict(self) -> dict:
        d = asdict(self)
        d["directions"] = list(self.directions)
        d["metrics"] = list(self.metrics)
        return d

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise UsageError(f"unknown config keys: {sorted(unknown)}")
        clean = dict(data)
        for key in ("directions", "metrics"):
            if key in clean:
                clean[key] = tuple(clean[key])
        return cls(**clean)


def file_digest(path: str | Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            h.update(chunk)
    return h.hexdigest()


@dataclass
class LoadedCorpus:
    registry: JournalRegistry
    matrix: CitationMatrix
    digests: dict[str, str] = field(default_factory=dict)
    metadata_unmatched: int = 0


def load_corpus(config: RunConfig) -> LoadedCorpus:
    if config.edges and config.matrix_market:
        raise UsageError("give either an edge list or a Matrix Market file, not both")
    if config.edges:
        registry, matrix = load_edge_list(config.edges, min_count=config.min_count)
        digests = {"edges": file_digest(config.edges)}
    elif config.matrix_market:
        registry, matrix = load_matrix_market(config.matrix_market, config.names_file)
        digests = {"matrix_market": file_digest(config.matrix_market)}
        if config.names_file:
            digests["names"] = file_digest(config.names_file)
    else:
        raise UsageError("no input file given")
    unmatched = 0
    if config.metadata:
        unmatched = load_metadata(config.metadata, registry)
        digests["metadata"] = file_digest(config.metadata)
        if unmatched:
            warnings.warn(f"{unmatched} metadata rows did not match any journal")
    return LoadedCorpus(
        registry=registry, matrix=matrix, digests=digests, metadata_unmatched=unmatched
    )


def _cosine_variant_graph(matrix: CitationMatrix, direction: Direction, threshold: float):
    if threshold == 0.0:
        return binarize(cooccurrence_support(matrix, direction))
    return binarize(cosine_matrix(matrix, direction), threshold=threshold)


def compute_indicator_table(
    matrix: CitationMatrix, registry: JournalRegistry, config: RunConfig
) -> IndicatorTable:
    """All indicators for all journals, columns suffixed by direction.

    Journals with an empty vector in a direction get NaN across that
    direction's columns and a raised degeneracy flag; single-cell journals
    keep their conventional values and the flag.
    """
    n = matrix.n
    table = IndicatorTable(
        journal_ids=list(range(n)), names=[registry.name_of(j) for j in range(n)]
    )

    raw_scores = ct.betweenness(binarize_directed(matrix), jobs=config.jobs)
    raw_norm = ct.normalize_betweenness(raw_scores, n, directed=True)

    diag = matrix.tocsr().diagonal()
    for direction_name in config.directions:
        direction = Direction(direction_name)
        axis = matrix.axis_matrix(direction)
        support = np.diff(axis.indptr)
        degenerate = support <= 1
        totals = np.asarray(axis.sum(axis=1)).ravel()
        degree = support - (diag > 0)

        gini_col = np.full(n, np.nan)
        gini_norm_col = np.full(n, np.nan)
        entropy_col = np.full(n, np.nan)
        entropy_norm_col = np.full(n, np.nan)
        for jid in range(n):
            lo, hi = axis.indptr[jid], axis.indptr[jid + 1]
            if lo == hi:
                continue
            counts = axis.data[lo:hi].astype(np.float64)
            if config.gini_include_zeros:
                population = np.zeros(n)
                population[axis.indices[lo:hi]] = counts
            else:
                population = counts
            gini_col[jid] = vi.gini_from_counts(population)
            gini_norm_col[jid] = vi.gini_normalized_from_counts(population)
            entropy_col[jid] = vi.shannon_entropy_from_counts(counts)
            entropy_norm_col[jid] = vi.entropy_normalized_from_counts(counts)

        graph = _cosine_variant_graph(matrix, direction, config.cosine_threshold)
        cos_scores = ct.betweenness(graph, jobs=config.jobs)
        cos_norm = ct.normalize_betweenness(cos_scores, n, directed=False)

        suffix = f"_{direction.value}"
        table.add_column("gini" + suffix, gini_col)
        table.add_column("gini_normalized" + suffix, gini_norm_col)
        table.add_column("entropy" + suffix, entropy_col)
        table.add_column("entropy_normalized" + suffix, entropy_norm_col)
        table.add_column("betweenness_citations" + suffix, raw_scores)
        table.add_column("betweenness_citations_normalized" + suffix, raw_norm)
        table.add_column("betweenness_cosine" + suffix, cos_scores)
        table.add_column("betweenness_cosine_normalized" + suffix, cos_norm)

        for metric in config.metrics:
            results = diversity_all(
                matrix,
                direction,
                metric,
                exclude_self_citations=config.exclude_self_citations_from_p,
                triangle_sum=config.triangle_sum,
            )
            col = np.full(n, np.nan)
            for r in results:
                if not r.missing:
                    col[r.journal_id] = r.d_value
            table.add_column(METRIC_COLUMN[metric] + suffix, col)

        deg_col = degree.astype(np.float64)
        tot_col = totals.astype(np.float64)
        deg_col[support == 0] = np.nan
        tot_col[support == 0] = np.nan
        table.add_column("degree" + suffix, deg_col)
        table.add_column("total_citations" + suffix, tot_col)
        table.add_flag("degenerate" + suffix, degenerate)
        table.add_column("support" + suffix, support.astype(np.float64))

    _attach_metadata_columns(table, registry)
    return table


def _attach_metadata_columns(table: IndicatorTable, registry: JournalRegistry) -> None:
    ids = table.journal_ids
    entries = [registry.entries[j] for j in ids]
    if any(e.total_cites is not None for e in entries):
        table.add_column(
            "total_cites",
            [np.nan if e.total_cites is None else float(e.total_cites) for e in entries],
        )
    if any(e.impact_factor is not None for e in entries):
        table.add_column(
            "impact_factor",
            [np.nan if e.impact_factor is None else e.impact_factor for e in entries],
        )
    if any(e.immediacy is not None for e in entries):
        table.add_column(
            "immediacy",
            [np.nan if e.immediacy is None else e.immediacy for e in entries],
        )


def scope_table(
    corpus: LoadedCorpus, ids: list[int], mode: SubsetMode | str, config: RunConfig
) -> tuple[IndicatorTable, JournalRegistry]:
    """Indicator table for a subset, in context or as a fresh submatrix."""
    scope = subset(corpus.matrix, corpus.registry, ids, mode)
    if scope.mode is SubsetMode.GLOBAL_CONTEXT:
        table = compute_indicator_table(corpus.matrix, corpus.registry, config)
        mask = np.zeros(len(table), dtype=bool)
        mask[scope.ids] = True
        return table.select_rows(mask), corpus.registry
    table = compute_indicator_table(scope.matrix, scope.registry, config)
    table.journal_ids = [scope.index_map[j] for j in table.journal_ids]
    return table, scope.registry


# ---------------------------------------------------------------------------
# Report formatting


def format_value(x: float) -> str:
    if x is None or (isinstance(x, float) and np.isnan(x)):
        return ""
    if isinstance(x, float):
        return f"{x:.9g}"
    return str(x)


def provenance_lines(config: RunConfig, digests: dict[str, str]) -> list[str]:
    return [
        "# config: " + json.dumps(config.to_dict(), sort_keys=True),
        "# inputs: " + json.dumps(digests, sort_keys=True),
    ]


def write_indicator_csv(
    table: IndicatorTable,
    direction: str,
    path: str | Path,
    config: RunConfig,
    digests: dict[str, str],
) -> None:
    suffix = f"_{direction}"
    # a restricted --metrics or --directions run computes fewer columns
    columns = [
        name + suffix for name in INDICATOR_NAMES if name + suffix in table.columns
    ]
    lines = provenance_lines(config, digests)
    lines.append(
        "# note: betweenness_citations is computed on the directed citation "
        "graph and is identical for the cited and citing directions"
    )
    header = ["journal_id", "name", "support", "degenerate"] + columns
    lines.append(",".join(header))
    support = table.column("support" + suffix)
    degenerate = table.flags["degenerate" + suffix]
    for i, jid in enumerate(table.journal_ids):
        row = [
            str(jid),
            _csv_quote(table.names[i]),
            str(int(support[i])),
            "1" if degenerate[i] else "0",
        ]
        row += [format_value(float(table.column(c)[i])) for c in columns]
        lines.append(",".join(row))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def _csv_quote(text: str) -> str:
    if any(ch in text for ch in ',"\n'):
        return '"' + text.replace('"', '""') + '"'
    return text


def write_combined_json(
    table: IndicatorTable,
    path: str | Path,
    config: RunConfig,
    digests: dict[str, str],
) -> None:
    payload = {
        "config": config.to_dict(),
        "inputs": digests,
        "journals": [
            {"id": jid, "name": table.names[i]} for i, jid in enumerate(table.journal_ids)
        ],
        "columns": {
            name: [None if np.isnan(v) else float(v) for v in col]
            for name, col in table.columns.items()
        },
        "flags": {name: [bool(v) for v in col] for name, col in table.flags.items()},
    }
    Path(path).write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def rank_order_for(indicator: str) -> str:
    base = indicator.removesuffix("_cited").removesuffix("_citing")
    return "ascending" if base in ASCENDING_INDICATORS else "descending"


@dataclass
class RankedRow:
    rank: int
    journal_id: int
    name: str
    value: float
    appended: bool = False


def ranking(
    table: IndicatorTable,
    indicator: str,
    direction: str = "cited",
    top_n: int = 20,
    exclude_degenerate: bool = True,
    append_journal: str | None = None,
    sqrt_values: bool = False,
) -> list[RankedRow]:
    """Top journals under one indicator's ranking convention.

    Inequality-style indicators rank ascending, everything else descending;
    degenerate journals are left out unless asked for, and journals with no
    value never rank.  `append_journal` adds one named journal's row below
    the list regardless of its rank.  `sqrt_values` displays square roots
    (rank order is unchanged); it only applies to diversity indicators.
    """
    column_name = indicator if indicator in table.columns else f"{indicator}_{direction}"
    if column_name not in table.columns:
        raise UsageError(f"unknown indicator: {indicator!r}")
    if sqrt_values and not indicator.startswith("rao_stirling"):
        raise UsageError("--sqrt applies only to diversity indicators")
    values = table.column(column_name).copy()
    eligible = ~np.isnan(values)
    flag = table.flags.get(f"degenerate_{direction}")
    if exclude_degenerate and flag is not None:
        eligible &= ~flag
    if not eligible.any():
        warnings.warn("all journals are degenerate or missing; ranking is empty")
        return []
    masked = np.where(eligible, values, np.nan)
    ranks = rank_column(masked, order=rank_order_for(column_name))

    order = np.argsort(ranks, kind="stable")
    rows: list[RankedRow] = []
    for idx in order:
        if not eligible[idx]:
            continue
        if len(rows) >= top_n:
            break
        value = float(values[idx])
        rows.append(
            RankedRow(
                rank=len(rows) + 1,
                journal_id=table.journal_ids[idx],
                name=table.names[idx],
                value=np.sqrt(value) if sqrt_values else value,
            )
        )
    if append_journal is not None:
        target = _find_row(table, append_journal)
        if target is None:
            raise DataError(f"journal to append not found: {append_journal!r}")
        if not any(r.journal_id == table.journal_ids[target] and not r.appended for r in rows):
            value = float(values[target])
            rows.append(
                RankedRow(
                    rank=int(round(ranks[target])) if eligible[target] else 0,
                    journal_id=table.journal_ids[target],
                    name=table.names[target],
                    value=np.sqrt(value) if sqrt_values and not np.isnan(value) else value,
                    appended=True,
                )
            )
    return rows


def _find_row(table: IndicatorTable, name: str) -> int | None:
    from .corpus import canonical_name

    wanted = canonical_name(name)
    for i, journal in enumerate(table.names):
        if canonical_name(journal) == wanted:
            return i
    return None


def write_ranking_csv(
    rows: list[RankedRow],
    indicator: str,
    path: str | Path,
    config: RunConfig,
    digests: dict[str, str],
) -> None:
    lines = provenance_lines(config, digests)
    lines.append(f"# indicator: {indicator} (order: {rank_order_for(indicator)})")
    lines.append("rank,journal_id,name,value,appended")
    for row in rows:
        lines.append(
            ",".join(
                [
                    str(row.rank),
                    str(row.journal_id),
                    _csv_quote(row.name),
                    format_value(row.value),
                    "1" if row.appended else "0",
                ]
            )
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_correlations(
    corr: CorrelationMatrix,
    csv_path: str | Path,
    json_path: str | Path,
    config: RunConfig,
    digests: dict[str, str],
) -> None:
    lines = provenance_lines(config, digests)
    lines.append("# spearman rho; stars: ** p<0.01, * p<0.05 (two-tailed)")
    k = len(corr.columns)
    lines.append(",".join([""] + corr.columns))
    for i in range(k):
        cells = [corr.columns[i]]
        for j in range(k):
            if i == j:
                cells.append("1")
            else:
                cells.append(
                    format_value(corr.rho[i, j]) + significance_stars(corr.p_values[i, j])
                )
        lines.append(",".join(cells))
    lines.append("# two-tailed p-values")
    for i in range(k):
        lines.append(
            ",".join(
                [corr.columns[i]]
                + [format_value(corr.p_values[i, j]) if i != j else "" for j in range(k)]
            )
        )
    lines.append("# pairwise complete n")
    for i in range(k):
        lines.append(
            ",".join([corr.columns[i]] + [str(int(corr.n[i, j])) for j in range(k)])
        )
    Path(csv_path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    payload = {
        "config": config.to_dict(),
        "inputs": digests,
        "columns": corr.columns,
        "rho": corr.rho.tolist(),
        "p_values": corr.p_values.tolist(),
        "n": corr.n.tolist(),
    }
    Path(json_path).write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )


def write_factors(
    pca_result: PcaResult,
    solution: RotatedFactorSolution,
    csv_path: str | Path,
    json_path: str | Path,
    config: RunConfig,
    digests: dict[str, str],
) -> None:
    lines = provenance_lines(config, digests)
    lines.append("# rotated component matrix (principal components, varimax with")
    if solution.converged:
        lines.append(
            f"# kaiser normalization); rotation converged in {solution.iterations} iterations"
        )
    else:
        lines.append(
            f"# kaiser normalization); rotation did NOT converge in {solution.iterations} iterations"
        )
    lines.append(
        "# loadings with absolute value below "
        f"{LOADING_DISPLAY_THRESHOLD} are left blank; full precision in the JSON report"
    )
    k = solution.k
    lines.append(",".join(["indicator"] + [f"component_{j + 1}" for j in range(k)]))
    for i, name in enumerate(pca_result.columns):
        cells = [name]
        for j in range(k):
            loading = solution.loadings[i, j]
            cells.append(
                format_value(loading)
                if abs(loading) >= LOADING_DISPLAY_THRESHOLD
                else ""
            )
        lines.append(",".join(cells))
    per_factor = ",".join(format_value(v) for v in solution.variance_explained)
    cumulative = ",".join(format_value(v) for v in solution.cumulative_variance)
    lines.append(f"# variance explained per rotated factor (%): {per_factor}")
    lines.append(f"# cumulative variance explained (%): {cumulative}")
    lines.append(f"# observations (listwise complete): {pca_result.n_observations}")
    Path(csv_path).write_text("\n".join(lines) + "\n", encoding="utf-8")

    payload = {
        "config": config.to_dict(),
        "inputs": digests,
        "columns": pca_result.columns,
        "k": k,
        "eigenvalues": pca_result.eigenvalues.tolist(),
        "variance_explained_components": pca_result.variance_explained.tolist(),
        "unrotated_loadings": pca_result.loadings.tolist(),
        "rotated_loadings": solution.loadings.tolist(),
        "rotation": solution.rotation.tolist(),
        "variance_explained_rotated": solution.variance_explained.tolist(),
        "cumulative_variance_rotated": solution.cumulative_variance.tolist(),
        "iterations": solution.iterations,
        "converged": solution.converged,
        "n_observations": pca_result.n_observations,
    }
    Path(json_path).write_text(
        json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
