"""Freeman betweenness centrality on binarized graphs, plus degree counts.

Betweenness is computed over unweighted geodesics with Brandes-style
dependency accumulation.  Sources are processed in fixed-size batches whose
BFS and accumulation steps are vectorized as sparse-times-dense products, so
one pass handles dozens of sources at once; batches are reduced in index
order, which makes results identical regardless of worker count.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import multiprocessing as mp

import numpy as np
import scipy.sparse as sp

from .corpus import CitationMatrix, Direction, vector
from .netspace import BinaryGraph, binarize, binarize_directed, cooccurrence_support

BATCH_SIZE = 64

_WORKER_GRAPH: tuple[sp.csr_matrix, sp.csr_matrix] | None = None


@dataclass
class CentralityResult:
    journal_id: int
    variant: str  # raw_directed | cosine_cited | cosine_citing
    betweenness: float
    normalized_betweenness: float
    indegree: int
    outdegree: int


def _batch_dependencies(
    adj: sp.csr_matrix, adj_t: sp.csr_matrix, sources: np.ndarray
) -> np.ndarray:
    """Sum of Brandes dependency vectors for one batch of sources.

    `adj[v, w]` holds arc v -> w; `adj_t` is its transpose.  Returns the
    per-node dependency totals with each source's own entry zeroed.
    """
    n = adj.shape[0]
    b = len(sources)
    cols = np.arange(b)

    dist = np.full((n, b), -1, dtype=np.int32)
    sigma = np.zeros((n, b))
    dist[sources, cols] = 0
    sigma[sources, cols] = 1.0
    frontier = np.zeros((n, b))
    frontier[sources, cols] = 1.0

    level = 0
    while True:
        paths = adj_t.dot(sigma * frontier)
        newly = (dist < 0) & (paths > 0)
        if not newly.any():
            break
        level += 1
        dist[newly] = level
        sigma[newly] = paths[newly]
        frontier = newly.astype(np.float64)

    delta = np.zeros((n, b))
    for lev in range(level, 0, -1):
        w_mask = dist == lev
        coef = np.zeros((n, b))
        np.divide(1.0 + delta, sigma, out=coef, where=w_mask)
        acc = adj.dot(coef)
        v_mask = dist == lev - 1
        delta[v_mask] += (sigma * acc)[v_mask]
    delta[sources, cols] = 0.0
    return delta.sum(axis=1)


def _init_worker(adj: sp.csr_matrix, adj_t: sp.csr_matrix) -> None:
    global _WORKER_GRAPH
    _WORKER_GRAPH = (adj, adj_t)


def _worker_batch(sources: np.ndarray) -> np.ndarray:
    adj, adj_t = _WORKER_GRAPH
    return _batch_dependencies(adj, adj_t, sources)


def betweenness(
    graph: BinaryGraph, jobs: int = 1, batch_size: int = BATCH_SIZE
) -> np.ndarray:
    """Raw Freeman betweenness for every node of an unweighted graph.

    Directed graphs sum over ordered pairs, undirected over unordered pairs
    (the symmetric accumulation is halved).  Pairs with no connecting path
    contribute nothing.
    """
    n = graph.n
    scores = np.zeros(n)
    if n < 3 or graph.adjacency.nnz == 0:
        return scores

    adj = graph.adjacency.astype(np.float64).tocsr()
    adj_t = adj.T.tocsr() if graph.directed else adj
    batch_size = max(1, min(batch_size, n))
    batches = [
        np.arange(start, min(start + batch_size, n))
        for start in range(0, n, batch_size)
    ]

    if jobs > 1 and len(batches) > 1:
        ctx = mp.get_context("fork")
        with ProcessPoolExecutor(
            max_workers=min(jobs, len(batches)),
            mp_context=ctx,
            initializer=_init_worker,
            initargs=(adj, adj_t),
        ) as pool:
            partials = list(pool.map(_worker_batch, batches))
    else:
        partials = [_batch_dependencies(adj, adj_t, batch) for batch in batches]

    for part in partials:  # fixed reduction order keeps results deterministic
        scores += part
    if not graph.directed:
        scores /= 2.0
    return scores


def normalize_betweenness(scores: np.ndarray, n: int, directed: bool) -> np.ndarray:
    """Scores divided by the number of potential pairs through a node."""
    pairs = (n - 1) * (n - 2)
    if not directed:
        pairs /= 2
    if pairs <= 0:
        return np.zeros_like(scores)
    return scores / pairs


def default_jobs() -> int:
    return max(1, os.cpu_count() or 1)


def betweenness_variant_arrays(
    matrix: CitationMatrix, jobs: int = 1
) -> dict[str, np.ndarray]:
    """Raw betweenness under the three graph constructions.

    ``raw_directed`` binarizes the citation matrix itself; the two cosine
    variants binarize the co-occurrence support of the cited/citing axis,
    which has the same edge set as the cosine-similarity matrix, so the
    cosine values are never materialized.
    """
    out: dict[str, np.ndarray] = {}
    out["raw_directed"] = betweenness(binarize_directed(matrix), jobs=jobs)
    for axis, name in ((Direction.CITED, "cosine_cited"), (Direction.CITING, "cosine_citing")):
        graph = binarize(cooccurrence_support(matrix, axis))
        out[name] = betweenness(graph, jobs=jobs)
    return out


def degree(
    matrix: CitationMatrix, jid: int, direction: Direction | str
) -> tuple[int, int]:
    """(degree excluding the diagonal cell, total citations including it)."""
    vec = vector(matrix, jid, direction)
    deg = vec.support_size - int(np.any(vec.ids == jid))
    return deg, vec.total()


def betweenness_all_variants(
    matrix: CitationMatrix, jobs: int = 1
) -> list[CentralityResult]:
    """Per-journal results for all three betweenness variants."""
    arrays = betweenness_variant_arrays(matrix, jobs=jobs)
    n = matrix.n
    csr, csc = matrix.tocsr(), matrix.tocsc()
    diag = csr.diagonal()
    indeg = np.diff(csr.indptr) - (diag > 0)
    outdeg = np.diff(csc.indptr) - (diag > 0)

    results = []
    for variant, scores in arrays.items():
        directed = variant == "raw_directed"
        norm = normalize_betweenness(scores, n, directed)
        for jid in range(n):
            results.append(
                CentralityResult(
                    journal_id=jid,
                    variant=variant,
                    betweenness=float(scores[jid]),
                    normalized_betweenness=float(norm[jid]),
                    indegree=int(indeg[jid]),
                    outdegree=int(outdeg[jid]),
                )
            )
    return results
