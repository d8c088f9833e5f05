"""Quadratic-entropy diversity: distribution evenness weighted by distances.

For a journal's citation distribution p over partner journals and a pairwise
distance d between those partners, diversity is the full double sum of
p_i * p_j * d(i, j) over ordered pairs i != j.  Pairs whose distance is
undefined (a partner with an empty vector on the distance axis) contribute
nothing and are counted separately.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .corpus import CitationMatrix, Direction
from .errors import ContractError, EmptyCorpusError
from .netspace import (
    MATERIALIZE_LIMIT,
    _l1_normalize_rows,
    _l2_normalize_rows,
    distance_matrix,
)


@dataclass
class DiversityResult:
    journal_id: int
    direction: Direction
    metric: str
    d_value: float
    degenerate: bool  # no off-diagonal support: diversity is 0 by convention
    missing: bool = False  # vector empty in this direction: no value at all
    undefined_pairs: int = 0


def rao_stirling(
    probs: np.ndarray, distances: np.ndarray, triangle_sum: bool = False
) -> float:
    """Diversity of a probability vector against an aligned distance block.

    `distances` must be square, symmetric, zero on the diagonal, and aligned
    with `probs`; NaN cells mark undefined pairs, which contribute zero and
    trigger a coverage warning.  With `triangle_sum` only the lower triangle
    is summed, halving the value.
    """
    p = np.asarray(probs, dtype=np.float64)
    d = np.asarray(distances, dtype=np.float64)
    if p.ndim != 1 or d.shape != (p.size, p.size):
        raise ContractError("distance block must be square and aligned with p")
    if abs(p.sum() - 1.0) > 1e-9:
        raise ContractError(f"probabilities sum to {p.sum()!r}, not 1")
    defined = ~np.isnan(d)
    if not np.array_equal(defined, defined.T) or np.any(
        np.abs(np.where(defined & defined.T, d - d.T, 0.0)) > 1e-9
    ):
        raise ContractError("distance block is not symmetric")
    if np.any(np.diag(d)[~np.isnan(np.diag(d))] != 0.0):
        raise ContractError("distance diagonal must be zero")
    undefined = int(np.count_nonzero(~defined) - np.count_nonzero(np.isnan(np.diag(d))))
    if undefined:
        warnings.warn(
            f"{undefined} journal pairs have undefined distances and were skipped",
            stacklevel=2,
        )
    value = _quadratic_form(p, d)
    return value / 2.0 if triangle_sum else value


def _quadratic_form(p: np.ndarray, d: np.ndarray) -> float:
    """p^T d p with NaN cells and the diagonal treated as zero."""
    d = np.nan_to_num(d, nan=0.0, copy=True)
    np.fill_diagonal(d, 0.0)
    return float(p @ d @ p)


def _support_and_probs(
    axis_csr: sp.csr_matrix, jid: int, exclude_self: bool
) -> tuple[np.ndarray, np.ndarray]:
    lo, hi = axis_csr.indptr[jid], axis_csr.indptr[jid + 1]
    ids = axis_csr.indices[lo:hi].astype(np.int64)
    counts = axis_csr.data[lo:hi].astype(np.float64)
    if exclude_self:
        keep = ids != jid
        ids, counts = ids[keep], counts[keep]
    total = counts.sum()
    if total > 0:
        counts = counts / total
    return ids, counts


def diversity_all(
    matrix: CitationMatrix,
    direction: Direction | str,
    metric: str = "one_minus_cosine",
    exclude_self_citations: bool = False,
    triangle_sum: bool = False,
) -> list[DiversityResult]:
    """Diversity for every journal, with distances built on the same axis.

    The probability vector keeps the diagonal (self-citation) mass unless
    `exclude_self_citations`; the diagonal never contributes to the sum
    since d(i, i) = 0 regardless.  Journals with no off-diagonal partners
    are degenerate with value 0; journals with no vector at all are flagged
    missing.
    """
    if matrix.nnz == 0:
        raise EmptyCorpusError("citation matrix has no cells")
    direction = Direction(direction)
    axis = matrix.axis_matrix(direction)

    if matrix.n <= MATERIALIZE_LIMIT:
        dist = distance_matrix(matrix, direction, metric)
        dense = dist.to_dense()
        values, undef = _all_from_dense(matrix.n, axis, dense, exclude_self_citations)
    elif metric == "one_minus_cosine":
        values, undef = _all_cosine_bilinear(matrix.n, axis, exclude_self_citations)
    else:
        values, undef = _all_euclidean_chunked(matrix.n, axis, exclude_self_citations)

    if triangle_sum:
        values = values / 2.0

    results = []
    for jid in range(matrix.n):
        lo, hi = axis.indptr[jid], axis.indptr[jid + 1]
        support = axis.indices[lo:hi]
        off_diag = support[support != jid]
        missing = support.size == 0
        degenerate = off_diag.size == 0
        results.append(
            DiversityResult(
                journal_id=jid,
                direction=direction,
                metric=metric,
                d_value=0.0 if degenerate else float(values[jid]),
                degenerate=degenerate,
                missing=missing,
                undefined_pairs=int(undef[jid]),
            )
        )
    total_undef = int(undef.sum())
    if total_undef:
        warnings.warn(
            f"{total_undef} journal pairs had undefined distances "
            f"({direction.value}, {metric})",
            stacklevel=2,
        )
    return results


def _all_from_dense(
    n: int, axis: sp.csr_matrix, dense_dist: np.ndarray, exclude_self: bool
) -> tuple[np.ndarray, np.ndarray]:
    values = np.zeros(n)
    undef = np.zeros(n, dtype=np.int64)
    for jid in range(n):
        ids, p = _support_and_probs(axis, jid, exclude_self)
        if ids.size == 0:
            continue
        block = dense_dist[np.ix_(ids, ids)]
        nan_off = np.isnan(block)
        np.fill_diagonal(nan_off, False)
        undef[jid] = int(nan_off.sum())
        values[jid] = _quadratic_form(p, block)
    return values, undef


def _drop_diagonal(m: sp.csr_matrix) -> sp.csr_matrix:
    coo = m.tocoo()
    keep = coo.row != coo.col
    return sp.csr_matrix(
        (coo.data[keep], (coo.row[keep], coo.col[keep])), shape=m.shape
    )


def _all_cosine_bilinear(
    n: int, axis: sp.csr_matrix, exclude_self: bool
) -> tuple[np.ndarray, np.ndarray]:
    """All (1 - cosine) diversities at once via the similarity Gram matrix.

    With g the cosine similarity, sum_{i!=j} p_i p_j (1 - g_ij) splits into
    (sum p)^2 - sum p^2 minus the same bilinear form in g, so only the sparse
    Gram matrix is ever needed.
    """
    unit, norms = _l2_normalize_rows(axis)
    defined = norms > 0
    gram = unit.dot(unit.T).tocsr()
    np.clip(gram.data, 0.0, 1.0, out=gram.data)
    gram_diag = gram.diagonal()

    p_source = _drop_diagonal(axis) if exclude_self else axis
    prob, _ = _l1_normalize_rows(p_source)
    support = np.diff(prob.indptr)

    # Restrict each row to partners whose own vector is defined.
    p_def = prob.dot(sp.diags(defined.astype(np.float64))).tocsr()
    p_def.eliminate_zeros()
    support_def = np.diff(p_def.indptr)

    t1 = np.asarray(p_def.sum(axis=1)).ravel() ** 2
    t2 = np.asarray(p_def.multiply(p_def).sum(axis=1)).ravel()
    m = p_def.dot(gram)
    s3 = np.asarray(m.multiply(p_def).sum(axis=1)).ravel()
    s4 = p_def.multiply(p_def).dot(gram_diag)
    values = (t1 - t2) - (s3 - s4)
    np.clip(values, 0.0, None, out=values)

    undef = support * (support - 1) - support_def * (support_def - 1)
    return values, undef.astype(np.int64)


def _all_euclidean_chunked(
    n: int, axis: sp.csr_matrix, exclude_self: bool, chunk: int = 1024
) -> tuple[np.ndarray, np.ndarray]:
    """Relative-Euclidean diversities from a precomputed probability Gram.

    d(i,j)^2 = |q_i|^2 + |q_j|^2 - 2 q_i.q_j over probability-normalized
    vectors; the square root forces explicit per-pair evaluation, done in
    row chunks of each journal's support.
    """
    q, row_sums = _l1_normalize_rows(axis)
    defined = row_sums > 0
    sq = np.asarray(q.multiply(q).sum(axis=1)).ravel()
    qgram = q.dot(q.T).tocsr()

    values = np.zeros(n)
    undef = np.zeros(n, dtype=np.int64)
    for jid in range(n):
        ids, p = _support_and_probs(axis, jid, exclude_self)
        if ids.size == 0:
            continue
        def_mask = defined[ids]
        s_def = int(def_mask.sum())
        undef[jid] = ids.size * (ids.size - 1) - s_def * (s_def - 1)
        p_def = np.where(def_mask, p, 0.0)
        sq_ids = sq[ids]
        total = 0.0
        diag_positions = np.arange(ids.size)
        for start in range(0, ids.size, chunk):
            stop = min(start + chunk, ids.size)
            g_block = qgram[ids[start:stop], :][:, ids].toarray()
            d2 = sq_ids[start:stop, None] + sq_ids[None, :] - 2.0 * g_block
            np.clip(d2, 0.0, None, out=d2)
            d_block = np.sqrt(d2)
            # Zero the diagonal cells that fall inside this chunk.
            local = diag_positions[start:stop] - start
            d_block[local, diag_positions[start:stop]] = 0.0
            total += p_def[start:stop] @ d_block @ p_def
        values[jid] = total
    return values, undef


def diversity_summary(
    results: list[DiversityResult], include_degenerate: bool = False
):
    """Descriptive statistics over one configuration's diversity values."""
    from .stats import descriptive

    values = [
        r.d_value
        for r in results
        if not r.missing and (include_degenerate or not r.degenerate)
    ]
    if not values:
        raise EmptyCorpusError("no defined diversity values to summarize")
    return descriptive(np.asarray(values))
