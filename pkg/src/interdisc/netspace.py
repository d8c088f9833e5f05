"""Similarity, co-occurrence, and distance structures over citation vectors.

All pairwise structures are computed per axis: "cited" compares matrix rows,
"citing" compares columns.  Cosine similarity keeps its natural diagonal;
distance matrices always have a zeroed diagonal.  Journals whose vector on
the chosen axis is empty have cosine 0 against everything (including
themselves) and *undefined* distances, which downstream consumers must
exclude rather than treat as maximal.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse as sp

from .corpus import CitationMatrix, Direction, JournalVector
from .errors import CountOverflowError, EmptyCorpusError, UndefinedIndicatorError

# Above this dimension pairwise matrices are not materialized densely;
# cells are computed on demand from the normalized vectors instead.
MATERIALIZE_LIMIT = 2000


class MatrixKind(str, Enum):
    COSINE_SIMILARITY = "cosine_similarity"
    ONE_MINUS_COSINE = "one_minus_cosine"
    EUCLIDEAN_DISTANCE = "euclidean_distance"
    COOCCURRENCE = "cooccurrence"


class DiagonalPolicy(str, Enum):
    ZEROED = "zeroed"
    NATURAL = "natural"


def _l2_normalize_rows(m: sp.csr_matrix) -> tuple[sp.csr_matrix, np.ndarray]:
    """Rows scaled to unit L2 norm; zero rows stay zero.  Returns (rows, norms)."""
    m = m.tocsr().astype(np.float64)
    norms = np.sqrt(np.asarray(m.multiply(m).sum(axis=1)).ravel())
    inv = np.divide(1.0, norms, out=np.zeros_like(norms), where=norms > 0)
    return sp.diags(inv).dot(m).tocsr(), norms


def _l1_normalize_rows(m: sp.csr_matrix) -> tuple[sp.csr_matrix, np.ndarray]:
    """Rows scaled to unit mass (probability distributions); zero rows stay zero."""
    m = m.tocsr().astype(np.float64)
    sums = np.asarray(m.sum(axis=1)).ravel()
    inv = np.divide(1.0, sums, out=np.zeros_like(sums), where=sums > 0)
    return sp.diags(inv).dot(m).tocsr(), sums


class SymmetricValueMatrix:
    """Symmetric n x n value store, dense for small n and lazy above.

    `defined` flags journals whose underlying vector is nonempty; cells where
    either side is undefined hold NaN for distance kinds.  The lazy form
    computes any requested block from the stored normalized vectors, so the
    values are identical to the materialized form.
    """

    def __init__(
        self,
        n: int,
        kind: MatrixKind,
        diagonal_policy: DiagonalPolicy,
        dense: np.ndarray | None = None,
        sparse: sp.spmatrix | None = None,
        unit_rows: sp.csr_matrix | None = None,
        sq_norms: np.ndarray | None = None,
        defined: np.ndarray | None = None,
    ):
        self.n = n
        self.kind = kind
        self.diagonal_policy = diagonal_policy
        self._dense = dense
        self._sparse = sparse.tocsr() if sparse is not None else None
        self._unit_rows = unit_rows
        self._sq_norms = sq_norms
        self.defined = defined if defined is not None else np.ones(n, dtype=bool)

    @property
    def materialized(self) -> bool:
        return self._dense is not None or self._sparse is not None

    def block(self, ids: np.ndarray) -> np.ndarray:
        """Dense sub-matrix for the given ids (in the given order)."""
        ids = np.asarray(ids, dtype=np.int64)
        if self._dense is not None:
            return self._dense[np.ix_(ids, ids)].copy()
        if self._sparse is not None:
            return self._sparse[ids, :][:, ids].toarray()
        return self._compute_block(ids)

    def cell(self, i: int, j: int) -> float:
        return float(self.block(np.array([i, j]))[0, 1]) if i != j else float(
            self.block(np.array([i]))[0, 0]
        )

    def _compute_block(self, ids: np.ndarray) -> np.ndarray:
        rows = self._unit_rows[ids]
        gram = np.asarray(rows.dot(rows.T).todense())
        np.clip(gram, 0.0, 1.0, out=gram)
        if self.kind is MatrixKind.COSINE_SIMILARITY:
            out = gram
        elif self.kind is MatrixKind.ONE_MINUS_COSINE:
            out = 1.0 - gram
        elif self.kind is MatrixKind.EUCLIDEAN_DISTANCE:
            sq = self._sq_norms[ids]
            d2 = sq[:, None] + sq[None, :] - 2.0 * gram
            np.clip(d2, 0.0, None, out=d2)
            out = np.sqrt(d2)
        else:
            raise EmptyCorpusError("co-occurrence matrices are always materialized")
        mask = self.defined[ids]
        if self.kind is not MatrixKind.COSINE_SIMILARITY:
            undef = ~mask
            out[undef, :] = np.nan
            out[:, undef] = np.nan
        else:
            # Empty vectors are similar to nothing, themselves included.
            undef = ~mask
            out[undef, :] = 0.0
            out[:, undef] = 0.0
        if self.diagonal_policy is DiagonalPolicy.ZEROED:
            np.fill_diagonal(out, 0.0)
        return out

    def to_dense(self) -> np.ndarray:
        if self._dense is not None:
            return self._dense
        if self._sparse is not None:
            return self._sparse.toarray()
        return self._compute_block(np.arange(self.n))

    def to_sparse(self) -> sp.csr_matrix:
        if self._sparse is not None:
            return self._sparse
        return sp.csr_matrix(self.to_dense())


@dataclass
class BinaryGraph:
    """Unweighted adjacency produced by binarization; no self-loops.

    Undirected graphs keep symmetric adjacency; `edge_count` counts each
    undirected edge once.  `adjacency` is a CSR boolean matrix with
    adjacency[v, w] = True iff there is an arc v -> w (or an edge, when
    undirected).
    """

    n: int
    directed: bool
    adjacency: sp.csr_matrix

    @property
    def edge_count(self) -> int:
        return int(self.adjacency.nnz if self.directed else self.adjacency.nnz // 2)

    def neighbors(self, v: int) -> np.ndarray:
        lo, hi = self.adjacency.indptr[v], self.adjacency.indptr[v + 1]
        return self.adjacency.indices[lo:hi]

    def degrees(self) -> np.ndarray:
        return np.diff(self.adjacency.indptr)


def _require_nonempty(matrix: CitationMatrix) -> None:
    if matrix.nnz == 0:
        raise EmptyCorpusError("citation matrix has no cells")


def cosine_matrix(
    matrix: CitationMatrix, axis: Direction | str
) -> SymmetricValueMatrix:
    """Pairwise cosine similarity between all vectors of one axis.

    The diagonal is natural: 1 for journals with a nonzero vector, 0 for
    empty ones (which are orthogonal to everything, themselves included).
    """
    _require_nonempty(matrix)
    vectors = matrix.axis_matrix(axis)
    unit, norms = _l2_normalize_rows(vectors)
    defined = norms > 0
    if matrix.n <= MATERIALIZE_LIMIT:
        gram = np.asarray(unit.dot(unit.T).todense())
        np.clip(gram, 0.0, 1.0, out=gram)
        np.fill_diagonal(gram, np.where(defined, 1.0, 0.0))
        return SymmetricValueMatrix(
            matrix.n,
            MatrixKind.COSINE_SIMILARITY,
            DiagonalPolicy.NATURAL,
            dense=gram,
            defined=defined,
        )
    return SymmetricValueMatrix(
        matrix.n,
        MatrixKind.COSINE_SIMILARITY,
        DiagonalPolicy.NATURAL,
        unit_rows=unit,
        defined=defined,
    )


def cooccurrence(
    matrix: CitationMatrix, axis: Direction | str
) -> SymmetricValueMatrix:
    """Exact integer co-occurrence products: A*A^T (cited) or A^T*A (citing)."""
    _require_nonempty(matrix)
    a = matrix.axis_matrix(axis)
    max_count = int(a.data.max())
    max_support = int(np.diff(a.indptr).max())
    # Products are sums of at most `max_support` terms bounded by max_count^2;
    # refuse inputs whose worst case cannot be represented in int64.
    if max_support and max_count > np.sqrt(np.iinfo(np.int64).max / max_support):
        raise CountOverflowError(
            f"co-occurrence products may exceed int64 for counts up to {max_count}"
        )
    product = a.dot(a.T).tocsr()
    product.eliminate_zeros()
    return SymmetricValueMatrix(
        matrix.n,
        MatrixKind.COOCCURRENCE,
        DiagonalPolicy.NATURAL,
        sparse=product,
    )


def cooccurrence_support(
    matrix: CitationMatrix, axis: Direction | str
) -> sp.csr_matrix:
    """Boolean support of the co-occurrence product, without the products.

    Shares its off-diagonal support with the cosine matrix of the same axis,
    so binarized graphs built from it are identical to cosine-based ones.
    """
    _require_nonempty(matrix)
    a = matrix.axis_matrix(axis).astype(bool).astype(np.int32)
    support = a.dot(a.T)
    support.eliminate_zeros()
    return support.astype(bool)


def binarize(
    sym: SymmetricValueMatrix | sp.spmatrix, threshold: float = 0.0
) -> BinaryGraph:
    """Undirected graph with an edge wherever a cell is strictly above threshold.

    The diagonal is ignored.  A nonzero threshold breaks the equivalence
    between cosine- and co-occurrence-based graphs and is off by default.
    """
    if isinstance(sym, SymmetricValueMatrix):
        if sym.materialized:
            values = sym.to_sparse()
        elif threshold == 0.0 and sym._unit_rows is not None and (
            sym.kind is MatrixKind.COSINE_SIMILARITY
        ):
            # cosine > 0 iff the vectors share support, so we can binarize
            # without materializing pairwise values.
            unit = sym._unit_rows.astype(bool).astype(np.int32)
            values = unit.dot(unit.T)
        else:
            values = sp.csr_matrix(sym.to_dense())
        n = sym.n
    else:
        values = sym.tocsr()
        n = values.shape[0]
    adj = (values > threshold).tocsr()
    adj.setdiag(False)
    adj.eliminate_zeros()
    adj = adj.maximum(adj.T).tocsr()  # guard symmetry for near-threshold floats
    return BinaryGraph(n=n, directed=False, adjacency=adj.astype(bool))


def binarize_directed(matrix: CitationMatrix) -> BinaryGraph:
    """Directed graph with an arc citing -> cited per nonzero cell; no loops."""
    cells = matrix.tocsr().astype(bool)
    adj = cells.T.tocsr()  # cell (cited i, citing j) becomes arc j -> i
    adj.setdiag(False)
    adj.eliminate_zeros()
    return BinaryGraph(n=matrix.n, directed=True, adjacency=adj.astype(bool))


def probability_normalize(vec: JournalVector) -> np.ndarray:
    """Entries divided by their total, in the order of `vec.ids`."""
    if vec.support_size == 0:
        raise UndefinedIndicatorError(
            f"journal {vec.owner_id} has no {vec.direction.value} citations"
        )
    counts = vec.counts.astype(np.float64)
    return counts / counts.sum()


def distance_matrix(
    matrix: CitationMatrix,
    axis: Direction | str,
    metric: str = "one_minus_cosine",
) -> SymmetricValueMatrix:
    """Pairwise distances between the axis vectors; diagonal always zero.

    ``one_minus_cosine`` is 1 minus the cosine similarity (in [0, 1]);
    ``relative_euclidean`` is the L2 distance between the probability-
    normalized vectors (in [0, sqrt(2)]).  Pairs where either vector is
    empty are undefined and stored as NaN.
    """
    _require_nonempty(matrix)
    vectors = matrix.axis_matrix(axis)
    if metric == "one_minus_cosine":
        unit, norms = _l2_normalize_rows(vectors)
        kind = MatrixKind.ONE_MINUS_COSINE
        sq_norms = None
    elif metric == "relative_euclidean":
        prob, norms = _l1_normalize_rows(vectors)
        unit = prob
        sq_norms = np.asarray(prob.multiply(prob).sum(axis=1)).ravel()
        kind = MatrixKind.EUCLIDEAN_DISTANCE
    else:
        raise UndefinedIndicatorError(f"unknown distance metric: {metric!r}")
    defined = norms > 0

    if matrix.n > MATERIALIZE_LIMIT:
        return SymmetricValueMatrix(
            matrix.n,
            kind,
            DiagonalPolicy.ZEROED,
            unit_rows=unit,
            sq_norms=sq_norms,
            defined=defined,
        )

    gram = np.asarray(unit.dot(unit.T).todense())
    np.clip(gram, 0.0, 1.0 if kind is MatrixKind.ONE_MINUS_COSINE else np.inf, out=gram)
    if kind is MatrixKind.ONE_MINUS_COSINE:
        dense = 1.0 - gram
    else:
        d2 = sq_norms[:, None] + sq_norms[None, :] - 2.0 * gram
        np.clip(d2, 0.0, None, out=d2)
        dense = np.sqrt(d2)
    undef = ~defined
    dense[undef, :] = np.nan
    dense[:, undef] = np.nan
    np.fill_diagonal(dense, 0.0)
    return SymmetricValueMatrix(
        matrix.n, kind, DiagonalPolicy.ZEROED, dense=dense, defined=defined
    )


def export_matrix_market(sym: SymmetricValueMatrix, path: str | Path) -> None:
    """Write a symmetric value matrix in Matrix Market format.

    Lazy matrices are materialized first; NaN (undefined) cells are written
    as-is so the gaps stay visible to external tools.
    """
    if not sym.materialized and sym.n > MATERIALIZE_LIMIT:
        warnings.warn(
            f"materializing a {sym.n}x{sym.n} matrix for export", stacklevel=2
        )
    dense = sym.to_dense()
    field = "integer" if sym.kind is MatrixKind.COOCCURRENCE else "real"
    scipy.io.mmwrite(str(path), sp.coo_matrix(dense), field=field, symmetry="symmetric")
