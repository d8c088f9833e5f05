"""Journal registry, sparse citation matrix, file ingestion, and subsetting.

The citation matrix follows the convention cell (i, j) = citations from
articles in journal j to articles in journal i, so row i is journal i's
"cited" vector and column j is journal j's "citing" vector.  Diagonal cells
are journal self-citations and are kept.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path

import numpy as np
import scipy.io
import scipy.sparse as sp

from .errors import (
    DimensionError,
    EmptyCorpusError,
    MetadataConflictError,
    ParseError,
    UnknownJournalError,
)


class Direction(str, Enum):
    CITED = "cited"
    CITING = "citing"


class SubsetMode(str, Enum):
    GLOBAL_CONTEXT = "global_context"
    LOCAL_SUBMATRIX = "local_submatrix"


def canonical_name(name: str) -> str:
    """Canonical form used for identity: trimmed and case-folded."""
    return name.strip().casefold()


@dataclass
class JournalEntry:
    id: int
    name: str
    category: str | None = None
    total_cites: int | None = None
    impact_factor: float | None = None
    immediacy: float | None = None


class JournalRegistry:
    """Stable dense ids 0..n-1 mapped to journal names plus optional metadata.

    Ids are assigned in first-appearance order of canonical names, so a given
    input file always produces the same registry.
    """

    def __init__(self) -> None:
        self.entries: list[JournalEntry] = []
        self._by_canonical: dict[str, int] = {}

    def __len__(self) -> int:
        return len(self.entries)

    def add(self, name: str) -> int:
        """Return the id for `name`, registering it on first appearance."""
        key = canonical_name(name)
        if not key:
            raise ParseError("empty journal name")
        jid = self._by_canonical.get(key)
        if jid is None:
            jid = len(self.entries)
            self.entries.append(JournalEntry(id=jid, name=name.strip()))
            self._by_canonical[key] = jid
        return jid

    def id_of(self, name: str) -> int:
        key = canonical_name(name)
        if key not in self._by_canonical:
            raise UnknownJournalError(f"unknown journal: {name!r}")
        return self._by_canonical[key]

    def get(self, name: str) -> int | None:
        return self._by_canonical.get(canonical_name(name))

    def name_of(self, jid: int) -> str:
        return self.entries[jid].name

    def ids_in_category(self, category: str) -> list[int]:
        wanted = category.strip().casefold()
        return [
            e.id
            for e in self.entries
            if e.category is not None and e.category.strip().casefold() == wanted
        ]


class CitationMatrix:
    """Sparse asymmetric n x n matrix of aggregated citation counts.

    Zero cells are never stored; all stored counts are positive integers.
    Immutable after construction.
    """

    def __init__(self, n: int, rows: np.ndarray, cols: np.ndarray, counts: np.ndarray):
        if len(counts) and counts.min() <= 0:
            raise ParseError("citation counts must be positive")
        coo = sp.coo_matrix(
            (counts.astype(np.int64), (rows, cols)), shape=(n, n)
        )
        self._csr = coo.tocsr()
        self._csr.sum_duplicates()
        # Drop any zeros that duplicate-summation might have left explicit.
        self._csr.eliminate_zeros()
        self._csc = self._csr.tocsc()
        self.n = n

    @classmethod
    def from_cells(cls, n: int, cells: dict[tuple[int, int], int]) -> "CitationMatrix":
        if cells:
            rows, cols = zip(*cells.keys())
            counts = np.fromiter(cells.values(), dtype=np.int64, count=len(cells))
        else:
            rows, cols, counts = (), (), np.zeros(0, dtype=np.int64)
        return cls(n, np.asarray(rows), np.asarray(cols), counts)

    @property
    def nnz(self) -> int:
        return self._csr.nnz

    @property
    def total(self) -> int:
        return int(self._csr.data.sum())

    def cell(self, cited: int, citing: int) -> int:
        return int(self._csr[cited, citing])

    def tocsr(self) -> sp.csr_matrix:
        return self._csr

    def tocsc(self) -> sp.csc_matrix:
        return self._csc

    def row_sums(self) -> np.ndarray:
        return np.asarray(self._csr.sum(axis=1)).ravel()

    def col_sums(self) -> np.ndarray:
        return np.asarray(self._csr.sum(axis=0)).ravel()

    def axis_matrix(self, direction: Direction | str) -> sp.csr_matrix:
        """Journal vectors of `direction` as rows of a CSR matrix."""
        if Direction(direction) is Direction.CITED:
            return self._csr
        return self._csc.T.tocsr()


@dataclass
class JournalVector:
    """One journal's citation distribution in one direction (sparse)."""

    owner_id: int
    direction: Direction
    ids: np.ndarray
    counts: np.ndarray
    length: int  # full matrix dimension, needed for zero-padded populations

    @property
    def support_size(self) -> int:
        return len(self.ids)

    def total(self) -> int:
        return int(self.counts.sum())


def vector(matrix: CitationMatrix, jid: int, direction: Direction | str) -> JournalVector:
    """Extract journal `jid`'s cited (row) or citing (column) vector."""
    if not 0 <= jid < matrix.n:
        raise UnknownJournalError(f"journal id {jid} out of range 0..{matrix.n - 1}")
    direction = Direction(direction)
    if direction is Direction.CITED:
        m = matrix.tocsr()
        lo, hi = m.indptr[jid], m.indptr[jid + 1]
        ids, counts = m.indices[lo:hi], m.data[lo:hi]
    else:
        m = matrix.tocsc()
        lo, hi = m.indptr[jid], m.indptr[jid + 1]
        ids, counts = m.indices[lo:hi], m.data[lo:hi]
    return JournalVector(
        owner_id=jid,
        direction=direction,
        ids=ids.astype(np.int64),
        counts=counts.astype(np.int64),
        length=matrix.n,
    )


# ---------------------------------------------------------------------------
# Ingestion


def _read_count(text: str, line: int) -> int:
    try:
        value = int(text)
    except ValueError:
        raise ParseError(f"count is not an integer: {text!r}", line) from None
    if value <= 0:
        raise ParseError(f"count must be positive, got {value}", line)
    return value


def load_edge_list(
    path: str | Path, min_count: int = 1
) -> tuple[JournalRegistry, CitationMatrix]:
    """Load a `citing,cited,count` CSV into a registry and citation matrix.

    Duplicate (citing, cited) rows are summed; rows whose summed count falls
    below `min_count` are dropped after summation.  Ids are assigned in
    first-appearance order (citing column first within each row).
    """
    if min_count < 1:
        raise ParseError("min_count must be a positive integer")
    registry = JournalRegistry()
    cells: dict[tuple[int, int], int] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise EmptyCorpusError(f"{path}: empty file")
        expected = ["citing", "cited", "count"]
        if [h.strip().casefold() for h in header] != expected:
            raise ParseError(
                f"expected header {','.join(expected)!r}, got {','.join(header)!r}",
                line=1,
            )
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != 3:
                raise ParseError(f"expected 3 fields, got {len(row)}", lineno)
            citing_name, cited_name, count_text = row
            count = _read_count(count_text, lineno)
            citing = registry.add(citing_name)
            cited = registry.add(cited_name)
            key = (cited, citing)
            cells[key] = cells.get(key, 0) + count
    if not cells:
        raise EmptyCorpusError(f"{path}: no citation rows")
    if min_count > 1:
        cells = {k: v for k, v in cells.items() if v >= min_count}
    matrix = CitationMatrix.from_cells(len(registry), cells)
    return registry, matrix


def load_matrix_market(
    path: str | Path, names_path: str | Path | None = None
) -> tuple[JournalRegistry, CitationMatrix]:
    """Load a coordinate-format Matrix Market file as a citation matrix.

    Journals are named ``J<k>`` for row/column k unless a sidecar file with
    one name per line is supplied.  Duplicate coordinate entries are summed,
    matching edge-list semantics; no count threshold is applied.
    """
    try:
        mat = scipy.io.mmread(str(path))
    except Exception as exc:
        raise ParseError(f"{path}: not a readable Matrix Market file ({exc})") from exc
    mat = sp.coo_matrix(mat)
    rows, cols = mat.shape
    if rows != cols:
        raise DimensionError(f"{path}: matrix is {rows}x{cols}, expected square")
    data = np.asarray(mat.data)
    if data.size and data.min() < 0:
        raise ParseError(f"{path}: negative entry {data.min()}")
    if not np.allclose(data, np.round(data)):
        raise ParseError(f"{path}: non-integer entries")

    registry = JournalRegistry()
    if names_path is not None:
        names = [
            line.strip()
            for line in Path(names_path).read_text(encoding="utf-8").splitlines()
            if line.strip()
        ]
        if len(names) != rows:
            raise DimensionError(
                f"{names_path}: {len(names)} names for a {rows}-journal matrix"
            )
    else:
        names = [f"J{k}" for k in range(rows)]
    for name in names:
        registry.add(name)
    if len(registry) != rows:
        raise ParseError(f"{names_path}: duplicate names after canonicalization")

    keep = data > 0
    matrix = CitationMatrix(
        rows,
        np.asarray(mat.row)[keep],
        np.asarray(mat.col)[keep],
        data[keep].astype(np.int64),
    )
    return registry, matrix


def _optional_float(text: str, line: int) -> float | None:
    text = text.strip()
    if not text:
        return None
    try:
        return float(text)
    except ValueError:
        raise ParseError(f"not a number: {text!r}", line) from None


def load_metadata(path: str | Path, registry: JournalRegistry) -> int:
    """Attach `name,category,total_cites,impact_factor,immediacy` metadata.

    Trailing fields are optional.  Names that do not match any registry entry
    are counted and skipped, not fatal; the count of unmatched rows is
    returned.  Two rows for the same journal raise a conflict error.
    """
    unmatched = 0
    seen: set[str] = set()
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise EmptyCorpusError(f"{path}: empty metadata file")
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if not 1 <= len(row) <= 5:
                raise ParseError(f"expected 1-5 fields, got {len(row)}", lineno)
            name = row[0]
            key = canonical_name(name)
            if key in seen:
                raise MetadataConflictError(
                    f"line {lineno}: duplicate metadata for journal {name!r}"
                )
            seen.add(key)
            jid = registry.get(name)
            if jid is None:
                unmatched += 1
                continue
            entry = registry.entries[jid]
            if len(row) > 1 and row[1].strip():
                entry.category = row[1].strip()
            if len(row) > 2 and row[2].strip():
                try:
                    total = int(row[2])
                except ValueError:
                    raise ParseError(f"not an integer: {row[2]!r}", lineno) from None
                if total < 0:
                    raise ParseError(f"total_cites must be nonnegative, got {total}", lineno)
                entry.total_cites = total
            if len(row) > 3:
                entry.impact_factor = _optional_float(row[3], lineno)
            if len(row) > 4:
                entry.immediacy = _optional_float(row[4], lineno)
    return unmatched


# ---------------------------------------------------------------------------
# Subsetting


@dataclass
class AnalysisScope:
    """A restriction of the corpus to a set of journals.

    In ``global_context`` mode the original registry/matrix are kept and
    `ids` marks which journals rankings and statistics are restricted to;
    indicator values are those of the unrestricted run.  In
    ``local_submatrix`` mode `registry`/`matrix` are a fresh re-indexed
    corpus limited to `ids` on both axes, and `index_map` maps new ids back
    to the originals.
    """

    mode: SubsetMode
    registry: JournalRegistry
    matrix: CitationMatrix
    ids: list[int]
    index_map: dict[int, int] = field(default_factory=dict)


def subset(
    matrix: CitationMatrix,
    registry: JournalRegistry,
    ids: set[int] | list[int],
    mode: SubsetMode | str,
) -> AnalysisScope:
    """Restrict analysis to `ids`, either in context or as a submatrix."""
    mode = SubsetMode(mode)
    id_list = sorted(set(ids))
    if not id_list:
        raise UnknownJournalError("subset ids must be nonempty")
    if id_list[0] < 0 or id_list[-1] >= matrix.n:
        bad = id_list[0] if id_list[0] < 0 else id_list[-1]
        raise UnknownJournalError(f"journal id {bad} out of range 0..{matrix.n - 1}")

    if mode is SubsetMode.GLOBAL_CONTEXT:
        return AnalysisScope(mode=mode, registry=registry, matrix=matrix, ids=id_list)

    sub = matrix.tocsr()[id_list, :][:, id_list].tocoo()
    sub_matrix = CitationMatrix(
        len(id_list), sub.row, sub.col, sub.data.astype(np.int64)
    )
    sub_registry = JournalRegistry()
    for new_id, old_id in enumerate(id_list):
        old = registry.entries[old_id]
        sub_registry.add(old.name)
        entry = sub_registry.entries[new_id]
        entry.category = old.category
        entry.total_cites = old.total_cites
        entry.impact_factor = old.impact_factor
        entry.immediacy = old.immediacy
    index_map = {new: old for new, old in enumerate(id_list)}
    return AnalysisScope(
        mode=mode,
        registry=sub_registry,
        matrix=sub_matrix,
        ids=list(range(len(id_list))),
        index_map=index_map,
    )
