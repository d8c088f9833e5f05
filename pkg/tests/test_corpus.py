import numpy as np
import pytest

from interdisc.corpus import (
    CitationMatrix,
    Direction,
    SubsetMode,
    load_edge_list,
    load_matrix_market,
    load_metadata,
    subset,
    vector,
)
from interdisc.errors import (
    DimensionError,
    EmptyCorpusError,
    MetadataConflictError,
    ParseError,
    UnknownJournalError,
)
from interdisc.vector_indicators import gini


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text, encoding="utf-8")
    return path


class TestLoadEdgeList:
    def test_duplicate_rows_are_summed(self, tmp_path):
        path = write(tmp_path, "e.csv", "citing,cited,count\nB,A,3\nB,A,2\n")
        registry, matrix = load_edge_list(path)
        a, b = registry.id_of("A"), registry.id_of("B")
        assert matrix.cell(cited=a, citing=b) == 5
        assert matrix.nnz == 1

    def test_min_count_drops_after_summing(self, tmp_path):
        path = write(tmp_path, "e.csv", "citing,cited,count\nB,A,1\nC,A,4\n")
        registry, matrix = load_edge_list(path, min_count=2)
        a, c = registry.id_of("A"), registry.id_of("C")
        assert matrix.nnz == 1
        assert matrix.cell(cited=a, citing=c) == 4

    def test_hand_tally(self, corpus3):
        registry, matrix = corpus3
        assert len(registry) == 3
        assert matrix.nnz == 4
        b, a, c = 0, 1, 2  # first-appearance order
        assert registry.name_of(b) == "B" and registry.name_of(a) == "A"
        assert list(matrix.row_sums()) == [5, 5, 0]
        assert list(matrix.col_sums()) == [3, 1, 6]
        assert matrix.total == 10

    def test_conservation(self, corpus4):
        _, matrix = corpus4
        assert matrix.row_sums().sum() == matrix.col_sums().sum() == matrix.total

    def test_order_independence(self, tmp_path):
        rows = ["B,A,3", "C,A,2", "A,B,1", "C,B,4"]
        p1 = write(tmp_path, "e1.csv", "citing,cited,count\n" + "\n".join(rows) + "\n")
        p2 = write(
            tmp_path, "e2.csv", "citing,cited,count\n" + "\n".join(reversed(rows)) + "\n"
        )
        r1, m1 = load_edge_list(p1)
        r2, m2 = load_edge_list(p2)
        # Ids differ with input order, but the matrix is identical by name.
        for cited in "ABC":
            for citing in "ABC":
                assert m1.cell(r1.id_of(cited), r1.id_of(citing)) == m2.cell(
                    r2.id_of(cited), r2.id_of(citing)
                )

    def test_canonicalization_merges_case_and_space(self, tmp_path):
        path = write(
            tmp_path, "e.csv", 'citing,cited,count\n" J One ",X,1\nj one,Y,2\n'
        )
        registry, _ = load_edge_list(path)
        assert len(registry) == 3  # "J One" and "j one" collapse

    def test_malformed_rows(self, tmp_path):
        bad_arity = write(tmp_path, "a.csv", "citing,cited,count\nA,B\n")
        with pytest.raises(ParseError, match="line 2"):
            load_edge_list(bad_arity)
        bad_count = write(tmp_path, "b.csv", "citing,cited,count\nA,B,x\n")
        with pytest.raises(ParseError, match="not an integer"):
            load_edge_list(bad_count)
        nonpositive = write(tmp_path, "c.csv", "citing,cited,count\nA,B,0\n")
        with pytest.raises(ParseError, match="positive"):
            load_edge_list(nonpositive)

    def test_empty_file(self, tmp_path):
        empty = write(tmp_path, "e.csv", "")
        with pytest.raises(EmptyCorpusError):
            load_edge_list(empty)
        header_only = write(tmp_path, "h.csv", "citing,cited,count\n")
        with pytest.raises(EmptyCorpusError):
            load_edge_list(header_only)

    def test_bad_header(self, tmp_path):
        path = write(tmp_path, "e.csv", "cited,citing,count\nA,B,1\n")
        with pytest.raises(ParseError, match="header"):
            load_edge_list(path)


class TestMatrixMarket:
    def test_small_direct(self, tmp_path):
        mm = write(
            tmp_path,
            "m.mtx",
            "%%MatrixMarket matrix coordinate integer general\n2 2 2\n1 1 5\n1 2 3\n",
        )
        registry, matrix = load_matrix_market(mm)
        assert matrix.n == 2 and matrix.nnz == 2
        assert registry.name_of(0) == "J0"
        assert matrix.cell(0, 0) == 5 and matrix.cell(0, 1) == 3

    def test_symmetric_fixture_transpose(self, tmp_path):
        mm = write(
            tmp_path,
            "m.mtx",
            "%%MatrixMarket matrix coordinate integer symmetric\n3 3 3\n1 1 2\n2 1 7\n3 2 4\n",
        )
        _, matrix = load_matrix_market(mm)
        dense = matrix.tocsr().toarray()
        assert np.array_equal(dense, dense.T)

    def test_round_trip(self, tmp_path):
        import scipy.io
        import scipy.sparse as sp

        rng = np.random.default_rng(5)
        dense = rng.integers(0, 4, size=(5, 5))
        path = tmp_path / "r.mtx"
        scipy.io.mmwrite(str(path), sp.coo_matrix(dense), field="integer")
        _, matrix = load_matrix_market(path)
        assert np.array_equal(matrix.tocsr().toarray(), dense)

    def test_non_square(self, tmp_path):
        mm = write(
            tmp_path,
            "m.mtx",
            "%%MatrixMarket matrix coordinate integer general\n2 3 1\n1 1 5\n",
        )
        with pytest.raises(DimensionError):
            load_matrix_market(mm)

    def test_negative_entry(self, tmp_path):
        mm = write(
            tmp_path,
            "m.mtx",
            "%%MatrixMarket matrix coordinate integer general\n2 2 1\n1 1 -5\n",
        )
        with pytest.raises(ParseError, match="negative"):
            load_matrix_market(mm)

    def test_sidecar_names(self, tmp_path):
        mm = write(
            tmp_path,
            "m.mtx",
            "%%MatrixMarket matrix coordinate integer general\n2 2 1\n1 2 3\n",
        )
        names = write(tmp_path, "names.txt", "Alpha\nBeta\n")
        registry, matrix = load_matrix_market(mm, names)
        assert registry.name_of(0) == "Alpha"
        assert matrix.cell(registry.id_of("Alpha"), registry.id_of("Beta")) == 3


class TestMetadata:
    def test_fields_attached(self, tmp_path, corpus3):
        registry, _ = corpus3
        meta = write(tmp_path, "m.csv", "name,category,total_cites,impact_factor,immediacy\nA,LIS,100,1.5,0.2\n")
        unmatched = load_metadata(meta, registry)
        assert unmatched == 0
        entry = registry.entries[registry.id_of("A")]
        assert entry.category == "LIS"
        assert entry.total_cites == 100
        assert entry.impact_factor == 1.5
        assert entry.immediacy == 0.2

    def test_unknown_journal_is_warned_not_fatal(self, tmp_path, corpus3):
        registry, _ = corpus3
        meta = write(tmp_path, "m.csv", "name,category\nNOPE,LIS\n")
        assert load_metadata(meta, registry) == 1
        assert all(e.category is None for e in registry.entries)

    def test_duplicate_rows_conflict(self, tmp_path, corpus3):
        registry, _ = corpus3
        meta = write(tmp_path, "m.csv", "name,category\nA,LIS\nA,PHYS\n")
        with pytest.raises(MetadataConflictError):
            load_metadata(meta, registry)

    def test_category_subset_of_61(self, tmp_path):
        n = 100
        rows = "\n".join(f"X,J{k},1" for k in range(n))
        edges = write(tmp_path, "e.csv", "citing,cited,count\n" + rows + "\n")
        registry, matrix = load_edge_list(edges)
        meta_rows = "\n".join(f"J{k},LIS" for k in range(61))
        meta = write(tmp_path, "m.csv", "name,category\n" + meta_rows + "\n")
        load_metadata(meta, registry)
        ids = registry.ids_in_category("LIS")
        assert len(ids) == 61
        scope = subset(matrix, registry, ids, SubsetMode.LOCAL_SUBMATRIX)
        assert scope.matrix.n == 61


class TestVector:
    def test_diagonal_only_support(self):
        matrix = CitationMatrix.from_cells(2, {(0, 0): 7})
        vec = vector(matrix, 0, Direction.CITED)
        assert vec.support_size == 1
        assert vec.counts.sum() == 7

    def test_direction_convention(self):
        # cell (cited=A0, citing=B1) = 2: A's citing vector is empty.
        matrix = CitationMatrix.from_cells(2, {(0, 1): 2})
        assert vector(matrix, 0, Direction.CITING).support_size == 0
        assert vector(matrix, 0, Direction.CITED).support_size == 1
        assert vector(matrix, 1, Direction.CITING).support_size == 1

    def test_hand_read_slices(self, corpus4):
        registry, matrix = corpus4
        w, x = registry.id_of("W"), registry.id_of("X")
        cited = vector(matrix, x, Direction.CITED)
        assert dict(zip(cited.ids, cited.counts)) == {
            registry.id_of("W"): 2,
            registry.id_of("Y"): 5,
        }
        # column W holds cells (cited=X, citing=W)=2 and the diagonal (W,W)=7
        citing = vector(matrix, w, Direction.CITING)
        assert dict(zip(citing.ids, citing.counts)) == {
            registry.id_of("X"): 2,
            registry.id_of("W"): 7,
        }

    def test_cited_equals_transposed_citing(self, corpus4):
        _, matrix = corpus4
        transposed = CitationMatrix(
            matrix.n, *_coo_arrays(matrix.tocsr().T.tocoo())
        )
        for jid in range(matrix.n):
            a = vector(matrix, jid, Direction.CITED)
            b = vector(transposed, jid, Direction.CITING)
            assert np.array_equal(np.sort(a.ids), np.sort(b.ids))
            assert dict(zip(a.ids, a.counts)) == dict(zip(b.ids, b.counts))

    def test_out_of_range(self, corpus3):
        _, matrix = corpus3
        with pytest.raises(UnknownJournalError):
            vector(matrix, 99, Direction.CITED)


def _coo_arrays(coo):
    return coo.row, coo.col, coo.data.astype(np.int64)


class TestSubset:
    def test_full_set_identity_both_modes(self, corpus4):
        registry, matrix = corpus4
        all_ids = list(range(matrix.n))
        local = subset(matrix, registry, all_ids, SubsetMode.LOCAL_SUBMATRIX)
        assert np.array_equal(
            local.matrix.tocsr().toarray(), matrix.tocsr().toarray()
        )
        glob = subset(matrix, registry, all_ids, SubsetMode.GLOBAL_CONTEXT)
        assert glob.matrix is matrix

    def test_local_restriction(self, corpus4):
        registry, matrix = corpus4
        w, x = registry.id_of("W"), registry.id_of("X")
        scope = subset(matrix, registry, [w, x], SubsetMode.LOCAL_SUBMATRIX)
        dense = scope.matrix.tocsr().toarray()
        assert dense.shape == (2, 2)
        # only intra-pair cells survive: (X,W)=2, (W,X)=1, (W,W)=7
        assert dense.sum() == 10

    def test_global_context_gini_matches_full_run(self, corpus4):
        registry, matrix = corpus4
        x = registry.id_of("X")
        scope = subset(matrix, registry, [x], SubsetMode.GLOBAL_CONTEXT)
        full_value = gini(vector(matrix, x, Direction.CITED))
        scoped_value = gini(vector(scope.matrix, x, Direction.CITED))
        assert full_value == scoped_value

    def test_local_then_full_is_identity(self, corpus4):
        registry, matrix = corpus4
        scope = subset(matrix, registry, [0, 1, 2, 3], SubsetMode.LOCAL_SUBMATRIX)
        again = subset(
            scope.matrix, scope.registry, [0, 1, 2, 3], SubsetMode.LOCAL_SUBMATRIX
        )
        assert np.array_equal(
            again.matrix.tocsr().toarray(), matrix.tocsr().toarray()
        )

    def test_errors(self, corpus3):
        registry, matrix = corpus3
        with pytest.raises(UnknownJournalError):
            subset(matrix, registry, [], SubsetMode.GLOBAL_CONTEXT)
        with pytest.raises(UnknownJournalError):
            subset(matrix, registry, [17], SubsetMode.LOCAL_SUBMATRIX)
