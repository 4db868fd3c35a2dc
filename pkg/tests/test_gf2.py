"""GF(2) linear algebra: BitMatrix, null spaces, and the two solvers.

The inactivation solver must be an exact behavioral twin of plain Gaussian
elimination on solvability, solution, and rank; that contract is pinned by
a large randomized property test here.
"""
import numpy as np
import pytest

from raptorspec.gf2 import (
    BitMatrix,
    generator_from_parity,
    null_space_basis,
    solve_gaussian,
    solve_with_inactivation,
)


def _random_matrix(rng, rows, cols, density=0.5):
    bits = (rng.random((rows, cols)) < density).astype(np.uint8)
    return BitMatrix.from_rows(bits, cols)


class TestBitMatrix:
    def test_identity_and_get(self):
        m = BitMatrix.identity(5)
        for i in range(5):
            for j in range(5):
                assert m.get(i, j) == (i == j)
        assert m.rank() == 5

    def test_zeros_rank(self):
        assert BitMatrix.zeros(4, 7).rank() == 0

    def test_row_width_validation(self):
        with pytest.raises(ValueError):
            BitMatrix(1, 2, [0b100])

    def test_from_rows_to_array_round_trip(self, rng):
        m = _random_matrix(rng, 9, 13)
        assert BitMatrix.from_rows(m.to_array()) == m

    def test_from_columns_matches_transpose(self, rng):
        m = _random_matrix(rng, 6, 11)
        cols = [m.column_word(j) for j in range(11)]
        assert BitMatrix.from_columns(cols, 6) == m
        assert m.transpose().transpose() == m

    def test_matmul_against_numpy(self, rng):
        for _ in range(25):
            a = _random_matrix(rng, int(rng.integers(1, 12)), int(rng.integers(1, 12)))
            b = _random_matrix(rng, a.cols, int(rng.integers(1, 12)))
            got = (a @ b).to_array()
            want = (a.to_array().astype(int) @ b.to_array().astype(int)) % 2
            assert np.array_equal(got, want)

    def test_transpose_of_product(self, rng):
        a = _random_matrix(rng, 7, 9)
        b = _random_matrix(rng, 9, 5)
        assert (a @ b).transpose() == b.transpose() @ a.transpose()

    def test_mul_vec_matches_matmul(self, rng):
        m = _random_matrix(rng, 8, 8)
        for _ in range(20):
            v = int(rng.integers(0, 1 << 8))
            col = BitMatrix.from_columns([v], 8)
            assert m.mul_vec(v) == (m @ col).column_word(0)

    def test_rank_matches_numpy_gf2(self, rng):
        # oracle: row reduce over GF(2) with numpy ops
        for _ in range(40):
            rows = int(rng.integers(1, 16))
            cols = int(rng.integers(1, 16))
            m = _random_matrix(rng, rows, cols, float(rng.uniform(0.1, 0.9)))
            arr = m.to_array().astype(np.int64)
            r = 0
            for c in range(cols):
                piv = next((i for i in range(r, rows) if arr[i, c]), None)
                if piv is None:
                    continue
                arr[[r, piv]] = arr[[piv, r]]
                for i in range(rows):
                    if i != r and arr[i, c]:
                        arr[i] = (arr[i] + arr[r]) % 2
                r += 1
            assert m.rank() == r

    def test_word_packing(self, rng):
        for rows, cols in [(70, 3), (3, 70), (64, 64), (65, 130)]:
            m = BitMatrix.random(rows, cols, rng)
            words = m.to_words64()
            nw = max(1, (cols + 63) // 64)
            assert words.shape == (rows, nw)
            for i in range(rows):
                packed = 0
                for w in range(nw):
                    packed |= int(words[i, w]) << (64 * w)
                assert packed == m.row_word(i)


class TestNullSpace:
    def test_documented_parity_example(self):
        # H = [[1,1,0],[0,1,1]] has the single nonzero codeword 111
        h = BitMatrix.from_rows([[1, 1, 0], [0, 1, 1]])
        basis, free = null_space_basis(h)
        assert basis.rows == 1
        assert basis.row_word(0) == 0b111
        assert len(free) == 1

    def test_basis_spans_kernel_exhaustively(self, rng):
        for _ in range(30):
            rows = int(rng.integers(1, 7))
            cols = int(rng.integers(1, 10))
            h = BitMatrix.random(rows, cols, rng)
            basis, free = null_space_basis(h)
            brute = {v for v in range(1 << cols) if h.mul_vec(v) == 0}
            spanned = set()
            for coeffs in range(1 << basis.rows):
                x = 0
                for i in range(basis.rows):
                    if (coeffs >> i) & 1:
                        x ^= basis.row_word(i)
                spanned.add(x)
            assert spanned == brute
            assert len(brute) == 1 << (cols - h.rank())
            # systematic on the free columns
            for i, f in enumerate(free):
                for j in range(basis.rows):
                    assert basis.get(j, f) == (i == j)

    def test_generator_from_parity(self, rng):
        rep = generator_from_parity(BitMatrix.from_rows([[1, 1, 0], [0, 1, 1]]))
        assert not rep.deficient
        assert rep.generator.rows == 1
        assert rep.generator.row_word(0) == 0b111
        for _ in range(20):
            hh = BitMatrix.random(3, 8, rng)
            rep = generator_from_parity(hh)
            assert rep.rank == hh.rank()
            if rep.deficient:
                assert hh.rank() < 3
                continue
            k = 8 - 3
            assert rep.generator.rows == k
            assert rep.generator @ hh.transpose() == BitMatrix.zeros(k, 3)
            assert rep.generator.rank() == k
            assert len(rep.message_cols) == k

    def test_generator_deficiency_reported(self):
        # rank-1 parity with 2 rows cannot be completed to a generator of
        # the nominal dimension
        rep = generator_from_parity(BitMatrix(2, 2, [0b11, 0b11]))
        assert rep.deficient
        assert rep.generator is None
        assert rep.rank == 1


class TestSolvers:
    def test_identity_system(self):
        res = solve_with_inactivation(BitMatrix.identity(6), (1, 0, 1, 1, 0, 1))
        assert res.status == "unique"
        assert res.solution == (1, 0, 1, 1, 0, 1)
        assert res.inactivations == 0
        assert res.rank == 6

    def test_inconsistent_example(self):
        m = BitMatrix(2, 2, [0b11, 0b11])
        for solver in (solve_gaussian, solve_with_inactivation):
            res = solver(m, (1, 0))
            assert res.status == "inconsistent"
            assert res.rank == 1

    def test_ambiguous(self):
        res = solve_with_inactivation(BitMatrix(1, 2, [0b01]), (1,))
        assert res.status == "ambiguous"
        assert res.rank == 1
        assert res.solution is None

    def test_cycle_needs_one_inactivation(self):
        # 3-cycle of degree-2 equations: no degree-1 seed, one inactivation
        # unlocks full peeling
        m = BitMatrix(3, 3, [0b011, 0b110, 0b101])
        res = solve_with_inactivation(m, (1, 1, 0))
        assert res.status == "ambiguous"  # rank 2 < 3
        assert res.inactivations == 1
        assert res.rank == 2

    def test_anchored_cycle_peels_clean(self):
        m = BitMatrix(4, 3, [0b011, 0b110, 0b101, 0b001])
        res = solve_with_inactivation(m, (1, 1, 0, 1))
        assert res.status == "unique"
        assert res.inactivations == 0
        assert res.solution == (1, 0, 1)

    def test_rhs_length_checked(self):
        with pytest.raises(ValueError):
            solve_gaussian(BitMatrix.identity(3), (1, 0))
        with pytest.raises(ValueError):
            solve_with_inactivation(BitMatrix.identity(3), (1, 0))

    def test_solver_equivalence_property(self, rng):
        # the contract: identical solvability verdict, rank, and (when
        # unique) solution, across >= 1000 random instances up to 32x32
        statuses = {"unique": 0, "ambiguous": 0, "inconsistent": 0}
        for _ in range(1200):
            rows = int(rng.integers(1, 33))
            cols = int(rng.integers(1, 33))
            m = _random_matrix(rng, rows, cols, float(rng.uniform(0.05, 0.9)))
            rhs = tuple(int(b) for b in rng.integers(0, 2, rows))
            ref = solve_gaussian(m, rhs)
            got = solve_with_inactivation(m, rhs)
            assert got.status == ref.status, (m.to_array().tolist(), rhs)
            assert got.rank == ref.rank
            if ref.status == "unique":
                assert got.solution == ref.solution
                x = sum(b << i for i, b in enumerate(got.solution))
                for i in range(rows):
                    assert (m.row_word(i) & x).bit_count() % 2 == rhs[i]
            statuses[ref.status] += 1
        # the sweep must exercise every verdict
        assert all(v > 0 for v in statuses.values()), statuses
