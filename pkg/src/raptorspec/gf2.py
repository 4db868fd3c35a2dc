"""Dense GF(2) linear algebra on bit-packed rows.

Rows are stored as Python integers used as bit masks (bit ``c`` of row ``r``
is column ``c``), so a row XOR is a single machine-word-parallel operation
regardless of width. This is the elimination primitive everything else in
the package leans on.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "BitMatrix",
    "GeneratorFromParity",
    "LinearSolve",
    "InactivationSolve",
    "null_space_basis",
    "generator_from_parity",
    "solve_gaussian",
    "solve_with_inactivation",
]


class BitMatrix:
    """A rows x cols matrix over GF(2).

    Treated as immutable: every operation returns a new matrix and never
    mutates its inputs. Safe to share across threads.
    """

    __slots__ = ("rows", "cols", "words")

    def __init__(self, rows: int, cols: int, words: list[int] | None = None):
        if rows < 0 or cols < 0:
            raise ValueError("negative dimensions")
        self.rows = rows
        self.cols = cols
        self.words = [0] * rows if words is None else list(words)
        if len(self.words) != rows:
            raise ValueError("row count does not match storage")
        mask = (1 << cols) - 1
        for w in self.words:
            if w & ~mask:
                raise ValueError("row has bits beyond the column count")

    # -- constructors ------------------------------------------------------

    @classmethod
    def zeros(cls, rows: int, cols: int) -> BitMatrix:
        return cls(rows, cols)

    @classmethod
    def identity(cls, n: int) -> BitMatrix:
        return cls(n, n, [1 << i for i in range(n)])

    @classmethod
    def from_rows(cls, rows_of_bits, cols: int | None = None) -> BitMatrix:
        """Build from an iterable of 0/1 sequences (e.g. lists or ndarray rows)."""
        packed = []
        width = cols
        for bits in rows_of_bits:
            bits = list(bits)
            if width is None:
                width = len(bits)
            elif len(bits) != width:
                raise ValueError("ragged rows")
            w = 0
            for c, b in enumerate(bits):
                if b:
                    w |= 1 << c
            packed.append(w)
        return cls(len(packed), 0 if width is None else width, packed)

    @classmethod
    def from_columns(cls, col_words: list[int], rows: int) -> BitMatrix:
        """Build from per-column bit masks over `rows` row indices."""
        words = [0] * rows
        for c, cw in enumerate(col_words):
            while cw:
                lsb = cw & -cw
                words[lsb.bit_length() - 1] |= 1 << c
                cw ^= lsb
        return cls(rows, len(col_words), words)

    @classmethod
    def random(cls, rows: int, cols: int, rng: np.random.Generator) -> BitMatrix:
        bits = rng.integers(0, 2, size=(rows, cols), dtype=np.uint8)
        return cls.from_rows(bits, cols)

    # -- accessors ---------------------------------------------------------

    def get(self, r: int, c: int) -> int:
        if not (0 <= r < self.rows and 0 <= c < self.cols):
            raise IndexError("bit index out of range")
        return (self.words[r] >> c) & 1

    def row_word(self, r: int) -> int:
        return self.words[r]

    def column_word(self, c: int) -> int:
        if not 0 <= c < self.cols:
            raise IndexError("column out of range")
        w = 0
        for r, row in enumerate(self.words):
            w |= ((row >> c) & 1) << r
        return w

    def to_array(self) -> np.ndarray:
        out = np.zeros((self.rows, self.cols), dtype=np.uint8)
        for r, w in enumerate(self.words):
            while w:
                lsb = w & -w
                out[r, lsb.bit_length() - 1] = 1
                w ^= lsb
        return out

    def to_words64(self) -> np.ndarray:
        """Rows as little-endian uint64 word blocks, for the jitted kernels."""
        nwords = max(1, (self.cols + 63) // 64)
        out = np.zeros((self.rows, nwords), dtype=np.uint64)
        m64 = (1 << 64) - 1
        for r, w in enumerate(self.words):
            i = 0
            while w:
                out[r, i] = w & m64
                w >>= 64
                i += 1
        return out

    # -- algebra -----------------------------------------------------------

    def transpose(self) -> BitMatrix:
        words = [0] * self.cols
        for r, w in enumerate(self.words):
            while w:
                lsb = w & -w
                words[lsb.bit_length() - 1] |= 1 << r
                w ^= lsb
        return BitMatrix(self.cols, self.rows, words)

    def __matmul__(self, other: BitMatrix) -> BitMatrix:
        if self.cols != other.rows:
            raise ValueError(
                f"dimension mismatch: ({self.rows}x{self.cols}) @ ({other.rows}x{other.cols})"
            )
        out = []
        for w in self.words:
            acc = 0
            ww = w
            while ww:
                lsb = ww & -ww
                acc ^= other.words[lsb.bit_length() - 1]
                ww ^= lsb
            out.append(acc)
        return BitMatrix(self.rows, other.cols, out)

    def mul_vec(self, vec: int) -> int:
        """self (rows x cols) times a column vector given as a bit mask."""
        out = 0
        for r, w in enumerate(self.words):
            out |= ((w & vec).bit_count() & 1) << r
        return out

    def rank(self) -> int:
        work = list(self.words)
        rank = 0
        for col in range(self.cols):
            bit = 1 << col
            pivot = None
            for r in range(rank, len(work)):
                if work[r] & bit:
                    pivot = r
                    break
            if pivot is None:
                continue
            work[rank], work[pivot] = work[pivot], work[rank]
            pw = work[rank]
            for r in range(len(work)):
                if r != rank and work[r] & bit:
                    work[r] ^= pw
            rank += 1
            if rank == len(work):
                break
        return rank

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, BitMatrix)
            and self.rows == other.rows
            and self.cols == other.cols
            and self.words == other.words
        )

    def __repr__(self) -> str:
        return f"BitMatrix({self.rows}x{self.cols})"


def _rref(words: list[int], cols: int) -> tuple[list[int], list[int]]:
    """Reduced row echelon form. Returns (reduced rows, pivot column list)."""
    work = list(words)
    pivot_cols: list[int] = []
    rank = 0
    for col in range(cols):
        bit = 1 << col
        pivot = None
        for r in range(rank, len(work)):
            if work[r] & bit:
                pivot = r
                break
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        pw = work[rank]
        for r in range(len(work)):
            if r != rank and work[r] & bit:
                work[r] ^= pw
        pivot_cols.append(col)
        rank += 1
    return work[:rank], pivot_cols


def null_space_basis(m: BitMatrix) -> tuple[BitMatrix, tuple[int, ...]]:
    """Basis of {v : m v^T = 0}, one row per free column of m.

    Returns (basis, free_cols). Row i has bit free_cols[i] set and is zero at
    every other free column, so the basis is systematic in the free positions.
    """
    reduced, pivot_cols = _rref(m.words, m.cols)
    pivot_set = set(pivot_cols)
    free_cols = tuple(c for c in range(m.cols) if c not in pivot_set)
    basis = []
    for f in free_cols:
        v = 1 << f
        fbit = 1 << f
        for i, p in enumerate(pivot_cols):
            if reduced[i] & fbit:
                v |= 1 << p
        basis.append(v)
    return BitMatrix(len(basis), m.cols, basis), free_cols


@dataclass(frozen=True)
class GeneratorFromParity:
    """Result of turning a parity-check matrix into a generator.

    `generator` is None when the parity matrix is rank deficient; `rank` is
    always the achieved rank of the input. `message_cols` records the
    column permutation: the generator is the identity on those columns, so
    message bit i of an encoded word sits at column message_cols[i].
    """

    generator: BitMatrix | None
    rank: int
    message_cols: tuple[int, ...]

    @property
    def deficient(self) -> bool:
        return self.generator is None


def generator_from_parity(h_mat: BitMatrix) -> GeneratorFromParity:
    """Generator of the code {v : h_mat v^T = 0} for a full-rank parity matrix.

    The expected use is an (h-k) x h parity matrix; on full rank the returned
    generator is k x h, systematic on the free (non-pivot) columns. If the
    parity matrix has rank below its row count the code has dimension above
    k and no generator is chosen here; the report carries the achieved rank.
    """
    basis, free_cols = null_space_basis(h_mat)
    rank = h_mat.cols - basis.rows
    if rank < h_mat.rows:
        return GeneratorFromParity(None, rank, ())
    return GeneratorFromParity(basis, rank, free_cols)


@dataclass(frozen=True)
class LinearSolve:
    status: str  # "unique" | "ambiguous" | "inconsistent"
    solution: tuple[int, ...] | None
    rank: int

    @property
    def ok(self) -> bool:
        return self.status == "unique"


def solve_gaussian(a: BitMatrix, rhs) -> LinearSolve:
    """Plain Gaussian elimination for a v = rhs. Oracle twin of the
    inactivation solver; no peeling, no cleverness.

    An inconsistent system reports "inconsistent" even when the rank is also
    column deficient.
    """
    rhs = list(rhs)
    if len(rhs) != a.rows:
        raise ValueError("rhs length does not match row count")
    work = list(a.words)
    b = [int(x) & 1 for x in rhs]
    pivot_of_col: dict[int, int] = {}
    rank = 0
    for col in range(a.cols):
        bit = 1 << col
        pivot = None
        for r in range(rank, len(work)):
            if work[r] & bit:
                pivot = r
                break
        if pivot is None:
            continue
        work[rank], work[pivot] = work[pivot], work[rank]
        b[rank], b[pivot] = b[pivot], b[rank]
        pw, pb = work[rank], b[rank]
        for r in range(len(work)):
            if r != rank and work[r] & bit:
                work[r] ^= pw
                b[r] ^= pb
        pivot_of_col[col] = rank
        rank += 1
    for r in range(rank, len(work)):
        if work[r] == 0 and b[r]:
            return LinearSolve("inconsistent", None, rank)
    if rank < a.cols:
        return LinearSolve("ambiguous", None, rank)
    sol = tuple(b[pivot_of_col[c]] for c in range(a.cols))
    return LinearSolve("unique", sol, rank)


@dataclass(frozen=True)
class InactivationSolve:
    status: str  # "unique" | "ambiguous" | "inconsistent"
    solution: tuple[int, ...] | None
    inactivations: int
    rank: int

    @property
    def ok(self) -> bool:
        return self.status == "unique"


def solve_with_inactivation(a: BitMatrix, rhs) -> InactivationSolve:
    """Solve a v = rhs by peeling with deferred (inactivated) variables.

    Equations of residual degree 1 are peeled first; on a stall the
    unresolved variable appearing in the largest number of residual
    equations is inactivated (ties broken by lowest column index) and
    carried symbolically until a final dense solve over the inactivated
    variables. The inactivation count is deterministic given this policy.

    Note the occurrence count of an unresolved variable never changes
    during elimination (an equation only dies when its last variable goes),
    so the stall pivot can be chosen from the initial counts.

    Args:
        a: coefficient matrix.
        rhs: length a.rows sequence of 0/1.

    Returns:
        InactivationSolve with the unique solution, or status "ambiguous" /
        "inconsistent". `rank` is the rank of `a` in all cases.
    """
    rhs = list(rhs)
    if len(rhs) != a.rows:
        raise ValueError("rhs length does not match row count")
    n_eq, n_var = a.rows, a.cols

    support = list(a.words)
    const = [int(x) & 1 for x in rhs]
    sym = [0] * n_eq  # bit mask over inactivation slots
    deg = [w.bit_count() for w in support]

    occ = [0] * n_var
    adj: list[list[int]] = [[] for _ in range(n_var)]
    for i, w in enumerate(support):
        while w:
            lsb = w & -w
            v = lsb.bit_length() - 1
            occ[v] += 1
            adj[v].append(i)
            w ^= lsb

    UNKNOWN, PEELED, INACTIVE = 0, 1, 2
    state = [UNKNOWN] * n_var
    res_sym = [0] * n_var
    res_bit = [0] * n_var
    slot_of = [-1] * n_var

    stack = [i for i in range(n_eq) if deg[i] == 1]
    peels = 0
    n_slots = 0

    def eliminate(v: int, v_sym: int, v_bit: int, skip_eq: int) -> None:
        for t in adj[v]:
            if t == skip_eq:
                continue
            support[t] ^= 1 << v
            deg[t] -= 1
            sym[t] ^= v_sym
            const[t] ^= v_bit
            if deg[t] == 1:
                stack.append(t)

    while True:
        while stack:
            i = stack.pop()
            if deg[i] != 1:
                continue
            v = support[i].bit_length() - 1
            state[v] = PEELED
            res_sym[v] = sym[i]
            res_bit[v] = const[i]
            # equation i is consumed by the definition of v; it is not a
            # residual constraint
            support[i] = 0
            deg[i] = 0
            sym[i] = 0
            const[i] = 0
            peels += 1
            eliminate(v, res_sym[v], res_bit[v], i)
        # stall: inactivate the busiest unresolved variable
        best, best_occ = -1, 0
        for v in range(n_var):
            if state[v] == UNKNOWN and occ[v] > best_occ:
                best, best_occ = v, occ[v]
        if best < 0:
            break
        state[best] = INACTIVE
        slot_of[best] = n_slots
        eliminate(best, 1 << n_slots, 0, -1)
        n_slots += 1

    # every equation is now a constraint over the inactivated slots
    inconsistent = False
    slot_rows: list[int] = []
    slot_rhs: list[int] = []
    for i in range(n_eq):
        if sym[i]:
            slot_rows.append(sym[i])
            slot_rhs.append(const[i])
        elif const[i]:
            inconsistent = True

    dense = solve_gaussian(BitMatrix(len(slot_rows), n_slots, slot_rows), slot_rhs)
    rank = peels + dense.rank
    if inconsistent or dense.status == "inconsistent":
        return InactivationSolve("inconsistent", None, n_slots, rank)
    zero_cols = any(state[v] == UNKNOWN for v in range(n_var))
    if zero_cols or dense.status == "ambiguous":
        return InactivationSolve("ambiguous", None, n_slots, rank)

    z = 0
    if dense.solution is not None:
        for s, bit in enumerate(dense.solution):
            z |= bit << s
    sol = [0] * n_var
    for v in range(n_var):
        if state[v] == PEELED:
            sol[v] = res_bit[v] ^ ((res_sym[v] & z).bit_count() & 1)
        else:  # INACTIVE; UNKNOWN is excluded above
            sol[v] = (z >> slot_of[v]) & 1
    return InactivationSolve("unique", tuple(sol), n_slots, rank)
