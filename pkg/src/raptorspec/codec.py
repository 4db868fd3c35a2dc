"""Concrete code instances: sampling from the ensemble, encoding, ML
erasure decoding via peel-then-inactivate, and serialization."""
from __future__ import annotations

import json
import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import __version__
from .degrees import DegreeDistribution
from .gf2 import BitMatrix, null_space_basis, solve_with_inactivation
from .spectrum import EnsembleParams

__all__ = [
    "RaptorCodeInstance",
    "DecodeResult",
    "sample_code",
    "encode",
    "ml_decode",
    "code_min_distance",
    "save_instance",
    "load_instance",
]

_MAGIC = b"RSC1"
_VERSION = 1


@dataclass(frozen=True)
class RaptorCodeInstance:
    """One sampled code: random outer parity matrix plus a fixed-rate LT
    stage, with the derived generators cached.

    The outer generator is systematic on message_cols (message bit i lives
    at intermediate position message_cols[i]), which is how decoded
    intermediate words map back to messages. When the sampled parity
    matrix is rank deficient the stored generator is an arbitrary
    completion (first k rows of the null-space basis) and deficient_outer
    is set; such instances encode fine but are never uniquely decodable,
    and non_injective marks whether the end-to-end map loses messages.
    """

    params: EnsembleParams
    outer_parity: BitMatrix
    lt_generator: BitMatrix  # h x n, column c = support of output symbol c
    outer_generator: BitMatrix  # k x h
    message_cols: tuple[int, ...]
    composite_generator: BitMatrix  # k x n
    composite_rank: int
    deficient_outer: bool
    dist_name: str | None = None
    seed: int | None = None

    @property
    def non_injective(self) -> bool:
        return self.composite_rank < self.params.k


def _sample_lt_columns(
    h: int, n: int, dist: DegreeDistribution, rng: np.random.Generator
) -> list[int]:
    """Column support masks: degree from the distribution, support a
    uniform subset without replacement (partial Fisher-Yates with undo, so
    the index pool is allocated once)."""
    pool = list(range(h))
    cols = []
    for _ in range(n):
        deg = dist.sample_degree(rng)
        swaps = []
        mask = 0
        for i in range(deg):
            j = int(rng.integers(i, h))
            pool[i], pool[j] = pool[j], pool[i]
            swaps.append((i, j))
            mask |= 1 << pool[i]
        for i, j in reversed(swaps):
            pool[i], pool[j] = pool[j], pool[i]
        cols.append(mask)
    return cols


def sample_code(
    params: EnsembleParams,
    dist: DegreeDistribution,
    rng: np.random.Generator,
    seed: int | None = None,
) -> RaptorCodeInstance:
    """Draw one instance: i.i.d. uniform parity bits for the outer code,
    then n independent LT columns."""
    k, h, n = params.k, params.h, params.n
    if dist.d_max > h:
        raise ValueError(f"distribution max degree {dist.d_max} exceeds h={h}")
    outer_parity = BitMatrix.random(h - k, h, rng)
    lt = BitMatrix.from_columns(_sample_lt_columns(h, n, dist, rng), h)

    basis, free_cols = null_space_basis(outer_parity)
    deficient = basis.rows != k  # null space dimension k iff parity full rank
    gen = BitMatrix(k, h, basis.words[:k])
    message_cols = free_cols[:k]
    composite = gen @ lt
    return RaptorCodeInstance(
        params=params,
        outer_parity=outer_parity,
        lt_generator=lt,
        outer_generator=gen,
        message_cols=message_cols,
        composite_generator=composite,
        composite_rank=composite.rank(),
        deficient_outer=deficient,
        dist_name=dist.name,
        seed=seed,
    )


def encode(inst: RaptorCodeInstance, u: int) -> int:
    """x = u G for a message given as a k-bit mask; returns an n-bit mask."""
    if u >> inst.params.k:
        raise ValueError("message has bits beyond k")
    acc = 0
    while u:
        lsb = u & -u
        acc ^= inst.composite_generator.words[lsb.bit_length() - 1]
        u ^= lsb
    return acc


@dataclass(frozen=True)
class DecodeResult:
    success: bool
    u: int | None
    inactivations: int
    rank: int  # achieved rank toward the k message bits
    status: str  # solver verdict: "unique" | "ambiguous" | "inconsistent"


def ml_decode(inst: RaptorCodeInstance, received) -> DecodeResult:
    """Maximum-likelihood erasure decoding through the intermediate word.

    received: iterable of (position, bit) pairs with distinct positions.
    The solved system stacks the outer parity equations (zero right-hand
    side) on the received LT columns; peeling plus inactivation gives both
    the verdict and the inactivation count. For a full-rank outer parity
    matrix a unique intermediate word exists exactly when the received
    columns of the composite generator have rank k.
    """
    k, h, n = inst.params.k, inst.params.h, inst.params.n
    rows = list(inst.outer_parity.words)
    rhs = [0] * (h - k)
    seen = set()
    for pos, bit in received:
        if not 0 <= pos < n:
            raise ValueError(f"position {pos} outside 0..{n - 1}")
        if pos in seen:
            raise ValueError(f"duplicate received position {pos}")
        seen.add(pos)
        rows.append(inst.lt_generator.column_word(pos))
        rhs.append(int(bit) & 1)
    res = solve_with_inactivation(BitMatrix(len(rows), h, rows), rhs)
    rank_u = max(0, res.rank - (h - k))
    if res.status != "unique":
        return DecodeResult(False, None, res.inactivations, rank_u, res.status)
    v = 0
    for i, b in enumerate(res.solution):
        v |= b << i
    u = 0
    for i, c in enumerate(inst.message_cols):
        u |= ((v >> c) & 1) << i
    return DecodeResult(True, u, res.inactivations, min(rank_u, k), res.status)


def code_min_distance(inst: RaptorCodeInstance) -> int:
    """Exhaustive minimum nonzero codeword weight; 0 iff non-injective.

    Walks messages in Gray-code order so each step is a single row XOR.
    Capped at k <= 24.
    """
    k = inst.params.k
    if k > 24:
        raise ValueError(f"exhaustive sweep capped at k <= 24, got k={k}")
    words = inst.composite_generator.words
    x = 0
    best = None
    gray_prev = 0
    for m in range(1, 1 << k):
        gray = m ^ (m >> 1)
        diff = gray ^ gray_prev
        x ^= words[diff.bit_length() - 1]
        gray_prev = gray
        w = x.bit_count()
        if best is None or w < best:
            best = w
            if best == 0:
                break
    return int(best)


def _pack_matrix(m: BitMatrix) -> bytes:
    nbytes = (m.cols + 7) // 8
    return b"".join(w.to_bytes(nbytes, "little") for w in m.words)


def _unpack_matrix(buf: bytes, offset: int, rows: int, cols: int) -> tuple[BitMatrix, int]:
    nbytes = (cols + 7) // 8
    words = []
    for r in range(rows):
        words.append(int.from_bytes(buf[offset : offset + nbytes], "little"))
        offset += nbytes
    return BitMatrix(rows, cols, words), offset


def save_instance(inst: RaptorCodeInstance, path: str | Path) -> None:
    """Versioned binary layout (dimensions, then row-major packed bits)
    plus a JSON sidecar carrying seed and distribution name."""
    path = Path(path)
    k, h, n = inst.params.k, inst.params.h, inst.params.n
    blob = bytearray()
    blob += _MAGIC
    blob += struct.pack("<HIII", _VERSION, k, h, n)
    blob += struct.pack("<B", 1 if inst.deficient_outer else 0)
    blob += _pack_matrix(inst.outer_parity)
    blob += _pack_matrix(inst.lt_generator)
    blob += _pack_matrix(inst.outer_generator)
    blob += struct.pack(f"<{k}I", *inst.message_cols)
    path.write_bytes(bytes(blob))
    sidecar = {
        "format_version": _VERSION,
        "tool_version": __version__,
        "k": k,
        "h": h,
        "n": n,
        "seed": inst.seed,
        "dist": inst.dist_name,
    }
    path.with_suffix(path.suffix + ".json").write_text(
        json.dumps(sidecar, indent=2) + "\n", encoding="utf-8"
    )


def load_instance(path: str | Path) -> RaptorCodeInstance:
    path = Path(path)
    buf = path.read_bytes()
    if buf[:4] != _MAGIC:
        raise ValueError(f"{path}: not a code instance file")
    version, k, h, n = struct.unpack_from("<HIII", buf, 4)
    if version != _VERSION:
        raise ValueError(f"{path}: unsupported format version {version}")
    offset = 4 + struct.calcsize("<HIII")
    (deficient,) = struct.unpack_from("<B", buf, offset)
    offset += 1
    outer_parity, offset = _unpack_matrix(buf, offset, h - k, h)
    lt, offset = _unpack_matrix(buf, offset, h, n)
    gen, offset = _unpack_matrix(buf, offset, k, h)
    message_cols = struct.unpack_from(f"<{k}I", buf, offset)
    offset += 4 * k

    seed = None
    dist_name = None
    sidecar_path = path.with_suffix(path.suffix + ".json")
    if sidecar_path.exists():
        sidecar = json.loads(sidecar_path.read_text(encoding="utf-8"))
        seed = sidecar.get("seed")
        dist_name = sidecar.get("dist")

    composite = gen @ lt
    return RaptorCodeInstance(
        params=EnsembleParams(k, h, n),
        outer_parity=outer_parity,
        lt_generator=lt,
        outer_generator=gen,
        message_cols=tuple(message_cols),
        composite_generator=composite,
        composite_rank=composite.rank(),
        deficient_outer=bool(deficient),
        dist_name=dist_name,
        seed=seed,
    )
