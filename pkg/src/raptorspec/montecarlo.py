"""BEC Monte Carlo: per-code CER curves with the stop-at-40-errors
protocol, ensemble aggregation, and deterministic seeding."""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from ._kernels import simulate_point
from .codec import RaptorCodeInstance, encode, ml_decode, sample_code
from .degrees import DegreeDistribution
from .spectrum import EnsembleParams

__all__ = [
    "SimConfig",
    "PointRecord",
    "CodeRecord",
    "SimReport",
    "simulate_code",
    "simulate_ensemble",
]


@dataclass(frozen=True)
class SimConfig:
    eps_grid: tuple[float, ...]
    num_codes: int
    seed: int
    target_errors: int = 40
    max_words: int = 100_000

    def __post_init__(self):
        object.__setattr__(self, "eps_grid", tuple(float(e) for e in self.eps_grid))
        if not self.eps_grid:
            raise ValueError("empty eps grid")
        for e in self.eps_grid:
            if not 0.0 <= e <= 1.0:
                raise ValueError(f"eps {e} outside [0,1]")
        if self.num_codes < 1 or self.target_errors < 1 or self.max_words < 1:
            raise ValueError("counts must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must fit in 64 bits")


@dataclass(frozen=True)
class PointRecord:
    """One (code, eps) cell. mean_inactivations averages over all decode
    attempts, successes included; NaN when no words were simulated."""

    eps: float
    words: int
    errors: int
    cer: float
    mean_inactivations: float


@dataclass(frozen=True)
class CodeRecord:
    """index is the spawn key: SeedSequence(config.seed, spawn_key=(index,))
    regenerates this instance's sampling stream."""

    index: int
    non_injective: bool
    points: tuple[PointRecord, ...]


@dataclass(frozen=True)
class SimReport:
    config: SimConfig
    params: EnsembleParams
    dist_name: str | None
    codes: tuple[CodeRecord, ...]

    def mean_cer(self) -> np.ndarray:
        """Unweighted mean of per-code CER estimates (codes are the unit of
        aggregation, not words; non-injective codes count at CER 1)."""
        rows = np.array([[p.cer for p in c.points] for c in self.codes])
        return rows.mean(axis=0)

    def pooled_cer(self) -> np.ndarray:
        """Alternative aggregation pooling all simulated words; codes with
        zero simulated words (non-injective) do not contribute."""
        errs = np.zeros(len(self.config.eps_grid))
        words = np.zeros(len(self.config.eps_grid))
        for c in self.codes:
            for i, p in enumerate(c.points):
                errs[i] += p.errors
                words[i] += p.words
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(words > 0, errs / np.maximum(words, 1), math.nan)

    def mean_inactivations(self) -> np.ndarray:
        """Mean over simulated codes of per-code mean inactivation counts."""
        out = np.full(len(self.config.eps_grid), math.nan)
        for i in range(len(self.config.eps_grid)):
            vals = [
                c.points[i].mean_inactivations
                for c in self.codes
                if c.points[i].words > 0
            ]
            if vals:
                out[i] = float(np.mean(vals))
        return out

    def zero_distance_fraction(self) -> float:
        return sum(1 for c in self.codes if c.non_injective) / len(self.codes)

    def aggregate_csv(self, pooled: bool = False) -> str:
        cer = self.pooled_cer() if pooled else self.mean_cer()
        inact = self.mean_inactivations()
        lines = ["eps,mean_cer,mean_inact,n_codes"]
        for i, eps in enumerate(self.config.eps_grid):
            lines.append(
                f"{float(eps)!r},{float(cer[i])!r},{float(inact[i])!r},{len(self.codes)}"
            )
        return "\n".join(lines) + "\n"

    def per_code_csv(self) -> str:
        lines = ["code_index,non_injective,eps,words,errors,cer,mean_inact"]
        for c in self.codes:
            for p in c.points:
                lines.append(
                    f"{c.index},{int(c.non_injective)},{p.eps!r},{p.words},"
                    f"{p.errors},{p.cer!r},{p.mean_inactivations!r}"
                )
        return "\n".join(lines) + "\n"

    def to_json(self) -> str:
        def clean(x):
            if isinstance(x, float) and math.isnan(x):
                return None
            return x

        doc = {
            "config": asdict(self.config),
            "params": asdict(self.params),
            "dist": self.dist_name,
            "aggregate": {
                "eps": list(self.config.eps_grid),
                "mean_cer": [clean(v) for v in self.mean_cer().tolist()],
                "pooled_cer": [clean(v) for v in self.pooled_cer().tolist()],
                "mean_inactivations": [
                    clean(v) for v in self.mean_inactivations().tolist()
                ],
                "zero_distance_fraction": self.zero_distance_fraction(),
            },
            "codes": [
                {
                    "index": c.index,
                    "non_injective": c.non_injective,
                    "points": [
                        {
                            "eps": p.eps,
                            "words": p.words,
                            "errors": p.errors,
                            "cer": p.cer,
                            "mean_inactivations": clean(p.mean_inactivations),
                        }
                        for p in c.points
                    ],
                }
                for c in self.codes
            ],
        }
        return json.dumps(doc, indent=2) + "\n"


def _skip_record(eps: float) -> PointRecord:
    # non-injective code: some message pair collides, so every word is
    # ambiguous at the message level and the code scores a flat CER of 1
    return PointRecord(eps, 0, 0, 1.0, math.nan)


def simulate_code(
    inst: RaptorCodeInstance,
    eps: float,
    cfg: SimConfig,
    rng: np.random.Generator,
) -> PointRecord:
    """Reference (pure Python) simulation of one cell: transmit uniform
    messages, erase symbols i.i.d., ML-decode, stop at the error target or
    the word cap."""
    if inst.non_injective:
        return _skip_record(eps)
    k, n = inst.params.k, inst.params.n
    kbytes = (k + 7) // 8
    kmask = (1 << k) - 1
    words = 0
    errors = 0
    inact_sum = 0
    while words < cfg.max_words and errors < cfg.target_errors:
        words += 1
        u = int.from_bytes(rng.bytes(kbytes), "little") & kmask
        x = encode(inst, u)
        erased = rng.random(n) < eps
        received = [(c, (x >> c) & 1) for c in range(n) if not erased[c]]
        res = ml_decode(inst, received)
        if res.status == "inconsistent":
            raise AssertionError("self-generated codeword decoded inconsistent")
        inact_sum += res.inactivations
        if res.success:
            if res.u != u:
                raise AssertionError("unique decode disagrees with transmitted word")
        else:
            errors += 1
    return PointRecord(eps, words, errors, errors / words, inact_sum / words)


def _cell_seed(base_seed: int, code_idx: int, eps_idx: int) -> int:
    ss = np.random.SeedSequence(base_seed, spawn_key=(code_idx, eps_idx))
    return int(ss.generate_state(1, np.uint32)[0])


def _kernel_arrays(inst: RaptorCodeInstance) -> tuple[np.ndarray, np.ndarray]:
    parity = inst.outer_parity.to_words64()
    cols = inst.lt_generator.transpose().to_words64()  # row c = column c support
    return parity, cols


def simulate_ensemble(
    params: EnsembleParams,
    dist: DegreeDistribution,
    cfg: SimConfig,
    use_kernel: bool = True,
    threads: int = 1,
) -> SimReport:
    """Sample cfg.num_codes instances and run every (code, eps) cell.

    Each cell owns an RNG stream derived from (cfg.seed, code index, eps
    index), so the report is bit-identical for a given seed no matter how
    many threads execute the kernel cells.
    """
    records: list[CodeRecord] = []
    jobs = []  # (code_idx, eps_idx, parity, cols, eps, seed)
    instances: dict[int, RaptorCodeInstance] = {}
    for ci in range(cfg.num_codes):
        rng = np.random.default_rng(np.random.SeedSequence(cfg.seed, spawn_key=(ci,)))
        inst = sample_code(params, dist, rng, seed=cfg.seed)
        if inst.non_injective:
            records.append(
                CodeRecord(ci, True, tuple(_skip_record(e) for e in cfg.eps_grid))
            )
            continue
        instances[ci] = inst
        if use_kernel:
            parity, cols = _kernel_arrays(inst)
            for ei, eps in enumerate(cfg.eps_grid):
                jobs.append((ci, ei, parity, cols, eps, _cell_seed(cfg.seed, ci, ei)))
        records.append(CodeRecord(ci, False, ()))  # placeholder, filled below

    results: dict[tuple[int, int], PointRecord] = {}
    if use_kernel:

        def run(job):
            ci, ei, parity, cols, eps, seed = job
            w, e, isum = simulate_point(
                parity, cols, params.h, eps, cfg.target_errors, cfg.max_words, seed
            )
            return ci, ei, PointRecord(eps, int(w), int(e), e / w, isum / w)

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                for ci, ei, rec in pool.map(run, jobs):
                    results[ci, ei] = rec
        else:
            for job in jobs:
                ci, ei, rec = run(job)
                results[ci, ei] = rec
    else:
        for ci, inst in instances.items():
            for ei, eps in enumerate(cfg.eps_grid):
                rng = np.random.default_rng(
                    np.random.SeedSequence(cfg.seed, spawn_key=(ci, ei))
                )
                results[ci, ei] = simulate_code(inst, eps, cfg, rng)

    final = []
    for rec in records:
        if rec.non_injective:
            final.append(rec)
        else:
            pts = tuple(results[rec.index, ei] for ei in range(len(cfg.eps_grid)))
            final.append(CodeRecord(rec.index, False, pts))
    return SimReport(cfg, params, dist.name, tuple(final))
