"""LT output degree distributions: validation, parsing, sampling."""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np

__all__ = [
    "DegreeDistribution",
    "parse",
    "render",
    "load",
    "builtin_names",
]

# |sum - 1| beyond this is an error; inside it we renormalize. Published
# tables are typically rounded to 4 decimals and miss exact 1 by ~1e-4 in
# the worst case, but the shipped built-ins are far tighter than this.
_NORM_TOL = 1e-6


@dataclass(frozen=True)
class DegreeDistribution:
    """Immutable PMF over output degrees.

    entries: ((degree, probability), ...) with strictly increasing degrees
    >= 1 and positive probabilities renormalized to sum to 1. Hashable, so
    downstream caches can key on the distribution itself.
    """

    entries: tuple[tuple[int, float], ...]
    name: str | None = field(default=None, compare=False)

    def __post_init__(self):
        if not self.entries:
            raise ValueError("empty degree distribution")
        prev = 0
        for deg, p in self.entries:
            if not isinstance(deg, int) or deg < 1:
                raise ValueError(f"degree {deg!r} is not a positive integer")
            if deg <= prev:
                raise ValueError(f"degrees not strictly increasing at {deg}")
            if not (0.0 < p <= 1.0 + _NORM_TOL):
                raise ValueError(f"probability {p!r} for degree {deg} out of (0,1]")
            prev = deg
        total = math.fsum(p for _, p in self.entries)
        if abs(total - 1.0) > _NORM_TOL:
            raise ValueError(f"probabilities sum to {total!r}, not 1")
        # Renormalize to a fixpoint of the division step. A single division
        # can leave the sum one ulp off 1.0, which would make a second
        # construction from the rendered text nudge the values again and
        # break the parse/render round trip; iterating to a repeat makes the
        # stored tuple reproduce itself exactly.
        probs = tuple(p for _, p in self.entries)
        seen = set()
        while probs not in seen:
            seen.add(probs)
            t = math.fsum(probs)
            if t == 1.0:
                break
            probs = tuple(p / t for p in probs)
        if probs != tuple(p for _, p in self.entries):
            object.__setattr__(
                self,
                "entries",
                tuple((deg, p) for (deg, _), p in zip(self.entries, probs)),
            )

    @classmethod
    def from_dict(cls, pmf: dict[int, float], name: str | None = None) -> DegreeDistribution:
        return cls(tuple(sorted(pmf.items())), name=name)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(deg for deg, _ in self.entries)

    @property
    def probs(self) -> tuple[float, ...]:
        return tuple(p for _, p in self.entries)

    @property
    def d_max(self) -> int:
        return self.entries[-1][0]

    def average_degree(self) -> float:
        return float(sum(deg * p for deg, p in self.entries))

    def all_odd_support(self) -> bool:
        return all(deg % 2 == 1 for deg, _ in self.entries)

    def sample_degree(self, rng: np.random.Generator) -> int:
        degs, cdf = _sampling_tables(self)
        return int(degs[np.searchsorted(cdf, rng.random(), side="right")])

    def sample_degrees(self, rng: np.random.Generator, size: int) -> np.ndarray:
        degs, cdf = _sampling_tables(self)
        return degs[np.searchsorted(cdf, rng.random(size), side="right")]


@functools.lru_cache(maxsize=None)
def _sampling_tables(dist: DegreeDistribution) -> tuple[np.ndarray, np.ndarray]:
    degs = np.array(dist.degrees, dtype=np.int64)
    cdf = np.cumsum(np.array(dist.probs, dtype=np.float64))
    cdf[-1] = 1.0  # guard the top bin against float round-off
    return degs, cdf


def parse(text: str, name: str | None = None) -> DegreeDistribution:
    """Parse the distribution file format.

    One "degree probability" pair per line; '#' starts a comment; blank
    lines are ignored. Raises ValueError with the offending line number on
    malformed input, duplicate or non-positive degrees, and probabilities
    that do not sum to 1 within tolerance.
    """
    pairs: dict[int, float] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise ValueError(f"line {lineno}: expected 'degree probability', got {raw!r}")
        try:
            deg = int(tokens[0])
            p = float(tokens[1])
        except ValueError:
            raise ValueError(f"line {lineno}: could not parse {raw!r}") from None
        if deg < 1:
            raise ValueError(f"line {lineno}: degree must be >= 1, got {deg}")
        if deg in pairs:
            raise ValueError(f"line {lineno}: duplicate degree {deg}")
        pairs[deg] = p
    if not pairs:
        raise ValueError("no degree entries found")
    return DegreeDistribution(tuple(sorted(pairs.items())), name=name)


def render(dist: DegreeDistribution) -> str:
    """Inverse of parse: shortest float representations, so the round trip
    is exact."""
    return "\n".join(f"{deg} {p!r}" for deg, p in dist.entries) + "\n"


def builtin_names() -> tuple[str, ...]:
    return ("omega1", "omega2")


def load(source: str | Path) -> DegreeDistribution:
    """Load a distribution by built-in name or from a file path."""
    if isinstance(source, str) and source in builtin_names():
        text = (
            resources.files("raptorspec")
            .joinpath(f"data/{source.replace('omega', 'omega_')}.txt")
            .read_text(encoding="utf-8")
        )
        return parse(text, name=source)
    path = Path(source)
    return parse(path.read_text(encoding="utf-8"), name=path.stem)
