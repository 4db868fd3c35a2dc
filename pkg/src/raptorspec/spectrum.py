"""Finite-length average weight spectrum of the Raptor ensemble.

The chain is: hypergeometric odd-overlap probabilities per output degree,
mixture over the degree distribution, LT input-output weight enumerator,
and finally the end-to-end average weight enumerator of the concatenation
with a random linear precoder. Everything downstream (typical minimum
distance, error-rate bounds) consumes the log-domain spectrum produced
here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.special import gammaln

from .degrees import DegreeDistribution

__all__ = [
    "EnsembleParams",
    "LogWeightSpectrum",
    "log2_binom",
    "p_j_l",
    "p_j_l_alt",
    "p_l",
    "p_l_complement",
    "lt_iowe_log",
    "weight_spectrum",
    "exact_weight_spectrum",
]

_LN2 = math.log(2.0)


@dataclass(frozen=True)
class EnsembleParams:
    """Symbol counts (k source, h intermediate, n output) of one ensemble."""

    k: int
    h: int
    n: int

    def __post_init__(self):
        if not (isinstance(self.k, int) and isinstance(self.h, int) and isinstance(self.n, int)):
            raise ValueError("k, h, n must be integers")
        if not 1 <= self.k <= self.h <= self.n:
            raise ValueError(f"need 1 <= k <= h <= n, got ({self.k}, {self.h}, {self.n})")

    @property
    def r_o(self) -> float:
        return self.k / self.h

    @property
    def r_i(self) -> float:
        return self.h / self.n

    @property
    def r(self) -> float:
        return self.k / self.n


@dataclass(frozen=True)
class LogWeightSpectrum:
    """log2 of the ensemble-average codeword multiplicities A_0..A_n.

    a0_excess carries A_0 - 1 in the linear domain: at useful operating
    points A_0 is barely above 1 and the excess would drown in rounding if
    only log2_a[0] were kept.
    """

    params: EnsembleParams
    log2_a: np.ndarray
    a0_excess: float

    def __post_init__(self):
        if len(self.log2_a) != self.params.n + 1:
            raise ValueError("spectrum length must be n + 1")
        if np.isnan(self.log2_a).any():
            raise ValueError("NaN in spectrum")
        if self.log2_a[0] < 0:
            raise ValueError("A_0 must be >= 1")

    def a(self, d: int) -> float:
        return float(2.0 ** self.log2_a[d])

    def to_csv(self) -> str:
        lines = ["d,log2_A_d"]
        for d, v in enumerate(self.log2_a):
            lines.append(f"{d},{float(v)!r}")
        return "\n".join(lines) + "\n"


def log2_binom(n: int, k: int) -> float:
    """log2 C(n,k) via log-gamma; exact -inf outside the triangle."""
    if k < 0 or k > n:
        return -math.inf
    return (math.lgamma(n + 1) - math.lgamma(k + 1) - math.lgamma(n - k + 1)) / _LN2


def _overlap_numerator(h: int, j: int, l: int, want_odd: bool) -> int:
    """Sum of C(j,i)*C(h-j,l-i) over overlap sizes i of the requested parity.

    This is the unnormalized count of degree-j selections whose overlap
    with a fixed weight-l word has odd (or even) size; dividing by C(h,l)
    of the alternate form's C(h,j) normalizer is done by the callers.
    """
    lo = max(0, l + j - h)
    hi = min(l, j)
    total = 0
    for i in range(lo, hi + 1):
        if i % 2 == (1 if want_odd else 0):
            total += math.comb(j, i) * math.comb(h - j, l - i)
    return total


def _check_jl(h: int, j: int, l: int) -> None:
    if not 1 <= j <= h:
        raise ValueError(f"degree j={j} outside 1..h={h}")
    if not 0 <= l <= h:
        raise ValueError(f"weight l={l} outside 0..h={h}")


def p_j_l(h: int, j: int, l: int) -> float:
    """Probability that one degree-j output bit is 1 when the intermediate
    word has weight l: the odd-overlap hypergeometric mass."""
    _check_jl(h, j, l)
    num = _overlap_numerator(h, j, l, want_odd=True)
    return float(Fraction(num, math.comb(h, l)))


def p_j_l_alt(h: int, j: int, l: int) -> float:
    """Equivalent form averaging over the weight-l word instead of the
    selection: odd overlap of a fixed degree-j selection with a random
    weight-l word, normalized by C(h,j)."""
    _check_jl(h, j, l)
    lo = max(0, l + j - h)
    num = 0
    for i in range(lo, min(l, j) + 1):
        if i % 2 == 1:
            num += math.comb(l, i) * math.comb(h - l, j - i)
    return float(Fraction(num, math.comb(h, j)))


def _p_l_fraction(dist: DegreeDistribution, h: int, l: int, want_odd: bool) -> float:
    if dist.d_max > h:
        raise ValueError(f"distribution max degree {dist.d_max} exceeds h={h}")
    if not 0 <= l <= h:
        raise ValueError(f"weight l={l} outside 0..h={h}")
    den = math.comb(h, l)
    acc = 0.0
    for j, omega in dist.entries:
        acc += omega * float(Fraction(_overlap_numerator(h, j, l, want_odd), den))
    return acc


def p_l(dist: DegreeDistribution, h: int, l: int) -> float:
    """Output-bit flip probability given intermediate weight l, averaged
    over the degree distribution."""
    return _p_l_fraction(dist, h, l, want_odd=True)


def p_l_complement(dist: DegreeDistribution, h: int, l: int) -> float:
    """1 - p_l computed as its own even-overlap sum.

    Near l = h with mostly-odd degrees p_l approaches 1, and forming
    1 - p_l by subtraction would lose all significant digits exactly where
    (1-p_l)^{n-d} drives the spectrum; the even-parity sum keeps full
    relative precision.
    """
    return _p_l_fraction(dist, h, l, want_odd=False)


def _log2_with_zero(x: float) -> float:
    return math.log2(x) if x > 0.0 else -math.inf


def lt_iowe_log(dist: DegreeDistribution, h: int, n: int, l: int, d: int) -> float:
    """log2 of the LT average input-output weight enumerator
    C(h,l) C(n,d) p_l^d (1-p_l)^{n-d}; -inf for exact zeros."""
    if not 0 <= l <= h:
        raise ValueError(f"weight l={l} outside 0..h={h}")
    if not 0 <= d <= n:
        raise ValueError(f"weight d={d} outside 0..n={n}")
    lp = _log2_with_zero(p_l(dist, h, l))
    lq = _log2_with_zero(p_l_complement(dist, h, l))
    # 0 * log(0) = 0: a vanishing exponent kills the factor entirely
    out = log2_binom(h, l) + log2_binom(n, d)
    if d:
        out += d * lp
    if n - d:
        out += (n - d) * lq
    return out


def _logsumexp2(terms: np.ndarray) -> float:
    m = terms.max()
    if m == -math.inf:
        return -math.inf
    return float(m + np.log2(np.exp2(terms - m).sum()))


def weight_spectrum(dist: DegreeDistribution, params: EnsembleParams) -> LogWeightSpectrum:
    """Ensemble-average weight enumerator of the concatenated code.

    Entry d >= 1 is log2 of
        C(n,d) 2^{-(h-k)} sum_{l=1}^h C(h,l) p_l^d (1-p_l)^{n-d},
    and entry 0 is log2 of
        1 + 2^{-(h-k)} sum_{l=1}^h C(h,l) (1-p_l)^n,
    the deterministic all-zero codeword plus the expected number of nonzero
    outer codewords erased by the LT stage.

    All per-l terms live in base-2 logs and each d-row is combined with a
    max-shifted exponential sum, so n in the thousands cannot overflow.
    """
    k, h, n = params.k, params.h, params.n
    if dist.d_max > h:
        raise ValueError(f"distribution max degree {dist.d_max} exceeds h={h}")

    ls = np.arange(1, h + 1)
    log2_c_h_l = (
        gammaln(h + 1) - gammaln(ls + 1) - gammaln(h - ls + 1)
    ) / _LN2
    log2_p = np.array([_log2_with_zero(p_l(dist, h, int(l))) for l in ls])
    log2_q = np.array([_log2_with_zero(p_l_complement(dist, h, int(l))) for l in ls])

    ds = np.arange(n + 1)
    log2_c_n_d = (
        gammaln(n + 1) - gammaln(ds + 1) - gammaln(n - ds + 1)
    ) / _LN2

    log2_a = np.empty(n + 1)
    for d in range(1, n + 1):
        terms = log2_c_h_l.copy()
        terms += d * log2_p  # d >= 1, so p_l = 0 rows correctly go to -inf
        if n - d:
            terms = terms + (n - d) * log2_q
        log2_a[d] = log2_c_n_d[d] - (h - k) + _logsumexp2(terms)

    zero_terms = log2_c_h_l + n * log2_q
    a0_excess = float(2.0 ** (_logsumexp2(zero_terms) - (h - k)))
    log2_a[0] = math.log1p(a0_excess) / _LN2
    return LogWeightSpectrum(params, log2_a, a0_excess)


def exact_weight_spectrum(dist: DegreeDistribution, params: EnsembleParams) -> list[Fraction]:
    """Arbitrary-precision rational evaluation of the same enumerator.

    The oracle twin of weight_spectrum: the degree probabilities are taken
    at their exact float values (Fraction(float) is lossless) and every
    later step is exact. Feasible only at desk scale, so h is capped.
    """
    k, h, n = params.k, params.h, params.n
    if h > 64:
        raise ValueError("exact path is an oracle for h <= 64")
    if dist.d_max > h:
        raise ValueError(f"distribution max degree {dist.d_max} exceeds h={h}")

    omegas = [(j, Fraction(w)) for j, w in dist.entries]
    p_frac = []
    for l in range(h + 1):
        den = math.comb(h, l)
        p = Fraction(0)
        for j, w in omegas:
            p += w * Fraction(_overlap_numerator(h, j, l, True), den)
        p_frac.append(p)

    scale = Fraction(1, 2 ** (h - k))
    out = []
    for d in range(n + 1):
        s = Fraction(0)
        for l in range(1, h + 1):
            p = p_frac[l]
            q = 1 - p
            term = Fraction(math.comb(h, l))
            if d:
                if p == 0:
                    continue
                term *= p**d
            if n - d:
                term *= q ** (n - d)
            s += term
        if d == 0:
            out.append(1 + scale * s)
        else:
            out.append(math.comb(n, d) * scale * s)
    return out
