"""Finite-length figures of merit derived from a weight spectrum: typical
minimum distance, ensemble expurgation, and BEC block-error bounds."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .spectrum import LogWeightSpectrum, log2_binom

__all__ = [
    "ExpurgationReport",
    "typical_min_distance",
    "expurgate",
    "singleton_bound",
    "cer_upper_bound",
]


def typical_min_distance(spec: LogWeightSpectrum) -> int:
    """Largest d such that fewer than half the codes in the ensemble are
    expected to contain a nonzero codeword of weight below d.

    The union bound Pr{d_min < d} <= (A_0 - 1) + sum_{w=1}^{d-1} A_w drives
    the definition: the result is 0 when A_0 alone exceeds 3/2, else
    max{d >= 0 : (sum_{i=0}^{d-1} A_i) - 1 < 1/2}. So at the returned d, at
    least half of the ensemble has minimum distance d or larger.
    """
    if spec.a0_excess > 0.5:
        return 0
    n = spec.params.n
    a_lin = np.exp2(spec.log2_a)
    # terms of (sum_{i=0}^{d-1} A_i) - 1, summed compensated
    terms = [spec.a0_excess]
    best = 0
    for d in range(1, n + 1):
        if math.fsum(terms) < 0.5:
            best = d
        else:
            break
        terms.append(float(a_lin[d]))
    return best


@dataclass(frozen=True)
class ExpurgationReport:
    """Outcome of removing the codes holding codewords of weight <= d_star.

    theta bounds the removed fraction; the surviving codes' average
    multiplicities are at most doubled above d_star, zero in 1..d_star, and
    exactly one zero-weight codeword remains.
    """

    d_star: int
    theta: float
    expurgated: LogWeightSpectrum

    @property
    def expurgated_log2_a(self) -> np.ndarray:
        return self.expurgated.log2_a


def expurgate(spec: LogWeightSpectrum, d_star: int) -> ExpurgationReport:
    """Expurgated-ensemble spectrum bound at distance d_star.

    Valid only while theta = (sum_{w=0}^{d_star} A_w) - 1 < 1/2, i.e. while
    fewer than half the codes get removed; otherwise raises ValueError
    (there are operating points where no d_star >= 0 qualifies).
    """
    n = spec.params.n
    if not 0 <= d_star <= n:
        raise ValueError(f"d_star {d_star} outside 0..{n}")
    a_lin = np.exp2(spec.log2_a)
    theta = math.fsum([spec.a0_excess] + [float(a_lin[w]) for w in range(1, d_star + 1)])
    if not theta < 0.5:
        raise ValueError(
            f"ensemble not expurgable at d_star={d_star}: theta={theta} >= 1/2"
        )
    log2_a = spec.log2_a.copy()
    log2_a[0] = 0.0  # exactly one zero-weight codeword survives
    for d in range(1, d_star + 1):
        log2_a[d] = -math.inf
    log2_a[d_star + 1 :] += 1.0  # at most doubled multiplicities
    return ExpurgationReport(
        d_star, theta, LogWeightSpectrum(spec.params, log2_a, 0.0)
    )


def _log2_with_zero(x: float) -> float:
    return math.log2(x) if x > 0.0 else -math.inf


def _logsumexp2(terms: np.ndarray) -> float:
    m = terms.max() if len(terms) else -math.inf
    if m == -math.inf:
        return -math.inf
    return float(m + np.log2(np.exp2(terms - m).sum()))


def singleton_bound(n: int, k: int, eps: float) -> float:
    """Probability that more than n-k of n symbols are erased: the
    block-error floor of any (n,k) code on the BEC. Binomial tail in the
    log domain."""
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps {eps} outside [0,1]")
    l2e = _log2_with_zero(eps)
    l2q = math.log1p(-eps) / math.log(2.0) if eps < 1.0 else -math.inf
    terms = []
    for e in range(n - k + 1, n + 1):
        t = log2_binom(n, e)
        if e:
            t += e * l2e
        if n - e:
            t += (n - e) * l2q
        terms.append(t)
    return float(2.0 ** _logsumexp2(np.array(terms)))


def cer_upper_bound(spec: LogWeightSpectrum, eps: float) -> float:
    """Upper bound on the ensemble-average codeword error rate over a BEC
    with erasure probability eps.

    Three addends: the Singleton tail (more than n-k erasures always
    fail), the union bound over erasure patterns of size e <= n-k with the
    per-pattern term clamped at 1 after full inner summation, and the
    excess zero-weight multiplicity A_0 - 1 (non-injective encodings fail
    always). May exceed 1; never clamped here.
    """
    if not 0.0 <= eps <= 1.0:
        raise ValueError(f"eps {eps} outside [0,1]")
    n, k = spec.params.n, spec.params.k
    l2e = _log2_with_zero(eps)
    l2q = math.log1p(-eps) / math.log(2.0) if eps < 1.0 else -math.inf

    ws = np.arange(1, n + 1)
    log2_c_n_w = np.array([log2_binom(n, int(w)) for w in ws])
    log2_a_w = spec.log2_a[1:]

    total = singleton_bound(n, k, eps) + spec.a0_excess
    # e-sum runs to n-k; empty for k = n where only the terms above remain
    for e in range(1, n - k + 1):
        w = ws[:e]
        inner = (
            np.array([log2_binom(e, int(x)) for x in w])
            + log2_a_w[:e]
            - log2_c_n_w[:e]
        )
        inner_sum = min(1.0, float(2.0 ** _logsumexp2(inner)))
        if inner_sum == 0.0:
            continue
        t = log2_binom(n, e)
        if e:
            t += e * l2e
        if n - e:
            t += (n - e) * l2q
        total += (2.0**t) * inner_sum
    return float(total)
