"""Asymptotic growth rate of the ensemble spectrum and rate regions.

Everything here lives in normalized coordinates: output weight delta = d/n,
intermediate weight lambda = l/h, and the rate pair (r_i, r_o). The core
object is the exponent G(delta) of the average weight enumerator; from it
come the typical relative distance delta*, the region P of rate pairs with
linearly growing typical distance, and its closed-form outer bound.
"""
from __future__ import annotations

import functools
import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar

from .degrees import DegreeDistribution

__all__ = [
    "RatePair",
    "GrowthRatePoint",
    "RegionBoundary",
    "binary_entropy",
    "rho",
    "rho_complement",
    "f",
    "f_max",
    "growth_rate",
    "delta_star",
    "in_positive_region",
    "boundary_ri_p",
    "region_boundary_p",
    "r_o_star",
    "outer_bound_ri",
    "outer_bound",
]

_GRID_POINTS = 2048
_LAMBDA_TOL = 1e-10
_BISECT_TOL = 1e-7
_BISECT_CAP = 200


@dataclass(frozen=True)
class RatePair:
    r_i: float
    r_o: float

    def __post_init__(self):
        if not (0.0 < self.r_i <= 1.0 and 0.0 < self.r_o <= 1.0):
            raise ValueError(f"rates must be in (0,1], got r_i={self.r_i}, r_o={self.r_o}")

    @property
    def r(self) -> float:
        return self.r_i * self.r_o


@dataclass(frozen=True)
class GrowthRatePoint:
    """G evaluated at one delta, with the maximizing lambda and the slope.

    lambda_at_edge marks the case where the maximizer sits at lambda = 1
    (possible with even-degree support): the stationarity argument behind
    the closed-form slope does not apply there, so g_prime comes from a
    one-sided finite difference instead.
    """

    delta: float
    g: float
    lambda_0: float
    g_prime: float
    lambda_at_edge: bool = False


@dataclass(frozen=True)
class RegionBoundary:
    """Sampled boundary curve of a rate region in the (r_o, r_i) plane."""

    samples: tuple[tuple[float, float], ...]
    kind: str  # "P" | "O"
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        if self.kind not in ("P", "O"):
            raise ValueError(f"unknown region kind {self.kind!r}")
        prev = -math.inf
        for r_o, r_i in self.samples:
            if r_o <= prev:
                raise ValueError("samples must be sorted by strictly increasing r_o")
            if not (0.0 < r_i <= 1.0 / r_o + 1e-12):
                raise ValueError(f"boundary r_i={r_i} outside (0, 1/r_o] at r_o={r_o}")
            prev = r_o


def binary_entropy(x: float) -> float:
    """H_b(x) with the 0 log 0 = 0 convention."""
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"entropy argument {x} outside [0,1]")
    if x == 0.0 or x == 1.0:
        return 0.0
    return -x * math.log2(x) - (1.0 - x) * math.log2(1.0 - x)


def rho(dist: DegreeDistribution, lam: float) -> float:
    """Flip probability of one output bit when each intermediate bit is 1
    independently with probability lam: (1/2) sum_j Omega_j (1-(1-2 lam)^j).

    Stable at both ends: 1 - u^j is expanded through expm1/log so that
    lam -> 0 (and lam -> 1 with even degrees) keeps full relative accuracy.
    """
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda {lam} outside [0,1]")
    u = 1.0 - 2.0 * lam
    acc = 0.0
    for j, w in dist.entries:
        if u > 0.0:
            t = -math.expm1(j * math.log(u))
        elif u == 0.0:
            t = 1.0
        elif j % 2 == 0:
            t = -math.expm1(j * math.log(-u))
        else:
            t = 1.0 + math.exp(j * math.log(-u))
        acc += w * t
    return 0.5 * acc


def rho_complement(dist: DegreeDistribution, lam: float) -> float:
    """1 - rho as its own sum (1/2) sum_j Omega_j (1+(1-2 lam)^j), so the
    log of the complement never loses precision to cancellation."""
    if not 0.0 <= lam <= 1.0:
        raise ValueError(f"lambda {lam} outside [0,1]")
    u = 1.0 - 2.0 * lam
    acc = 0.0
    for j, w in dist.entries:
        if u >= 0.0:
            t = 1.0 + u**j
        elif j % 2 == 0:
            t = 1.0 + (-u) ** j
        else:
            t = -math.expm1(j * math.log(-u))
        acc += w * t
    return 0.5 * acc


def _lambda_domain(dist: DegreeDistribution) -> tuple[float, bool]:
    """Upper end of the admissible lambda interval and whether it is open.

    With all-odd support the map lambda -> rho saturates at 1 when
    lambda = 1, so the endpoint is excluded; any even degree keeps rho(1)
    strictly below 1 and the endpoint is admissible.
    """
    all_odd = dist.all_odd_support()
    return (1.0, all_odd)


def _check_lambda(dist: DegreeDistribution, lam: float) -> None:
    _, open_top = _lambda_domain(dist)
    if lam <= 0.0 or lam > 1.0 or (open_top and lam >= 1.0):
        top = "(0,1)" if open_top else "(0,1]"
        raise ValueError(f"lambda {lam} outside the admissible domain {top}")


def f(dist: DegreeDistribution, r_i: float, delta: float, lam: float) -> float:
    """Inner objective r_i H_b(lambda) + delta log2 rho + (1-delta) log2(1-rho).

    Returns -inf where a log argument is exactly 0 with a positive
    coefficient; a zero coefficient kills its factor (0 log 0 = 0).
    """
    _check_lambda(dist, lam)
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta {delta} outside [0,1]")
    r = rho(dist, lam)
    rc = rho_complement(dist, lam)
    out = r_i * binary_entropy(lam)
    if delta > 0.0:
        out += delta * math.log2(r) if r > 0.0 else -math.inf
    if delta < 1.0:
        out += (1.0 - delta) * math.log2(rc) if rc > 0.0 else -math.inf
    return out


@functools.lru_cache(maxsize=32)
def _grid_tables(dist: DegreeDistribution):
    lams = np.arange(1, _GRID_POINTS + 1) / (_GRID_POINTS + 1)
    hb = np.array([binary_entropy(t) for t in lams])
    l2r = np.array([math.log2(rho(dist, t)) for t in lams])
    l2rc = np.array([math.log2(rho_complement(dist, t)) for t in lams])
    return lams, hb, l2r, l2rc


def f_max(dist: DegreeDistribution, r_i: float, delta: float) -> tuple[float, float]:
    """Maximize f over the admissible lambda interval.

    Coarse 2048-point grid, then bounded scalar refinement of every local
    maximum within 1e-3 of the best grid value (f can have several
    stationary points for multi-degree distributions), then the lambda = 1
    endpoint when admissible. Ties go to the smallest lambda. Returns
    (value, argmax).
    """
    if not 0.0 <= delta < 1.0:
        raise ValueError(f"delta {delta} outside [0,1)")
    lams, hb, l2r, l2rc = _grid_tables(dist)
    vals = r_i * hb + delta * l2r + (1.0 - delta) * l2rc
    best_grid = vals.max()

    local = []
    for i in range(len(vals)):
        left_ok = i == 0 or vals[i] >= vals[i - 1]
        right_ok = i == len(vals) - 1 or vals[i] >= vals[i + 1]
        if left_ok and right_ok and vals[i] >= best_grid - 1e-3:
            local.append(i)

    step = lams[1] - lams[0]
    _, open_top = _lambda_domain(dist)
    hi_dom = 1.0 - 1e-12 if open_top else 1.0
    candidates: list[tuple[float, float]] = []
    for i in local:
        a = max(lams[i] - step, 1e-12)
        b = min(lams[i] + step, hi_dom)
        res = minimize_scalar(
            lambda t: -f(dist, r_i, delta, t),
            bounds=(a, b),
            method="bounded",
            options={"xatol": _LAMBDA_TOL},
        )
        candidates.append((float(-res.fun), float(res.x)))
    if not open_top:
        candidates.append((f(dist, r_i, delta, 1.0), 1.0))

    candidates.sort(key=lambda c: c[1])
    best_val, best_lam = candidates[0]
    for val, lam in candidates[1:]:
        if val > best_val:
            best_val, best_lam = val, lam
    return best_val, best_lam


def _g_value(dist: DegreeDistribution, pair: RatePair, delta: float) -> tuple[float, float]:
    fm, lam0 = f_max(dist, pair.r_i, delta)
    g = binary_entropy(delta) - pair.r_i * (1.0 - pair.r_o) + fm
    return g, lam0


def growth_rate(dist: DegreeDistribution, pair: RatePair, delta: float) -> GrowthRatePoint:
    """Growth-rate point: exponent, maximizing lambda, and slope.

    The slope uses the stationarity of the inner maximizer:
        G'(delta) = log2((1-delta)/delta) + log2(rho(lambda_0)/(1-rho(lambda_0))),
    except when lambda_0 lands on the closed endpoint 1, where a one-sided
    finite difference is used and flagged.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta {delta} outside (0,1)")
    g, lam0 = _g_value(dist, pair, delta)
    at_edge = lam0 == 1.0
    if at_edge:
        eps = 1e-7
        g_lo, _ = _g_value(dist, pair, max(delta - eps, 1e-12))
        g_prime = (g - g_lo) / (delta - max(delta - eps, 1e-12))
    else:
        g_prime = (
            math.log2((1.0 - delta) / delta)
            + math.log2(rho(dist, lam0))
            - math.log2(rho_complement(dist, lam0))
        )
    return GrowthRatePoint(delta, g, lam0, g_prime, at_edge)


def _g_at_zero(dist: DegreeDistribution, pair: RatePair) -> float:
    # limit form of G as delta -> 0+: H_b vanishes and the delta log2 rho
    # term drops (0 log 0 = 0), leaving f_max at delta = 0
    fm, _ = f_max(dist, pair.r_i, 0.0)
    return fm - pair.r_i * (1.0 - pair.r_o)


def delta_star(dist: DegreeDistribution, pair: RatePair) -> float:
    """Normalized typical minimum distance.

    0 when the exponent is already nonnegative at delta -> 0+; otherwise
    the unique root of G on (0, 1/2) (G is strictly increasing there and
    G(1/2) = r > 0), found by bisection to 1e-7.
    """
    if _g_at_zero(dist, pair) >= 0.0:
        return 0.0
    lo, hi = 0.0, 0.5
    g_hi, _ = _g_value(dist, pair, hi)
    if g_hi <= 0.0:
        raise ArithmeticError(f"no sign change on (0, 1/2): G(1/2) = {g_hi}")
    for _ in range(_BISECT_CAP):
        if hi - lo <= _BISECT_TOL:
            break
        mid = 0.5 * (lo + hi)
        g_mid, _ = _g_value(dist, pair, mid)
        if g_mid > 0.0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def in_positive_region(dist: DegreeDistribution, pair: RatePair) -> bool:
    """Strict test for membership in the region P of rate pairs whose
    typical minimum distance grows linearly in n."""
    return _g_at_zero(dist, pair) < 0.0


def boundary_ri_p(dist: DegreeDistribution, r_o: float, scan_points: int = 64) -> tuple[float, tuple[str, ...]]:
    """Supremum r_i with (r_i, r_o) in P, by bisection over (0, 1/r_o].

    Membership is expected to flip exactly once along the bracket; the
    initial scan exists to detect (and report, never mask) a violation of
    that assumption. Returns (boundary, warnings).
    """
    if not 0.0 < r_o < 1.0:
        raise ValueError(f"r_o {r_o} outside (0,1)")
    warnings: list[str] = []

    def member(r_i: float) -> bool:
        fm, _ = f_max(dist, r_i, 0.0)
        return r_i * (1.0 - r_o) > fm

    hi_cap = 1.0 / r_o
    grid = np.linspace(hi_cap / scan_points, hi_cap, scan_points)
    flags = [member(float(t)) for t in grid]
    changes = sum(1 for a, b in zip(flags, flags[1:]) if a != b)
    if changes > 1:
        warnings.append(
            f"membership in P changed sign {changes} times along r_i at r_o={r_o}; "
            "reporting the first crossing"
        )
    if flags[-1] and changes == 0:
        # inside P all the way to the isorate-1 cap
        return hi_cap, tuple(warnings)
    if not flags[0] and changes == 0:
        raise ArithmeticError(f"could not bracket the P boundary at r_o={r_o}")

    first_false = flags.index(False) if not flags[0] else next(
        i for i, fl in enumerate(flags) if not fl
    )
    lo = float(grid[first_false - 1]) if first_false else 0.0
    hi = float(grid[first_false])
    for _ in range(_BISECT_CAP):
        if hi - lo <= _BISECT_TOL:
            break
        mid = 0.5 * (lo + hi)
        if member(mid):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi), tuple(warnings)


def region_boundary_p(dist: DegreeDistribution, r_o_grid) -> RegionBoundary:
    samples = []
    warnings: list[str] = []
    for r_o in sorted(float(t) for t in r_o_grid):
        b, w = boundary_ri_p(dist, r_o)
        samples.append((r_o, b))
        warnings.extend(w)
    return RegionBoundary(tuple(samples), "P", tuple(warnings))


@functools.lru_cache(maxsize=1)
def r_o_star() -> float:
    """Root of H_b(1-r_o) - (1-r_o) on (0,1): below it the closed-form
    outer bound degenerates to the isorate-1 cap."""
    lo, hi = 1e-9, 0.5

    def val(r_o: float) -> float:
        return binary_entropy(1.0 - r_o) - (1.0 - r_o)

    if not (val(lo) < 0.0 < val(hi)):
        raise ArithmeticError("failed to bracket r_o_star")
    for _ in range(_BISECT_CAP):
        if hi - lo <= 1e-12:
            break
        mid = 0.5 * (lo + hi)
        if val(mid) < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def outer_bound_ri(dist_avg_degree: float, r_o: float) -> float:
    """Closed-form outer bound on the P boundary at one r_o: every rate
    pair in P satisfies r_i <= min(phi(r_o), 1/r_o)."""
    if dist_avg_degree < 1.0:
        raise ValueError("average degree below 1")
    if not 0.0 < r_o <= 1.0:
        raise ValueError(f"r_o {r_o} outside (0,1]")
    cap = 1.0 / r_o
    if r_o <= r_o_star():
        return cap
    if r_o == 1.0:
        return 0.0
    denom = binary_entropy(1.0 - r_o) - (1.0 - r_o)
    phi = dist_avg_degree * math.log2(1.0 / r_o) / denom
    return min(phi, cap)


def outer_bound(dist_avg_degree: float, r_o_grid) -> RegionBoundary:
    samples = tuple(
        (r_o, outer_bound_ri(dist_avg_degree, r_o))
        for r_o in sorted(float(t) for t in r_o_grid)
    )
    return RegionBoundary(samples, "O")
