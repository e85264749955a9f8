"""Spectral mixing bounds, spherical function values, and the moment lower bound.

The chains here are invariant under a group action that makes the uniform
law stationary and the kernel diagonalizable over the component catalog.
Squared l2 distance to uniform after k steps (scaled by |X|/4) equals
(1/4) sum_rho dim * mult * eigenvalue^(2k) over nontrivial components, and
total variation is at most its square root.  The lower bound runs the usual
second-moment argument on the first spherical function.

Natural logarithm throughout.  Bound sums are evaluated in log space so big
dimensions (n in the thousands, unsigned) cannot overflow; the exact mode
keeps everything rational for cross-checks at small n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .catalog import (
    IrrepEntry,
    catalog_entries,
    eig_classical,
    eig_independent,
    eig_paired,
    eig_variant,
    nontrivial_entries,
)
from .models import Family, ModelSpec

__all__ = [
    "eig_classical",
    "eig_variant",
    "eig_independent",
    "eig_paired",
    "BoundCurvePoint",
    "LowerBoundReport",
    "l2n_sq_bound",
    "tv_upper",
    "bound_curve",
    "leading_l2_term",
    "theorem_k",
    "spherical_s1",
    "moment_s1",
    "moment_s2",
    "variance_ratio",
    "lower_bound",
    "crossover_f",
    "GUARANTEE_CONSTANT",
]

# 1 - GUARANTEE_CONSTANT * exp(-c) lower-bounds total variation at the
# threshold step count.  It collapses the sharper 1 - 54 e^-c - 1512 e^-2c
# guarantee: for c >= 0, 54 + 1512 e^-c <= 1566.
GUARANTEE_CONSTANT = 1566


@dataclass(frozen=True)
class BoundCurvePoint:
    """The spectral bound at one step count (tv_upper is the raw sqrt)."""

    k: int
    l2n_sq: float
    tv_upper: float


@dataclass(frozen=True)
class LowerBoundReport:
    """Second-moment lower bound at one decay parameter c."""

    c: float
    k_threshold: int
    tv_guarantee: float
    mean_f: float
    var_ratio: float


def l2n_sq_bound(model: ModelSpec, k: int, exact: bool = False, entries=None):
    """(1/4) sum over nontrivial components of dim * mult * eigenvalue^(2k).

    This equals |X|/4 times the squared l2 distance of the k-step law from
    uniform (an identity, not just a bound).  Float mode works term-wise in
    log space; exact mode returns a Fraction.  Pass precomputed catalog
    entries to amortize sweeps over many k.
    """
    if k < 0:
        raise ValueError(f"need k >= 0, got {k}")
    terms = nontrivial_entries(model, entries)
    if exact:
        total = Fraction(0)
        for e in terms:
            total += e.weight * e.eigenvalue ** (2 * k)
        return total / 4
    total = 0.0
    for e in terms:
        lam = e.eigenvalue
        if lam == 0:
            if k == 0:
                total += float(e.weight)
            continue
        log_term = math.log(e.weight) + 2 * k * math.log(abs(lam.numerator) / lam.denominator)
        total += math.exp(log_term)
    return total / 4.0


def tv_upper(model: ModelSpec, k: int, entries=None) -> float:
    """Square root of l2n_sq_bound: the spectral total-variation bound.

    Returned raw; values above 1 are vacuous and should be clamped to 1
    for presentation only.
    """
    return math.sqrt(l2n_sq_bound(model, k, entries=entries))


def bound_curve(model: ModelSpec, ks) -> list[BoundCurvePoint]:
    """Evaluate the bound on a step grid, building the catalog once."""
    entries = catalog_entries(model)
    points = []
    for k in ks:
        b = l2n_sq_bound(model, k, entries=entries)
        points.append(BoundCurvePoint(k=k, l2n_sq=b, tv_upper=math.sqrt(b)))
    return points


def leading_l2_term(model: ModelSpec, k: int) -> float:
    """Dominant single term of the l2 sum (without the 1/4 factor).

    (n-1) eig_1^(2k) for the unsigned families; 2n (1 - 1/n)^(4k) for both
    signed families.  Values above 1 certify the chain is not yet mixed in
    the l2 sense.
    """
    n, r = model.n, model.r
    if model.family is Family.CLASSICAL:
        lam = float(eig_classical(n, r, 1))
        return (n - 1) * lam ** (2 * k)
    if model.family is Family.VARIANT:
        return (n - 1) * (1 - 2 / n) ** (2 * k)
    return 2 * n * math.exp(4 * k * math.log(1 - 1 / n))


_THEOREM_COEFS = {
    Family.CLASSICAL: lambda n, r: 0.5 * r * (1 - r / n),
    Family.VARIANT: lambda n, r: n / 4,
    Family.INDEPENDENT_FLIPS: lambda n, r: n / 4,
    Family.PAIRED_FLIPS: lambda n, r: n / 2,
}


def theorem_k(model: ModelSpec, c: float) -> int:
    """Step count at which the spectral bound certifies mixing, for slack c > 0.

    classical      (1/2) r (1 - r/n) (log n + c)
    variant        (1/4) n (log n + c)
    independent    (1/4) n (log n + c)
    paired         (1/2) n (log n + c)

    rounded up to an integer.
    """
    if c <= 0:
        raise ValueError(f"need c > 0, got {c}")
    coef = _THEOREM_COEFS[model.family](model.n, model.r)
    return math.ceil(coef * (math.log(model.n) + c))


def spherical_s1(n: int, r: int, state) -> Fraction:
    """First spherical function at a state: 1 - j n / (r(n-r)).

    j counts the rack-1 balls with labels above r, i.e. the balls that have
    strayed from the initial arrangement.  For signed states the charge word
    is ignored (the value lives on the rack marginal).  Equals 1 exactly at
    the initial state and averages to 0 under the uniform law.
    """
    ModelSpec(Family.VARIANT, n, r)
    j = (state.rack1 >> r).bit_count()
    return 1 - Fraction(j * n, r * (n - r))


def moment_s1(n: int, k: int) -> float:
    """Mean of the first spherical function after k variant steps: (1-2/n)^k."""
    return (1 - 2 / n) ** k


def moment_s2(n: int, k: int) -> float:
    """Mean of the second spherical function after k variant steps.

    The second eigenvalue is exactly the square of the first, so this is
    (1-2/n)^(2k).
    """
    return (1 - 2 / n) ** (2 * k)


def variance_ratio(n: int, r: int, k: int) -> float:
    """Var(f)/E(f)^2 after k variant steps, where f = sqrt(n-1) * s1.

    Three-term closed form obtained by expanding s1^2 back into spherical
    functions:

        1/E(f)^2
        + (4n^2/(n-2)) / (n^2-(n-2r)^2) * (((n-2r)/n)^2 (1-2/n)^(-k) - 1)
        + (3n-2) / ((n-1)(n-2))
    """
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    ModelSpec(Family.VARIANT, n, r)
    if k < 0:
        raise ValueError(f"need k >= 0, got {k}")
    shrink = 1 - 2 / n
    ef_sq = (n - 1) * shrink ** (2 * k)
    gap = n * n - (n - 2 * r) ** 2
    t2 = (4 * n * n / (n - 2)) / gap * (((n - 2 * r) / n) ** 2 * shrink ** (-k) - 1)
    t3 = (3 * n - 2) / ((n - 1) * (n - 2))
    return 1 / ef_sq + t2 + t3


def crossover_f(n: int, r: int, c: float) -> float:
    """Step budget below which the off-center start dominates the lower bound.

    (n-2) log(n/(n-2r)) + (1/2)(n-2) log(1 + (n-2)(1-((n-2r)/n)^2) e^-c / 4).
    Increasing in r, and +inf at the balanced case 2r = n, where the first
    branch of the lower bound always wins.
    """
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    ModelSpec(Family.VARIANT, n, r)
    if c < 0:
        raise ValueError(f"need c >= 0, got {c}")
    if 2 * r == n:
        return math.inf
    ratio = (n - 2 * r) / n
    first = (n - 2) * math.log(n / (n - 2 * r))
    second = 0.5 * (n - 2) * math.log1p(0.25 * (n - 2) * (1 - ratio * ratio) * math.exp(-c))
    return first + second


def lower_bound(n: int, r: int, c: float) -> LowerBoundReport:
    """Second-moment lower bound for the variant chain.

    For 0 <= c <= log n, after

        k = floor(min((1/4) n (log n - c), crossover_f(n, r, c)))

    steps the total variation distance from uniform is still at least
    1 - 1566 e^-c.  The report also carries the mean of f = sqrt(n-1) s1 and
    the variance ratio at that k, the two quantities the Chebyshev argument
    runs on.
    """
    if n < 3:
        raise ValueError(f"need n >= 3, got {n}")
    ModelSpec(Family.VARIANT, n, r)
    if not 0 <= c <= math.log(n):
        raise ValueError(f"need 0 <= c <= log n = {math.log(n):.6g}, got c={c}")
    k_real = min(0.25 * n * (math.log(n) - c), crossover_f(n, r, c))
    k_threshold = math.floor(k_real)
    return LowerBoundReport(
        c=c,
        k_threshold=k_threshold,
        tv_guarantee=1 - GUARANTEE_CONSTANT * math.exp(-c),
        mean_f=math.sqrt(n - 1) * (1 - 2 / n) ** k_threshold,
        var_ratio=variance_ratio(n, r, k_threshold),
    )
