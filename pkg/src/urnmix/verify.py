"""Self-check suites: quick structural checks and a full numerical audit.

Each check returns a named result; the CLI turns failures into exit code 1.
The full suite is the library's own acceptance sweep: exact spectra against
the catalog, the Plancherel identity in rational arithmetic, moment
formulas against exact evolution, signed-to-unsigned marginals, Monte Carlo
consistency, and determinism of the simulators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb

import numpy as np

from . import bounds, catalog, chains, exact, montecarlo
from .models import Family, ModelSpec

__all__ = ["CheckResult", "VerifyReport", "run_quick", "run_full", "SPECTRUM_GRID"]


@dataclass(frozen=True)
class CheckResult:
    name: str
    ok: bool
    detail: str


@dataclass(frozen=True)
class VerifyReport:
    results: tuple

    @property
    def ok(self) -> bool:
        return all(r.ok for r in self.results)

    def lines(self):
        out = []
        for r in self.results:
            out.append(f"{'PASS' if r.ok else 'FAIL'} {r.name}: {r.detail}")
        return out

    def first_failure(self):
        for r in self.results:
            if not r.ok:
                return r
        return None


# grid used by the spectrum and Plancherel audits
SPECTRUM_GRID = [
    (Family.CLASSICAL, 4, 2),
    (Family.CLASSICAL, 5, 2),
    (Family.CLASSICAL, 6, 3),
    (Family.VARIANT, 4, 2),
    (Family.VARIANT, 5, 2),
    (Family.VARIANT, 6, 3),
    (Family.INDEPENDENT_FLIPS, 2, 1),
    (Family.INDEPENDENT_FLIPS, 3, 1),
    (Family.INDEPENDENT_FLIPS, 4, 2),
    (Family.PAIRED_FLIPS, 2, 1),
    (Family.PAIRED_FLIPS, 3, 1),
    (Family.PAIRED_FLIPS, 4, 2),
]

PLANCHEREL_GRID = SPECTRUM_GRID + [
    (Family.VARIANT, 12, 6),
    (Family.INDEPENDENT_FLIPS, 6, 3),
]


def _check_dimension_identity_unsigned(n_max: int = 14) -> CheckResult:
    for n in range(2, n_max + 1):
        for r in range(1, n // 2 + 1):
            for family in (Family.CLASSICAL, Family.VARIANT):
                got = catalog.total_weight(catalog.unsigned_catalog(n, r, family))
                want = comb(n, r)
                if got != want:
                    return CheckResult(
                        "dimension-identity-unsigned",
                        False,
                        f"{family.value} n={n} r={r}: sum dim*mult = {got}, want {want}",
                    )
    return CheckResult(
        "dimension-identity-unsigned", True, f"exact for all n <= {n_max}"
    )


def _check_dimension_identity_signed(n_max: int = 10) -> CheckResult:
    for n in range(2, n_max + 1):
        for r in range(1, n // 2 + 1):
            for family in (Family.INDEPENDENT_FLIPS, Family.PAIRED_FLIPS):
                got = catalog.total_weight(catalog.signed_catalog(n, r, family))
                want = (1 << n) * comb(n, r)
                if got != want:
                    return CheckResult(
                        "dimension-identity-signed",
                        False,
                        f"{family.value} n={n} r={r}: sum dim*mult = {got}, want {want}",
                    )
    return CheckResult("dimension-identity-signed", True, f"exact for all n <= {n_max}")


def _check_eigenvalue_sanity() -> CheckResult:
    for family, n, r in SPECTRUM_GRID:
        model = ModelSpec(family, n, r)
        entries = catalog.catalog_entries(model)
        ones = [e for e in entries if e.eigenvalue == 1]
        if len(ones) != 1 or ones[0].label != catalog.trivial_label(model):
            return CheckResult(
                "eigenvalue-sanity",
                False,
                f"{family.value} ({n},{r}): eigenvalue 1 not unique to the trivial label",
            )
        bad = [e for e in entries if abs(e.eigenvalue) > 1]
        if bad:
            return CheckResult(
                "eigenvalue-sanity",
                False,
                f"{family.value} ({n},{r}): |eigenvalue| > 1 at {bad[0].label}",
            )
    return CheckResult("eigenvalue-sanity", True, "unique top eigenvalue, all within [-1, 1]")


def _check_kernel_rows() -> CheckResult:
    grid = [
        ModelSpec(Family.CLASSICAL, 4, 2),
        ModelSpec(Family.VARIANT, 4, 2),
        ModelSpec(Family.INDEPENDENT_FLIPS, 3, 1),
        ModelSpec(Family.PAIRED_FLIPS, 3, 1),
    ]
    for model in grid:
        weights = {}
        states = exact.enumerate_states(model)
        for s in states:
            row = chains.kernel_row(model, s)
            if row.total() != 1:
                return CheckResult(
                    "kernel-rows", False, f"{model.family.value}: row sum {row.total()} != 1"
                )
            for t, w in row.entries:
                weights[(s, t)] = w
        for (s, t), w in weights.items():
            if weights.get((t, s), Fraction(0)) != w:
                return CheckResult(
                    "kernel-rows",
                    False,
                    f"{model.family.value}: kernel not symmetric at {s} -> {t}",
                )
    return CheckResult("kernel-rows", True, "rows sum to 1 exactly, kernels symmetric")


def _spectrum_mismatch(model: ModelSpec, tol: float = 1e-8):
    got = exact.spectrum(model)
    want = exact.expected_spectrum(model)
    if got.shape != want.shape:
        return f"{model.family.value} ({model.n},{model.r}): {got.shape[0]} eigenvalues, catalog says {want.shape[0]}"
    err = float(np.abs(got - want).max())
    if err > tol:
        return f"{model.family.value} ({model.n},{model.r}): spectrum mismatch {err:.3g} > {tol}"
    return None


def _check_spectrum(grid, name: str) -> CheckResult:
    for family, n, r in grid:
        bad = _spectrum_mismatch(ModelSpec(family, n, r))
        if bad:
            return CheckResult(name, False, bad)
    return CheckResult(name, True, f"kernel spectra match the catalog on {len(grid)} models")


def _check_plancherel_rational(kmax: int = 20) -> CheckResult:
    for family, n, r in PLANCHEREL_GRID:
        model = ModelSpec(family, n, r)
        entries = catalog.catalog_entries(model)
        points = exact.distance_curve(model, range(1, kmax + 1), exact=True)
        for p in points:
            want = bounds.l2n_sq_bound(model, p.k, exact=True, entries=entries)
            if p.l2n_sq != want:
                return CheckResult(
                    "plancherel-rational",
                    False,
                    f"{family.value} ({n},{r}) k={p.k}: exact l2 distance != spectral sum",
                )
    return CheckResult(
        "plancherel-rational",
        True,
        f"exact equality on {len(PLANCHEREL_GRID)} models, k <= {kmax}",
    )


def _check_tv_upper(kmax: int = 20) -> CheckResult:
    for family, n, r in PLANCHEREL_GRID:
        model = ModelSpec(family, n, r)
        entries = catalog.catalog_entries(model)
        points = exact.distance_curve(model, range(1, kmax + 1), exact=True)
        for p in points:
            bound = bounds.l2n_sq_bound(model, p.k, exact=True, entries=entries)
            if p.tv * p.tv > bound:
                return CheckResult(
                    "tv-upper-bound",
                    False,
                    f"{family.value} ({n},{r}) k={p.k}: tv exceeds the spectral bound",
                )
    return CheckResult("tv-upper-bound", True, "tv^2 <= spectral sum everywhere (exact)")


def _check_moments(kmax: int = 15) -> CheckResult:
    for n in (6, 8, 10):
        r = n // 2
        model = ModelSpec(Family.VARIANT, n, r)
        states = exact.enumerate_states(model)
        s1 = np.array([float(bounds.spherical_s1(n, r, s)) for s in states])
        for k, dist in exact.evolve_sequence(model, range(1, kmax + 1), exact=False):
            mean = float(np.dot(dist.probs, s1))
            want = bounds.moment_s1(n, k)
            if abs(mean - want) > 1e-10:
                return CheckResult(
                    "moment-identities",
                    False,
                    f"variant ({n},{r}) k={k}: E[s1] off by {abs(mean - want):.3g}",
                )
            mean_sq = float(np.dot(dist.probs, s1 * s1))
            var_ratio = (mean_sq - mean * mean) / (mean * mean)
            want_ratio = bounds.variance_ratio(n, r, k)
            rel = abs(var_ratio - want_ratio) / abs(want_ratio)
            if rel > 1e-8:
                return CheckResult(
                    "moment-identities",
                    False,
                    f"variant ({n},{r}) k={k}: variance ratio off by rel {rel:.3g}",
                )
    return CheckResult(
        "moment-identities", True, f"s1 mean and variance ratio match, k <= {kmax}"
    )


def _check_signed_marginal(kmax: int = 10) -> CheckResult:
    for family in (Family.INDEPENDENT_FLIPS, Family.PAIRED_FLIPS):
        signed_model = ModelSpec(family, 6, 3)
        plain_model = ModelSpec(Family.VARIANT, 6, 3)
        signed_iter = exact.evolve_sequence(signed_model, range(kmax + 1), exact=False)
        plain_iter = exact.evolve_sequence(plain_model, range(kmax + 1), exact=False)
        for (k1, d_signed), (k2, d_plain) in zip(signed_iter, plain_iter):
            marg = exact.subset_marginal(d_signed)
            err = float(np.abs(marg.probs - d_plain.probs).max())
            if err > 1e-12:
                return CheckResult(
                    "signed-marginal",
                    False,
                    f"{family.value} (6,3) k={k1}: marginal off by {err:.3g}",
                )
    return CheckResult(
        "signed-marginal", True, f"rack marginals equal the variant law, k <= {kmax}"
    )


def _check_montecarlo() -> CheckResult:
    model = ModelSpec(Family.VARIANT, 100, 50)
    cfg = montecarlo.SimConfig(model=model, k=115, walkers=10**5, seed=20240817)
    summary = montecarlo.run(cfg)
    want = bounds.moment_s1(100, 115)
    dev = abs(summary.mean_s1 - want)
    if dev > 4 * summary.stderr_s1:
        return CheckResult(
            "montecarlo-moment",
            False,
            f"variant (100,50) k=115: mean s1 off by {dev:.3g} > 4 stderr",
        )
    small = ModelSpec(Family.VARIANT, 10, 5)
    cfg2 = montecarlo.SimConfig(model=small, k=3, walkers=10**6, seed=20240817)
    summary2 = montecarlo.run(cfg2)
    tv_exact = exact.tv_distance(exact.evolve(small, 3))
    gap = abs(summary2.empirical_tv - tv_exact)
    if gap > 0.01:
        return CheckResult(
            "montecarlo-tv",
            False,
            f"variant (10,5) k=3: empirical tv off by {gap:.3g} > 0.01",
        )
    return CheckResult(
        "montecarlo-consistency",
        True,
        f"moment within {dev / summary.stderr_s1:.2f} stderr; tv gap {gap:.4f}",
    )


def _check_determinism() -> CheckResult:
    model = ModelSpec(Family.INDEPENDENT_FLIPS, 6, 3)
    cfg = montecarlo.SimConfig(model=model, k=7, walkers=20000, seed=7)
    a = montecarlo.run(cfg, block_size=1 << 16)
    b = montecarlo.run(cfg, block_size=777)
    if (a.mean_s1, a.stderr_s1, a.empirical_tv) != (b.mean_s1, b.stderr_s1, b.empirical_tv):
        return CheckResult(
            "determinism", False, "simulation summary depends on the batching"
        )
    d1 = exact.evolve(model, 5)
    d2 = exact.evolve(model, 5)
    if not np.array_equal(d1.probs, d2.probs):
        return CheckResult("determinism", False, "exact evolution not reproducible")
    return CheckResult("determinism", True, "simulation independent of batching; evolution reproducible")


def _check_cutoff_window() -> CheckResult:
    model = ModelSpec(Family.VARIANT, 200, 100)
    n = model.n
    k_up = math.ceil(0.25 * n * (math.log(n) + 4))
    k_down = math.floor(0.25 * n * (math.log(n) - 4))
    up = bounds.tv_upper(model, k_up)
    down = bounds.leading_l2_term(model, k_down)
    if up >= 0.2:
        return CheckResult(
            "cutoff-window", False, f"tv bound {up:.3g} at k={k_up} not below 0.2"
        )
    if down <= 1:
        return CheckResult(
            "cutoff-window", False, f"leading l2 term {down:.3g} at k={k_down} not above 1"
        )
    return CheckResult(
        "cutoff-window",
        True,
        f"mixed by k={k_up} (tv<= {up:.3g}), unmixed at k={k_down} "
        f"(l2 term {down:.3g}); k ratio {k_up / k_down:.2f}",
    )


def run_quick() -> VerifyReport:
    """Structural checks: exact identities, kernel sanity, small spectra."""
    results = (
        _check_dimension_identity_unsigned(),
        _check_dimension_identity_signed(),
        _check_eigenvalue_sanity(),
        _check_kernel_rows(),
        _check_spectrum(
            [
                (Family.CLASSICAL, 4, 2),
                (Family.VARIANT, 4, 2),
                (Family.INDEPENDENT_FLIPS, 2, 1),
                (Family.PAIRED_FLIPS, 2, 1),
            ],
            "spectrum-match",
        ),
    )
    return VerifyReport(results)


def run_full() -> VerifyReport:
    """Quick checks plus the full numerical audit (about a minute)."""
    results = list(run_quick().results)
    results.append(_check_spectrum(SPECTRUM_GRID, "spectrum-match-grid"))
    results.append(_check_plancherel_rational())
    results.append(_check_tv_upper())
    results.append(_check_moments())
    results.append(_check_signed_marginal())
    results.append(_check_montecarlo())
    results.append(_check_determinism())
    results.append(_check_cutoff_window())
    return VerifyReport(tuple(results))
