"""Exact finite-state analysis: evolution, distances, spectra.

States are indexed by colexicographic subset rank; signed states add the
charge word as the high part, index = signs * C(n,r) + subset_rank.  Float
evolution scatters kernel rows with numpy and is deterministic for a fixed
model (no parallel reductions).  Rational evolution keeps integer
numerators over the common denominator step_units(model)^k, so results are
exact and bitwise reproducible.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from math import comb

import numpy as np

from .chains import (
    SignedUrnState,
    UrnState,
    initial_state,
    kernel_row,
    step_units,
    subset_rank,
    subset_unrank,
)
from .catalog import catalog_entries
from .models import Family, ModelSpec

__all__ = [
    "SpaceCapError",
    "Distribution",
    "space_size",
    "state_index",
    "state_at",
    "enumerate_states",
    "evolve",
    "evolve_sequence",
    "distance_curve",
    "ExactCurvePoint",
    "tv_distance",
    "l2n_sq_distance",
    "subset_marginal",
    "spectrum",
    "expected_spectrum",
    "trace_identity_check",
    "TraceCheckRow",
    "distribution_csv",
    "DENSE_CAP",
    "FLOAT_STATE_CAP",
    "RATIONAL_STATE_CAP",
    "RATIONAL_STEP_CAP",
]

FLOAT_STATE_CAP = 10**6
RATIONAL_STATE_CAP = 10**4
RATIONAL_STEP_CAP = 50
DENSE_CAP = 4096


class SpaceCapError(RuntimeError):
    """The computation is larger than the requested resource cap."""

    def __init__(self, required: int, cap: int, what: str):
        self.required = required
        self.cap = cap
        super().__init__(f"{what} needs {required} but the cap is {cap}")


def space_size(model: ModelSpec) -> int:
    """C(n,r) arrangements, times 2^n charge words for signed families."""
    base = comb(model.n, model.r)
    if model.family.signed:
        return (1 << model.n) * base
    return base


def state_index(model: ModelSpec, state) -> int:
    """Rank of a state, consistent with enumerate_states order."""
    rank = subset_rank(state.rack1)
    if model.family.signed:
        return state.signs * comb(model.n, model.r) + rank
    return rank


def state_at(model: ModelSpec, index: int) -> UrnState | SignedUrnState:
    """Inverse of state_index."""
    base = comb(model.n, model.r)
    if model.family.signed:
        signs, rank = divmod(index, base)
        if signs >> model.n:
            raise ValueError(f"index {index} out of range")
        return SignedUrnState(rack1=subset_unrank(model.n, model.r, rank), signs=signs)
    return UrnState(rack1=subset_unrank(model.n, model.r, index))


def enumerate_states(model: ModelSpec):
    """All states in index order.

    Colex rank of fixed-size subsets coincides with numeric mask order, so
    the subsets are simply the sorted masks.
    """
    n, r = model.n, model.r
    masks = sorted(sum(1 << b for b in c) for c in combinations(range(n), r))
    if not model.family.signed:
        return [UrnState(m) for m in masks]
    states = []
    for signs in range(1 << n):
        for m in masks:
            states.append(SignedUrnState(rack1=m, signs=signs))
    return states


@dataclass
class Distribution:
    """A probability vector over the indexed state space.

    probs is a float64 numpy array, or a list of Fractions in exact mode.
    """

    model: ModelSpec
    probs: object

    @property
    def exact(self) -> bool:
        return not isinstance(self.probs, np.ndarray)


def _indexed_rows(model: ModelSpec):
    """Kernel rows in index space: (targets, integer weights) per source.

    Weights are in units of 1/step_units(model) and are exact.
    """
    units = step_units(model)
    rows = []
    for state in enumerate_states(model):
        row = kernel_row(model, state)
        targets = []
        weights = []
        for t, w in row.entries:
            scaled = w * units
            assert scaled.denominator == 1
            targets.append(state_index(model, t))
            weights.append(scaled.numerator)
        rows.append((targets, weights))
    return rows


def evolve(model: ModelSpec, k: int, exact: bool = False, state_cap: int | None = None) -> Distribution:
    """Law of the chain after k steps from the deterministic initial state."""
    if k < 0:
        raise ValueError(f"need k >= 0, got {k}")
    for _, dist in evolve_sequence(model, [k], exact=exact, state_cap=state_cap):
        pass
    return dist


def evolve_sequence(model: ModelSpec, ks, exact: bool = False, state_cap: int | None = None):
    """Step once per unit k, yielding a Distribution at each requested k.

    The yielded distributions are fresh copies and safe to keep.
    """
    ks = sorted(set(ks))
    if not ks or ks[0] < 0:
        raise ValueError(f"bad step grid {ks}")
    n_states = space_size(model)
    if exact:
        cap = RATIONAL_STATE_CAP if state_cap is None else state_cap
        if n_states > cap:
            raise SpaceCapError(n_states, cap, "rational evolution state count")
        if ks[-1] > RATIONAL_STEP_CAP:
            raise SpaceCapError(ks[-1], RATIONAL_STEP_CAP, "rational step count")
    else:
        cap = FLOAT_STATE_CAP if state_cap is None else state_cap
        if n_states > cap:
            raise SpaceCapError(n_states, cap, "evolution state count")

    rows = _indexed_rows(model)
    units = step_units(model)
    start = state_index(model, initial_state(model))

    if exact:
        nums = [0] * n_states
        nums[start] = 1
        denom = 1
        step_no = 0
        for k in ks:
            while step_no < k:
                new = [0] * n_states
                for s, (targets, weights) in enumerate(rows):
                    v = nums[s]
                    if v:
                        for t, w in zip(targets, weights):
                            new[t] += w * v
                nums = new
                denom *= units
                step_no += 1
            yield k, Distribution(model, [Fraction(v, denom) for v in nums])
        return

    counts = np.array([len(t) for t, _ in rows], dtype=np.int64)
    flat_targets = np.concatenate([np.array(t, dtype=np.int64) for t, _ in rows])
    flat_weights = np.concatenate(
        [np.array(w, dtype=np.float64) / units for _, w in rows]
    )
    probs = np.zeros(n_states)
    probs[start] = 1.0
    step_no = 0
    for k in ks:
        while step_no < k:
            contrib = np.repeat(probs, counts) * flat_weights
            probs = np.bincount(flat_targets, weights=contrib, minlength=n_states)
            step_no += 1
        yield k, Distribution(model, probs.copy())


@dataclass(frozen=True)
class ExactCurvePoint:
    k: int
    tv: object
    l2n_sq: object


def distance_curve(model: ModelSpec, ks, exact: bool = False, state_cap: int | None = None) -> list[ExactCurvePoint]:
    """Total variation and scaled l2 distance from uniform along a step grid."""
    points = []
    for k, dist in evolve_sequence(model, ks, exact=exact, state_cap=state_cap):
        points.append(
            ExactCurvePoint(k=k, tv=tv_distance(dist), l2n_sq=l2n_sq_distance(dist))
        )
    return points


def tv_distance(dist: Distribution):
    """(1/2) sum |p(x) - 1/|X||; a Fraction in exact mode, float otherwise."""
    n_states = space_size(dist.model)
    if dist.exact:
        u = Fraction(1, n_states)
        return sum(abs(p - u) for p in dist.probs) / 2
    return float(0.5 * np.abs(dist.probs - 1.0 / n_states).sum())


def l2n_sq_distance(dist: Distribution):
    """(|X|/4) sum (p(x) - 1/|X|)^2; matches the spectral sum exactly."""
    n_states = space_size(dist.model)
    if dist.exact:
        u = Fraction(1, n_states)
        return Fraction(n_states, 4) * sum((p - u) ** 2 for p in dist.probs)
    d = dist.probs - 1.0 / n_states
    return float(n_states / 4.0 * np.dot(d, d))


def subset_marginal(dist: Distribution) -> Distribution:
    """Collapse a signed distribution onto the rack subset, as a variant law."""
    model = dist.model
    if not model.family.signed:
        raise ValueError("subset_marginal applies to signed families")
    base = comb(model.n, model.r)
    if dist.exact:
        marg = [Fraction(0)] * base
        for idx, p in enumerate(dist.probs):
            marg[idx % base] += p
    else:
        marg = dist.probs.reshape(-1, base).sum(axis=0)
    return Distribution(ModelSpec(Family.VARIANT, model.n, model.r), marg)


def _dense_kernel(model: ModelSpec, cap: int) -> np.ndarray:
    n_states = space_size(model)
    if n_states > cap:
        raise SpaceCapError(n_states, cap, "dense kernel state count")
    units = step_units(model)
    mat = np.zeros((n_states, n_states))
    for s, (targets, weights) in enumerate(_indexed_rows(model)):
        for t, w in zip(targets, weights):
            mat[s, t] = w / units
    return mat


def spectrum(model: ModelSpec, cap: int = DENSE_CAP) -> np.ndarray:
    """All kernel eigenvalues, descending.

    The rational kernel is symmetric, so the float matrix is symmetric to
    the last bit; this is asserted (tolerance 1e-15) before symmetrizing
    and calling the dense symmetric eigensolver.
    """
    mat = _dense_kernel(model, cap)
    skew = np.abs(mat - mat.T).max()
    assert skew <= 1e-15, f"kernel asymmetry {skew}"
    sym = (mat + mat.T) / 2.0
    return np.sort(np.linalg.eigvalsh(sym))[::-1]


def expected_spectrum(model: ModelSpec) -> np.ndarray:
    """Eigenvalues predicted by the catalog, with weights, descending."""
    vals = []
    for e in catalog_entries(model):
        vals.extend([float(e.eigenvalue)] * e.weight)
    return np.sort(np.array(vals))[::-1]


@dataclass(frozen=True)
class TraceCheckRow:
    k: int
    kernel_trace: float
    catalog_trace: float
    rel_err: float


def trace_identity_check(model: ModelSpec, kmax: int, cap: int = DENSE_CAP) -> list[TraceCheckRow]:
    """Compare tr(P^k) against sum dim * mult * eigenvalue^k for k = 1..kmax.

    Agreement pins dimensions, multiplicities and eigenvalues jointly; a
    wrong entry anywhere shows up at some power.
    """
    if kmax < 1:
        raise ValueError(f"need kmax >= 1, got {kmax}")
    mat = _dense_kernel(model, cap)
    entries = catalog_entries(model)
    out = []
    power = mat.copy()
    for k in range(1, kmax + 1):
        kernel_trace = float(np.trace(power))
        catalog_trace = float(sum(e.weight * float(e.eigenvalue) ** k for e in entries))
        denom = max(1.0, abs(catalog_trace))
        out.append(
            TraceCheckRow(
                k=k,
                kernel_trace=kernel_trace,
                catalog_trace=catalog_trace,
                rel_err=abs(kernel_trace - catalog_trace) / denom,
            )
        )
        if k < kmax:
            power = power @ mat
    return out


def distribution_csv(dist: Distribution) -> str:
    """CSV snapshot rank,probability with 18 significant digits."""
    buf = io.StringIO()
    buf.write("rank,probability\n")
    for idx, p in enumerate(dist.probs):
        buf.write(f"{idx},{float(p):.17e}\n")
    return buf.getvalue()
