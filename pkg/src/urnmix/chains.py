"""States, stepping rules, and exact one-step kernel rows.

A state stores the set of ball labels on rack 1 as an n-bit mask (bit b is
ball b+1).  Signed states also carry an n-bit charge mask, indexed by ball
label, so swapping two balls never touches the charge word; only explicit
flips do.

Samplers draw from any source with an ``integers(n)`` method returning a
uniform value in [0, n).  Each family consumes a fixed number of draws per
step, in a fixed order, so that a trajectory is a pure function of the
stream:

    classical    2 draws: index on rack 1, index on rack 2
    variant      2 draws: ball, ball
    independent  4 draws: ball, ball, coin, coin  (coins always consumed)
    paired       3 draws: ball, ball, coin

For the independent family with equal ball draws the second coin is consumed
and discarded, keeping the stride constant.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .models import Family, ModelSpec

__all__ = [
    "UrnState",
    "SignedUrnState",
    "KernelRow",
    "initial_state",
    "step_classical",
    "step_variant",
    "step_independent_flips",
    "step_paired_flips",
    "step",
    "kernel_row",
    "step_units",
    "subset_rank",
    "subset_unrank",
    "bits_of",
]


@dataclass(frozen=True)
class UrnState:
    """Unsigned state: the rack-1 subset as an n-bit mask."""

    rack1: int


@dataclass(frozen=True)
class SignedUrnState:
    """Signed state: rack-1 subset mask plus per-ball charge mask."""

    rack1: int
    signs: int


def bits_of(mask: int):
    """Yield the set bit positions of mask in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def subset_rank(mask: int) -> int:
    """Colexicographic rank of a subset among subsets of the same size.

    The rank of {c_1 < ... < c_r} is sum_t C(c_t, t).  Colex order on fixed
    size subsets coincides with numeric order of the masks.
    """
    rank = 0
    t = 0
    for b in bits_of(mask):
        t += 1
        rank += comb(b, t)
    return rank


def subset_unrank(n: int, r: int, rank: int) -> int:
    """Inverse of subset_rank for r-subsets of {0..n-1}."""
    if not 0 <= rank < comb(n, r):
        raise ValueError(f"rank {rank} out of range for C({n},{r})")
    mask = 0
    for t in range(r, 0, -1):
        c = t - 1
        while comb(c + 1, t) <= rank:
            c += 1
        rank -= comb(c, t)
        mask |= 1 << c
    return mask


def initial_state(model: ModelSpec):
    """Deterministic start: balls 1..r on rack 1, all charges positive."""
    rack1 = (1 << model.r) - 1
    if model.family.signed:
        return SignedUrnState(rack1=rack1, signs=0)
    return UrnState(rack1=rack1)


def _check_state(model: ModelSpec, state) -> None:
    signed = model.family.signed
    if signed and not isinstance(state, SignedUrnState):
        raise ValueError(f"{model.family.value} needs a SignedUrnState")
    if not signed and not isinstance(state, UrnState):
        raise ValueError(f"{model.family.value} needs an UrnState")
    if state.rack1 >> model.n:
        raise ValueError("state mask has bits beyond ball n")
    if state.rack1.bit_count() != model.r:
        raise ValueError(
            f"rack-1 mask has {state.rack1.bit_count()} balls, expected {model.r}"
        )
    if signed and state.signs >> model.n:
        raise ValueError("charge mask has bits beyond ball n")


def _nth_bit(mask: int, idx: int) -> int:
    """Position of the idx-th (0-based) set bit, in increasing order."""
    for count, b in enumerate(bits_of(mask)):
        if count == idx:
            return b
    raise IndexError(idx)


def _swap_subset(rack1: int, b1: int, b2: int) -> int:
    """Exchange the rack memberships of balls b1 and b2."""
    if ((rack1 >> b1) ^ (rack1 >> b2)) & 1:
        rack1 ^= (1 << b1) | (1 << b2)
    return rack1


def step_classical(model: ModelSpec, state: UrnState, rng) -> UrnState:
    """Pick one ball on each rack uniformly and trade their places."""
    _check_state(model, state)
    n, r = model.n, model.r
    full = (1 << n) - 1
    i1 = int(rng.integers(r))
    i2 = int(rng.integers(n - r))
    a = _nth_bit(state.rack1, i1)
    b = _nth_bit(full ^ state.rack1, i2)
    return UrnState(state.rack1 ^ (1 << a) ^ (1 << b))


def step_variant(model: ModelSpec, state: UrnState, rng) -> UrnState:
    """Pick two balls uniformly with replacement; swap if on different racks."""
    _check_state(model, state)
    n = model.n
    b1 = int(rng.integers(n))
    b2 = int(rng.integers(n))
    return UrnState(_swap_subset(state.rack1, b1, b2))


def step_independent_flips(model: ModelSpec, state: SignedUrnState, rng) -> SignedUrnState:
    """Variant move on charged balls; each chosen ball's charge flips on a fair coin.

    When the two draws name the same ball only the first coin applies; the
    second is still drawn so the stream stride stays 4.
    """
    _check_state(model, state)
    n = model.n
    b1 = int(rng.integers(n))
    b2 = int(rng.integers(n))
    c1 = int(rng.integers(2))
    c2 = int(rng.integers(2))
    rack1 = _swap_subset(state.rack1, b1, b2)
    signs = state.signs ^ (c1 << b1)
    if b1 != b2:
        signs ^= c2 << b2
    return SignedUrnState(rack1, signs)


def step_paired_flips(model: ModelSpec, state: SignedUrnState, rng) -> SignedUrnState:
    """Variant move on charged balls; one coin flips both charges or neither."""
    _check_state(model, state)
    n = model.n
    b1 = int(rng.integers(n))
    b2 = int(rng.integers(n))
    c = int(rng.integers(2))
    rack1 = _swap_subset(state.rack1, b1, b2)
    signs = state.signs ^ (c << b1)
    if b1 != b2:
        signs ^= c << b2
    return SignedUrnState(rack1, signs)


_STEPPERS = {
    Family.CLASSICAL: step_classical,
    Family.VARIANT: step_variant,
    Family.INDEPENDENT_FLIPS: step_independent_flips,
    Family.PAIRED_FLIPS: step_paired_flips,
}

STREAM_DRAWS_PER_STEP = {
    Family.CLASSICAL: 2,
    Family.VARIANT: 2,
    Family.INDEPENDENT_FLIPS: 4,
    Family.PAIRED_FLIPS: 3,
}


def step(model: ModelSpec, state, rng):
    """One sampled step of the model's chain."""
    return _STEPPERS[model.family](model, state, rng)


def step_units(model: ModelSpec) -> int:
    """Common denominator of all one-step transition probabilities.

    classical r(n-r), variant n^2, independent flips 4n^2, paired 2n^2.
    """
    n, r = model.n, model.r
    if model.family is Family.CLASSICAL:
        return r * (n - r)
    if model.family is Family.VARIANT:
        return n * n
    if model.family is Family.INDEPENDENT_FLIPS:
        return 4 * n * n
    return 2 * n * n


@dataclass(frozen=True)
class KernelRow:
    """One row of the transition kernel: distinct targets with exact weights."""

    source: UrnState | SignedUrnState
    entries: tuple

    def total(self) -> Fraction:
        return sum((w for _, w in self.entries), Fraction(0))

    def weight_to(self, target) -> Fraction:
        for t, w in self.entries:
            if t == target:
                return w
        return Fraction(0)


def kernel_row(model: ModelSpec, state) -> KernelRow:
    """Exact transition row out of a state, aggregated over outcomes.

    Weights are fractions with denominator dividing step_units(model); they
    sum to exactly 1.  The kernel is symmetric (every atomic move is an
    involution with the same selection probability both ways), hence doubly
    stochastic with uniform stationary law.
    """
    _check_state(model, state)
    family = model.family
    if family is Family.CLASSICAL:
        acc = _row_classical(model, state)
    elif family is Family.VARIANT:
        acc = _row_variant(model, state)
    elif family is Family.INDEPENDENT_FLIPS:
        acc = _row_independent(model, state)
    else:
        acc = _row_paired(model, state)
    if family.signed:
        key = lambda sw: (sw[0].signs, sw[0].rack1)
    else:
        key = lambda sw: sw[0].rack1
    entries = tuple(sorted(acc.items(), key=key))
    return KernelRow(source=state, entries=entries)


def _row_classical(model: ModelSpec, state: UrnState) -> dict:
    n, r = model.n, model.r
    full = (1 << n) - 1
    w = Fraction(1, r * (n - r))
    acc: dict[UrnState, Fraction] = {}
    for a in bits_of(state.rack1):
        for b in bits_of(full ^ state.rack1):
            t = UrnState(state.rack1 ^ (1 << a) ^ (1 << b))
            acc[t] = acc.get(t, Fraction(0)) + w
    return acc


def _row_variant(model: ModelSpec, state: UrnState) -> dict:
    n, r = model.n, model.r
    full = (1 << n) - 1
    acc = {state: Fraction(n * n - 2 * r * (n - r), n * n)}
    w = Fraction(2, n * n)
    for a in bits_of(state.rack1):
        for b in bits_of(full ^ state.rack1):
            t = UrnState(state.rack1 ^ (1 << a) ^ (1 << b))
            acc[t] = acc.get(t, Fraction(0)) + w
    return acc


def _row_independent(model: ModelSpec, state: SignedUrnState) -> dict:
    n = model.n
    unit = Fraction(1, 4 * n * n)
    acc: dict[SignedUrnState, Fraction] = {}

    def add(rack1, signs, units):
        t = SignedUrnState(rack1, signs)
        acc[t] = acc.get(t, Fraction(0)) + units * unit

    for b in range(n):
        add(state.rack1, state.signs, 2)
        add(state.rack1, state.signs ^ (1 << b), 2)
    for b1 in range(n):
        for b2 in range(n):
            if b1 == b2:
                continue
            rack1 = _swap_subset(state.rack1, b1, b2)
            for f1 in (0, 1):
                for f2 in (0, 1):
                    add(rack1, state.signs ^ (f1 << b1) ^ (f2 << b2), 1)
    return acc


def _row_paired(model: ModelSpec, state: SignedUrnState) -> dict:
    n = model.n
    unit = Fraction(1, 2 * n * n)
    acc: dict[SignedUrnState, Fraction] = {}

    def add(rack1, signs, units):
        t = SignedUrnState(rack1, signs)
        acc[t] = acc.get(t, Fraction(0)) + units * unit

    for b in range(n):
        add(state.rack1, state.signs, 1)
        add(state.rack1, state.signs ^ (1 << b), 1)
    for b1 in range(n):
        for b2 in range(n):
            if b1 == b2:
                continue
            rack1 = _swap_subset(state.rack1, b1, b2)
            add(rack1, state.signs, 1)
            add(rack1, state.signs ^ (1 << b1) ^ (1 << b2), 1)
    return acc
