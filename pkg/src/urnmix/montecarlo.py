"""Monte Carlo simulation of the chains with reproducible per-walker streams.

Randomness is counter based: draw t of walker w under seed s is a 64-bit
hash of (s, w, t), so a walker's trajectory is a pure function of (seed,
walker id) no matter how walkers are batched or scheduled.  The vectorized
engine here and the scalar WalkerStream consume draws in the same order
(see chains: fixed number of draws per step per family), and therefore
produce bit-identical trajectories.

Summaries report the first spherical function s1 = 1 - j n/(r(n-r)) of each
terminal state, j being the count of rack-1 balls with labels above r;
for signed families s1 is evaluated on the rack marginal, ignoring charges.
An empirical total-variation estimate against uniform is included only when
the space is small enough and the walker count clears 50 states per walker;
the known upward bias is bounded by sqrt(|X|/walkers)/2, reported alongside.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import combinations
from math import comb, sqrt

import numpy as np

from .chains import STREAM_DRAWS_PER_STEP
from .exact import space_size
from .models import Family, ModelSpec

__all__ = [
    "SimConfig",
    "SimSummary",
    "WalkerStream",
    "derive_stream",
    "run",
    "STREAM_MAGIC",
    "TV_SPACE_CAP",
    "TV_WALKER_FACTOR",
]

STREAM_MAGIC = b"URNMC01\x00"
TV_SPACE_CAP = 10**5
TV_WALKER_FACTOR = 50

_M64 = (1 << 64) - 1
_C0 = 0x9E3779B97F4A7C15
_C1 = 0xBF58476D1CE4E5B9
_C2 = 0x94D049BB133111EB
_C3 = 0xD6E8FEB86659FD93
_C4 = 0x2545F4914F6CDD1D


def _mix_int(x: int) -> int:
    """splitmix64 finalizer on a Python int."""
    x &= _M64
    x ^= x >> 30
    x = (x * _C1) & _M64
    x ^= x >> 27
    x = (x * _C2) & _M64
    x ^= x >> 31
    return x


# numpy mirror of _mix_int; constants pre-wrapped so nothing upcasts
_U = np.uint64
_NC1, _NC2 = _U(_C1), _U(_C2)
_S30, _S27, _S31, _S32 = _U(30), _U(27), _U(31), _U(32)


def _mix_np(x: np.ndarray) -> np.ndarray:
    x = x ^ (x >> _S30)
    x = x * _NC1
    x = x ^ (x >> _S27)
    x = x * _NC2
    return x ^ (x >> _S31)


def _seed_hash(seed: int) -> int:
    return _mix_int((seed & _M64) ^ _C0)


def _walker_hash_int(seed: int, walker: int) -> int:
    return _mix_int(_seed_hash(seed) ^ ((walker * _C1 + _C2) & _M64))


class WalkerStream:
    """Counter-based random source for one walker.

    integers(n) returns a uniform draw from [0, n) and advances the counter.
    Bit-identical to the draws the vectorized engine makes for the same
    (seed, walker).
    """

    def __init__(self, seed: int, walker: int):
        if walker < 0:
            raise ValueError(f"need walker >= 0, got {walker}")
        self._wh = _walker_hash_int(seed, walker)
        self._t = 0

    def integers(self, n: int) -> int:
        if not 1 <= n < 1 << 32:
            raise ValueError(f"integers(n) needs 1 <= n < 2^32, got {n}")
        h = _mix_int(self._wh ^ ((self._t * _C3 + _C4) & _M64))
        self._t += 1
        return ((h >> 32) * n) >> 32


def derive_stream(seed: int, worker: int) -> WalkerStream:
    """Independent reproducible stream for a worker (or walker) index."""
    return WalkerStream(seed, worker)


@dataclass(frozen=True)
class SimConfig:
    """What to simulate: model, step count, walker count, seed."""

    model: ModelSpec
    k: int
    walkers: int
    seed: int

    def __post_init__(self):
        if self.k < 0:
            raise ValueError(f"need k >= 0, got {self.k}")
        if self.walkers < 1:
            raise ValueError(f"need walkers >= 1, got {self.walkers}")


@dataclass
class SimSummary:
    """Run statistics; everything except elapsed_s is a pure function of the config."""

    mean_s1: float
    stderr_s1: float
    empirical_tv: float | None
    tv_bias_ceiling: float | None
    elapsed_s: float


def _draws(wh: np.ndarray, t: int, n: int) -> np.ndarray:
    """Uniform [0, n) draws at counter t for every walker hash in wh."""
    h = _mix_np(wh ^ _U((t * _C3 + _C4) & _M64))
    return (((h >> _S32) * _U(n)) >> _S32).astype(np.int64)


def _pack_bits(mat: np.ndarray, n: int) -> np.ndarray:
    pows = np.left_shift(_U(1), np.arange(n, dtype=np.uint64))
    return (mat.astype(np.uint64) * pows[None, :]).sum(axis=1, dtype=np.uint64)


def run(config: SimConfig, states_path=None, block_size: int = 1 << 16) -> SimSummary:
    """Simulate all walkers and summarize terminal states.

    states_path, if given, receives the magic header followed by one record
    per walker: little-endian 64-bit charge mask then 64-bit subset mask
    (charge mask 0 for unsigned families).  Requires n <= 64.
    """
    t0 = time.perf_counter()
    model, k, total, seed = config.model, config.k, config.walkers, config.seed
    n, r = model.n, model.r
    family = model.family
    signed = family.signed
    slots = STREAM_DRAWS_PER_STEP[family]
    if states_path is not None and n > 64:
        raise ValueError("state streaming packs masks into 64 bits, needs n <= 64")

    n_states = space_size(model)
    do_tv = n_states <= TV_SPACE_CAP and total >= TV_WALKER_FACTOR * n_states
    counts = np.zeros(n_states, dtype=np.int64) if do_tv else None
    if do_tv:
        sub_masks = np.array(
            sorted(sum(1 << b for b in c) for c in combinations(range(n), r)),
            dtype=np.int64,
        )

    seed_h = _U(_seed_hash(seed))
    s1_all = np.empty(total)
    out = open(states_path, "wb") if states_path is not None else None
    if out is not None:
        out.write(STREAM_MAGIC)
    try:
        for lo in range(0, total, block_size):
            hi = min(lo + block_size, total)
            ids = np.arange(lo, hi, dtype=np.uint64)
            wh = _mix_np(seed_h ^ (ids * _NC1 + _NC2))
            nb = hi - lo
            rows = np.arange(nb)
            rack = np.zeros((nb, n), dtype=bool)
            rack[:, :r] = True
            signs = np.zeros((nb, n), dtype=bool) if signed else None

            for step_no in range(k):
                base = step_no * slots
                if family is Family.CLASSICAL:
                    i1 = _draws(wh, base, r)
                    i2 = _draws(wh, base + 1, n - r)
                    csum = rack.cumsum(axis=1)
                    pos1 = np.argmax((csum == (i1 + 1)[:, None]) & rack, axis=1)
                    csum = (~rack).cumsum(axis=1)
                    pos2 = np.argmax((csum == (i2 + 1)[:, None]) & ~rack, axis=1)
                    rack[rows, pos1] = False
                    rack[rows, pos2] = True
                    continue
                b1 = _draws(wh, base, n)
                b2 = _draws(wh, base + 1, n)
                r1 = rack[rows, b1]
                r2 = rack[rows, b2]
                cross = r1 != r2
                rc = rows[cross]
                rack[rc, b1[cross]] = r2[cross]
                rack[rc, b2[cross]] = r1[cross]
                if family is Family.VARIANT:
                    continue
                neq = b1 != b2
                rn = rows[neq]
                if family is Family.INDEPENDENT_FLIPS:
                    c1 = _draws(wh, base + 2, 2).astype(bool)
                    c2 = _draws(wh, base + 3, 2).astype(bool)
                    signs[rows, b1] ^= c1
                    signs[rn, b2[neq]] ^= c2[neq]
                else:
                    c = _draws(wh, base + 2, 2).astype(bool)
                    signs[rows, b1] ^= c
                    signs[rn, b2[neq]] ^= c[neq]

            stray = rack[:, r:].sum(axis=1)
            s1_all[lo:hi] = 1.0 - stray * (n / (r * (n - r)))

            if do_tv or out is not None:
                packed_sub = _pack_bits(rack, n)
            if do_tv:
                ranks = np.searchsorted(sub_masks, packed_sub.astype(np.int64))
                if signed:
                    sval = _pack_bits(signs, n).astype(np.int64)
                    idx = sval * comb(n, r) + ranks
                else:
                    idx = ranks
                counts += np.bincount(idx, minlength=n_states)
            if out is not None:
                rec = np.zeros((nb, 2), dtype="<u8")
                if signed:
                    rec[:, 0] = _pack_bits(signs, n)
                rec[:, 1] = packed_sub
                out.write(rec.tobytes())
    finally:
        if out is not None:
            out.close()

    mean = float(s1_all.mean())
    stderr = float(s1_all.std(ddof=1) / sqrt(total)) if total > 1 else 0.0
    tv = bias = None
    if do_tv:
        tv = float(0.5 * np.abs(counts / total - 1.0 / n_states).sum())
        bias = 0.5 * sqrt(n_states / total)
    return SimSummary(
        mean_s1=mean,
        stderr_s1=stderr,
        empirical_tv=tv,
        tv_bias_ceiling=bias,
        elapsed_s=time.perf_counter() - t0,
    )
