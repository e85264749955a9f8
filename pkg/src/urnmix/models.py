"""Chain family definitions and model parameters."""

from __future__ import annotations

import enum
from dataclasses import dataclass


class Family(enum.Enum):
    """The four urn chain families.

    CLASSICAL forces one ball from each rack to trade places every step.
    VARIANT draws two positions uniformly (possibly equal) and swaps their
    balls only when they sit on different racks, so it can hold still.
    The two signed families run the variant move on charged balls:
    INDEPENDENT_FLIPS tosses a fair coin for each chosen ball's charge,
    PAIRED_FLIPS tosses one coin and flips both charges or neither.
    """

    CLASSICAL = "classical"
    VARIANT = "variant"
    INDEPENDENT_FLIPS = "independent"
    PAIRED_FLIPS = "paired"

    @property
    def signed(self) -> bool:
        return self in (Family.INDEPENDENT_FLIPS, Family.PAIRED_FLIPS)


@dataclass(frozen=True)
class ModelSpec:
    """A chain family together with the ball count n and rack-1 size r.

    Balls are labeled 1..n (bit b of a mask stands for ball b+1).  Rack 1
    holds r balls, rack 2 the other n - r.  Only 1 <= r <= n/2 is allowed;
    a larger first rack is the same model with the racks relabeled.
    """

    family: Family
    n: int
    r: int

    def __post_init__(self):
        if not isinstance(self.family, Family):
            raise ValueError(f"unknown family {self.family!r}")
        if self.n < 2:
            raise ValueError(f"need n >= 2, got n={self.n}")
        if not 1 <= self.r <= self.n // 2:
            raise ValueError(
                f"need 1 <= r <= n/2 (relabel racks otherwise), got n={self.n}, r={self.r}"
            )
