"""Irreducible components of the chain state spaces, with exact eigenvalues.

The unsigned chains live on the C(n,r) arrangements of r indistinguishable
rack-1 slots among n labeled balls; the transition kernel is constant on the
orbits of the symmetric group, so it acts as a scalar on each irreducible
component of the permutation module.  Those components are indexed by two-row
shapes [n-i, i] for i = 0..r, each appearing once.

The signed chains live on the 2^n * C(n,r) charged arrangements.  Components
are indexed by pairs of two-row shapes ([j-l, l]; [n-j-m, m]) and can repeat;
the multiplicity is the number of admissible splits i of the r rack-1 balls
between the two shapes.  Everything here is exact: dimensions and
multiplicities are integers, eigenvalues are fractions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb

from .models import Family, ModelSpec


def binomial(n: int, k: int) -> int:
    """C(n, k) with the convention C(n, k) = 0 for k < 0 or k > n."""
    if n < 0:
        raise ValueError(f"need n >= 0, got n={n}")
    if k < 0 or k > n:
        return 0
    return comb(n, k)


def dim_two_row(n: int, i: int) -> int:
    """Dimension C(n,i) - C(n,i-1) of the two-row component [n-i, i]."""
    if not 0 <= i <= n // 2:
        raise ValueError(f"two-row shape needs 0 <= i <= n/2, got n={n}, i={i}")
    return binomial(n, i) - binomial(n, i - 1)


def char_ratio_two_row(n: int, i: int) -> Fraction:
    """Character of a transposition on [n-i, i], divided by the dimension.

    Equals ((n-i)(n-i-1) + i(i-3)) / (n(n-1)).  For i = 0 this is 1, and it
    decreases as the shape gets more balanced; [2,2] in S4 gives exactly 0.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got n={n}")
    if not 0 <= i <= n // 2:
        raise ValueError(f"two-row shape needs 0 <= i <= n/2, got n={n}, i={i}")
    return Fraction((n - i) * (n - i - 1) + i * (i - 3), n * (n - 1))


# ---------------------------------------------------------------------------
# eigenvalues
#
# Each kernel is an average of transpositions (plus holds and charge flips),
# so its eigenvalue on a component is an affine function of the character
# ratio above.  The closed forms below are what that works out to.
# ---------------------------------------------------------------------------


def eig_classical(n: int, r: int, i: int) -> Fraction:
    """Eigenvalue 1 - i(n-i+1)/(r(n-r)) of the forced-swap kernel on [n-i, i]."""
    if n < 2 or not 1 <= r <= n // 2:
        raise ValueError(f"bad model parameters n={n}, r={r}")
    if not 0 <= i <= r:
        raise ValueError(f"component index out of range: i={i}, r={r}")
    return 1 - Fraction(i * (n - i + 1), r * (n - r))


def eig_variant(n: int, i: int) -> Fraction:
    """Eigenvalue 1 - 2i(n-i+1)/n^2 of the lazy position-pair kernel.

    Does not depend on r.  For i = 1 this is 1 - 2/n, and the i = 2 value
    (1 - 2/n)^2 is exactly its square.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got n={n}")
    if not 0 <= i <= n // 2:
        raise ValueError(f"component index out of range: i={i}, n={n}")
    return 1 - Fraction(2 * i * (n - i + 1), n * n)


def eig_independent(n: int, j: int, ell: int) -> Fraction:
    """Eigenvalue (j^2 - 2l(j-l+1)) / n^2 of the independent-flips kernel.

    Depends only on the first shape [j-l, l]; the second shape records how
    the sign character sits and does not move the eigenvalue.  Always in
    [0, 1], with 1 exactly at the trivial component (j = n, l = 0).
    """
    if not 0 <= j <= n:
        raise ValueError(f"need 0 <= j <= n, got j={j}, n={n}")
    if not 0 <= ell <= j // 2:
        raise ValueError(f"two-row shape needs 0 <= l <= j/2, got j={j}, l={ell}")
    return Fraction(j * j - 2 * ell * (j - ell + 1), n * n)


def eig_paired(n: int, j: int, ell: int, m: int) -> Fraction:
    """Eigenvalue of the paired-flips kernel on ([j-l, l]; [n-j-m, m]).

    (j^2 - 2l(j-l+1) + (n-j)^2 - 2m(n-j-m+1) - (n-j)) / n^2.  Unlike the
    independent-flips case both shapes matter, and negative values occur.
    """
    if not 0 <= j <= n:
        raise ValueError(f"need 0 <= j <= n, got j={j}, n={n}")
    if not 0 <= ell <= j // 2:
        raise ValueError(f"two-row shape needs 0 <= l <= j/2, got j={j}, l={ell}")
    if not 0 <= m <= (n - j) // 2:
        raise ValueError(f"two-row shape needs 0 <= m <= (n-j)/2, got j={j}, m={m}")
    num = (
        j * j
        - 2 * ell * (j - ell + 1)
        + (n - j) * (n - j)
        - 2 * m * (n - j - m + 1)
        - (n - j)
    )
    return Fraction(num, n * n)


# ---------------------------------------------------------------------------
# catalogs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class UnsignedIrrep:
    """Label of the two-row component [n-i, i]."""

    i: int

    def partition_label(self, n: int) -> str:
        if self.i == 0:
            return f"[{n}]"
        return f"[{n - self.i},{self.i}]"


@dataclass(frozen=True)
class SignedIrrep:
    """Label ([j-ell, ell]; [n-j-m, m]) of a signed component."""

    j: int
    ell: int
    m: int

    def partition_label(self, n: int) -> str:
        return f"({_two_row_str(self.j, self.ell)};{_two_row_str(n - self.j, self.m)})"


def _two_row_str(total: int, second: int) -> str:
    if total == 0:
        return "[]"
    if second == 0:
        return f"[{total}]"
    return f"[{total - second},{second}]"


@dataclass(frozen=True)
class IrrepEntry:
    """One component: its label, dimension, multiplicity, and eigenvalue."""

    label: UnsignedIrrep | SignedIrrep
    dim: int
    mult: int
    eigenvalue: Fraction

    @property
    def weight(self) -> int:
        return self.dim * self.mult


def unsigned_catalog(n: int, r: int, family: Family) -> list[IrrepEntry]:
    """All components [n-i, i], i = 0..r, with kernel eigenvalues.

    Every component has multiplicity 1; the dims sum to C(n,r).
    """
    if family not in (Family.CLASSICAL, Family.VARIANT):
        raise ValueError(f"unsigned catalog needs an unsigned family, got {family}")
    ModelSpec(family, n, r)  # parameter validation
    entries = []
    for i in range(r + 1):
        if family is Family.CLASSICAL:
            lam = eig_classical(n, r, i)
        else:
            lam = eig_variant(n, i)
        entries.append(
            IrrepEntry(label=UnsignedIrrep(i), dim=dim_two_row(n, i), mult=1, eigenvalue=lam)
        )
    return entries


def signed_catalog(n: int, r: int, family: Family) -> list[IrrepEntry]:
    """All components ([j-l, l]; [n-j-m, m]) with multiplicities and eigenvalues.

    For fixed (j, l, m) the multiplicity counts the admissible splits i
    (rack-1 balls carried by the first shape): i runs over
    max(l, r-(n-j)) .. min(r, j-l) subject to m <= min(r-i, (n-j)-(r-i)).
    Dimensions are C(n,j) * dim[j-l,l] * dim[n-j-m,m]; the weighted dims sum
    to 2^n * C(n,r).  Entries are ordered by (j, l, m).
    """
    if family not in (Family.INDEPENDENT_FLIPS, Family.PAIRED_FLIPS):
        raise ValueError(f"signed catalog needs a signed family, got {family}")
    ModelSpec(family, n, r)
    entries = []
    for j in range(n + 1):
        for ell in range(j // 2 + 1):
            ilo = max(ell, r - (n - j))
            ihi = min(r, j - ell)
            if ilo > ihi:
                continue
            mult_by_m: dict[int, int] = {}
            for i in range(ilo, ihi + 1):
                mmax = min(r - i, (n - j) - (r - i))
                for m in range(mmax + 1):
                    mult_by_m[m] = mult_by_m.get(m, 0) + 1
            for m in sorted(mult_by_m):
                if family is Family.INDEPENDENT_FLIPS:
                    lam = eig_independent(n, j, ell)
                else:
                    lam = eig_paired(n, j, ell, m)
                dim = binomial(n, j) * dim_two_row(j, ell) * dim_two_row(n - j, m)
                entries.append(
                    IrrepEntry(
                        label=SignedIrrep(j, ell, m),
                        dim=dim,
                        mult=mult_by_m[m],
                        eigenvalue=lam,
                    )
                )
    return entries


def catalog_entries(model: ModelSpec) -> list[IrrepEntry]:
    """Catalog for a model, dispatching on the family."""
    if model.family.signed:
        return signed_catalog(model.n, model.r, model.family)
    return unsigned_catalog(model.n, model.r, model.family)


def trivial_label(model: ModelSpec) -> UnsignedIrrep | SignedIrrep:
    """The label carrying the constant functions (eigenvalue 1)."""
    if model.family.signed:
        return SignedIrrep(model.n, 0, 0)
    return UnsignedIrrep(0)


def nontrivial_entries(model: ModelSpec, entries: list[IrrepEntry] | None = None) -> list[IrrepEntry]:
    """Catalog entries with the trivial component removed."""
    if entries is None:
        entries = catalog_entries(model)
    triv = trivial_label(model)
    return [e for e in entries if e.label != triv]


def total_weight(entries: list[IrrepEntry]) -> int:
    """Sum of dim * mult over the entries (should equal the space size)."""
    return sum(e.weight for e in entries)
