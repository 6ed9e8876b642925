"""Numerical invariants of the covering surface and the degree/BMY sanity gates."""

from __future__ import annotations

from dataclasses import dataclass

from .building import BuildingData, total_branch
from .groups import Character
from .picard import DivisorClass


class ParityError(ValueError):
    """An Euler-characteristic term L(L+K) came out odd: inconsistent base data."""


class NegativeIrregularityError(ValueError):
    """Derived q < 0: the input data cannot come from a smooth cover."""


@dataclass(frozen=True)
class InvariantSet:
    """Invariants of the covering surface for a rank-n exponent-2 cover."""

    n: int
    K2: int
    pg: int
    q: int
    chi: int
    two_K_class: DivisorClass
    contributions: tuple[tuple[Character, int], ...]  # chi -> h0(K_Y + L_chi), all characters

    @property
    def cover_degree(self) -> int:
        return 1 << self.n


def two_canonical_class(data: BuildingData) -> DivisorClass:
    """The class on the base whose pullback is 2K_X: 2K_Y plus the branch total."""
    return 2 * data.surface.canonical_class + total_branch(data)


def k_squared(data: BuildingData) -> int:
    """K_X^2 = 2^(n-2) * (2K_Y + B)^2."""
    two_K = two_canonical_class(data)
    square = two_K.intersect(two_K)
    if data.n == 1:
        # degree-2 cover: the prefactor 2^(n-2) is 1/2
        if square % 2:
            raise ParityError("(2K_Y + B)^2 odd for a double cover")
        return square // 2
    return (1 << (data.n - 2)) * square


def pg_contributions(data: BuildingData) -> tuple[tuple[Character, int], ...]:
    """h0(K_Y + L_chi) for every nontrivial character, in character order."""
    K = data.surface.canonical_class
    return tuple(
        (chi, data.surface.h0(K + data.bundle(chi))) for chi in data.characters()
    )


def geometric_genus(data: BuildingData) -> int:
    """p_g(X) = p_g(Y) + sum over nontrivial chi of h0(K_Y + L_chi)."""
    return data.surface.pg + sum(h for _, h in pg_contributions(data))


def euler_characteristic(data: BuildingData) -> int:
    """chi(O_X) = 2^n chi(O_Y) + sum over nontrivial chi of L_chi(L_chi + K_Y)/2."""
    K = data.surface.canonical_class
    total = (1 << data.n) * data.surface.chi
    for chi in data.characters():
        L = data.bundle(chi)
        term = L.intersect(L + K)
        if term % 2:
            raise ParityError(f"L(L+K) = {term} is odd at character {chi}")
        total += term // 2
    return total


def irregularity(data: BuildingData) -> int:
    """q = p_g + 1 - chi(O); negative values signal invalid input data."""
    q = geometric_genus(data) + 1 - euler_characteristic(data)
    if q < 0:
        raise NegativeIrregularityError(f"derived irregularity {q} is negative")
    return q


def compute_invariants(data: BuildingData) -> InvariantSet:
    contributions = pg_contributions(data)
    pg = data.surface.pg + sum(h for _, h in contributions)
    chi = euler_characteristic(data)
    q = pg + 1 - chi
    if q < 0:
        raise NegativeIrregularityError(f"derived irregularity {q} is negative")
    return InvariantSet(
        n=data.n,
        K2=k_squared(data),
        pg=pg,
        q=q,
        chi=chi,
        two_K_class=two_canonical_class(data),
        contributions=contributions,
    )


@dataclass(frozen=True, slots=True)
class BmyGateReport:
    """The chain d(pg - 2) <= K^2 <= 9 chi(O) for a degree-d canonical cover."""

    degree: int
    lower: int  # degree * (pg - 2)
    K2: int
    upper: int  # 9 * chi
    lower_margin: int
    upper_margin: int

    @property
    def passed(self) -> bool:
        return self.lower <= self.K2 <= self.upper


def bmy_gate(inv: InvariantSet) -> BmyGateReport:
    """Check degree*(pg-2) <= K^2 and K^2 <= 9*chi, reporting both margins."""
    degree = inv.cover_degree
    lower = degree * (inv.pg - 2)
    upper = 9 * inv.chi
    return BmyGateReport(
        degree=degree,
        lower=lower,
        K2=inv.K2,
        upper=upper,
        lower_margin=inv.K2 - lower,
        upper_margin=upper - inv.K2,
    )


@dataclass(frozen=True, slots=True)
class PositivityReport:
    two_K_class: DivisorClass
    verdict: str  # "minimal-general-type" or "neutral"
    reason: str

    @property
    def positive(self) -> bool:
        return self.verdict == "minimal-general-type"


def positivity_gate(data: BuildingData) -> PositivityReport:
    """Sufficient check for minimal + general type: 2K_X pulls back an ample class.

    On the presets a class with all coordinates positive is ample; anything
    else yields a neutral verdict, never a claim of non-minimality.
    """
    two_K = two_canonical_class(data)
    if data.surface.name not in ("p1xp1", "p2"):
        return PositivityReport(two_K, "neutral", "no ampleness rule for this surface")
    if all(c > 0 for c in two_K.coords):
        return PositivityReport(
            two_K,
            "minimal-general-type",
            f"2K pulls back the ample class {two_K}",
        )
    return PositivityReport(two_K, "neutral", f"{two_K} is not ample by the preset rule")
