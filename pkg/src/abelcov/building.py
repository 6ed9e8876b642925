"""Building data of Z_2^n-covers: the character relations 2L_chi = sum of branch classes."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .groups import Character, GroupElement, char_eval, nontrivial_characters
from .picard import BaseSurface, DivisibilityError, DivisorClass, halve


class BundleSolveError(ValueError):
    """Base for failures when solving line bundles from a branch assignment."""

    def __init__(self, message: str, characters: Sequence[Character]):
        super().__init__(message)
        self.characters = tuple(characters)


class DivisibilityFailure(BundleSolveError):
    """Some character sums are not 2-divisible: no cover has this branch assignment."""


class TrivialityFailure(BundleSolveError):
    """Some solved bundles are the trivial class, which the cover construction forbids."""


@dataclass(frozen=True, slots=True)
class Assumptions:
    """Geometric genericity flags declared by the user, never decided here."""

    components_smooth: bool = False
    pairwise_distinct: bool = False
    normal_crossings: bool = False

    def all_declared(self) -> bool:
        return self.components_smooth and self.pairwise_distinct and self.normal_crossings


@dataclass(frozen=True)
class BuildingData:
    """Branch classes D_sigma and bundle classes L_chi of a Z_2^n-cover of a surface.

    Invalid configurations are representable; validate() reports violations
    instead of raising.
    """

    surface: BaseSurface
    n: int
    branch: Mapping[GroupElement, DivisorClass]
    bundles: Mapping[Character, DivisorClass]
    assumptions: Assumptions = field(default_factory=Assumptions)

    def __post_init__(self) -> None:
        clean: dict[GroupElement, DivisorClass] = {}
        for sigma in sorted(self.branch, key=lambda s: s.mask):
            cls = self.branch[sigma]
            if sigma.n != self.n:
                raise ValueError(f"branch key {sigma} has rank {sigma.n}, expected {self.n}")
            if sigma.is_zero:
                raise ValueError("the zero group element cannot carry a branch class")
            if cls.surface is not self.surface:
                raise ValueError(f"branch class for {sigma} lives on a different surface")
            if not cls.is_zero:
                clean[sigma] = cls
        object.__setattr__(self, "branch", clean)

        expected = {chi.mask for chi in nontrivial_characters(self.n)}
        got = {}
        for chi in sorted(self.bundles, key=lambda c: c.mask):
            cls = self.bundles[chi]
            if chi.n != self.n:
                raise ValueError(f"bundle key {chi} has rank {chi.n}, expected {self.n}")
            if chi.is_trivial:
                raise ValueError("the trivial character carries no bundle")
            if cls.surface is not self.surface:
                raise ValueError(f"bundle class for {chi} lives on a different surface")
            got[chi] = cls
        if {chi.mask for chi in got} != expected:
            raise ValueError(
                f"bundle map must cover all {len(expected)} nontrivial characters"
            )
        object.__setattr__(self, "bundles", got)

    @classmethod
    def from_branch(
        cls,
        surface: BaseSurface,
        n: int,
        branch: Mapping[GroupElement, DivisorClass],
        assumptions: Assumptions | None = None,
    ) -> "BuildingData":
        """Build data from a branch assignment, solving all bundles by halving."""
        bundles = solve_bundles(surface, n, branch)
        return cls(surface, n, dict(branch), bundles, assumptions or Assumptions())

    def branch_class(self, sigma: GroupElement) -> DivisorClass:
        if sigma.n != self.n:
            raise ValueError(f"rank mismatch: {sigma.n} vs {self.n}")
        return self.branch.get(sigma, self.surface.zero())

    def bundle(self, chi: Character) -> DivisorClass:
        return self.bundles[chi]

    def nonzero_branch(self) -> list[tuple[GroupElement, DivisorClass]]:
        return [(sigma, self.branch[sigma]) for sigma in sorted(self.branch, key=lambda s: s.mask)]

    def characters(self) -> list[Character]:
        return nontrivial_characters(self.n)


def _sum_for_character(
    surface: BaseSurface,
    branch: Mapping[GroupElement, DivisorClass],
    chi: Character,
) -> DivisorClass:
    total = surface.zero()
    for sigma in sorted(branch, key=lambda s: s.mask):
        if char_eval(chi, sigma) == -1:
            total = total + branch[sigma]
    return total


def branch_sum(data: BuildingData, chi: Character) -> DivisorClass:
    """Sum of the branch classes D_sigma over sigma with chi(sigma) = -1."""
    if chi.is_trivial:
        raise ValueError("branch_sum needs a nontrivial character")
    if chi.n != data.n:
        raise ValueError(f"rank mismatch: {chi.n} vs {data.n}")
    return _sum_for_character(data.surface, data.branch, chi)


def total_branch(data: BuildingData) -> DivisorClass:
    """The class of the full branch divisor, the sum of all D_sigma."""
    total = data.surface.zero()
    for _, cls in data.nonzero_branch():
        total = total + cls
    return total


def solve_bundles(
    surface: BaseSurface,
    n: int,
    branch: Mapping[GroupElement, DivisorClass],
) -> dict[Character, DivisorClass]:
    """Solve L_chi = (sum of D_sigma over chi(sigma) = -1) / 2 for every nontrivial chi.

    Raises DivisibilityFailure listing every character whose sum is not
    2-divisible, or TrivialityFailure listing characters whose solved bundle
    is the zero class.
    """
    solved: dict[Character, DivisorClass] = {}
    odd: list[Character] = []
    trivial: list[Character] = []
    for chi in nontrivial_characters(n):
        total = _sum_for_character(surface, branch, chi)
        try:
            bundle = halve(total)
        except DivisibilityError:
            odd.append(chi)
            continue
        if bundle.is_zero:
            trivial.append(chi)
        solved[chi] = bundle
    if odd:
        raise DivisibilityFailure(
            f"branch sums not 2-divisible at characters: {', '.join(map(str, odd))}", odd
        )
    if trivial:
        raise TrivialityFailure(
            f"solved bundles are trivial at characters: {', '.join(map(str, trivial))}", trivial
        )
    return solved


@dataclass(frozen=True, slots=True)
class RelationCheck:
    chi: Character
    doubled_bundle: DivisorClass
    branch_total: DivisorClass

    @property
    def ok(self) -> bool:
        return self.doubled_bundle == self.branch_total


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of checking building data: relations, effectivity, triviality, assumptions."""

    relations: tuple[RelationCheck, ...]
    effectivity_violations: tuple[tuple[GroupElement, DivisorClass], ...]
    triviality_violations: tuple[Character, ...]
    duplicate_classes: tuple[tuple[GroupElement, GroupElement], ...]
    forced_shared_components: tuple[tuple[GroupElement, GroupElement, int], ...]
    assumptions: Assumptions

    @property
    def failed_relations(self) -> tuple[RelationCheck, ...]:
        return tuple(r for r in self.relations if not r.ok)

    @property
    def passed(self) -> bool:
        return (
            not self.failed_relations
            and not self.effectivity_violations
            and not self.triviality_violations
        )


def validate(data: BuildingData) -> ValidationReport:
    """Check every character relation 2L_chi = branch_sum(chi) by exact lattice equality.

    Effectivity of each branch class and nontriviality of each bundle are
    checked as well. Geometric smoothness is never decided: the declared
    assumption flags are echoed, and class pairs that cannot meet
    transversally (negative pairwise intersection) are reported as
    informational notes, as are repeated nonzero classes whose distinctness
    must be arranged by the choice of members.
    """
    relations = tuple(
        RelationCheck(chi, 2 * data.bundle(chi), branch_sum(data, chi))
        for chi in data.characters()
    )
    effectivity = tuple(
        (sigma, cls) for sigma, cls in data.nonzero_branch() if not cls.is_effective
    )
    triviality = tuple(chi for chi in data.characters() if data.bundle(chi).is_zero)

    nonzero = data.nonzero_branch()
    duplicates = []
    forced = []
    for i in range(len(nonzero)):
        for j in range(i + 1, len(nonzero)):
            si, ci = nonzero[i]
            sj, cj = nonzero[j]
            if ci == cj:
                duplicates.append((si, sj))
            pairing = ci.intersect(cj)
            if pairing < 0:
                forced.append((si, sj, pairing))

    return ValidationReport(
        relations=relations,
        effectivity_violations=effectivity,
        triviality_violations=triviality,
        duplicate_classes=tuple(duplicates),
        forced_shared_components=tuple(forced),
        assumptions=data.assumptions,
    )
