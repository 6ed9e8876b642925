"""Character-theoretic canonical-map analysis: contributing characters, the
trivially-acting subgroup, the quotient cover it defines, and the degree report."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .building import BuildingData, BundleSolveError
from .groups import Character, GroupElement, Subgroup, annihilator, span
from .picard import BaseSurface, DivisorClass


class DegenerateCanonicalError(ValueError):
    """The canonical system is too small to define a map onto a surface."""


def contributing_characters(data: BuildingData) -> dict[Character, int]:
    """Nontrivial characters chi with h0(K_Y + L_chi) > 0, with those dimensions."""
    K = data.surface.canonical_class
    out: dict[Character, int] = {}
    for chi in data.characters():
        h = data.surface.h0(K + data.bundle(chi))
        if h > 0:
            out[chi] = h
    return out


def trivially_acting_subgroup(data: BuildingData) -> Subgroup:
    """Largest subgroup acting as the identity on canonical sections.

    This is the intersection of the kernels of the contributing characters;
    when only the trivial character contributes (through p_g of the base) it
    is the whole group.
    """
    contributing = contributing_characters(data)
    if not contributing:
        if data.surface.pg > 0:
            return annihilator(span([], rank=data.n))
        raise DegenerateCanonicalError("no characters contribute canonical sections")
    return annihilator(span(list(contributing), rank=data.n))


def double_cover_node_count(components: Sequence[DivisorClass]) -> int:
    """Nodes of a double cover branched on pairwise-transverse smooth components:
    one node over each intersection point of two distinct components."""
    total = 0
    for i in range(len(components)):
        for j in range(i + 1, len(components)):
            total += components[i].intersect(components[j])
    return total


@dataclass(frozen=True)
class QuotientCover:
    """The cover X/H -> Y induced by a subgroup H of the Galois group.

    Branch classes of sigma outside H group by coset into the quotient branch
    divisor; classes of sigma inside H are absorbed (the map X -> X/H
    ramifies over them, the quotient cover does not).
    """

    subgroup: Subgroup
    quotient_rank: int
    quotient_chars: tuple[Character, ...]  # original characters indexing the quotient axes
    grouped_branch: dict[GroupElement, DivisorClass]  # quotient element -> class
    data: BuildingData  # building data of the quotient cover on the same base
    components: tuple[DivisorClass, ...]  # individual branch components entering the quotient
    absorbed: tuple[tuple[GroupElement, DivisorClass], ...]
    node_count: int | None  # pairwise-intersection nodes, double covers only

    @property
    def quotient_order(self) -> int:
        return 1 << self.quotient_rank


def _coset_coordinates(H_perp: Subgroup, sigma_mask: int, m: int) -> int:
    """Coordinates of a coset in G/H, read off by pairing against a basis of H-perp."""
    out = 0
    for i, psi in enumerate(H_perp.basis):
        if (psi & sigma_mask).bit_count() & 1:
            out |= 1 << (m - 1 - i)
    return out


def quotient_cover(data: BuildingData, H: Subgroup) -> QuotientCover:
    """Group the branch data of X -> Y by cosets of H into building data of X/H -> Y.

    H must be a proper nontrivial subgroup. Branch classes carried by elements
    of H do not descend to the quotient branch divisor; they are returned in
    `absorbed`.
    """
    if H.n != data.n:
        raise ValueError(f"rank mismatch: {H.n} vs {data.n}")
    if H.is_trivial() or H.is_full():
        raise ValueError("quotient needs a proper nontrivial subgroup")

    m = data.n - H.rank
    H_perp = annihilator(H)
    quotient_chars = tuple(Character(psi, data.n) for psi in H_perp.basis)

    grouped: dict[GroupElement, DivisorClass] = {}
    components: list[DivisorClass] = []
    absorbed: list[tuple[GroupElement, DivisorClass]] = []
    for sigma, cls in data.nonzero_branch():
        if H.contains_mask(sigma.mask):
            absorbed.append((sigma, cls))
            continue
        image = GroupElement(_coset_coordinates(H_perp, sigma.mask, m), m)
        grouped[image] = grouped.get(image, data.surface.zero()) + cls
        components.append(cls)

    quotient_data = BuildingData.from_branch(
        data.surface,
        m,
        grouped,
        data.assumptions,
    )
    node_count = double_cover_node_count(components) if m == 1 else None

    return QuotientCover(
        subgroup=H,
        quotient_rank=m,
        quotient_chars=quotient_chars,
        grouped_branch=dict(sorted(grouped.items(), key=lambda kv: kv[0].mask)),
        data=quotient_data,
        components=tuple(components),
        absorbed=tuple(absorbed),
        node_count=node_count,
    )


@dataclass(frozen=True)
class CanonicalReport:
    """Everything the character theory says about the canonical map."""

    contributing: tuple[tuple[Character, int], ...]
    pg: int
    H: Subgroup
    H_perp: Subgroup
    quotient: QuotientCover | None
    canonical_degree: int | None  # None means undetermined
    base_map_degree: int | None
    base_system: DivisorClass | None  # K_Y + L_chi0 in the single-character case
    image_dimension: int | None  # dimension of the target projective space
    image_self_intersection: int | None
    base_point_free: str  # "pattern-justified" or "unverified"
    notes: tuple[str, ...]

    @property
    def single_character(self) -> bool:
        return len(self.contributing) == 1


def _base_map_degree(surface: BaseSurface, system: DivisorClass) -> int | None:
    """Degree of the map of the base given by |system|, by preset table; None if unknown.

    On the quadric, |aF+bG| with a,b >= 1 separates points (degree 1); on the
    plane, |dH| with d >= 1 does. Anything else is not claimed.
    """
    if surface.name == "p1xp1":
        a, b = system.coords
        if a >= 1 and b >= 1:
            return 1
        return None
    if surface.name == "p2":
        (d,) = system.coords
        if d >= 1:
            return 1
        return None
    return None


def canonical_degree_report(data: BuildingData) -> CanonicalReport:
    """Analyze the canonical map: factorization through X/H and, when a single
    character carries all sections, the degree and image of the map.

    Raises DegenerateCanonicalError when p_g(X) <= 2 (the image cannot be a
    surface in the intended sense).
    """
    contributing = contributing_characters(data)
    pg = data.surface.pg + sum(contributing.values())
    if pg <= 2:
        raise DegenerateCanonicalError(f"p_g = {pg} <= 2: degenerate canonical map")

    H = trivially_acting_subgroup(data)
    H_perp = annihilator(H)
    quotient = None
    quotient_note = None
    if not H.is_trivial() and not H.is_full():
        try:
            quotient = quotient_cover(data, H)
        except BundleSolveError as exc:
            # inconsistent input data; the rest of the report is still useful
            quotient_note = f"quotient by H not constructible: {exc}"

    notes: list[str] = []
    if quotient_note:
        notes.append(quotient_note)
    degree = base_degree = None
    system = image_dim = image_sq = None
    bpf = "unverified"

    if len(contributing) == 1 and data.surface.pg == 0:
        (chi0, h), = contributing.items()
        system = data.surface.canonical_class + data.bundle(chi0)
        image_dim = h - 1
        image_sq = system.intersect(system)
        base_degree = _base_map_degree(data.surface, system)
        if base_degree is None:
            notes.append(f"no degree rule for the base system {system}; degree undetermined")
        else:
            degree = (1 << data.n) * base_degree
            if (
                quotient is not None
                and quotient.quotient_rank == 1
                and data.assumptions.all_declared()
            ):
                bpf = "pattern-justified"
                notes.append(
                    "canonical system is the pullback of a base-point-free system "
                    "through a quotient double cover ramified only over nodes"
                )
            else:
                notes.append(
                    "base-point-freeness not established: the quotient is not a "
                    "double cover or genericity assumptions are undeclared"
                )
    else:
        notes.append(
            "multiple characters contribute canonical sections; the degree is "
            "undetermined, the map still factors through the quotient by H"
            if len(contributing) > 1
            else "the base surface itself carries canonical sections; degree undetermined"
        )

    return CanonicalReport(
        contributing=tuple(sorted(contributing.items(), key=lambda kv: kv[0].mask)),
        pg=pg,
        H=H,
        H_perp=H_perp,
        quotient=quotient,
        canonical_degree=degree,
        base_map_degree=base_degree,
        base_system=system,
        image_dimension=image_dim,
        image_self_intersection=image_sq,
        base_point_free=bpf,
        notes=tuple(notes),
    )
