"""Genus of fiber preimages under the cover, via Riemann-Hurwitz with order-2 inertia."""

from __future__ import annotations

from dataclasses import dataclass

from .building import BuildingData
from .canonical import quotient_cover
from .groups import GroupElement, Subgroup, span
from .picard import DivisorClass


@dataclass(frozen=True)
class FiberRestriction:
    """Restriction of the cover to a general member of a ruling |R|.

    Point counts are intersection numbers D_sigma . R, valid for a general
    fiber transverse to every branch component; that genericity is assumed,
    not verified.
    """

    ruling: DivisorClass
    counts: dict[GroupElement, int]  # sigma -> number of branch points on the fiber
    inertia_span: Subgroup  # subgroup generated by the branching sigma
    components: int  # connected components of the preimage
    genus: int  # genus of each component

    @property
    def branch_points(self) -> int:
        return sum(self.counts.values())


def _component_genus(order: int, total_points: int) -> int:
    if order == 1:
        if total_points:
            raise ValueError("branch points present but inertia span trivial")
        return 0
    euler = -2 * order + total_points * (order // 2)
    if euler % 2:
        raise ValueError(f"2g-2 = {euler} is odd: branch data inconsistent on this fiber")
    genus = (euler + 2) // 2
    if genus < 0:
        raise ValueError(f"computed genus {genus} < 0: fiber not general or data invalid")
    return genus


def fiber_genus(restriction: FiberRestriction) -> int:
    """Genus of each component of the fiber preimage.

    Each component is a connected cover of P1 with group the inertia span G0,
    every branch point carrying order-2 inertia, so
    2g - 2 = -2|G0| + (total branch points) * |G0|/2.
    """
    return _component_genus(restriction.inertia_span.order, restriction.branch_points)


def restrict_to_fiber(data: BuildingData, ruling: DivisorClass) -> FiberRestriction:
    """Branch points, inertia span, component count, and genus over a ruling fiber."""
    if ruling.surface is not data.surface:
        raise ValueError("ruling class lives on a different surface")
    if ruling.intersect(ruling) != 0:
        raise ValueError(f"{ruling} is not a ruling class: self-intersection nonzero")
    counts: dict[GroupElement, int] = {}
    for sigma, cls in data.nonzero_branch():
        points = cls.intersect(ruling)
        if points < 0:
            raise ValueError(f"negative point count {points} at {sigma}")
        if points:
            counts[sigma] = points
    inertia = span(list(counts), rank=data.n)
    return FiberRestriction(
        ruling=ruling,
        counts=counts,
        inertia_span=inertia,
        components=(1 << data.n) // inertia.order,
        genus=_component_genus(inertia.order, sum(counts.values())),
    )


@dataclass(frozen=True)
class ProbeResult:
    """Outcome of testing whether a double-cover quotient is a ruled product."""

    subgroup: Subgroup
    is_product: bool
    branch_class: DivisorClass
    ruling: DivisorClass | None
    branch_points: int | None
    curve_genus: int | None

    @property
    def verdict(self) -> str:
        if not self.is_product:
            return "not a ruling-branched product"
        return f"product: P1 x (genus-{self.curve_genus} curve)"


def elliptic_quotient_probe(data: BuildingData, H: Subgroup) -> ProbeResult:
    """Test whether X/H (a double cover) is P1 x C for a curve C.

    When the quotient's branch class is k times a single ruling, the quotient
    is the product of a line with the double cover of P1 branched at k points,
    a curve of genus k/2 - 1.
    """
    qc = quotient_cover(data, H)
    if qc.quotient_rank != 1:
        raise ValueError(f"probe needs an index-2 subgroup, got index {qc.quotient_order}")
    branch = qc.data.branch_class(GroupElement(1, 1))
    if data.surface.name != "p1xp1":
        return ProbeResult(H, False, branch, None, None, None)
    a, b = branch.coords
    if (a == 0) == (b == 0):  # zero or mixed class
        return ProbeResult(H, False, branch, None, None, None)
    ruling = data.surface.divisor(1, 0) if a else data.surface.divisor(0, 1)
    k = a or b
    if k % 2:
        raise ValueError(f"odd branch multiplicity {k}: invalid double-cover data")
    return ProbeResult(H, True, branch, ruling, k, k // 2 - 1)
