"""Bundled worked example: a rank-4 cover of the quadric with canonical degree 16."""

from __future__ import annotations

from .building import Assumptions, BuildingData
from .groups import GroupElement
from .picard import parse_class, preset_p1xp1

# Branch assignment of the degree-16 cover of P1 x P1 with K^2 = 32, p_g = 4,
# q = 1. Three fibers in |2F|, one curve in |2G|, four fibers in |G|; all
# other group elements carry no branch divisor.
DEGREE16_BRANCH: dict[str, str] = {
    "1000": "2F",
    "0101": "2F",
    "0100": "2F",
    "1001": "2G",
    "1011": "G",
    "1010": "G",
    "0111": "G",
    "0110": "G",
}


def degree16_cover() -> BuildingData:
    """Building data of the degree-16 example, bundles solved from the branch map."""
    surface = preset_p1xp1()
    branch = {
        GroupElement.from_bits(bits): parse_class(surface, cls)
        for bits, cls in DEGREE16_BRANCH.items()
    }
    return BuildingData.from_branch(
        surface,
        4,
        branch,
        Assumptions(components_smooth=True, pairwise_distinct=True, normal_crossings=True),
    )
