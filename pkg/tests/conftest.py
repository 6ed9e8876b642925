"""Shared helpers: random valid building data and tiny independent oracles."""

from __future__ import annotations

import random

from abelcov.building import Assumptions, BuildingData, TrivialityFailure
from abelcov.groups import GroupElement
from abelcov.picard import DivisorClass, preset_p1xp1

# class pools keyed by coordinate parity, used to repair random assignments
_POOLS = {
    (0, 0): [(0, 0), (2, 0), (0, 2), (2, 2), (4, 0)],
    (1, 0): [(1, 0), (3, 0), (1, 2)],
    (0, 1): [(0, 1), (0, 3), (2, 1)],
    (1, 1): [(1, 1), (3, 1), (1, 3)],
}
_ALL_CLASSES = [c for pool in _POOLS.values() for c in pool]


def random_valid_data(rng: random.Random, n: int = 4) -> BuildingData:
    """Random building data on the quadric whose bundles always solve.

    Non-basis slots get arbitrary classes; the n basis slots then absorb the
    parity deficit of the one coordinate constraint each of them touches,
    which makes every character sum 2-divisible by construction.
    """
    surface = preset_p1xp1()
    basis = [1 << i for i in range(n)]
    others = [m for m in range(1, 1 << n) if m not in basis]
    while True:
        coords = {m: rng.choice(_ALL_CLASSES) for m in others}
        for bm in basis:
            pa = sum(coords[m][0] for m in others if m & bm) & 1
            pb = sum(coords[m][1] for m in others if m & bm) & 1
            coords[bm] = rng.choice(_POOLS[(pa, pb)])
        branch = {
            GroupElement(m, n): DivisorClass(surface, c)
            for m, c in coords.items()
            if c != (0, 0)
        }
        try:
            return BuildingData.from_branch(surface, n, branch, Assumptions(True, True, True))
        except TrivialityFailure:
            continue


def branch_as_set(data: BuildingData) -> frozenset[tuple[int, tuple[int, int]]]:
    """Hashable fingerprint of a branch assignment."""
    return frozenset((s.mask, d.coords) for s, d in data.nonzero_branch())


def xor_closure(masks: set[int]) -> set[int]:
    """Independent subgroup oracle: close a set of masks under XOR."""
    closed = {0} | set(masks)
    changed = True
    while changed:
        changed = False
        for a in list(closed):
            for b in list(closed):
                if a ^ b not in closed:
                    closed.add(a ^ b)
                    changed = True
    return closed
