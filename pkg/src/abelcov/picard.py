"""Divisor classes on base surfaces with free Picard lattice, plus h0/effectivity oracles."""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

# Coordinates are exact Python ints; the bound is a sanity guard against
# runaway inputs, not an arithmetic limitation.
COORD_LIMIT = 10**6


class DivisibilityError(ValueError):
    """Raised when halving a class with an odd coordinate."""


def _int_det(matrix: Sequence[Sequence[int]]) -> int:
    """Determinant of a small integer matrix (exact, via Fractions)."""
    m = [[Fraction(x) for x in row] for row in matrix]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            return 0
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        det *= m[col][col]
        inv = m[col][col]
        for r in range(col + 1, n):
            factor = m[r][col] / inv
            for c in range(col, n):
                m[r][c] -= factor * m[col][c]
    assert det.denominator == 1
    return int(det)


class BaseSurface:
    """Base surface data: Picard rank, intersection form, K, (pg, q, chi), oracles.

    Two DivisorClass values are comparable only when they live on the same
    BaseSurface instance; the presets below are module-level singletons.
    """

    def __init__(
        self,
        name: str,
        intersection_matrix: Sequence[Sequence[int]],
        canonical_coords: Sequence[int],
        pg: int,
        q: int,
        h0: Callable[[tuple[int, ...]], int],
        is_effective: Callable[[tuple[int, ...]], bool],
        basis_labels: Sequence[str],
    ) -> None:
        self.name = name
        self.intersection_matrix = tuple(tuple(int(x) for x in row) for row in intersection_matrix)
        self.rank = len(self.intersection_matrix)
        if any(len(row) != self.rank for row in self.intersection_matrix):
            raise ValueError("intersection matrix must be square")
        if any(
            self.intersection_matrix[i][j] != self.intersection_matrix[j][i]
            for i in range(self.rank)
            for j in range(self.rank)
        ):
            raise ValueError("intersection matrix must be symmetric")
        if _int_det(self.intersection_matrix) == 0:
            raise ValueError("intersection matrix must be nondegenerate")
        if len(basis_labels) != self.rank:
            raise ValueError("one basis label per Picard generator required")
        self.basis_labels = tuple(basis_labels)
        self.pg = int(pg)
        self.q = int(q)
        self.chi = 1 - self.q + self.pg
        self._h0 = h0
        self._is_effective = is_effective
        self.canonical_class = DivisorClass(self, tuple(int(x) for x in canonical_coords))
        if h0(tuple([0] * self.rank)) != 1:
            raise ValueError("h0 oracle must give h0(0) = 1")

    def divisor(self, *coords: int) -> "DivisorClass":
        return DivisorClass(self, tuple(int(c) for c in coords))

    def zero(self) -> "DivisorClass":
        return DivisorClass(self, (0,) * self.rank)

    def h0(self, D: "DivisorClass") -> int:
        if D.surface is not self:
            raise ValueError("class lives on a different surface")
        value = self._h0(D.coords)
        if value < 0:
            raise ValueError(f"h0 oracle returned negative value {value}")
        return value

    def is_effective(self, D: "DivisorClass") -> bool:
        if D.surface is not self:
            raise ValueError("class lives on a different surface")
        return bool(self._is_effective(D.coords))

    def __repr__(self) -> str:
        return f"BaseSurface({self.name!r}, rank={self.rank})"


@dataclass(frozen=True, slots=True)
class DivisorClass:
    """Integer vector in the fixed Picard basis of a surface."""

    surface: BaseSurface
    coords: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.coords) != self.surface.rank:
            raise ValueError(
                f"expected {self.surface.rank} coordinates, got {len(self.coords)}"
            )
        for c in self.coords:
            if not isinstance(c, int):
                raise TypeError(f"coordinates must be ints, got {type(c).__name__}")
            if abs(c) > COORD_LIMIT:
                raise OverflowError(f"coordinate {c} exceeds bound {COORD_LIMIT}")

    def _same_surface(self, other: "DivisorClass") -> None:
        if self.surface is not other.surface:
            raise ValueError("classes live on different surfaces")

    def __add__(self, other: "DivisorClass") -> "DivisorClass":
        if not isinstance(other, DivisorClass):
            return NotImplemented
        self._same_surface(other)
        return DivisorClass(self.surface, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __sub__(self, other: "DivisorClass") -> "DivisorClass":
        if not isinstance(other, DivisorClass):
            return NotImplemented
        self._same_surface(other)
        return DivisorClass(self.surface, tuple(a - b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "DivisorClass":
        return DivisorClass(self.surface, tuple(-a for a in self.coords))

    def __mul__(self, k: int) -> "DivisorClass":
        if not isinstance(k, int):
            return NotImplemented
        return DivisorClass(self.surface, tuple(k * a for a in self.coords))

    __rmul__ = __mul__

    @property
    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    @property
    def is_effective(self) -> bool:
        return self.surface.is_effective(self)

    def intersect(self, other: "DivisorClass") -> int:
        self._same_surface(other)
        M = self.surface.intersection_matrix
        return sum(
            self.coords[i] * M[i][j] * other.coords[j]
            for i in range(len(self.coords))
            for j in range(len(self.coords))
        )

    def __str__(self) -> str:
        return format_class(self)


def intersect(a: DivisorClass, b: DivisorClass) -> int:
    """Intersection number a . b under the surface's symmetric form."""
    return a.intersect(b)


def h0(surface: BaseSurface, D: DivisorClass) -> int:
    """Dimension of global sections of D, via the surface's oracle."""
    return surface.h0(D)


def halve(D: DivisorClass) -> DivisorClass:
    """The class E with 2E = D; DivisibilityError if any coordinate is odd."""
    if any(c & 1 for c in D.coords):
        raise DivisibilityError(f"class {format_class(D)} is not 2-divisible")
    return DivisorClass(D.surface, tuple(c // 2 for c in D.coords))


# --- class string serialization: "3F+3G", "2F", "-F+G", "0" ---

_TERM_RE = re.compile(r"([+-]?)(\d*)([A-Za-z]+)")


def format_class(D: DivisorClass) -> str:
    parts = []
    for c, label in zip(D.coords, D.surface.basis_labels):
        if c == 0:
            continue
        sign = "-" if c < 0 else ("+" if parts else "")
        mag = abs(c)
        parts.append(f"{sign}{'' if mag == 1 else mag}{label}")
    return "".join(parts) if parts else "0"


def parse_class(surface: BaseSurface, text: str) -> DivisorClass:
    """Parse a class string like "2F", "3F+3G", "0" on the given surface."""
    s = text.replace(" ", "")
    if not s:
        raise ValueError("empty class string")
    if s in ("0", "+0", "-0"):
        return surface.zero()
    coords = [0] * surface.rank
    pos = 0
    while pos < len(s):
        m = _TERM_RE.match(s, pos)
        if not m or m.start() != pos:
            raise ValueError(f"bad class string {text!r} at position {pos}")
        sign, mag, label = m.groups()
        if label not in surface.basis_labels:
            raise ValueError(
                f"unknown generator {label!r} in {text!r}; surface has {surface.basis_labels}"
            )
        value = int(mag) if mag else 1
        if sign == "-":
            value = -value
        coords[surface.basis_labels.index(label)] += value
        pos = m.end()
    return DivisorClass(surface, tuple(coords))


# --- presets ---


def _h0_quadric(coords: tuple[int, ...]) -> int:
    a, b = coords
    return (a + 1) * (b + 1) if a >= 0 and b >= 0 else 0


def _h0_plane(coords: tuple[int, ...]) -> int:
    (d,) = coords
    return (d + 1) * (d + 2) // 2 if d >= 0 else 0


def _effective_nonneg(coords: tuple[int, ...]) -> bool:
    return all(c >= 0 for c in coords)


_P1XP1 = BaseSurface(
    name="p1xp1",
    intersection_matrix=((0, 1), (1, 0)),
    canonical_coords=(-2, -2),
    pg=0,
    q=0,
    h0=_h0_quadric,
    is_effective=_effective_nonneg,
    basis_labels=("F", "G"),
)

_P2 = BaseSurface(
    name="p2",
    intersection_matrix=((1,),),
    canonical_coords=(-3,),
    pg=0,
    q=0,
    h0=_h0_plane,
    is_effective=_effective_nonneg,
    basis_labels=("H",),
)


def preset_p1xp1() -> BaseSurface:
    """The quadric P1 x P1: rank 2, F.G = 1, F^2 = G^2 = 0, K = -2F-2G."""
    return _P1XP1


def preset_p2() -> BaseSurface:
    """The projective plane: rank 1, H^2 = 1, K = -3H."""
    return _P2


def preset(name: str) -> BaseSurface:
    if name == "p1xp1":
        return _P1XP1
    if name == "p2":
        return _P2
    raise ValueError(f"unknown surface preset {name!r} (available: p1xp1, p2)")
