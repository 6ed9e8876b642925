"""Exact F2 linear algebra for Z_2^n: elements, characters, subgroups, annihilators."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

MAX_RANK = 16


def _check_rank(n: int) -> None:
    if not 1 <= n <= MAX_RANK:
        raise ValueError(f"group rank must be in 1..{MAX_RANK}, got {n}")


def _mask_from_bits(bits: str | Sequence[int], n: int | None = None) -> tuple[int, int]:
    """Return (mask, rank). First coordinate is the most significant bit."""
    if isinstance(bits, str):
        if not bits or any(c not in "01" for c in bits):
            raise ValueError(f"bad bit string {bits!r}")
        rank = len(bits)
        mask = int(bits, 2)
    else:
        vals = list(bits)
        if any(v not in (0, 1) for v in vals):
            raise ValueError(f"bit vector entries must be 0 or 1, got {vals}")
        rank = len(vals)
        mask = 0
        for v in vals:
            mask = (mask << 1) | v
    if n is not None and n != rank:
        raise ValueError(f"expected rank {n}, got bit string of length {rank}")
    _check_rank(rank)
    return mask, rank


@dataclass(frozen=True, slots=True)
class GroupElement:
    """Element of Z_2^n, stored as a bit mask (first coordinate = top bit)."""

    mask: int
    n: int

    def __post_init__(self) -> None:
        _check_rank(self.n)
        if not 0 <= self.mask < (1 << self.n):
            raise ValueError(f"mask {self.mask} out of range for rank {self.n}")

    @classmethod
    def from_bits(cls, bits: str | Sequence[int], n: int | None = None) -> "GroupElement":
        mask, rank = _mask_from_bits(bits, n)
        return cls(mask, rank)

    @classmethod
    def zero(cls, n: int) -> "GroupElement":
        return cls(0, n)

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.mask >> (self.n - 1 - i)) & 1 for i in range(self.n))

    @property
    def is_zero(self) -> bool:
        return self.mask == 0

    def __add__(self, other: "GroupElement") -> "GroupElement":
        if not isinstance(other, GroupElement):
            return NotImplemented
        if other.n != self.n:
            raise ValueError(f"rank mismatch: {self.n} vs {other.n}")
        return GroupElement(self.mask ^ other.mask, self.n)

    def __str__(self) -> str:
        return format(self.mask, f"0{self.n}b")


@dataclass(frozen=True, slots=True)
class Character:
    """Character of Z_2^n with values in {+1, -1}; same bit layout as GroupElement."""

    mask: int
    n: int

    def __post_init__(self) -> None:
        _check_rank(self.n)
        if not 0 <= self.mask < (1 << self.n):
            raise ValueError(f"mask {self.mask} out of range for rank {self.n}")

    @classmethod
    def from_bits(cls, bits: str | Sequence[int], n: int | None = None) -> "Character":
        mask, rank = _mask_from_bits(bits, n)
        return cls(mask, rank)

    @classmethod
    def trivial(cls, n: int) -> "Character":
        return cls(0, n)

    @property
    def bits(self) -> tuple[int, ...]:
        return tuple((self.mask >> (self.n - 1 - i)) & 1 for i in range(self.n))

    @property
    def is_trivial(self) -> bool:
        return self.mask == 0

    def __mul__(self, other: "Character") -> "Character":
        if not isinstance(other, Character):
            return NotImplemented
        if other.n != self.n:
            raise ValueError(f"rank mismatch: {self.n} vs {other.n}")
        return Character(self.mask ^ other.mask, self.n)

    def __call__(self, sigma: GroupElement) -> int:
        return char_eval(self, sigma)

    def __str__(self) -> str:
        return format(self.mask, f"0{self.n}b")


def char_eval(chi: Character, sigma: GroupElement) -> int:
    """Evaluate chi(sigma) = (-1)^<chi, sigma>, returning +1 or -1."""
    if not isinstance(chi, Character) or not isinstance(sigma, GroupElement):
        raise TypeError("char_eval takes (Character, GroupElement) in that order")
    if chi.n != sigma.n:
        raise ValueError(f"rank mismatch: {chi.n} vs {sigma.n}")
    return -1 if (chi.mask & sigma.mask).bit_count() & 1 else 1


def all_elements(n: int) -> list[GroupElement]:
    _check_rank(n)
    return [GroupElement(m, n) for m in range(1 << n)]


def all_characters(n: int) -> list[Character]:
    _check_rank(n)
    return [Character(m, n) for m in range(1 << n)]


def nontrivial_characters(n: int) -> list[Character]:
    _check_rank(n)
    return [Character(m, n) for m in range(1, 1 << n)]


# --- F2 row reduction on int bitmasks (top bit = first coordinate) ---


def _rref(masks: Iterable[int]) -> tuple[int, ...]:
    """Reduced row echelon basis, rows sorted by descending pivot bit."""
    basis: list[int] = []  # kept sorted by descending leading bit
    for v in masks:
        for r in basis:
            if v & (1 << (r.bit_length() - 1)):
                v ^= r
        if v:
            basis.append(v)
            basis.sort(key=int.bit_length, reverse=True)
    # clear pivot columns above each pivot
    for i, r in enumerate(basis):
        p = 1 << (r.bit_length() - 1)
        for j in range(len(basis)):
            if j != i and basis[j] & p:
                basis[j] ^= r
    return tuple(basis)


def _reduce_by(basis: Sequence[int], v: int) -> int:
    for r in basis:
        if v & (1 << (r.bit_length() - 1)):
            v ^= r
    return v


def _kernel_basis(rows: Sequence[int], n: int) -> tuple[int, ...]:
    """Basis of {x : <x, r> = 0 for every r in rows}, via the RREF of rows."""
    rref = _rref(rows)
    pivot_bits = {r.bit_length() - 1 for r in rref}
    out = []
    for fb in range(n - 1, -1, -1):
        if fb in pivot_bits:
            continue
        x = 1 << fb
        for r in rref:
            if (r & x).bit_count() & 1:
                x |= 1 << (r.bit_length() - 1)
        out.append(x)
    return _rref(out)


@dataclass(frozen=True, slots=True)
class Subgroup:
    """Subgroup of Z_2^n in canonical form: reduced row-echelon basis of bit masks.

    The same representation serves subgroups of the character group; members
    are exposed as GroupElements via elements() and as Characters via
    characters().
    """

    n: int
    basis: tuple[int, ...]
    generators: tuple[int, ...] = ()

    @property
    def order(self) -> int:
        return 1 << len(self.basis)

    @property
    def rank(self) -> int:
        return len(self.basis)

    def is_trivial(self) -> bool:
        return not self.basis

    def is_full(self) -> bool:
        return len(self.basis) == self.n

    def contains_mask(self, mask: int) -> bool:
        return _reduce_by(self.basis, mask) == 0

    def __contains__(self, item: GroupElement | Character) -> bool:
        if item.n != self.n:
            raise ValueError(f"rank mismatch: {self.n} vs {item.n}")
        return self.contains_mask(item.mask)

    def member_masks(self) -> list[int]:
        """All member masks in ascending order."""
        members = [0]
        for b in self.basis:
            members += [m ^ b for m in members]
        return sorted(members)

    def elements(self) -> list[GroupElement]:
        return [GroupElement(m, self.n) for m in self.member_masks()]

    def characters(self) -> list[Character]:
        return [Character(m, self.n) for m in self.member_masks()]

    def reduce_mask(self, mask: int) -> int:
        """Canonical coset representative of mask modulo this subgroup."""
        return _reduce_by(self.basis, mask)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Subgroup):
            return NotImplemented
        return self.n == other.n and self.basis == other.basis

    def __hash__(self) -> int:
        return hash((self.n, self.basis))

    def __str__(self) -> str:
        gens = ", ".join(format(b, f"0{self.n}b") for b in self.basis) or "0"
        return f"<{gens}>"


def span(gens: Sequence[GroupElement | Character], rank: int | None = None) -> Subgroup:
    """Subgroup spanned by gens; rank is required when gens is empty."""
    if gens:
        n = gens[0].n
        if rank is not None and rank != n:
            raise ValueError(f"rank mismatch: {rank} vs {n}")
        if any(g.n != n for g in gens):
            raise ValueError("generators have mixed ranks")
    else:
        if rank is None:
            raise ValueError("empty generator list needs an explicit rank")
        n = rank
    _check_rank(n)
    masks = tuple(g.mask for g in gens)
    return Subgroup(n, _rref(masks), masks)


def full_group(n: int) -> Subgroup:
    _check_rank(n)
    return Subgroup(n, tuple(1 << i for i in range(n - 1, -1, -1)))


def annihilator(H: Subgroup) -> Subgroup:
    """All characters trivial on H; |H| * |annihilator(H)| = 2^n."""
    return Subgroup(H.n, _kernel_basis(H.basis, H.n))


def coset_image(sigma: GroupElement, H: Subgroup) -> GroupElement:
    """Canonical representative of sigma modulo H."""
    if sigma.n != H.n:
        raise ValueError(f"rank mismatch: {sigma.n} vs {H.n}")
    return GroupElement(H.reduce_mask(sigma.mask), H.n)
