"""Exhaustive enumeration of branch assignments on the quadric, with parity and
total-class pruning, orbit reduction by canonical form, and deterministic
work partitioning for parallel runs."""

from __future__ import annotations

import sys
from dataclasses import dataclass
from functools import lru_cache
from multiprocessing import Pool
from typing import Iterable, Mapping, Sequence

from .building import BuildingData, BundleSolveError, solve_bundles, validate
from .canonical import (
    CanonicalReport,
    DegenerateCanonicalError,
    canonical_degree_report,
    contributing_characters,
)
from .groups import GroupElement, _rref
from .invariants import InvariantSet, compute_invariants
from .picard import DivisorClass, parse_class, preset_p1xp1

DEFAULT_NODE_BUDGET = 10**9
_MAX_SYMMETRY_RANK = 4  # |GL(5, F2)| is already ~10^7 transforms
_PACK = 10  # bit width for packing (a, b) totals in the reachability sets


class BudgetError(RuntimeError):
    """Base for search refusals: the run would exceed the node budget."""


class SpecTooLargeError(BudgetError):
    """Upfront refusal: the estimated node count exceeds the budget."""


class BudgetExceededError(BudgetError):
    """Runtime abort: visited partial states exceeded the budget."""


def _as_bound(value) -> tuple[int, int] | None:
    if value is None:
        return None
    if isinstance(value, int):
        return (value, value)
    lo, hi = value
    if lo > hi:
        raise ValueError(f"empty target range {value}")
    return (int(lo), int(hi))


def _in_bound(value: int, bound: tuple[int, int] | None) -> bool:
    return bound is None or bound[0] <= value <= bound[1]


@dataclass(frozen=True)
class SearchSpec:
    """Normalized description of a search over branch assignments on P1 x P1.

    `allowed[mask - 1]` is the tuple of coordinate pairs available to the
    group element with that mask. Targets are inclusive (lo, hi) ranges.
    """

    rank: int
    allowed: tuple[tuple[tuple[int, int], ...], ...]
    k2: tuple[int, int] | None = None
    pg: tuple[int, int] | None = None
    q: tuple[int, int] | None = None
    chi: tuple[int, int] | None = None
    single_contributing: bool = False
    canonical_degree: int | None = None
    symmetry_reduction: bool = True
    node_budget: int = DEFAULT_NODE_BUDGET

    @classmethod
    def build(
        cls,
        rank: int,
        classes: Sequence[DivisorClass | str | tuple[int, int]],
        per_sigma: Mapping[GroupElement | str, Sequence[DivisorClass | str | tuple[int, int]]] | None = None,
        k2=None,
        pg=None,
        q=None,
        chi=None,
        single_contributing: bool = False,
        canonical_degree: int | None = None,
        symmetry_reduction: bool = True,
        node_budget: int = DEFAULT_NODE_BUDGET,
    ) -> "SearchSpec":
        if not 1 <= rank <= 16:
            raise ValueError(f"rank must be in 1..16, got {rank}")
        base = _normalize_classes(classes)
        allowed = [base] * ((1 << rank) - 1)
        if per_sigma:
            for key, cls_list in per_sigma.items():
                sigma = key if isinstance(key, GroupElement) else GroupElement.from_bits(key, rank)
                if sigma.n != rank or sigma.is_zero:
                    raise ValueError(f"bad per-sigma key {key!r}")
                allowed[sigma.mask - 1] = _normalize_classes(cls_list)
            if symmetry_reduction:
                raise ValueError(
                    "orbit reduction needs the same class list at every group element; "
                    "disable symmetry_reduction to use per-sigma overrides"
                )
        if symmetry_reduction and rank > _MAX_SYMMETRY_RANK:
            raise SpecTooLargeError(
                f"orbit reduction enumerates GL({rank}, F2); supported only for rank "
                f"<= {_MAX_SYMMETRY_RANK}. Disable symmetry_reduction."
            )
        k2b, pgb, qb, chib = map(_as_bound, (k2, pg, q, chi))
        exact = lambda b: b is not None and b[0] == b[1]
        if exact(pgb) and exact(qb) and exact(chib):
            if chib[0] != 1 - qb[0] + pgb[0]:
                raise ValueError(
                    f"inconsistent targets: chi={chib[0]} but 1 - q + pg = {1 - qb[0] + pgb[0]}"
                )
        return cls(
            rank=rank,
            allowed=tuple(allowed),
            k2=k2b,
            pg=pgb,
            q=qb,
            chi=chib,
            single_contributing=single_contributing,
            canonical_degree=canonical_degree,
            symmetry_reduction=symmetry_reduction,
            node_budget=node_budget,
        )


def _normalize_classes(
    classes: Sequence[DivisorClass | str | tuple[int, int]],
) -> tuple[tuple[int, int], ...]:
    surface = preset_p1xp1()
    coords = set()
    for c in classes:
        if isinstance(c, DivisorClass):
            if c.surface is not surface:
                raise ValueError("search classes must live on the p1xp1 preset")
            pair = c.coords
        elif isinstance(c, str):
            pair = parse_class(surface, c).coords
        else:
            a, b = c
            pair = (int(a), int(b))
        if pair[0] < 0 or pair[1] < 0:
            raise ValueError(f"class {pair} is not effective")
        coords.add(pair)
    if not coords:
        raise ValueError("empty class list")
    return tuple(sorted(coords))


@dataclass(frozen=True)
class SearchResult:
    """One enumerated cover: representative data, orbit size, and its analysis."""

    data: BuildingData
    orbit_size: int | None  # None when symmetry reduction is off
    invariants: InvariantSet
    canonical: CanonicalReport | None  # None when the canonical map is degenerate


# --- symmetry machinery ---


@lru_cache(maxsize=4)
def _gl_perm_tables(n: int) -> tuple[tuple[int, ...], ...]:
    """Permutation tables of all automorphisms of Z_2^n acting on element masks."""
    N = 1 << n
    tables: list[tuple[int, ...]] = []
    images: list[int] = []

    def build_table() -> tuple[int, ...]:
        perm = [0] * N
        for i, img in enumerate(images):
            step = 1 << i
            for m in range(step):
                perm[m | step] = perm[m] ^ img
        return tuple(perm)

    def extend(spanned: frozenset[int]) -> None:
        if len(images) == n:
            tables.append(build_table())
            return
        for v in range(1, N):
            if v not in spanned:
                images.append(v)
                extend(spanned | {s ^ v for s in spanned})
                images.pop()

    extend(frozenset({0}))
    return tuple(tables)


def _slot_order(n: int) -> tuple[int, ...]:
    """Fixed assignment schedule: group elements sorted so that the parity
    constraints complete as early as possible (ascending trailing zeros)."""
    return tuple(sorted(range(1, 1 << n), key=lambda m: ((m & -m).bit_length(), m)))


def random_automorphism(rng, n: int) -> tuple[int, ...]:
    """Images of the n basis vectors under a random automorphism of Z_2^n."""
    while True:
        images = tuple(rng.randrange(1, 1 << n) for _ in range(n))
        if len(_rref(images)) == n:
            return images


def _perm_from_images(images: Sequence[int], n: int) -> tuple[int, ...]:
    if len(images) != n or len(_rref(tuple(images))) != n:
        raise ValueError("images must be a basis of Z_2^n")
    perm = [0] * (1 << n)
    for bit in range(n):
        img = images[n - 1 - bit]
        step = 1 << bit
        for m in range(step):
            perm[m | step] = perm[m] ^ img
    return tuple(perm)


def relabel(data: BuildingData, images: Sequence[int]) -> BuildingData:
    """Pull the branch map back along the automorphism with the given basis images.

    images[i] is the image mask of the i-th standard basis vector in bit-string
    order, so (0b1000, 0b0100, 0b0010, 0b0001) is the identity at rank 4.
    """
    perm = _perm_from_images(images, data.n)
    branch = {}
    for mask in range(1, 1 << data.n):
        cls = data.branch_class(GroupElement(perm[mask], data.n))
        if not cls.is_zero:
            branch[GroupElement(mask, data.n)] = cls
    return BuildingData.from_branch(data.surface, data.n, branch, data.assumptions)


def swap_rulings(data: BuildingData) -> BuildingData:
    """Transpose every class on the quadric (exchange the two rulings)."""
    if data.surface.name != "p1xp1":
        raise ValueError("ruling swap is only defined on the p1xp1 preset")
    branch = {
        sigma: DivisorClass(data.surface, (cls.coords[1], cls.coords[0]))
        for sigma, cls in data.nonzero_branch()
    }
    return BuildingData.from_branch(data.surface, data.n, branch, data.assumptions)


def canonicalize(data: BuildingData) -> BuildingData:
    """Lexicographically minimal relabeling of the branch map under
    GL(n, F2) x (ruling swap). Constant on orbits and idempotent."""
    if data.surface.name != "p1xp1":
        raise ValueError("canonical form is defined for the p1xp1 preset")
    if data.n > _MAX_SYMMETRY_RANK:
        raise SpecTooLargeError(f"canonical form enumerates GL({data.n}, F2); rank too large")
    n = data.n
    slots = _slot_order(n)
    coords_by_mask = [(0, 0)] * (1 << n)
    for sigma, cls in data.nonzero_branch():
        coords_by_mask[sigma.mask] = cls.coords
    best = None
    for table in _gl_perm_tables(n):
        plain = tuple(coords_by_mask[table[m]] for m in slots)
        swapped = tuple((b, a) for a, b in plain)
        for cand in (plain, swapped):
            if best is None or cand < best:
                best = cand
    surface = data.surface
    branch = {
        GroupElement(mask, n): DivisorClass(surface, pair)
        for mask, pair in zip(slots, best)
        if pair != (0, 0)
    }
    return BuildingData.from_branch(surface, n, branch, data.assumptions)


# --- search engine ---


class _Context:
    """Precomputed tables shared by the sequential engine and every worker."""

    def __init__(self, spec: SearchSpec):
        self.spec = spec
        n = spec.rank
        self.n = n
        slots = _slot_order(n)
        self.slots = slots
        self.nslots = len(slots)
        slot_index = {m: i for i, m in enumerate(slots)}

        table = sorted({pair for cls_list in spec.allowed for pair in cls_list})
        self.class_coords = tuple(table)
        cid_of = {pair: i for i, pair in enumerate(table)}
        self.slot_classes = tuple(
            (
                tuple(cid_of[p] for p in spec.allowed[m - 1]),
                tuple(p[0] for p in spec.allowed[m - 1]),
                tuple(p[1] for p in spec.allowed[m - 1]),
            )
            for m in slots
        )

        # character support in slot indices; completion depth per character
        self.support = {}
        completed: list[list[int]] = [[] for _ in range(self.nslots)]
        for chi in range(1, 1 << n):
            idx = tuple(i for i, m in enumerate(slots) if (chi & m).bit_count() & 1)
            self.support[chi] = idx
            completed[max(idx)].append(chi)
        self.completed = tuple(tuple(c) for c in completed)

        self.reach = self._totals_reachability()
        self.transforms: tuple[tuple[tuple[int, ...], bool], ...] = ()
        self.swaptab: tuple[int, ...] = ()
        if spec.symmetry_reduction:
            swapped_ids = []
            for a, b in table:
                if (b, a) not in cid_of:
                    swapped_ids = None
                    break
                swapped_ids.append(cid_of[(b, a)])
            self.swaptab = tuple(swapped_ids) if swapped_ids is not None else ()
            transforms = []
            for perm in _gl_perm_tables(n):
                src = tuple(slot_index[perm[m]] for m in slots)
                transforms.append((src, False))
                if self.swaptab:
                    transforms.append((src, True))
            self.transforms = tuple(transforms)

    def _totals_reachability(self) -> tuple[frozenset[int], ...] | None:
        """Backward DP of branch totals that can still reach a K2-compatible total."""
        spec = self.spec
        if spec.k2 is None or self.n < 2:
            return None
        max_a = sum(max(das) for _, das, _ in self.slot_classes)
        max_b = sum(max(dbs) for _, _, dbs in self.slot_classes)
        if max_a >= (1 << _PACK) or max_b >= (1 << _PACK):
            return None
        lo, hi = spec.k2
        scale = 1 << (self.n - 1)
        goal = frozenset(
            (a << _PACK) | b
            for a in range(max_a + 1)
            for b in range(max_b + 1)
            if lo <= scale * (a - 4) * (b - 4) <= hi
        )
        layers = [goal]
        for i in range(self.nslots - 1, -1, -1):
            _, das, dbs = self.slot_classes[i]
            nxt = layers[-1]
            here = set()
            for packed in nxt:
                a, b = packed >> _PACK, packed & ((1 << _PACK) - 1)
                for da, db in zip(das, dbs):
                    if a >= da and b >= db:
                        here.add(((a - da) << _PACK) | (b - db))
            layers.append(frozenset(here))
        layers.reverse()
        return tuple(layers)

    def estimated_nodes(self) -> int:
        leaves = 1
        for cids, _, _ in self.slot_classes:
            leaves *= len(cids)
        return leaves >> min(2 * self.n, 63)


def _is_canonical(assign: Sequence[int], ctx: _Context) -> tuple[bool, int]:
    """Whether the assignment equals its orbit minimum; stabilizer size if so."""
    stab = 0
    ns = ctx.nslots
    swaptab = ctx.swaptab
    for src, swapped in ctx.transforms:
        for i in range(ns):
            c = assign[src[i]]
            if swapped:
                c = swaptab[c]
            s = assign[i]
            if c != s:
                if c < s:
                    return False, 0
                break
        else:
            stab += 1
    return True, stab


def _search_block(
    ctx: _Context,
    states: Iterable[tuple],
    start_depth: int,
    collect_depth: int | None = None,
) -> tuple[list, int]:
    """Run the pruned DFS from each start state; return (output, node count).

    A state is (assign_prefix, a0, b0, pg_sum, ncontrib, chi_acc, la, lb).
    Output items are (assignment cid tuple, orbit size or None), or whole
    states when collect_depth is set (used to carve out worker prefixes).
    """
    spec = ctx.spec
    n = ctx.n
    nslots = ctx.nslots
    slot_classes = ctx.slot_classes
    completed = ctx.completed
    support = ctx.support
    class_coords = ctx.class_coords
    reach = ctx.reach
    pg_hi = None if spec.pg is None else spec.pg[1]
    single = spec.single_contributing
    degree_target = spec.canonical_degree
    symmetry = spec.symmetry_reduction
    budget = spec.node_budget
    chi_base = 1 << n
    k2_scale = 1 << (n - 1)
    stop = nslots if collect_depth is None else collect_depth

    vals_a = [0] * nslots
    vals_b = [0] * nslots
    assign = [0] * nslots
    out: list = []
    nodes = 0

    sys.setrecursionlimit(max(sys.getrecursionlimit(), nslots + 200))

    def finalize(a0, b0, pg_sum, ncontrib, chi_acc, la, lb):
        if spec.k2 is not None and reach is None:
            if not _in_bound(k2_scale * (a0 - 4) * (b0 - 4), spec.k2):
                return
        if not _in_bound(pg_sum, spec.pg):
            return
        chi_total = chi_base + chi_acc
        if not _in_bound(chi_total, spec.chi):
            return
        q = pg_sum + 1 - chi_total
        if q < 0 or not _in_bound(q, spec.q):
            return
        if single and ncontrib != 1:
            return
        if degree_target is not None:
            degree = (1 << n) if (ncontrib == 1 and la >= 3 and lb >= 3) else None
            if degree != degree_target:
                return
        if symmetry:
            ok, stab = _is_canonical(assign, ctx)
            if not ok:
                return
            out.append((tuple(assign), len(ctx.transforms) // stab))
        else:
            out.append((tuple(assign), None))

    def rec(depth, a0, b0, pg_sum, ncontrib, chi_acc, la, lb):
        nonlocal nodes
        if depth == stop:
            if collect_depth is None:
                finalize(a0, b0, pg_sum, ncontrib, chi_acc, la, lb)
            else:
                out.append(
                    (tuple(assign[:depth]), a0, b0, pg_sum, ncontrib, chi_acc, la, lb)
                )
            return
        cids, das, dbs = slot_classes[depth]
        reach_next = reach[depth + 1] if reach is not None else None
        completed_here = completed[depth]
        for k in range(len(cids)):
            na = a0 + das[k]
            nb = b0 + dbs[k]
            if reach_next is not None and ((na << _PACK) | nb) not in reach_next:
                continue
            nodes += 1
            vals_a[depth] = das[k]
            vals_b[depth] = dbs[k]
            assign[depth] = cids[k]
            npg, ncon, nchi, nla, nlb = pg_sum, ncontrib, chi_acc, la, lb
            ok = True
            for chi in completed_here:
                sa = sb = 0
                for i in support[chi]:
                    sa += vals_a[i]
                    sb += vals_b[i]
                if (sa | sb) & 1 or sa == sb == 0:
                    ok = False
                    break
                ca, cb = sa >> 1, sb >> 1
                nchi += ca * cb - ca - cb
                if ca >= 2 and cb >= 2:
                    npg += (ca - 1) * (cb - 1)
                    ncon += 1
                    nla, nlb = ca, cb
                    if (pg_hi is not None and npg > pg_hi) or (single and ncon > 1):
                        ok = False
                        break
            if ok:
                rec(depth + 1, na, nb, npg, ncon, nchi, nla, nlb)
        if nodes > budget:
            raise BudgetExceededError(
                f"visited {nodes} partial states, over the budget of {budget}"
            )

    for state in states:
        prefix, a0, b0, pg_sum, ncontrib, chi_acc, la, lb = state
        for i, cid in enumerate(prefix):
            assign[i] = cid
            vals_a[i], vals_b[i] = class_coords[cid]
        rec(start_depth, a0, b0, pg_sum, ncontrib, chi_acc, la, lb)
    return out, nodes


_WORKER_CTX: _Context | None = None


def _init_worker(spec: SearchSpec) -> None:
    global _WORKER_CTX
    _WORKER_CTX = _Context(spec)


def _run_chunk(args: tuple) -> tuple[list, int]:
    states, start_depth = args
    assert _WORKER_CTX is not None
    return _search_block(_WORKER_CTX, states, start_depth)


def prune_bound(spec: SearchSpec, partial: Sequence[DivisorClass | str | tuple[int, int]]) -> bool:
    """Feasibility of a partial assignment: classes for the first len(partial)
    slots of the fixed schedule. Returns False only when no completion can
    satisfy the divisibility relations and the K2-compatible totals; never
    prunes a completable assignment.
    """
    ctx = _Context(spec)
    if len(partial) > ctx.nslots:
        raise ValueError(f"partial assignment longer than {ctx.nslots} slots")
    coords = _normalize_classes_keep_order(partial)
    vals_a = [0] * ctx.nslots
    vals_b = [0] * ctx.nslots
    a0 = b0 = 0
    for depth, (da, db) in enumerate(coords):
        if (da, db) not in ctx.spec.allowed[ctx.slots[depth] - 1]:
            raise ValueError(f"class {(da, db)} not allowed at slot {depth}")
        a0 += da
        b0 += db
        if ctx.reach is not None and ((a0 << _PACK) | b0) not in ctx.reach[depth + 1]:
            return False
        vals_a[depth] = da
        vals_b[depth] = db
        for chi in ctx.completed[depth]:
            sa = sum(vals_a[i] for i in ctx.support[chi])
            sb = sum(vals_b[i] for i in ctx.support[chi])
            if (sa | sb) & 1 or sa == sb == 0:
                return False
    return True


def _normalize_classes_keep_order(
    classes: Sequence[DivisorClass | str | tuple[int, int]],
) -> list[tuple[int, int]]:
    surface = preset_p1xp1()
    out = []
    for c in classes:
        if isinstance(c, DivisorClass):
            out.append(c.coords)
        elif isinstance(c, str):
            out.append(parse_class(surface, c).coords)
        else:
            out.append((int(c[0]), int(c[1])))
    return out


def _choose_prefix_depth(ctx: _Context, jobs: int) -> int:
    width = 1
    for depth in range(ctx.nslots):
        width *= len(ctx.slot_classes[depth][0])
        if width >= 64 * jobs:
            return min(depth + 1, ctx.nslots - 1)
    return max(ctx.nslots - 1, 1)


def enumerate_covers(spec: SearchSpec, jobs: int = 1) -> list[SearchResult]:
    """Every branch assignment in the spec whose bundles solve and whose
    invariants pass the target filters; one canonical representative per orbit
    when symmetry reduction is on. Output order is deterministic and identical
    for any worker count.

    Assignments whose derived irregularity would be negative cannot come from
    smooth covers and are skipped. When the class table is not closed under
    the ruling swap, orbit reduction uses GL(n, F2) alone (the swap does not
    preserve the search space). Raises SpecTooLargeError upfront when the
    discounted node estimate exceeds the budget, and BudgetExceededError if a
    run overshoots it anyway (checked per worker).
    """
    ctx = _Context(spec)
    estimate = ctx.estimated_nodes()
    if estimate > spec.node_budget:
        raise SpecTooLargeError(
            f"estimated {estimate} partial states exceeds the budget of "
            f"{spec.node_budget}; shrink the class lists or raise the budget"
        )

    root = ((), 0, 0, 0, 0, 0, 0, 0)
    if jobs <= 1:
        emissions, _ = _search_block(ctx, [root], 0)
    else:
        depth = _choose_prefix_depth(ctx, jobs)
        states, _ = _search_block(ctx, [root], 0, collect_depth=depth)
        if not states:
            emissions = []
        else:
            chunk_count = min(len(states), jobs * 4)
            size = (len(states) + chunk_count - 1) // chunk_count
            chunks = [
                (states[i : i + size], depth) for i in range(0, len(states), size)
            ]
            with Pool(processes=jobs, initializer=_init_worker, initargs=(spec,)) as pool:
                parts = pool.map(_run_chunk, chunks)
            emissions = []
            for part, _ in parts:
                emissions.extend(part)

    return [_realize(ctx, assign, orbit) for assign, orbit in emissions]


def _realize(ctx: _Context, assign: tuple[int, ...], orbit: int | None) -> SearchResult:
    """Rebuild rich objects for an emitted assignment and re-check every filter."""
    spec = ctx.spec
    surface = preset_p1xp1()
    branch = {}
    for i, cid in enumerate(assign):
        pair = ctx.class_coords[cid]
        if pair != (0, 0):
            branch[GroupElement(ctx.slots[i], ctx.n)] = DivisorClass(surface, pair)
    data = BuildingData.from_branch(surface, ctx.n, branch)

    report = validate(data)
    inv = compute_invariants(data)
    canonical = None
    try:
        canonical = canonical_degree_report(data)
    except DegenerateCanonicalError:
        pass

    degree = canonical.canonical_degree if canonical else None
    checks = (
        report.passed
        and _in_bound(inv.K2, spec.k2)
        and _in_bound(inv.pg, spec.pg)
        and _in_bound(inv.q, spec.q)
        and _in_bound(inv.chi, spec.chi)
        and (not spec.single_contributing or len(contributing_characters(data)) == 1)
        and (spec.canonical_degree is None or degree == spec.canonical_degree)
    )
    if not checks:
        raise RuntimeError(f"internal error: emitted assignment fails re-checks: {assign}")
    return SearchResult(data=data, orbit_size=orbit, invariants=inv, canonical=canonical)


def brute_force_assignments(spec: SearchSpec) -> list[dict[GroupElement, DivisorClass]]:
    """Unpruned reference enumeration (no symmetry, no targets): every branch
    assignment whose bundles solve. Exponential; for small ranks and tests."""
    surface = preset_p1xp1()
    n = spec.rank
    masks = list(range(1, 1 << n))
    out = []

    def rec(i: int, current: dict):
        if i == len(masks):
            try:
                solve_bundles(surface, n, current)
            except BundleSolveError:
                return
            out.append(dict(current))
            return
        sigma = GroupElement(masks[i], n)
        for pair in spec.allowed[masks[i] - 1]:
            if pair != (0, 0):
                current[sigma] = DivisorClass(surface, pair)
            rec(i + 1, current)
            current.pop(sigma, None)

    rec(0, {})
    return out
