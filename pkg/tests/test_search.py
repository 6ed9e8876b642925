"""Search engine: completeness, canonical forms, determinism, and budgets."""

import random

import pytest
from conftest import branch_as_set, random_valid_data

from abelcov.building import validate
from abelcov.fixtures import degree16_cover
from abelcov.groups import GroupElement
from abelcov.invariants import compute_invariants
from abelcov.picard import preset_p1xp1

QUADRIC_ZERO = preset_p1xp1().zero()
from abelcov.search import (
    BudgetExceededError,
    SearchSpec,
    SpecTooLargeError,
    _slot_order,
    brute_force_assignments,
    canonicalize,
    enumerate_covers,
    prune_bound,
    random_automorphism,
    relabel,
    swap_rulings,
)


class TestSpecBuild:
    def test_class_parsing_and_dedup(self):
        spec = SearchSpec.build(2, ["0", "F", "F", "2G"])
        assert spec.allowed[0] == ((0, 0), (0, 2), (1, 0))

    def test_non_effective_class_rejected(self):
        with pytest.raises(ValueError):
            SearchSpec.build(2, ["-F"])

    def test_inconsistent_targets_rejected(self):
        with pytest.raises(ValueError):
            SearchSpec.build(2, ["0", "F"], pg=4, q=1, chi=3)

    def test_consistent_targets_accepted(self):
        SearchSpec.build(2, ["0", "F"], pg=4, q=1, chi=4)

    def test_per_sigma_with_symmetry_rejected(self):
        with pytest.raises(ValueError):
            SearchSpec.build(2, ["0", "F"], per_sigma={"01": ["0"]})

    def test_per_sigma_override(self):
        spec = SearchSpec.build(
            2, ["0", "F"], per_sigma={"01": ["2G"]}, symmetry_reduction=False
        )
        assert spec.allowed[0] == ((0, 2),)
        assert spec.allowed[1] == ((0, 0), (1, 0))

    def test_symmetry_rank_cap(self):
        with pytest.raises(SpecTooLargeError):
            SearchSpec.build(5, ["0", "F"])


class TestSmallSearchCompleteness:
    def test_rank2_three_classes_matches_oracle(self):
        spec = SearchSpec.build(2, ["0", "F", "G"], symmetry_reduction=False)
        results = enumerate_covers(spec)
        oracle = brute_force_assignments(spec)
        got = {frozenset((s.mask, d.coords) for s, d in r.data.nonzero_branch()) for r in results}
        want = {frozenset((s.mask, d.coords) for s, d in m.items()) for m in oracle}
        assert got == want

    def test_rank2_five_classes_matches_oracle(self):
        spec = SearchSpec.build(2, ["0", "F", "G", "2F", "2G"], symmetry_reduction=False)
        results = enumerate_covers(spec)
        oracle = brute_force_assignments(spec)
        assert len(results) == len(oracle)
        got = {frozenset((s.mask, d.coords) for s, d in r.data.nonzero_branch()) for r in results}
        want = {frozenset((s.mask, d.coords) for s, d in m.items()) for m in oracle}
        assert got == want

    def test_only_zero_classes_is_empty(self):
        spec = SearchSpec.build(4, ["0"], symmetry_reduction=False)
        assert enumerate_covers(spec) == []

    def test_filters_match_post_hoc_filtering(self):
        spec_all = SearchSpec.build(2, ["0", "F", "G", "2F", "2G"], symmetry_reduction=False)
        spec_filtered = SearchSpec.build(
            2, ["0", "F", "G", "2F", "2G"], k2=(0, 100), pg=0, symmetry_reduction=False
        )
        everything = enumerate_covers(spec_all)
        expected = {
            branch_as_set(r.data)
            for r in everything
            if 0 <= r.invariants.K2 <= 100 and r.invariants.pg == 0
        }
        got = {branch_as_set(r.data) for r in enumerate_covers(spec_filtered)}
        assert got == expected

    def test_every_emitted_result_validates(self):
        spec = SearchSpec.build(2, ["0", "F", "G", "2F", "2G"], symmetry_reduction=False)
        for result in enumerate_covers(spec):
            assert validate(result.data).passed

    def test_canonical_degree_filter_matches_post_hoc(self):
        # menu reaching branch sums (6,6), e.g. the degree-16 example's
        # quotient by <0001>: branch 4F, 2F+2G, 2G, 2G on the rank-3 group
        classes = ["0", "2F+2G", "4F", "2G"]
        unfiltered = enumerate_covers(
            SearchSpec.build(3, classes, single_contributing=True)
        )
        expected = {
            branch_as_set(r.data)
            for r in unfiltered
            if r.canonical is not None and r.canonical.canonical_degree == 8
        }
        filtered = enumerate_covers(
            SearchSpec.build(3, classes, single_contributing=True, canonical_degree=8)
        )
        assert expected  # the rank-3 menu does contain degree-8 covers
        assert {branch_as_set(r.data) for r in filtered} == expected
        for r in filtered:
            assert r.canonical.canonical_degree == 8


class TestCanonicalize:
    def test_idempotent(self):
        data = canonicalize(degree16_cover())
        again = canonicalize(data)
        assert branch_as_set(data) == branch_as_set(again)

    def test_constant_on_orbit(self):
        data = degree16_cover()
        base = branch_as_set(canonicalize(data))
        rng = random.Random(41)
        for _ in range(20):
            relabeled = relabel(data, random_automorphism(rng, 4))
            if rng.random() < 0.5:
                relabeled = swap_rulings(relabeled)
            assert branch_as_set(canonicalize(relabeled)) == base

    def test_already_canonical_unchanged(self):
        data = canonicalize(degree16_cover())
        assert branch_as_set(canonicalize(data)) == branch_as_set(data)

    def test_random_data_orbit_constancy(self):
        rng = random.Random(4)
        for _ in range(5):
            data = random_valid_data(rng)
            base = branch_as_set(canonicalize(data))
            for _ in range(3):
                relabeled = relabel(data, random_automorphism(rng, 4))
                assert branch_as_set(canonicalize(relabeled)) == base


class TestRelabel:
    def test_identity(self):
        data = degree16_cover()
        same = relabel(data, (0b1000, 0b0100, 0b0010, 0b0001))
        # identity automorphism maps the basis to itself in mask order
        assert branch_as_set(same) == {
            (s.mask, d.coords) for s, d in data.nonzero_branch()
        } == branch_as_set(data)

    def test_non_invertible_rejected(self):
        with pytest.raises(ValueError):
            relabel(degree16_cover(), (0b1000, 0b1000, 0b0010, 0b0001))

    def test_invariants_preserved(self):
        data = degree16_cover()
        inv = compute_invariants(data)
        rng = random.Random(77)
        other = compute_invariants(relabel(data, random_automorphism(rng, 4)))
        assert (inv.K2, inv.pg, inv.q, inv.chi) == (other.K2, other.pg, other.q, other.chi)


class TestDeterminismAndParallel:
    def test_single_vs_two_workers_identical(self):
        spec = SearchSpec.build(
            3, ["0", "F", "G", "2F", "2G"], symmetry_reduction=False, k2=(0, 64)
        )
        seq = enumerate_covers(spec, jobs=1)
        par = enumerate_covers(spec, jobs=2)
        assert [branch_as_set(r.data) for r in seq] == [branch_as_set(r.data) for r in par]
        assert [r.orbit_size for r in seq] == [r.orbit_size for r in par]

    def test_repeat_runs_identical(self):
        spec = SearchSpec.build(2, ["0", "F", "G", "2F"], symmetry_reduction=False)
        a = enumerate_covers(spec)
        b = enumerate_covers(spec)
        assert [branch_as_set(r.data) for r in a] == [branch_as_set(r.data) for r in b]


class TestSymmetryReduction:
    def test_emits_canonical_forms_only(self):
        spec = SearchSpec.build(2, ["0", "F", "G", "2F", "2G"], symmetry_reduction=True)
        for result in enumerate_covers(spec):
            assert branch_as_set(result.data) == branch_as_set(canonicalize(result.data))
            assert result.orbit_size is not None and result.orbit_size >= 1

    def test_orbits_cover_unreduced_results(self):
        classes = ["0", "F", "G", "2F", "2G"]
        reduced = enumerate_covers(SearchSpec.build(2, classes, symmetry_reduction=True))
        unreduced = enumerate_covers(SearchSpec.build(2, classes, symmetry_reduction=False))
        canonical_of_all = {branch_as_set(canonicalize(r.data)) for r in unreduced}
        assert {branch_as_set(r.data) for r in reduced} == canonical_of_all
        assert sum(r.orbit_size for r in reduced) == len(unreduced)


class TestPruneBound:
    SPEC = SearchSpec.build(4, ["0", "F", "2F", "G", "2G"], k2=32, pg=4, q=1)

    def test_empty_partial_feasible(self):
        assert prune_bound(self.SPEC, [])

    def test_forced_odd_parity_infeasible(self):
        # first 8 schedule slots complete the first character; a lone F leaves
        # its branch sum odd in every completion
        partial = ["F"] + ["0"] * 7
        assert not prune_bound(self.SPEC, partial)

    def test_fixture_prefix_feasible(self):
        data = degree16_cover()
        slots = _slot_order(4)
        partial = [data.branch_class(GroupElement(m, 4)) for m in slots[:4]]
        assert prune_bound(self.SPEC, partial)
        # the full fixture assignment stays feasible end to end
        full = [data.branch_class(GroupElement(m, 4)) for m in slots]
        assert prune_bound(self.SPEC, full)

    def test_never_prunes_completable_assignments(self):
        # soundness at small rank: every oracle solution has all prefixes feasible
        spec = SearchSpec.build(2, ["0", "F", "G", "2F", "2G"], symmetry_reduction=False)
        slots = _slot_order(2)
        for assignment in brute_force_assignments(spec):
            classes = [
                assignment.get(GroupElement(m, 2), QUADRIC_ZERO) for m in slots
            ]
            for k in range(len(slots) + 1):
                assert prune_bound(spec, classes[:k])

    def test_disallowed_class_rejected(self):
        with pytest.raises(ValueError):
            prune_bound(self.SPEC, ["3F"])


class TestBudget:
    def test_upfront_refusal(self):
        with pytest.raises(SpecTooLargeError):
            enumerate_covers(
                SearchSpec.build(4, ["0", "F", "G", "2F", "2G"], node_budget=1000)
            )

    def test_runtime_budget_abort(self):
        # estimate (125 >> 4 = 7) passes, actual node count exceeds 20
        spec = SearchSpec.build(2, ["0", "F", "G", "2F", "2G"], node_budget=20)
        with pytest.raises(BudgetExceededError):
            enumerate_covers(spec)
