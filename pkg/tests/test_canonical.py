"""Canonical-map analysis: contributing characters, H, quotients, degree."""

import itertools
import random

import pytest

from abelcov.building import BuildingData, total_branch, validate
from abelcov.canonical import (
    DegenerateCanonicalError,
    canonical_degree_report,
    contributing_characters,
    double_cover_node_count,
    quotient_cover,
    trivially_acting_subgroup,
)
from abelcov.fixtures import degree16_cover
from abelcov.groups import Character, GroupElement, annihilator, nontrivial_characters, span
from abelcov.invariants import k_squared
from abelcov.picard import parse_class, preset_p1xp1

QUADRIC = preset_p1xp1()


def data_with_bundles(bundle_map):
    """Building data with prescribed bundles (branch irrelevant for these ops)."""
    bundles = {
        chi: parse_class(QUADRIC, bundle_map.get(str(chi), "F+2G"))
        for chi in nontrivial_characters(4)
    }
    return BuildingData(QUADRIC, 4, {}, bundles)


class TestContributing:
    def test_fixture_single_character(self):
        got = contributing_characters(degree16_cover())
        assert {str(chi): h for chi, h in got.items()} == {"1100": 4}

    def test_none_effective(self):
        assert contributing_characters(data_with_bundles({})) == {}

    def test_perturbed_bundle_adds_contributor(self):
        base = degree16_cover()
        bundles = dict(base.bundles)
        bundles[Character.from_bits("1110")] = QUADRIC.divisor(3, 3)
        perturbed = BuildingData(QUADRIC, 4, base.branch, bundles)
        got = {str(chi): h for chi, h in contributing_characters(perturbed).items()}
        assert got == {"1100": 4, "1110": 4}


class TestTriviallyActing:
    def test_fixture_subgroup(self):
        H = trivially_acting_subgroup(degree16_cover())
        assert H == span([GroupElement.from_bits(b) for b in ("0001", "0010", "1100")])
        assert H.order == 8

    def test_all_characters_contributing(self):
        data = data_with_bundles({str(chi): "3F+3G" for chi in nontrivial_characters(4)})
        assert len(contributing_characters(data)) == 15
        assert trivially_acting_subgroup(data).order == 1

    def test_two_contributors_against_kernel_oracle(self):
        data = data_with_bundles({"1100": "3F+3G", "0010": "3F+3G"})
        H = trivially_acting_subgroup(data)
        oracle = {
            m
            for m in range(16)
            if (m & 0b1100).bit_count() % 2 == 0 and (m & 0b0010).bit_count() % 2 == 0
        }
        assert set(H.member_masks()) == oracle

    def test_empty_contributing_raises(self):
        with pytest.raises(DegenerateCanonicalError):
            trivially_acting_subgroup(data_with_bundles({}))


class TestQuotientCover:
    def test_fixture_double_cover(self):
        data = degree16_cover()
        H = span([GroupElement.from_bits(b) for b in ("0001", "0010", "1100")])
        qc = quotient_cover(data, H)
        assert qc.quotient_rank == 1
        branch = qc.data.branch_class(GroupElement(1, 1))
        assert branch == QUADRIC.divisor(6, 6)
        assert qc.data.bundle(Character(1, 1)) == QUADRIC.divisor(3, 3)
        assert branch == 2 * data.bundle(Character.from_bits("1100"))
        assert not qc.absorbed
        assert qc.node_count == 36

    def test_product_quotient_with_absorbed_ramification(self):
        data = degree16_cover()
        H = span([GroupElement.from_bits(b) for b in ("1000", "0100", "0001")])
        qc = quotient_cover(data, H)
        assert qc.quotient_rank == 1
        assert qc.data.branch_class(GroupElement(1, 1)) == QUADRIC.divisor(0, 4)
        assert qc.data.bundle(Character(1, 1)) == QUADRIC.divisor(0, 2)
        absorbed = {str(s) for s, _ in qc.absorbed}
        assert absorbed == {"1000", "0101", "0100", "1001"}
        assert qc.node_count == 0

    def test_rank_two_quotient_bundles_match_originals(self):
        data = degree16_cover()
        H = span([GroupElement.from_bits(b) for b in ("0001", "0010")])
        qc = quotient_cover(data, H)
        assert qc.quotient_rank == 2
        assert validate(qc.data).passed
        # the quotient bundles are the original L at the characters of H-perp
        quotient_bundles = {str(c): str(d) for c, d in sorted(qc.data.bundles.items(), key=lambda kv: kv[0].mask)}
        assert quotient_bundles == {"01": "2F+G", "10": "F+2G", "11": "3F+3G"}

    def test_grouped_total_matches_branch_total(self):
        data = degree16_cover()
        H = span([GroupElement.from_bits(b) for b in ("0001", "0010", "1100")])
        qc = quotient_cover(data, H)
        grouped_total = QUADRIC.zero()
        for cls in qc.grouped_branch.values():
            grouped_total = grouped_total + cls
        assert grouped_total == total_branch(data)

    def test_trivial_and_full_subgroups_rejected(self):
        data = degree16_cover()
        with pytest.raises(ValueError):
            quotient_cover(data, span([], rank=4))
        with pytest.raises(ValueError):
            quotient_cover(data, span([GroupElement(1 << i, 4) for i in range(4)]))


class TestNodeCount:
    def test_fixture_components(self):
        components = [
            parse_class(QUADRIC, c) for c in ("2F", "2F", "2F", "2G", "G", "G", "G", "G")
        ]
        assert double_cover_node_count(components) == 36

    def test_single_component(self):
        assert double_cover_node_count([QUADRIC.divisor(2, 0)]) == 0

    def test_two_rulings(self):
        assert double_cover_node_count([QUADRIC.divisor(1, 0), QUADRIC.divisor(0, 1)]) == 1

    def test_permutation_invariant(self):
        components = [QUADRIC.divisor(*c) for c in ((2, 0), (0, 2), (1, 1), (0, 1))]
        rng = random.Random(1)
        expected = double_cover_node_count(components)
        for _ in range(10):
            shuffled = components[:]
            rng.shuffle(shuffled)
            assert double_cover_node_count(shuffled) == expected


class TestCanonicalDegreeReport:
    def test_fixture_full_report(self):
        data = degree16_cover()
        report = canonical_degree_report(data)
        assert report.pg == 4
        assert report.single_character
        assert report.canonical_degree == 16
        assert report.base_map_degree == 1
        assert report.base_system == QUADRIC.divisor(1, 1)
        assert report.image_dimension == 3
        assert report.image_self_intersection == 2
        assert report.canonical_degree * report.image_self_intersection == k_squared(data)
        assert report.base_point_free == "pattern-justified"
        assert report.quotient is not None and report.quotient.node_count == 36

    def test_degenerate_when_pg_too_small(self):
        data = data_with_bundles({"1100": "2F+2G"})  # single contributor with h0 = 1
        with pytest.raises(DegenerateCanonicalError):
            canonical_degree_report(data)

    def test_two_contributors_undetermined(self):
        # a verified valid configuration with exactly two contributing characters
        branch = {
            "0001": (0, 1), "0010": (1, 0), "0011": (1, 1), "0100": (3, 0),
            "0101": (4, 0), "0110": (4, 0), "1000": (2, 1), "1010": (0, 1),
            "1011": (1, 0), "1100": (1, 0), "1101": (1, 0), "1111": (1, 0),
        }
        data = BuildingData.from_branch(
            QUADRIC,
            4,
            {
                GroupElement.from_bits(bits): QUADRIC.divisor(*coords)
                for bits, coords in branch.items()
            },
        )
        assert validate(data).passed
        contrib = {str(c): h for c, h in contributing_characters(data).items()}
        assert contrib == {"1001": 3, "1101": 5}
        report = canonical_degree_report(data)
        assert report.canonical_degree is None
        assert report.H.order == 4  # index-4 subgroup still reported
        assert report.quotient is not None and report.quotient.quotient_rank == 2
        assert report.base_point_free == "unverified"

    def test_rank_three_quotient_analog_has_degree_eight(self):
        # quotienting the fixture by <0001> leaves a rank-3 cover with the same
        # single contributing character, so the same pullback logic gives 2^3
        data = degree16_cover()
        qc = quotient_cover(data, span([GroupElement.from_bits("0001")]))
        assert qc.quotient_rank == 3
        report = canonical_degree_report(qc.data)
        assert report.single_character
        assert report.canonical_degree == 8
        assert report.image_self_intersection == 2

    def test_unverified_without_assumption_flags(self):
        base = degree16_cover()
        data = BuildingData(QUADRIC, 4, base.branch, base.bundles)  # flags default False
        report = canonical_degree_report(data)
        assert report.canonical_degree == 16
        assert report.base_point_free == "unverified"

    def test_contributing_set_lies_in_annihilator_of_h(self):
        for bundle_map in (
            {"1100": "3F+3G"},
            {"1100": "3F+3G", "0010": "3F+3G"},
            {"0001": "4F+4G", "1111": "3F+3G"},
        ):
            data = data_with_bundles(bundle_map)
            H = trivially_acting_subgroup(data)
            perp = annihilator(H)
            for chi in contributing_characters(data):
                assert chi in perp
            assert H.order * perp.order == 16
