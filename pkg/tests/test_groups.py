"""Group, character, subgroup, and annihilator arithmetic over F2."""

import itertools
import random

import pytest
from conftest import xor_closure

from abelcov.groups import (
    Character,
    GroupElement,
    Subgroup,
    all_characters,
    all_elements,
    annihilator,
    char_eval,
    coset_image,
    full_group,
    span,
)


def E(bits):
    return GroupElement.from_bits(bits)


def C(bits):
    return Character.from_bits(bits)


class TestCharEval:
    def test_on_own_support(self):
        assert char_eval(C("1100"), E("1100")) == 1

    def test_single_bit_overlap(self):
        assert char_eval(C("1100"), E("1000")) == -1

    def test_trivial_character(self):
        for sigma in all_elements(4):
            assert char_eval(C("0000"), sigma) == 1

    def test_rank_mismatch(self):
        with pytest.raises(ValueError):
            char_eval(C("110"), E("1100"))

    def test_argument_order_enforced(self):
        with pytest.raises(TypeError):
            char_eval(E("1100"), C("1000"))

    def test_bilinear_exhaustive_rank4(self):
        elements = all_elements(4)
        for chi in all_characters(4):
            for s in elements:
                for t in elements:
                    assert char_eval(chi, s + t) == char_eval(chi, s) * char_eval(chi, t)


class TestElements:
    def test_bits_round_trip(self):
        e = E("1011")
        assert e.bits == (1, 0, 1, 1)
        assert str(e) == "1011"

    def test_self_inverse(self):
        for e in all_elements(3):
            assert (e + e).is_zero

    def test_addition_is_xor(self):
        assert E("1100") + E("0110") == E("1010")

    def test_bad_bits(self):
        with pytest.raises(ValueError):
            GroupElement.from_bits("10a0")

    def test_character_product(self):
        assert C("1100") * C("0101") == C("1001")


class TestSpan:
    def test_empty_is_trivial(self):
        H = span([], rank=4)
        assert H.order == 1
        assert E("0000") in H

    def test_empty_needs_rank(self):
        with pytest.raises(ValueError):
            span([])

    def test_trivially_acting_generators(self):
        H = span([E("0001"), E("0010"), E("1100")])
        assert H.order == 8

    def test_product_quotient_generators(self):
        H = span([E("1000"), E("0100"), E("0001")])
        assert H.order == 8

    def test_members_match_xor_closure_oracle(self):
        rng = random.Random(7)
        for _ in range(50):
            gens = [GroupElement(rng.randrange(16), 4) for _ in range(rng.randrange(1, 5))]
            H = span(gens)
            assert set(H.member_masks()) == xor_closure({g.mask for g in gens})

    def test_idempotent_and_order_independent(self):
        gens = [E("0111"), E("1010"), E("0001")]
        H = span(gens)
        assert span(H.elements()) == H
        for perm in itertools.permutations(gens):
            assert span(list(perm)) == H

    def test_order_is_power_of_two(self):
        H = span([E("101"), E("011"), E("110")])
        assert H.order == 4  # third generator is dependent


class TestAnnihilator:
    def test_fixture_subgroup(self):
        H = span([E("0001"), E("0010"), E("1100")])
        perp = annihilator(H)
        assert perp.order == 2
        assert C("1100") in perp

    def test_whole_group(self):
        perp = annihilator(full_group(4))
        assert perp.order == 1

    def test_brute_force_oracle(self):
        gens = [E("1000"), E("0100"), E("0001")]
        H = span(gens)
        perp = annihilator(H)
        expected = {
            chi
            for chi in range(16)
            if all((chi & g.mask).bit_count() % 2 == 0 for g in gens)
        }
        assert set(perp.member_masks()) == expected
        assert set(perp.member_masks()) == {0b0000, 0b0010}

    def test_involution_over_all_subgroups_of_rank4(self):
        subgroups = set()
        nonzero = [GroupElement(m, 4) for m in range(1, 16)]
        for size in range(5):
            for combo in itertools.combinations(nonzero, size):
                subgroups.add(span(list(combo), rank=4))
        assert len(subgroups) == 67
        for H in subgroups:
            assert H.order * annihilator(H).order == 16
            assert annihilator(annihilator(H)) == H


class TestCosets:
    def test_member_maps_to_identity(self):
        H = span([E("0001"), E("0010"), E("1100")])
        for h in H.elements():
            assert coset_image(h, H).is_zero

    def test_nonmember_nontrivial(self):
        H = span([E("0001"), E("0010"), E("1100")])
        assert not coset_image(E("1000"), H).is_zero

    def test_branch_elements_share_one_coset(self):
        # pairwise differences of the eight branching elements all lie in H
        H = span([E("0001"), E("0010"), E("1100")])
        sigmas = [E(b) for b in ("1000", "0101", "0100", "1001", "1011", "1010", "0111", "0110")]
        for s1 in sigmas:
            for s2 in sigmas:
                assert (s1 + s2) in H
        reps = {coset_image(s, H).mask for s in sigmas}
        assert len(reps) == 1 and 0 not in reps

    def test_rank_mismatch(self):
        with pytest.raises(ValueError):
            coset_image(E("10"), span([E("0001")], rank=4))


class TestSubgroupInvariants:
    def test_order_times_annihilator_order(self):
        rng = random.Random(11)
        for _ in range(30):
            gens = [GroupElement(rng.randrange(16), 4) for _ in range(3)]
            H = span(gens, rank=4)
            assert H.order * annihilator(H).order == 16

    def test_canonical_basis_equality(self):
        a = span([E("0111"), E("0001")])
        b = span([E("0110"), E("0111"), E("0001")])
        assert a == b
        assert hash(a) == hash(b)

    def test_subgroup_str(self):
        assert str(span([], rank=2)) == "<0>"
        assert "1100" in str(span([E("1100")]))
