from __future__ import annotations

from fractions import Fraction
from itertools import product

import pytest

from hurwitz_components.errors import UserInputError
from hurwitz_components.groups import AbelianGroup, construct_group
from hurwitz_components.ramification import (
    GeneratorSystem,
    SignatureType,
    count_systems,
    curve_genus,
    enumerate_systems,
    enumerate_systems_unordered,
    fraction_to_json,
    is_beauville,
    is_disjoint,
    long_relation_holds,
    long_relation_value,
    period_multisets_with_angle_sum,
    rh_admissible,
    sigma_set,
    surface_invariants,
    system_valid,
    validate_pair,
)


def test_type_parse_and_str_roundtrip():
    for text in ("0|5,5,5", "2|", "1|2,2", "0|2,3,4"):
        assert str(SignatureType.parse(text)) == text
    tau = SignatureType.parse(" 1 | 3 , 2 ")
    assert (tau.gprime, tau.periods) == (1, (3, 2))
    assert tau.canonical() == (1, (2, 3))
    assert tau.orderings() == [(2, 3), (3, 2)]


@pytest.mark.parametrize("text", ["5,5,5", "-1|2", "0|1", "0|2,x", "a|2"])
def test_type_parse_rejects_garbage(text):
    with pytest.raises(UserInputError):
        SignatureType.parse(text)


def test_long_relation_explicit_symmetric_case():
    G = construct_group("Sym:3")
    c1 = G.index_of((1, 0, 2))
    c2 = G.index_of((0, 2, 1))
    prod = G.mul(c1, c2)
    entries = (c1, c2, G.inv(prod))
    assert long_relation_value(G, 0, entries) == G.identity
    assert long_relation_holds(G, 0, entries)
    assert not long_relation_holds(G, 0, (c1, c2, prod)) or prod == G.inv(prod)


def test_long_relation_with_handles():
    G = construct_group("Sym:4")
    a, b = 5, 9
    comm = G.comm(a, b)
    entries = (a, b, G.inv(comm))
    assert long_relation_holds(G, 1, entries)


def test_enumerate_matches_brute_force_filter():
    G = construct_group("Sym:3")
    tau = SignatureType(0, (2, 2, 3))
    got = set(enumerate_systems(G, tau))
    want = {
        ent
        for ent in product(G.elements(), repeat=3)
        if system_valid(G, tau, ent)
    }
    assert got == want
    assert len(got) == 6
    assert count_systems(G, tau) == 6


def test_enumerate_known_counts():
    G = AbelianGroup([5, 5])
    tau = SignatureType(0, (5, 5, 5))
    assert count_systems(G, tau) == 480
    assert count_systems(construct_group("Zn:1"), SignatureType(2, ())) == 1


def test_enumerate_unordered_unions_orderings():
    G = construct_group("Sym:3")
    tau = SignatureType(0, (2, 3, 2))
    per_order = sum(count_systems(G, SignatureType(0, o)) for o in tau.orderings())
    assert len(list(enumerate_systems_unordered(G, tau))) == per_order == 18


def test_sigma_set_abelian_is_union_of_cyclic_subgroups():
    G = AbelianGroup([4, 4])
    entries = (G.encode((1, 0)), G.encode((0, 1)), G.encode((3, 3)))
    sig = sigma_set(G, 0, entries)
    want = set()
    for c in entries:
        want |= G.cyclic_subgroup(c)
    assert sig == frozenset(want)


def test_sigma_set_closes_under_conjugation():
    G = construct_group("Sym:4")
    entries = (1, 2, 3)
    sig = sigma_set(G, 0, entries)
    for x in sig:
        for g in G.elements():
            assert G.conj(x, g) in sig


def test_disjointness_is_symmetric_and_detects_overlap():
    G = AbelianGroup([5, 5])
    V1 = GeneratorSystem(G, 0, (G.encode((1, 0)), G.encode((0, 1)), G.encode((4, 4))))
    V2 = GeneratorSystem(G, 0, (G.encode((1, 2)), G.encode((1, 4)), G.encode((3, 4))))
    assert is_disjoint(V1, V2) and is_disjoint(V2, V1)
    assert not is_disjoint(V1, V1)
    overlap = GeneratorSystem(G, 0, (G.encode((1, 1)), G.encode((1, 2)), G.encode((3, 2))))
    assert not is_disjoint(V1, overlap)


def test_curve_genus_and_rh_admissible():
    assert curve_genus(25, SignatureType(0, (5, 5, 5))) == 6
    assert curve_genus(6, SignatureType(0, (2, 2, 3))) == 0
    ok, g = rh_admissible(25, SignatureType(0, (5, 5, 5)))
    assert ok and g == 6
    ok, g = rh_admissible(6, SignatureType(0, (2, 2, 3)))
    assert not ok
    ok, g = rh_admissible(2, SignatureType(1, (2, 2)))
    assert ok and g == 2


def test_surface_invariants_product_quotient():
    inv = surface_invariants(2, SignatureType(1, (2, 2)), SignatureType(2, ()))
    doc = inv.to_json_dict()
    assert (doc["g1"], doc["g2"]) == (2, 3)
    assert (doc["chi"], doc["q"], doc["pg"], doc["ksq"], doc["e"]) == (1, 3, 3, 8, 4)


def test_surface_invariants_rigid_case():
    inv = surface_invariants(25, SignatureType(0, (5, 5, 5)), SignatureType(0, (5, 5, 5)))
    doc = inv.to_json_dict()
    assert (doc["g1"], doc["g2"]) == (6, 6)
    assert (doc["chi"], doc["q"], doc["pg"], doc["ksq"], doc["e"]) == (1, 0, 0, 8, 4)
    assert is_beauville(SignatureType(0, (5, 5, 5)), SignatureType(0, (5, 5, 5)))
    assert not is_beauville(SignatureType(1, (2, 2)), SignatureType(0, (5, 5, 5)))


def test_validate_pair_reports_first_failure():
    G = AbelianGroup([5, 5])
    good1 = GeneratorSystem(G, 0, (G.encode((1, 0)), G.encode((0, 1)), G.encode((4, 4))))
    good2 = GeneratorSystem(G, 0, (G.encode((1, 2)), G.encode((1, 4)), G.encode((3, 4))))
    rep = validate_pair(good1, good2)
    assert rep.ok and rep.genera == (Fraction(6), Fraction(6))
    rep = validate_pair(good1, good1)
    assert not rep.ok and rep.failing_clause == "disjointness"
    broken = GeneratorSystem(G, 0, (G.encode((1, 0)), G.encode((0, 1)), G.encode((1, 1))))
    rep = validate_pair(broken, good2)
    assert not rep.ok and rep.failing_clause == "long-relation (first system)"


def test_period_multisets_with_angle_sum():
    # 3 * (1 - 1/5) = 12/5 picks out the triple (5, 5, 5)
    got = period_multisets_with_angle_sum((2, 3, 5), Fraction(12, 5))
    assert (5, 5, 5) in got
    for ms in got:
        assert sum(Fraction(1) - Fraction(1, m) for m in ms) == Fraction(12, 5)


def test_fraction_to_json():
    assert fraction_to_json(Fraction(8)) == 8
    assert fraction_to_json(Fraction(701, 9)) == "701/9"
    assert fraction_to_json(Fraction(-3, 2)) == "-3/2"


def test_generator_system_accessors():
    G = construct_group("Sym:4")
    V = GeneratorSystem(G, 1, (2, 3, 5, 7))
    assert V.r == 2
    assert V.hyperbolic_pairs == ((2, 3),)
    assert V.branch == (5, 7)
    assert len(V.labels()) == 4
