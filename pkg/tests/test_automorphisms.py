from __future__ import annotations

import math

import pytest
import sympy

from hurwitz_components.automorphisms import (
    _backtracking_auts,
    automorphism_group,
    compose_maps,
    inner_automorphisms,
    invert_map,
    is_automorphism,
    minimal_generating_tuple,
)
from hurwitz_components.groups import AbelianGroup, construct_group


def _abelian_aut_order_oracle(moduli) -> int:
    """Closed-form |Aut| for a finite abelian group, prime by prime.

    For a p-group of type p^{e_1} <= ... <= p^{e_n} the order is
    prod_k (p^{d_k} - p^{k-1}) * prod_j p^{e_j (n - d_j)} * prod_i p^{(e_i - 1)(n - c_i + 1)}
    where d_k = max{l : e_l = e_k} and c_k = min{l : e_l = e_k}.
    """
    per_prime: dict[int, list[int]] = {}
    for m in moduli:
        for p, a in sympy.factorint(m).items():
            per_prime.setdefault(p, []).append(a)
    total = 1
    for p, exps in per_prime.items():
        e = sorted(exps)
        n = len(e)
        d = [max(l for l in range(1, n + 1) if e[l - 1] == e[k - 1]) for k in range(1, n + 1)]
        c = [min(l for l in range(1, n + 1) if e[l - 1] == e[k - 1]) for k in range(1, n + 1)]
        part = 1
        for k in range(1, n + 1):
            part *= p ** d[k - 1] - p ** (k - 1)
        for j in range(1, n + 1):
            part *= p ** (e[j - 1] * (n - d[j - 1]))
        for i in range(1, n + 1):
            part *= p ** ((e[i - 1] - 1) * (n - c[i - 1] + 1))
        total *= part
    return total


@pytest.mark.parametrize(
    "moduli",
    [(5,), (8,), (12,), (2, 2), (5, 5), (2, 4), (3, 9), (2, 2, 4), (4, 4), (2, 2, 2)],
)
def test_abelian_aut_order_matches_closed_form(moduli):
    G = AbelianGroup(list(moduli))
    assert automorphism_group(G).order == _abelian_aut_order_oracle(G.moduli)


def test_homocyclic_route_agrees_with_backtracking():
    for moduli in ((3, 3), (4, 4), (2, 2, 2)):
        G = AbelianGroup(list(moduli))
        fast = automorphism_group(G)
        slow = _backtracking_auts(G)
        assert fast.order == slow.order
        if fast.maps is not None and slow.maps is not None:
            assert sorted(fast.maps) == sorted(slow.maps)


@pytest.mark.parametrize(
    "spec,expected",
    [("Sym:3", 6), ("Sym:4", 24), ("Alt:4", 24), ("Alt:5", 120), ("Zn:5,5", 480)],
)
def test_known_automorphism_group_orders(spec, expected):
    assert automorphism_group(construct_group(spec)).order == expected


def test_quaternion_aut_and_inn(q8):
    aut = automorphism_group(q8)
    assert aut.order == 24
    assert len(inner_automorphisms(q8)) == 4


def test_inner_count_is_index_of_center():
    for spec in ("Sym:3", "Sym:4", "Zn:9", "Alt:4"):
        G = construct_group(spec)
        inn = inner_automorphisms(G)
        assert len(inn) == G.order // len(G.center())
        assert inn[0] == tuple(G.elements())


def test_every_map_is_an_automorphism(rng, q8):
    for G in (construct_group("Sym:4"), AbelianGroup([2, 4]), q8):
        aut = automorphism_group(G)
        maps = aut.acting_maps()
        for m in maps:
            assert is_automorphism(G, m)
        if aut.maps is None:
            return
        universe = set(aut.maps)
        for _ in range(50):
            m1, m2 = rng.choice(aut.maps), rng.choice(aut.maps)
            assert compose_maps(m1, m2) in universe
            assert invert_map(m1) in universe


def test_generator_maps_close_to_full_group():
    G = AbelianGroup([5, 5])
    aut = automorphism_group(G)
    frontier = {tuple(G.elements())}
    seen = set(frontier)
    while frontier:
        nxt = set()
        for m in frontier:
            for g in aut.generator_maps:
                c = compose_maps(m, g)
                if c not in seen:
                    seen.add(c)
                    nxt.add(c)
        frontier = nxt
    assert len(seen) == aut.order == 480


def test_automorphisms_preserve_element_orders(rng):
    G = construct_group("Sym:4")
    aut = automorphism_group(G)
    for m in aut.acting_maps():
        for x in G.elements():
            assert G.element_order(m[x]) == G.element_order(x)


def test_minimal_generating_tuple(q8):
    for G in (construct_group("Sym:4"), construct_group("Alt:5"), q8, AbelianGroup([2, 2, 4])):
        gens = minimal_generating_tuple(G)
        assert G.generates(gens)
    assert minimal_generating_tuple(construct_group("Zn:1")) == ()


def test_crt_collapses_aut():
    # Zn:2,3 is cyclic of order 6, so only inversion remains
    assert automorphism_group(AbelianGroup([2, 3])).order == math.prod([2])
