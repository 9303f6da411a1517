from __future__ import annotations

from fractions import Fraction

import pytest

from hurwitz_components.abelian import (
    SIX_RENORMALIZERS,
    AbelianProfile,
    admits_unmixed_abelian,
    brute_force_admits,
    n_count,
    quadruple_classes,
    quadruple_count,
    renormalizer_matrices,
    sandwich_bounds,
    theta,
    theta_is_integral,
    theta_parts,
)
from hurwitz_components.errors import BudgetExceeded, UserInputError
from hurwitz_components.groups import AbelianGroup

KNOWN_THETA = {
    5: Fraction(1),
    7: Fraction(7),
    11: Fraction(701, 9),
    13: Fraction(538, 3),
    25: Fraction(225),
    35: Fraction(132),
}

KNOWN_N = {5: 24, 7: 360, 11: 5040, 13: 11880, 25: 15000, 35: 8640}


@pytest.mark.parametrize("n", sorted(KNOWN_THETA))
def test_theta_known_values(n):
    assert theta(n) == KNOWN_THETA[n]
    assert theta_is_integral(n) == (KNOWN_THETA[n].denominator == 1)


@pytest.mark.parametrize("n", sorted(KNOWN_N))
def test_n_count_closed_form_vs_enumeration(n):
    assert n_count(n) == KNOWN_N[n]
    assert quadruple_count(n) == KNOWN_N[n]


def test_theta_parts_recombine():
    for n in (5, 7, 11, 25, 35, 49):
        t1, t2, t3, t4 = theta_parts(n)
        assert (t1 + 4 * t2 + 6 * t3 + 12 * t4) / 72 == theta(n)


def test_sandwich_bounds_frame_theta_when_integral():
    for n in (5, 7, 25, 35):
        lo, hi = sandwich_bounds(n)
        assert lo == Fraction(n_count(n), 72)
        assert hi == Fraction(n_count(n), 6)
        assert lo <= theta(n) <= hi


@pytest.mark.parametrize("n", [4, 6, 10, 15, 21, 1])
def test_theta_rejects_bad_modulus(n):
    with pytest.raises(UserInputError):
        theta(n)
    with pytest.raises(UserInputError):
        quadruple_count(n)


def test_quadruple_classes_match_enumerated_components():
    # class counts at the first four valid moduli, and the two composite
    # moduli where the closed form is integral
    expected = {5: 1, 7: 7, 11: 79, 13: 178}
    for n, h in expected.items():
        count, sizes = quadruple_classes(n)
        assert count == h
        assert sum(sizes) == n_count(n)
        assert sizes == sorted(sizes, reverse=True)


def test_quadruple_class_count_equals_theta_at_composite_moduli():
    for n in (25, 35):
        count, sizes = quadruple_classes(n)
        assert count == theta(n)
        assert sum(sizes) == n_count(n)


def test_renormalizers_derived_from_triple_permutations():
    assert set(renormalizer_matrices()) == set(SIX_RENORMALIZERS)
    assert len(SIX_RENORMALIZERS) == 6


def test_profile_conventions():
    prof = AbelianProfile((2, 6, 6))
    assert prof.t == 3
    assert prof.n(0) == 1 and prof.n(-2) == 1
    assert prof.n(3) == 6
    assert prof.l(0, 2) == 0
    assert prof.l(3, 3) == 1
    assert prof.l(1, 2) == 1


CRITERION_ANCHORS = [
    ((5,), 3, 3, False),
    ((5, 5), 3, 3, True),
    ((5, 5), 5, 4, True),
    ((3, 3), 3, 3, False),
    ((3, 3), 4, 4, True),
    ((2, 2, 2), 5, 5, False),
    ((2, 2, 2, 2), 5, 5, True),
    ((3, 3, 3, 3), 5, 5, True),
    ((6, 6), 3, 3, False),
    ((6, 6), 5, 5, False),
    ((2, 2, 4), 5, 5, False),
    ((4, 4), 4, 4, False),
    ((4, 4), 5, 5, False),
    ((2, 4), 5, 5, False),
]


@pytest.mark.parametrize("chain,r1,r2,want", CRITERION_ANCHORS)
def test_admits_criterion_anchors(chain, r1, r2, want):
    assert admits_unmixed_abelian(AbelianProfile(chain), r1, r2).admits is want


@pytest.mark.parametrize("chain,r1,r2,want", CRITERION_ANCHORS)
def test_brute_force_matches_anchors(chain, r1, r2, want):
    assert brute_force_admits(chain, r1, r2) is want


def test_admits_report_names_failing_clause():
    rep = admits_unmixed_abelian(AbelianProfile((5,)), 3, 3)
    assert not rep.admits
    failing = [c["clause"] for c in rep.clauses if not c["holds"]]
    assert "n_t = n_{t-1}" in failing
    doc = rep.to_json_dict()
    assert set(doc) == {"admits", "clauses"}


def test_admits_requires_reasonable_sizes():
    with pytest.raises(UserInputError):
        admits_unmixed_abelian(AbelianProfile((5, 5)), 2, 3)
    with pytest.raises(UserInputError):
        brute_force_admits((5, 5), 3, 2)


def test_trivial_group_never_admits():
    assert not admits_unmixed_abelian(AbelianProfile(()), 3, 3).admits
    assert not brute_force_admits((1, 1), 4, 4)


def test_brute_force_budget_guard():
    # a rank-4 part at p = 2 alongside another prime exceeds the split budget
    with pytest.raises(BudgetExceeded):
        brute_force_admits((2, 2, 2, 2, 3, 3, 3, 3), 5, 5)


def test_criterion_profile_from_group_normalizes():
    prof = AbelianProfile.from_group(AbelianGroup([3, 2, 2, 3]))
    assert prof.chain == (6, 6)


def test_criterion_vs_search_random_sample(rng):
    # moderate seeded sweep; the exhaustive sweep runs in the acceptance suite
    pool = [
        (2, 2), (2, 4), (3, 3), (5, 5), (7, 7), (2, 2, 2), (2, 2, 4),
        (2, 4, 4), (3, 3, 3), (2, 2, 2, 2), (2, 6, 6), (10, 10), (2, 2, 6),
        (3, 3, 9), (4, 8), (2, 8), (9, 9), (5, 25), (2, 2, 8), (6, 6),
    ]
    for chain in rng.sample(pool, 12):
        prof = AbelianProfile.from_group(AbelianGroup(list(chain)))
        for r1, r2 in ((3, 3), (4, 5), (5, 5)):
            want = brute_force_admits(chain, r1, r2)
            got = admits_unmixed_abelian(prof, r1, r2).admits
            assert want == got, (chain, r1, r2)
