"""Signature types, generator systems, disjointness, and surface invariants.

A system of generators is stored as a flat tuple of element indices
(a1, b1, ..., ag', bg', c1, ..., cr) subject to the long relation
c1...cr * prod_k [a_k, b_k] = identity.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

from .errors import UserInputError
from .groups import Group


@dataclass(frozen=True)
class SignatureType:
    """Type (g' | m1,...,mr): quotient-curve genus plus branching orders."""

    gprime: int
    periods: tuple[int, ...]

    def __post_init__(self):
        if self.gprime < 0:
            raise UserInputError(f"type {self}: g' must be >= 0")
        object.__setattr__(self, "periods", tuple(int(m) for m in self.periods))
        for m in self.periods:
            if m < 2:
                raise UserInputError(f"type {self}: period {m} invalid, must be >= 2")

    @property
    def r(self) -> int:
        return len(self.periods)

    def canonical(self) -> tuple[int, tuple[int, ...]]:
        return (self.gprime, tuple(sorted(self.periods)))

    def unordered_eq(self, other: "SignatureType") -> bool:
        return self.canonical() == other.canonical()

    def orderings(self) -> list[tuple[int, ...]]:
        """Distinct orderings of the period multiset, lexicographically."""
        return sorted(set(permutations(self.periods)))

    def __str__(self) -> str:
        return f"{self.gprime}|" + ",".join(str(m) for m in self.periods)

    @staticmethod
    def parse(text: str) -> "SignatureType":
        if "|" not in text:
            raise UserInputError(
                f"bad type spec {text!r}: expected \"<gprime>|<m1>,<m2>,...\" (e.g. \"0|5,5,5\", \"2|\")"
            )
        left, _, right = text.partition("|")
        left = left.strip()
        if not left.isdigit():
            raise UserInputError(f"bad type spec {text!r}: g' part {left!r} is not a non-negative integer")
        right = right.strip()
        if not right:
            return SignatureType(int(left), ())
        periods = []
        for pos, tok in enumerate(right.split(","), start=1):
            tok = tok.strip()
            if not tok.isdigit():
                raise UserInputError(
                    f"bad type spec {text!r}: period #{pos} ({tok!r}) is not a positive integer"
                )
            periods.append(int(tok))
        return SignatureType(int(left), tuple(periods))


@dataclass(frozen=True)
class GeneratorSystem:
    group: Group
    gprime: int
    entries: tuple[int, ...]

    @property
    def r(self) -> int:
        return len(self.entries) - 2 * self.gprime

    @property
    def hyperbolic_pairs(self) -> tuple[tuple[int, int], ...]:
        return tuple(
            (self.entries[2 * k], self.entries[2 * k + 1]) for k in range(self.gprime)
        )

    @property
    def branch(self) -> tuple[int, ...]:
        return self.entries[2 * self.gprime :]

    def signature(self) -> SignatureType:
        return SignatureType(
            self.gprime, tuple(self.group.element_order(c) for c in self.branch)
        )

    def labels(self) -> tuple[str, ...]:
        return tuple(self.group.element_label(x) for x in self.entries)


def long_relation_value(G: Group, gprime: int, entries: tuple[int, ...]) -> int:
    """c1...cr * prod_k [a_k, b_k], which must equal the identity."""
    acc = G.identity
    for c in entries[2 * gprime :]:
        acc = G.mul(acc, c)
    for k in range(gprime):
        a, b = entries[2 * k], entries[2 * k + 1]
        acc = G.mul(acc, G.comm(a, b))
    return acc


def long_relation_holds(G: Group, gprime: int, entries: tuple[int, ...]) -> bool:
    return long_relation_value(G, gprime, entries) == G.identity


def system_valid(G: Group, tau: SignatureType, entries: tuple[int, ...]) -> bool:
    if len(entries) != 2 * tau.gprime + tau.r:
        return False
    branch = entries[2 * tau.gprime :]
    if any(G.element_order(c) != m for c, m in zip(branch, tau.periods)):
        return False
    if not long_relation_holds(G, tau.gprime, entries):
        return False
    return G.generates(entries)


def enumerate_systems(G: Group, tau: SignatureType):
    """Yield every system of exact (ordered) type tau once, lexicographically.

    Free entries are (a1, b1, ..., ag', bg', c1, ..., c_{r-1}); the last
    branch entry is solved from the long relation, then filtered on order
    and generation. For r = 0 the commutator relation is checked directly.
    """
    gp, r = tau.gprime, tau.r
    all_elems = list(G.elements())
    by_order: dict[int, list[int]] = {}
    for m in set(tau.periods):
        by_order[m] = [x for x in all_elems if G.element_order(x) == m]
    slots = [all_elems] * (2 * gp) + [by_order[m] for m in tau.periods[: r - 1 if r else 0]]

    def relation_tail(prefix: tuple[int, ...]) -> int:
        # Solve c_r: (c1...c_{r-1}) * c_r * K = e.
        head = G.identity
        for c in prefix[2 * gp :]:
            head = G.mul(head, c)
        k = G.identity
        for j in range(gp):
            k = G.mul(k, G.comm(prefix[2 * j], prefix[2 * j + 1]))
        return G.mul(G.inv(head), G.inv(k))

    if r == 0:
        def rec0(i: int, prefix: tuple[int, ...]):
            if i == 2 * gp:
                if long_relation_holds(G, gp, prefix) and G.generates(prefix):
                    yield prefix
                return
            for x in all_elems:
                yield from rec0(i + 1, prefix + (x,))

        yield from rec0(0, ())
        return

    m_last = tau.periods[-1]

    def rec(i: int, prefix: tuple[int, ...]):
        if i == len(slots):
            c_last = relation_tail(prefix)
            if G.element_order(c_last) != m_last:
                return
            full = prefix + (c_last,)
            if G.generates(full):
                yield full
            return
        for x in slots[i]:
            yield from rec(i + 1, prefix + (x,))

    yield from rec(0, ())


def enumerate_systems_unordered(G: Group, tau: SignatureType):
    """Union of enumerate_systems over the distinct orderings of tau's periods."""
    for ordering in tau.orderings():
        yield from enumerate_systems(G, SignatureType(tau.gprime, ordering))


def count_systems(G: Group, tau: SignatureType) -> int:
    return sum(1 for _ in enumerate_systems(G, tau))


def sigma_set(G: Group, gprime: int, entries: tuple[int, ...]) -> frozenset[int]:
    """All conjugates of all powers of the branch entries, plus the identity."""
    out = {G.identity}
    branch = entries[2 * gprime :]
    abelian = G.is_abelian()
    for c in branch:
        powers = G.cyclic_subgroup(c)
        if abelian:
            out.update(powers)
        else:
            for y in powers:
                for g in G.elements():
                    out.add(G.conj(y, g))
    return frozenset(out)


def sigma_of_system(V: GeneratorSystem) -> frozenset[int]:
    return sigma_set(V.group, V.gprime, V.entries)


def is_disjoint(V1: GeneratorSystem, V2: GeneratorSystem) -> bool:
    if V1.group is not V2.group and V1.group.name != V2.group.name:
        raise UserInputError(
            f"cannot compare systems over different groups {V1.group.name} vs {V2.group.name}"
        )
    s1 = sigma_of_system(V1)
    s2 = sigma_of_system(V2)
    return len(s1 & s2) == 1


def curve_genus(group_order: int, tau: SignatureType) -> Fraction:
    """g with 2g - 2 = |G| (2g' - 2 + sum(1 - 1/m_i)), exact."""
    s = sum(Fraction(1) - Fraction(1, m) for m in tau.periods)
    return 1 + Fraction(group_order, 2) * (2 * tau.gprime - 2 + s)


def rh_admissible(group_order: int, tau: SignatureType) -> tuple[bool, Fraction]:
    """Whether the covering-curve genus is an integer >= 2, plus the genus."""
    g = curve_genus(group_order, tau)
    return (g.denominator == 1 and g >= 2), g


@dataclass(frozen=True)
class PairReport:
    ok: bool
    failing_clause: str | None
    genera: tuple[Fraction, Fraction] | None


def validate_pair(V1: GeneratorSystem, V2: GeneratorSystem) -> PairReport:
    """Check both systems' invariants, disjointness, and genus >= 2 both sides."""
    for side, V in (("first", V1), ("second", V2)):
        if not long_relation_holds(V.group, V.gprime, V.entries):
            return PairReport(False, f"long-relation ({side} system)", None)
        if any(V.group.element_order(c) < 2 for c in V.branch):
            return PairReport(False, f"branch-order ({side} system)", None)
        if not V.group.generates(V.entries):
            return PairReport(False, f"generation ({side} system)", None)
    if not is_disjoint(V1, V2):
        return PairReport(False, "disjointness", None)
    genera = []
    for side, V in (("first", V1), ("second", V2)):
        ok, g = rh_admissible(V.group.order, V.signature())
        if g.denominator != 1:
            return PairReport(False, f"genus-integrality ({side} system)", None)
        if g < 2:
            return PairReport(False, f"genus-minimum ({side} system)", None)
        genera.append(g)
    return PairReport(True, None, (genera[0], genera[1]))


@dataclass(frozen=True)
class SurfaceInvariants:
    g1: int
    g2: int
    chi: Fraction
    ksq: Fraction
    e: Fraction
    q: int
    pg: Fraction
    mu1: Fraction | None
    mu2: Fraction | None

    def to_json_dict(self) -> dict:
        return {
            "g1": self.g1,
            "g2": self.g2,
            "chi": fraction_to_json(self.chi),
            "ksq": fraction_to_json(self.ksq),
            "e": fraction_to_json(self.e),
            "q": self.q,
            "pg": fraction_to_json(self.pg),
            "mu1": fraction_to_json(self.mu1) if self.mu1 is not None else None,
            "mu2": fraction_to_json(self.mu2) if self.mu2 is not None else None,
        }


def fraction_to_json(fr: Fraction):
    """Exact rendering: integer when integral, else the string 'num/den'."""
    if fr.denominator == 1:
        return int(fr)
    return f"{fr.numerator}/{fr.denominator}"


def surface_invariants(
    group_order: int, tau1: SignatureType, tau2: SignatureType
) -> SurfaceInvariants:
    genera = []
    for tau in (tau1, tau2):
        ok, g = rh_admissible(group_order, tau)
        if not ok:
            raise UserInputError(
                f"type {tau} not admissible for order {group_order}: genus {g} must be an integer >= 2"
            )
        genera.append(int(g))
    g1, g2 = genera
    chi = Fraction((g1 - 1) * (g2 - 1), group_order)
    q = tau1.gprime + tau2.gprime
    mus = []
    for tau in (tau1, tau2):
        if tau.r == 3 and tau.gprime == 0:
            mus.append(sum(Fraction(1, m) for m in tau.periods))
        else:
            mus.append(None)
    return SurfaceInvariants(
        g1=g1,
        g2=g2,
        chi=chi,
        ksq=8 * chi,
        e=4 * chi,
        q=q,
        pg=chi - 1 + q,
        mu1=mus[0],
        mu2=mus[1],
    )


def is_beauville(tau1: SignatureType, tau2: SignatureType) -> bool:
    return tau1.gprime == 0 and tau2.gprime == 0 and tau1.r == 3 and tau2.r == 3


def period_multisets_with_angle_sum(allowed_orders, target: Fraction) -> list[tuple[int, ...]]:
    """Non-decreasing period tuples m_i >= 2 from allowed_orders with
    sum(1 - 1/m_i) equal to target exactly."""
    allowed = sorted({m for m in allowed_orders if m >= 2})
    out: list[tuple[int, ...]] = []

    def rec(start_idx: int, remaining: Fraction, acc: tuple[int, ...]):
        if remaining == 0:
            out.append(acc)
            return
        if remaining < 0:
            return
        for i in range(start_idx, len(allowed)):
            m = allowed[i]
            term = 1 - Fraction(1, m)
            if term > remaining:
                break
            rec(i, remaining - term, acc + (m,))

    rec(0, target, ())
    return out
