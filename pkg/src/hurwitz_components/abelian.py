"""Closed-form counts and existence tests for abelian groups.

Three independent routes live here:

* theta(n): the exact rational formula predicting the component count for
  (Z/n)^2 with triple type (n,n,n), gcd(n,6) = 1;
* quadruple machinery: the normalized parameter space (a,b,c,d) with its
  residual symmetry, giving a direct class count;
* existence: the five-clause divisor-chain criterion, cross-checked by a
  from-scratch searcher over atom footprints.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import BudgetExceeded, UserInputError
from .groups import AbelianGroup, prime_factorization


# ---------------------------------------------------------------------------
# closed-form counting for G = (Z/n)^2, type (0 | n,n,n), gcd(n,6) = 1


def _require_beauville_modulus(n: int) -> None:
    if n < 5 or math.gcd(n, 6) != 1:
        raise UserInputError(f"modulus must be >= 5 and coprime to 6, got {n}")


def n_count(n: int) -> int:
    """Closed form for the number of valid quadruples mod n."""
    _require_beauville_modulus(n)
    total = 1
    for p, k in prime_factorization(n).items():
        total *= p ** (4 * k - 4) * (p - 1) * (p - 2) * (p - 3) * (p - 4)
    return total


def quadruple_valid_mask(n: int) -> np.ndarray:
    """Boolean mask over all (a,b,c,d) in (Z/n)^4, flattened C-order."""
    _require_beauville_modulus(n)
    v = np.arange(n, dtype=np.int64)
    unit = np.gcd(v, n) == 1
    a = v[:, None, None, None]
    b = v[None, :, None, None]
    c = v[None, None, :, None]
    d = v[None, None, None, :]
    ok = (
        unit[a]
        & unit[b]
        & unit[c]
        & unit[d]
        & unit[(a - b) % n]
        & unit[(a + c) % n]
        & unit[(c - d) % n]
        & unit[(b + d) % n]
        & unit[(a + c - b - d) % n]
        & unit[(a * d - b * c) % n]
    )
    return ok.reshape(-1)


def quadruple_count(n: int) -> int:
    """Enumerative count of valid quadruples; must equal n_count(n)."""
    return int(quadruple_valid_mask(n).sum())


def theta_parts(n: int) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    """The four summands of the closed-form count, as exact rationals."""
    _require_beauville_modulus(n)
    fac = prime_factorization(n)
    t1 = Fraction(n**4)
    for p in fac:
        t1 *= Fraction(p - 1, p) * Fraction(p - 2, p) * Fraction(p - 3, p) * Fraction(p - 4, p)
    t2 = Fraction(1)
    t3 = Fraction(1)
    t4 = Fraction(1)
    for p, k in fac.items():
        pe2 = Fraction(p ** (2 * k))
        if p % 4 == 1:
            t2 *= pe2 * Fraction(p - 1, p) * Fraction(p - 2, p)
        else:
            t2 *= pe2 * Fraction(p - 1, p) * Fraction(p - 4, p)
        t3 *= pe2 * Fraction(p - 3, p) * Fraction(p - 5, p)
        t4 *= Fraction(0) if p % 3 == 2 else Fraction(2)
    return t1, t2, t3, t4


def theta(n: int) -> Fraction:
    """Predicted component count for ((Z/n)^2; (n,n,n), (n,n,n))."""
    t1, t2, t3, t4 = theta_parts(n)
    return (t1 + 4 * t2 + 6 * t3 + 12 * t4) / 72


def theta_is_integral(n: int) -> bool:
    return theta(n).denominator == 1


def sandwich_bounds(n: int) -> tuple[Fraction, Fraction]:
    """Lower and upper bounds N/72 <= h <= N/6."""
    N = n_count(n)
    return Fraction(N, 72), Fraction(N, 6)


# ---------------------------------------------------------------------------
# quadruple classes: the residual symmetry on normalized pairs

SIX_RENORMALIZERS: tuple[tuple[tuple[int, int], tuple[int, int]], ...] = (
    ((1, 0), (0, 1)),
    ((0, 1), (1, 0)),
    ((-1, 0), (-1, 1)),
    ((1, -1), (0, -1)),
    ((-1, 1), (-1, 0)),
    ((0, -1), (1, -1)),
)


def renormalizer_matrices() -> list[tuple[tuple[int, int], tuple[int, int]]]:
    """Derive the residual matrices from first principles.

    Normalizing the first system to the standard triple (e1, e2, -e1-e2)
    leaves the choices of ordered basis pair from that triple; the matrix
    sending a chosen pair back to (e1, e2) is the inverse of its column
    matrix. There are exactly six.
    """
    e1, e2 = (1, 0), (0, 1)
    e3 = (-1, -1)
    triple = [e1, e2, e3]
    out = []
    for u, v in itertools.permutations(triple, 2):
        col = ((u[0], v[0]), (u[1], v[1]))
        det = col[0][0] * col[1][1] - col[0][1] * col[1][0]
        if det not in (1, -1):
            continue
        inv_det = det  # det is +-1 so it is its own inverse
        adj = ((col[1][1], -col[0][1]), (-col[1][0], col[0][0]))
        m = tuple(tuple(inv_det * adj[i][j] for j in range(2)) for i in range(2))
        out.append(m)
    return out


def _mat_apply(m, x, n):
    return ((m[0][0] * x[0] + m[0][1] * x[1]) % n, (m[1][0] * x[0] + m[1][1] * x[1]) % n)


def quadruple_classes(n: int) -> tuple[int, list[int]]:
    """Class count and class sizes of valid quadruples under the residual
    symmetry: column permutations, the six renormalizers, and the side swap."""
    _require_beauville_modulus(n)
    mask = quadruple_valid_mask(n)
    ids = np.flatnonzero(mask)
    valid = set(int(i) for i in ids)

    def unpack(q: int) -> tuple[int, int, int, int]:
        d = q % n
        q //= n
        c = q % n
        q //= n
        b = q % n
        return q // n, b, c, d

    def pack(a: int, b: int, c: int, d: int) -> int:
        return ((a * n + b) * n + c) * n + d

    def neighbors(q: int) -> list[int]:
        a, b, c, d = unpack(q)
        out = []
        # column transpositions generating the S3 on (x1, x2, x3 = -x1-x2)
        out.append(pack(c, d, a, b))
        out.append(pack(a, b, (-a - c) % n, (-b - d) % n))
        # renormalizers act on both columns simultaneously
        for m in SIX_RENORMALIZERS:
            x1 = _mat_apply(m, (a, b), n)
            x2 = _mat_apply(m, (c, d), n)
            out.append(pack(x1[0], x1[1], x2[0], x2[1]))
        # swap: the inverse matrix carries the standard triple to the other side
        det = (a * d - b * c) % n
        det_inv = pow(det, -1, n)
        out.append(
            pack((det_inv * d) % n, (-det_inv * b) % n, (-det_inv * c) % n, (det_inv * a) % n)
        )
        return out

    seen: set[int] = set()
    sizes: list[int] = []
    for seed in ids:
        seed = int(seed)
        if seed in seen:
            continue
        seen.add(seed)
        frontier = [seed]
        size = 0
        while frontier:
            nxt = []
            for q in frontier:
                size += 1
                for nb in neighbors(q):
                    if nb not in seen:
                        if nb not in valid:
                            raise AssertionError("symmetry image is not a valid quadruple")
                        seen.add(nb)
                        nxt.append(nb)
            frontier = nxt
        sizes.append(size)
    return len(sizes), sorted(sizes, reverse=True)


# ---------------------------------------------------------------------------
# existence criterion: five clauses on the invariant-factor chain


@dataclass
class AbelianProfile:
    """Invariant factors d_1 | d_2 | ... | d_t with the out-of-range
    conventions n_i = 1 and l_i(p) = 0 for i <= 0."""

    chain: tuple[int, ...]

    @classmethod
    def from_group(cls, G: AbelianGroup) -> AbelianProfile:
        return cls(tuple(m for m in G.moduli if m > 1))

    @property
    def t(self) -> int:
        return len(self.chain)

    def n(self, i: int) -> int:
        if i < 1:
            return 1
        return self.chain[i - 1]

    def l(self, i: int, p: int) -> int:
        n = self.n(i)
        v = 0
        while n % p == 0:
            n //= p
            v += 1
        return v


@dataclass
class AdmitsReport:
    admits: bool
    clauses: list[dict]

    def to_json_dict(self) -> dict:
        return {"admits": self.admits, "clauses": self.clauses}


def admits_unmixed_abelian(profile: AbelianProfile, r1: int, r2: int) -> AdmitsReport:
    """Five-clause test: does the group admit an unmixed pair of sizes (r1, r2)?"""
    if r1 < 3 or r2 < 3:
        raise UserInputError("both sizes must be at least 3")
    t = profile.t
    clauses: list[dict] = []

    def add(name: str, holds: bool) -> bool:
        clauses.append({"clause": name, "holds": holds})
        return holds

    ok = add("group is nontrivial", t >= 1)
    ok &= add("r1,r2 >= t+1", r1 >= t + 1 and r2 >= t + 1)
    ok &= add("n_t = n_{t-1}", profile.n(t) == profile.n(t - 1))
    three_binds = profile.l(t - 1, 3) > profile.l(t - 2, 3)
    ok &= add(
        "if l_{t-1}(3) > l_{t-2}(3) then r1,r2 >= 4",
        (not three_binds) or (r1 >= 4 and r2 >= 4),
    )
    ok &= add("l_{t-1}(2) = l_{t-2}(2)", profile.l(t - 1, 2) == profile.l(t - 2, 2))
    two_binds = profile.l(t - 2, 2) > profile.l(t - 3, 2)
    ok &= add(
        "if l_{t-2}(2) > l_{t-3}(2) then r1,r2 >= 5 and not both odd",
        (not two_binds) or (r1 >= 5 and r2 >= 5 and not (r1 % 2 == 1 and r2 % 2 == 1)),
    )
    return AdmitsReport(bool(ok), clauses)


# ---------------------------------------------------------------------------
# from-scratch existence search (the oracle for the criterion above)
#
# Reductions used, all elementary:
#   * a length-r system has r nonzero entries with zero sum; its span equals
#     the span of the first r-1 entries, so each side needs rank <= r_i - 1;
#   * Sigma sets of abelian systems are unions of cyclic subgroups, and two
#     subgroups meet trivially iff they share no prime-order subgroup (atom);
#   * everything splits over the primary decomposition, with slot coverage
#     requiring the per-prime nonzero-entry counts to sum to at least r.

BRUTE_FORCE_SUBSET_LIMIT = 2_000_000
MULTI_PRIME_ATOM_LIMIT = 12


def _primary_chains(chain: tuple[int, ...]) -> dict[int, tuple[int, ...]]:
    out: dict[int, list[int]] = {}
    for m in chain:
        for p, k in prime_factorization(m).items():
            out.setdefault(p, []).append(p**k)
    return {p: tuple(sorted(v)) for p, v in out.items()}


class _PrimaryGroup:
    """A p-group Z/q_1 x ... x Z/q_s with atom bookkeeping."""

    def __init__(self, p: int, chain: tuple[int, ...]):
        self.p = p
        self.chain = chain
        self.rank = len(chain)
        self.order = math.prod(chain)
        self.elements = list(itertools.product(*[range(q) for q in chain]))
        self.zero = tuple(0 for _ in chain)
        self.atom_of: dict[tuple[int, ...], int] = {}
        atoms: dict[tuple[int, ...], int] = {}
        for v in self.elements:
            if v == self.zero:
                continue
            o = self._order(v)
            a = tuple((x * (o // p)) % q for x, q in zip(v, chain))
            canon = min(
                tuple((k * x) % q for x, q in zip(a, chain)) for k in range(1, p)
            )
            if canon not in atoms:
                atoms[canon] = len(atoms)
            self.atom_of[v] = atoms[canon]
        self.atom_count = len(atoms)
        self.nonzero = [v for v in self.elements if v != self.zero]

    def _order(self, v: tuple[int, ...]) -> int:
        return math.lcm(*[q // math.gcd(x, q) for x, q in zip(v, self.chain)]) if any(v) else 1

    def add(self, a, b):
        return tuple((x + y) % q for x, y, q in zip(a, b, self.chain))

    def spans(self, vs) -> bool:
        # generation of an abelian p-group is exactly spanning its Frattini
        # quotient, which is coordinatewise reduction mod p
        p = self.p
        mat = [[x % p for x in v] for v in vs]
        rank = 0
        for c in range(self.rank):
            piv = next((r for r in range(rank, len(mat)) if mat[r][c]), None)
            if piv is None:
                continue
            mat[rank], mat[piv] = mat[piv], mat[rank]
            inv = pow(mat[rank][c], -1, p)
            for r in range(len(mat)):
                if r != rank and mat[r][c]:
                    f = (mat[r][c] * inv) % p
                    mat[r] = [(mat[r][cc] - f * mat[rank][cc]) % p for cc in range(self.rank)]
            rank += 1
        return rank == self.rank

    def allowed_elements(self, allowed_atoms: frozenset[int]) -> list:
        return [v for v in self.nonzero if self.atom_of[v] in allowed_atoms]


def _mod_p_reduce(basis: list, v, p: int):
    """Reduce v against an echelon basis of (pivot, row) pairs; return the
    extended basis if v is independent, else None."""
    row = list(v)
    for pc, br in basis:
        if row[pc] % p:
            f = (row[pc] * pow(br[pc], -1, p)) % p
            row = [(a - f * b) % p for a, b in zip(row, br)]
    piv = next((i for i, a in enumerate(row) if a % p), None)
    if piv is None:
        return None
    return basis + [(piv, row)]


def _suffix_sums(gp: _PrimaryGroup, elems: list, r: int) -> list[list[set]]:
    """sums[pos][k] = totals achievable with k entries drawn (with repeats,
    non-decreasing) from elems[pos:]."""
    n = len(elems)
    sums: list[list[set]] = [[set() for _ in range(r + 1)] for _ in range(n + 1)]
    for pos in range(n + 1):
        sums[pos][0].add(gp.zero)
    for pos in range(n - 1, -1, -1):
        for k in range(1, r + 1):
            acc = set(sums[pos + 1][k])
            for s in sums[pos][k - 1]:
                acc.add(gp.add(s, elems[pos]))
            sums[pos][k] = acc
    return sums


def _has_system(gp: _PrimaryGroup, allowed_atoms: frozenset[int], r: int) -> bool:
    """Is there an r-tuple of nonzero entries with atoms inside allowed_atoms,
    zero sum, spanning the whole p-group?"""
    elems = gp.allowed_elements(allowed_atoms)
    if len(elems) == 0 or not gp.spans(elems):
        return False
    p = gp.p
    sums = _suffix_sums(gp, elems, r)
    reduced = [[x % p for x in v] for v in elems]

    def dfs(pos: int, count: int, total, basis: list) -> bool:
        left = r - count
        if left == 0:
            return total == gp.zero and len(basis) == gp.rank
        if len(basis) + left < gp.rank:
            return False
        need = tuple((-x) % q for x, q in zip(total, gp.chain))
        if need not in sums[pos][left]:
            return False
        for i in range(pos, len(elems)):
            ext = _mod_p_reduce(basis, reduced[i], p)
            if dfs(i, count + 1, gp.add(total, elems[i]), ext if ext else basis):
                return True
        return False

    return dfs(0, 0, gp.zero, [])


def _quick_yes(gp: _PrimaryGroup, r1: int, r2: int) -> bool:
    """Constructive attempt: build side-1 systems around spanning tuples and
    check the complementary atoms support a side-2 system. Only ever
    returns a sound True."""
    atoms = frozenset(range(gp.atom_count))
    tried: set[frozenset[int]] = set()
    # spanning tuples: the coordinate generators plus lexicographic variants
    units = []
    for i in range(gp.rank):
        v = [0] * gp.rank
        v[i] = 1
        units.append(tuple(v))
    candidates = [tuple(units)]
    for v in gp.nonzero[:40]:
        alt = list(units)
        alt[-1] = v
        if gp.spans(alt):
            candidates.append(tuple(alt))
    for base in candidates:
        for pad in gp.nonzero[:20]:
            entries = list(base) + [pad] * (r1 - 1 - len(base))
            if len(entries) != r1 - 1:
                continue
            total = gp.zero
            for v in entries:
                total = gp.add(total, v)
            last = tuple((-x) % q for x, q in zip(total, gp.chain))
            if last == gp.zero:
                continue
            entries.append(last)
            fp = frozenset(gp.atom_of[v] for v in entries)
            if fp in tried:
                continue
            tried.add(fp)
            if len(tried) > 60:
                return False
            if _has_system(gp, atoms - fp, r2):
                return True
    return False


def _achievable_counts(
    gp: _PrimaryGroup, allowed_atoms: frozenset[int], r_max: int, memo: dict
) -> frozenset[int]:
    """Which k <= r_max admit k nonzero entries with atoms inside
    allowed_atoms, zero sum, spanning the whole p-group."""
    key = (allowed_atoms, r_max)
    got = memo.get(key)
    if got is not None:
        return got
    elems = gp.allowed_elements(allowed_atoms)
    results: set[int] = set()
    if elems and gp.spans(elems):

        def dfs(pos: int, count: int, total, chosen: list):
            if count >= gp.rank and total == gp.zero and gp.spans(chosen):
                results.add(count)
            if count == r_max:
                return
            for i in range(pos, len(elems)):
                chosen.append(elems[i])
                dfs(i, count + 1, gp.add(total, elems[i]), chosen)
                chosen.pop()

        dfs(0, 0, gp.zero, [])
    out = frozenset(results)
    memo[key] = out
    return out


def _single_prime_admits(gp: _PrimaryGroup, r1: int, r2: int) -> bool:
    """Scan minimal feasible footprints by size; the sides pair up iff two of
    them (one per size budget) are disjoint."""
    if _quick_yes(gp, r1, r2) or (r1 != r2 and _quick_yes(gp, r2, r1)):
        return True
    n_subsets = sum(
        math.comb(gp.atom_count, k)
        for k in range(1, min(max(r1, r2), gp.atom_count) + 1)
    )
    if n_subsets > BRUTE_FORCE_SUBSET_LIMIT:
        raise BudgetExceeded(
            f"existence search needs {n_subsets} atom subsets for p = {gp.p}",
            required=n_subsets,
        )
    min1: list[frozenset[int]] = []
    min2: list[frozenset[int]] = min1 if r1 == r2 else []
    passes = ((r1, min1, min2),) if r1 == r2 else ((r1, min1, min2), (r2, min2, min1))
    for size in range(1, min(max(r1, r2), gp.atom_count) + 1):
        for combo in itertools.combinations(range(gp.atom_count), size):
            fs = frozenset(combo)
            for r, mine, other in passes:
                if size > r or any(m <= fs for m in mine):
                    continue
                if not _has_system(gp, fs, r):
                    continue
                mine.append(fs)
                if any(not (fs & o) for o in other):
                    return True
    return False


def brute_force_admits(chain: tuple[int, ...], r1: int, r2: int) -> bool:
    """Exhaustive existence search, independent of the five-clause test."""
    if r1 < 3 or r2 < 3:
        raise UserInputError("both sizes must be at least 3")
    chain = tuple(m for m in chain if m > 1)
    if not chain:
        return False
    primary = _primary_chains(chain)
    groups = {p: _PrimaryGroup(p, pc) for p, pc in primary.items()}
    for gp in groups.values():
        if gp.rank > min(r1, r2) - 1:
            return False
        # a rank-1 primary part is cyclic: its unique minimal subgroup lies
        # inside every generating set's Sigma, so the two sides always collide
        if gp.rank == 1:
            return False

    if len(groups) == 1:
        return _single_prime_admits(next(iter(groups.values())), r1, r2)

    # Multiple primes: the surviving groups are tiny, so enumerate every
    # atom split per prime and combine the achievable nonzero-entry counts.
    per_prime: list[set[tuple[int, int]]] = []
    for p, gp in sorted(groups.items()):
        if gp.atom_count > MULTI_PRIME_ATOM_LIMIT:
            raise BudgetExceeded(
                f"existence search over 2^{gp.atom_count} atom splits for p = {p}",
                required=2**gp.atom_count,
            )
        atoms = frozenset(range(gp.atom_count))
        memo: dict = {}
        best: set[tuple[int, int]] = set()
        for bits in range(1, 2**gp.atom_count - 1):
            s1 = frozenset(a for a in atoms if bits & (1 << a))
            k1 = _achievable_counts(gp, s1, r1, memo)
            if not k1:
                continue
            k2 = _achievable_counts(gp, atoms - s1, r2, memo)
            if not k2:
                continue
            best.add((max(k1), max(k2)))
        if not best:
            return False
        per_prime.append(best)

    # slot coverage: per side the nonzero counts must sum to at least r
    for pick in itertools.product(*per_prime):
        if sum(k1 for k1, _ in pick) >= r1 and sum(k2 for _, k2 in pick) >= r2:
            return True
    return False
