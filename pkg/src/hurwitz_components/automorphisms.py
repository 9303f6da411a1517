"""Automorphism-group and inner-automorphism enumeration.

An automorphism is represented as an element map: a tuple m of length
|G| with m[x] = phi(x). Family rules cover abelian homocyclic products
(matrix action), Sym(n) for n not in {2, 6} (inner), and Alt(n) for
n != 6 (conjugation inside Sym(n)); everything else uses backtracking
over images of a minimal generating tuple.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations, product

from .errors import BudgetExceeded, UserInputError
from .groups import AbelianGroup, CayleyGroup, Group, PermutationGroup

FULL_ACTION_LIMIT = 10_000
BACKTRACK_CANDIDATE_LIMIT = 2000
MATRIX_ENUM_LIMIT = 2_000_000


def compose_maps(m1, m2) -> tuple[int, ...]:
    """Apply m1 then m2."""
    return tuple(m2[x] for x in m1)


def invert_map(m) -> tuple[int, ...]:
    out = [0] * len(m)
    for i, j in enumerate(m):
        out[j] = i
    return tuple(out)


def is_automorphism(G: Group, m) -> bool:
    if len(set(m)) != G.order or m[G.identity] != G.identity:
        return False
    return all(
        m[G.mul(x, y)] == G.mul(m[x], m[y]) for x in G.elements() for y in G.elements()
    )


@dataclass
class AutGroup:
    """The automorphism group of a backend group.

    mode "full": maps holds every automorphism (|Aut| <= FULL_ACTION_LIMIT).
    mode "generators": only generator_maps are materialized; consumers close
    over them by BFS.
    """

    group: Group
    order: int
    generator_maps: tuple[tuple[int, ...], ...]
    maps: tuple[tuple[int, ...], ...] | None
    mode: str

    def acting_maps(self) -> tuple[tuple[int, ...], ...]:
        """Maps to act with: the full list when available, else generators."""
        return self.maps if self.maps is not None else self.generator_maps


def inner_automorphisms(G: Group) -> tuple[tuple[int, ...], ...]:
    """All distinct conjugation maps x -> g^-1 x g, identity map first."""
    seen = {}
    for g in G.elements():
        m = tuple(G.conj(x, g) for x in G.elements())
        if m not in seen:
            seen[m] = g
    ident = tuple(G.elements())
    maps = [ident] + [m for m in seen if m != ident]
    return tuple(maps)


def automorphism_group(G: Group) -> AutGroup:
    if isinstance(G, AbelianGroup):
        if G.order == 1:
            ident = (0,)
            return AutGroup(G, 1, (ident,), (ident,), "full")
        if len(set(G.moduli)) == 1:
            return _homocyclic_auts(G)
        return _backtracking_auts(G)
    if isinstance(G, PermutationGroup):
        if G.order == 1:
            ident = (0,)
            return AutGroup(G, 1, (ident,), (ident,), "full")
        if G.kind == "Sym" and G.degree not in (2, 6):
            maps = inner_automorphisms(G)
            return AutGroup(G, len(maps), maps, maps, "full")
        if G.kind == "Sym" and G.degree == 2:
            ident = tuple(G.elements())
            return AutGroup(G, 1, (ident,), (ident,), "full")
        if G.kind == "Alt" and G.degree != 6:
            return _alt_conjugation_auts(G)
        return _backtracking_auts(G)
    return _backtracking_auts(G)


# -- abelian homocyclic (Z/n)^k: GL_k(Z/n) ------------------------------
def _det_mod(mat: list[list[int]], n: int) -> int:
    k = len(mat)
    if k == 1:
        return mat[0][0] % n
    if k == 2:
        return (mat[0][0] * mat[1][1] - mat[0][1] * mat[1][0]) % n
    # Leibniz over permutations; k stays tiny for homocyclic inputs.
    from itertools import permutations as _perms

    total = 0
    for perm in _perms(range(k)):
        sign = 1
        seen = [False] * k
        for i in range(k):
            if not seen[i]:
                j = i
                clen = 0
                while not seen[j]:
                    seen[j] = True
                    j = perm[j]
                    clen += 1
                if clen % 2 == 0:
                    sign = -sign
        term = sign
        for i in range(k):
            term *= mat[i][perm[i]]
        total += term
    return total % n


def _adjugate_mod(mat: list[list[int]], n: int) -> list[list[int]]:
    k = len(mat)
    if k == 1:
        return [[1]]
    adj = [[0] * k for _ in range(k)]
    for i in range(k):
        for j in range(k):
            minor = [
                [mat[r][c] for c in range(k) if c != j] for r in range(k) if r != i
            ]
            sign = -1 if (i + j) % 2 else 1
            adj[j][i] = (sign * _det_mod(minor, n)) % n if k > 1 else 1
    return adj


def _matrix_inverse_mod(mat: list[list[int]], n: int) -> list[list[int]] | None:
    d = _det_mod(mat, n)
    if math.gcd(d, n) != 1:
        return None
    dinv = pow(d, -1, n)
    adj = _adjugate_mod(mat, n)
    return [[(dinv * a) % n for a in row] for row in adj]


def _matmul_mod(a, b, n):
    k = len(a)
    return [
        [sum(a[i][t] * b[t][j] for t in range(k)) % n for j in range(k)]
        for i in range(k)
    ]


def _mat_to_map(G: AbelianGroup, mat) -> tuple[int, ...]:
    k = len(G.moduli)
    n = G.moduli[0]
    out = []
    for x in G.elements():
        v = G.vector(x)
        w = tuple(sum(v[i] * mat[i][j] for i in range(k)) % n for j in range(k))
        out.append(G.encode(w))
    return tuple(out)


def _homocyclic_auts(G: AbelianGroup) -> AutGroup:
    n = G.moduli[0]
    k = len(G.moduli)
    total = n ** (k * k)
    if total > MATRIX_ENUM_LIMIT:
        raise BudgetExceeded(
            f"Aut({G.name}) needs {total} candidate matrices (> {MATRIX_ENUM_LIMIT})",
            required=total,
        )
    invertible = []
    for flat in product(range(n), repeat=k * k):
        mat = [list(flat[i * k : (i + 1) * k]) for i in range(k)]
        if math.gcd(_det_mod(mat, n), n) == 1:
            invertible.append(mat)
    order = len(invertible)
    if order <= FULL_ACTION_LIMIT:
        maps = tuple(_mat_to_map(G, m) for m in invertible)
        gens = _greedy_map_generators(G, maps)
        return AutGroup(G, order, gens, maps, "full")
    gen_mats = _greedy_matrix_generators(invertible, n, k)
    gen_maps = []
    for m in gen_mats:
        gen_maps.append(_mat_to_map(G, m))
        minv = _matrix_inverse_mod(m, n)
        if minv is not None and minv != m:
            gen_maps.append(_mat_to_map(G, minv))
    return AutGroup(G, order, tuple(dict.fromkeys(gen_maps)), None, "generators")


def _greedy_matrix_generators(invertible, n, k):
    key = lambda m: tuple(tuple(r) for r in m)
    all_keys = set(key(m) for m in invertible)
    ident = [[1 if i == j else 0 for j in range(k)] for i in range(k)]
    gens: list = []
    closed = {key(ident)}
    closed_list = [ident]
    for cand in invertible:
        if key(cand) in closed:
            continue
        gens.append(cand)
        frontier = closed_list[:]
        while frontier:
            nxt = []
            for m in frontier:
                for g in gens:
                    prod_ = _matmul_mod(m, g, n)
                    pk = key(prod_)
                    if pk not in closed:
                        closed.add(pk)
                        closed_list.append(prod_)
                        nxt.append(prod_)
            frontier = nxt
        if len(closed) == len(all_keys):
            break
    return gens


def _greedy_map_generators(G: Group, maps) -> tuple[tuple[int, ...], ...]:
    ident = tuple(G.elements())
    if len(maps) == 1:
        return (ident,)
    mapset = set(maps)
    gens: list = []
    closed = {ident}
    closed_list = [ident]
    for cand in maps:
        if cand in closed:
            continue
        gens.append(cand)
        frontier = closed_list[:]
        while frontier:
            nxt = []
            for m in frontier:
                for g in gens:
                    c = compose_maps(m, g)
                    if c not in closed:
                        closed.add(c)
                        closed_list.append(c)
                        nxt.append(c)
            frontier = nxt
        if len(closed) == len(mapset):
            break
    return tuple(gens) if gens else (ident,)


# -- Alt(n), n != 6: conjugation by all of Sym(n) ------------------------
def _alt_conjugation_auts(G: PermutationGroup) -> AutGroup:
    from itertools import permutations as _perms

    seen = {}
    for sigma in _perms(range(G.degree)):
        sinv = [0] * G.degree
        for i, j in enumerate(sigma):
            sinv[j] = i
        m = []
        for x in G.elements():
            p = G.perm(x)
            q = tuple(sigma[p[sinv[i]]] for i in range(G.degree))
            m.append(G.index_of(q))
        m = tuple(m)
        if m not in seen:
            seen[m] = sigma
    maps = tuple(seen)
    if len(maps) <= FULL_ACTION_LIMIT:
        gens = _greedy_map_generators(G, maps)
        return AutGroup(G, len(maps), gens, maps, "full")
    gens = _greedy_map_generators(G, maps)
    return AutGroup(G, len(maps), gens, None, "generators")


# -- generic backtracking -------------------------------------------------
def minimal_generating_tuple(G: Group) -> tuple[int, ...]:
    if G.order == 1:
        return ()
    if isinstance(G, AbelianGroup):
        gens = []
        for i in range(len(G.moduli)):
            v = [0] * len(G.moduli)
            v[i] = 1
            gens.append(G.encode(v))
        return tuple(gens)
    elems = [x for x in G.elements() if x != G.identity]
    for d in (1, 2, 3):
        count = math.comb(len(elems), d)
        if count > 100_000:
            break
        for combo in combinations(elems, d):
            if G.generates(combo):
                return combo
    # Greedy fallback: always terminates, possibly non-minimal.
    gens: list[int] = []
    closed = G.closure(gens)
    while len(closed) < G.order:
        best = None
        best_size = len(closed)
        for x in G.elements():
            if x in closed:
                continue
            size = len(G.closure(gens + [x]))
            if size > best_size:
                best, best_size = x, size
                if size == G.order:
                    break
        gens.append(best)
        closed = G.closure(gens)
    return tuple(gens)


def _extend_homomorphism(G: Group, gens, images) -> tuple[int, ...] | None:
    """Extend gens -> images to a map on all of G via BFS replay; None if inconsistent."""
    n = G.order
    phi = [-1] * n
    phi[G.identity] = G.identity
    frontier = [G.identity]
    seen_count = 1
    while frontier:
        nxt = []
        for x in frontier:
            fx = phi[x]
            for g, img in zip(gens, images):
                y = G.mul(x, g)
                fy = G.mul(fx, img)
                if phi[y] == -1:
                    phi[y] = fy
                    nxt.append(y)
                    seen_count += 1
                elif phi[y] != fy:
                    return None
        frontier = nxt
    if seen_count != n:
        return None
    # Homomorphism property on generators extends to all products.
    for x in range(n):
        fx = phi[x]
        for g, img in zip(gens, images):
            if phi[G.mul(x, g)] != G.mul(fx, img):
                return None
    if len(set(phi)) != n:
        return None
    return tuple(phi)


def _backtracking_auts(G: Group) -> AutGroup:
    if G.order == 1:
        ident = (0,)
        return AutGroup(G, 1, (ident,), (ident,), "full")
    gens = minimal_generating_tuple(G)
    orders = [G.element_order(g) for g in gens]
    candidates = [
        [x for x in G.elements() if G.element_order(x) == o] for o in orders
    ]
    total = math.prod(len(c) for c in candidates)
    if total > BACKTRACK_CANDIDATE_LIMIT:
        raise BudgetExceeded(
            f"Aut({G.name}) backtracking needs {total} candidate tuples "
            f"(> {BACKTRACK_CANDIDATE_LIMIT})",
            required=total,
        )
    maps = []
    for images in product(*candidates):
        phi = _extend_homomorphism(G, gens, images)
        if phi is not None:
            maps.append(phi)
    maps = tuple(maps)
    if len(maps) <= FULL_ACTION_LIMIT:
        gen_maps = _greedy_map_generators(G, maps)
        return AutGroup(G, len(maps), gen_maps, maps, "full")
    gen_maps = _greedy_map_generators(G, maps)
    return AutGroup(G, len(maps), gen_maps, None, "generators")
