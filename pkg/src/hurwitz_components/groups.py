"""Finite group backends: abelian products, Sym/Alt permutation groups, Cayley tables.

Elements are integer indices 0..order-1 in a fixed canonical encoding per
backend: lexicographic residue vectors (abelian), lexicographic image tuples
(permutations), table order (Cayley).
"""
from __future__ import annotations

import hashlib
import json
import math
from itertools import permutations
from pathlib import Path

from .errors import UserInputError

# Full multiplication/inverse tables are built up to this order; larger
# groups fall back to native per-backend arithmetic.
TABLE_LIMIT = 1024

MAX_PERM_DEGREE = 8
MAX_CAYLEY_ORDER = 1024


def prime_factorization(n: int) -> dict[int, int]:
    """Map prime -> exponent for n >= 1."""
    if n < 1:
        raise UserInputError(f"cannot factor {n}: must be >= 1")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def invariant_factors(moduli: tuple[int, ...] | list[int]) -> tuple[int, ...]:
    """Normalize a product of cyclic groups to its divisor chain d1 | d2 | ... | dt.

    Standard redistribution: for each prime, sort its prime-power contributions
    descending; the i-th largest contributions across primes multiply into the
    i-th invariant factor from the top.
    """
    per_prime: dict[int, list[int]] = {}
    for m in moduli:
        if m < 1:
            raise UserInputError(f"modulus {m} invalid: must be >= 1")
        for p, e in prime_factorization(m).items():
            per_prime.setdefault(p, []).append(e)
    t = max((len(v) for v in per_prime.values()), default=0)
    chain_desc = []
    for i in range(t):
        f = 1
        for p, exps in per_prime.items():
            exps_sorted = sorted(exps, reverse=True)
            if i < len(exps_sorted):
                f *= p ** exps_sorted[i]
        chain_desc.append(f)
    return tuple(reversed(chain_desc))


class Group:
    """Base class: index arithmetic with optional precomputed tables."""

    backend = "generic"

    def __init__(self) -> None:
        n = self.order
        self._table: list[list[int]] | None = None
        self._inv: list[int] | None = None
        if n <= TABLE_LIMIT:
            self._table = [[self._mul_raw(x, y) for y in range(n)] for x in range(n)]
            e = self.identity
            inv = [-1] * n
            for x in range(n):
                row = self._table[x]
                for y in range(n):
                    if row[y] == e:
                        inv[x] = y
                        break
            self._inv = inv
        self._orders: list[int] | None = None
        self._center: tuple[int, ...] | None = None
        self._cyclic: dict[int, frozenset[int]] = {}

    # -- backend hooks -------------------------------------------------
    def _mul_raw(self, x: int, y: int) -> int:
        raise NotImplementedError

    def _inv_raw(self, x: int) -> int:
        raise NotImplementedError

    def element_label(self, x: int) -> str:
        raise NotImplementedError

    # -- arithmetic ----------------------------------------------------
    def mul(self, x: int, y: int) -> int:
        if self._table is not None:
            return self._table[x][y]
        return self._mul_raw(x, y)

    def inv(self, x: int) -> int:
        if self._inv is not None:
            return self._inv[x]
        return self._inv_raw(x)

    def conj(self, x: int, g: int) -> int:
        """g^-1 x g."""
        return self.mul(self.mul(self.inv(g), x), g)

    def comm(self, a: int, b: int) -> int:
        """a b a^-1 b^-1."""
        return self.mul(self.mul(a, b), self.mul(self.inv(a), self.inv(b)))

    def power(self, x: int, k: int) -> int:
        if k < 0:
            return self.power(self.inv(x), -k)
        acc = self.identity
        base = x
        while k:
            if k & 1:
                acc = self.mul(acc, base)
            base = self.mul(base, base)
            k >>= 1
        return acc

    def elements(self) -> range:
        return range(self.order)

    def element_order(self, x: int) -> int:
        if self._orders is None:
            orders = []
            for y in self.elements():
                k = 1
                acc = y
                while acc != self.identity:
                    acc = self.mul(acc, y)
                    k += 1
                orders.append(k)
            self._orders = orders
        return self._orders[x]

    def orders_present(self) -> tuple[int, ...]:
        return tuple(sorted({self.element_order(x) for x in self.elements()}))

    def cyclic_subgroup(self, x: int) -> frozenset[int]:
        got = self._cyclic.get(x)
        if got is None:
            elems = set()
            acc = self.identity
            while True:
                elems.add(acc)
                acc = self.mul(acc, x)
                if acc == self.identity:
                    break
            got = frozenset(elems)
            self._cyclic[x] = got
        return got

    def closure(self, gens) -> frozenset[int]:
        seen = {self.identity}
        frontier = [self.identity]
        gl = [g for g in gens]
        for g in gl:
            if g not in seen:
                seen.add(g)
                frontier.append(g)
        while frontier:
            nxt = []
            for x in frontier:
                for g in gl:
                    y = self.mul(x, g)
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(seen)

    def generates(self, gens) -> bool:
        return len(self.closure(gens)) == self.order

    def center(self) -> tuple[int, ...]:
        if self._center is None:
            self._center = tuple(
                z
                for z in self.elements()
                if all(self.mul(z, x) == self.mul(x, z) for x in self.elements())
            )
        return self._center

    def is_abelian(self) -> bool:
        return len(self.center()) == self.order

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name} order={self.order}>"


class AbelianGroup(Group):
    """Direct product of cyclic groups, normalized to the divisor chain."""

    backend = "abelian"

    def __init__(self, moduli) -> None:
        moduli = tuple(int(m) for m in moduli)
        for m in moduli:
            if m < 1:
                raise UserInputError(f"modulus {m} invalid: must be >= 1")
        self.moduli = invariant_factors(moduli)
        self.order = math.prod(self.moduli) if self.moduli else 1
        self.identity = 0
        self.name = "Zn:" + (",".join(str(m) for m in self.moduli) or "1")
        t = len(self.moduli)
        strides = [1] * t
        for i in range(t - 2, -1, -1):
            strides[i] = strides[i + 1] * self.moduli[i + 1]
        self._strides = tuple(strides)
        self._vectors = [self._decode(i) for i in range(self.order)]
        super().__init__()

    @property
    def rank(self) -> int:
        """Minimal number of generators d(G)."""
        return len(self.moduli)

    def _decode(self, idx: int) -> tuple[int, ...]:
        v = []
        for m, s in zip(self.moduli, self._strides):
            v.append((idx // s) % m)
        return tuple(v)

    def encode(self, vec) -> int:
        idx = 0
        for x, m, s in zip(vec, self.moduli, self._strides):
            idx += (x % m) * s
        return idx

    def vector(self, x: int) -> tuple[int, ...]:
        return self._vectors[x]

    def _mul_raw(self, x: int, y: int) -> int:
        vx, vy = self._vectors[x], self._vectors[y]
        return self.encode(a + b for a, b in zip(vx, vy))

    def _inv_raw(self, x: int) -> int:
        return self.encode(-a for a in self._vectors[x])

    def element_label(self, x: int) -> str:
        return "(" + ",".join(str(a) for a in self._vectors[x]) + ")"

    def element_order(self, x: int) -> int:
        v = self._vectors[x]
        return math.lcm(*(m // math.gcd(m, a) for m, a in zip(self.moduli, v))) if v else 1

    def generates(self, gens) -> bool:
        # Burnside basis for abelian groups: a set generates iff it spans
        # G/pG for every prime p dividing the exponent.
        if not self.moduli:
            return True
        vecs = [self._vectors[g] for g in gens]
        exponent = self.moduli[-1]
        for p in prime_factorization(exponent):
            cols = [i for i, m in enumerate(self.moduli) if m % p == 0]
            need = len(cols)
            rows = [[v[i] % p for i in cols] for v in vecs]
            if _rank_mod_p(rows, p) != need:
                return False
        return True

    def center(self) -> tuple[int, ...]:
        return tuple(self.elements())


def _rank_mod_p(rows: list[list[int]], p: int) -> int:
    """Gaussian elimination rank over F_p."""
    rows = [r[:] for r in rows]
    if not rows:
        return 0
    ncols = len(rows[0])
    rank = 0
    for col in range(ncols):
        pivot = None
        for i in range(rank, len(rows)):
            if rows[i][col] % p:
                pivot = i
                break
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        inv = pow(rows[rank][col], -1, p)
        rows[rank] = [(a * inv) % p for a in rows[rank]]
        for i in range(len(rows)):
            if i != rank and rows[i][col] % p:
                f = rows[i][col]
                rows[i] = [(a - f * b) % p for a, b in zip(rows[i], rows[rank])]
        rank += 1
        if rank == len(rows):
            break
    return rank


def perm_parity(perm: tuple[int, ...]) -> int:
    """0 for even, 1 for odd."""
    n = len(perm)
    seen = [False] * n
    cycles = 0
    for i in range(n):
        if not seen[i]:
            cycles += 1
            j = i
            while not seen[j]:
                seen[j] = True
                j = perm[j]
    return (n - cycles) % 2


def cycle_notation(perm: tuple[int, ...]) -> str:
    n = len(perm)
    seen = [False] * n
    parts = []
    for i in range(n):
        if seen[i] or perm[i] == i:
            seen[i] = True
            continue
        cyc = []
        j = i
        while not seen[j]:
            seen[j] = True
            cyc.append(j)
            j = perm[j]
        parts.append("(" + " ".join(str(k) for k in cyc) + ")")
    return "".join(parts) or "()"


class PermutationGroup(Group):
    """Full symmetric or alternating group on degree points.

    Permutations compose left-to-right: (x*y)(i) = y(x(i)).
    """

    backend = "permutation"

    def __init__(self, kind: str, degree: int) -> None:
        if kind not in ("Sym", "Alt"):
            raise UserInputError(f"unknown permutation group kind {kind!r}")
        if degree < 1:
            raise UserInputError(f"degree {degree} invalid: must be >= 1")
        if degree > MAX_PERM_DEGREE:
            raise UserInputError(
                f"degree {degree} too large: permutation backend supports <= {MAX_PERM_DEGREE}"
            )
        self.kind = kind
        self.degree = degree
        perms = sorted(permutations(range(degree)))
        if kind == "Alt":
            perms = [p for p in perms if perm_parity(p) == 0]
        self._perms = perms
        self._index = {p: i for i, p in enumerate(perms)}
        self.order = len(perms)
        self.identity = self._index[tuple(range(degree))]
        self.name = f"{kind}:{degree}"
        super().__init__()

    def perm(self, x: int) -> tuple[int, ...]:
        return self._perms[x]

    def index_of(self, perm: tuple[int, ...]) -> int:
        try:
            return self._index[perm]
        except KeyError:
            raise UserInputError(f"permutation {perm} not in {self.name}") from None

    def _mul_raw(self, x: int, y: int) -> int:
        px, py = self._perms[x], self._perms[y]
        return self._index[tuple(py[i] for i in px)]

    def _inv_raw(self, x: int) -> int:
        p = self._perms[x]
        out = [0] * self.degree
        for i, j in enumerate(p):
            out[j] = i
        return self._index[tuple(out)]

    def element_label(self, x: int) -> str:
        return cycle_notation(self._perms[x])


class CayleyGroup(Group):
    """Group given by an explicit multiplication table document.

    Document fields: order (int), labels (list of unique strings), table
    (order x order list of 0-based indices, row = left factor). The four
    group axioms are validated at load; violations raise UserInputError
    naming the first violated axiom.
    """

    backend = "cayley"

    def __init__(self, doc: dict, source: str = "<memory>") -> None:
        self.source = source
        order, labels, table = self._validate(doc, source)
        self.order = order
        self.labels = labels
        self._cayley = table
        self.identity = self._find_identity(table, order, source)
        self._check_inverses(table, order, self.identity, source)
        self._check_associativity(table, order, source)
        canon = json.dumps(
            {"order": order, "labels": labels, "table": table},
            sort_keys=True,
            separators=(",", ":"),
        )
        digest = hashlib.sha256(canon.encode()).hexdigest()[:12]
        self.name = f"cayley:{digest}"
        super().__init__()

    @staticmethod
    def _validate(doc: dict, source: str):
        if not isinstance(doc, dict):
            raise UserInputError(f"{source}: cayley document must be an object")
        for key in ("order", "labels", "table"):
            if key not in doc:
                raise UserInputError(f"{source}: cayley document missing field {key!r}")
        order = doc["order"]
        if not isinstance(order, int) or order < 1:
            raise UserInputError(f"{source}: order must be a positive integer")
        if order > MAX_CAYLEY_ORDER:
            raise UserInputError(f"{source}: order {order} exceeds limit {MAX_CAYLEY_ORDER}")
        labels = doc["labels"]
        if (
            not isinstance(labels, list)
            or len(labels) != order
            or not all(isinstance(s, str) for s in labels)
            or len(set(labels)) != order
        ):
            raise UserInputError(f"{source}: labels must be {order} unique strings")
        table = doc["table"]
        if not isinstance(table, list) or len(table) != order:
            raise UserInputError(
                f"{source}: cayley table violates group axiom: closure (table must be {order}x{order})"
            )
        for i, row in enumerate(table):
            if not isinstance(row, list) or len(row) != order:
                raise UserInputError(
                    f"{source}: cayley table violates group axiom: closure (row {i} has wrong length)"
                )
            for j, v in enumerate(row):
                if not isinstance(v, int) or not 0 <= v < order:
                    raise UserInputError(
                        f"{source}: cayley table violates group axiom: closure "
                        f"(entry [{i}][{j}] = {v!r} not an index in 0..{order - 1})"
                    )
        return order, list(labels), [list(row) for row in table]

    @staticmethod
    def _find_identity(table, order, source) -> int:
        for e in range(order):
            if all(table[e][x] == x and table[x][e] == x for x in range(order)):
                return e
        raise UserInputError(f"{source}: cayley table violates group axiom: identity")

    @staticmethod
    def _check_inverses(table, order, e, source) -> None:
        for x in range(order):
            if e not in table[x]:
                raise UserInputError(
                    f"{source}: cayley table violates group axiom: inverses (no right inverse for {x})"
                )
            if not any(table[y][x] == e for y in range(order)):
                raise UserInputError(
                    f"{source}: cayley table violates group axiom: inverses (no left inverse for {x})"
                )

    @staticmethod
    def _check_associativity(table, order, source) -> None:
        import numpy as np

        t = np.asarray(table, dtype=np.int32)
        for z in range(order):
            col = t[:, z]
            left = col[t]        # (x*y)*z
            right = t[:, col]    # x*(y*z)
            if not np.array_equal(left, right):
                bad = np.argwhere(left != right)[0]
                x, y = int(bad[0]), int(bad[1])
                raise UserInputError(
                    f"{source}: cayley table violates group axiom: associativity "
                    f"(({x}*{y})*{z} != {x}*({y}*{z}))"
                )

    @classmethod
    def from_path(cls, path: str | Path) -> "CayleyGroup":
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise UserInputError(f"cannot read cayley file {path}: {exc}") from exc
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise UserInputError(
                f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}"
            ) from exc
        return cls(doc, source=str(path))

    def _mul_raw(self, x: int, y: int) -> int:
        return self._cayley[x][y]

    def element_label(self, x: int) -> str:
        return self.labels[x]


def construct_group(spec: str) -> Group:
    """Parse a group spec: Zn:<n1>,<n2>,... | Sym:<n> | Alt:<n> | cayley:<path>."""
    if not isinstance(spec, str) or ":" not in spec:
        raise UserInputError(
            f"bad group spec {spec!r}: expected Zn:<n1>,..., Sym:<n>, Alt:<n>, or cayley:<path>"
        )
    head, _, rest = spec.partition(":")
    if head == "Zn":
        parts = rest.split(",")
        moduli = []
        for pos, tok in enumerate(parts, start=1):
            tok = tok.strip()
            if not tok.isdigit():
                raise UserInputError(
                    f"bad group spec {spec!r}: modulus #{pos} ({tok!r}) is not a positive integer"
                )
            moduli.append(int(tok))
        return AbelianGroup(moduli)
    if head in ("Sym", "Alt"):
        tok = rest.strip()
        if not tok.isdigit():
            raise UserInputError(f"bad group spec {spec!r}: degree {tok!r} is not a positive integer")
        return PermutationGroup(head, int(tok))
    if head == "cayley":
        return CayleyGroup.from_path(rest)
    raise UserInputError(f"bad group spec {spec!r}: unknown backend {head!r}")


# Thin wrappers matching the operation vocabulary used by the CLI and tests.
def element_order(G: Group, x: int) -> int:
    return G.element_order(x)


def generates(G: Group, elems) -> bool:
    return G.generates(elems)


def conjugate(G: Group, x: int, g: int) -> int:
    return G.conj(x, g)
