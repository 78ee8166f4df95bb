"""Finite groups given by multiplication tables."""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

EXHAUSTIVE_ASSOC_LIMIT = 512
SAMPLED_TRIPLES = 100_000
DEFAULT_CLOSURE_BUDGET = 10**6


class NotAGroup(ValueError):
    pass


class ClosureBudgetExceeded(RuntimeError):
    pass


class NotAHomomorphism(ValueError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


@dataclass(frozen=True)
class FiniteGroup:
    order: int
    table: Tuple[Tuple[int, ...], ...]
    identity: int
    inverse: Tuple[int, ...]
    name: str = ""
    # True when associativity was only spot-checked
    sampled_assoc: bool = field(default=False, compare=False)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverse[a]

    def elements(self) -> range:
        return range(self.order)

    def element_order(self, a: int) -> int:
        n, x = 1, a
        while x != self.identity:
            x = self.table[x][a]
            n += 1
        return n

    def is_abelian(self) -> bool:
        t = self.table
        return all(t[a][b] == t[b][a] for a in range(self.order) for b in range(a))

    def to_json(self) -> dict:
        return {"name": self.name, "order": self.order,
                "table": [list(r) for r in self.table]}


def make_group(table: Sequence[Sequence[int]], identity_hint: Optional[int] = None,
               name: str = "", canonical: bool = True,
               rng: Optional[random.Random] = None) -> FiniteGroup:
    """Validate a Cayley table. With canonical=True the identity is relabelled to 0."""
    n = len(table)
    if n == 0:
        raise NotAGroup("empty table")
    rows = []
    for r in table:
        if len(r) != n:
            raise NotAGroup("table is not square")
        for v in r:
            if not isinstance(v, int) or isinstance(v, bool) or not 0 <= v < n:
                raise NotAGroup(f"entry {v!r} out of range")
        rows.append(tuple(r))
    full = set(range(n))
    for i, r in enumerate(rows):
        if set(r) != full:
            raise NotAGroup(f"row {i} is not a permutation")
    for j in range(n):
        if {rows[i][j] for i in range(n)} != full:
            raise NotAGroup(f"column {j} is not a permutation")

    candidates = [identity_hint] if identity_hint is not None else range(n)
    e = None
    for c in candidates:
        if 0 <= c < n and all(rows[c][x] == x and rows[x][c] == x for x in range(n)):
            e = c
            break
    if e is None:
        raise NotAGroup("no identity element")

    sampled = False
    if n <= EXHAUSTIVE_ASSOC_LIMIT:
        for a in range(n):
            ra = rows[a]
            for b in range(n):
                ab = ra[b]
                rab = rows[ab]
                for c in range(n):
                    if rab[c] != ra[rows[b][c]]:
                        raise NotAGroup(f"non-associative at triple {(a, b, c)}")
    else:
        sampled = True
        rng = rng or random.Random(0)
        for _ in range(SAMPLED_TRIPLES):
            a, b, c = rng.randrange(n), rng.randrange(n), rng.randrange(n)
            if rows[rows[a][b]][c] != rows[a][rows[b][c]]:
                raise NotAGroup(f"non-associative at triple {(a, b, c)}")

    if canonical and e != 0:
        # swap labels 0 and e
        relabel = list(range(n))
        relabel[0], relabel[e] = e, 0
        new = [[0] * n for _ in range(n)]
        for a in range(n):
            for b in range(n):
                new[relabel[a]][relabel[b]] = relabel[rows[a][b]]
        rows = [tuple(r) for r in new]
        e = 0
    inverse = tuple(rows[a].index(e) for a in range(n))
    return FiniteGroup(n, tuple(rows), e, inverse, name, sampled)


def cyclic(n: int) -> FiniteGroup:
    return make_group([[(a + b) % n for b in range(n)] for a in range(n)], 0, name=f"Z{n}")


def trivial_group() -> FiniteGroup:
    return cyclic(1)


def group_from_json(data: dict) -> FiniteGroup:
    if "table" not in data:
        raise NotAGroup("missing table")
    g = make_group(data["table"], name=data.get("name", ""))
    if "order" in data and data["order"] != g.order:
        raise NotAGroup(f"declared order {data['order']} but table has {g.order} rows")
    return g


def direct_sum(G: FiniteGroup, K: FiniteGroup) -> FiniteGroup:
    """Componentwise product; (g, k) is encoded as g*|K| + k."""
    m = K.order
    n = G.order * m
    table = []
    for a in range(n):
        g1, k1 = divmod(a, m)
        table.append(tuple(G.table[g1][g2] * m + K.table[k1][k2]
                           for g2 in range(G.order) for k2 in range(m)))
    e = G.identity * m + K.identity
    inverse = tuple(G.inverse[a // m] * m + K.inverse[a % m] for a in range(n))
    name = f"{G.name or 'G'}+{K.name or 'K'}"
    return FiniteGroup(n, tuple(table), e, inverse, name)


# Permutations are plain tuples of images.
Permutation = Tuple[int, ...]


def compose(p: Permutation, q: Permutation) -> Permutation:
    """Left-action product: (p*q)(x) = p(q(x))."""
    return tuple(p[x] for x in q)


def identity_perm(degree: int) -> Permutation:
    return tuple(range(degree))


def invert_perm(p: Permutation) -> Permutation:
    out = [0] * len(p)
    for i, v in enumerate(p):
        out[v] = i
    return tuple(out)


def _check_perm(p, degree):
    if len(p) != degree or sorted(p) != list(range(degree)):
        raise ValueError(f"not a permutation of degree {degree}: {p!r}")


def permutation_image(elements: Sequence[Sequence[int]], degree: Optional[int] = None,
                      budget: int = DEFAULT_CLOSURE_BUDGET
                      ) -> Tuple[FiniteGroup, Dict[int, int], List[Permutation]]:
    """Close a set of permutations under composition.

    Returns the group, the map input index -> element index, and the list of
    permutations indexed by element. Element 0 is the identity permutation.
    """
    perms = [tuple(p) for p in elements]
    if degree is None:
        if not perms:
            raise ValueError("degree required for an empty generator list")
        degree = len(perms[0])
    for p in perms:
        _check_perm(p, degree)
    ident = identity_perm(degree)
    found: List[Permutation] = [ident]
    index = {ident: 0}
    gens = list(dict.fromkeys(perms))
    queue = 0
    while queue < len(found):
        x = found[queue]
        queue += 1
        for s in gens:
            y = compose(x, s)
            if y not in index:
                if len(found) >= budget:
                    raise ClosureBudgetExceeded(f"closure exceeds {budget} elements")
                index[y] = len(found)
                found.append(y)
    n = len(found)
    table = [[index[compose(found[a], found[b])] for b in range(n)] for a in range(n)]
    inverse = tuple(index[invert_perm(p)] for p in found)
    group = FiniteGroup(n, tuple(tuple(r) for r in table), 0, inverse, f"perm{degree}")
    return group, {i: index[p] for i, p in enumerate(perms)}, found


def subgroup_closure(G: FiniteGroup, gens: Sequence[int]) -> Tuple[frozenset, int]:
    H = {G.identity}
    frontier = [G.identity]
    gens = [g for g in gens]
    for g in gens:
        if not 0 <= g < G.order:
            raise ValueError(f"generator {g} out of range")
    while frontier:
        x = frontier.pop()
        for s in gens:
            y = G.table[x][s]
            if y not in H:
                H.add(y)
                frontier.append(y)
    return frozenset(H), G.order // len(H)


def is_free_action(G: FiniteGroup, assignment: Sequence[Sequence[int]], points: int
                   ) -> Tuple[bool, int, Optional[Tuple[int, int]]]:
    """assignment[g] is the permutation of range(points) induced by element g.

    Returns (free, number of orbits, witness) where witness is a
    (non-identity element, fixed point) pair when the action is not free.
    """
    perms = [tuple(p) for p in assignment]
    if len(perms) != G.order:
        raise NotAHomomorphism("assignment must list one permutation per element")
    for p in perms:
        _check_perm(p, points)
    for a in range(G.order):
        for b in range(G.order):
            if compose(perms[a], perms[b]) != perms[G.table[a][b]]:
                raise NotAHomomorphism(f"not a homomorphism at {(a, b)}", (a, b))
    witness = None
    for g in range(G.order):
        if g == G.identity:
            continue
        for x in range(points):
            if perms[g][x] == x:
                witness = (g, x)
                break
        if witness:
            break
    seen = [False] * points
    orbits = 0
    for x in range(points):
        if not seen[x]:
            orbits += 1
            for p in perms:
                seen[p[x]] = True
    return witness is None, orbits, witness
