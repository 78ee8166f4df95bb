"""Finite quasi-median graphs: Cayley balls, axioms, hyperplanes, gates."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from . import words as W
from .words import GPPresentation, ReducedWord, Syllable

DEFAULT_BALL_BUDGET = 10**5
INF = float("inf")

Edge = Tuple[int, int]


class BudgetExceeded(RuntimeError):
    def __init__(self, msg, size=None):
        super().__init__(msg)
        self.size = size


class NotGated(ValueError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


class NotTransverse(ValueError):
    pass


class WindowInexact(RuntimeError):
    pass


class GraphError(ValueError):
    pass


def _e(a: int, b: int) -> Edge:
    return (a, b) if a < b else (b, a)


class Answer:
    """A boolean verdict carrying a flag for whether the ball window makes it exact."""

    __slots__ = ("value", "exact")

    def __init__(self, value: bool, exact: bool):
        self.value = bool(value)
        self.exact = bool(exact)

    def __bool__(self):
        return self.value

    def __eq__(self, other):
        if isinstance(other, Answer):
            return (self.value, self.exact) == (other.value, other.exact)
        return self.value == other

    def __repr__(self):
        return f"Answer({self.value}, exact={self.exact})"


class QMGraph:
    """A finite simple connected graph with a basepoint.

    ``truncated`` graphs are balls in a larger graph: structural answers are
    only guaranteed for vertices with ``dist <= radius - certified_interior``.
    For non-truncated graphs every vertex is certified.
    """

    def __init__(self, n: int, edges: Iterable[Tuple[int, int]], labels: Optional[Sequence[Any]] = None,
                 basepoint: int = 0, radius: Optional[int] = None, certified_interior: int = 0,
                 truncated: bool = False, edge_labels: Optional[Dict[Edge, Any]] = None,
                 presentation: Optional[GPPresentation] = None):
        adj: List[set] = [set() for _ in range(n)]
        for a, b in edges:
            if a == b:
                raise GraphError(f"loop at {a}")
            if not (0 <= a < n and 0 <= b < n):
                raise GraphError(f"edge {(a, b)} out of range")
            adj[a].add(b)
            adj[b].add(a)
        self.adj: List[FrozenSet[int]] = [frozenset(s) for s in adj]
        self.labels = list(labels) if labels is not None else list(range(n))
        if len(self.labels) != n:
            raise GraphError("label count mismatch")
        self.index = {lab: i for i, lab in enumerate(self.labels)}
        if not 0 <= basepoint < max(n, 1):
            raise GraphError("basepoint out of range")
        self.basepoint = basepoint
        self.dist = self.bfs(basepoint)
        if any(d == INF for d in self.dist):
            raise GraphError("graph is not connected")
        self.dist = [int(d) for d in self.dist]
        ecc = max(self.dist) if n else 0
        self.radius = ecc if radius is None else radius
        self.truncated = truncated
        self.certified_interior = certified_interior if truncated else 0
        self.edge_labels = edge_labels or {}
        self.presentation = presentation
        self._hyp_cache = None

    # basic queries
    @property
    def n(self) -> int:
        return len(self.adj)

    def has_edge(self, a: int, b: int) -> bool:
        return b in self.adj[a]

    def edges(self) -> List[Edge]:
        return sorted(_e(a, b) for a in range(self.n) for b in self.adj[a] if a < b)

    def certified(self, v: int) -> bool:
        return self.dist[v] <= self.radius - self.certified_interior

    def certified_vertices(self) -> List[int]:
        return [v for v in range(self.n) if self.certified(v)]

    def exact_radius(self, a: int) -> float:
        """Ball distances from ``a`` agree with true distances up to this bound."""
        return self.radius - self.dist[a] if self.truncated else INF

    def bfs(self, src: int, limit: float = INF, removed: Optional[set] = None) -> List[float]:
        d: List[float] = [INF] * self.n
        d[src] = 0
        q = deque([src])
        while q:
            x = q.popleft()
            if d[x] >= limit:
                continue
            for y in self.adj[x]:
                if d[y] == INF and not (removed and _e(x, y) in removed):
                    d[y] = d[x] + 1
                    q.append(y)
        return d

    def distance_matrix(self) -> np.ndarray:
        D = np.full((self.n, self.n), -1, dtype=np.int64)
        for v in range(self.n):
            D[v] = [int(x) if x != INF else -1 for x in self.bfs(v)]
        return D

    def common_neighbours(self, a: int, b: int) -> FrozenSet[int]:
        return self.adj[a] & self.adj[b]

    def is_connected_set(self, Y: Iterable[int]) -> bool:
        Y = set(Y)
        if not Y:
            return False
        start = next(iter(Y))
        seen = {start}
        stack = [start]
        while stack:
            x = stack.pop()
            for y in self.adj[x]:
                if y in Y and y not in seen:
                    seen.add(y)
                    stack.append(y)
        return len(seen) == len(Y)

    def induced_squares(self) -> List[Tuple[int, int, int, int]]:
        """Each induced 4-cycle once, as (v, a, w, c) with v minimal."""
        out = []
        for v in range(self.n):
            nb = sorted(self.adj[v])
            for i, a in enumerate(nb):
                for c in nb[i + 1:]:
                    if c in self.adj[a]:
                        continue
                    for w in self.common_neighbours(a, c):
                        if w != v and w not in self.adj[v] and w > v:
                            out.append((v, a, w, c))
        return out

    # exports
    def to_json(self, hyperplanes_too: bool = False) -> dict:
        data = {
            "n": self.n,
            "labels": [label_to_str(l) for l in self.labels],
            "edges": [list(e) for e in self.edges()],
            "basepoint": self.basepoint,
            "radius": self.radius,
            "certified_interior": self.certified_interior,
            "truncated": self.truncated,
        }
        if hyperplanes_too:
            data["hyperplanes"] = [
                {"id": J.id, "edges": [list(e) for e in sorted(J.edges)],
                 "carrier": sorted(J.carrier), "sectors": [sorted(s) for s in J.sectors],
                 "window_exact": J.window_exact}
                for J in hyperplanes(self)
            ]
        return data

    def to_dot(self, name: str = "ball") -> str:
        lines = [f"graph {name} {{"]
        for v in range(self.n):
            lab = label_to_str(self.labels[v]).replace('"', "'")
            lines.append(f'  {v} [label="{lab}"];')
        for a, b in self.edges():
            lines.append(f"  {a} -- {b};")
        lines.append("}")
        return "\n".join(lines) + "\n"


def label_to_str(lab) -> str:
    if isinstance(lab, tuple) and all(isinstance(s, Syllable) for s in lab):
        return W.format_word(lab)
    return str(lab)


def graph_from_json(data: dict) -> QMGraph:
    try:
        n = int(data["n"])
        edges = [tuple(e) for e in data["edges"]]
        return QMGraph(n, edges, data.get("labels"), data.get("basepoint", 0),
                       data.get("radius"), data.get("certified_interior", 0),
                       data.get("truncated", False))
    except (KeyError, TypeError) as exc:
        raise GraphError(f"malformed graph: {exc}") from exc


def from_edges(n: int, edges, basepoint: int = 0) -> QMGraph:
    return QMGraph(n, edges, basepoint=basepoint)


def complete_graph(n: int) -> QMGraph:
    return from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])


def cycle_graph(n: int) -> QMGraph:
    return from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path_graph(n: int) -> QMGraph:
    return from_edges(n, [(i, i + 1) for i in range(n - 1)])


def complete_bipartite(p: int, q: int) -> QMGraph:
    return from_edges(p + q, [(i, p + j) for i in range(p) for j in range(q)])


# Cayley balls

def cayley_ball(p: GPPresentation, r: int, budget: int = DEFAULT_BALL_BUDGET) -> QMGraph:
    """Ball of radius r about the identity in the Cayley graph of the graph
    product with respect to all non-trivial vertex-group elements."""
    if r < 0:
        raise ValueError("radius must be non-negative")
    gens = p.generators()
    labels: List[ReducedWord] = [W.EMPTY]
    index: Dict[ReducedWord, int] = {W.EMPTY: 0}
    edges: Dict[Edge, str] = {}
    layer = [W.EMPTY]
    for k in range(r):
        nxt = set()
        for w in layer:
            for s in gens:
                ws = W.multiply(p, w, (s,))
                if len(ws) == k + 1 and ws not in index:
                    nxt.add(ws)
        new = sorted(nxt, key=lambda w: [p.syllable_key(s) for s in w])
        if len(labels) + len(new) > budget:
            raise BudgetExceeded(f"ball of radius {r} exceeds {budget} vertices "
                                 f"(at least {len(labels) + len(new)})", len(labels) + len(new))
        for w in new:
            index[w] = len(labels)
            labels.append(w)
        layer = new
    # a ball that already contains the whole (finite) group is not truncated
    whole = all(len(W.multiply(p, w, (s,))) <= r for w in layer for s in gens)
    for i, w in enumerate(labels):
        for s in gens:
            j = index.get(W.multiply(p, w, (s,)))
            if j is not None:
                edges[_e(i, j)] = s.vertex
    return QMGraph(len(labels), edges.keys(), labels, 0, r, 2, not whole, edges, p)


# Axioms

@dataclass
class QMReport:
    ok: bool
    axioms: Dict[str, dict]
    exact: bool
    certified_vertices: int

    def to_json(self) -> dict:
        return {"ok": self.ok, "exact": self.exact, "certified_vertices": self.certified_vertices,
                "axioms": self.axioms}


def _find_k4_minus(g: QMGraph):
    for x, y in g.edges():
        cn = sorted(g.common_neighbours(x, y))
        for i, z in enumerate(cn):
            for w in cn[i + 1:]:
                if w not in g.adj[z]:
                    return (x, y, z, w)
    return None


def _find_k32(g: QMGraph):
    for d in range(g.n):
        for e in range(d + 1, g.n):
            if e in g.adj[d]:
                continue
            cn = sorted(g.common_neighbours(d, e))
            if len(cn) < 3:
                continue
            for i, a in enumerate(cn):
                for j in range(i + 1, len(cn)):
                    b = cn[j]
                    if b in g.adj[a]:
                        continue
                    for c in cn[j + 1:]:
                        if c not in g.adj[a] and c not in g.adj[b]:
                            return (a, b, c, d, e)
    return None


def _basepoints(g: QMGraph) -> List[int]:
    return g.certified_vertices()


def _find_triangle_failure(g: QMGraph):
    for a in _basepoints(g):
        lim = g.exact_radius(a)
        d = g.bfs(a, limit=lim)
        for x, y in g.edges():
            if d[x] != d[y] or d[x] == INF or d[x] > lim or d[x] == 0:
                continue
            if not any(d[z] == d[x] - 1 for z in g.common_neighbours(x, y)):
                return (a, x, y)
    return None


def _find_quadrangle_failure(g: QMGraph):
    for a in _basepoints(g):
        lim = g.exact_radius(a)
        d = g.bfs(a, limit=lim)
        for z in range(g.n):
            dz = d[z]
            if dz == INF or dz > lim or dz < 2:
                continue
            lower = sorted(x for x in g.adj[z] if d[x] == dz - 1)
            for i, x in enumerate(lower):
                for y in lower[i + 1:]:
                    if not any(d[w] == dz - 2 for w in g.common_neighbours(x, y)):
                        return (a, x, y, z)
    return None


def check_quasi_median(g: QMGraph) -> QMReport:
    """Forbidden induced subgraphs are searched in the whole graph (an induced
    subgraph of a ball is induced in the ambient graph); the metric conditions
    are checked from every certified basepoint inside its exact window."""
    axioms = {}
    for name, finder in (("no_K4_minus", _find_k4_minus), ("no_K32", _find_k32),
                         ("triangle", _find_triangle_failure),
                         ("quadrangle", _find_quadrangle_failure)):
        wit = finder(g)
        axioms[name] = {"pass": wit is None,
                        "witness": None if wit is None else [label_to_str(g.labels[v]) for v in wit],
                        "witness_ids": None if wit is None else list(wit)}
    ok = all(a["pass"] for a in axioms.values())
    return QMReport(ok, axioms, not g.truncated, len(g.certified_vertices()))


# Hyperplanes

class _UF:
    def __init__(self, n):
        self.p = list(range(n))

    def find(self, x):
        while self.p[x] != x:
            self.p[x] = self.p[self.p[x]]
            x = self.p[x]
        return x

    def union(self, a, b):
        a, b = self.find(a), self.find(b)
        if a != b:
            if a < b:
                self.p[b] = a
            else:
                self.p[a] = b


@dataclass(eq=False)
class Hyperplane:
    id: int
    edges: FrozenSet[Edge]
    carrier: FrozenSet[int]
    window_exact: bool
    graph: QMGraph = field(repr=False)

    @cached_property
    def sectors(self) -> List[FrozenSet[int]]:
        g = self.graph
        removed = set(self.edges)
        seen = [False] * g.n
        out = []
        for v in range(g.n):
            if seen[v]:
                continue
            d = g.bfs(v, removed=removed)
            comp = frozenset(i for i, x in enumerate(d) if x != INF)
            for i in comp:
                seen[i] = True
            out.append(comp)
        return out  # already ordered by minimal vertex

    def sector_of(self, v: int) -> int:
        for i, s in enumerate(self.sectors):
            if v in s:
                return i
        raise KeyError(v)

    def cliques(self) -> List[FrozenSet[int]]:
        """Maximal cliques all of whose edges belong to this hyperplane."""
        g = self.graph
        out = set()
        for a, b in self.edges:
            cl = {a, b} | {c for c in g.common_neighbours(a, b) if _e(a, c) in self.edges}
            out.add(frozenset(cl))
        return sorted(out, key=lambda c: sorted(c))

    @property
    def min_edge(self) -> Edge:
        return min(self.edges)


def hyperplanes(g: QMGraph) -> List[Hyperplane]:
    if g._hyp_cache is not None:
        return g._hyp_cache
    edges = g.edges()
    eid = {e: i for i, e in enumerate(edges)}
    uf = _UF(len(edges))
    for x, y in edges:
        for z in g.common_neighbours(x, y):
            if z > y:
                uf.union(eid[(x, y)], eid[_e(x, z)])
                uf.union(eid[(x, y)], eid[_e(y, z)])
    for v, a, w, c in g.induced_squares():
        uf.union(eid[_e(v, a)], eid[_e(c, w)])
        uf.union(eid[_e(v, c)], eid[_e(a, w)])
    classes: Dict[int, List[Edge]] = {}
    for e in edges:
        classes.setdefault(uf.find(eid[e]), []).append(e)
    out = []
    for cls in sorted(classes.values(), key=lambda c: c[0]):
        carrier = frozenset(v for e in cls for v in e)
        exact = (not g.truncated) or all(g.certified(v) for v in carrier)
        out.append(Hyperplane(len(out), frozenset(cls), carrier, exact, g))
    g._hyp_cache = out
    g._edge_hyp = {e: J.id for J in out for e in J.edges}
    return out


def hyperplane_of_edge(g: QMGraph, a: int, b: int) -> Hyperplane:
    hs = hyperplanes(g)
    return hs[g._edge_hyp[_e(a, b)]]


def transverse(J1: Hyperplane, J2: Hyperplane, strict: bool = False) -> Answer:
    g = J1.graph
    exact = J1.window_exact and J2.window_exact
    if strict and not exact:
        raise WindowInexact(f"hyperplanes {J1.id}, {J2.id} meet the uncertified boundary")
    found = False
    if J1.id != J2.id:
        hid = g._edge_hyp
        for a, b in J1.edges:
            for x, y in ((a, b), (b, a)):
                for z in g.adj[y]:
                    if z != x and z not in g.adj[x] and hid[_e(y, z)] == J2.id:
                        if any(w != y for w in g.common_neighbours(x, z)):
                            found = True
                            break
                if found:
                    break
            if found:
                break
    return Answer(found, exact)


def tangent(J1: Hyperplane, J2: Hyperplane, strict: bool = False) -> Answer:
    t = transverse(J1, J2, strict)
    val = J1.id != J2.id and not t.value and bool(J1.carrier & J2.carrier)
    return Answer(val, t.exact)


# Gates

def gate(g: QMGraph, x: int, Y: Iterable[int]) -> int:
    Y = sorted(set(Y))
    if not Y:
        raise NotGated("empty set")
    dx = g.bfs(x)
    best = min(dx[y] for y in Y)
    cands = [y for y in Y if dx[y] == best]
    if len(cands) > 1:
        raise NotGated(f"{x} has several nearest points in Y", (x, cands[0], cands[1]))
    y = cands[0]
    dy = g.bfs(y)
    for z in Y:
        if dx[z] != dx[y] + dy[z]:
            raise NotGated(f"no geodesic from {x} to {z} passes through {y}", (x, y, z))
    return y


def is_gated(g: QMGraph, Y: Iterable[int]) -> Tuple[bool, Optional[tuple]]:
    """Local criterion: connected, contains its triangles, locally convex.
    Only configurations centred in the certified region are examined."""
    Y = set(Y)
    if not g.is_connected_set(Y):
        return False, ("disconnected",)
    for a in sorted(Y):
        if not g.certified(a):
            continue
        for b in sorted(g.adj[a] & Y):
            for c in sorted(g.common_neighbours(a, b)):
                if c not in Y:
                    return False, ("triangle", a, b, c)
    for b in sorted(Y):
        if not g.certified(b):
            continue
        nb = sorted(g.adj[b] & Y)
        for i, a in enumerate(nb):
            for c in nb[i + 1:]:
                for d in sorted(g.common_neighbours(a, c)):
                    if d != b and d not in Y:
                        return False, ("convexity", a, b, c, d)
    return True, None


# Paths

def _check_path(g: QMGraph, path: Sequence[int]):
    for a, b in zip(path, path[1:]):
        if not g.has_edge(a, b):
            raise GraphError(f"{a} and {b} are not adjacent")


def _shorten_once(g: QMGraph, path: List[int]):
    for i in range(len(path) - 2):
        if path[i] == path[i + 2]:
            return path[:i + 1] + path[i + 3:], ("backtrack", i)
    for i in range(len(path) - 2):
        if g.has_edge(path[i], path[i + 2]):
            return path[:i + 1] + path[i + 2:], ("triangle", i)
    return None


def _flips(g: QMGraph, path: List[int]):
    for i in range(len(path) - 2):
        x, y, z = path[i], path[i + 1], path[i + 2]
        if x == z or g.has_edge(x, z):
            continue
        for w in sorted(g.common_neighbours(x, z)):
            if w != y and not g.has_edge(w, y):
                yield path[:i + 1] + [w] + path[i + 2:], ("flip", i, w)


def path_reduce(g: QMGraph, path: Sequence[int], budget: int = 10**5) -> Tuple[List[int], List[tuple]]:
    """Shorten a path with backtrack removals, triangle shortenings and square
    flips until no further shortening is reachable. Returns the path and the
    move log."""
    path = list(path)
    _check_path(g, path)
    log: List[tuple] = []
    while True:
        step = _shorten_once(g, path)
        if step:
            path, mv = step
            log.append(mv)
            continue
        # breadth-first search through square flips for a shortenable path
        start = tuple(path)
        prev = {start: None}
        q = deque([start])
        target = None
        while q and target is None:
            cur = q.popleft()
            for nxt, mv in _flips(g, list(cur)):
                t = tuple(nxt)
                if t in prev:
                    continue
                prev[t] = (cur, mv)
                if _shorten_once(g, nxt):
                    target = t
                    break
                if len(prev) > budget:
                    q.clear()
                    break
                q.append(t)
        if target is None:
            return path, log
        flips = []
        t = target
        while prev[t] is not None:
            t, mv = prev[t]
            flips.append(mv)
        log.extend(reversed(flips))
        path = list(target)


def geodesic_swap(g: QMGraph, geodesic: Sequence[int], i: int) -> List[int]:
    path = list(geodesic)
    _check_path(g, path)
    if not 0 <= i < len(path) - 2:
        raise IndexError("swap position out of range")
    x, y, z = path[i], path[i + 1], path[i + 2]
    if x != z and not g.has_edge(x, z):
        for w in sorted(g.common_neighbours(x, z)):
            if w != y and not g.has_edge(w, y):
                return path[:i + 1] + [w] + path[i + 2:]
    raise NotTransverse(f"edges at position {i} do not span a square")


# Cliques and medians

@dataclass(frozen=True)
class CliqueDesc:
    vertices: FrozenSet[int]
    label: Any = None


def _bron_kerbosch(adj, R, P, X, out):
    if not P and not X:
        out.append(frozenset(R))
        return
    pivot = max(P | X, key=lambda u: len(adj[u] & P))
    for v in sorted(P - adj[pivot]):
        _bron_kerbosch(adj, R | {v}, P & adj[v], X & adj[v], out)
        P = P - {v}
        X = X | {v}


def cliques(g: QMGraph) -> List[CliqueDesc]:
    found: List[FrozenSet[int]] = []
    _bron_kerbosch(g.adj, set(), set(range(g.n)), set(), found)
    out = []
    for c in sorted(found, key=lambda c: sorted(c)):
        label = None
        if g.edge_labels and len(c) > 1:
            vs = sorted(c)
            label = g.edge_labels.get(_e(vs[0], vs[1]))
        out.append(CliqueDesc(c, label))
    return out


def is_median(g: QMGraph) -> Tuple[bool, Optional[tuple]]:
    """Every triple of certified vertices has exactly one median."""
    D = g.distance_matrix()
    cert = g.certified_vertices()
    for i, x in enumerate(cert):
        for j, y in enumerate(cert[i:], i):
            Ixy = D[x] + D[y] == D[x, y]
            for z in cert[j:]:
                m = Ixy & (D[y] + D[z] == D[y, z]) & (D[x] + D[z] == D[x, z])
                if int(m.sum()) != 1:
                    return False, (x, y, z)
    return True, None


# Exact algebraic hyperplanes of graph products

def coset_rep(p: GPPresentation, g: Sequence[Syllable], S: Iterable[str]) -> ReducedWord:
    """Shortest element of the coset g<S>: strip tail syllables lying in S."""
    S = set(S)
    w = list(W.reduce(p, g))
    changed = True
    while changed:
        changed = False
        for i in range(len(w) - 1, -1, -1):
            s = w[i]
            if s.vertex in S and all(p.adjacent(w[j].vertex, s.vertex) for j in range(i + 1, len(w))):
                del w[i]
                changed = True
                break
    return W.canonical(p, w)


def project_to_parabolic(p: GPPresentation, x: Sequence[Syllable], S: Iterable[str]) -> ReducedWord:
    """Gate of x in <S> (from the identity's coset): the longest prefix in <S>."""
    S = set(S)
    w = list(x)
    pre = []
    changed = True
    while changed:
        changed = False
        for i, s in enumerate(w):
            if s.vertex in S and all(p.adjacent(w[j].vertex, s.vertex) for j in range(i)):
                pre.append(s)
                del w[i]
                changed = True
                break
    return W.canonical(p, pre)


@dataclass(frozen=True)
class AlgebraicHyperplane:
    presentation: GPPresentation = field(repr=False, compare=False)
    vertex: str
    coset: ReducedWord  # shortest representative of g<star(u)>

    @property
    def key(self):
        return (self.vertex, self.coset)

    def _local(self, w):
        return W.multiply(self.presentation, W.inverse(self.presentation, self.coset), w)

    def in_carrier(self, w: Sequence[Syllable]) -> bool:
        p = self.presentation
        return W.parabolic_membership(p, self._local(w), p.star(self.vertex))

    def sector_of(self, w: Sequence[Syllable]) -> int:
        """Element of the vertex group labelling the sector containing w."""
        p = self.presentation
        proj = project_to_parabolic(p, self._local(w), p.star(self.vertex))
        for s in proj:
            if s.vertex == self.vertex:
                return s.element
        return p.groups[self.vertex].identity

    def fiber_of(self, w: Sequence[Syllable]) -> Optional[int]:
        return self.sector_of(w) if self.in_carrier(w) else None

    def contains_edge(self, a: Sequence[Syllable], b: Sequence[Syllable]) -> bool:
        p = self.presentation
        step = W.multiply(p, W.inverse(p, a), b)
        return (len(step) == 1 and step[0].vertex == self.vertex and self.in_carrier(a))


def algebraic_hyperplane(p: GPPresentation, g: Sequence[Syllable], u: str) -> AlgebraicHyperplane:
    return AlgebraicHyperplane(p, u, coset_rep(p, g, p.star(u)))


def edge_hyperplane(p: GPPresentation, a: Sequence[Syllable], b: Sequence[Syllable]) -> AlgebraicHyperplane:
    step = W.multiply(p, W.inverse(p, a), b)
    if len(step) != 1:
        raise GraphError("not an edge")
    return algebraic_hyperplane(p, a, step[0].vertex)
