"""Words in graph products of finite groups and their normal forms."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, NamedTuple, Optional, Sequence, Tuple

from .groups import FiniteGroup, cyclic, group_from_json


class Syllable(NamedTuple):
    vertex: str
    element: int

    def __str__(self):
        return f"{self.vertex}:{self.element}"


GPWord = Tuple[Syllable, ...]
ReducedWord = Tuple[Syllable, ...]
EMPTY: ReducedWord = ()


class PresentationError(ValueError):
    pass


class GPPresentation:
    """A simplicial graph with a finite group at each vertex.

    Vertex order in ``vertices`` fixes the tie-break used by normal forms.
    """

    def __init__(self, vertices: Sequence[str], edges: Iterable[Tuple[str, str]],
                 groups: Dict[str, FiniteGroup], name: str = ""):
        self.vertices: Tuple[str, ...] = tuple(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise PresentationError("duplicate vertex")
        self.rank = {v: i for i, v in enumerate(self.vertices)}
        adj: Dict[str, set] = {v: set() for v in self.vertices}
        for u, v in edges:
            if u not in adj or v not in adj:
                raise PresentationError(f"edge {(u, v)} uses an unknown vertex")
            if u == v:
                raise PresentationError(f"loop at {u}")
            adj[u].add(v)
            adj[v].add(u)
        self.adj: Dict[str, FrozenSet[str]] = {v: frozenset(s) for v, s in adj.items()}
        for v in self.vertices:
            if v not in groups:
                raise PresentationError(f"no group for vertex {v}")
            if groups[v].order < 2:
                raise PresentationError(f"group at {v} is trivial")
        self.groups = {v: groups[v] for v in self.vertices}
        self.name = name

    def adjacent(self, u: str, v: str) -> bool:
        return v in self.adj[u]

    def edges(self) -> List[Tuple[str, str]]:
        return [(u, v) for u in self.vertices for v in sorted(self.adj[u], key=self.rank.get)
                if self.rank[u] < self.rank[v]]

    def link(self, u: str) -> FrozenSet[str]:
        return self.adj[u]

    def star(self, u: str) -> FrozenSet[str]:
        return self.adj[u] | {u}

    def is_complete(self, vs: Iterable[str]) -> bool:
        vs = list(vs)
        return all(self.adjacent(a, b) for i, a in enumerate(vs) for b in vs[i + 1:])

    def syllable_key(self, s: Syllable):
        return (self.rank[s.vertex], s.element)

    def generators(self) -> List[Syllable]:
        return [Syllable(v, x) for v in self.vertices
                for x in range(self.groups[v].order) if x != self.groups[v].identity]

    def to_json(self) -> dict:
        return {"name": self.name, "vertices": list(self.vertices),
                "edges": [list(e) for e in self.edges()],
                "groups": {v: self.groups[v].to_json() for v in self.vertices}}

    def __eq__(self, other):
        return isinstance(other, GPPresentation) and self.to_json() == other.to_json()

    def __repr__(self):
        return f"GPPresentation({self.name or list(self.vertices)})"


def presentation_from_json(data: dict) -> GPPresentation:
    try:
        verts = data["vertices"]
        groups = {}
        for v, g in data["groups"].items():
            if isinstance(g, int):
                groups[v] = cyclic(g)
            elif "cyclic" in g:
                groups[v] = cyclic(int(g["cyclic"]))
            else:
                groups[v] = group_from_json(g)
        return GPPresentation(verts, [tuple(e) for e in data.get("edges", [])], groups,
                              data.get("name", ""))
    except (KeyError, TypeError) as exc:
        raise PresentationError(f"malformed presentation: {exc}") from exc


def uniform(vertices: Sequence[str], edges, order: int, name: str = "") -> GPPresentation:
    g = cyclic(order)
    return GPPresentation(vertices, edges, {v: g for v in vertices}, name)


def parse_word(p: GPPresentation, text: str) -> GPWord:
    out = []
    for tok in text.replace("[", " ").replace("]", " ").split():
        if tok in ("e", "ε", "1"):
            continue
        if ":" not in tok:
            raise PresentationError(f"bad syllable {tok!r}")
        v, x = tok.rsplit(":", 1)
        if v not in p.groups:
            raise PresentationError(f"unknown vertex {v!r}")
        x = int(x)
        g = p.groups[v]
        if not 0 <= x < g.order or x == g.identity:
            raise PresentationError(f"bad element {x} at vertex {v}")
        out.append(Syllable(v, x))
    return tuple(out)


def format_word(w: Sequence[Syllable]) -> str:
    return " ".join(str(s) for s in w) if w else "ε"


def check_word(p: GPPresentation, w: Sequence[Syllable]) -> None:
    for s in w:
        g = p.groups.get(s.vertex)
        if g is None or not 0 <= s.element < g.order or s.element == g.identity:
            raise PresentationError(f"invalid syllable {s}")


def _absorb(p: GPPresentation, acc: List[Syllable], s: Syllable) -> None:
    """Right-multiply a reduced list by one syllable, keeping it reduced."""
    v = s.vertex
    if s.element == p.groups[v].identity:
        return
    link = p.adj[v]
    for i in range(len(acc) - 1, -1, -1):
        t = acc[i]
        if t.vertex == v:
            g = p.groups[v]
            x = g.mul(t.element, s.element)
            del acc[i]
            if x != g.identity:
                acc.append(Syllable(v, x))
            return
        if t.vertex not in link:
            break
    acc.append(s)


def canonical(p: GPPresentation, w: Sequence[Syllable]) -> ReducedWord:
    """Heap normal form of a reduced word: repeatedly pull out the least
    syllable among those that can be shuffled to the front."""
    rest = list(w)
    out = []
    while rest:
        best = None
        for i, s in enumerate(rest):
            if all(p.adjacent(rest[j].vertex, s.vertex) for j in range(i)):
                if best is None or p.syllable_key(s) < p.syllable_key(rest[best]):
                    best = i
        out.append(rest.pop(best))
    return tuple(out)


def reduce(p: GPPresentation, w: Sequence[Syllable]) -> ReducedWord:
    acc: List[Syllable] = []
    for s in w:
        _absorb(p, acc, s)
    return canonical(p, acc)


def is_graphically_reduced(p: GPPresentation, w: Sequence[Syllable]
                           ) -> Tuple[bool, Optional[List[tuple]]]:
    """Return (True, None) or (False, moves) where moves bring two syllables of
    one vertex together and amalgamate them (followed by a cancellation when
    the product is trivial)."""
    w = list(w)
    for k, s in enumerate(w):
        if s.element == p.groups[s.vertex].identity:
            return False, [("cancel", k)]
    for i in range(len(w)):
        v = w[i].vertex
        for j in range(i + 1, len(w)):
            if w[j].vertex == v:
                moves: List[tuple] = [("shuffle", k, k + 1) for k in range(i, j - 1)]
                moves.append(("amalgamate", j - 1, j))
                g = p.groups[v]
                if g.mul(w[i].element, w[j].element) == g.identity:
                    moves.append(("cancel", j - 1))
                return False, moves
            if not p.adjacent(w[j].vertex, v):
                break
    return True, None


def apply_moves(p: GPPresentation, w: Sequence[Syllable], moves: Sequence[tuple]) -> GPWord:
    """Replay a move log; used to validate witnesses."""
    w = list(w)
    for m in moves:
        kind = m[0]
        if kind == "shuffle":
            i, j = m[1], m[2]
            if j != i + 1 or not p.adjacent(w[i].vertex, w[j].vertex):
                raise ValueError(f"illegal shuffle {m}")
            w[i], w[j] = w[j], w[i]
        elif kind == "amalgamate":
            i, j = m[1], m[2]
            if j != i + 1 or w[i].vertex != w[j].vertex:
                raise ValueError(f"illegal amalgamation {m}")
            w[i:j + 1] = [Syllable(w[i].vertex, p.groups[w[i].vertex].mul(w[i].element, w[j].element))]
        elif kind == "cancel":
            s = w[m[1]]
            if s.element != p.groups[s.vertex].identity:
                raise ValueError(f"illegal cancellation {m}")
            del w[m[1]]
        else:
            raise ValueError(f"unknown move {m}")
    return tuple(w)


def tail(p: GPPresentation, w: Sequence[Syllable]) -> FrozenSet[Syllable]:
    out = set()
    for i, s in enumerate(w):
        if all(p.adjacent(w[j].vertex, s.vertex) for j in range(i + 1, len(w))):
            out.add(s)
    return frozenset(out)


def head(p: GPPresentation, w: Sequence[Syllable]) -> FrozenSet[Syllable]:
    out = set()
    for i, s in enumerate(w):
        if all(p.adjacent(w[j].vertex, s.vertex) for j in range(i)):
            out.add(s)
    return frozenset(out)


def inverse(p: GPPresentation, w: Sequence[Syllable]) -> ReducedWord:
    return reduce(p, [Syllable(s.vertex, p.groups[s.vertex].inv(s.element)) for s in reversed(w)])


def multiply(p: GPPresentation, u: Sequence[Syllable], v: Sequence[Syllable]) -> ReducedWord:
    return reduce(p, tuple(u) + tuple(v))


def length(w: Sequence[Syllable]) -> int:
    return len(w)


def parabolic_membership(p: GPPresentation, w: Sequence[Syllable], S: Iterable[str]) -> bool:
    S = set(S)
    return all(s.vertex in S for s in w)
