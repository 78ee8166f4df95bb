"""Right-angled graphs of groups: input descriptions, fundamental-groupoid normal
forms, path morphisms, the specialness criterion, the Psi graph, covers and
balls in the quasi-median graph of the fundamental groupoid."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional, Sequence, Set, Tuple, Union

from . import qmgraph as Q
from . import words as W
from .groups import FiniteGroup, cyclic, invert_perm, permutation_image
from .qmgraph import BudgetExceeded, QMGraph
from .words import GPPresentation, Syllable


class RAGGError(ValueError):
    pass


class NotComposable(ValueError):
    def __init__(self, msg, position):
        super().__init__(msg)
        self.position = position


class ConditionsFailed(ValueError):
    def __init__(self, msg, report=None):
        super().__init__(msg)
        self.report = report


class NotACovering(ValueError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


@dataclass(frozen=True)
class Arrow:
    id: str
    bar: str
    source: str
    target: str


@dataclass
class Embedding:
    vertex_map: Dict[str, str]
    factor_isos: Dict[str, Tuple[int, ...]]


class RAGGSpec:
    def __init__(self, vertices: Sequence[str], arrows: Sequence[Arrow],
                 vertex_products: Dict[str, GPPresentation], edge_products: Dict[str, GPPresentation],
                 embeddings: Dict[str, Embedding], name: str = ""):
        self.vertices = tuple(vertices)
        self.arrows: Dict[str, Arrow] = {a.id: a for a in arrows}
        self.arrow_order = [a.id for a in arrows]
        self.vertex_products = dict(vertex_products)
        self.edge_products = dict(edge_products)
        self.embeddings = dict(embeddings)
        self.name = name
        self.sheets: Optional[int] = None
        self._cache: Dict[str, Any] = {}

    # structure

    def pair_key(self, e: str) -> str:
        a = self.arrows[e]
        return a.id if self.arrow_order.index(a.id) <= self.arrow_order.index(a.bar) else a.bar

    def pairs(self) -> List[str]:
        return [e for e in self.arrow_order if self.pair_key(e) == e]

    def edge_product(self, e: str) -> GPPresentation:
        a = self.arrows[e]
        if a.id in self.edge_products:
            return self.edge_products[a.id]
        return self.edge_products[a.bar]

    def arrows_from(self, v: str) -> List[str]:
        return [e for e in self.arrow_order if self.arrows[e].source == v]

    def image_factors(self, e: str) -> frozenset:
        return frozenset(self.embeddings[e].vertex_map.values())

    def phi_factor(self, e: str, F: str) -> Optional[Tuple[str, Tuple[int, ...]]]:
        """phi_e on the factor F of the source vertex: (image factor, element map) or None."""
        key = ("phi", e)
        if key not in self._cache:
            emb, back = self.embeddings[e], self.embeddings[self.arrows[e].bar]
            table = {}
            for w, F0 in emb.vertex_map.items():
                inv = invert_perm(emb.factor_isos[w])
                fwd = back.factor_isos[w]
                table[F0] = (back.vertex_map[w], tuple(fwd[inv[x]] for x in range(len(inv))))
            self._cache[key] = table
        return self._cache[key].get(F)

    def factor_nodes(self) -> List[Tuple[str, str]]:
        return [(v, F) for v in self.vertices for F in self.vertex_products[v].vertices]

    # serialisation

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "graph": {"vertices": list(self.vertices),
                      "arrows": [{"id": a.id, "bar": a.bar, "source": a.source, "target": a.target}
                                 for a in (self.arrows[e] for e in self.arrow_order)]},
            "vertex_products": {v: _pres_json(self.vertex_products[v]) for v in self.vertices},
            "edge_products": {k: _pres_json(p) for k, p in sorted(self.edge_products.items())},
            "embeddings": {e: {"vertex_map": dict(sorted(self.embeddings[e].vertex_map.items())),
                               "factor_isos": {w: list(m) for w, m in sorted(self.embeddings[e].factor_isos.items())}}
                           for e in self.arrow_order},
        }

    def __eq__(self, other):
        if not isinstance(other, RAGGSpec):
            return NotImplemented
        a, b = self.to_json(), other.to_json()
        a.pop("name")
        b.pop("name")
        return a == b

    def __repr__(self):
        return f"RAGGSpec({self.name or list(self.vertices)})"


def _pres_json(p: GPPresentation) -> dict:
    out = p.to_json()
    out.pop("name", None)
    # cyclic groups are written compactly so that files stay readable
    for v in p.vertices:
        G = p.groups[v]
        if G.to_json() == cyclic(G.order).to_json():
            out["groups"][v] = {"cyclic": G.order}
    return out


def ragg_from_json(data: dict) -> RAGGSpec:
    try:
        graph = data["graph"]
        arrows = [Arrow(a["id"], a["bar"], a["source"], a["target"]) for a in graph["arrows"]]
        vps = {v: W.presentation_from_json(p) for v, p in data["vertex_products"].items()}
        eps = {k: W.presentation_from_json(p) for k, p in data.get("edge_products", {}).items()}
        embs = {}
        for e, d in data.get("embeddings", {}).items():
            isos = {w: tuple(m) for w, m in d.get("factor_isos", {}).items()}
            embs[e] = Embedding(dict(d["vertex_map"]), isos)
        spec = RAGGSpec(graph["vertices"], arrows, vps, eps, embs, data.get("name", ""))
    except (KeyError, TypeError, W.PresentationError) as exc:
        raise RAGGError(f"malformed RAGG input: {exc}") from exc
    # identity isomorphisms may be omitted
    for e, emb in spec.embeddings.items():
        if e not in spec.arrows:
            continue
        try:
            P = spec.edge_product(e)
        except KeyError:
            continue
        for w in P.vertices:
            if w not in emb.factor_isos:
                emb.factor_isos[w] = tuple(range(P.groups[w].order))
    return spec


# validation

@dataclass
class ValidationReport:
    valid: bool
    problems: List[dict]

    def to_json(self) -> dict:
        return {"valid": self.valid, "problems": self.problems}


def validate_ragg(spec: RAGGSpec) -> ValidationReport:
    probs: List[dict] = []
    V = set(spec.vertices)
    for v in spec.vertices:
        if v not in spec.vertex_products:
            probs.append({"kind": "missing vertex product", "vertex": v})
    for e in spec.arrow_order:
        a = spec.arrows[e]
        if a.source not in V or a.target not in V:
            probs.append({"kind": "unknown endpoint", "arrow": e})
        if a.bar == e:
            probs.append({"kind": "arrow is its own bar", "arrow": e})
            continue
        b = spec.arrows.get(a.bar)
        if b is None:
            probs.append({"kind": "missing bar", "arrow": e})
            continue
        if b.bar != e:
            probs.append({"kind": "bar is not an involution", "arrow": e})
        if a.target != b.source:
            probs.append({"kind": "target differs from source of bar", "arrow": e})
    for key in spec.edge_products:
        if key not in spec.arrows:
            probs.append({"kind": "edge product for unknown arrow", "arrow": key})
        elif spec.arrows[key].bar in spec.edge_products:
            probs.append({"kind": "two edge products for one arrow pair", "arrow": key})
    if probs:
        return ValidationReport(False, probs)
    for e in spec.arrow_order:
        a = spec.arrows[e]
        try:
            P = spec.edge_product(e)
        except KeyError:
            probs.append({"kind": "missing edge product", "arrow": e})
            continue
        emb = spec.embeddings.get(e)
        if emb is None:
            probs.append({"kind": "missing embedding", "arrow": e})
            continue
        T = spec.vertex_products[a.source]
        vm = emb.vertex_map
        if set(vm) != set(P.vertices):
            probs.append({"kind": "vertex map domain", "arrow": e})
            continue
        if any(x not in T.vertices for x in vm.values()):
            probs.append({"kind": "vertex map leaves the vertex product", "arrow": e})
            continue
        if len(set(vm.values())) != len(vm):
            probs.append({"kind": "vertex map not injective", "arrow": e})
            continue
        ws = list(P.vertices)
        for i, w1 in enumerate(ws):
            for w2 in ws[i + 1:]:
                if P.adjacent(w1, w2) != T.adjacent(vm[w1], vm[w2]):
                    probs.append({"kind": "image not induced", "arrow": e, "edge": [vm[w1], vm[w2]]})
        for w in ws:
            G, H = P.groups[w], T.groups[vm[w]]
            m = emb.factor_isos.get(w)
            if m is None or len(m) != G.order or G.order != H.order or sorted(m) != list(range(H.order)):
                probs.append({"kind": "factor map is not a bijection", "arrow": e, "factor": w})
                continue
            bad = next(((x, y) for x in range(G.order) for y in range(G.order)
                        if m[G.mul(x, y)] != H.mul(m[x], m[y])), None)
            if bad:
                probs.append({"kind": "factor map is not a homomorphism", "arrow": e, "factor": w,
                              "pair": list(bad)})
    return ValidationReport(not probs, probs)


def load_ragg(data: dict) -> RAGGSpec:
    spec = ragg_from_json(data)
    rep = validate_ragg(spec)
    if not rep.valid:
        raise RAGGError(f"invalid RAGG input: {rep.problems[0]}")
    return spec


# groupoid normal forms

Token = Union[Syllable, str]


@dataclass(frozen=True)
class GroupoidElement:
    """Normal word g_1 e_1 ... g_n e_n g_{n+1} from the vertex ``start``."""
    start: str
    parts: Tuple[Tuple[W.ReducedWord, str], ...]
    last: W.ReducedWord
    end: str

    @property
    def terminus(self) -> str:
        return self.end

    def tokens(self) -> List[Token]:
        out: List[Token] = []
        for w, e in self.parts:
            out.extend(w)
            out.append(e)
        out.extend(self.last)
        return out

    def arrows(self) -> List[str]:
        return [e for _, e in self.parts]

    def length(self) -> int:
        return sum(len(w) + 1 for w, _ in self.parts) + len(self.last)

    def sort_key(self):
        return [(0, t.vertex, t.element) if isinstance(t, Syllable) else (1, t, 0) for t in self.tokens()]

    def __str__(self):
        toks = [W.format_word((t,)) if isinstance(t, Syllable) else t for t in self.tokens()]
        return f"{self.start}|" + (" ".join(toks) if toks else "1")


def identity(spec: RAGGSpec, v: str) -> GroupoidElement:
    return GroupoidElement(v, (), W.EMPTY, v)


def _push_syllable(spec: RAGGSpec, x: GroupoidElement, s: Syllable) -> GroupoidElement:
    P = spec.vertex_products[x.end]
    return GroupoidElement(x.start, x.parts, W.multiply(P, x.last, (s,)), x.end)


def _push_arrow(spec: RAGGSpec, x: GroupoidElement, e: str) -> GroupoidElement:
    a = spec.arrows[e]
    P = spec.vertex_products[a.source]
    img = spec.image_factors(e)
    t = Q.coset_rep(P, x.last, img)
    h = W.multiply(P, W.inverse(P, t), x.last)
    Pt = spec.vertex_products[a.target]
    pushed = []
    for s in h:
        F, m = spec.phi_factor(e, s.vertex)
        pushed.append(Syllable(F, m[s.element]))
    pushed = W.reduce(Pt, pushed)
    if not t and x.parts and x.parts[-1][1] == a.bar:
        prev, _ = x.parts[-1]
        return GroupoidElement(x.start, x.parts[:-1], W.multiply(Pt, prev, pushed), a.target)
    return GroupoidElement(x.start, x.parts + ((t, e),), pushed, a.target)


def push(spec: RAGGSpec, x: GroupoidElement, tok: Token, position: int = 0) -> GroupoidElement:
    if isinstance(tok, Syllable):
        P = spec.vertex_products[x.end]
        G = P.groups.get(tok.vertex)
        if G is None or not 0 <= tok.element < G.order:
            raise NotComposable(f"factor {tok.vertex} is not at vertex {x.end}", position)
        return _push_syllable(spec, x, tok)
    a = spec.arrows.get(tok)
    if a is None:
        raise NotComposable(f"unknown arrow {tok}", position)
    if a.source != x.end:
        raise NotComposable(f"arrow {tok} does not start at {x.end}", position)
    return _push_arrow(spec, x, tok)


def groupoid_normalize(spec: RAGGSpec, word: Sequence[Token], start: Optional[str] = None) -> GroupoidElement:
    if start is None:
        first = next((t for t in word if not isinstance(t, Syllable)), None)
        if first is None or not isinstance(word[0], str):
            raise NotComposable("start vertex required", 0)
        start = spec.arrows[first].source
    x = identity(spec, start)
    for i, tok in enumerate(word):
        x = push(spec, x, tok, i)
    return x


def parse_groupoid_word(spec: RAGGSpec, text: str) -> List[Token]:
    out: List[Token] = []
    for tok in text.split():
        if ":" in tok:
            F, x = tok.split(":")
            out.append(Syllable(F, int(x)))
        elif tok in spec.arrows or tok not in ("1", "ε", "e"):
            out.append(tok)
    return out


def gmul(spec: RAGGSpec, x: GroupoidElement, y: GroupoidElement) -> GroupoidElement:
    if x.end != y.start:
        raise NotComposable(f"terminus {x.end} differs from start {y.start}", 0)
    for tok in y.tokens():
        x = push(spec, x, tok)
    return x


def ginv(spec: RAGGSpec, x: GroupoidElement) -> GroupoidElement:
    out = identity(spec, x.end)
    toks = x.tokens()
    # walk backwards tracking the vertex each syllable lives at
    verts = []
    v = x.start
    for t in toks:
        verts.append(v)
        if not isinstance(t, Syllable):
            v = spec.arrows[t].target
    for t, v in zip(reversed(toks), reversed(verts)):
        if isinstance(t, Syllable):
            G = spec.vertex_products[v].groups[t.vertex]
            out = _push_syllable(spec, out, Syllable(t.vertex, G.inv(t.element)))
        else:
            out = _push_arrow(spec, out, spec.arrows[t].bar)
    return out


# path morphisms and the transition graph

def path_morphism(spec: RAGGSpec, path: Sequence[str], factor: str,
                  element: Optional[int] = None) -> Optional[Union[str, Tuple[str, int]]]:
    """Image of a factor (or of one of its elements) under phi along the path;
    None when it leaves the image of an edge group."""
    for i, e in enumerate(path):
        if i and spec.arrows[path[i - 1]].target != spec.arrows[e].source:
            raise NotComposable("path is not composable", i)
        got = spec.phi_factor(e, factor)
        if got is None:
            return None
        factor, m = got
        if element is not None:
            element = m[element]
    return factor if element is None else (factor, element)


Node = Tuple[str, str]


def transition_edges(spec: RAGGSpec) -> Dict[Node, List[Tuple[str, Node, Tuple[int, ...]]]]:
    out: Dict[Node, List[Tuple[str, Node, Tuple[int, ...]]]] = {n: [] for n in spec.factor_nodes()}
    for e in spec.arrow_order:
        a = spec.arrows[e]
        for F in spec.vertex_products[a.source].vertices:
            got = spec.phi_factor(e, F)
            if got is not None:
                out[(a.source, F)].append((e, (a.target, got[0]), got[1]))
    return out


@dataclass
class Component:
    root: Node
    nodes: List[Node]
    tree_path: Dict[Node, List[str]]  # arrows from the root
    tree_map: Dict[Node, Tuple[int, ...]]  # element map root factor -> node factor


def components(spec: RAGGSpec) -> List[Component]:
    if "components" in spec._cache:
        return spec._cache["components"]
    edges = transition_edges(spec)
    order = {n: i for i, n in enumerate(spec.factor_nodes())}
    seen: Set[Node] = set()
    out = []
    for root in spec.factor_nodes():
        if root in seen:
            continue
        G = spec.vertex_products[root[0]].groups[root[1]]
        paths = {root: []}
        maps = {root: tuple(range(G.order))}
        q = deque([root])
        seen.add(root)
        while q:
            x = q.popleft()
            for e, y, m in edges[x]:
                if y not in paths:
                    paths[y] = paths[x] + [e]
                    maps[y] = tuple(m[maps[x][i]] for i in range(G.order))
                    seen.add(y)
                    q.append(y)
        nodes = sorted(paths, key=order.get)
        out.append(Component(root, nodes, paths, maps))
    spec._cache["components"] = out
    return out


def component_of(spec: RAGGSpec, node: Node) -> Component:
    for c in components(spec):
        if node in c.tree_path:
            return c
    raise KeyError(node)


def _reverse(spec: RAGGSpec, path: Sequence[str]) -> List[str]:
    return [spec.arrows[e].bar for e in reversed(path)]


def walk_between(spec: RAGGSpec, a: Node, b: Node) -> List[str]:
    c = component_of(spec, a)
    return _reverse(spec, c.tree_path[a]) + c.tree_path[b]


def phi_group(spec: RAGGSpec, v: str, F: str) -> Tuple[FiniteGroup, List[Tuple[int, ...]], List[Tuple[List[str], Tuple[int, ...]]]]:
    """The group of automorphisms of F induced by loops returning to F.

    Returns the group, its elements as permutations of F, and one loop per
    non-trivial chord generator."""
    node = (v, F)
    comp = component_of(spec, node)
    order = spec.vertex_products[v].groups[F].order
    # re-root the spanning tree at the requested node
    back = invert_perm(comp.tree_map[node])
    gens = []
    loops = []
    for x in comp.nodes:
        for e, y, m in transition_edges(spec)[x]:
            if comp.tree_path[y] == comp.tree_path[x] + [e]:
                continue
            # walk node -> root -> x -e-> y -> root -> node
            tx, ty = comp.tree_map[x], comp.tree_map[y]
            ty_inv = invert_perm(ty)
            auto_root = tuple(ty_inv[m[tx[i]]] for i in range(order))
            root_to_node = comp.tree_map[node]
            auto = tuple(root_to_node[auto_root[back[i]]] for i in range(order))
            if auto != tuple(range(order)):
                walk = (walk_between(spec, node, x) + [e] + walk_between(spec, y, node))
                gens.append(auto)
                loops.append((walk, auto))
    group, _, elems = permutation_image(gens or [tuple(range(order))], order)
    return group, elems, loops


# the specialness criterion

@dataclass
class ConditionsReport:
    results: Dict[str, dict]

    @property
    def ok(self) -> bool:
        return all(r["pass"] for r in self.results.values())

    def to_json(self) -> dict:
        return {"ok": self.ok, "conditions": self.results}


def check_conditions(spec: RAGGSpec, max_witnesses: int = 5) -> ConditionsReport:
    res: Dict[str, dict] = {}
    comps = components(spec)
    # (i) a loop may not carry a factor to a different factor of the same vertex
    wit = []
    for c in comps:
        by_vertex: Dict[str, List[str]] = {}
        for v, F in c.nodes:
            by_vertex.setdefault(v, []).append(F)
        for v, Fs in by_vertex.items():
            for G2 in Fs[1:]:
                walk = walk_between(spec, (v, Fs[0]), (v, G2))
                wit.append({"vertex": v, "factor": Fs[0], "image": G2, "loop": walk})
    res["i"] = {"pass": not wit, "witnesses": wit[:max_witnesses]}
    # (ii) commuting factors may not be carried to non-commuting factors
    wit = []
    comp_index = {n: i for i, c in enumerate(comps) for n in c.nodes}
    at_vertex: List[Dict[str, List[str]]] = []
    for c in comps:
        d: Dict[str, List[str]] = {}
        for v, F in c.nodes:
            d.setdefault(v, []).append(F)
        at_vertex.append(d)
    for u in spec.vertices:
        P = spec.vertex_products[u]
        for A1, A2 in P.edges():
            c1, c2 = comp_index[(u, A1)], comp_index[(u, A2)]
            for v in spec.vertices:
                Pv = spec.vertex_products[v]
                for B1 in at_vertex[c1].get(v, []):
                    for B2 in at_vertex[c2].get(v, []):
                        if B1 != B2 and not Pv.adjacent(B1, B2):
                            wit.append({"u": u, "A1": A1, "A2": A2, "v": v, "B1": B1, "B2": B2,
                                        "alpha": walk_between(spec, (u, A1), (v, B1)),
                                        "beta": walk_between(spec, (u, A2), (v, B2))})
    res["ii"] = {"pass": not wit, "witnesses": wit[:max_witnesses]}
    # (iii) no loops in the underlying graph
    wit = [{"arrow": e, "vertex": spec.arrows[e].source} for e in spec.arrow_order
           if spec.arrows[e].source == spec.arrows[e].target]
    res["iii"] = {"pass": not wit, "witnesses": wit[:max_witnesses]}
    # (iv) loops fixing a factor act trivially on it
    wit = []
    for v, F in spec.factor_nodes():
        group, _, loops = phi_group(spec, v, F)
        if group.order > 1:
            walk, auto = loops[0]
            wit.append({"vertex": v, "factor": F, "loop": walk, "automorphism": list(auto),
                        "group_order": group.order})
    res["iv"] = {"pass": not wit, "witnesses": wit[:max_witnesses]}
    return ConditionsReport(res)


# the Psi graph

@dataclass
class PsiResult:
    presentation: GPPresentation
    classes: Dict[str, List[Node]]
    arrow_vertices: Dict[str, List[str]]

    def to_json(self) -> dict:
        return {"presentation": _pres_json(self.presentation) | {"name": self.presentation.name},
                "classes": {k: [list(n) for n in v] for k, v in self.classes.items()},
                "arrow_vertices": self.arrow_vertices}


def build_psi(spec: RAGGSpec, literal: bool = False, arrow_order: int = 2) -> PsiResult:
    """Graph into whose graph product the fundamental group embeds.

    One extra vertex per arrow pair by default; ``literal`` gives one per arrow."""
    rep = check_conditions(spec)
    if not rep.ok:
        failed = [k for k, r in rep.results.items() if not r["pass"]]
        raise ConditionsFailed(f"conditions {', '.join(failed)} fail", rep)
    comps = components(spec)
    name_of: Dict[Node, str] = {}
    classes: Dict[str, List[Node]] = {}
    groups: Dict[str, FiniteGroup] = {}
    verts: List[str] = []
    for c in sorted(comps, key=lambda c: spec.factor_nodes().index(c.nodes[0])):
        v, F = c.nodes[0]
        name = f"{v}.{F}"
        verts.append(name)
        classes[name] = c.nodes
        groups[name] = spec.vertex_products[v].groups[F]
        for n in c.nodes:
            name_of[n] = name
    edges = set()
    for v in spec.vertices:
        for F1, F2 in spec.vertex_products[v].edges():
            a, b = name_of[(v, F1)], name_of[(v, F2)]
            edges.add((min(a, b), max(a, b)))
    arrow_vertices: Dict[str, List[str]] = {}
    chosen = spec.arrow_order if literal else spec.pairs()
    for e in chosen:
        if e in verts:
            raise RAGGError(f"arrow name {e} collides with a factor class")
        verts.append(e)
        groups[e] = cyclic(arrow_order)
        arrow_vertices[e] = [e] if literal else [e, spec.arrows[e].bar]
        src = spec.arrows[e].source
        for F in spec.image_factors(e):
            c = name_of[(src, F)]
            edges.add((min(c, e), max(c, e)))
    pres = GPPresentation(verts, sorted(edges), groups, f"psi({spec.name})")
    return PsiResult(pres, classes, arrow_vertices)


# covers

def pullback_cover(spec: RAGGSpec, cover: dict) -> RAGGSpec:
    """Pull the graph of groups back along a covering of its underlying graph.

    ``cover`` has ``vertices`` (new vertex -> old vertex) and ``arrows`` (list
    of {id, bar, source, target, maps_to})."""
    try:
        vmap: Dict[str, str] = dict(cover["vertices"])
        arrows = [Arrow(a["id"], a["bar"], a["source"], a["target"]) for a in cover["arrows"]]
        amap = {a["id"]: a["maps_to"] for a in cover["arrows"]}
    except (KeyError, TypeError) as exc:
        raise NotACovering(f"malformed cover: {exc}") from exc
    ids = {a.id: a for a in arrows}
    for a in arrows:
        if a.bar not in ids or ids[a.bar].bar != a.id or a.bar == a.id:
            raise NotACovering("arrow involution is broken", {"arrow": a.id})
        if a.target != ids[a.bar].source:
            raise NotACovering("target differs from source of bar", {"arrow": a.id})
        old = spec.arrows.get(amap[a.id])
        if old is None:
            raise NotACovering("arrow maps to an unknown arrow", {"arrow": a.id})
        if vmap.get(a.source) != old.source or vmap.get(a.target) != old.target:
            raise NotACovering("arrow endpoints are not mapped compatibly", {"arrow": a.id})
        if amap[a.bar] != old.bar:
            raise NotACovering("bar is not preserved", {"arrow": a.id})
    for v, base in vmap.items():
        star = sorted(amap[a.id] for a in arrows if a.source == v)
        expect = sorted(spec.arrows_from(base))
        if star != expect:
            raise NotACovering("not a bijection on the star", {"vertex": v, "star": star, "expected": expect})
    fibres: Dict[str, int] = {}
    for v, base in vmap.items():
        fibres[base] = fibres.get(base, 0) + 1
    if set(fibres) != set(spec.vertices):
        raise NotACovering("cover is not surjective", {"missing": sorted(set(spec.vertices) - set(fibres))})
    vps = {v: spec.vertex_products[vmap[v]] for v in vmap}
    out_arrows = arrows
    eps = {}
    order = [a.id for a in arrows]
    for a in arrows:
        if order.index(a.id) <= order.index(a.bar):
            eps[a.id] = spec.edge_product(amap[a.id])
    embs = {}
    for a in arrows:
        old = spec.embeddings[amap[a.id]]
        embs[a.id] = Embedding(dict(old.vertex_map), dict(old.factor_isos))
    out = RAGGSpec(list(vmap), out_arrows, vps, eps, embs, cover.get("name", f"cover({spec.name})"))
    sheets = set(fibres.values())
    out.sheets = sheets.pop() if len(sheets) == 1 else None
    return out


# the quasi-median graph of the groupoid

def frak_x_ball(spec: RAGGSpec, omega: str, r: int, budget: int = Q.DEFAULT_BALL_BUDGET) -> QMGraph:
    if omega not in spec.vertices:
        raise RAGGError(f"unknown vertex {omega}")
    if r < 0:
        raise ValueError("radius must be non-negative")

    def steps(x: GroupoidElement):
        P = spec.vertex_products[x.end]
        for s in P.generators():
            yield s, f"{x.end}.{s.vertex}"
        for e in spec.arrows_from(x.end):
            yield e, spec.pair_key(e)

    start = identity(spec, omega)
    labels = [start]
    index = {start: 0}
    layer = [start]
    for k in range(r):
        nxt = set()
        for x in layer:
            for tok, _ in steps(x):
                y = push(spec, x, tok)
                if y not in index:
                    nxt.add(y)
        new = sorted(nxt, key=lambda y: y.sort_key())
        if len(labels) + len(new) > budget:
            raise BudgetExceeded(f"ball of radius {r} exceeds {budget} vertices", len(labels) + len(new))
        for y in new:
            index[y] = len(labels)
            labels.append(y)
        layer = new
    edges: Dict[Tuple[int, int], str] = {}
    whole = True
    for i, x in enumerate(labels):
        for tok, lab in steps(x):
            j = index.get(push(spec, x, tok))
            if j is None:
                whole = False
            elif j != i:
                edges[Q._e(i, j)] = lab
    return QMGraph(len(labels), edges.keys(), labels, 0, r, 2, not whole, edges)


def orbits_by_terminus(spec: RAGGSpec, ball: QMGraph) -> List[List[int]]:
    by: Dict[str, List[int]] = {}
    for v, x in enumerate(ball.labels):
        by.setdefault(x.end, []).append(v)
    return [by[v] for v in spec.vertices if v in by]


def link_membership(spec: RAGGSpec, node: Node, h: GroupoidElement) -> bool:
    v, F = node
    if h.start != v:
        raise ValueError("element must start at the factor's vertex")
    cur = F
    where = v
    for word, e in h.parts:
        P = spec.vertex_products[where]
        if any(not P.adjacent(s.vertex, cur) for s in word):
            return False
        got = spec.phi_factor(e, cur)
        if got is None:
            return False
        cur = got[0]
        where = spec.arrows[e].target
    P = spec.vertex_products[where]
    return all(P.adjacent(s.vertex, cur) for s in h.last)


def phi_of_path(spec: RAGGSpec, node: Node, h: GroupoidElement) -> Optional[str]:
    return path_morphism(spec, h.arrows(), node[1])


# algebra for the action of the fundamental group on the ball

class GroupoidAlgebra:
    """Left multiplication of loops at omega on groupoid elements starting at omega."""

    def __init__(self, spec: RAGGSpec, omega: str):
        self.spec = spec
        self.omega = omega
        self.identity = identity(spec, omega)

    def mul(self, g, h):
        return gmul(self.spec, g, h)

    def inv(self, g):
        return ginv(self.spec, g)

    def act(self, g, label):
        return gmul(self.spec, g, label)

    def transporter(self, x, y):
        if x.end != y.end:
            return None
        return gmul(self.spec, y, ginv(self.spec, x))

    def orbit_key(self, label):
        return label.end

    def fmt(self, g) -> str:
        return str(g)


def fundamental_group_generators(spec: RAGGSpec, omega: str) -> List[GroupoidElement]:
    """Loops at omega generating the fundamental group: conjugated factor
    elements along a spanning tree plus one loop per non-tree arrow pair."""
    tree: Dict[str, GroupoidElement] = {omega: identity(spec, omega)}
    used = set()
    q = deque([omega])
    while q:
        v = q.popleft()
        for e in spec.arrows_from(v):
            w = spec.arrows[e].target
            if w not in tree:
                tree[w] = push(spec, tree[v], e)
                used.add(spec.pair_key(e))
                q.append(w)
    out: List[GroupoidElement] = []
    for v in spec.vertices:
        if v not in tree:
            continue
        back = ginv(spec, tree[v])
        for s in spec.vertex_products[v].generators():
            out.append(gmul(spec, _push_syllable(spec, tree[v], s), back))
    for e in spec.pairs():
        a = spec.arrows[e]
        if a.source not in tree or spec.pair_key(e) in used:
            continue
        out.append(gmul(spec, push(spec, tree[a.source], e), ginv(spec, tree[a.target])))
    return list(dict.fromkeys(g for g in out if g != identity(spec, omega)))


def ragg_action(spec: RAGGSpec, omega: str, ball: QMGraph):
    from .action import GroupAction
    alg = GroupoidAlgebra(spec, omega)
    return GroupAction(ball, alg, [(str(g), g) for g in fundamental_group_generators(spec, omega)])


# algebraic hyperplanes of the ball

@dataclass
class RAGGHyperplane:
    kind: str  # "factor" or "arrow"
    base: GroupoidElement
    label: str  # factor name or arrow id
    spec: RAGGSpec = field(repr=False)

    def fiber_of(self, x: GroupoidElement) -> Optional[int]:
        """For a factor-type hyperplane dual to gF: the h in F with x in gh.link(F)."""
        if self.kind != "factor":
            raise ValueError("fibers of arrow-type hyperplanes come from the ball")
        spec = self.spec
        v = self.base.end
        if x.start != self.base.start:
            return None
        y = gmul(spec, ginv(spec, self.base), x)
        G = spec.vertex_products[v].groups[self.label]
        for h in range(G.order):
            hinv = identity(spec, v) if h == G.identity else \
                _push_syllable(spec, identity(spec, v), Syllable(self.label, G.inv(h)))
            if link_membership(spec, (v, self.label), gmul(spec, hinv, y)):
                return h
        return None

    def in_carrier(self, x: GroupoidElement) -> bool:
        return self.fiber_of(x) is not None

    def in_stabiliser(self, s: GroupoidElement) -> bool:
        """Membership of a loop in stab(J) via k h with k in F and h in link(F) fixing F."""
        spec = self.spec
        v = self.base.end
        y = gmul(spec, gmul(spec, ginv(spec, self.base), s), self.base)
        G = spec.vertex_products[v].groups[self.label]
        for k in range(G.order):
            kinv = identity(spec, v) if k == G.identity else \
                _push_syllable(spec, identity(spec, v), Syllable(self.label, G.inv(k)))
            h = gmul(spec, kinv, y)
            if h.end == v and link_membership(spec, (v, self.label), h) and \
                    phi_of_path(spec, (v, self.label), h) == self.label:
                return True
        return False


def ragg_hyperplane_oracle(spec: RAGGSpec, base: GroupoidElement, step: Token) -> RAGGHyperplane:
    """Descriptor of the hyperplane dual to the clique through base and base*step."""
    if isinstance(step, Syllable):
        return RAGGHyperplane("factor", base, step.vertex, spec)
    return RAGGHyperplane("arrow", base, spec.pair_key(step), spec)
