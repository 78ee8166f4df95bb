"""Group actions on finite balls: orbits, stabilisers, sector actions,
specialness, rotative stabilisers and fundamental domains."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Hashable, List, Optional, Sequence, Set, Tuple

from . import qmgraph as Q
from . import words as W
from .groups import FiniteGroup, compose, invert_perm, permutation_image, is_free_action, subgroup_closure
from .qmgraph import Hyperplane, QMGraph
from .words import GPPresentation


class PreconditionFailed(ValueError):
    pass


# Element algebras. Each knows how group elements multiply and act on vertex labels.

class CayleyAlgebra:
    """Left multiplication of a graph product on its own Cayley graph."""

    def __init__(self, p: GPPresentation, full: bool):
        self.p = p
        self.full = full
        self.identity = W.EMPTY

    def mul(self, g, h):
        return W.multiply(self.p, g, h)

    def inv(self, g):
        return W.inverse(self.p, g)

    def act(self, g, label):
        return W.multiply(self.p, g, label)

    def transporter(self, x, y):
        # only elements of the acting group may be returned
        return W.multiply(self.p, y, W.inverse(self.p, x)) if self.full else None

    def orbit_key(self, label):
        return 0 if self.full else None

    def fmt(self, g) -> str:
        return W.format_word(g)


class PermAlgebra:
    """A finite permutation group acting on the vertices of a plain graph."""

    def __init__(self, degree: int, gens: Sequence[Sequence[int]]):
        self.degree = degree
        self.identity = tuple(range(degree))
        group, _, perms = permutation_image(list(gens) or [self.identity], degree)
        self.elements = perms

    def mul(self, g, h):
        return compose(g, h)

    def inv(self, g):
        return invert_perm(g)

    def act(self, g, label):
        return g[label]

    def transporter(self, x, y):
        for g in self.elements:
            if g[x] == y:
                return g
        return None

    def orbit_key(self, label):
        return min(g[label] for g in self.elements)

    def fmt(self, g) -> str:
        return "(" + " ".join(map(str, g)) + ")"


class GroupAction:
    def __init__(self, graph: QMGraph, algebra, generators: Sequence[Tuple[str, Any]]):
        self.graph = graph
        self.algebra = algebra
        self.generators = list(generators)
        self._transport = None
        self._vorbits = None

    @property
    def exact(self) -> bool:
        """True when orbit questions are answered algebraically."""
        return self.algebra.orbit_key(self.graph.labels[0]) is not None

    def apply(self, g, v: int) -> Optional[int]:
        return self.graph.index.get(self.algebra.act(g, self.graph.labels[v]))

    def gens_and_inverses(self) -> List[Tuple[str, Any]]:
        out = []
        for name, g in self.generators:
            out.append((name, g))
            gi = self.algebra.inv(g)
            if gi != g:
                out.append((name + "^-1", gi))
        return out

    def elements_upto(self, length: int) -> Dict[Any, str]:
        """Distinct group elements given by words of at most ``length`` generators."""
        e = self.algebra.identity
        seen = {e: ""}
        frontier = [e]
        gens = self.gens_and_inverses()
        for _ in range(length):
            nxt = []
            for g in frontier:
                for name, s in gens:
                    h = self.algebra.mul(g, s)
                    if h not in seen:
                        seen[h] = (seen[g] + " " + name).strip()
                        nxt.append(h)
            frontier = nxt
        return seen

    # vertex orbits and transport

    def vertex_orbits(self) -> Tuple[List[List[int]], Dict[int, Tuple[int, Any]]]:
        """Orbit partition plus, per vertex v, (canonical vertex c, element g with g.v = c)."""
        if self._vorbits is not None:
            return self._vorbits
        g = self.graph
        alg = self.algebra
        trans: Dict[int, Tuple[int, Any]] = {}
        if self.exact:
            canon: Dict[Hashable, int] = {}
            for v in range(g.n):
                key = alg.orbit_key(g.labels[v])
                c = canon.setdefault(key, v)
                t = alg.transporter(g.labels[v], g.labels[c])
                if t is None:
                    raise RuntimeError("transporter failed inside one orbit")
                trans[v] = (c, t)
        else:
            # breadth-first search over generator moves inside the ball;
            # stored element h_v satisfies h_v . c = v
            gens = self.gens_and_inverses()
            for c in range(g.n):
                if c in trans:
                    continue
                trans[c] = (c, alg.identity)
                up = {c: alg.identity}
                q = deque([c])
                while q:
                    x = q.popleft()
                    for _, s in gens:
                        y = self.apply(s, x)
                        if y is not None and y not in up:
                            up[y] = alg.mul(s, up[x])
                            trans[y] = (c, alg.inv(up[y]))
                            q.append(y)
        groups: Dict[int, List[int]] = {}
        for v in range(g.n):
            groups.setdefault(trans[v][0], []).append(v)
        self._vorbits = (sorted(groups.values()), trans)
        return self._vorbits

    def transporter(self, x: int, y: int):
        t = self.algebra.transporter(self.graph.labels[x], self.graph.labels[y])
        if t is not None:
            return t
        _, trans = self.vertex_orbits()
        cx, gx = trans[x]
        cy, gy = trans[y]
        if cx != cy:
            return None
        return self.algebra.mul(self.algebra.inv(gy), gx)

    def transport(self) -> "HyperplaneTransport":
        if self._transport is None:
            self._transport = HyperplaneTransport(self)
        return self._transport


def action_from_subgroup(p: GPPresentation, gen_words: Sequence[Sequence[W.Syllable]],
                         ball: QMGraph) -> GroupAction:
    gens = [W.reduce(p, w) for w in gen_words]
    gens = [g for g in dict.fromkeys(gens) if g]
    full = True
    for u in p.vertices:
        G = p.groups[u]
        local = [g[0].element for g in gens if len(g) == 1 and g[0].vertex == u]
        if subgroup_closure(G, local)[1] != 1:
            full = False
            break
    return GroupAction(ball, CayleyAlgebra(p, full), [(W.format_word(g), g) for g in gens])


def full_action(p: GPPresentation, ball: QMGraph) -> GroupAction:
    return action_from_subgroup(p, [(s,) for s in p.generators()], ball)


def action_from_permutations(graph: QMGraph, perms: Sequence[Sequence[int]]) -> GroupAction:
    for q in perms:
        for a, b in graph.edges():
            if not graph.has_edge(q[a], q[b]):
                raise ValueError(f"permutation {q} does not preserve the edge {(a, b)}")
    alg = PermAlgebra(graph.n, perms)
    return GroupAction(graph, alg, [(f"p{i}", tuple(q)) for i, q in enumerate(perms)])


# Hyperplane transport

def full_cliques(J: Hyperplane) -> List[Tuple[int, ...]]:
    k = len(J.sectors)
    return [tuple(sorted(c)) for c in J.cliques() if len(c) == k]


@dataclass
class Relation:
    src: int
    dst: int
    element: Any
    bijection: Tuple[int, ...]  # sector of src -> sector of dst


class HyperplaneTransport:
    """Relations between ball hyperplanes induced by group elements, with the
    induced bijections between sector sets. A spanning forest identifies each
    hyperplane with its orbit representative; the remaining relations give
    stabiliser elements of the representatives."""

    def __init__(self, act: GroupAction):
        self.act = act
        g = act.graph
        alg = act.algebra
        self.hyps = Q.hyperplanes(g)
        self.relations: List[Relation] = []
        _, vtrans = act.vertex_orbits()
        gens = [s for _, s in act.gens_and_inverses()]
        for J in self.hyps:
            for C in full_cliques(J):
                x = C[0]
                moves = []
                c, t = vtrans[x]
                if c != x:
                    moves.append(t)
                for y in C[1:]:
                    if vtrans[y][0] == vtrans[x][0]:
                        m = act.transporter(x, y)
                        if m is not None:
                            moves.append(m)
                moves.extend(gens)
                for m in moves:
                    rel = self._relation(J, C, m)
                    if rel is not None:
                        self.relations.append(rel)
        self._spanning()

    def _relation(self, J: Hyperplane, C: Tuple[int, ...], m) -> Optional[Relation]:
        act = self.act
        g = act.graph
        imgs = [act.apply(m, v) for v in C]
        if any(i is None for i in imgs):
            return None
        if not all(g.has_edge(a, b) for i, a in enumerate(imgs) for b in imgs[i + 1:]):
            raise RuntimeError("generator does not preserve adjacency")
        J2 = Q.hyperplane_of_edge(g, imgs[0], imgs[1])
        if len(J2.sectors) != len(C):
            return None
        bij = [0] * len(C)
        for v, w in zip(C, imgs):
            bij[J.sector_of(v)] = J2.sector_of(w)
        return Relation(J.id, J2.id, m, tuple(bij))

    def _spanning(self):
        alg = self.act.algebra
        adj: Dict[int, List[Tuple[Relation, bool]]] = {J.id: [] for J in self.hyps}
        for r in self.relations:
            adj[r.src].append((r, True))
            if r.src != r.dst:
                adj[r.dst].append((r, False))
        self.rep: Dict[int, int] = {}
        self.to_rep: Dict[int, Tuple[Any, Tuple[int, ...]]] = {}
        self.chords: Dict[int, List[Tuple[Any, Tuple[int, ...]]]] = {}
        for J in self.hyps:
            if J.id in self.rep:
                continue
            root = J.id
            n = len(J.sectors)
            self.rep[root] = root
            self.to_rep[root] = (alg.identity, tuple(range(n)))
            self.chords[root] = []
            q = deque([root])
            tree_used = set()
            while q:
                P = q.popleft()
                gP, bP = self.to_rep[P]
                for r, forward in adj[P]:
                    if forward:
                        h, beta, X = r.element, r.bijection, r.dst
                    else:
                        h, beta, X = alg.inv(r.element), invert_perm(r.bijection), r.src
                    # h maps P to X; composite for X is gP * h^-1
                    if X not in self.rep:
                        self.rep[X] = root
                        self.to_rep[X] = (alg.mul(gP, alg.inv(h)), tuple(bP[i] for i in invert_perm(beta)))
                        tree_used.add(id(r))
                        q.append(X)
            for r in self.relations:
                if self.rep.get(r.src) != root or id(r) in tree_used:
                    continue
                gS, bS = self.to_rep[r.src]
                gD, bD = self.to_rep[r.dst]
                k = alg.mul(alg.mul(gD, r.element), alg.inv(gS))
                perm = tuple(bD[r.bijection[invert_perm(bS)[s]]] for s in range(n))
                self.chords[root].append((k, perm))

    def representatives(self) -> List[int]:
        return sorted(set(self.rep.values()))

    def orbit_of(self, jid: int) -> int:
        return self.rep[jid]

    def orbits(self) -> List[List[int]]:
        out: Dict[int, List[int]] = {}
        for j, r in self.rep.items():
            out.setdefault(r, []).append(j)
        return [sorted(v) for _, v in sorted(out.items())]

    def element_between(self, a: int, b: int):
        """An element sending hyperplane a to hyperplane b (same orbit)."""
        alg = self.act.algebra
        ga, _ = self.to_rep[a]
        gb, _ = self.to_rep[b]
        return alg.mul(alg.inv(gb), ga)


def orbits(act: GroupAction, objects: str = "vertices") -> Tuple[List[List[Any]], bool]:
    """Orbit partition of vertices, edges or hyperplanes, with an exactness flag."""
    if objects == "vertices":
        parts, _ = act.vertex_orbits()
        return parts, act.exact
    if objects == "hyperplanes":
        return act.transport().orbits(), False
    if objects == "edges":
        g = act.graph
        edges = g.edges()
        eid = {e: i for i, e in enumerate(edges)}
        uf = Q._UF(len(edges))
        for name, s in act.gens_and_inverses():
            for (a, b) in edges:
                x, y = act.apply(s, a), act.apply(s, b)
                if x is not None and y is not None:
                    uf.union(eid[(a, b)], eid[Q._e(x, y)])
        groups: Dict[int, List[Tuple[int, int]]] = {}
        for e in edges:
            groups.setdefault(uf.find(eid[e]), []).append(e)
        return sorted(groups.values()), False
    raise ValueError(f"unknown object kind {objects!r}")


# Stabilisers and sector actions

def _maps_into(act: GroupAction, g, J: Hyperplane) -> Optional[bool]:
    """Does g send J to itself? None when no full clique of J lands in the ball."""
    for C in full_cliques(J):
        imgs = [act.apply(g, v) for v in C]
        if all(i is not None for i in imgs):
            return act.graph._edge_hyp[Q._e(imgs[0], imgs[1])] == J.id
    return None


def stabiliser(act: GroupAction, J: Hyperplane, length_bound: int = 4) -> List[Any]:
    """Generators of stab(J). Exact for the full left action of a graph product,
    otherwise a search over words of bounded length within the ball."""
    alg = act.algebra
    if isinstance(alg, CayleyAlgebra) and alg.full:
        p = alg.p
        a, b = J.min_edge
        x, y = act.graph.labels[a], act.graph.labels[b]
        step = W.multiply(p, W.inverse(p, x), y)
        u = step[0].vertex
        base = Q.coset_rep(p, x, p.star(u))
        binv = W.inverse(p, base)
        out = []
        for v in sorted(p.star(u), key=p.rank.get):
            G = p.groups[v]
            for h in range(G.order):
                if h != G.identity:
                    out.append(W.multiply(p, W.multiply(p, base, (W.Syllable(v, h),)), binv))
        return out
    out = []
    for g, word in act.elements_upto(length_bound).items():
        if g != alg.identity and _maps_into(act, g, J):
            out.append(g)
    return out


def sector_permutation(act: GroupAction, g, J: Hyperplane) -> Optional[Tuple[int, ...]]:
    for C in full_cliques(J):
        imgs = [act.apply(g, v) for v in C]
        if all(i is not None for i in imgs):
            if act.graph._edge_hyp[Q._e(imgs[0], imgs[1])] != J.id:
                return None
            perm = [0] * len(C)
            for v, w in zip(C, imgs):
                perm[J.sector_of(v)] = J.sector_of(w)
            return tuple(perm)
    return None


@dataclass
class SectorAction:
    hyperplane: Hyperplane
    sectors: List[frozenset]
    group: FiniteGroup
    assignment: List[Tuple[int, ...]]
    orbit_count: int
    free: bool
    witness: Optional[Tuple[int, int]]
    exact: bool

    def orbits(self) -> List[List[int]]:
        seen = set()
        out = []
        for s in range(len(self.sectors)):
            if s in seen:
                continue
            orb = sorted({p[s] for p in self.assignment})
            seen.update(orb)
            out.append(orb)
        return out


def sector_action(act: GroupAction, J: Hyperplane, strict: bool = False) -> SectorAction:
    exact = J.window_exact or (isinstance(act.algebra, CayleyAlgebra) and act.algebra.full)
    if strict and not exact:
        raise Q.WindowInexact(f"hyperplane {J.id} is not window exact")
    tr = act.transport()
    root = tr.orbit_of(J.id)
    n = len(J.sectors)
    perms = [p for _, p in tr.chords[root]]
    group, _, elems = permutation_image(perms or [tuple(range(n))], n)
    # conjugate to J through the bijection J -> representative
    _, beta = tr.to_rep[J.id]
    binv = invert_perm(beta)
    assignment = [tuple(binv[p[beta[s]]] for s in range(n)) for p in elems]
    free, count, wit = is_free_action(group, assignment, n)
    return SectorAction(J, J.sectors, group, assignment, count, free, wit, exact)


# Specialness

@dataclass
class Verdict:
    ok: bool
    witnesses: List[dict] = field(default_factory=list)
    exact: bool = False
    scope: str = ""

    def to_json(self) -> dict:
        return {"ok": self.ok, "exact": self.exact, "scope": self.scope, "witnesses": self.witnesses}


def _transverse_pairs(g: QMGraph) -> Set[Tuple[int, int]]:
    Q.hyperplanes(g)
    hid = g._edge_hyp
    out = set()
    for v, a, w, c in g.induced_squares():
        x, y = hid[Q._e(v, a)], hid[Q._e(v, c)]
        out.add((min(x, y), max(x, y)))
    return out


def _tangent_pairs(g: QMGraph, transverse: Set[Tuple[int, int]]) -> Dict[Tuple[int, int], int]:
    """Tangent pairs detected at certified vertices, with the shared vertex."""
    hid = g._edge_hyp
    out = {}
    for v in g.certified_vertices():
        hs = sorted({hid[Q._e(v, w)] for w in g.adj[v]})
        for i, a in enumerate(hs):
            for b in hs[i + 1:]:
                if (a, b) not in transverse and (a, b) not in out:
                    out[(a, b)] = v
    return out


def check_hyperplane_special(act: GroupAction, limit: int = 20) -> Verdict:
    g = act.graph
    tr = act.transport()
    alg = act.algebra
    trans = _transverse_pairs(g)
    tang = _tangent_pairs(g, trans)
    wits = []

    def word(a, b):
        return alg.fmt(tr.element_between(a, b))

    for (a, b) in sorted(trans):
        if tr.orbit_of(a) == tr.orbit_of(b):
            wits.append({"kind": "self-transverse", "hyperplanes": [a, b], "element": word(a, b)})
    for (a, b), v in sorted(tang.items()):
        if tr.orbit_of(a) == tr.orbit_of(b):
            wits.append({"kind": "self-tangent", "hyperplanes": [a, b], "vertex": v,
                         "element": word(a, b)})
    by_orbit: Dict[int, Set[int]] = {}
    for J in tr.hyps:
        by_orbit.setdefault(tr.orbit_of(J.id), set()).add(J.id)
    trans_with: Dict[int, Set[int]] = {}
    for a, b in trans:
        trans_with.setdefault(a, set()).add(b)
        trans_with.setdefault(b, set()).add(a)
    for (a, b), v in sorted(tang.items()):
        for x, y in ((a, b), (b, a)):
            partners = trans_with.get(x, set()) & by_orbit[tr.orbit_of(y)]
            if partners:
                z = min(partners)
                wits.append({"kind": "inter-osculation", "hyperplanes": [x, y, z], "vertex": v,
                             "element": word(z, y)})
                break
    wits = wits[:limit]
    scope = f"window: no violation within radius {g.radius - g.certified_interior}" if g.truncated \
        else "whole graph"
    return Verdict(not wits, wits, False, scope)


def check_special(act: GroupAction) -> Verdict:
    hs = check_hyperplane_special(act)
    wits = list(hs.witnesses)
    tr = act.transport()
    for r in tr.representatives():
        sa = sector_action(act, tr.hyps[r])
        if not sa.free:
            el, sec = sa.witness
            wits.append({"kind": "non-free sector action", "hyperplanes": [r],
                         "permutation": list(sa.assignment[el]), "fixed_sector": sec})
    return Verdict(not wits, wits, False, hs.scope)


def vertex_stabilisers_trivial(act: GroupAction, length: int = 4) -> Verdict:
    alg = act.algebra
    wits = []
    cert = act.graph.certified_vertices()
    for h, word in act.elements_upto(length).items():
        if h == alg.identity:
            continue
        for v in cert:
            if act.apply(h, v) == v:
                wits.append({"element": alg.fmt(h), "word": word, "vertex": v})
                break
        if len(wits) >= 10:
            break
    return Verdict(not wits, wits, False, f"words of length <= {length}")


# Rotative stabilisers and fundamental domains

def rotative_stabiliser(act: GroupAction, J: Hyperplane, length_bound: int = 4) -> List[Any]:
    alg = act.algebra
    if isinstance(alg, CayleyAlgebra) and alg.full:
        p = alg.p
        a, b = J.min_edge
        x, y = act.graph.labels[a], act.graph.labels[b]
        u = W.multiply(p, W.inverse(p, x), y)[0].vertex
        xinv = W.inverse(p, x)
        G = p.groups[u]
        return [W.multiply(p, W.multiply(p, x, (W.Syllable(u, h),)), xinv)
                for h in range(G.order) if h != G.identity]
    out = []
    cl = full_cliques(J)
    for g, _ in act.elements_upto(length_bound).items():
        if g == alg.identity:
            continue
        checked = False
        ok = True
        for C in cl:
            imgs = [act.apply(g, v) for v in C]
            if any(i is None for i in imgs):
                continue
            checked = True
            if set(imgs) != set(C):
                ok = False
                break
        if checked and ok:
            out.append(g)
    return out


def _perm_group_of(act: GroupAction, gens: Sequence[Any], J: Hyperplane):
    n = len(J.sectors)
    perms = []
    for g in gens:
        p = sector_permutation(act, g, J)
        if p is None:
            raise PreconditionFailed(f"cannot evaluate a rotative generator on hyperplane {J.id}")
        perms.append(p)
    return permutation_image(perms or [tuple(range(n))], n)


def check_rotative(act: GroupAction, hyps: Sequence[Hyperplane]) -> Verdict:
    wits = []
    for J in hyps:
        gens = rotative_stabiliser(act, J)
        group, _, elems = _perm_group_of(act, gens, J)
        free, count, wit = is_free_action(group, elems, len(J.sectors))
        if not free or count != 1:
            wits.append({"hyperplane": J.id, "free": free, "orbits": count})
    return Verdict(not wits, wits, False, "rotative stabilisers")


def separates(g: QMGraph, J1: Hyperplane, x: int, J2: Hyperplane) -> bool:
    if J1.id == J2.id:
        return False
    secs = {J1.sector_of(v) for v in J2.carrier}
    return len(secs) == 1 and J1.sector_of(x) not in secs


def is_peripheral(g: QMGraph, x0: int, hyps: Sequence[Hyperplane]) -> bool:
    return not any(separates(g, a, x0, b) for a in hyps for b in hyps)


@dataclass
class DomainReport:
    ok: bool
    domain: List[int]
    peel_logs: Dict[int, List[dict]]
    violations: List[dict]
    rotative_generators: Dict[int, List[str]]

    def to_json(self) -> dict:
        return {"ok": self.ok, "domain": self.domain, "violations": self.violations,
                "rotative_generators": {str(k): v for k, v in self.rotative_generators.items()},
                "peeled_vertices": len(self.peel_logs),
                "max_peel_steps": max((len(v) for v in self.peel_logs.values()), default=0)}


def fundamental_domain_check(act: GroupAction, x0: int, hyps: Sequence[Hyperplane],
                             word_length: int = 4, check_stabilisers: bool = True) -> DomainReport:
    g = act.graph
    alg = act.algebra
    rot = check_rotative(act, hyps)
    if not rot.ok:
        raise PreconditionFailed(f"action is not rotative on the collection: {rot.witnesses}")
    if not is_peripheral(g, x0, hyps):
        raise PreconditionFailed("basepoint is not peripheral for the collection")
    if check_stabilisers:
        vs = vertex_stabilisers_trivial(act, 2)
        if not vs.ok:
            raise PreconditionFailed(f"non-trivial vertex stabiliser: {vs.witnesses[0]}")
    Y = set(range(g.n))
    for J in hyps:
        s = J.sector_of(x0)
        Y &= J.sectors[s]
    Ysorted = sorted(Y)
    hyp_ids = {J.id for J in hyps}
    rot_gens = {J.id: rotative_stabiliser(act, J) for J in hyps}
    # elements of each rotative stabiliser with their sector permutations
    rot_elems: Dict[int, List[Tuple[Any, Tuple[int, ...]]]] = {}
    for J in hyps:
        n = len(J.sectors)
        ident = tuple(range(n))
        found = {ident: alg.identity}
        frontier = [ident]
        gens = [(sector_permutation(act, h, J), h) for h in rot_gens[J.id]]
        while frontier:
            nxt = []
            for pm in frontier:
                for gp, h in gens:
                    q = tuple(gp[pm[i]] for i in range(n))
                    if q not in found:
                        found[q] = alg.mul(h, found[pm])
                        nxt.append(q)
            frontier = nxt
        rot_elems[J.id] = [(el, pm) for pm, el in found.items()]

    # distances to Y by multi-source search
    def dist_to_Y(v):
        d = g.bfs(v)
        best = min(d[y] for y in Ysorted)
        return best, [y for y in Ysorted if d[y] == best], d

    violations = []
    logs: Dict[int, List[dict]] = {}
    for v in range(g.n):
        x = v
        log = []
        while x not in Y:
            dY, near, dx = dist_to_Y(x)
            if len(near) != 1:
                violations.append({"kind": "no gate", "vertex": x})
                break
            y = near[0]
            dy = g.bfs(y)
            prev = [w for w in g.adj[y] if dx[w] == dx[y] - 1]
            if not prev:
                violations.append({"kind": "no geodesic", "vertex": x})
                break
            J = Q.hyperplane_of_edge(g, min(prev), y)
            if J.id not in hyp_ids:
                violations.append({"kind": "last edge outside collection", "vertex": x, "hyperplane": J.id})
                break
            target = J.sector_of(x0)
            src = J.sector_of(x)
            move = next((el for el, pm in rot_elems[J.id] if pm[src] == target), None)
            if move is None:
                violations.append({"kind": "no rotation", "vertex": x, "hyperplane": J.id})
                break
            x2 = act.apply(move, x)
            if x2 is None:
                violations.append({"kind": "left the window", "vertex": x, "hyperplane": J.id})
                break
            if dist_to_Y(x2)[0] >= dY:
                violations.append({"kind": "no progress", "vertex": x, "hyperplane": J.id})
                break
            log.append({"from": x, "to": x2, "hyperplane": J.id, "element": alg.fmt(move)})
            x = x2
        logs[v] = log
    # no non-trivial short product of rotative generators sends Y into Y
    all_gens = [h for J in hyps for h in rot_gens[J.id]]
    sub = GroupAction(g, alg, [(alg.fmt(h), h) for h in all_gens])
    for h, word in sub.elements_upto(word_length).items():
        if h == alg.identity:
            continue
        for y in Ysorted:
            z = act.apply(h, y)
            if z is not None and z in Y:
                violations.append({"kind": "domain overlap", "element": alg.fmt(h), "word": word,
                                   "from": y, "to": z})
                break
    return DomainReport(not violations, Ysorted, logs, violations,
                        {k: [alg.fmt(h) for h in v] for k, v in rot_gens.items()})


def tangent_collection(g: QMGraph, Y: Sequence[int]) -> List[Hyperplane]:
    """Hyperplanes not crossing Y whose carrier meets Y."""
    Y = set(Y)
    out = []
    for J in Q.hyperplanes(g):
        crosses = any(a in Y and b in Y for a, b in J.edges)
        if not crosses and J.carrier & Y:
            out.append(J)
    return out
