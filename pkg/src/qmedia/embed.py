"""Equivariant isometric embeddings of special actions into graph products."""
from __future__ import annotations

import random
from collections import deque
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from . import action as A
from . import qmgraph as Q
from . import words as W
from .groups import FiniteGroup, cyclic, direct_sum, invert_perm, permutation_image
from .qmgraph import QMGraph
from .words import GPPresentation, Syllable


class AmbiguousLabel(RuntimeError):
    def __init__(self, msg, witness=None):
        super().__init__(msg)
        self.witness = witness


@dataclass
class OrbitData:
    """Data attached to one hyperplane orbit (one vertex of the target graph)."""
    name: str
    rep: int
    sectors: int
    sym: FiniteGroup  # permutation group induced by stab(rep) on its sectors
    sym_perms: List[Tuple[int, ...]]
    transversal: List[int]  # one sector per orbit of sym, minimal index first
    k_size: int
    group: FiniteGroup  # sym (+) Z/k_size
    sector_code: List[int]  # sector of rep -> element of group


@dataclass
class EmbeddingData:
    action: A.GroupAction
    x0: int
    x1: int
    orbits: List[OrbitData]
    orbit_of_hyp: Dict[int, int]
    target: GPPresentation
    sector_labels: Dict[Tuple[int, int], int]  # (hyperplane, sector) -> element of its orbit group
    base_sector: Dict[int, int]  # hyperplane -> sector containing x0
    phi: List[W.ReducedWord]

    @property
    def graph(self) -> QMGraph:
        return self.action.graph

    def edge_label(self, a: int, b: int) -> Syllable:
        g = self.graph
        J = Q.hyperplane_of_edge(g, a, b)
        i = self.orbit_of_hyp[J.id]
        G = self.orbits[i].group
        l1 = self.sector_labels[(J.id, J.sector_of(a))]
        l2 = self.sector_labels[(J.id, J.sector_of(b))]
        return Syllable(self.orbits[i].name, G.mul(G.inv(l1), l2))

    def to_json(self) -> dict:
        g = self.graph
        return {
            "target": self.target.to_json(),
            "orbits": [{"name": o.name, "representative": o.rep, "sectors": o.sectors,
                        "sector_group_order": o.sym.order, "sector_orbits": len(o.transversal),
                        "k": o.k_size} for o in self.orbits],
            "x0": Q.label_to_str(g.labels[self.x0]),
            "x1": Q.label_to_str(g.labels[self.x1]),
            "phi": {Q.label_to_str(g.labels[v]): W.format_word(self.phi[v]) for v in range(g.n)},
        }


def _orbit_name(g: QMGraph, J: Q.Hyperplane, taken: set) -> str:
    lab = g.edge_labels.get(J.min_edge) if g.edge_labels else None
    name = str(lab) if lab is not None else f"J{J.id}"
    if name in taken:
        name = f"{name}#{J.id}"
    taken.add(name)
    return name


def orbit_hyperplane_graph(act: A.GroupAction) -> Tuple[List[int], List[Tuple[int, int]]]:
    """Orbit representatives and the pairs of orbits with transverse members."""
    tr = act.transport()
    reps = tr.representatives()
    pos = {r: i for i, r in enumerate(reps)}
    edges = set()
    for a, b in A._transverse_pairs(act.graph):
        i, j = pos[tr.orbit_of(a)], pos[tr.orbit_of(b)]
        if i == j:
            raise A.PreconditionFailed(f"hyperplanes {a} and {b} are transverse and in one orbit")
        edges.add((min(i, j), max(i, j)))
    return reps, sorted(edges)


def build_vertex_groups(act: A.GroupAction, extra_k: Union[int, Dict[str, int]] = 0) -> List[OrbitData]:
    g = act.graph
    tr = act.transport()
    taken: set = set()
    out = []
    for r in tr.representatives():
        J = tr.hyps[r]
        name = _orbit_name(g, J, taken)
        sa = A.sector_action(act, J)
        if not sa.free:
            raise A.PreconditionFailed(f"sector action on hyperplane {r} is not free")
        sym, perms = sa.group, sa.assignment
        transversal = [orb[0] for orb in sa.orbits()]
        k = len(transversal)
        if isinstance(extra_k, dict):
            ksize = extra_k.get(name, k)
            if ksize < k:
                raise ValueError(f"K for {name} must have at least {k} elements")
        else:
            ksize = k + extra_k if k > 1 else k
        group = direct_sum(sym, cyclic(ksize))
        code = [-1] * len(J.sectors)
        for kk, x in enumerate(transversal):
            for sigma in range(sym.order):
                code[perms[sigma][x]] = sigma * ksize + kk
        out.append(OrbitData(name, r, len(J.sectors), sym, perms, transversal, ksize, group, code))
    return out


def label_sectors(act: A.GroupAction, orbits: List[OrbitData], x0: int
                  ) -> Tuple[Dict[Tuple[int, int], int], Dict[int, int], Dict[int, int]]:
    """Label every sector of every ball hyperplane by an element of its orbit group.

    The translate of a hyperplane onto its representative is corrected by a
    stabiliser element so that the base sector lands in the orbit of K
    containing the base sector of the representative."""
    tr = act.transport()
    by_rep = {o.rep: i for i, o in enumerate(orbits)}
    labels: Dict[Tuple[int, int], int] = {}
    base: Dict[int, int] = {}
    orbit_of: Dict[int, int] = {}
    for J in tr.hyps:
        i = by_rep[tr.orbit_of(J.id)]
        o = orbits[i]
        G, m = o.group, o.k_size
        _, beta = tr.to_rep[J.id]
        sJ = J.sector_of(x0)
        base[J.id] = sJ
        orbit_of[J.id] = i
        R = tr.hyps[o.rep]
        rho = o.sector_code[R.sector_of(x0)] // m
        tau = o.sector_code[beta[sJ]] // m
        sigma = o.sym.mul(rho, o.sym.inv(tau))
        back = G.inv(o.sector_code[R.sector_of(x0)])
        for s in range(len(J.sectors)):
            lam = G.mul(sigma * m, o.sector_code[beta[s]])
            labels[(J.id, s)] = G.mul(lam, back)
    # edge labels must not depend on the translating element
    for rel in tr.relations:
        i = orbit_of[rel.src]
        G = orbits[i].group
        n = orbits[i].sectors
        for s1 in range(n):
            for s2 in range(n):
                if s1 == s2:
                    continue
                a = G.mul(G.inv(labels[(rel.src, s1)]), labels[(rel.src, s2)])
                b = G.mul(G.inv(labels[(rel.dst, rel.bijection[s1])]), labels[(rel.dst, rel.bijection[s2])])
                if a != b:
                    raise AmbiguousLabel(f"labels of hyperplanes {rel.src} and {rel.dst} disagree",
                                         (rel.src, rel.dst, s1, s2))
    return labels, base, orbit_of


def label_path(data: EmbeddingData, path: Sequence[int]) -> W.GPWord:
    return tuple(data.edge_label(a, b) for a, b in zip(path, path[1:]))


def build_embedding(act: A.GroupAction, x0: int = 0, x1: int = 0,
                    extra_k: Union[int, Dict[str, int]] = 0) -> EmbeddingData:
    g = act.graph
    reps, pairs = orbit_hyperplane_graph(act)
    orbits = build_vertex_groups(act, extra_k)
    names = [o.name for o in orbits]
    target = GPPresentation(names, [(names[i], names[j]) for i, j in pairs],
                            {o.name: o.group for o in orbits}, "target")
    labels, base, orbit_of = label_sectors(act, orbits, x0)
    data = EmbeddingData(act, x0, x1, orbits, orbit_of, target, labels, base, [])
    data.phi = _phi_from(data, x1)
    return data


def _phi_from(data: EmbeddingData, start: int) -> List[W.ReducedWord]:
    g = data.graph
    p = data.target
    phi: List[Optional[W.ReducedWord]] = [None] * g.n
    phi[start] = W.EMPTY
    q = deque([start])
    while q:
        a = q.popleft()
        for b in sorted(g.adj[a]):
            if phi[b] is None:
                phi[b] = W.multiply(p, phi[a], (data.edge_label(a, b),))
                q.append(b)
    return phi  # type: ignore[return-value]


def phi_map(data: EmbeddingData, v: int) -> W.ReducedWord:
    return data.phi[v]


def phi_hom(data: EmbeddingData, element) -> Optional[W.ReducedWord]:
    """Image of a group element, or None if it moves x1 out of the ball."""
    v = data.action.apply(element, data.x1)
    return None if v is None else data.phi[v]


def translate_back(data: EmbeddingData) -> Dict[Syllable, Syllable]:
    """For the full action of a graph product on its own Cayley ball: the
    dictionary sending each target syllable back to the source syllable with
    the same image."""
    g = data.graph
    out = {}
    for v in range(g.n):
        w = g.labels[v]
        if len(w) == 1:
            img = data.phi[v]
            if len(img) != 1:
                raise ValueError(f"generator {W.format_word(w)} maps to {W.format_word(img)}")
            out[img[0]] = w[0]
    return out


# Verification

@dataclass
class ClaimResult:
    passed: bool = True
    checked: int = 0
    witness: Any = None

    def fail(self, witness):
        if self.passed:
            self.witness = witness
        self.passed = False

    def to_json(self) -> dict:
        return {"pass": self.passed, "checked": self.checked, "witness": self.witness}


@dataclass
class EmbeddingReport:
    claims: Dict[str, ClaimResult] = field(default_factory=dict)
    certified_pairs: int = 0

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.claims.values())

    def to_json(self) -> dict:
        return {"ok": self.ok, "certified_pairs": self.certified_pairs,
                "claims": {k: v.to_json() for k, v in self.claims.items()}}


def _bfs_parents(g: QMGraph, src: int):
    dist = [-1] * g.n
    par = [-1] * g.n
    dist[src] = 0
    q = deque([src])
    while q:
        a = q.popleft()
        for b in sorted(g.adj[a]):
            if dist[b] < 0:
                dist[b] = dist[a] + 1
                par[b] = a
                q.append(b)
    return dist, par


def verify_embedding(data: EmbeddingData, samples: int = 1000, seed: int = 0,
                     basepoints: int = 3) -> EmbeddingReport:
    g = data.graph
    p = data.target
    act = data.action
    alg = act.algebra
    rng = random.Random(seed)
    rep = EmbeddingReport()
    C = rep.claims
    # recomputed from the labels so that a tampered map or label is caught
    phi = _phi_from(data, data.x1)
    cert = g.certified_vertices()

    # the cocycle condition on every oriented ball edge makes the path label well defined
    c = C["well_defined"] = ClaimResult()
    for v in range(g.n):
        if data.phi and data.phi[v] != phi[v]:
            c.fail({"stored_phi_differs_at": v})
    for a, b in g.edges():
        for x, y in ((a, b), (b, a)):
            c.checked += 1
            if W.multiply(p, phi[x], (data.edge_label(x, y),)) != phi[y]:
                c.fail([x, y])

    # geodesic labels, isometry
    geo = C["geodesic_labels_reduced"] = ClaimResult()
    iso = C["isometry"] = ClaimResult()
    for i, x in enumerate(cert):
        dist, par = _bfs_parents(g, x)
        for y in cert[i + 1:]:
            path = [y]
            while path[-1] != x:
                path.append(par[path[-1]])
            path.reverse()
            word = label_path(data, path)
            ok, _ = W.is_graphically_reduced(p, word)
            geo.checked += 1
            if not ok:
                geo.fail({"path": path, "label": W.format_word(word)})
            d_img = W.length(W.multiply(p, W.inverse(p, phi[x]), phi[y]))
            iso.checked += 1
            if d_img != dist[y]:
                iso.fail({"pair": [x, y], "distance": dist[y], "image_distance": d_img})
    rep.certified_pairs = iso.checked

    # changing the basepoint of the path labels
    bc = C["base_change"] = ClaimResult()
    for q in rng.sample(cert, min(basepoints, len(cert))):
        phi_q = _phi_from(data, q)
        for x in range(g.n):
            bc.checked += 1
            if W.multiply(p, phi[q], phi_q[x]) != phi[x]:
                bc.fail({"basepoint": q, "vertex": x})

    # equivariance and the induced homomorphism
    elems = [e for e in act.elements_upto(2) if act.apply(e, data.x1) is not None]
    def hom_image(e):
        v = act.apply(e, data.x1)
        return None if v is None else phi[v]

    eq = C["equivariance"] = ClaimResult()
    for e in elems:
        img = hom_image(e)
        for x in range(g.n):
            y = act.apply(e, x)
            if y is None:
                continue
            eq.checked += 1
            if phi[y] != W.multiply(p, img, phi[x]):
                eq.fail({"element": alg.fmt(e), "vertex": x})
    hom = C["homomorphism"] = ClaimResult()
    if elems:
        for _ in range(samples):
            a, b = rng.choice(elems), rng.choice(elems)
            ab = alg.mul(a, b)
            if act.apply(ab, data.x1) is None:
                continue
            hom.checked += 1
            if hom_image(ab) != W.multiply(p, hom_image(a), hom_image(b)):
                hom.fail({"pair": [alg.fmt(a), alg.fmt(b)]})

    # cliques, triangles and squares of the image around certified vertices
    image = set(phi)
    cl = C["clique_images"] = ClaimResult()
    tri = C["image_triangles"] = ClaimResult()
    conv = C["local_convexity"] = ClaimResult()
    for x in cert:
        steps = {y: data.edge_label(x, y) for y in g.adj[x]}
        for y, s in steps.items():
            G = p.groups[s.vertex]
            coset = {W.multiply(p, phi[x], (Syllable(s.vertex, h),)) for h in range(G.order)}
            here = {phi[z] for z in g.adj[x] | {x} if steps.get(z, s).vertex == s.vertex}
            cl.checked += 1
            if not coset <= here:
                cl.fail({"vertex": x, "target_vertex": s.vertex})
            tri.checked += 1
            missing = [w for w in coset if w not in image]
            if missing:
                tri.fail({"edge": [x, y], "missing": W.format_word(missing[0])})
        items = sorted(steps.items())
        for i, (y, s) in enumerate(items):
            for z, t in items[i + 1:]:
                if s.vertex != t.vertex and p.adjacent(s.vertex, t.vertex):
                    conv.checked += 1
                    d = W.multiply(p, phi[x], (s, t))
                    if d not in image:
                        conv.fail({"centre": x, "ends": [y, z], "missing": W.format_word(d)})
    gated = C["gated_image"] = ClaimResult(tri.passed and conv.passed, tri.checked + conv.checked,
                                           tri.witness or conv.witness)
    return rep


def virtual_retract_certificate(data: EmbeddingData, subgroup: Sequence[Any], Y: Sequence[int],
                                word_length: int = 4) -> dict:
    """Window evidence that a subgroup stabilising the gated subgraph Y is a
    retract of a finite-index subgroup: the rotative stabilisers of the
    hyperplanes tangent to Y have Y as a fundamental domain and meet the
    subgroup trivially."""
    act = data.action
    g = act.graph
    alg = act.algebra
    Yset = set(Y)
    problems = []
    ok, wit = Q.is_gated(g, Y)
    if not ok:
        problems.append({"kind": "Y not gated", "witness": list(wit)})
    for h in subgroup:
        for y in Y:
            z = act.apply(h, y)
            if z is not None and z not in Yset:
                problems.append({"kind": "Y not invariant", "element": alg.fmt(h), "vertex": y})
                break
    hyps = A.tangent_collection(g, Y)
    report = A.fundamental_domain_check(act, min(Y), hyps, word_length, check_stabilisers=False)
    problems.extend(report.violations)
    rot = [h for J in hyps for h in A.rotative_stabiliser(act, J)]
    R = A.GroupAction(g, alg, [(alg.fmt(h), h) for h in rot]).elements_upto(word_length)
    H = A.GroupAction(g, alg, [(alg.fmt(h), h) for h in subgroup]).elements_upto(word_length)
    common = [e for e in H if e in R and e != alg.identity]
    if common:
        problems.append({"kind": "subgroup meets rotative group", "element": alg.fmt(common[0])})
    return {"ok": not problems, "tangent_hyperplanes": [J.id for J in hyps],
            "rotative_generators": report.rotative_generators and
            {str(k): v for k, v in report.rotative_generators.items()},
            "domain": report.domain, "problems": problems}
