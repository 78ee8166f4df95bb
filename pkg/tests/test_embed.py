import networkx as nx
import pytest

from qmedia import action as A
from qmedia import embed as E
from qmedia import qmgraph as Q
from qmedia import ragg as R
from qmedia import words as W
from qmedia.io import GRAPH_PRODUCT_FIXTURES, load_fixture, load_presentation


def full(name, r):
    p = load_presentation(name)
    g = Q.cayley_ball(p, r)
    return p, A.full_action(p, g)


def as_nx(p):
    G = nx.Graph()
    G.add_nodes_from(p.vertices)
    G.add_edges_from(p.edges())
    return G


@pytest.mark.parametrize("name", GRAPH_PRODUCT_FIXTURES)
def test_identity_recovery_small_radius(name):
    p, act = full(name, 3)
    data = E.build_embedding(act)
    tgt = data.target
    assert nx.is_isomorphic(as_nx(p), as_nx(tgt))
    back = E.translate_back(data)
    # the recovered dictionary is a graph isomorphism that preserves group orders
    vmap = {s.vertex: back[s].vertex for s in back}
    assert sorted(vmap) == sorted(tgt.vertices)
    for u, v in tgt.edges():
        assert p.adjacent(vmap[u], vmap[v])
    for u in tgt.vertices:
        assert tgt.groups[u].order == p.groups[vmap[u]].order
    rep = E.verify_embedding(data, samples=200)
    assert rep.ok, {k: c.witness for k, c in rep.claims.items() if not c.passed}


def test_translate_back_is_a_homomorphism_on_the_ball():
    p, act = full("path3_mixed", 3)
    data = E.build_embedding(act)
    back = E.translate_back(data)
    for v, lab in enumerate(act.graph.labels):
        pulled = W.reduce(p, [back[s] for s in data.phi[v]])
        assert pulled == lab


def test_sector_codes_are_bijective():
    _, act = full("triangle_z3", 2)
    for o in E.build_vertex_groups(act):
        assert sorted(o.sector_code) == list(range(o.sectors))
        assert o.group.order == o.sym.order * o.k_size


def test_tampered_label_is_caught():
    _, act = full("c4_z2", 3)
    data = E.build_embedding(act)
    key = next(k for k in data.sector_labels if k[1] == 1)
    data.sector_labels[key] = data.sector_labels[(key[0], 0)]
    rep = E.verify_embedding(data, samples=50)
    assert not rep.claims["well_defined"].passed
    assert not rep.claims["isometry"].passed


def test_stored_map_mismatch_is_caught():
    _, act = full("p4_z2", 2)
    data = E.build_embedding(act)
    data.phi[3] = data.phi[4]
    rep = E.verify_embedding(data, samples=10)
    assert not rep.claims["well_defined"].passed


def test_self_transverse_orbit_is_rejected():
    spec = R.ragg_from_json(load_fixture("a_rtimes"))
    ball = R.frak_x_ball(spec, "u", 2)
    with pytest.raises(A.PreconditionFailed, match="transverse"):
        E.build_embedding(R.ragg_action(spec, "u", ball))


def test_bigger_k_signature():
    p = load_presentation("z3_x_z3")
    g = Q.cayley_ball(p, 3)
    act = A.action_from_subgroup(p, [W.parse_word(p, "a:1")], g)
    plain = E.build_embedding(act)
    assert E.verify_embedding(plain).ok
    big = E.build_embedding(act, extra_k=1)
    assert big.target.groups["b"].order == 4
    claims = E.verify_embedding(big).claims
    assert claims["isometry"].passed and claims["local_convexity"].passed
    assert not claims["gated_image"].passed


def test_bigger_k_by_name_rejects_shrinking():
    p = load_presentation("z3_x_z3")
    act = A.action_from_subgroup(p, [W.parse_word(p, "a:1")], Q.cayley_ball(p, 2))
    with pytest.raises(ValueError):
        E.build_vertex_groups(act, {"b": 2})


def test_a_box_a_images():
    spec = R.ragg_from_json(load_fixture("a_box_a"))
    ball = R.frak_x_ball(spec, "u0", 3)
    data = E.build_embedding(R.ragg_action(spec, "u0", ball))
    tgt = data.target
    assert sorted(tgt.vertices) == ["e0", "e1", "u0.L", "u0.R"]
    assert sorted(map(tuple, tgt.edges())) == [("u0.L", "e0"), ("u0.L", "u0.R"), ("u0.R", "e1")]
    t = R.groupoid_normalize(spec, R.parse_groupoid_word(spec, "e0 e1"), "u0")
    assert W.format_word(E.phi_hom(data, t)) == "e0:1 e1:1"
    assert E.verify_embedding(data).ok


def test_virtual_retract_certificate_racg():
    p, act = full("p4_z2", 4)
    data = E.build_embedding(act)
    g = act.graph
    Y = sorted(g.index[W.reduce(p, W.parse_word(p, t))] for t in ["", "a:1", "b:1", "a:1 b:1"])
    sub = [W.parse_word(p, "a:1"), W.parse_word(p, "b:1")]
    cert = E.virtual_retract_certificate(data, sub, Y)
    assert cert["ok"], cert
