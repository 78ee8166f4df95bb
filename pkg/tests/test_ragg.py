import itertools

import pytest
from hypothesis import given, settings, strategies as st

from qmedia import action as A
from qmedia import qmgraph as Q
from qmedia import ragg as R
from qmedia.io import load_fixture
from qmedia.words import Syllable


def spec(name):
    return R.ragg_from_json(load_fixture(name))


RTIMES = spec("a_rtimes")
BOX = spec("a_box_b")


def nf(s, text, start):
    return str(R.groupoid_normalize(s, R.parse_groupoid_word(s, text), start))


def test_normalize_examples():
    assert nf(RTIMES, "L:1 e", "u") == "u|e R:1"
    assert nf(RTIMES, "e ebar", "u") == "u|1"
    assert nf(RTIMES, "L:1 e R:1 ebar", "u") == "u|1"
    assert nf(RTIMES, "e L:1 ebar", "u") == "u|e L:1 ebar"
    assert nf(BOX, "B:1 eA", "u1") == "u1|B:1 eA"
    assert nf(BOX, "A:1 eA", "u1") == "u1|eA A:1"


def test_start_vertex_inferred_from_first_arrow():
    w = R.parse_groupoid_word(BOX, "eA B:1")
    assert R.groupoid_normalize(BOX, w).start == "u1"
    with pytest.raises(R.NotComposable):
        R.groupoid_normalize(BOX, R.parse_groupoid_word(BOX, "A:1 eA"))


def test_not_composable_position():
    with pytest.raises(R.NotComposable) as err:
        R.groupoid_normalize(BOX, R.parse_groupoid_word(BOX, "eA eA"), "u1")
    assert err.value.position == 1


L1, R1 = Syllable("L", 1), Syllable("R", 1)
RTIMES_MOVES = [((L1, "e"), ("e", R1)), (("e", "ebar"), ()), (("ebar", "e"), ()),
                ((L1, L1), ()), ((R1, R1), ()), ((L1, R1), (R1, L1))]


def rewriting_closure(word, cap):
    """Every word reachable by the defining relations used in both directions,
    without exceeding the length cap."""
    rules = RTIMES_MOVES + [(b, a) for a, b in RTIMES_MOVES]
    seen = {tuple(word)}
    todo = [tuple(word)]
    while todo:
        w = todo.pop()
        for lhs, rhs in rules:
            k = len(lhs)
            for i in range(len(w) + 1):
                if w[i:i + k] == lhs:
                    v = w[:i] + rhs + w[i + k:]
                    if len(v) <= cap and v not in seen:
                        seen.add(v)
                        todo.append(v)
    return seen


def test_normal_form_independent_of_rewriting_order():
    alphabet = [L1, R1, "e", "ebar"]
    for k in range(5):
        for w in itertools.product(alphabet, repeat=k):
            form = R.groupoid_normalize(RTIMES, list(w), "u")
            for v in rewriting_closure(w, k + 2):
                assert R.groupoid_normalize(RTIMES, list(v), "u") == form, (w, v)


tokens_u1 = st.lists(st.sampled_from(["A:1", "B:1", "B:2", "eA", "eB", "eAbar", "eBbar"]), max_size=6)


def composable(s, toks, start):
    try:
        return R.groupoid_normalize(s, R.parse_groupoid_word(s, " ".join(toks)), start)
    except R.NotComposable:
        return None


@settings(max_examples=150, deadline=None)
@given(tokens_u1, tokens_u1)
def test_groupoid_multiplication_consistent(a, b):
    x = composable(BOX, a, "u1")
    if x is None:
        return
    y = composable(BOX, b, x.end)
    if y is None:
        return
    whole = composable(BOX, a + b, "u1")
    assert R.gmul(BOX, x, y) == whole
    assert R.gmul(BOX, x, R.ginv(BOX, x)) == R.identity(BOX, "u1")
    assert R.gmul(BOX, R.ginv(BOX, x), x) == R.identity(BOX, x.end)
    # re-normalising the normal word changes nothing
    assert R.groupoid_normalize(BOX, x.tokens(), "u1") == x


def test_path_morphism_examples():
    assert R.path_morphism(RTIMES, ["e"], "L") == "R"
    assert R.path_morphism(RTIMES, ["e"], "R") is None
    assert R.path_morphism(RTIMES, ["e"], "L", 1) == ("R", 1)
    assert R.path_morphism(BOX, ["eA", "eAbar"], "A") == "A"
    assert R.path_morphism(BOX, ["eA", "eBbar"], "A") is None
    with pytest.raises(R.NotComposable):
        R.path_morphism(BOX, ["eA", "eA"], "A")
    z3 = spec("z3_inversion")
    assert R.path_morphism(z3, ["ebar"], "a", 1) == ("a", 2)


def test_phi_group_examples():
    G, perms, loops = R.phi_group(spec("z3_inversion"), "u", "a")
    assert G.order == 2 and loops
    assert R.phi_group(BOX, "u1", "A")[0].order == 1
    assert R.phi_group(RTIMES, "u", "L")[0].order == 1


def test_link_membership_examples():
    one = R.identity(BOX, "u1")
    b = R.groupoid_normalize(BOX, R.parse_groupoid_word(BOX, "B:1"), "u1")
    a = R.groupoid_normalize(BOX, R.parse_groupoid_word(BOX, "A:1"), "u1")
    loop = R.groupoid_normalize(BOX, R.parse_groupoid_word(BOX, "eA eAbar"), "u1")
    through = R.groupoid_normalize(BOX, R.parse_groupoid_word(BOX, "eA B:1"), "u1")
    assert R.link_membership(BOX, ("u1", "A"), one)
    assert R.link_membership(BOX, ("u1", "A"), b)
    assert not R.link_membership(BOX, ("u1", "A"), a)
    assert R.link_membership(BOX, ("u1", "A"), loop)
    assert R.link_membership(BOX, ("u1", "A"), through)
    assert not R.link_membership(BOX, ("u1", "B"), through)
    with pytest.raises(ValueError):
        R.link_membership(BOX, ("u2", "A"), b)


@pytest.fixture(scope="module")
def box_ball():
    return R.frak_x_ball(BOX, "u1", 3)


def test_ball_orbits_by_terminus(box_ball):
    parts = R.orbits_by_terminus(BOX, box_ball)
    assert len(parts) == 2
    act = R.ragg_action(BOX, "u1", box_ball)
    vparts, exact = A.orbits(act, "vertices")
    assert exact
    assert sorted(map(sorted, vparts)) == sorted(map(sorted, parts))


def test_ball_is_quasi_median(box_ball):
    assert Q.check_quasi_median(box_ball).ok


def test_arrow_hyperplanes_have_two_sectors(box_ball):
    kinds = set()
    for J in Q.hyperplanes(box_ball):
        lab = box_ball.edge_labels[J.min_edge]
        if lab in BOX.arrows:
            kinds.add("arrow")
            assert len(J.sectors) == 2
            assert all(len(C) == 2 for C in J.cliques())
        else:
            kinds.add("factor")
    assert kinds == {"arrow", "factor"}


def test_oracle_carrier_matches_ball(box_ball):
    g = box_ball
    cert = set(v for v in g.certified_vertices() if g.exact_radius(v) >= 1)
    checked = 0
    for J in Q.hyperplanes(g):
        a, b = J.min_edge
        x, y = g.labels[a], g.labels[b]
        step = R.gmul(BOX, R.ginv(BOX, x), y).tokens()
        if len(step) != 1 or not isinstance(step[0], Syllable):
            continue
        orc = R.ragg_hyperplane_oracle(BOX, x, step[0])
        if not cert & set(J.carrier):
            continue
        for v in cert:
            assert orc.in_carrier(g.labels[v]) == (v in J.carrier), (J.id, v)
            checked += 1
    assert checked > 0


@pytest.mark.parametrize("name,omega", [("a_box_a", "u0"), ("a_box_b", "u1"),
                                        ("hnn_double", "p0"), ("z3_inversion", "u")])
def test_free_sector_action_iff_trivial_phi(name, omega):
    s = spec(name)
    ball = R.frak_x_ball(s, omega, 3)
    act = R.ragg_action(s, omega, ball)
    tr = act.transport()
    for r in tr.representatives():
        J = tr.hyps[r]
        lab = ball.edge_labels[J.min_edge]
        if lab in s.arrows:
            continue
        v, F = lab.split(".")
        trivial = R.phi_group(s, v, F)[0].order == 1
        sa = A.sector_action(act, J)
        assert (sa.free and sa.orbit_count == 1) == trivial, lab


def test_conditions_verdicts():
    assert R.check_conditions(BOX).ok
    bad = R.check_conditions(RTIMES)
    assert [k for k in "i ii iii iv".split() if not bad.results[k]["pass"]] == ["i", "iii"]
    gh = R.check_conditions(spec("g_dot_h"))
    assert [k for k in "i ii iii iv".split() if not gh.results[k]["pass"]] == ["ii"]
    inv = R.check_conditions(spec("z3_inversion"))
    assert not inv.results["iii"]["pass"] and not inv.results["iv"]["pass"]


def test_condition_witness_walks_are_valid():
    w = R.check_conditions(spec("g_dot_h")).results["ii"]["witnesses"][0]
    gh = spec("g_dot_h")
    assert R.path_morphism(gh, w["alpha"], w["A1"]) == w["B1"]
    assert R.path_morphism(gh, w["beta"], w["A2"]) == w["B2"]


def test_psi_requires_conditions():
    with pytest.raises(R.ConditionsFailed):
        R.build_psi(RTIMES)


def test_psi_literal_variant():
    s = spec("a_box_b_z2")
    psi = R.build_psi(s, literal=True).presentation
    assert {"eA", "eAbar", "eB", "eBbar"} <= set(psi.vertices)


def test_validation_rejects_non_induced_embedding():
    data = load_fixture("a_box_b")
    data["edge_products"]["eA"] = {"vertices": ["x", "z"], "edges": [],
                                   "groups": {"x": {"cyclic": 2}, "z": {"cyclic": 3}}}
    for e in ("eA", "eAbar"):
        data["embeddings"][e] = {"vertex_map": {"x": "A", "z": "B"},
                                 "factor_isos": {"x": [0, 1], "z": [0, 1, 2]}}
    rep = R.validate_ragg(R.ragg_from_json(data))
    assert not rep.valid
    assert any(p["kind"] == "image not induced" for p in rep.problems)


def test_validation_accepts_bundled_specs():
    for name in ["a_rtimes", "a_box_a", "a_box_b", "a_box_b_z2", "hnn", "hnn_double", "g_dot_h",
                 "z3_inversion"]:
        assert R.validate_ragg(spec(name)).valid, name


def test_pullback_rejects_non_cover():
    cover = load_fixture("a_rtimes_double_cover")
    cover["arrows"] = cover["arrows"][:2]
    with pytest.raises(R.NotACovering):
        R.pullback_cover(RTIMES, cover)


def test_json_round_trip():
    s = spec("hnn_double")
    assert R.ragg_from_json(s.to_json()) == s
