"""Decide specialness for the bundled right-angled graphs of groups, then build
the target graph for the ones that pass and pull back the non-special one to
its double cover."""
from qmedia import ragg as R
from qmedia.io import load_fixture

for name in ["a_rtimes", "a_box_b", "g_dot_h", "hnn", "hnn_double", "z3_inversion"]:
    spec = R.ragg_from_json(load_fixture(name))
    rep = R.check_conditions(spec)
    failing = [k for k, v in rep.results.items() if not v["pass"]]
    print(f"{name:14s} {'special' if rep.ok else 'fails ' + ', '.join(failing)}")
    if rep.ok:
        psi = R.build_psi(spec).presentation
        print(f"{'':14s} target vertices {list(psi.vertices)}")
        print(f"{'':14s} target edges    {psi.edges()}")

base = R.ragg_from_json(load_fixture("a_rtimes"))
cover = R.pullback_cover(base, load_fixture("a_rtimes_double_cover"))
print("double cover of a_rtimes matches a_box_a:", cover == R.ragg_from_json(load_fixture("a_box_a")))
print("its verdict:", "special" if R.check_conditions(cover).ok else "not special")
