"""Walk through the embedding pipeline on the right-angled Coxeter group of the path P4.

The group acts on its own Cayley graph; the pipeline should hand back the
same graph product, with an explicit dictionary between the generators."""
from qmedia import action as A
from qmedia import embed as E
from qmedia import qmgraph as Q
from qmedia import words as W
from qmedia.io import load_presentation

p = load_presentation("p4_z2")
ball = Q.cayley_ball(p, 5)
print(f"ball of radius 5: {ball.n} vertices, {len(ball.edges())} edges")
print("quasi-median on the certified region:", Q.check_quasi_median(ball).ok)

act = A.full_action(p, ball)
print("special:", A.check_special(act).ok)

data = E.build_embedding(act)
print("target graph edges:", data.target.edges())
for target, source in sorted(E.translate_back(data).items()):
    print(f"  {target} <- {source}")

word = W.parse_word(p, "a:1 c:1 b:1 d:1")
v = ball.index[W.reduce(p, word)]
print("image of acbd:", W.format_word(data.phi[v]))

rep = E.verify_embedding(data, samples=200)
for name, claim in rep.claims.items():
    print(f"  {name:26s} {'pass' if claim.passed else 'FAIL'} ({claim.checked} checks)")
print("certified pairs:", rep.certified_pairs)
