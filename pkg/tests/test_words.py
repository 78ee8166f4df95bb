import pytest
from hypothesis import given, settings, strategies as st

from qmedia import words as W
from qmedia.io import load_presentation
from qmedia.words import Syllable

from oracles import all_words, brute_normal_form

P4 = load_presentation("p4_z2")
TRI = load_presentation("triangle_z3")
PATH3 = load_presentation("path3_mixed")


def w(p, text):
    return W.parse_word(p, text)


def test_reduce_examples():
    assert W.reduce(P4, w(P4, "a:1 a:1")) == ()
    assert W.reduce(P4, w(P4, "a:1 b:1 a:1")) == w(P4, "b:1")
    assert W.reduce(P4, w(P4, "a:1 c:1")) == w(P4, "a:1 c:1")


def test_canonical_order_prefers_smaller_vertex():
    # b and a commute, so the normal form starts with a
    assert W.reduce(P4, w(P4, "b:1 a:1")) == w(P4, "a:1 b:1")
    # c and a do not commute: order is kept
    assert W.reduce(P4, w(P4, "c:1 a:1")) == w(P4, "c:1 a:1")


def test_is_graphically_reduced_examples():
    ok, moves = W.is_graphically_reduced(P4, w(P4, "a:1 b:1 a:1"))
    assert not ok
    assert moves[:2] == [("shuffle", 0, 1), ("amalgamate", 1, 2)]
    assert W.apply_moves(P4, w(P4, "a:1 b:1 a:1"), moves) == w(P4, "b:1")
    assert W.is_graphically_reduced(P4, w(P4, "a:1 c:1")) == (True, None)
    assert W.is_graphically_reduced(P4, ()) == (True, None)


def test_tail_examples():
    assert W.tail(P4, w(P4, "a:1 b:1")) == {Syllable("a", 1), Syllable("b", 1)}
    assert W.tail(P4, w(P4, "a:1 c:1")) == {Syllable("c", 1)}
    assert W.tail(P4, ()) == frozenset()


def test_multiply_examples():
    a, b = w(P4, "a:1"), w(P4, "b:1")
    assert W.multiply(P4, a, a) == ()
    assert W.multiply(P4, a, b) == w(P4, "a:1 b:1")
    assert W.multiply(P4, w(P4, "a:1 c:1"), w(P4, "c:1 a:1")) == ()


def test_parabolic_membership_examples():
    assert W.parabolic_membership(P4, w(P4, "a:1 b:1"), {"a", "b"})
    assert not W.parabolic_membership(P4, w(P4, "a:1 c:1"), {"a", "b"})
    assert W.parabolic_membership(P4, (), set())


def test_parse_errors():
    with pytest.raises(W.PresentationError):
        w(P4, "z:1")
    with pytest.raises(W.PresentationError):
        w(P4, "a:0")
    with pytest.raises(W.PresentationError):
        w(P4, "a")


def test_presentation_rejects_trivial_group():
    from qmedia.groups import trivial_group
    with pytest.raises(W.PresentationError):
        W.GPPresentation(["a"], [], {"a": trivial_group()})


def test_aba_brute_force_closure():
    nf, _ = brute_normal_form(P4, w(P4, "a:1 b:1 a:1"))
    assert nf == w(P4, "b:1")


@pytest.mark.parametrize("p", [P4, TRI, PATH3], ids=["P4", "triangle", "path3"])
def test_confluence_short_words(p):
    """reduce agrees with the brute-force move closure on all words up to length 3."""
    for word in all_words(p, 3):
        assert W.reduce(p, word) == brute_normal_form(p, word)[0], word


def words_over(p, max_len=6):
    return st.lists(st.sampled_from(p.generators()), max_size=max_len).map(tuple)


@settings(max_examples=150, deadline=None)
@given(words_over(PATH3))
def test_reduce_idempotent_and_reduced(word):
    r = W.reduce(PATH3, word)
    assert W.reduce(PATH3, r) == r
    assert W.is_graphically_reduced(PATH3, r)[0]


@settings(max_examples=150, deadline=None)
@given(words_over(P4), st.randoms(use_true_random=False))
def test_shuffle_class_canonicity(word, rnd):
    r = list(W.reduce(P4, word))
    # random legal shuffles of the reduced word
    for _ in range(10):
        if len(r) < 2:
            break
        i = rnd.randrange(len(r) - 1)
        if P4.adjacent(r[i].vertex, r[i + 1].vertex):
            r[i], r[i + 1] = r[i + 1], r[i]
    assert W.reduce(P4, r) == W.reduce(P4, word)


@settings(max_examples=100, deadline=None)
@given(words_over(TRI, 4), words_over(TRI, 4), words_over(TRI, 4))
def test_multiply_associative_with_inverse(u, v, x):
    u, v, x = (W.reduce(TRI, y) for y in (u, v, x))
    assert W.multiply(TRI, W.multiply(TRI, u, v), x) == W.multiply(TRI, u, W.multiply(TRI, v, x))
    assert W.multiply(TRI, u, W.inverse(TRI, u)) == ()
    assert W.multiply(TRI, (), u) == u


@settings(max_examples=100, deadline=None)
@given(words_over(PATH3))
def test_witness_moves_shorten(word):
    ok, moves = W.is_graphically_reduced(PATH3, word)
    if not ok:
        shorter = W.apply_moves(PATH3, word, moves)
        assert len(shorter) < len(word)
        assert W.reduce(PATH3, shorter) == W.reduce(PATH3, word)
