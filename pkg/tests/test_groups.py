import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from qmedia.groups import (ClosureBudgetExceeded, NotAGroup, NotAHomomorphism, cyclic,
                           direct_sum, is_free_action, make_group, permutation_image,
                           subgroup_closure, trivial_group)


def test_z2_and_z3_tables():
    g = make_group([[0, 1], [1, 0]])
    assert g.order == 2 and g.identity == 0 and g.inverse == (0, 1)
    h = make_group([[0, 1, 2], [1, 2, 0], [2, 0, 1]])
    assert h.order == 3 and h.inverse == (0, 2, 1)


def test_row_not_permutation():
    # both rows are permutations; the columns expose the failure
    with pytest.raises(NotAGroup, match="not a permutation"):
        make_group([[0, 1], [0, 1]])


def test_non_associative_latin_square():
    # a Latin square with identity 0 that is not associative (order 5 loop)
    t = [[0, 1, 2, 3, 4], [1, 0, 3, 4, 2], [2, 4, 0, 1, 3], [3, 2, 4, 0, 1], [4, 3, 1, 2, 0]]
    with pytest.raises(NotAGroup, match="non-associative"):
        make_group(t)


def test_no_identity():
    with pytest.raises(NotAGroup, match="identity"):
        make_group([[(-a - b) % 3 for b in range(3)] for a in range(3)])


def test_identity_relabelled_to_zero():
    # Z2 written with identity at index 1
    g = make_group([[1, 0], [0, 1]])
    assert g.identity == 0
    assert g.table == ((0, 1), (1, 0))


def test_direct_sum_klein():
    v = direct_sum(cyclic(2), cyclic(2))
    assert v.order == 4
    assert all(v.element_order(x) == 2 for x in range(1, 4))


def test_direct_sum_with_trivial():
    g = cyclic(3)
    assert direct_sum(g, trivial_group()).table == g.table


def test_z3_plus_z2_is_cyclic():
    g = direct_sum(cyclic(3), cyclic(2))
    # (1,1) encodes as 1*2+1 = 3
    x = 3
    powers, y = [], 0
    for _ in range(6):
        y = g.mul(y, x)
        powers.append(y)
    assert len(set(powers)) == 6
    assert g.element_order(3) == 6


def test_permutation_image_examples():
    g, m, _ = permutation_image([(0, 1, 2)])
    assert g.order == 1 and m == {0: 0}
    g, m, _ = permutation_image([(1, 0)])
    assert g.order == 2 and m[0] == 1
    g, m, perms = permutation_image([(1, 2, 0)])
    assert g.order == 3
    # regular: only the identity fixes a point
    assert all(all(p[x] != x for x in range(3)) for p in perms[1:])


def test_permutation_budget():
    with pytest.raises(ClosureBudgetExceeded):
        permutation_image([(1, 2, 3, 4, 0), (1, 0, 2, 3, 4)], budget=50)


def test_subgroup_closure_examples():
    assert subgroup_closure(cyclic(3), []) == (frozenset({0}), 3)
    assert subgroup_closure(cyclic(2), [1]) == (frozenset({0, 1}), 1)
    v = direct_sum(cyclic(2), cyclic(2))
    H, idx = subgroup_closure(v, [2])  # (1,0)
    assert len(H) == 2 and idx == 2


def test_free_action_examples():
    assert is_free_action(trivial_group(), [(0, 1, 2)], 3) == (True, 3, None)
    assert is_free_action(cyclic(2), [(0, 1), (1, 0)], 2) == (True, 1, None)
    free, orbits, wit = is_free_action(cyclic(2), [(0, 1, 2), (0, 2, 1)], 3)
    assert not free and orbits == 2 and wit == (1, 0)


def test_not_a_homomorphism():
    with pytest.raises(NotAHomomorphism) as exc:
        is_free_action(cyclic(2), [(1, 0), (1, 0)], 2)
    assert exc.value.witness is not None


perm_lists = st.integers(1, 5).flatmap(
    lambda n: st.lists(st.permutations(list(range(n))).map(tuple), min_size=1, max_size=3))


@settings(max_examples=60, deadline=None)
@given(perm_lists)
def test_permutation_image_properties(perms):
    g, m, elems = permutation_image(perms)
    n = len(perms[0])
    assert math.factorial(n) % g.order == 0
    for a, b in itertools.product(range(g.order), repeat=2):
        composed = tuple(elems[a][elems[b][x]] for x in range(n))
        assert elems[g.mul(a, b)] == composed
    # round trip through make_group
    assert make_group(g.table).table == g.table


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6))
def test_direct_sum_order(a, b):
    assert direct_sum(cyclic(a), cyclic(b)).order == a * b
