import itertools

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from compactloc.catalog import alternating_group_4, cyclic_group, dihedral_8, quaternion_8, symmetric_group
from compactloc.finite import FiniteGroup, extend_homomorphism

import oracles

GROUPS = [symmetric_group(3), symmetric_group(4), alternating_group_4(), dihedral_8(), quaternion_8(), cyclic_group(6)]


@pytest.mark.parametrize("G", GROUPS, ids=lambda G: G.name)
def test_table_is_a_group(G):
    e = G.identity
    for a in range(G.n):
        assert G.mul(a, e) == a == G.mul(e, a)
        assert G.mul(a, G.inv(a)) == e
    for a, b, c in itertools.product(range(G.n), repeat=3):
        assert G.mul(G.mul(a, b), c) == G.mul(a, G.mul(b, c))


def test_s4_matches_raw_permutations():
    G = symmetric_group(4)
    raw = {oracles.cycles(p): p for p in oracles.symmetric(4)}
    assert sorted(G.labels) == sorted(raw)
    for a in range(G.n):
        for b in range(G.n):
            expected = oracles.cycles(oracles.compose(raw[G.labels[a]], raw[G.labels[b]]))
            assert G.labels[G.mul(a, b)] == expected


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 23), st.integers(0, 23))
def test_conjugation_is_right_action(x, g):
    G = symmetric_group(4)
    assert G.conj(x, g) == G.prod([G.inv(g), x, g])
    h = (g * 7) % G.n
    assert G.conj(G.conj(x, g), h) == G.conj(x, G.mul(g, h))


@pytest.mark.parametrize("G,count", [(symmetric_group(4), 30), (dihedral_8(), 10), (quaternion_8(), 6), (alternating_group_4(), 10)], ids=["S4", "D8", "Q8", "A4"])
def test_subgroup_counts(G, count):
    assert len(G.subgroups()) == count


@pytest.mark.parametrize("G,p,order", [(symmetric_group(4), 2, 8), (symmetric_group(4), 3, 3), (symmetric_group(3), 3, 3), (alternating_group_4(), 2, 4)])
def test_sylow_orders(G, p, order):
    S = G.sylow(p)
    assert len(S) == order and G.is_p_group(S, p)


def test_normalizer_centralizer_d8():
    G = dihedral_8()
    Z = G.center()
    assert len(Z) == 2
    for P in G.subgroups():
        N = G.normalizer(P)
        assert P <= N and G.centralizer(P) <= N


def test_o_p_of_s4():
    G = symmetric_group(4)
    V = G.o_p(2)
    assert len(V) == 4 and G.is_normal(V, G.whole)


def test_extend_homomorphism():
    C4 = cyclic_group(4)
    assert extend_homomorphism(C4, [1], [3]) == {0: 0, 1: 3, 2: 2, 3: 1}
    assert set(extend_homomorphism(C4, [1], [2]).values()) == {0, 2}
    S3 = symmetric_group(3)
    t = S3.labels.index("(12)")
    c = S3.labels.index("(123)")
    # an element of order 3 cannot go to an involution
    assert extend_homomorphism(S3, [t, c], [t, t]) is None


def test_labelled_table_round_trip():
    rows = [["e", "a"], ["a", "e"]]
    G = FiniteGroup.from_labelled_table(rows)
    assert G.n == 2 and G.labels[G.identity] == "e"
