import itertools
from concurrent.futures import ThreadPoolExecutor

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from compactloc.catalog import dihedral_8, symmetric_group, torus_by_c2
from compactloc.partial_group import (
    ExcludedWords,
    UndefinedProduct,
    chain_witness,
    check_compact,
    check_objectivity,
    check_partial_group_axioms,
    check_proper,
    conjugate,
    from_finite_group,
    normalizer_in_L,
    omega_poset,
    pi,
    s_g,
    s_w,
    s_w_bruteforce,
)

import oracles
from conftest import centric_locality


def handle(L, label):
    return L.labels.index(label)


def s_indices(L, labels):
    return frozenset(L.handle_to_s[handle(L, lab)] for lab in labels)


def raw(label):
    return {oracles.cycles(p): p for p in oracles.symmetric(4)}[label]


def test_pi_examples(s4_loc):
    L = s4_loc
    g = handle(L, "(123)")
    assert pi(L, (g,)) == g
    assert pi(L, ()) == L.unit
    assert pi(L, (L.inverse(g), g)) == L.unit


def _closed_overgroups(G, S, P):
    subs = [Q for Q in G.subgroups() if Q <= S]
    delta = set()
    for g in range(G.n):
        Pg = G.conjugate(P, g)
        if Pg <= S:
            delta |= {Q for Q in subs if Pg <= Q}
    return sorted(delta, key=sorted)


def test_undefined_product_raises(s4_loc):
    # with the normal Klein group as an object every word is defined
    L = s4_loc
    assert all(L.in_domain((a, b)) for a in L.handles for b in L.handles)
    # transpositions as objects in S5 leave some words outside the domain
    G = symmetric_group(5)
    S = G.sylow(2)
    t = next(x for x in S if G.element_order(x) == 2 and G.labels[x].count("(") == 1)
    M = from_finite_group(G, S, _closed_overgroups(G, S, G.closure([t])), 2)
    bad = next(w for w in itertools.product(M.handles, repeat=3) if not M.in_domain(w))
    with pytest.raises(UndefinedProduct):
        M.product(bad)
    assert check_partial_group_axioms(M, 3).ok


def test_delta_must_be_closed_under_conjugation(s4):
    S = s4.sylow(2)
    t = next(x for x in S if s4.labels[x] == "(12)")
    delta = [Q for Q in s4.subgroups() if Q <= S and t in Q]
    with pytest.raises(ValueError, match="conjugation"):
        from_finite_group(s4, S, delta, 2)


def test_s_g_examples(s4_loc):
    L = s4_loc
    assert s_g(L, L.unit) == L.S.whole
    for x in L.s_handles:
        assert s_g(L, x) == L.S.whole


def test_s_g_of_three_cycle_matches_raw_conjugation(s4_loc):
    L = s4_loc
    S_labels = [L.labels[h] for h in L.s_handles]
    S_raw = {raw(lab) for lab in S_labels}
    delta_raw = [{raw(S_labels[x]) for x in P} for P in L.delta]
    for c in ["(123)", "(234)", "(142)"]:
        g = raw(c)
        gi = oracles.inverse(g)
        expected = set()
        for x in S_raw:
            # the word (g^-1, x, g) lies in D iff the set of s in S that stay in S along it contains an object
            stay = {s for s in S_raw if oracles.conj(s, gi) in S_raw and oracles.conj(oracles.conj(s, gi), x) in S_raw and oracles.conj(oracles.conj(oracles.conj(s, gi), x), g) in S_raw}
            if any(P <= stay for P in delta_raw) and oracles.conj(x, g) in S_raw:
                expected.add(oracles.cycles(x))
        assert {S_labels[i] for i in s_g(L, handle(L, c))} == expected


def test_s_w_examples(s4_loc):
    L = s4_loc
    assert s_w(L, ()) == L.S.whole
    g = handle(L, "(123)")
    assert s_w(L, (g,)) == s_g(L, g)
    w = (g, L.inverse(g))
    assert s_w(L, w) == s_w_bruteforce(L, w)


@settings(max_examples=150, deadline=None)
@given(st.lists(st.integers(0, 23), max_size=4))
def test_s_w_recursion_matches_definition(w):
    L = _S4
    assert s_w(L, tuple(w)) == s_w_bruteforce(L, tuple(w))


def test_conjugate_examples(s4_loc):
    L = s4_loc
    V = s_indices(L, ["()", "(12)(34)", "(13)(24)", "(14)(23)"])
    assert conjugate(L, L.unit, V) == V
    x = handle(L, "(1324)")
    P = s_indices(L, ["()", "(12)"])
    assert conjugate(L, x, P) == L.S.conjugate(P, L.handle_to_s[x])
    g = handle(L, "(123)")
    image = conjugate(L, g, V)
    assert image == V
    m = L.conj_map(g)
    inv = sorted(V - {L.handle_to_s[L.unit]})
    assert sorted(m[y] for y in inv) == inv and all(m[y] != y for y in inv)
    with pytest.raises(ValueError):
        conjugate(L, g, L.S.whole)


def test_conjugation_is_a_bijection(s4_loc):
    L = s4_loc
    for g in L.handles:
        m = L.conj_map(g)
        assert len(set(m.values())) == len(m)
        back = L.conj_map(L.inverse(g))
        assert all(back[y] == x for x, y in m.items())


@pytest.mark.parametrize("name,p", [("S4", 2), ("S3", 3), ("D8", 2)])
def test_axioms_objectivity_proper_compact(name, p):
    G = {"S4": symmetric_group(4), "S3": symmetric_group(3), "D8": dihedral_8()}[name]
    L = centric_locality(G, p)
    assert check_partial_group_axioms(L, 4 if name != "S4" else 3).ok
    assert check_objectivity(L, 3).ok
    assert check_proper(L).ok
    assert check_compact(L).ok


def test_s4_axioms_at_length_four(s4_loc):
    rep = check_partial_group_axioms(s4_loc, 4)
    assert rep.ok, rep.to_text()


def test_group_case_is_total():
    G = dihedral_8()
    L = from_finite_group(G, G.whole, [G.whole], 2)
    assert all(L.in_domain((a, b, c)) for a in L.handles for b in L.handles for c in L.handles)
    assert check_objectivity(L, 3).ok
    assert check_proper(L).ok


def test_s3_at_three():
    G = symmetric_group(3)
    L = centric_locality(G, 3)
    assert L.size == 6 and len(L.delta) == 1
    t = handle(L, "(12)")
    c = handle(L, "(123)")
    assert L.in_domain((t, c, t)) and L.product((t, c, t)) == handle(L, "(132)")


def test_deleted_word_fails_objectivity(s4_loc):
    L = s4_loc
    w = (handle(L, "(34)"), handle(L, "(12)"))
    M = ExcludedWords(L, [w])
    rep = check_objectivity(M, 3)
    assert rep.get("(O1) D equals the chain-admissible words").status == "fail"
    assert not check_partial_group_axioms(M, 3).ok


def test_chain_witness(s4_loc):
    L = s4_loc
    g = handle(L, "(123)")
    w = (g, L.inverse(g))
    chain = chain_witness(L, w)
    assert chain is not None and len(chain) == 3 and all(P in L.delta for P in chain)


def test_normalizer_examples(s4_loc):
    L = s4_loc
    N = normalizer_in_L(L, L.S.whole)
    assert len(N.handles) == 8
    V = s_indices(L, ["()", "(12)(34)", "(13)(24)", "(14)(23)"])
    assert len(normalizer_in_L(L, V).handles) == 24
    with pytest.raises(ValueError):
        normalizer_in_L(L, frozenset({L.handle_to_s[L.unit]}))


def test_missing_centric_radical_fails_pl1(s4, s4_fusion):
    S = s4.sylow(2)
    L = centric_locality(s4, 2)
    V = frozenset(s4.labels.index(x) for x in ["()", "(12)(34)", "(13)(24)", "(14)(23)"])
    delta = [frozenset(L.S.embedding[x] for x in P) for P in L.delta]
    delta = [P for P in delta if P != V]
    M = from_finite_group(s4, S, delta, 2)
    rep = check_proper(M, fusion=s4_fusion)
    assert rep.get("(PL1) centric-radical subgroups are objects").status == "fail"


def test_delta_must_be_overgroup_closed(s4):
    S = s4.sylow(2)
    C2 = s4.closure([s4.labels.index("(12)")])
    with pytest.raises(ValueError):
        from_finite_group(s4, S, [C2], 2)


def test_not_a_p_group_is_refused(s4):
    with pytest.raises(ValueError):
        from_finite_group(s4, s4.whole, [s4.whole], 2)


@pytest.mark.parametrize("m", [2, 3, 4])
def test_torus_by_c2_is_compact(m):
    W = torus_by_c2(m).working
    L = centric_locality(W, 2)
    assert check_objectivity(L, 3).ok
    rep = check_compact(L)
    assert rep.ok, rep.to_text()


def test_compact_negative_control():
    # an object whose normalizer runs into the truncation without the torus
    W = torus_by_c2(3).working
    f_top = W.index_of(W.dp.element(["1/8"], "f"))
    P = W.closure([f_top, W.index_of(W.dp.element(["1/2"]))])
    delta = [Q for Q in W.subgroups() if P <= Q]
    L = from_finite_group(W, W.whole, delta, 2)
    rep = check_compact(L)
    assert rep.get("normalizers of objects are virtually p-toral").status == "fail"


def test_omega_poset(s4_loc):
    L = s4_loc
    om = omega_poset(L, 2)
    # distinct Sylow 2-subgroups of S4 meet in the normal Klein group, so only it and S occur
    sylows = {oracles.closure([oracles.conj(x, g) for x in map(raw, ["(1324)", "(12)"])], 4) for g in oracles.symmetric(4)}
    meets = {A & B for A in sylows for B in sylows if A != B}
    assert len(sylows) == 3 and len(meets) == 1
    V = s_indices(L, sorted(oracles.label_set(meets.pop())))
    assert set(om.members) == {L.S.whole, V}
    assert all((A & B) in om.members for A in om.members for B in om.members)
    for A in om.members:
        for B in om.members:
            if A < B:
                assert om.dim[A] < om.dim[B]
    assert omega_poset(L, 3).members == om.members


def test_omega_poset_group_case():
    G = dihedral_8()
    L = from_finite_group(G, G.whole, [G.whole], 2)
    om = omega_poset(L, 2)
    assert om.members == [G.whole] and om.height() == 0


def test_concurrent_readers_agree():
    L = centric_locality(symmetric_group(4), 2)
    words = [(a, b) for a in L.handles for b in L.handles]

    def run(_):
        return [L.in_domain(w) for w in words], [sorted(L.conj_map(g).items()) for g in L.handles]

    with ThreadPoolExecutor(4) as ex:
        results = list(ex.map(run, range(8)))
    assert all(r == results[0] for r in results)


_S4 = centric_locality(symmetric_group(4), 2)
