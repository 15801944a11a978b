import itertools

import pytest

from compactloc.catalog import dihedral_8, symmetric_group, torus_by_c2
from compactloc.fusion import Hom, centrics, fusion_from_group
from compactloc.partial_group import from_finite_group
from compactloc.transporter import (
    check_axiom_A1_A2,
    check_axiom_B_C,
    check_axiom_I_II_III,
    check_cancellation,
    check_category,
    check_linking,
    factor_morphism,
    restrict_morphism,
    transporter_from_locality,
    transporter_report,
)

from conftest import centric_locality


def obj(T, names):
    P = frozenset(T.S.labels.index(n) for n in names)
    assert P in T.obj_index
    return P


V1 = ["()", "(12)(34)", "(13)(24)", "(14)(23)"]
V2 = ["()", "(12)", "(34)", "(12)(34)"]
C4 = ["()", "(1324)", "(12)(34)", "(1423)"]


@pytest.fixture(scope="module")
def group_T():
    D = dihedral_8()
    L = from_finite_group(D, D.whole, [D.whole], 2)
    return transporter_from_locality(L)


def test_group_case(group_T):
    T = group_T
    S = T.S.whole
    assert len(T.hom(S, S)) == 8
    inner = {Hom.conjugation(T.S, x, S) for x in S}
    assert set(T.rho) == inner
    assert transporter_report(T).ok


def test_s4_counts(s4_T):
    T = s4_T
    assert len(T.objects) == 4
    assert T.n_morphisms == 88
    assert len(T.isomorphisms()) == 48
    V = obj(T, V1)
    assert len(T.hom(V, V)) == 24
    assert len(T.hom(T.S.whole, T.S.whole)) == 8
    # no element of S4 carries D8 into a Klein subgroup
    assert T.hom(T.S.whole, V) == []


def test_all_axioms_pass(s4_T):
    rep = transporter_report(s4_T)
    assert rep.status == "pass", rep.to_text()
    assert check_cancellation(s4_T).ok


def test_orbit_count_on_normal_klein(s4_T):
    T = s4_T
    V = obj(T, V1)
    assert len(T.kernel(V)) == 4
    assert len({T.rho[m] for m in T.hom(V, V)}) == 6


def test_index_of_s_part_in_klein_automorphisms(s4_T):
    T = s4_T
    V = obj(T, V1)
    img = {T.epsilon(V, V, x) for x in T.S.normalizer(V)}
    assert len(T.aut(V)) // len(img) == 3


def test_axiom_c_for_three_cycle(s4_T):
    T = s4_T
    V = obj(T, V1)
    for m in T.hom(V, V):
        if T.labels[m][0] != "(123)":
            continue
        phi = T.rho[m]
        for x in V:
            lhs = T.compose(T.epsilon(V, V, x), m)
            rhs = T.compose(m, T.epsilon(V, V, phi(x)))
            assert lhs == rhs


def test_kernel_is_center(s4_T):
    T = s4_T
    for P in T.objects:
        assert set(T.kernel(P)) == {T.epsilon(P, P, z) for z in T.S.center(P)}


def test_linking_checklist(s4_T, s4_fusion):
    rep = check_linking(s4_T, s4_fusion)
    assert rep.status == "pass", rep.to_text()
    assert "p-local compact group" in rep.to_text()


def test_removing_a_qualifying_centric_trips_condition_two(s4_T, s4_fusion):
    T = s4_T.without_object(obj(s4_T, V1))
    rep = check_linking(T, s4_fusion)
    assert rep.get("(2) centrics with O_p(Out_F(P)) = 1 are objects").status == "fail"


def test_removing_a_non_radical_centric_keeps_condition_two(s4_T, s4_fusion):
    T = s4_T.without_object(obj(s4_T, C4))
    rep = check_linking(T, s4_fusion)
    assert rep.get("(2) centrics with O_p(Out_F(P)) = 1 are objects").status == "pass"
    assert rep.get("objects are exactly the F-centrics").status == "fail"


def test_group_case_abelian_kernel():
    C = symmetric_group(2)
    L = from_finite_group(C, C.whole, [C.whole], 2)
    T = transporter_from_locality(L)
    S = T.S.whole
    assert len(T.kernel(S)) == 2
    assert check_linking(T).get("(3) rho-kernels are discrete p-toral").status == "pass"


def test_duplicate_triple_breaks_freeness(s4_T):
    V = obj(s4_T, V1)
    m = s4_T.hom(V, V)[3]
    M = s4_T.with_duplicate(m)
    assert not transporter_report(M).ok
    assert not check_axiom_A1_A2(M).ok or not check_category(M).ok


def test_mutated_rho_breaks_axiom_b(s4_T):
    T = s4_T
    S = T.S.whole
    x = next(x for x in S if x != T.S.identity)
    m = T.epsilon(S, S, x)
    M = T.with_rho(m, Hom.identity(S))
    rep = check_axiom_B_C(M)
    assert rep.get("(B) rho(eps(x)) = c_x").status == "fail"
    assert rep.get("(B) rho(eps(x)) = c_x").witness is not None


def test_mutated_composition_is_caught(s4_T):
    T = s4_T
    V = obj(T, V1)
    a, b = T.hom(V, V)[1], T.hom(V, V)[2]
    wrong = next(c for c in T.hom(V, V) if c != T.compose(a, b))
    assert not transporter_report(T.with_composition(a, b, wrong)).ok


def test_axiom_one_two_three_on_s4(s4_T):
    rep = check_axiom_I_II_III(s4_T)
    assert rep.status == "pass", rep.to_text()
    assert "extension problems" in rep.to_text()


def test_restriction_is_relabelled_triple(s4_T):
    T = s4_T
    S = T.S.whole
    for m in T.hom(S, S):
        g = T.labels[m][0]
        for P0 in T.objects:
            Q0 = T.rho[m].apply(P0)
            if Q0 not in T.obj_index:
                continue
            r = restrict_morphism(T, m, P0, Q0)
            assert T.labels[r] == (g, T.obj_index[P0], T.obj_index[Q0])


def test_restrict_identity_and_errors(s4_T):
    T = s4_T
    S = T.S.whole
    V = obj(T, V1)
    assert restrict_morphism(T, T.identity(S), V, V) == T.identity(V)
    W = obj(T, V2)
    with pytest.raises(ValueError):
        restrict_morphism(T, T.identity(V), W, V)
    with pytest.raises(ValueError, match="does not map"):
        restrict_morphism(T, T.identity(S), V, W)


def test_restrict_then_extend(s4_T):
    T = s4_T
    for m in range(T.n_morphisms):
        P, Q = T.source(m), T.target(m)
        for P0 in T.objects:
            if not P0 <= P:
                continue
            Q0 = T.rho[m].apply(P0)
            if Q0 not in T.obj_index or not Q0 <= Q:
                continue
            r = restrict_morphism(T, m, P0, Q0)
            assert T.compose(r, T.inclusion(Q0, Q)) == T.compose(T.inclusion(P0, P), m)


def test_factor_morphism(s4_T):
    T = s4_T
    for m in range(T.n_morphisms):
        iso, inc = factor_morphism(T, m)
        assert T.is_iso(iso)
        assert T.compose(iso, inc) == m
        if T.is_iso(m):
            assert (iso, inc) == (m, T.identity(T.target(m)))
    V = obj(T, V1)
    S = T.S.whole
    iso, inc = factor_morphism(T, T.inclusion(V, S))
    assert iso == T.identity(V) and inc == T.inclusion(V, S)


def test_factor_of_triple_into_s(s4_T):
    T = s4_T
    S = T.S.whole
    W = obj(T, V2)
    for m in T.hom(W, S):
        g, i, _ = T.labels[m]
        iso, inc = factor_morphism(T, m)
        img = T.rho[m].image
        assert T.labels[iso] == (g, i, T.obj_index[img])
        assert inc == T.inclusion(img, S)


def test_cancellation_exhaustive(s4_T):
    T = s4_T
    for (i, j), ms in T.mor.items():
        for k in range(len(T.objects)):
            bs = T.mor.get((j, k), [])
            for a, b1, b2 in itertools.product(ms, bs, bs):
                if b1 != b2:
                    assert T.compose(a, b1) != T.compose(a, b2)


@pytest.mark.parametrize("m", [2, 3])
def test_torus_by_c2_transporter(m):
    W = torus_by_c2(m).working
    L = centric_locality(W, 2)
    T = transporter_from_locality(L)
    rep = transporter_report(T)
    assert rep.status != "fail", rep.to_text()
    F = fusion_from_group(W, W.whole, 2)
    assert set(T.objects) == set(centrics(F))
