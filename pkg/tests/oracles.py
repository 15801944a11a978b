"""Independent brute-force oracles built from raw permutations.

Nothing here goes through the package's group or fusion code; elements are
tuples of images and subgroups are frozensets of cycle-notation strings.
"""
from __future__ import annotations

from itertools import permutations


def compose(a, b):
    """First ``a``, then ``b`` (right action, matching x^g = g^-1 x g)."""
    return tuple(b[a[i]] for i in range(len(a)))


def inverse(a):
    out = [0] * len(a)
    for i, j in enumerate(a):
        out[j] = i
    return tuple(out)


def cycles(a) -> str:
    seen, parts = set(), []
    for i in range(len(a)):
        if i in seen or a[i] == i:
            continue
        cyc, j = [], i
        while j not in seen:
            seen.add(j)
            cyc.append(str(j + 1))
            j = a[j]
        parts.append("(" + "".join(cyc) + ")")
    return "".join(parts) or "()"


def conj(x, g):
    return compose(compose(inverse(g), x), g)


def closure(gens, n):
    e = tuple(range(n))
    out = {e}
    frontier = [e]
    while frontier:
        new = []
        for x in frontier:
            for g in gens:
                y = compose(x, g)
                if y not in out:
                    out.add(y)
                    new.append(y)
        frontier = new
    return frozenset(out)


def symmetric(n):
    return [tuple(p) for p in permutations(range(n))]


def subgroups_of(S, n):
    """All subgroups of a small group, by closing pairs of elements (enough for groups of order 8)."""
    elems = sorted(S)
    subs = {closure([a, b], n) for a in elems for b in elems}
    return subs


def conjugation_fusion(G, S, n):
    """Orbits and automorphism maps of F_S(G), from every conjugation map in G."""
    subs = subgroups_of(S, n)
    aut = {}
    orbit = {}
    for P in subs:
        maps = set()
        orb = set()
        for g in G:
            Q = frozenset(conj(x, g) for x in P)
            if Q <= S:
                orb.add(Q)
            if Q == P:
                maps.add(frozenset((cycles(x), cycles(conj(x, g))) for x in P))
        aut[P] = maps
        orbit[P] = frozenset(orb)
    return subs, orbit, aut


def label_set(P):
    return frozenset(cycles(x) for x in P)
