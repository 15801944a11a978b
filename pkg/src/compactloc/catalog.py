"""Standard small groups used throughout the tests and scripts."""
from __future__ import annotations

from .finite import FiniteGroup
from .ptoral import DPGroup


def symmetric_group(n: int) -> FiniteGroup:
    gens = [tuple(range(n))]
    if n > 1:
        gens = [tuple([1, 0] + list(range(2, n))), tuple(list(range(1, n)) + [0])]
    return FiniteGroup.from_permutations(gens, name=f"S{n}")


def alternating_group_4() -> FiniteGroup:
    return FiniteGroup.from_permutations([(1, 2, 0, 3), (1, 0, 3, 2)], name="A4")


def dihedral_8() -> FiniteGroup:
    """Symmetries of a square with vertices 1..4 in cyclic order."""
    return FiniteGroup.from_permutations([(1, 2, 3, 0), (2, 1, 0, 3)], name="D8")


def cyclic_group(n: int) -> FiniteGroup:
    return FiniteGroup([[(a + b) % n for b in range(n)] for a in range(n)], [f"c{a}" for a in range(n)], name=f"C{n}")


def quaternion_8() -> FiniteGroup:
    # unit quaternions as (sign, axis) with axis in 1, i, j, k
    units = ["1", "i", "j", "k"]
    mult = {
        ("1", "1"): (1, "1"), ("1", "i"): (1, "i"), ("1", "j"): (1, "j"), ("1", "k"): (1, "k"),
        ("i", "1"): (1, "i"), ("i", "i"): (-1, "1"), ("i", "j"): (1, "k"), ("i", "k"): (-1, "j"),
        ("j", "1"): (1, "j"), ("j", "i"): (-1, "k"), ("j", "j"): (-1, "1"), ("j", "k"): (1, "i"),
        ("k", "1"): (1, "k"), ("k", "i"): (1, "j"), ("k", "j"): (-1, "i"), ("k", "k"): (-1, "1"),
    }
    elems = [(s, u) for s in (1, -1) for u in units]
    idx = {e: n for n, e in enumerate(elems)}
    table = []
    for s1, u1 in elems:
        row = []
        for s2, u2 in elems:
            s, u = mult[(u1, u2)]
            row.append(idx[(s * s1 * s2, u)])
        table.append(row)
    labels = [("" if s == 1 else "-") + u for s, u in elems]
    return FiniteGroup(table, labels, name="Q8")


def torus_by_c2(truncation: int = 3, p: int = 2) -> DPGroup:
    """``T x| C2`` with the generator inverting a rank-one torus."""
    C2 = FiniteGroup.from_labelled_table([["e", "f"], ["f", "e"]], name="C2")
    return DPGroup(p, 1, C2, {"e": [[1]], "f": [[-1]]}, truncation, name="TxC2")


def torus_rank2(truncation: int = 2, p: int = 2) -> DPGroup:
    C1 = FiniteGroup.from_labelled_table([["e"]], name="C1")
    return DPGroup(p, 2, C1, {}, truncation, name="T2")


def finite_dp(G: FiniteGroup, p: int) -> DPGroup:
    """A finite p-group viewed as a discrete p-toral group of rank 0."""
    return DPGroup(p, 0, G, {}, 1, name=G.name)
