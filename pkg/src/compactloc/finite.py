"""Finite groups given by multiplication tables.

Elements are integer indices ``0..n-1``; subgroups are frozensets of indices.
Everything here is brute force and meant for groups of order at most a few
hundred.
"""
from __future__ import annotations

import itertools
from functools import cached_property
from typing import Iterable, Sequence

Subset = frozenset


def is_prime(p: int) -> bool:
    if p < 2:
        return False
    return all(p % d for d in range(2, int(p**0.5) + 1))


def p_part(n: int, p: int) -> int:
    k = 1
    while n % p == 0:
        n //= p
        k *= p
    return k


def is_p_power(n: int, p: int) -> bool:
    return n >= 1 and p_part(n, p) == n


def subgroup_key(P: frozenset) -> tuple:
    return (len(P), tuple(sorted(P)))


class FiniteGroup:
    """A finite group stored as a dense multiplication table."""

    def __init__(self, table: Sequence[Sequence[int]], labels: Sequence[str] | None = None, name: str = ""):
        self.table = [list(row) for row in table]
        self.n = len(self.table)
        self.labels = list(labels) if labels is not None else [str(i) for i in range(self.n)]
        self.name = name
        ident = [e for e in range(self.n) if all(self.table[e][x] == x for x in range(self.n))]
        if len(ident) != 1:
            raise ValueError("multiplication table has no unique identity")
        self.identity = ident[0]
        self.inverses = [0] * self.n
        for a in range(self.n):
            row = self.table[a]
            try:
                self.inverses[a] = row.index(self.identity)
            except ValueError:
                raise ValueError(f"element {self.labels[a]} has no inverse") from None
        self._subgroups: list[frozenset] | None = None

    # -- construction -------------------------------------------------
    @classmethod
    def from_permutations(cls, generators: Iterable[Sequence[int]], name: str = "") -> "FiniteGroup":
        gens = [tuple(g) for g in generators]
        degree = len(gens[0]) if gens else 1
        for g in gens:
            if sorted(g) != list(range(degree)):
                raise ValueError(f"{list(g)} is not a permutation of 0..{degree - 1}")
        ident = tuple(range(degree))
        elements = {ident}
        frontier = [ident]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    # apply x, then g
                    y = tuple(g[x[i]] for i in range(degree))
                    if y not in elements:
                        elements.add(y)
                        nxt.append(y)
            frontier = nxt
        ordered = sorted(elements)
        index = {e: i for i, e in enumerate(ordered)}
        table = [[index[tuple(b[a[i]] for i in range(degree))] for b in ordered] for a in ordered]
        grp = cls(table, [perm_label(e) for e in ordered], name=name)
        grp.permutations = ordered
        return grp

    @classmethod
    def from_labelled_table(cls, rows: Sequence[Sequence[str]], name: str = "") -> "FiniteGroup":
        """Table whose first row lists the elements; row i column j is ``e_i * e_j``."""
        labels = list(rows[0])
        index = {lab: i for i, lab in enumerate(labels)}
        if len(index) != len(labels) or len(rows) != len(labels):
            raise ValueError("table must be square with distinct labels")
        table = [[index[x] for x in row] for row in rows]
        grp = cls(table, labels, name=name)
        if grp.identity != 0:
            raise ValueError("first element of the table must be the identity")
        return grp

    def check_associative(self) -> bool:
        t = self.table
        r = range(self.n)
        return all(t[t[a][b]][c] == t[a][t[b][c]] for a in r for b in r for c in r)

    # -- arithmetic ---------------------------------------------------
    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        return self.inverses[a]

    def prod(self, word: Iterable[int]) -> int:
        x = self.identity
        for g in word:
            x = self.table[x][g]
        return x

    def conj(self, x: int, g: int) -> int:
        """``x^g = g^-1 x g``."""
        return self.table[self.table[self.inverses[g]][x]][g]

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.table[x][a]
            k += 1
        return k

    def label(self, a: int) -> str:
        return self.labels[a]

    # -- subgroups ----------------------------------------------------
    @cached_property
    def whole(self) -> frozenset:
        return frozenset(range(self.n))

    @cached_property
    def trivial(self) -> frozenset:
        return frozenset([self.identity])

    def closure(self, gens: Iterable[int]) -> frozenset:
        gens = [g for g in set(gens) if g != self.identity]
        seen = {self.identity}
        frontier = [self.identity]
        t = self.table
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = t[x][g]
                    if y not in seen:
                        seen.add(y)
                        nxt.append(y)
            frontier = nxt
        return frozenset(seen)

    def is_subgroup(self, X: Iterable[int]) -> bool:
        X = frozenset(X)
        if self.identity not in X:
            return False
        t = self.table
        return all(t[a][b] in X for a in X for b in X)

    def subgroups(self) -> list[frozenset]:
        """All subgroups, sorted by (order, elements)."""
        if self._subgroups is None:
            cyclic = {self.closure([a]) for a in range(self.n)}
            found = set(cyclic)
            frontier = set(cyclic)
            while frontier:
                nxt = set()
                for H in frontier:
                    for C in cyclic:
                        if C <= H:
                            continue
                        J = self.closure(H | C)
                        if J not in found:
                            nxt.add(J)
                found |= nxt
                frontier = nxt
            self._subgroups = sorted(found, key=subgroup_key)
        return self._subgroups

    def family(self) -> list[frozenset]:
        """Subgroups that downstream code is allowed to treat as objects."""
        return self.subgroups()

    def generating_set(self, P: Iterable[int]) -> list[int]:
        P = frozenset(P)
        gens: list[int] = []
        current = self.trivial
        for x in sorted(P, key=lambda a: (-self.element_order(a), a)):
            if x not in current:
                gens.append(x)
                current = self.closure(gens)
            if current == P:
                break
        return gens

    def conjugate(self, P: Iterable[int], g: int) -> frozenset:
        return frozenset(self.conj(x, g) for x in P)

    def normalizer(self, P: frozenset, within: Iterable[int] | None = None) -> frozenset:
        within = self.whole if within is None else within
        return frozenset(g for g in within if self.conjugate(P, g) == P)

    def centralizer(self, P: Iterable[int], within: Iterable[int] | None = None) -> frozenset:
        within = self.whole if within is None else within
        P = list(P)
        t = self.table
        return frozenset(g for g in within if all(t[g][x] == t[x][g] for x in P))

    def center(self, P: Iterable[int] | None = None) -> frozenset:
        P = self.whole if P is None else frozenset(P)
        return self.centralizer(P, within=P)

    def transporter(self, P: frozenset, Q: frozenset, within: Iterable[int] | None = None) -> frozenset:
        """``{g : P^g <= Q}``."""
        within = self.whole if within is None else within
        return frozenset(g for g in within if self.conjugate(P, g) <= Q)

    def is_normal(self, N: frozenset, within: Iterable[int] | None = None) -> bool:
        within = self.whole if within is None else within
        return all(self.conjugate(N, g) == N for g in within)

    def order_pair(self, P: frozenset) -> tuple[int, int]:
        return (0, len(P))

    def rank_of(self, P: frozenset) -> int:
        return 0

    # -- p-local data -------------------------------------------------
    def sylow(self, p: int, within: frozenset | None = None) -> frozenset:
        """The first Sylow p-subgroup (in canonical subgroup order)."""
        within = self.whole if within is None else within
        target = p_part(len(within), p)
        for H in self.subgroups():
            if len(H) == target and H <= within:
                return H
        raise ValueError("no Sylow subgroup found")

    def o_p(self, p: int, within: frozenset | None = None) -> frozenset:
        """Largest normal p-subgroup: intersection of the Sylow p-subgroups."""
        within = self.whole if within is None else within
        if len(within) == 1:
            return within
        P = self.sylow(p, within)
        core = P
        for g in within:
            core = core & self.conjugate(P, g)
        return core

    def is_p_group(self, P: frozenset, p: int) -> bool:
        return is_p_power(len(P), p)

    # -- derived groups -----------------------------------------------
    def subgroup_group(self, P: Iterable[int]) -> "EmbeddedGroup":
        return EmbeddedGroup(self, sorted(P))

    def quotient(self, N: frozenset) -> tuple["FiniteGroup", list[int]]:
        """Quotient by a normal subgroup; also returns the projection."""
        cosets: list[frozenset] = []
        proj = [-1] * self.n
        for g in range(self.n):
            if proj[g] >= 0:
                continue
            c = frozenset(self.table[g][x] for x in N)
            for y in c:
                proj[y] = len(cosets)
            cosets.append(c)
        reps = [min(c) for c in cosets]
        table = [[proj[self.table[a][b]] for b in reps] for a in reps]
        return FiniteGroup(table, [self.labels[r] for r in reps]), proj

    def is_isomorphic(self, P: frozenset, Q: frozenset) -> bool:
        """Brute-force isomorphism test between two (small) subgroups."""
        if len(P) != len(Q):
            return False
        if sorted(self.element_order(x) for x in P) != sorted(self.element_order(x) for x in Q):
            return False
        gens = self.generating_set(P)
        t = self.table
        candidates = [[y for y in Q if self.element_order(y) == self.element_order(g)] for g in gens]
        for images in itertools.product(*candidates):
            phi = extend_homomorphism(self, gens, list(images))
            if phi is not None and len(set(phi.values())) == len(P) and set(phi.values()) == set(Q):
                return True
        return False


def extend_homomorphism(G: FiniteGroup, gens: Sequence[int], images: Sequence[int], H: FiniteGroup | None = None) -> dict | None:
    """Extend ``gens[i] -> images[i]`` to a homomorphism into ``H`` (default ``G``), or None."""
    H = G if H is None else H
    phi = {G.identity: H.identity}
    frontier = [G.identity]
    while frontier:
        nxt = []
        for x in frontier:
            for g, h in zip(gens, images):
                y = G.table[x][g]
                z = H.table[phi[x]][h]
                if y in phi:
                    if phi[y] != z:
                        return None
                else:
                    phi[y] = z
                    nxt.append(y)
        frontier = nxt
    return phi


def perm_label(perm: Sequence[int]) -> str:
    """Cycle notation with points numbered from 1."""
    seen = set()
    cycles = []
    for i in range(len(perm)):
        if i in seen or perm[i] == i:
            continue
        cyc = [i]
        seen.add(i)
        j = perm[i]
        while j != i:
            cyc.append(j)
            seen.add(j)
            j = perm[j]
        cycles.append("(" + "".join(str(k + 1) for k in cyc) + ")")
    return "".join(cycles) or "()"


class EmbeddedGroup(FiniteGroup):
    """A subgroup of a FiniteGroup re-indexed as a group in its own right."""

    def __init__(self, parent: FiniteGroup, elements: Sequence[int]):
        self.parent = parent
        self.embedding = list(elements)
        index = {g: i for i, g in enumerate(self.embedding)}
        table = [[index[parent.table[a][b]] for b in self.embedding] for a in self.embedding]
        super().__init__(table, [parent.labels[g] for g in self.embedding])
        self.index_of = index
