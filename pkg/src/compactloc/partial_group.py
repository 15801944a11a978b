"""Finite partial groups and localities.

Elements of a partial group are integer handles ``0..size-1``.  The domain
``D`` is never materialized: each concrete class supplies a membership test
and a product on words in ``D``.  A locality additionally carries a group
``S`` (a ``FiniteGroup``), the embedding of ``S`` into the handles, and the
object set ``delta`` as frozensets of ``S``-indices.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

from .finite import FiniteGroup, EmbeddedGroup, subgroup_key
from .report import Report

Word = tuple


class UndefinedProduct(ValueError):
    pass


class PartialGroup:
    def __init__(self, size: int, unit: int, inverse: Sequence[int], labels: Sequence[str] | None = None, name: str = ""):
        self.size = size
        self.unit = unit
        self._inverse = list(inverse)
        self.labels = list(labels) if labels is not None else [str(i) for i in range(size)]
        self.name = name

    @property
    def handles(self) -> range:
        return range(self.size)

    def inverse(self, g: int) -> int:
        return self._inverse[g]

    def invert_word(self, w: Word) -> Word:
        return tuple(self._inverse[g] for g in reversed(w))

    def label(self, g: int) -> str:
        return self.labels[g]

    def show(self, w: Word) -> str:
        return "(" + ", ".join(self.labels[g] for g in w) + ")"

    def in_domain(self, w: Word) -> bool:
        raise NotImplementedError

    def _product(self, w: Word) -> int:
        raise NotImplementedError

    def product(self, w: Word) -> int:
        w = tuple(w)
        if not self.in_domain(w):
            raise UndefinedProduct(f"{self.show(w)} is not in D")
        if len(w) == 0:
            return self.unit
        if len(w) == 1:
            return w[0]
        return self._product(w)


class Locality(PartialGroup):
    def __init__(self, size, unit, inverse, S: FiniteGroup, s_handles: Sequence[int], delta: Iterable[frozenset], p: int, labels=None, name=""):
        super().__init__(size, unit, inverse, labels, name)
        self.S = S
        self.p = p
        self.s_handles = list(s_handles)
        self.handle_to_s = {h: x for x, h in enumerate(self.s_handles)}
        self.delta = sorted({frozenset(P) for P in delta}, key=subgroup_key)
        if not self.delta:
            raise ValueError("delta must be nonempty")
        self.declared_fusion = None
        self._conj: dict[int, dict[int, int]] = {}

    def in_S(self, h: int) -> bool:
        return h in self.handle_to_s

    def conj_map(self, g: int) -> dict[int, int]:
        """``x -> x^g`` on ``S_g`` (in S-indices)."""
        m = self._conj.get(g)
        if m is None:
            m = {}
            gi = self.inverse(g)
            for x in range(self.S.n):
                w = (gi, self.s_handles[x], g)
                if self.in_domain(w):
                    y = self.product(w)
                    if y in self.handle_to_s:
                        m[x] = self.handle_to_s[y]
            self._conj[g] = m
        return m


def pi(L: PartialGroup, w: Word) -> int:
    return L.product(tuple(w))


def s_g(L: Locality, g: int) -> frozenset:
    return frozenset(L.conj_map(g))


def conjugate(L: Locality, g: int, P: Iterable[int]) -> frozenset:
    """``P^g`` for ``P <= S_g``."""
    m = L.conj_map(g)
    P = frozenset(P)
    if not P <= frozenset(m):
        raise ValueError(f"subgroup is not contained in S_{L.label(g)}")
    return frozenset(m[x] for x in P)


def s_w(L: Locality, w: Word) -> frozenset:
    """``S_w`` by recursion on the word length."""
    w = tuple(w)
    if not w:
        return L.S.whole
    g, v = w[0], w[1:]
    gi = L.inverse(g)
    X = s_g(L, gi) & s_w(L, v)
    return conjugate(L, gi, X)


def s_w_bruteforce(L: Locality, w: Word) -> frozenset:
    """``S_w`` straight from the definition, element by element."""
    out = set()
    for x in range(L.S.n):
        y = L.s_handles[x]
        ok = True
        for g in w:
            c = (L.inverse(g), y, g)
            if not L.in_domain(c):
                ok = False
                break
            y = L.product(c)
            if not L.in_S(y):
                ok = False
                break
        if ok:
            out.add(x)
    return frozenset(out)


# -- concrete localities ------------------------------------------------

class GroupLocality(Locality):
    """``L_Delta(G)``: elements of ``G`` conjugating some object into ``S``.

    ``D`` is the set of words ``w`` with ``S_w`` in ``delta``; ``S_w`` is an
    intersection of conjugates of ``S`` and is computed with bitmasks.
    """

    def __init__(self, G: FiniteGroup, S: frozenset, delta: Iterable[frozenset], p: int, name: str = ""):
        S = frozenset(S)
        if not G.is_subgroup(S):
            raise ValueError("S is not a subgroup of G")
        if not G.is_p_group(S, p):
            raise ValueError(f"S is not a {p}-group")
        self.G = G
        Sg = G if S == G.whole else G.subgroup_group(S)
        s_elems = Sg.embedding if isinstance(Sg, EmbeddedGroup) else list(range(G.n))
        s_index = {g: i for i, g in enumerate(s_elems)}
        delta_G = [frozenset(P) for P in delta]
        for P in delta_G:
            if not P <= S or not G.is_subgroup(P):
                raise ValueError("delta member is not a subgroup of S")
        delta_S = [frozenset(s_index[x] for x in P) for P in delta_G]
        dset = set(delta_S)
        for P in delta_S:
            for Q in Sg.family():
                if P <= Q and Q not in dset:
                    raise ValueError("delta is not overgroup-closed in S")
        carrier = [g for g in range(G.n) if any(G.conjugate(P, g) <= S for P in delta_G)]
        # conjugates outside the representable family (truncation) are not compared
        gset = set(delta_G)
        fam = set(G.family())
        for g in carrier:
            for P in delta_G:
                Pg = G.conjugate(P, g)
                if Pg <= S and Pg in fam and Pg not in gset:
                    raise ValueError("delta is not closed under conjugation by elements of G")
        self.g_of = carrier
        self.h_of = {g: h for h, g in enumerate(carrier)}
        self._full = (1 << Sg.n) - 1
        # bit x of mask[h] set iff (x)^h lies in S
        self._mask = [sum(1 << i for i, x in enumerate(s_elems) if G.conj(x, h) in S) for h in range(G.n)]
        self._dmask = sorted({sum(1 << x for x in P) for P in delta_S})
        super().__init__(
            len(carrier),
            self.h_of[G.identity],
            [self.h_of[G.inv(g)] for g in carrier],
            Sg,
            [self.h_of[g] for g in s_elems],
            delta_S,
            p,
            labels=[G.labels[g] for g in carrier],
            name=name or G.name,
        )

    def in_domain(self, w: Word) -> bool:
        X = self._full
        cur = self.G.identity
        t = self.G.table
        mask = self._mask
        g_of = self.g_of
        for h in w:
            cur = t[cur][g_of[h]]
            X &= mask[cur]
        return any(d & X == d for d in self._dmask)

    def _product(self, w: Word) -> int:
        t = self.G.table
        cur = self.G.identity
        for h in w:
            cur = t[cur][self.g_of[h]]
        return self.h_of[cur]


class ExcludedWords(Locality):
    """A locality with some words removed from ``D`` (for mutation tests)."""

    def __init__(self, base: Locality, words: Iterable[Word]):
        self.base = base
        self.excluded = {tuple(w) for w in words}
        super().__init__(base.size, base.unit, base._inverse, base.S, base.s_handles, base.delta, base.p, base.labels, base.name + "-mut")
        self.declared_fusion = base.declared_fusion

    def in_domain(self, w: Word) -> bool:
        return tuple(w) not in self.excluded and self.base.in_domain(w)

    def _product(self, w: Word) -> int:
        return self.base._product(w)


class Relabeled(Locality):
    """``base`` transported along a bijection ``sigma`` of handles."""

    def __init__(self, base: Locality, sigma: Sequence[int]):
        self.base = base
        self.sigma = list(sigma)
        self.sigma_inv = [0] * len(sigma)
        for a, b in enumerate(self.sigma):
            self.sigma_inv[b] = a
        inv = [0] * base.size
        for h in range(base.size):
            inv[self.sigma[h]] = self.sigma[base.inverse(h)]
        labels = [base.labels[self.sigma_inv[k]] for k in range(base.size)]
        super().__init__(base.size, self.sigma[base.unit], inv, base.S, [self.sigma[h] for h in base.s_handles], base.delta, base.p, labels, base.name + "-relabeled")

    def in_domain(self, w: Word) -> bool:
        return self.base.in_domain(tuple(self.sigma_inv[k] for k in w))

    def _product(self, w: Word) -> int:
        return self.sigma[self.base.product(tuple(self.sigma_inv[k] for k in w))]


class TableLocality(Locality):
    """A locality stored as conjugation data plus the table of defined pairs.

    ``D`` is recovered from object chains and longer products by folding
    pair products, which is valid in any partial group.
    """

    def __init__(self, size, unit, inverse, S, s_handles, delta, p, conj: dict[int, dict[int, int]], pairs: dict[tuple[int, int], int], labels=None, name=""):
        super().__init__(size, unit, inverse, S, s_handles, delta, p, labels, name)
        self._conj = {g: dict(m) for g, m in conj.items()}
        self.pairs = dict(pairs)
        self._dindex = {P: i for i, P in enumerate(self.delta)}
        self._step = [[self._next(g, P) for P in self.delta] for g in range(size)]

    def _next(self, g, P):
        m = self._conj.get(g, {})
        if not P <= frozenset(m):
            return None
        return self._dindex.get(frozenset(m[x] for x in P))

    def in_domain(self, w: Word) -> bool:
        for start in range(len(self.delta)):
            i = start
            for g in w:
                i = self._step[g][i]
                if i is None:
                    break
            else:
                return True
        return False

    def _product(self, w: Word) -> int:
        x = w[0]
        for g in w[1:]:
            x = self.pairs[(x, g)]
        return x


def from_finite_group(G: FiniteGroup, S: frozenset, delta: Iterable[frozenset], p: int, name: str = "") -> GroupLocality:
    return GroupLocality(G, S, delta, p, name)


# -- word enumeration ---------------------------------------------------

def iter_domain_words(L: PartialGroup, max_len: int) -> Iterator[Word]:
    """Words of ``D`` up to ``max_len``, shortest first, extending prefixes."""
    layer = [()]
    yield ()
    for _ in range(max_len):
        nxt = []
        for w in layer:
            for g in L.handles:
                v = w + (g,)
                if L.in_domain(v):
                    nxt.append(v)
                    yield v
        layer = nxt


def _chain_table(L: Locality) -> list[list[int | None]]:
    index = {P: i for i, P in enumerate(L.delta)}
    table = []
    for g in L.handles:
        m = L.conj_map(g)
        dom = frozenset(m)
        row = []
        for P in L.delta:
            row.append(index.get(frozenset(m[x] for x in P)) if P <= dom else None)
        table.append(row)
    return table


def chain_witness(L: Locality, w: Word) -> list[frozenset] | None:
    """Objects ``(P_0, ..., P_n)`` with ``P_{i-1}^{g_i} = P_i``, if any."""
    table = _chain_table(L)
    for start in range(len(L.delta)):
        chain = [start]
        for g in w:
            nxt = table[g][chain[-1]]
            if nxt is None:
                break
            chain.append(nxt)
        else:
            return [L.delta[i] for i in chain]
    return None


# -- checks -------------------------------------------------------------

def check_partial_group_axioms(L: PartialGroup, max_len: int = 4) -> Report:
    rep = Report("partial group axioms")
    words = list(iter_domain_words(L, max_len))
    dom = set(words)

    def in_d(w):
        return w in dom if len(w) <= max_len else L.in_domain(w)

    bad = next(((g,) for g in L.handles if (g,) not in dom), None)
    rep.add("length-1 words lie in D", bad is None, witness=bad and L.show(bad))
    bad = None
    for w in words:
        for i in range(1, len(w)):
            if not (in_d(w[:i]) and in_d(w[i:])):
                bad = w
                break
        if bad:
            break
    rep.add("D closed under splitting", bad is None, f"{len(words)} words checked", bad and L.show(bad))
    bad = next((g for g in L.handles if L.product((g,)) != g), None)
    rep.add("product on length-1 words is the identity", bad is None, witness=bad)
    bad = None
    for w in words:
        if len(w) < 2:
            continue
        pw = L.product(w)
        for i in range(len(w)):
            for j in range(i + 2, len(w) + 1):
                v = L.product(w[i:j])
                spliced = w[:i] + (v,) + w[j:]
                if not in_d(spliced) or L.product(spliced) != pw:
                    bad = (w, i, j)
                    break
            if bad:
                break
        if bad:
            break
    rep.add("splicing associativity", bad is None, witness=bad and f"{L.show(bad[0])} at [{bad[1]}:{bad[2]}]")
    bad = next((g for g in L.handles if L.inverse(L.inverse(g)) != g), None)
    rep.add("inversion is an involution", bad is None, witness=bad)
    bad = None
    for w in words:
        u = L.invert_word(w) + w
        if not L.in_domain(u) or L.product(u) != L.unit:
            bad = w
            break
    rep.add("inverse words cancel", bad is None, witness=bad and L.show(bad))
    bad = None
    for a in L.handles:
        seen = {}
        for x in L.handles:
            if (a, x) in dom or in_d((a, x)):
                y = L.product((a, x))
                if y in seen and seen[y] != x:
                    bad = (a, seen[y], x)
                    break
                seen[y] = x
        if bad:
            break
    rep.add("left cancellation", bad is None, witness=bad and L.show(bad))
    bad = None
    for a in L.handles:
        seen = {}
        for x in L.handles:
            if in_d((x, a)):
                y = L.product((x, a))
                if y in seen and seen[y] != x:
                    bad = (seen[y], x, a)
                    break
                seen[y] = x
        if bad:
            break
    rep.add("right cancellation", bad is None, witness=bad and L.show(bad))
    if isinstance(L, Locality):
        bad = None
        for g in L.handles:
            m = L.conj_map(g)
            back = L.conj_map(L.inverse(g))
            if frozenset(m.values()) != frozenset(back) or any(back[y] != x for x, y in m.items()):
                bad = L.label(g)
                break
        rep.add("conjugation by g is a bijection S_g -> S_(g^-1) inverted by g^-1", bad is None, witness=bad)
    return rep


def check_objectivity(L: Locality, max_len: int = 3) -> Report:
    """(O1): ``w in D`` iff ``w`` admits an object chain; (O2): ``delta`` is F-closed."""
    rep = Report("objectivity")
    table = _chain_table(L)
    nd = len(L.delta)
    mismatch = None
    count = 0
    # depth-first over all words, carrying the set of live chains
    stack = [((), frozenset(range(nd)))]
    while stack and mismatch is None:
        w, live = stack.pop()
        if len(w) == max_len:
            continue
        for g in L.handles:
            v = w + (g,)
            nxt = frozenset(j for i in live if (j := table[g][i]) is not None)
            # chains are tracked by current object only, which suffices for existence
            count += 1
            if bool(nxt) != L.in_domain(v):
                mismatch = v
                break
            stack.append((v, nxt))
    rep.add("(O1) D equals the chain-admissible words", mismatch is None, f"{count} words up to length {max_len}", mismatch and L.show(mismatch))
    dset = set(L.delta)
    fam = L.S.family()
    bad = None
    for P in L.delta:
        for Q in fam:
            if P <= Q and Q not in dset:
                bad = ("overgroup", sorted(P), sorted(Q))
                break
        if bad:
            break
    # conjugates outside the representable family (truncation) are not compared
    fset = set(fam)
    skipped = 0
    if bad is None:
        for P in L.delta:
            for g in L.handles:
                m = L.conj_map(g)
                if not P <= frozenset(m):
                    continue
                Q = frozenset(m[x] for x in P)
                if Q not in fset:
                    skipped += 1
                elif Q not in dset:
                    bad = ("conjugate", sorted(P), L.label(g))
                    break
            if bad:
                break
    detail = f"{skipped} conjugates beyond the representable family" if skipped else ""
    rep.add("(O2) delta is overgroup-closed and closed under conjugation", bad is None, detail, bad)
    return rep


@dataclass
class LocalNormalizer:
    """``N_L(P)`` as a group, with the handles it is built from."""

    P: frozenset
    handles: list[int]
    group: FiniteGroup
    centralizer: list[int]

    def positions(self, hs: Iterable[int]) -> frozenset:
        idx = {h: i for i, h in enumerate(self.handles)}
        return frozenset(idx[h] for h in hs)


def normalizer_in_L(L: Locality, P: frozenset) -> LocalNormalizer:
    P = frozenset(P)
    if P not in set(L.delta):
        raise ValueError("normalizers are only taken for objects")
    hs = []
    cent = []
    for g in L.handles:
        m = L.conj_map(g)
        if P <= frozenset(m) and frozenset(m[x] for x in P) == P:
            hs.append(g)
            if all(m[x] == x for x in P):
                cent.append(g)
    idx = {h: i for i, h in enumerate(hs)}
    table = []
    for a in hs:
        row = []
        for b in hs:
            if not L.in_domain((a, b)):
                raise ValueError(f"N_L(P) is not a group: {L.show((a, b))} undefined")
            c = L.product((a, b))
            if c not in idx:
                raise ValueError("N_L(P) is not closed under products")
            row.append(idx[c])
        table.append(row)
    return LocalNormalizer(P, hs, FiniteGroup(table, [L.label(h) for h in hs]), cent)


def _characteristic_p(N: FiniteGroup, p: int) -> tuple[bool, frozenset]:
    O = N.o_p(p)
    C = N.centralizer(O)
    return C <= O, O


def check_proper(L: Locality, fusion=None) -> Report:
    """(PL1) F^cr inside delta, (PL2) characteristic-p normalizers, (PL3) normalizer-increasing S."""
    from .fusion import centric_radicals, fusion_from_locality

    rep = Report("proper locality")
    own = fusion_from_locality(L)
    F = fusion if fusion is not None else (L.declared_fusion or own)
    if F is not own:
        same = F.same_as(own)
        rep.add("locality realizes the declared fusion system", same)
    cr = centric_radicals(F)
    missing = [P for P in cr if P not in set(L.delta)]
    rep.add("(PL1) centric-radical subgroups are objects", not missing, f"{len(cr)} centric-radical subgroups", missing and sorted(missing[0]))
    bad = None
    for P in L.delta:
        try:
            N = normalizer_in_L(L, P)
        except ValueError as exc:
            bad = (sorted(P), str(exc))
            break
        ok, _ = _characteristic_p(N.group, L.p)
        if not ok:
            bad = (sorted(P), "C_N(O_p(N)) not inside O_p(N)")
            break
    rep.add("(PL2) N_L(P) has characteristic p for every object", bad is None, witness=bad)
    S = L.S
    bad = None
    for P in S.family():
        if P != S.whole and not P < S.normalizer(P):
            bad = sorted(P)
            break
    rep.add("(PL3) S has the normalizer-increasing property", bad is None, witness=bad)
    return rep


def check_compact(L: Locality, index_bound: int | None = None, fusion=None) -> Report:
    """Proper, and every ``N_L(P)`` virtually p-toral (read at the truncation)."""
    rep = Report("compact locality")
    rep.extend(check_proper(L, fusion), prefix="")
    bad = None
    G = getattr(L, "G", None)
    truncated = G is not None and hasattr(G, "torus_set") and G.dp.r > 0
    for P in L.delta:
        try:
            N = normalizer_in_L(L, P)
        except ValueError as exc:
            bad = (sorted(P), str(exc))
            break
        if not truncated:
            continue
        elems = frozenset(L.g_of[h] for h in N.handles)
        bound = index_bound if index_bound is not None else G.dp.finite.n
        if G.torus_set <= elems:
            if len(elems) // len(G.torus_set) > bound:
                bad = (sorted(P), f"torus index {len(elems) // len(G.torus_set)} exceeds {bound}")
                break
        elif not elems <= G.level_set(G.dp.m - 1):
            bad = (sorted(P), "normalizer reaches the truncation without containing the torus")
            break
    detail = "finite carrier" if not truncated else f"truncation {G.dp.m}"
    rep.add("normalizers of objects are virtually p-toral", bad is None, detail, bad)
    return rep


# -- stratification poset ----------------------------------------------

@dataclass
class StratificationPoset:
    members: list[frozenset]
    dim: dict[frozenset, int] = field(default_factory=dict)

    def height(self) -> int:
        return max(self.dim.values(), default=0)


def omega_poset(L: Locality, max_len: int = 2) -> StratificationPoset:
    """All ``S_w`` for words up to ``max_len`` (any word), closed under intersections."""
    found = {L.S.whole}
    layer = [()]
    for _ in range(max_len):
        nxt = []
        for w in layer:
            for g in L.handles:
                v = w + (g,)
                X = s_w(L, v)
                found.add(X)
                nxt.append(v)
        layer = nxt
    changed = True
    while changed:
        changed = False
        for A in list(found):
            for B in list(found):
                C = A & B
                if C not in found:
                    found.add(C)
                    changed = True
    members = sorted(found, key=subgroup_key)
    dim = {}
    for X in members:
        below = [dim[Y] for Y in members if Y < X and Y in dim]
        dim[X] = 1 + max(below) if below else 0
    return StratificationPoset(members, dim)
