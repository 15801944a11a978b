"""Discrete p-toral groups as split extensions ``T x| F``.

``T = (Z/p^inf)^r`` is a p-torus and ``F`` a finite group acting on it through
integer matrices.  All enumeration happens inside the p^m-torsion truncation
``G_m = T_m x| F``.  A subgroup is a set of generators together with a flag
saying whether it contains the whole torus; infinite subgroups are exactly
the flagged ones (see ``DPGroup`` for the representability restriction).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

from .finite import FiniteGroup, is_prime, subgroup_key


class TruncationError(RuntimeError):
    """A computation needed more torsion than the working truncation holds."""


def _valuation(n: int, p: int) -> int:
    if n == 0:
        raise ValueError("valuation of zero")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _det(M: Sequence[Sequence[int]]) -> int:
    n = len(M)
    if n == 0:
        return 1
    if n == 1:
        return M[0][0]
    return sum((-1) ** j * M[0][j] * _det([row[:j] + row[j + 1:] for row in M[1:]]) for j in range(n))


def _matmul(A, B):
    return tuple(tuple(sum(A[i][k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))) for i in range(len(A)))


def _parse_fraction(x) -> Fraction:
    if isinstance(x, str):
        return Fraction(x.strip())
    return Fraction(x)


@dataclass(frozen=True)
class TorusElement:
    p: int
    coords: tuple[Fraction, ...]

    def __post_init__(self):
        norm = []
        for c in self.coords:
            c = _parse_fraction(c) % 1
            d = c.denominator
            while d % self.p == 0:
                d //= self.p
            if d != 1:
                raise ValueError(f"coordinate {c} does not have p-power denominator (p={self.p})")
            norm.append(c)
        object.__setattr__(self, "coords", tuple(norm))

    @classmethod
    def zero(cls, p: int, r: int) -> "TorusElement":
        return cls(p, (Fraction(0),) * r)

    def __add__(self, other: "TorusElement") -> "TorusElement":
        return TorusElement(self.p, tuple(a + b for a, b in zip(self.coords, other.coords)))

    def __neg__(self) -> "TorusElement":
        return TorusElement(self.p, tuple(-a for a in self.coords))

    def act(self, M) -> "TorusElement":
        r = len(self.coords)
        return TorusElement(self.p, tuple(sum(M[i][k] * self.coords[k] for k in range(r)) for i in range(r)))

    def order(self) -> int:
        return max((c.denominator for c in self.coords), default=1)

    def level(self) -> int:
        """Smallest k with ``p^k * self == 0``."""
        return _valuation(self.order(), self.p) if self.order() > 1 else 0

    def scaled(self, m: int) -> tuple[int, ...]:
        q = self.p**m
        out = []
        for c in self.coords:
            v = c * q
            if v.denominator != 1:
                raise TruncationError(f"{c} is not {self.p}^{m}-torsion")
            out.append(int(v) % q)
        return tuple(out)

    def __str__(self):
        return "(" + ", ".join(str(c) for c in self.coords) + ")"


@dataclass(frozen=True)
class DPElement:
    torus: TorusElement
    finite: str
    group: "DPGroup | None" = field(default=None, compare=False, repr=False)

    def __str__(self):
        return f"[{self.torus}, {self.finite}]"


class OrderPair(NamedTuple):
    rank: int
    index: int


class DPGroup:
    """Split discrete p-toral (more generally virtually p-toral) group ``T x| F``.

    The group law is ``(t1, f1)(t2, f2) = (t1 + A(f1) t2, f1 f2)`` with
    ``A`` a homomorphism from ``F`` to ``GL_r(Z)``.  Subgroups whose maximal
    torus is a proper nontrivial subtorus are not representable, so every
    non-identity matrix ``A(f)`` must have ``A(f) - 1`` invertible over Q.
    """

    def __init__(self, prime: int, torus_rank: int, finite: FiniteGroup, action: dict[str, Sequence[Sequence[int]]] | None = None, truncation: int = 1, name: str = ""):
        if not is_prime(prime):
            raise ValueError(f"{prime} is not prime")
        if torus_rank < 0:
            raise ValueError("torus rank must be nonnegative")
        if truncation < 1:
            raise ValueError("truncation must be at least 1")
        self.p = prime
        self.r = torus_rank
        self.finite = finite
        self.m = truncation
        self.name = name
        ident = tuple(tuple(int(i == j) for j in range(self.r)) for i in range(self.r))
        action = action or {}
        self.action: list[tuple[tuple[int, ...], ...]] = []
        for f in range(finite.n):
            M = action.get(finite.labels[f], ident)
            M = tuple(tuple(int(x) for x in row) for row in M)
            if len(M) != self.r or any(len(row) != self.r for row in M):
                raise ValueError(f"action matrix for {finite.labels[f]} is not {self.r}x{self.r}")
            if _det(M) % self.p == 0:
                raise ValueError(f"action matrix for {finite.labels[f]} is not invertible mod {self.p}")
            self.action.append(M)
        self._ident = ident
        for a in range(finite.n):
            for b in range(finite.n):
                if _matmul(self.action[a], self.action[b]) != self.action[finite.table[a][b]]:
                    raise ValueError("action is not a homomorphism on the multiplication table")
        worst = 0
        for M in self.action:
            if M == ident:
                continue
            d = _det([[M[i][j] - ident[i][j] for j in range(self.r)] for i in range(self.r)])
            if d == 0:
                raise ValueError("an element fixes a proper subtorus; such subgroups are not representable")
            worst = max(worst, _valuation(d, self.p))
        # levels of slack kept free below the truncation for finite subgroups
        self.headroom = 0 if self.r == 0 else worst + 1

    @property
    def signature(self) -> tuple:
        return (self.p, self.r, tuple(map(tuple, self.finite.table)), tuple(self.action))

    def at(self, m: int) -> "DPGroup":
        g = DPGroup.__new__(DPGroup)
        g.__dict__.update({k: v for k, v in self.__dict__.items() if k not in ("working",)})
        if m < 1:
            raise ValueError("truncation must be at least 1")
        g.m = m
        return g

    def same_group(self, other: "DPGroup") -> bool:
        return self.signature == other.signature

    # -- elements -----------------------------------------------------
    def element(self, torus: Sequence = (), finite: str | None = None) -> DPElement:
        if finite is None:
            finite = self.finite.labels[self.finite.identity]
        if finite not in self.finite.labels:
            raise ValueError(f"unknown finite label {finite!r}")
        torus = list(torus) or [0] * self.r
        if len(torus) != self.r:
            raise ValueError("torus coordinate count does not match torus rank")
        return DPElement(TorusElement(self.p, tuple(_parse_fraction(x) for x in torus)), finite, self)

    @property
    def identity(self) -> DPElement:
        return self.element()

    def _fidx(self, label: str) -> int:
        return self.finite.labels.index(label)

    def multiply(self, g: DPElement, h: DPElement) -> DPElement:
        f1, f2 = self._fidx(g.finite), self._fidx(h.finite)
        t = g.torus + h.torus.act(self.action[f1])
        return DPElement(t, self.finite.labels[self.finite.table[f1][f2]], self)

    def inverse(self, g: DPElement) -> DPElement:
        fi = self.finite.inv(self._fidx(g.finite))
        return DPElement(-(g.torus.act(self.action[fi])), self.finite.labels[fi], self)

    # -- truncation ---------------------------------------------------
    @cached_property
    def working(self) -> "TruncatedGroup":
        return TruncatedGroup(self)

    def index_of(self, g: DPElement) -> int:
        return self.working.index_of(g)

    def order_of_truncation(self) -> int:
        return self.p ** (self.m * self.r) * self.finite.n

    def __repr__(self):
        return f"DPGroup({self.name or 'anon'}, p={self.p}, r={self.r}, |F|={self.finite.n}, m={self.m})"


class TruncatedGroup(FiniteGroup):
    """The finite group ``G_m = T_m x| F`` with its torus bookkeeping."""

    def __init__(self, dp: DPGroup):
        self.dp = dp
        q = dp.p**dp.m
        coords = sorted(_all_vectors(dp.r, q))
        keys = [(f, c) for f in range(dp.finite.n) for c in coords]
        self._index = {k: i for i, k in enumerate(keys)}
        self.keys = keys
        F = dp.finite
        table = []
        for f1, c1 in keys:
            A = dp.action[f1]
            row = []
            for f2, c2 in keys:
                t = tuple((c1[i] + sum(A[i][k] * c2[k] for k in range(dp.r))) % q for i in range(dp.r))
                row.append(self._index[(F.table[f1][f2], t)])
            table.append(row)
        labels = [f"[{_fmt_coords(c, q)}, {F.labels[f]}]" for f, c in keys]
        super().__init__(table, labels, name=f"{dp.name}_{dp.m}")
        fid = F.identity
        self.torus_set = frozenset(i for i, (f, c) in enumerate(keys) if f == fid)

    def index_of(self, g: DPElement) -> int:
        return self._index[(self.dp._fidx(g.finite), g.torus.scaled(self.dp.m))]

    def element_at(self, i: int) -> DPElement:
        f, c = self.keys[i]
        q = self.dp.p**self.dp.m
        return DPElement(TorusElement(self.dp.p, tuple(Fraction(x, q) for x in c)), self.dp.finite.labels[f], self.dp)

    def level_of(self, i: int) -> int:
        return self.element_at(i).torus.level()

    def level_set(self, k: int) -> frozenset:
        return frozenset(i for i in range(self.n) if self.level_of(i) <= k)

    def contains_torus(self, P: frozenset) -> bool:
        return self.dp.r > 0 and self.torus_set <= P

    def order_pair(self, P: frozenset) -> OrderPair:
        if self.contains_torus(P):
            return OrderPair(self.dp.r, len(P) // len(self.torus_set))
        return OrderPair(0, len(P))

    def rank_of(self, P: frozenset) -> int:
        return self.dp.r if self.contains_torus(P) else 0

    @cached_property
    def stable_finite_part(self) -> frozenset:
        """Elements whose torus coordinates leave ``headroom`` levels free."""
        return self.level_set(max(self.dp.m - self.dp.headroom, 0))

    def family(self) -> list[frozenset]:
        """Subgroups representable at this truncation.

        Finite subgroups must sit ``headroom`` levels below the truncation so
        that their normalizers and centralizers are computed exactly;
        subgroups containing ``T_m`` stand for their infinite counterparts.
        """
        if self.dp.r == 0:
            return self.subgroups()
        low = self.stable_finite_part
        out = [P for P in self.subgroups() if (P <= low and not self.contains_torus(P)) or self.contains_torus(P)]
        return sorted(out, key=subgroup_key)


def _all_vectors(r: int, q: int):
    if r == 0:
        yield ()
        return
    for head in range(q):
        for tail in _all_vectors(r - 1, q):
            yield (head,) + tail


def _fmt_coords(c, q):
    return ", ".join(str(Fraction(x, q)) for x in c)


class Subgroup:
    """A subgroup of a DPGroup at the owner's truncation."""

    def __init__(self, owner: DPGroup, generators: Iterable[DPElement] = (), full_torus: bool = False, size_bound: int | None = None):
        self.owner = owner
        self.generators = tuple(generators)
        for g in self.generators:
            if g.group is not None and not g.group.same_group(owner):
                raise ValueError("generator belongs to a different group")
        self.contains_full_torus = bool(full_torus) and owner.r > 0
        W = owner.working
        try:
            gens = [W.index_of(g) for g in self.generators]
        except TruncationError:
            raise TruncationError(f"generators are not representable at truncation {owner.m}") from None
        if self.contains_full_torus:
            gens += sorted(W.torus_set)
        self.indices = W.closure(gens)
        if size_bound is not None and len(self.indices) > size_bound:
            raise TruncationError(f"closure has {len(self.indices)} elements, above bound {size_bound}")

    @classmethod
    def from_indices(cls, owner: DPGroup, indices: frozenset, full_torus: bool | None = None) -> "Subgroup":
        W = owner.working
        if full_torus is None:
            full_torus = W.contains_torus(indices)
        base = indices - W.torus_set if full_torus else indices
        gens = W.generating_set(indices if not full_torus else W.closure(base | W.torus_set))
        if full_torus:
            # torus coset representatives carry no torus component
            gens = sorted({W._index[(W.keys[g][0], (0,) * owner.r)] for g in gens})
        sub = cls(owner, [W.element_at(g) for g in gens], full_torus=full_torus)
        if sub.indices != indices:
            raise ValueError("index set is not a subgroup of the stated kind")
        return sub

    @property
    def elements(self) -> frozenset:
        W = self.owner.working
        return frozenset(W.element_at(i) for i in self.indices)

    def __len__(self):
        return len(self.indices)

    def __contains__(self, g: DPElement) -> bool:
        try:
            return self.owner.working.index_of(g) in self.indices
        except TruncationError:
            # beyond the truncation only the torus cosets are known
            return self.contains_full_torus and any(self.owner.working.element_at(i).finite == g.finite for i in self.indices)

    def _key(self):
        return (self.owner.signature, self.owner.m, self.contains_full_torus, self.indices)

    def __eq__(self, other):
        return isinstance(other, Subgroup) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __le__(self, other: "Subgroup") -> bool:
        _same_owner(self, other)
        if self.contains_full_torus and not other.contains_full_torus:
            return False
        return self.indices <= other.indices

    def __lt__(self, other: "Subgroup") -> bool:
        return self <= other and self != other

    def lift(self, m: "int | DPGroup") -> "Subgroup":
        """The same generators read at another truncation (a level or a group)."""
        target = m if isinstance(m, DPGroup) else self.owner.at(m)
        if not target.same_group(self.owner):
            raise ValueError("target is a different group")
        return Subgroup(target, self.generators, self.contains_full_torus)

    def __repr__(self):
        tag = "T*" if self.contains_full_torus else ""
        return f"Subgroup({tag}<{', '.join(map(str, self.generators))}>, |.|={len(self.indices)}, m={self.owner.m})"


def _same_owner(P: Subgroup, Q: Subgroup):
    if not P.owner.same_group(Q.owner) or P.owner.m != Q.owner.m:
        raise ValueError("subgroups live in different groups or truncations")


def multiply(g: DPElement, h: DPElement) -> DPElement:
    if g.group is None or h.group is None or not g.group.same_group(h.group):
        raise ValueError("elements do not share an owning group")
    return g.group.multiply(g, h)


def generated_subgroup(gens: Iterable[DPElement], group: DPGroup | None = None, m: int | None = None, full_torus: bool = False, size_bound: int | None = None) -> Subgroup:
    gens = list(gens)
    owner = group if group is not None else (gens[0].group if gens else None)
    if owner is None:
        raise ValueError("cannot infer the owning group of an empty generator set")
    if m is not None and m != owner.m:
        owner = owner.at(m)
    return Subgroup(owner, gens, full_torus=full_torus, size_bound=size_bound)


def maximal_torus(P: Subgroup) -> Subgroup:
    """The unique p-torus of finite index in ``P``."""
    return Subgroup(P.owner, (), full_torus=P.contains_full_torus)


def rank(P: Subgroup) -> int:
    """log_p of the number of elements of order dividing p in the maximal torus."""
    W = P.owner.working
    T = maximal_torus(P).indices
    ptors = sum(1 for x in T if _power(W, x, P.owner.p) == W.identity)
    k = 0
    while P.owner.p**k < ptors:
        k += 1
    if P.owner.p**k != ptors:
        raise ArithmeticError("p-torsion of the torus is not elementary abelian")
    return k


def _power(W: FiniteGroup, x: int, k: int) -> int:
    y = W.identity
    for _ in range(k):
        y = W.mul(y, x)
    return y


def order_pair(P: Subgroup) -> OrderPair:
    """``(rank, index of the maximal torus)``."""
    T = maximal_torus(P)
    if not T.indices <= P.indices:
        raise TruncationError("maximal torus is not contained in the subgroup encoding")
    if len(P.indices) % len(T.indices):
        raise TruncationError("torus index is not finite at this truncation")
    return OrderPair(rank(P), len(P.indices) // len(T.indices))


def order_less(P: Subgroup, Q: Subgroup) -> bool:
    return order_pair(P) < order_pair(Q)


def normalizer(P: Subgroup, Q: Subgroup) -> Subgroup:
    """``N_Q(P)``."""
    _same_owner(P, Q)
    W = P.owner.working
    N = W.normalizer(P.indices, within=Q.indices)
    flag = Q.contains_full_torus and W.contains_torus(N)
    return Subgroup.from_indices(P.owner, N, full_torus=flag)


def normalizer_tower(P: Subgroup, Q: Subgroup, max_steps: int | None = None) -> tuple[Subgroup, list[Subgroup]]:
    """Iterate ``P_k = N_Q(P_{k-1})`` until it stabilizes; return the union and the tower."""
    if not P <= Q:
        raise ValueError("P must be a subgroup of Q")
    if max_steps is None:
        size = P.owner.working.n
        max_steps = 2 * math.ceil(math.log(max(size, 2), P.owner.p)) + 4
    tower = [P]
    for _ in range(max_steps):
        nxt = normalizer(tower[-1], Q)
        if nxt == tower[-1]:
            break
        tower.append(nxt)
    else:
        raise TruncationError("normalizer tower did not stabilize; raise the truncation")
    B = tower[-1]
    if not (B == Q or rank(B) < rank(P)):
        raise AssertionError(f"tower dichotomy violated for {P} in {Q}")
    return B, tower


def subgroups(G: DPGroup) -> list[Subgroup]:
    """The subgroups representable at ``G``'s truncation, canonical order."""
    W = G.working
    return [Subgroup.from_indices(G, P, full_torus=W.contains_torus(P)) for P in W.family()]


def whole(G: DPGroup) -> Subgroup:
    W = G.working
    return Subgroup.from_indices(G, W.whole, full_torus=G.r > 0)


def torus(G: DPGroup) -> Subgroup:
    return Subgroup(G, (), full_torus=True) if G.r > 0 else Subgroup(G)


def trivial(G: DPGroup) -> Subgroup:
    return Subgroup(G)


def from_description(desc: dict, name: str = "") -> DPGroup:
    """Parse the group description format (see README)."""
    for key in ("prime", "torus_rank", "finite_part"):
        if key not in desc:
            raise KeyError(f"group description lacks {key!r}")
    F = FiniteGroup.from_labelled_table(desc["finite_part"], name=name + "_F")
    return DPGroup(int(desc["prime"]), int(desc["torus_rank"]), F, desc.get("action", {}), int(desc.get("truncation", 1)), name=name)


def parse_element(G: DPGroup, desc: dict) -> DPElement:
    return G.element(desc.get("torus", []), desc.get("finite"))


def parse_subgroup(G: DPGroup, desc) -> Subgroup:
    if isinstance(desc, dict):
        return Subgroup(G, [parse_element(G, e) for e in desc.get("elements", desc.get("generators", []))], full_torus=desc.get("full_torus", False))
    return Subgroup(G, [parse_element(G, e) for e in desc])


def check_toral_arithmetic(G: DPGroup):
    """Exhaustive torus, order-pair and normalizer checks over the representable subgroups."""
    from .report import Report

    rep = Report(f"p-toral arithmetic of {G.name or 'G'} at truncation {G.m}")
    subs = subgroups(G)
    pairs = [(P, Q) for P in subs for Q in subs if P <= Q]
    tori = [X for X in subs if maximal_torus(X) == X]
    bad = None
    for P in subs:
        Tp = maximal_torus(P)
        if not Tp <= P:
            bad = P
            break
        order_pair(P)
        if any(X <= P and not X <= Tp for X in tori):
            bad = P
            break
    rep.add("maximal torus contains every torus of the subgroup", bad is None, f"{len(subs)} subgroups, {len(tori)} tori", bad)
    bad = next(((X, Y) for X, Y in pairs if X != Y and not X < normalizer(X, Y)), None)
    rep.add("proper subgroups grow under normalizers", bad is None, f"{len(pairs)} pairs", bad)
    bad = next(((P, Q) for P, Q in pairs if order_pair(P) > order_pair(Q) or ((order_pair(P) == order_pair(Q)) != (P == Q))), None)
    rep.add("order pairs are monotone, equal only for equal subgroups", bad is None, witness=bad)
    bad = next(((P, Q) for P, Q in pairs if Q in tori and P != Q and not rank(P) < rank(Q)), None)
    rep.add("a proper subgroup of a torus has smaller rank", bad is None, witness=bad)
    W = G.working
    finite = [P for P in subs if not P.contains_full_torus]
    bad = next(((P, Q) for P in finite for Q in finite if W.is_isomorphic(P.indices, Q.indices) and order_pair(P) != order_pair(Q)), None)
    rep.add("isomorphic finite subgroups have equal order pairs", bad is None, witness=bad)
    bad = None
    for P, Q in pairs:
        try:
            normalizer_tower(P, Q)
        except (AssertionError, TruncationError) as exc:
            bad = (P, Q, str(exc))
            break
    rep.add("normalizer tower reaches Q or drops rank", bad is None, witness=bad)
    return rep
