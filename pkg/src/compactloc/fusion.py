"""Fusion systems over (truncated) discrete p-toral groups.

A fusion system is stored as its isomorphism table: for every ordered pair
of subgroups in the working family, the set of F-isomorphisms between them.
Arbitrary F-homomorphisms are isomorphisms followed by inclusions.  The
table is built eagerly from generating maps by working out each conjugacy
class once: a spanning tree of isomorphisms out of a root, plus the
automorphism group of the root generated by Schreier elements.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

from .finite import FiniteGroup, subgroup_key
from .report import Report


@dataclass(frozen=True)
class Hom:
    """An injective map between subgroups of S, stored as an explicit table."""

    domain: tuple[int, ...]
    images: tuple[int, ...]

    @classmethod
    def from_dict(cls, m: dict[int, int]) -> "Hom":
        dom = tuple(sorted(m))
        return cls(dom, tuple(m[x] for x in dom))

    @classmethod
    def identity(cls, P: Iterable[int]) -> "Hom":
        dom = tuple(sorted(P))
        return cls(dom, dom)

    @classmethod
    def conjugation(cls, S: FiniteGroup, g: int, P: Iterable[int]) -> "Hom":
        dom = tuple(sorted(P))
        return cls(dom, tuple(S.conj(x, g) for x in dom))

    @property
    def source(self) -> frozenset:
        return frozenset(self.domain)

    @property
    def image(self) -> frozenset:
        return frozenset(self.images)

    def as_dict(self) -> dict[int, int]:
        return dict(zip(self.domain, self.images))

    def __call__(self, x: int) -> int:
        return self.images[self.domain.index(x)]

    def apply(self, X: Iterable[int]) -> frozenset:
        m = self.as_dict()
        return frozenset(m[x] for x in X)

    def compose(self, other: "Hom") -> "Hom":
        """First ``self``, then ``other``."""
        m = other.as_dict()
        return Hom(self.domain, tuple(m[y] for y in self.images))

    def restrict(self, P: Iterable[int]) -> "Hom":
        m = self.as_dict()
        dom = tuple(sorted(P))
        return Hom(dom, tuple(m[x] for x in dom))

    def inverse(self) -> "Hom":
        return Hom.from_dict({y: x for x, y in zip(self.domain, self.images)})

    def is_identity(self) -> bool:
        return self.domain == self.images

    def show(self, S: FiniteGroup) -> str:
        return "{" + ", ".join(f"{S.labels[x]}->{S.labels[y]}" for x, y in zip(self.domain, self.images)) + "}"


def _is_hom(S: FiniteGroup, phi: Hom) -> bool:
    m = phi.as_dict()
    t = S.table
    return all(m[t[a][b]] == t[m[a]][m[b]] for a in m for b in m) and len(set(phi.images)) == len(phi.images)


class FusionSystem:
    """Isomorphism table of a fusion system on ``S`` over a subgroup family."""

    def __init__(self, S: FiniteGroup, p: int, family: Sequence[frozenset] | None = None, name: str = ""):
        self.S = S
        self.p = p
        self.family = sorted(family if family is not None else S.family(), key=subgroup_key)
        self.fam_set = set(self.family)
        self.name = name
        self._iso: dict[tuple[frozenset, frozenset], frozenset] = {}
        self.escaped = 0

    # -- construction -------------------------------------------------
    @classmethod
    def generated(cls, S: FiniteGroup, p: int, generators: Iterable[Hom], family=None, name: str = "") -> "FusionSystem":
        F = cls(S, p, family, name)
        gens = set()
        for phi in generators:
            if not _is_hom(S, phi):
                raise ValueError("generator is not an injective homomorphism")
            gens.add(phi)
        for x in range(S.n):
            gens.add(Hom.conjugation(S, x, S.whole))
        F.generators = sorted(gens, key=lambda h: (len(h.domain), h.domain, h.images))
        F._build()
        return F

    @classmethod
    def from_table(cls, S: FiniteGroup, p: int, table: dict[tuple[frozenset, frozenset], Iterable[Hom]], family=None, name: str = "") -> "FusionSystem":
        F = cls(S, p, family, name)
        F.generators = []
        for key, homs in table.items():
            if homs:
                F._iso[key] = frozenset(homs)
        return F

    def _edges(self, P: frozenset):
        """Restrictions of generators (and their inverses) to ``P``."""
        out = []
        for phi in self.generators:
            for psi in (phi, phi.inverse()):
                if P <= psi.source:
                    r = psi.restrict(P)
                    Q = r.image
                    if Q in self.fam_set:
                        out.append((Q, r))
                    else:
                        self.escaped += 1
        return out

    def _build(self):
        done = set()
        for R in self.family:
            if R in done:
                continue
            # spanning tree: tau[Q] is an isomorphism R -> Q
            tau = {R: Hom.identity(R)}
            order = [R]
            schreier = set()
            i = 0
            while i < len(order):
                Q = order[i]
                i += 1
                for Q2, e in self._edges(Q):
                    path = tau[Q].compose(e)
                    if Q2 not in tau:
                        tau[Q2] = path
                        order.append(Q2)
                    else:
                        schreier.add(path.compose(tau[Q2].inverse()))
            aut = _closure(Hom.identity(R), schreier)
            for Q in order:
                done.add(Q)
            for Q in order:
                back = tau[Q].inverse()
                for Q2 in order:
                    self._iso[(Q, Q2)] = frozenset(back.compose(a).compose(tau[Q2]) for a in aut)

    def without(self, phi: Hom) -> "FusionSystem":
        """A copy of the table with one isomorphism deleted."""
        table = {k: set(v) for k, v in self._iso.items()}
        key = (phi.source, phi.image)
        if phi not in table.get(key, set()):
            raise ValueError("morphism is not in the table")
        table[key].discard(phi)
        return FusionSystem.from_table(self.S, self.p, table, self.family, self.name + "-mut")

    # -- queries ------------------------------------------------------
    def isos(self, P: frozenset, Q: frozenset) -> list[Hom]:
        return sorted(self._iso.get((P, Q), ()), key=lambda h: h.images)

    def aut(self, P: frozenset) -> list[Hom]:
        return self.isos(P, P)

    def orbit(self, P: frozenset, bound: int | None = None) -> list[frozenset]:
        P = frozenset(P)
        if P not in self.fam_set:
            raise ValueError("subgroup is outside the working family")
        seen = {P}
        stack = [P]
        while stack:
            Q = stack.pop()
            for (A, B) in self._iso:
                if A == Q and B not in seen:
                    seen.add(B)
                    stack.append(B)
                    if bound is not None and len(seen) > bound:
                        raise OverflowError("orbit exceeds the configured bound")
        return sorted(seen, key=subgroup_key)

    def orbits(self) -> list[list[frozenset]]:
        seen = set()
        out = []
        for P in self.family:
            if P not in seen:
                o = self.orbit(P)
                seen.update(o)
                out.append(o)
        return out

    def homs(self, P: frozenset, Q: frozenset) -> list[Hom]:
        out = []
        for R in self.orbit(P):
            if R <= Q:
                out.extend(self.isos(P, R))
        return sorted(out, key=lambda h: h.images)

    def contains(self, phi: Hom) -> bool:
        return phi in self._iso.get((phi.source, phi.image), frozenset())

    def contains_hom(self, phi: Hom) -> bool:
        """Membership of a homomorphism into ``S`` (an isomorphism onto its image)."""
        return phi.image in self.fam_set and self.contains(phi)

    def same_as(self, other: "FusionSystem") -> bool:
        return self.family == other.family and self._iso == other._iso

    def all_isos(self) -> list[Hom]:
        out = []
        for key in sorted(self._iso, key=lambda k: (subgroup_key(k[0]), subgroup_key(k[1]))):
            out.extend(sorted(self._iso[key], key=lambda h: h.images))
        return out

    # -- subgroup data ------------------------------------------------
    def order_pair(self, X: frozenset):
        return self.S.order_pair(X)

    def inner(self, P: frozenset, within: Iterable[int] | None = None) -> list[Hom]:
        """``Aut_X(P)`` for ``X = within`` (default ``P`` itself)."""
        within = P if within is None else within
        N = self.S.normalizer(P, within=within)
        return sorted({Hom.conjugation(self.S, x, P) for x in N}, key=lambda h: h.images)


def _closure(identity: Hom, gens: Iterable[Hom]) -> set:
    gens = list(gens)
    seen = {identity}
    frontier = [identity]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                b = a.compose(g)
                if b not in seen:
                    seen.add(b)
                    nxt.append(b)
        frontier = nxt
    return seen


def fusion_from_locality(L) -> "FusionSystem":
    """F_S(L), generated by the partial conjugation maps ``c_g : S_g -> S``."""
    gens = {Hom.from_dict(L.conj_map(g)) for g in L.handles}
    return FusionSystem.generated(L.S, L.p, gens, name=f"F({L.name})")


def fusion_from_group(G: FiniteGroup, S: frozenset, p: int) -> "FusionSystem":
    """F_S(G) for a finite group, via ``S``'s re-indexing."""
    if frozenset(S) == G.whole:
        # keep G itself so a truncated group keeps its representable family
        Sg, emb, index_of = G, list(range(G.n)), {x: x for x in range(G.n)}
    else:
        Sg = G.subgroup_group(S)
        emb, index_of = Sg.embedding, Sg.index_of
    gens = set()
    for g in range(G.n):
        dom = [x for x in emb if G.conj(x, g) in S]
        gens.add(Hom.from_dict({index_of[x]: index_of[G.conj(x, g)] for x in dom}))
    return FusionSystem.generated(Sg, p, gens, name=f"F({G.name})")


# -- Out groups ----------------------------------------------------------

@dataclass
class OutGroup:
    P: frozenset
    aut: list[Hom]
    inn: list[Hom]
    aut_S: list[Hom]

    @property
    def order(self) -> int:
        return len(self.aut) // len(self.inn)

    @property
    def order_S(self) -> int:
        return len(self.aut_S) // len(self.inn)

    def group(self) -> FiniteGroup:
        return _hom_group(self.aut)

    def quotient(self) -> FiniteGroup:
        G = self.group()
        idx = {h: i for i, h in enumerate(self.aut)}
        return G.quotient(frozenset(idx[h] for h in self.inn))[0]


def _hom_group(maps: list[Hom]) -> FiniteGroup:
    idx = {h: i for i, h in enumerate(maps)}
    table = [[idx[a.compose(b)] for b in maps] for a in maps]
    return FiniteGroup(table, [str(i) for i in range(len(maps))])


def out_group(F: FusionSystem, P: frozenset) -> OutGroup:
    aut = F.aut(P)
    if not aut:
        raise ValueError("subgroup has no automorphisms in the table")
    return OutGroup(P, aut, F.inner(P), F.inner(P, within=F.S.whole))


def op_of_aut(F: FusionSystem, P: frozenset) -> set:
    aut = F.aut(P)
    G = _hom_group(aut)
    return {aut[i] for i in G.o_p(F.p)}


@dataclass
class ExtensionControl:
    phi: Hom
    N_phi: frozenset


def extension_control(F: FusionSystem, phi: Hom) -> ExtensionControl:
    """``N_phi = {g in N_S(P) : phi^-1 c_g phi in Aut_S(P phi)}``."""
    S = F.S
    P, Q = phi.source, phi.image
    aut_SQ = set(F.inner(Q, within=S.whole))
    inv = phi.inverse()
    N = frozenset(g for g in S.normalizer(P) if inv.compose(Hom.conjugation(S, g, P)).compose(phi) in aut_SQ)
    return ExtensionControl(phi, N)


# -- normalization -------------------------------------------------------

def is_fully_order_normalized(F: FusionSystem, P: frozenset) -> bool:
    mine = F.order_pair(F.S.normalizer(P))
    return all(mine >= F.order_pair(F.S.normalizer(Q)) for Q in F.orbit(P))


def is_fully_order_centralized(F: FusionSystem, P: frozenset) -> bool:
    mine = F.order_pair(F.S.centralizer(P))
    return all(mine >= F.order_pair(F.S.centralizer(Q)) for Q in F.orbit(P))


def normalization_witness(F: FusionSystem, P: frozenset) -> frozenset | None:
    """A conjugate of ``P`` with a strictly larger normalizer, if any."""
    mine = F.order_pair(F.S.normalizer(P))
    for Q in F.orbit(P):
        if F.order_pair(F.S.normalizer(Q)) > mine:
            return Q
    return None


# -- closure and saturation ---------------------------------------------

def check_closure(F: FusionSystem) -> Report:
    rep = Report("fusion table closure")
    S = F.S
    bad = next((P for P in F.family if Hom.identity(P) not in F._iso.get((P, P), ())), None)
    rep.add("identities present", bad is None, witness=bad and sorted(bad))
    bad = None
    for P in F.family:
        for x in range(S.n):
            c = Hom.conjugation(S, x, P)
            if c.image in F.fam_set and not F.contains(c):
                bad = c
                break
        if bad:
            break
    rep.add("conjugations by S present", bad is None, witness=bad and bad.show(S))
    bad = None
    for phi in F.all_isos():
        if not F.contains(phi.inverse()):
            bad = phi
            break
    rep.add("closed under inverses", bad is None, witness=bad and bad.show(S))
    bad = None
    for (P, Q), homs in sorted(F._iso.items(), key=lambda kv: (subgroup_key(kv[0][0]), subgroup_key(kv[0][1]))):
        for (Q2, R), homs2 in F._iso.items():
            if Q2 != Q:
                continue
            have = F._iso.get((P, R), frozenset())
            for a in homs:
                for b in homs2:
                    if a.compose(b) not in have:
                        bad = (a, b)
                        break
                if bad:
                    break
            if bad:
                break
        if bad:
            break
    rep.add("closed under composition", bad is None, witness=bad and f"{bad[0].show(S)} then {bad[1].show(S)}")
    bad = None
    for phi in F.all_isos():
        for P0 in F.family:
            if P0 < phi.source:
                r = phi.restrict(P0)
                if r.image in F.fam_set and not F.contains(r):
                    bad = r
                    break
        if bad:
            break
    rep.add("closed under restriction", bad is None, witness=bad and bad.show(S))
    return rep


def check_saturation_I(F: FusionSystem) -> Report:
    rep = Report("saturation (I)")
    S = F.S
    finite_ok = True
    bad_cent = None
    bad_syl = None
    examined = 0
    for P in F.family:
        aut = F.aut(P)
        if not aut:
            finite_ok = False
            continue
        if not is_fully_order_normalized(F, P):
            continue
        examined += 1
        if bad_cent is None and not is_fully_order_centralized(F, P):
            bad_cent = sorted(P)
        O = out_group(F, P)
        index = O.order // O.order_S
        if bad_syl is None and (O.order % O.order_S or index % F.p == 0):
            bad_syl = (sorted(P), f"|Out_F|={O.order}, |Out_S|={O.order_S}")
    rep.add("Out_F(P) finite", finite_ok, f"{len(F.family)} subgroups")
    rep.add("fully order-normalized implies fully order-centralized", bad_cent is None, f"{examined} fully order-normalized subgroups", bad_cent)
    rep.add("Out_S(P) is Sylow in Out_F(P)", bad_syl is None, witness=bad_syl)
    return rep


def extensions(F: FusionSystem, phi: Hom, N: frozenset) -> list[Hom]:
    """F-homomorphisms ``N -> S`` restricting to ``phi``."""
    if N not in F.fam_set:
        raise LookupError("overgroup lies outside the working family")
    P = phi.source
    return [h for h in F.homs(N, F.S.whole) if h.restrict(P) == phi]


def check_saturation_II(F: FusionSystem) -> Report:
    rep = Report("saturation (II)")
    S = F.S
    bad = None
    count = 0
    skipped = 0
    for P in F.family:
        for phi in F.homs(P, S.whole):
            if not is_fully_order_centralized(F, phi.image):
                continue
            ctl = extension_control(F, phi)
            count += 1
            try:
                ext = extensions(F, phi, ctl.N_phi)
            except LookupError:
                skipped += 1
                continue
            if not ext:
                bad = phi
                break
        if bad:
            break
    ok = False if bad else (None if skipped else True)
    detail = f"{count} maps examined" + (f", {skipped} with N_phi outside the family" if skipped else "")
    rep.add("every map into a fully order-centralized image extends over N_phi", ok, detail, bad and bad.show(S))
    return rep


def saturation_III(F: FusionSystem, chain: Sequence[frozenset], maps: Sequence[Hom]) -> bool | None:
    """Membership of the union map for an increasing chain with compatible maps.

    Returns None when the truncation cannot determine the union: the chain
    has more than one member but neither repeats its last member, nor
    reaches a torus-containing subgroup, nor reaches ``S``.
    """
    chain = [frozenset(P) for P in chain]
    if not chain or len(chain) != len(maps):
        raise ValueError("chain and maps must be nonempty and of equal length")
    for a, b in zip(chain, chain[1:]):
        if not a <= b:
            raise ValueError("chain is not increasing")
    for P, phi in zip(chain, maps):
        if phi.source != P:
            raise ValueError("map domain does not match chain member")
    for i in range(len(chain) - 1):
        if maps[i + 1].restrict(chain[i]) != maps[i]:
            raise ValueError("maps are not compatible under restriction")
    last = chain[-1]
    stable = len(chain) == 1 or chain[-2] == last or last == F.S.whole or F.S.rank_of(last) > 0
    if not all(P in F.fam_set and phi.image in F.fam_set for P, phi in zip(chain, maps)):
        return None
    if not all(F.contains_hom(phi) for phi in maps[:-1]):
        raise ValueError("a chain map is not in F")
    if not stable:
        return None
    return F.contains_hom(maps[-1])


def check_saturation_III(F: FusionSystem) -> Report:
    """Every maximal chain of subgroups ending at ``Q`` with restrictions of ``phi``."""
    rep = Report("saturation (III)")
    results = []
    outside = 0
    for Q in F.family:
        chain = _maximal_chain(F, Q)
        for phi in F.homs(Q, F.S.whole):
            try:
                results.append(saturation_III(F, chain, [phi.restrict(P) for P in chain]))
            except ValueError:
                # a restriction missing from the table is a closure failure, reported there
                outside += 1
    n_true = sum(r is True for r in results)
    n_none = sum(r is None for r in results)
    ok = False if any(r is False for r in results) else True
    detail = f"{n_true} determined, {n_none} not determined at this truncation"
    if outside:
        detail += f", {outside} chains with restrictions outside F"
    rep.add("unions of compatible chains stay in F", ok, detail)
    return rep


def _maximal_chain(F: FusionSystem, Q: frozenset) -> list[frozenset]:
    below = [P for P in F.family if P <= Q]
    chain = [below[0]]
    while chain[-1] != Q:
        nxt = [P for P in below if chain[-1] < P]
        chain.append(nxt[0])
    # repeating the last member records that the chain has stabilized
    chain.append(Q)
    return chain


# -- centrics ---------------------------------------------------------

def is_centric(F: FusionSystem, P: frozenset) -> bool:
    S = F.S
    return all(S.centralizer(Q) <= Q for Q in F.orbit(P))


def centrics(F: FusionSystem) -> list[frozenset]:
    return [P for P in F.family if is_centric(F, P)]


def is_radical(F: FusionSystem, P: frozenset) -> bool:
    return op_of_aut(F, P) == set(F.inner(P))


def centric_radicals(F: FusionSystem) -> list[frozenset]:
    return [P for P in centrics(F) if is_radical(F, P)]


# -- fully normalized consequences --------------------------------------

def receives_normalizers(F: FusionSystem, P: frozenset) -> bool | None:
    """Every conjugate ``Q`` admits ``N_S(Q) -> N_S(P)`` in F carrying ``Q`` to ``P``."""
    S = F.S
    NP = S.normalizer(P)
    for Q in F.orbit(P):
        NQ = S.normalizer(Q)
        if NQ not in F.fam_set:
            return None
        if not any(h.apply(Q) == P and h.image <= NP for h in F.homs(NQ, S.whole)):
            return False
    return True


def normal_core(F: FusionSystem, P: frozenset) -> frozenset:
    """Largest ``R`` between ``P`` and ``N_S(P)`` that is normal in the normalizer subsystem.

    Only meaningful for centric ``P``; for small ``P`` the normalizer
    subsystem can have a core that strong closure, not tested here, cuts down.

    ``R`` must satisfy ``Aut_R(P) <= O_p(Aut_F(P))``, be normal in
    ``N_S(P)``, and be carried to itself by every extension of an
    F-automorphism of ``P`` that is defined on it.
    """
    S = F.S
    N = S.normalizer(P)
    opa = op_of_aut(F, P)
    exts = []
    for alpha in F.aut(P):
        ctl = extension_control(F, alpha)
        if ctl.N_phi in F.fam_set:
            exts.extend(extensions(F, alpha, ctl.N_phi))
    best = P
    for R in F.family:
        if not (P <= R <= N) or len(R) <= len(best):
            continue
        if not set(F.inner(P, within=R)) <= opa:
            continue
        if not S.is_normal(R, within=N):
            continue
        if all(h.apply(R) == R for h in exts if R <= h.source):
            best = R
    return best


def check_fully_normalized_consequences(F: FusionSystem) -> Report:
    rep = Report("fully normalized subgroups")
    bad_a = None
    bad_b = None
    undetermined = 0
    undetermined_b = 0
    for P in F.family:
        fon = is_fully_order_normalized(F, P)
        rec = receives_normalizers(F, P)
        if rec is None:
            undetermined += 1
        elif rec != fon and bad_a is None:
            bad_a = (sorted(P), f"order-normalized={fon}, receives normalizers={rec}")
        if not fon or not is_centric(F, P):
            continue
        if F.S.normalizer(P) not in F.fam_set:
            undetermined_b += 1
            continue
        lhs = is_radical(F, P)
        rhs = normal_core(F, P) == P
        if lhs != rhs and bad_b is None:
            bad_b = (sorted(P), f"Inn=O_p(Aut)={lhs}, P=O_p(N_F(P))={rhs}")
    ok_a = False if bad_a else (None if undetermined else True)
    rep.add("maximal normalizer order iff fully order-normalized", ok_a, f"{undetermined} undetermined" if undetermined else "", bad_a)
    ok_b = False if bad_b else (None if undetermined_b else True)
    rep.add("Inn(P)=O_p(Aut_F(P)) iff P=O_p(N_F(P)) for centric P", ok_b, f"{undetermined_b} undetermined" if undetermined_b else "", bad_b)
    return rep


def torus_extension_property(F: FusionSystem) -> Report:
    rep = Report("torus extension")
    S = F.S
    T = getattr(S, "torus_set", None)
    if T is None or S.rank_of(S.whole) == 0:
        rep.add("isomorphisms between torus subgroups extend to the torus", True, "rank 0: vacuous")
        return rep
    if T not in F.fam_set:
        rep.add("isomorphisms between torus subgroups extend to the torus", None, "torus outside the family")
        return rep
    autT = F.aut(T)
    bad = None
    count = 0
    for R in F.family:
        if not R <= T:
            continue
        for R2 in F.orbit(R):
            for alpha in F.isos(R, R2):
                count += 1
                if not R2 <= T or not any(b.restrict(R) == alpha for b in autT):
                    bad = alpha
                    break
            if bad:
                break
        if bad:
            break
    rep.add("isomorphisms between torus subgroups extend to the torus", bad is None, f"{count} isomorphisms", bad and bad.show(S))
    return rep


def saturation_report(F: FusionSystem) -> Report:
    rep = Report(f"order saturation of {F.name}" if F.name else "order saturation")
    rep.extend(check_closure(F))
    rep.extend(check_saturation_I(F))
    rep.extend(check_saturation_II(F))
    rep.extend(check_saturation_III(F))
    return rep
