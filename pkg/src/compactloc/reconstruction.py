"""Rebuilding a locality from a transporter system.

The carrier is the set of classes of T-isomorphisms under the equivalence
generated by extension (``phi`` extends ``alpha`` when the square of
inclusions commutes).  Each class has a unique maximal member; a word of
classes is defined when representatives compose along a chain of objects,
and its product is the class of the composite.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

from .finite import FiniteGroup, extend_homomorphism, subgroup_key
from .fusion import FusionSystem, Hom
from .partial_group import Locality, UndefinedProduct, iter_domain_words, s_g
from .report import Report
from .transporter import TransporterSystem, restrict_morphism


class ReconstructionError(ValueError):
    """The input violates a property every transporter system has."""


# -- bullet data --------------------------------------------------------

@dataclass
class BulletData:
    """A closure ``P -> P*`` on objects with an action on morphisms."""

    bullet_map: dict[frozenset, frozenset]
    functor_action: dict[int, int]

    @classmethod
    def identity(cls, T: TransporterSystem) -> "BulletData":
        return cls({P: P for P in T.objects}, {m: m for m in range(T.n_morphisms)})

    def validate(self, T: TransporterSystem, F: FusionSystem | None = None) -> Report:
        rep = Report("bullet data")
        S = T.S
        b = self.bullet_map
        objs = set(T.objects)
        missing = [P for P in T.objects if P not in b or b[P] not in objs]
        rep.add("defined on every object with object values", not missing, witness=missing and sorted(missing[0]))
        if missing:
            return rep
        images = {b[P] for P in T.objects}
        bad = None
        if F is not None:
            for Q in images:
                for R in F.orbit(Q) if Q in F.fam_set else [Q]:
                    if R in objs and R not in images:
                        bad = sorted(R)
        for Q in images:
            for x in range(S.n):
                R = S.conjugate(Q, x)
                if R in objs and R not in images:
                    bad = sorted(R)
        rep.add("image family invariant under conjugation", bad is None, f"{len(images)} images", bad)
        bad = next(((sorted(P), sorted(Q)) for P in T.objects for Q in T.objects if P <= Q and not b[P] <= b[Q]), None)
        rep.add("monotone", bad is None, witness=bad)
        bad = next((sorted(P) for P in T.objects if b[b[P]] != b[P]), None)
        rep.add("idempotent", bad is None, witness=bad)
        bad = None
        for P in T.objects:
            for Q in T.objects:
                if not S.transporter(P, Q) <= S.transporter(b[P], b[Q]):
                    bad = (sorted(P), sorted(Q))
        rep.add("N_S(P,Q) inside N_S(P*,Q*)", bad is None, witness=bad)
        fa = self.functor_action
        bad = None
        for m in range(T.n_morphisms):
            n = fa.get(m)
            if n is None or T.source(n) != b[T.source(m)] or T.target(n) != b[T.target(m)]:
                bad = ("objects", T.show(m))
                break
            if not extends(T, m, n):
                bad = ("extension", T.show(m))
                break
            if b[T.source(m)] == T.source(m) and b[T.target(m)] == T.target(m) and n != m:
                bad = ("identity on closed objects", T.show(m))
                break
        if bad is None:
            for (a, c), d in T.comp.items():
                if fa[d] != T.comp.get((fa[a], fa[c])):
                    bad = ("functor", T.show(a), T.show(c))
                    break
        rep.add("functor extending each morphism", bad is None, witness=bad)
        return rep


# -- extension relation ---------------------------------------------------

def extends(T: TransporterSystem, a: int, b: int) -> bool:
    """``a ↑ b``: ``b`` is an extension of ``a``."""
    P, Q = T.source(a), T.target(a)
    P2, Q2 = T.source(b), T.target(b)
    if not (P <= P2 and Q <= Q2):
        raise ValueError("objects are not nested")
    return T.comp[(T.inclusion(P, P2), b)] == T.comp[(a, T.inclusion(Q, Q2))]


@dataclass
class UpPoset:
    nodes: list[int]
    up: dict[int, list[int]]

    def maximal_above(self, a: int) -> list[int]:
        above = self.up[a]
        return [b for b in above if all(c == b for c in self.up[b])]


def up_poset(T: TransporterSystem) -> UpPoset:
    nodes = T.isomorphisms()
    up = {a: [] for a in nodes}
    for a in nodes:
        P, Q = T.source(a), T.target(a)
        for b in nodes:
            if P <= T.source(b) and Q <= T.target(b) and extends(T, a, b):
                up[a].append(b)
    return UpPoset(nodes, up)


def up_maximal(T: TransporterSystem, a: int, poset: UpPoset | None = None) -> int:
    poset = up_poset(T) if poset is None else poset
    top = poset.maximal_above(a)
    if len(top) != 1:
        raise ReconstructionError(f"{T.show(a)} has {len(top)} maximal extensions")
    return top[0]


@dataclass
class IsoClass:
    members: list[int]
    maximal: int


def equivalence_classes(T: TransporterSystem, poset: UpPoset | None = None) -> list[IsoClass]:
    poset = up_poset(T) if poset is None else poset
    parent = {a: a for a in poset.nodes}

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for a, ups in poset.up.items():
        for b in ups:
            ra, rb = find(a), find(b)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    groups: dict[int, list[int]] = {}
    for a in poset.nodes:
        groups.setdefault(find(a), []).append(a)
    out = []
    for _, members in sorted(groups.items()):
        tops = {up_maximal(T, a, poset) for a in members}
        if len(tops) != 1:
            raise ReconstructionError("class has more than one maximal member")
        pairs = [(T.src[a], T.tgt[a]) for a in members]
        if len(set(pairs)) != len(pairs):
            raise ReconstructionError("class has two members between the same objects")
        out.append(IsoClass(sorted(members), tops.pop()))
    return out


# -- the rebuilt partial group ------------------------------------------

class ReconstructedLocality(Locality):
    """``Iso(T)`` modulo extension, with chain-defined domain and product."""

    def __init__(self, T: TransporterSystem, classes: list[IsoClass], bullet: BulletData, name: str = ""):
        self.T = T
        self.classes = classes
        self.bullet = bullet
        self.class_of = {m: i for i, c in enumerate(classes) for m in c.members}
        self.member_from = {}
        for i, c in enumerate(classes):
            for m in c.members:
                key = (i, T.src[m])
                if key in self.member_from:
                    raise ReconstructionError("class has two members on one source object")
                self.member_from[key] = m
        Sw = T.S.whole
        if Sw not in T.obj_index:
            raise ReconstructionError("S is not an object")
        unit = self.class_of[T.identity(Sw)]
        inverse = [self.class_of[T.inverse(c.maximal)] for c in classes]
        s_handles = [self.class_of[T.epsilon(Sw, Sw, x)] for x in range(T.S.n)]
        labels = [_class_label(T, c) for c in classes]
        super().__init__(len(classes), unit, inverse, T.S, s_handles, T.objects, T.p, labels, name or f"L({T.name})")
        self._chains: dict[tuple, tuple | None] = {}

    def chain(self, w) -> tuple | None:
        """One witnessing object chain (as object indices) and its morphisms."""
        w = tuple(w)
        if w in self._chains:
            return self._chains[w]
        found = None
        for start in range(len(self.T.objects)):
            cur = start
            ms = []
            for f in w:
                m = self.member_from.get((f, cur))
                if m is None:
                    break
                ms.append(m)
                cur = self.T.tgt[m]
            else:
                found = (start, tuple(ms))
                break
        self._chains[w] = found
        return found

    def all_chains(self, w) -> list[tuple]:
        out = []
        for start in range(len(self.T.objects)):
            cur = start
            ms = []
            for f in w:
                m = self.member_from.get((f, cur))
                if m is None:
                    break
                ms.append(m)
                cur = self.T.tgt[m]
            else:
                out.append((start, tuple(ms)))
        return out

    def in_domain(self, w) -> bool:
        return self.chain(w) is not None

    def _compose(self, ms) -> int:
        acc = ms[0]
        for m in ms[1:]:
            acc = self.T.comp[(acc, m)]
        return acc

    def _product(self, w) -> int:
        c = self.chain(w)
        if c is None:
            raise UndefinedProduct("word is not in D")
        return self.class_of[self._compose(c[1])]


def _class_label(T: TransporterSystem, c: IsoClass) -> str:
    lab = T.labels[c.maximal]
    if isinstance(lab, tuple) and len(lab) == 3 and isinstance(lab[0], str):
        return lab[0]
    return f"[{T.show(c.maximal)}]"


def build_partial_group(T: TransporterSystem, bullet: BulletData | None = None) -> ReconstructedLocality:
    bullet = BulletData.identity(T) if bullet is None else bullet
    poset = up_poset(T)
    classes = equivalence_classes(T, poset)
    L = ReconstructedLocality(T, classes, bullet)
    L.poset = poset
    return L


def conjugation_domain(L: ReconstructedLocality, f: int) -> frozenset:
    """``S_f`` read off the maximal member, checked against conjugation in L."""
    T = L.T
    phi = L.classes[f].maximal
    P = T.source(phi)
    finv = L.inverse(f)
    Q = set()
    conj = {}
    for x in P:
        w = (finv, L.s_handles[x], f)
        if not L.in_domain(w):
            raise ReconstructionError("conjugation word is not in D")
        y = L.product(w)
        if y not in L.handle_to_s:
            raise ReconstructionError("conjugate leaves S")
        conj[x] = L.handle_to_s[y]
        Q.add(conj[x])
    Q = frozenset(Q)
    if Q not in T.obj_index:
        raise ReconstructionError("image of the conjugation domain is not an object")
    psi = L.member_from.get((f, T.obj_index[P]))
    if psi is None or T.target(psi) != Q or T.rho[psi] != Hom.from_dict(conj):
        raise ReconstructionError("no member of the class realizes the conjugation map")
    return P


# -- invariant checks ---------------------------------------------------

def check_reconstruction(L: ReconstructedLocality, max_len: int = 3) -> Report:
    T = L.T
    poset = getattr(L, "poset", None) or up_poset(T)
    up = poset.up
    nodes = poset.nodes
    rep = Report("reconstruction invariants")
    upset = {a: set(v) for a, v in up.items()}
    bad = next((a for a in nodes if a not in upset[a]), None)
    if bad is None:
        bad = next(((a, b) for a in nodes for b in up[a] if a != b and a in upset[b]), None)
    if bad is None:
        bad = next(((a, b, c) for a in nodes for b in up[a] for c in up[b] if c not in upset[a]), None)
    rep.add("extension is a partial order", bad is None, f"{len(nodes)} isomorphisms", bad)
    bad = None
    count = 0
    for a in nodes:
        for b in nodes:
            if T.tgt[a] != T.src[b]:
                continue
            ab = T.comp[(a, b)]
            for a2 in up[a]:
                for b2 in up[b]:
                    if T.tgt[a2] != T.src[b2]:
                        continue
                    count += 1
                    if T.comp[(a2, b2)] not in upset[ab]:
                        bad = (T.show(a), T.show(b))
                        break
                if bad:
                    break
            if bad:
                break
        if bad:
            break
    rep.add("extension respects composition", bad is None, f"{count} pairs", bad)
    bad = None
    for a0 in nodes:
        for a, b in itertools.combinations(up[a0], 2):
            if (T.src[a] == T.src[b] or T.tgt[a] == T.tgt[b]) and a != b:
                bad = ("equal ends", T.show(a0), T.show(a), T.show(b))
                break
            X = T.source(a) & T.source(b)
            Y = T.target(a) & T.target(b)
            cands = [c for c in up[a0] if T.source(c) == X and T.target(c) == Y and a in upset[c] and b in upset[c]]
            if len(cands) != 1:
                bad = ("intersection", T.show(a0), T.show(a), T.show(b))
                break
        if bad:
            break
    kind = bad[0] if bad else None
    rep.add("extensions of a common isomorphism are determined by either end", kind != "equal ends", witness=bad if kind == "equal ends" else None)
    rep.add("extensions meet in a unique intersection extension", kind != "intersection", witness=bad if kind == "intersection" else None)
    bad = None
    for i, c in enumerate(L.classes):
        if any(c.maximal not in upset[m] for m in c.members):
            bad = ("not below maximal", i)
            break
        inv = T.inverse(c.maximal)
        j = L.class_of[inv]
        if L.classes[j].maximal != inv:
            bad = ("inverse not maximal", i)
            break
    rep.add("each class lies below its maximal member, and inverses of maximal members are maximal", bad is None, f"{len(L.classes)} classes", bad)
    b = L.bullet.bullet_map
    bad = next((i for i, c in enumerate(L.classes) if b[T.source(c.maximal)] != T.source(c.maximal) or b[T.target(c.maximal)] != T.target(c.maximal)), None)
    rep.add("maximal members lie between closed objects", bad is None, witness=bad)
    bad = None
    for c in L.classes:
        pairs = [(T.src[m], T.tgt[m]) for m in c.members]
        if len(set(pairs)) != len(pairs):
            bad = T.show(c.maximal)
    rep.add("at most one member per pair of objects", bad is None, witness=bad)
    Sw = T.S.whole
    S = T.S
    bad = None
    for x in range(S.n):
        cls = set(L.classes[L.class_of[T.epsilon(Sw, Sw, x)]].members)
        want = {T.epsilon(P, Q, x) for P in T.objects for Q in T.objects if S.conjugate(P, x) == Q}
        if cls != want or L.classes[L.class_of[T.epsilon(Sw, Sw, x)]].maximal != T.epsilon(Sw, Sw, x):
            bad = S.labels[x]
            break
    rep.add("class of eps_S(x) is every eps_{P,P^x}(x)", bad is None, witness=bad)
    ok = set(L.classes[L.unit].members) == {T.identity(P) for P in T.objects}
    rep.add("class of the identity is every identity morphism", ok)
    rep.extend(check_maximal_squares(L))
    bad = None
    count = 0
    for w in iter_domain_words(L, max_len):
        if not w:
            continue
        prods = {L.class_of[L._compose(ms)] for _, ms in L.all_chains(w)}
        count += 1
        if len(prods) != 1:
            bad = L.show(w)
            break
    rep.add("product independent of the chain", bad is None, f"{count} words", bad)
    bad = None
    for f in L.handles:
        try:
            P = conjugation_domain(L, f)
        except ReconstructionError as exc:
            bad = (L.label(f), str(exc))
            break
        if P != s_g(L, f):
            bad = (L.label(f), "conjugation domain differs from S_f")
            break
    rep.add("conjugation domains are realized by class members", bad is None, witness=bad)
    return rep


def check_maximal_squares(L: ReconstructedLocality) -> Report:
    """Commuting squares against maximal members force ``x`` into the domain."""
    T = L.T
    S = T.S
    rep = Report("maximal squares")
    bad = None
    count = 0
    skipped = 0
    for c in L.classes:
        phi = c.maximal
        Z = T.source(phi)
        rho = T.rho[phi]
        restr = {}
        for X in T.objects:
            if not X <= Z:
                continue
            U = rho.apply(X)
            if U not in T.obj_index:
                # only possible when the object set is cut off by a truncation
                skipped += 1
                continue
            restr[X] = (U, restrict_morphism(T, phi, X, U))
        objs = list(restr)
        for X in objs:
            U, phiX = restr[X]
            for Y in objs:
                V, phiY = restr[Y]
                xs = S.transporter(X, Y)
                x2s = S.transporter(U, V)
                for x in xs:
                    left = T.comp[(T.epsilon(X, Y, x), phiY)]
                    for x2 in x2s:
                        count += 1
                        if T.comp[(phiX, T.epsilon(U, V, x2))] == left:
                            if x not in Z or rho(x) != x2:
                                bad = (T.show(phi), S.labels[x], S.labels[x2])
                                break
                    if bad:
                        break
                if bad:
                    break
            if bad:
                break
        if bad:
            break
    detail = f"{count} squares" + (f", {skipped} restrictions leave the object set" if skipped else "")
    rep.add("commuting squares against maximal members", bad is None, detail, bad)
    return rep


# -- round trip ---------------------------------------------------------

@dataclass
class RoundTrip:
    phi: list[int]
    report: Report


def roundtrip_phi(L: Locality, Lr: ReconstructedLocality, max_len: int = 3) -> RoundTrip:
    """``g -> [(g, S_g, S_{g^-1})]`` checked as an isomorphism fixing ``S``."""
    T = Lr.T
    rep = Report("round trip")
    triples = getattr(T, "triples", None)
    if triples is None:
        rep.add("transporter system was built from the locality", False)
        return RoundTrip([], rep)
    phi = []
    obstruction = None
    for g in L.handles:
        P, Q = s_g(L, g), s_g(L, L.inverse(g))
        if P not in T.obj_index or Q not in T.obj_index:
            obstruction = (L.label(g), "S_g or S_g^-1 is not an object")
            break
        phi.append(Lr.class_of[triples[(g, T.obj_index[P], T.obj_index[Q])]])
    rep.add("S_g and S_g^-1 are objects", obstruction is None, witness=obstruction)
    if obstruction:
        return RoundTrip([], rep)
    rep.add("Phi is a bijection", sorted(phi) == list(range(Lr.size)) and L.size == Lr.size, f"{L.size} -> {Lr.size}")
    rep.add("Phi(1) = 1", phi[L.unit] == Lr.unit)
    rep.add("Phi is the identity on S", all(phi[L.s_handles[x]] == Lr.s_handles[x] for x in range(L.S.n)))
    rep.add("Phi commutes with inversion", all(phi[L.inverse(g)] == Lr.inverse(phi[g]) for g in L.handles))
    if sorted(phi) == list(range(Lr.size)):
        rep.extend(verify_isomorphism(L, Lr, phi, max_len), prefix="")
    return RoundTrip(phi, rep)


def verify_isomorphism(L: Locality, L2: Locality, alpha: list[int], max_len: int = 3) -> Report:
    """``alpha`` preserves and reflects D and intertwines the products on short words."""
    rep = Report("partial group isomorphism")
    bad = None
    count = 0
    stack = [()]
    while stack and bad is None:
        w = stack.pop()
        if len(w) == max_len:
            continue
        for g in L.handles:
            v = w + (g,)
            v2 = tuple(alpha[h] for h in v)
            count += 1
            d1 = L.in_domain(v)
            if d1 != L2.in_domain(v2):
                bad = ("domain", L.show(v))
                break
            if d1:
                if alpha[L.product(v)] != L2.product(v2):
                    bad = ("product", L.show(v))
                    break
            stack.append(v)
    rep.add(f"D and products match on all words up to length {max_len}", bad is None, f"{count} words", bad)
    return rep


# -- orbit category and the center functor ------------------------------

@dataclass
class OrbitCategory:
    objects: list[frozenset]
    mor: dict[tuple[int, int], list[frozenset]]
    S: FiniteGroup

    def __post_init__(self):
        self._cosets: dict[tuple[Hom, frozenset], frozenset] = {}

    def coset(self, phi: Hom, Q: frozenset) -> frozenset:
        key = (phi, Q)
        c = self._cosets.get(key)
        if c is None:
            conj = self.S.conj
            c = frozenset(Hom(phi.domain, tuple(conj(y, x) for y in phi.images)) for x in Q)
            for h in c:
                self._cosets[(h, Q)] = c
        return c

    def compose(self, a: frozenset, b: frozenset, target: frozenset, check: bool = False) -> frozenset:
        """``[phi] [psi] = [phi psi]`` for ``[psi]`` ending at ``target``.

        With ``check`` every pair of representatives is composed, and a
        change of coset raises.
        """
        if not check:
            phi = min(a, key=lambda h: h.images)
            psi = min(b, key=lambda h: h.images)
            return self.coset(phi.compose(psi), target)
        cosets = {self.coset(phi.compose(psi), target) for phi in a for psi in b}
        if len(cosets) != 1:
            raise ValueError("composition is not well defined")
        return cosets.pop()


def orbit_category(F: FusionSystem, objects: Iterable[frozenset]) -> OrbitCategory:
    objects = sorted(objects, key=subgroup_key)
    O = OrbitCategory(objects, {}, F.S)
    for i, P in enumerate(objects):
        for j, Q in enumerate(objects):
            cosets = {O.coset(phi, Q) for phi in F.homs(P, Q)}
            O.mor[(i, j)] = sorted(cosets, key=lambda c: min(h.images for h in c))
    return O


def check_orbit_category(O: OrbitCategory) -> Report:
    rep = Report("orbit category")
    bad = None
    count = 0
    n = len(O.objects)
    for i, j, k in itertools.product(range(n), repeat=3):
        for a in O.mor[(i, j)]:
            for b in O.mor[(j, k)]:
                count += 1
                try:
                    c = O.compose(a, b, O.objects[k], check=True)
                except ValueError:
                    bad = (i, j, k)
                    break
                if c not in O.mor[(i, k)]:
                    bad = (i, j, k)
                    break
            if bad:
                break
        if bad:
            break
    rep.add("composition of cosets is well defined", bad is None, f"{count} pairs", bad)
    return rep


def z_functor(O: OrbitCategory) -> dict[tuple[int, int, int], dict[int, int]]:
    """For ``[phi]: P -> Q`` the map ``Z(Q) -> Z(P)``, ``z -> phi^-1(z)``."""
    S = O.S
    out = {}
    for (i, j), ms in O.mor.items():
        P, Q = O.objects[i], O.objects[j]
        ZQ = sorted(S.center(Q))
        for k, coset in enumerate(ms):
            maps = set()
            for phi in coset:
                inv = phi.inverse().as_dict()
                if not set(ZQ) <= phi.image:
                    raise ValueError("Z(Q) does not lie in the image; objects must be centric")
                maps.add(tuple((z, inv[z]) for z in ZQ))
            if len(maps) != 1:
                raise ValueError("center functor is not well defined on a coset")
            out[(i, j, k)] = dict(maps.pop())
    return out


def check_z_functor(O: OrbitCategory) -> Report:
    rep = Report("center functor")
    S = O.S
    try:
        Z = z_functor(O)
    except ValueError as exc:
        rep.add("well defined on cosets", False, str(exc))
        return rep
    rep.add("well defined on cosets", True, f"{len(Z)} morphisms")
    bad = None
    for (i, j, k), m in Z.items():
        P = O.objects[i]
        if set(m.values()) - S.center(P):
            bad = (i, j, k)
            break
        if any(S.mul(m[a], m[b]) != m[S.mul(a, b)] for a in m for b in m):
            bad = (i, j, k)
            break
    rep.add("lands in Z(P) as a homomorphism", bad is None, witness=bad)
    bad = None
    index = {(i, j, c): k for (i, j), ms in O.mor.items() for k, c in enumerate(ms)}
    n = len(O.objects)
    for i, j, l in itertools.product(range(n), repeat=3):
        for a_i, a in enumerate(O.mor[(i, j)]):
            for b_i, b in enumerate(O.mor[(j, l)]):
                c = O.compose(a, b, O.objects[l])
                zc = Z[(i, l, index[(i, l, c)])]
                za, zb = Z[(i, j, a_i)], Z[(j, l, b_i)]
                if any(za[zb[z]] != zc[z] for z in zc):
                    bad = (i, j, l)
                    break
            if bad:
                break
        if bad:
            break
    rep.add("contravariant functor", bad is None, witness=bad)
    return rep


def sigma(T: TransporterSystem, O: OrbitCategory) -> dict[int, frozenset]:
    """The projection ``T -> O``: a morphism goes to the coset of ``rho``."""
    return {m: O.coset(T.rho[m], T.target(m)) for m in range(T.n_morphisms)}


def check_sigma(T: TransporterSystem, O: OrbitCategory) -> Report:
    rep = Report("projection to the orbit category")
    sg = sigma(T, O)
    idx = {P: i for i, P in enumerate(O.objects)}
    bad = next((T.show(m) for m, c in sg.items() if c not in O.mor[(idx[T.source(m)], idx[T.target(m)])]), None)
    rep.add("images are orbit-category morphisms", bad is None, witness=bad)
    bad = next(((T.show(a), T.show(b)) for (a, b), c in T.comp.items() if O.compose(sg[a], sg[b], T.target(c)) != sg[c]), None)
    rep.add("functor", bad is None, witness=bad)
    return rep


# -- isomorphism search -------------------------------------------------

@dataclass
class IsoSearch:
    status: str  # "found", "none", "inconclusive"
    mapping: list[int] | None = None
    nodes: int = 0


def _automorphisms_fixing(S: FiniteGroup, fixed: list[frozenset]) -> list[dict[int, int]]:
    gens = S.generating_set(S.whole)
    cands = [[y for y in range(S.n) if S.element_order(y) == S.element_order(g)] for g in gens]
    out = []
    for images in itertools.product(*cands):
        phi = extend_homomorphism(S, gens, list(images))
        if phi is None or len(set(phi.values())) != S.n:
            continue
        if all(frozenset(phi[x] for x in P) == P for P in fixed):
            out.append(phi)
    out.sort(key=lambda m: [m[x] for x in range(S.n)])
    return out


def locality_isomorphism_search(L: Locality, L2: Locality, fixed: list[frozenset] | None = None, budget: int = 100000, max_len: int = 3) -> IsoSearch:
    """Backtracking search for an isomorphism ``L -> L2`` fixing the given objects.

    Both localities must share the group ``S`` (same indices) and the object set.
    """
    if L.size != L2.size or L.S.n != L2.S.n or set(L.delta) != set(L2.delta):
        return IsoSearch("none")
    fixed = list(L.delta) if fixed is None else fixed
    nodes = 0
    conj1 = {g: L.conj_map(g) for g in L.handles}
    conj2 = {g: L2.conj_map(g) for g in L2.handles}
    pair1 = {(a, b) for a in L.handles for b in L.handles if L.in_domain((a, b))}
    for sigma_S in _automorphisms_fixing(L.S, fixed):
        alpha = {L.s_handles[x]: L2.s_handles[sigma_S[x]] for x in range(L.S.n)}
        if len(set(alpha.values())) != len(alpha):
            continue
        rest = [g for g in L.handles if g not in alpha]

        def compatible(g, h):
            m1, m2 = conj1[g], conj2[h]
            if frozenset(sigma_S[x] for x in m1) != frozenset(m2):
                return False
            return all(sigma_S[m1[x]] == m2[sigma_S[x]] for x in m1)

        cands = {g: [h for h in L2.handles if h not in alpha.values() and compatible(g, h)] for g in rest}
        rest.sort(key=lambda g: len(cands[g]))
        used = set(alpha.values())

        def consistent(g, h):
            for a, b in alpha.items():
                for (x, y), (x2, y2) in (((g, a), (h, b)), ((a, g), (b, h))):
                    d1 = (x, y) in pair1
                    if d1 != L2.in_domain((x2, y2)):
                        return False
                    if d1:
                        p = L.product((x, y))
                        if p in alpha and alpha[p] != L2.product((x2, y2)):
                            return False
            d1 = (g, g) in pair1
            if d1 != L2.in_domain((h, h)):
                return False
            return True

        def backtrack(i):
            nonlocal nodes
            if i == len(rest):
                return True
            g = rest[i]
            for h in cands[g]:
                if h in used:
                    continue
                nodes += 1
                if nodes > budget:
                    raise TimeoutError
                if consistent(g, h):
                    alpha[g] = h
                    used.add(h)
                    if backtrack(i + 1):
                        return True
                    del alpha[g]
                    used.discard(h)
            return False

        try:
            ok = backtrack(0)
        except TimeoutError:
            return IsoSearch("inconclusive", None, nodes)
        if ok:
            mapping = [alpha[g] for g in L.handles]
            if verify_isomorphism(L, L2, mapping, max_len).ok:
                return IsoSearch("found", mapping, nodes)
    return IsoSearch("none", None, nodes)
