"""Transporter systems: categories on an object set with functors eps and rho.

Morphisms are integer ids.  Composition is written left to right, so
``compose(a, b)`` is "first ``a``, then ``b``", and ``eps`` turns an element
``x`` of ``N_S(P, Q)`` into a morphism ``P -> Q``.  A transporter system
built from a locality labels its morphisms with triples ``(g, P, Q)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable

from .finite import FiniteGroup, subgroup_key
from .fusion import FusionSystem, Hom, centrics, saturation_report, op_of_aut
from .report import Report


@dataclass
class TransporterSystem:
    S: FiniteGroup
    p: int
    objects: list[frozenset]
    src: list[int] = field(default_factory=list)
    tgt: list[int] = field(default_factory=list)
    labels: list[Hashable] = field(default_factory=list)
    rho: list[Hom] = field(default_factory=list)
    comp: dict[tuple[int, int], int] = field(default_factory=dict)
    eps: dict[tuple[int, int, int], int] = field(default_factory=dict)
    name: str = ""

    def __post_init__(self):
        self.obj_index = {P: i for i, P in enumerate(self.objects)}
        self._reindex()

    def _reindex(self):
        self.mor: dict[tuple[int, int], list[int]] = {}
        for m in range(len(self.src)):
            self.mor.setdefault((self.src[m], self.tgt[m]), []).append(m)

    # -- basic structure ----------------------------------------------
    @property
    def n_morphisms(self) -> int:
        return len(self.src)

    def hom(self, P: frozenset, Q: frozenset) -> list[int]:
        return self.mor.get((self.obj_index[P], self.obj_index[Q]), [])

    def source(self, m: int) -> frozenset:
        return self.objects[self.src[m]]

    def target(self, m: int) -> frozenset:
        return self.objects[self.tgt[m]]

    def compose(self, a: int, b: int) -> int:
        if self.tgt[a] != self.src[b]:
            raise ValueError("morphisms are not composable")
        return self.comp[(a, b)]

    def epsilon(self, P: frozenset, Q: frozenset, x: int) -> int:
        return self.eps[(self.obj_index[P], self.obj_index[Q], x)]

    def inclusion(self, P: frozenset, Q: frozenset) -> int:
        return self.epsilon(P, Q, self.S.identity)

    def identity(self, P: frozenset) -> int:
        return self.inclusion(P, P)

    def is_iso(self, m: int) -> bool:
        return self.rho[m].image == self.target(m)

    def isomorphisms(self) -> list[int]:
        return [m for m in range(self.n_morphisms) if self.is_iso(m)]

    def inverse(self, m: int) -> int:
        P, Q = self.source(m), self.target(m)
        idP, idQ = self.identity(P), self.identity(Q)
        for n in self.hom(Q, P):
            if self.comp[(m, n)] == idP and self.comp[(n, m)] == idQ:
                return n
        raise ValueError("morphism has no inverse")

    def aut(self, P: frozenset) -> list[int]:
        return self.hom(P, P)

    def kernel(self, P: frozenset) -> list[int]:
        ident = Hom.identity(P)
        return [m for m in self.aut(P) if self.rho[m] == ident]

    def fusion(self) -> FusionSystem:
        """The fusion system generated by the images of rho."""
        return FusionSystem.generated(self.S, self.p, set(self.rho), name=f"F({self.name})")

    def show(self, m: int) -> str:
        lab = self.labels[m]
        return str(lab) if lab is not None else f"#{m}"

    # -- mutations ----------------------------------------------------
    def copy(self) -> "TransporterSystem":
        return TransporterSystem(self.S, self.p, list(self.objects), list(self.src), list(self.tgt), list(self.labels), list(self.rho), dict(self.comp), dict(self.eps), self.name)

    def with_duplicate(self, m: int) -> "TransporterSystem":
        """Add a second copy of morphism ``m`` that composes exactly like ``m``."""
        T = self.copy()
        d = T.n_morphisms
        T.src.append(self.src[m])
        T.tgt.append(self.tgt[m])
        T.labels.append(("copy", self.labels[m]))
        T.rho.append(self.rho[m])
        for (a, b), c in self.comp.items():
            if a == m:
                T.comp[(d, b)] = c
            if b == m:
                T.comp[(a, d)] = c
        if (m, m) in self.comp:
            T.comp[(d, d)] = self.comp[(m, m)]
        T.name = self.name + "-dup"
        T._reindex()
        return T

    def with_rho(self, m: int, phi: Hom) -> "TransporterSystem":
        T = self.copy()
        T.rho[m] = phi
        T.name = self.name + "-rho"
        return T

    def with_composition(self, a: int, b: int, c: int) -> "TransporterSystem":
        T = self.copy()
        T.comp[(a, b)] = c
        T.name = self.name + "-comp"
        return T

    def without_object(self, P: frozenset) -> "TransporterSystem":
        """Full subcategory on the remaining objects."""
        keep_obj = [Q for Q in self.objects if Q != P]
        new_obj = {self.obj_index[Q]: i for i, Q in enumerate(keep_obj)}
        keep = [m for m in range(self.n_morphisms) if self.src[m] in new_obj and self.tgt[m] in new_obj]
        new_m = {m: i for i, m in enumerate(keep)}
        T = TransporterSystem(
            self.S, self.p, keep_obj,
            [new_obj[self.src[m]] for m in keep], [new_obj[self.tgt[m]] for m in keep],
            [self.labels[m] for m in keep], [self.rho[m] for m in keep],
            {(new_m[a], new_m[b]): new_m[c] for (a, b), c in self.comp.items() if a in new_m and b in new_m},
            {(new_obj[i], new_obj[j], x): new_m[m] for (i, j, x), m in self.eps.items() if i in new_obj and j in new_obj},
            self.name + "-sub",
        )
        return T


def transporter_from_locality(L) -> TransporterSystem:
    """Morphisms ``P -> Q`` are the triples ``(g, P, Q)`` with ``P <= S_g`` and ``P^g <= Q``."""
    objects = list(L.delta)
    T = TransporterSystem(L.S, L.p, objects, name=f"T({L.name})")
    index = {}
    conj = {g: L.conj_map(g) for g in L.handles}
    for i, P in enumerate(objects):
        for g in L.handles:
            m = conj[g]
            if not P <= frozenset(m):
                continue
            image = frozenset(m[x] for x in P)
            phi = Hom.from_dict({x: m[x] for x in P})
            for j, Q in enumerate(objects):
                if image <= Q:
                    index[(g, i, j)] = len(T.src)
                    T.src.append(i)
                    T.tgt.append(j)
                    T.labels.append((L.label(g), i, j))
                    T.rho.append(phi)
    T._reindex()
    triples = {v: k for k, v in index.items()}
    for (i, j), ms in T.mor.items():
        for k in range(len(objects)):
            for b in T.mor.get((j, k), []):
                for a in ms:
                    g = triples[a][0]
                    h = triples[b][0]
                    T.comp[(a, b)] = index[(L.product((g, h)), i, k)]
    for i, P in enumerate(objects):
        for j, Q in enumerate(objects):
            for x in L.S.transporter(P, Q):
                T.eps[(i, j, x)] = index[(L.s_handles[x], i, j)]
    T.triples = index
    return T


# -- checks -------------------------------------------------------------

def check_category(T: TransporterSystem) -> Report:
    rep = Report("category and functors")
    bad = None
    for m in range(T.n_morphisms):
        idP, idQ = T.identity(T.source(m)), T.identity(T.target(m))
        if T.comp.get((idP, m)) != m or T.comp.get((m, idQ)) != m:
            bad = T.show(m)
            break
    rep.add("identities", bad is None, witness=bad)
    missing = None
    for (i, j), ms in T.mor.items():
        for k in range(len(T.objects)):
            for a in ms:
                for b in T.mor.get((j, k), []):
                    c = T.comp.get((a, b))
                    if c is None or T.src[c] != i or T.tgt[c] != k:
                        missing = (T.show(a), T.show(b))
                        break
                if missing:
                    break
            if missing:
                break
        if missing:
            break
    rep.add("composition defined with correct endpoints", missing is None, witness=missing)
    bad = None
    if missing is None:
        count = 0
        for (i, j), ms in T.mor.items():
            for k in range(len(T.objects)):
                for l in range(len(T.objects)):
                    for a in ms:
                        for b in T.mor.get((j, k), []):
                            ab = T.comp[(a, b)]
                            for c in T.mor.get((k, l), []):
                                count += 1
                                if T.comp[(ab, c)] != T.comp[(a, T.comp[(b, c)])]:
                                    bad = (T.show(a), T.show(b), T.show(c))
                                    break
                            if bad:
                                break
                        if bad:
                            break
                    if bad:
                        break
                if bad:
                    break
            if bad:
                break
        rep.add("associativity", bad is None, f"{count} triples")
    else:
        rep.add("associativity", False, "composition table incomplete")
    bad = None
    S = T.S
    for (i, j, x), m in T.eps.items():
        for k in range(len(T.objects)):
            for y in range(S.n):
                n = T.eps.get((j, k, y))
                if n is None:
                    continue
                if T.comp.get((m, n)) != T.eps.get((i, k, S.mul(x, y))):
                    bad = (S.labels[x], S.labels[y])
                    break
            if bad:
                break
        if bad:
            break
    rep.add("eps is a functor", bad is None, witness=bad)
    bad = None
    for (a, b), c in T.comp.items():
        if T.rho[a].compose(T.rho[b]) != T.rho[c]:
            bad = (T.show(a), T.show(b))
            break
    if bad is None:
        for P in T.objects:
            if T.rho[T.identity(P)] != Hom.identity(P):
                bad = ("identity", sorted(P))
                break
    rep.add("rho is a functor", bad is None, witness=bad)
    return rep


def check_axiom_A1_A2(T: TransporterSystem) -> Report:
    rep = Report("axioms (A1) (A2)")
    bad = None
    for (i, j, x), m in T.eps.items():
        if T.src[m] != i or T.tgt[m] != j:
            bad = (sorted(T.objects[i]), sorted(T.objects[j]), T.S.labels[x])
            break
    if bad is None:
        for m in range(T.n_morphisms):
            if T.rho[m].source != T.source(m) or not T.rho[m].image <= T.target(m):
                bad = T.show(m)
                break
    rep.add("(A1) eps and rho are the identity and inclusion on objects", bad is None, witness=bad)
    bad_free = None
    bad_orbit = None
    for (i, j), ms in sorted(T.mor.items()):
        P, Q = T.objects[i], T.objects[j]
        KP, KQ = T.kernel(P), T.kernel(Q)
        fibers: dict[Hom, set] = {}
        for m in ms:
            fibers.setdefault(T.rho[m], set()).add(m)
        for m in ms:
            left = [T.comp[(k, m)] for k in KP]
            right = [T.comp[(m, k)] for k in KQ]
            if bad_free is None and (len(set(left)) != len(KP) or len(set(right)) != len(KQ)):
                bad_free = T.show(m)
            if bad_orbit is None and set(left) != fibers[T.rho[m]]:
                bad_orbit = T.show(m)
    rep.add("(A2) rho-kernels act freely on both sides", bad_free is None, witness=bad_free)
    rep.add("(A2) rho is the orbit map of the left kernel action", bad_orbit is None, witness=bad_orbit)
    return rep


def check_axiom_B_C(T: TransporterSystem) -> Report:
    rep = Report("axioms (B) (C)")
    S = T.S
    bad = None
    for i, P in enumerate(T.objects):
        for j, Q in enumerate(T.objects):
            xs = [x for x in range(S.n) if (i, j, x) in T.eps]
            if xs != sorted(S.transporter(P, Q)):
                bad = (sorted(P), sorted(Q), "eps not defined on N_S(P,Q)")
            elif len({T.eps[(i, j, x)] for x in xs}) != len(xs):
                bad = (sorted(P), sorted(Q), "eps not injective")
            if bad:
                break
        if bad:
            break
    rep.add("(B) eps_{P,Q} injective", bad is None, witness=bad)
    bad = None
    for (i, j, x), m in T.eps.items():
        if T.rho[m] != Hom.conjugation(S, x, T.objects[i]):
            bad = (sorted(T.objects[i]), S.labels[x])
            break
    rep.add("(B) rho(eps(x)) = c_x", bad is None, witness=bad)
    bad = None
    count = 0
    for m in range(T.n_morphisms):
        i, j = T.src[m], T.tgt[m]
        phi = T.rho[m].as_dict()
        for x in sorted(T.objects[i]):
            count += 1
            lhs = T.comp.get((T.eps[(i, i, x)], m))
            rhs = T.comp.get((m, T.eps.get((j, j, phi[x]), -1)))
            if lhs is None or lhs != rhs:
                bad = (T.show(m), S.labels[x])
                break
        if bad:
            break
    rep.add("(C) eps(x) then phi equals phi then eps(x rho(phi))", bad is None, f"{count} squares", bad)
    return rep


def _iso_classes(T: TransporterSystem) -> list[list[frozenset]]:
    parent = list(range(len(T.objects)))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for m in T.isomorphisms():
        a, b = find(T.src[m]), find(T.tgt[m])
        if a != b:
            parent[max(a, b)] = min(a, b)
    classes: dict[int, list] = {}
    for i, P in enumerate(T.objects):
        classes.setdefault(find(i), []).append(P)
    return [sorted(c, key=subgroup_key) for _, c in sorted(classes.items())]


def _maximal_chain(objects: list[frozenset], P: frozenset) -> list[frozenset]:
    below = sorted((Q for Q in objects if Q <= P), key=subgroup_key)
    chain = [below[0]]
    while chain[-1] != P:
        chain.append(next(Q for Q in below if chain[-1] < Q))
    chain.append(P)
    return chain


def check_axiom_I_II_III(T: TransporterSystem) -> Report:
    rep = Report("axioms (I) (II) (III)")
    S = T.S
    bad = None
    for cls in _iso_classes(T):
        good = False
        for P in cls:
            aut = T.aut(P)
            img = {T.epsilon(P, P, x) for x in S.normalizer(P)}
            if len(aut) % len(img) == 0 and (len(aut) // len(img)) % T.p != 0 and img <= set(aut):
                good = True
                break
        if not good:
            bad = [sorted(P) for P in cls]
            break
    rep.add("(I) each class has an object with Sylow eps(N_S(P))", bad is None, witness=bad)
    bad = None
    count = 0
    for m in T.isomorphisms():
        P, Q = T.source(m), T.target(m)
        minv = T.inverse(m)
        for Pb in T.objects:
            if not (P <= Pb and S.is_normal(P, within=Pb)):
                continue
            conj = {T.comp[(T.comp[(minv, T.epsilon(P, P, x))], m)] for x in Pb}
            for Qb in T.objects:
                if not (Q <= Qb and S.is_normal(Q, within=Qb)):
                    continue
                if not conj <= {T.epsilon(Q, Q, y) for y in Qb}:
                    continue
                count += 1
                want = T.comp[(m, T.inclusion(Q, Qb))]
                iP = T.inclusion(P, Pb)
                if not any(T.comp[(iP, n)] == want for n in T.hom(Pb, Qb)):
                    bad = (T.show(m), sorted(Pb), sorted(Qb))
                    break
            if bad:
                break
        if bad:
            break
    rep.add("(II) isomorphisms extend over normalizing overgroups", bad is None, f"{count} extension problems", bad)
    undetermined = 0
    bad = None
    Sw = S.whole
    if Sw in T.obj_index:
        for P in T.objects:
            chain = _maximal_chain(T.objects, P)
            for psi in T.hom(P, Sw):
                psis = [T.comp[(T.inclusion(Pi, P), psi)] for Pi in chain]
                last = chain[-1]
                stable = chain[-2] == last or last == Sw or S.rank_of(last) > 0
                if not stable:
                    undetermined += 1
                    continue
                if not all(T.comp[(T.inclusion(Pi, last), psis[-1])] == q for Pi, q in zip(chain, psis)):
                    bad = T.show(psi)
                    break
            if bad:
                break
        ok = False if bad else (None if undetermined else True)
        rep.add("(III) compatible chains have a union morphism", ok, f"{undetermined} undetermined" if undetermined else "", bad)
    else:
        rep.add("(III) compatible chains have a union morphism", False, "S is not an object")
    return rep


def transporter_report(T: TransporterSystem) -> Report:
    rep = Report(f"transporter system {T.name}".strip())
    rep.extend(check_category(T))
    rep.extend(check_axiom_A1_A2(T))
    rep.extend(check_axiom_B_C(T))
    rep.extend(check_axiom_I_II_III(T))
    return rep


def check_linking(T: TransporterSystem, F: FusionSystem | None = None) -> Report:
    F = T.fusion() if F is None else F
    rep = Report("linking system")
    sat = saturation_report(F)
    rep.add("(1) F is order-saturated", {"pass": True, "fail": False}.get(sat.status), sat.status)
    objs = set(T.objects)
    missing = []
    for P in centrics(F):
        if op_of_aut(F, P) == set(F.inner(P)) and P not in objs:
            missing.append(P)
    rep.add("(2) centrics with O_p(Out_F(P)) = 1 are objects", not missing, witness=missing and sorted(missing[0]))
    bad = None
    bad_center = None
    for P in T.objects:
        K = T.kernel(P)
        n = len(K)
        if _not_p_power(n, T.p):
            bad = (sorted(P), n)
        Z = {T.epsilon(P, P, z) for z in T.S.center(P)}
        if set(K) != Z and bad_center is None:
            bad_center = sorted(P)
    rep.add("(3) rho-kernels are discrete p-toral", bad is None, witness=bad)
    rep.add("rho-kernels equal eps(Z(P))", bad_center is None, witness=bad_center)
    fc = set(centrics(F))
    rep.add("objects are exactly the F-centrics", objs == fc, "p-local compact group" if objs == fc else "")
    return rep


def _not_p_power(n: int, p: int) -> bool:
    while n % p == 0:
        n //= p
    return n != 1


# -- restriction and factorization --------------------------------------

def restrict_morphism(T: TransporterSystem, m: int, P0: frozenset, Q0: frozenset) -> int:
    """The unique ``psi0 : P0 -> Q0`` with ``iota(P0,P) m = psi0 iota(Q0,Q)``."""
    P, Q = T.source(m), T.target(m)
    if not (P0 <= P and Q0 <= Q):
        raise ValueError("objects are not nested")
    if not T.rho[m].apply(P0) <= Q0:
        raise ValueError("rho(phi) does not map P0 into Q0")
    want = T.compose(T.inclusion(P0, P), m)
    iq = T.inclusion(Q0, Q)
    found = [n for n in T.hom(P0, Q0) if T.compose(n, iq) == want]
    if len(found) != 1:
        raise ValueError(f"restriction is not unique ({len(found)} candidates)")
    return found[0]


def factor_morphism(T: TransporterSystem, m: int) -> tuple[int, int]:
    """``m = iso`` then ``iota(Q0, Q)`` with ``Q0`` the image of ``rho(m)``."""
    P, Q = T.source(m), T.target(m)
    Q0 = T.rho[m].image
    if Q0 not in T.obj_index:
        raise ValueError("image of the morphism is not an object")
    iso = restrict_morphism(T, m, P, Q0)
    return iso, T.inclusion(Q0, Q)


def check_cancellation(T: TransporterSystem) -> Report:
    rep = Report("cancellation")
    bad = None
    for (i, j), ms in T.mor.items():
        for k in range(len(T.objects)):
            bs = T.mor.get((j, k), [])
            for a in ms:
                seen = {}
                for b in bs:
                    c = T.comp[(a, b)]
                    if c in seen:
                        bad = ("left", T.show(a))
                        break
                    seen[c] = b
                if bad:
                    break
            for b in bs:
                seen = {}
                for a in ms:
                    c = T.comp[(a, b)]
                    if c in seen:
                        bad = ("right", T.show(b))
                        break
                    seen[c] = a
                if bad:
                    break
            if bad:
                break
        if bad:
            break
    rep.add("left and right cancellation", bad is None, witness=bad)
    return rep
