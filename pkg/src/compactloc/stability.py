"""Agreement of truncated computations between consecutive levels.

Every subgroup representable at level ``m`` is rebuilt at ``m + 1`` from
its generators, and the invariants and fusion data computed at the two
levels are compared.
"""
from __future__ import annotations

from . import ptoral
from .fusion import FusionSystem, fusion_from_group, is_centric, out_group, saturation_report, torus_extension_property
from .ptoral import DPGroup, Subgroup
from .report import Report


def _fusion(G: DPGroup) -> FusionSystem:
    W = G.working
    S = W.sylow(G.p)
    return fusion_from_group(W, S, G.p)


def cross_level_report(dp: DPGroup, m: int) -> Report:
    G0, G1 = dp.at(m), dp.at(m + 1)
    rep = Report(f"levels {m} and {m + 1}")
    subs0 = ptoral.subgroups(G0)
    fam1 = {P.indices for P in ptoral.subgroups(G1)}
    S0, S1 = ptoral.whole(G0), ptoral.whole(G1)
    lifted: dict[frozenset, Subgroup] = {P.indices: P.lift(G1) for P in subs0}
    bad = next((P for P in subs0 if lifted[P.indices].indices not in fam1), None)
    rep.add("subgroups at level m stay representable", bad is None, f"{len(subs0)} subgroups", bad)
    bad = None
    for P in subs0:
        P1 = lifted[P.indices]
        if ptoral.rank(P) != ptoral.rank(P1) or ptoral.order_pair(P) != ptoral.order_pair(P1):
            bad = ("order pair", P)
            break
        if ptoral.maximal_torus(P).lift(G1) != ptoral.maximal_torus(P1):
            bad = ("maximal torus", P)
            break
        if ptoral.normalizer(P, S0).lift(G1) != ptoral.normalizer(P1, S1):
            bad = ("normalizer", P)
            break
    rep.add("rank, order pair, maximal torus and normalizer agree", bad is None, witness=bad)

    F0, F1 = _fusion(G0), _fusion(G1)
    up = {P: lifted[P].indices for P in F0.family}
    image = set(up.values())
    bad = None
    for P in F0.family:
        o0 = {up[Q] for Q in F0.orbit(P)}
        o1 = {Q for Q in F1.orbit(up[P]) if Q in image}
        if o0 != o1:
            bad = ("orbit", sorted(P))
            break
        if out_group(F0, P).order != out_group(F1, up[P]).order:
            bad = ("Out order", sorted(P))
            break
        if is_centric(F0, P) != is_centric(F1, up[P]):
            bad = ("centric", sorted(P))
            break
    rep.add("fusion orbits, Out orders and centricity agree", bad is None, f"{len(F0.family)} subgroups", bad)
    s0, s1 = saturation_report(F0), saturation_report(F1)
    same = [c.status for c in s0.checks] == [c.status for c in s1.checks]
    rep.add("saturation statuses agree", same, f"{s0.status} at both" if same else f"{s0.status} vs {s1.status}")
    for lvl, F in ((m, F0), (m + 1, F1)):
        t = torus_extension_property(F)
        rep.add(f"torus extension at level {lvl}", t.ok, t.checks[0].detail)
    return rep
