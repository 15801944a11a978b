"""Reading and writing the JSON input formats.

Group block, one of
  ``{"catalog": "S4"}``
  ``{"permutations": [[...], ...]}`` (zero-based images)
  ``{"table": [[label, ...], ...]}`` (first row lists the elements, identity first)
  ``{"labels": [...], "indexed_table": [[int, ...], ...]}``
  ``{"prime": p, "torus_rank": r, "finite_part": ..., "action": ..., "truncation": m}``

Elements are labels, or ``{"torus": ["a/b", ...], "finite": label}`` in a
truncated discrete p-toral group.  A subgroup descriptor is a list of
generators, or ``{"generators": [...], "full_torus": true}``, or the
string ``"S"`` for the whole Sylow subgroup.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

from . import catalog, ptoral
from .finite import EmbeddedGroup, FiniteGroup, subgroup_key
from .fusion import FusionSystem, Hom, centrics, fusion_from_group
from .partial_group import ExcludedWords, Locality, TableLocality, from_finite_group
from .reconstruction import BulletData
from .transporter import TransporterSystem


class FormatError(ValueError):
    """Malformed input file."""


CATALOG = {
    "S3": lambda: catalog.symmetric_group(3),
    "S4": lambda: catalog.symmetric_group(4),
    "A4": catalog.alternating_group_4,
    "D8": catalog.dihedral_8,
    "Q8": catalog.quaternion_8,
    "C2": lambda: catalog.cyclic_group(2),
    "C4": lambda: catalog.cyclic_group(4),
}


def load_json(path: str | Path) -> dict:
    try:
        with open(path) as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise FormatError(f"cannot read {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise FormatError("top level must be an object")
    return data


def dump_json(data: dict) -> str:
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


# -- groups ---------------------------------------------------------------

def parse_group(desc: dict, truncation: int | None = None, prime: int | None = None) -> FiniteGroup:
    if not isinstance(desc, dict):
        raise FormatError("group block must be an object")
    name = desc.get("name", "")
    try:
        if "catalog" in desc:
            if desc["catalog"] == "TxC2":
                dp = catalog.torus_by_c2(truncation or int(desc.get("truncation", 3)), prime or 2)
                return dp.working
            return CATALOG[desc["catalog"]]()
        if "permutations" in desc:
            return FiniteGroup.from_permutations(desc["permutations"], name=name)
        if "table" in desc:
            return FiniteGroup.from_labelled_table(desc["table"], name=name)
        if "indexed_table" in desc:
            return FiniteGroup(desc["indexed_table"], desc.get("labels"), name=name)
        if "finite_part" in desc:
            d = dict(desc)
            if truncation is not None:
                d["truncation"] = truncation
            if prime is not None:
                d["prime"] = prime
            return ptoral.from_description(d, name=name).working
    except (KeyError, ValueError, TypeError, IndexError) as exc:
        raise FormatError(f"bad group block: {exc}") from exc
    raise FormatError("group block has no recognised form")


def group_block(G: FiniteGroup) -> dict:
    return {"labels": list(G.labels), "indexed_table": [list(r) for r in G.table], "name": G.name}


def parse_element(G: FiniteGroup, desc) -> int:
    if isinstance(desc, str):
        try:
            return G.labels.index(desc)
        except ValueError:
            raise FormatError(f"unknown element {desc!r}") from None
    if isinstance(desc, dict) and hasattr(G, "dp"):
        try:
            return G.index_of(ptoral.parse_element(G.dp, desc))
        except (KeyError, ValueError, ptoral.TruncationError) as exc:
            raise FormatError(f"bad element {desc!r}: {exc}") from exc
    raise FormatError(f"bad element {desc!r}")


def parse_subgroup(G: FiniteGroup, desc, S: frozenset | None = None) -> frozenset:
    if desc == "S" and S is not None:
        return S
    full_torus = False
    gens = desc
    if isinstance(desc, dict):
        gens = desc.get("generators", desc.get("elements", []))
        full_torus = bool(desc.get("full_torus", False))
    if not isinstance(gens, list):
        raise FormatError(f"bad subgroup descriptor {desc!r}")
    idx = [parse_element(G, g) for g in gens]
    if full_torus:
        if not hasattr(G, "torus_set"):
            raise FormatError("full_torus given for a group without a torus")
        idx += sorted(G.torus_set)
    return G.closure(idx)


# -- localities -----------------------------------------------------------

@dataclass
class LocalityInput:
    L: Locality
    G: FiniteGroup | None
    p: int
    delta_is_centric: bool | None = None
    notes: list[str] = field(default_factory=list)


def read_locality(data: dict, truncation: int | None = None, prime: int | None = None) -> LocalityInput:
    if data.get("format") == "locality-table":
        return LocalityInput(read_locality_table(data), None, int(data["prime"]))
    try:
        p = prime or int(data["prime"])
        G = parse_group(data["group"], truncation, p)
    except KeyError as exc:
        raise FormatError(f"locality file lacks {exc}") from exc
    syl = data.get("sylow", "auto")
    S = G.sylow(p) if syl == "auto" else parse_subgroup(G, syl)
    if not G.is_p_group(S, p) or len(G.sylow(p)) != len(S):
        raise FormatError("sylow block is not a Sylow p-subgroup")
    d = data.get("delta", "centric")
    F = None
    if d == "centric":
        F = fusion_from_group(G, S, p)
        emb = F.S.embedding if isinstance(F.S, EmbeddedGroup) else list(range(G.n))
        delta = [frozenset(emb[x] for x in P) for P in centrics(F)]
    elif isinstance(d, list):
        delta = [parse_subgroup(G, P, S) for P in d]
    else:
        raise FormatError("delta must be a list or \"centric\"")
    try:
        L = from_finite_group(G, S, delta, p, name=data.get("name", G.name))
    except ValueError as exc:
        raise FormatError(str(exc)) from exc
    excluded = data.get("exclude_words", [])
    if excluded:
        h_of = L.h_of
        words = [tuple(h_of[parse_element(G, x)] for x in w) for w in excluded]
        L = ExcludedWords(L, words)
        L.G = G
        L.g_of = L.base.g_of
    if data.get("fusion") == "ambient":
        L.declared_fusion = F or fusion_from_group(G, S, p)
    return LocalityInput(L, G, p)


def locality_table(L: Locality) -> dict:
    """The locality as conjugation data and the table of defined pairs."""
    labels = _unique_labels(L.labels)
    S = L.S
    conj = {}
    for g in L.handles:
        m = L.conj_map(g)
        conj[labels[g]] = {S.labels[x]: S.labels[y] for x, y in sorted(m.items())}
    pairs = []
    for a in L.handles:
        for b in L.handles:
            if L.in_domain((a, b)):
                pairs.append([labels[a], labels[b], labels[L.product((a, b))]])
    return {
        "format": "locality-table",
        "name": L.name,
        "prime": L.p,
        "sylow": group_block(S),
        "elements": labels,
        "unit": labels[L.unit],
        "inverse": {labels[g]: labels[L.inverse(g)] for g in L.handles},
        "s_embedding": {S.labels[x]: labels[h] for x, h in enumerate(L.s_handles)},
        "delta": [[S.labels[x] for x in sorted(P)] for P in L.delta],
        "conjugation": conj,
        "products": pairs,
    }


def read_locality_table(data: dict) -> TableLocality:
    try:
        S = parse_group(data["sylow"])
        labels = list(data["elements"])
        idx = {lab: i for i, lab in enumerate(labels)}
        if len(idx) != len(labels):
            raise FormatError("element labels are not unique")
        sx = {lab: i for i, lab in enumerate(S.labels)}
        inverse = [idx[data["inverse"][lab]] for lab in labels]
        s_handles = [idx[data["s_embedding"][lab]] for lab in S.labels]
        delta = [frozenset(sx[x] for x in P) for P in data["delta"]]
        conj = {idx[g]: {sx[x]: sx[y] for x, y in m.items()} for g, m in data["conjugation"].items()}
        pairs = {(idx[a], idx[b]): idx[c] for a, b, c in data["products"]}
        return TableLocality(len(labels), idx[data["unit"]], inverse, S, s_handles, delta, int(data["prime"]), conj, pairs, labels, data.get("name", ""))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"bad locality table: {exc}") from exc


def _unique_labels(labels: list[str]) -> list[str]:
    seen: dict[str, int] = {}
    out = []
    for lab in labels:
        k = seen.get(lab, 0)
        seen[lab] = k + 1
        out.append(lab if k == 0 else f"{lab}#{k}")
    return out


# -- transporter systems --------------------------------------------------

def transporter_block(T: TransporterSystem, bullet: BulletData | None = None) -> dict:
    S = T.S
    lab = S.labels
    labels = _unique_labels([_morphism_label(T, m) for m in range(T.n_morphisms)])
    out = {
        "format": "transporter",
        "name": T.name,
        "prime": T.p,
        "sylow": group_block(S),
        "objects": [[lab[x] for x in sorted(P)] for P in T.objects],
        "morphisms": [
            {"label": labels[m], "source": T.src[m], "target": T.tgt[m], "rho": [[lab[x], lab[y]] for x, y in zip(T.rho[m].domain, T.rho[m].images)]}
            for m in range(T.n_morphisms)
        ],
        "compose": [[a, b, c] for (a, b), c in sorted(T.comp.items())],
        "epsilon": [[i, j, lab[x], m] for (i, j, x), m in sorted(T.eps.items())],
    }
    if bullet is not None:
        oi = T.obj_index
        out["bullet"] = {
            "map": [[oi[P], oi[Q]] for P, Q in sorted(bullet.bullet_map.items(), key=lambda kv: oi[kv[0]])],
            "action": [[a, b] for a, b in sorted(bullet.functor_action.items())],
        }
    return out


def _morphism_label(T: TransporterSystem, m: int) -> str:
    lab = T.labels[m]
    if isinstance(lab, tuple):
        return f"{lab[0]}:{lab[1]}->{lab[2]}"
    return str(lab)


def read_transporter(data: dict) -> tuple[TransporterSystem, BulletData | None]:
    try:
        p = int(data["prime"])
        S = parse_group(data["sylow"])
        sx = {lab: i for i, lab in enumerate(S.labels)}
        objects = [frozenset(sx[x] for x in P) for P in data["objects"]]
        T = TransporterSystem(S, p, objects, name=data.get("name", ""))
        for m in data["morphisms"]:
            T.src.append(int(m["source"]))
            T.tgt.append(int(m["target"]))
            T.labels.append(m.get("label", str(len(T.labels))))
            T.rho.append(Hom.from_dict({sx[x]: sx[y] for x, y in m["rho"]}))
        T._reindex()
        n = T.n_morphisms
        for a, b, c in data["compose"]:
            if not all(0 <= v < n for v in (a, b, c)):
                raise FormatError("composition entry out of range")
            T.comp[(a, b)] = c
        for i, j, x, m in data["epsilon"]:
            T.eps[(int(i), int(j), sx[x])] = int(m)
        bullet = None
        if "bullet" in data:
            b = data["bullet"]
            bullet = BulletData({objects[i]: objects[j] for i, j in b["map"]}, {int(a): int(c) for a, c in b["action"]})
        return T, bullet
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"bad transporter file: {exc}") from exc


# -- fusion systems -------------------------------------------------------

def read_fusion(data: dict) -> FusionSystem:
    try:
        p = int(data["prime"])
        S = parse_group(data["sylow"])
        gens = []
        for g in data["generators"]:
            dom = [parse_element(S, x) for x in g["domain"]]
            img = [parse_element(S, x) for x in g["images"]]
            gens.append(Hom.from_dict(dict(zip(dom, img))))
        return FusionSystem.generated(S, p, gens, name=data.get("name", ""))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"bad fusion file: {exc}") from exc


def subgroup_labels(S: FiniteGroup, P: frozenset) -> list[str]:
    return [S.labels[x] for x in sorted(P)]


def sorted_subgroups(Ps) -> list[frozenset]:
    return sorted(Ps, key=subgroup_key)
