"""Command-line front end.

Exit codes: 0 all checks pass, 1 a check failed, 2 the input or the
configuration could not be used, 3 nothing failed but something was
undetermined.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .finite import is_prime
from .fusion import centric_radicals, centrics, fusion_from_locality, saturation_report, torus_extension_property
from .io import FormatError, dump_json, load_json, locality_table, read_fusion, read_locality, read_transporter, subgroup_labels, transporter_block
from .partial_group import check_compact, check_objectivity, check_partial_group_axioms
from .reconstruction import (
    BulletData,
    ReconstructionError,
    build_partial_group,
    check_orbit_category,
    check_reconstruction,
    check_sigma,
    check_z_functor,
    locality_isomorphism_search,
    orbit_category,
    roundtrip_phi,
)
from .report import FAIL, INCONCLUSIVE, PASS, Report
from .transporter import check_linking, transporter_from_locality, transporter_report

EXIT = {PASS: 0, FAIL: 1, INCONCLUSIVE: 3}
EXIT_INPUT = 2


@dataclass
class RunConfig:
    prime: int | None = None
    truncation: int | None = None
    max_word_len: int = 3
    budget: int = 100000
    inputs: list[str] = field(default_factory=list)
    output: str | None = None
    structured: bool = False

    def validate(self) -> None:
        if self.prime is not None and not is_prime(self.prime):
            raise ValueError(f"--prime {self.prime} is not prime")
        if self.truncation is not None and self.truncation < 1:
            raise ValueError("--truncation must be at least 1")
        if self.max_word_len < 1:
            raise ValueError("--max-word-len must be positive")
        if self.budget < 1:
            raise ValueError("--budget must be positive")


def _emit(reports: list[Report], cfg: RunConfig, extra: dict | None = None) -> int:
    total = Report("summary")
    for r in reports:
        total.extend(r)
    if cfg.structured:
        payload = {"status": total.status, "reports": [r.to_dict() for r in reports]}
        if extra:
            payload.update(extra)
        sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    else:
        for r in reports:
            sys.stdout.write(r.to_text() + "\n")
        if extra:
            for k, v in extra.items():
                sys.stdout.write(f"{k}: {json.dumps(v, sort_keys=True)}\n")
        sys.stdout.write(f"overall: {total.status.upper()}\n")
    return EXIT[total.status]


def _locality(cfg: RunConfig):
    return read_locality(load_json(cfg.inputs[0]), cfg.truncation, cfg.prime)


def cmd_check(cfg: RunConfig) -> int:
    inp = _locality(cfg)
    L = inp.L
    reports = [
        check_partial_group_axioms(L, cfg.max_word_len),
        check_objectivity(L, cfg.max_word_len),
        check_compact(L, fusion=L.declared_fusion),
    ]
    return _emit(reports, cfg, {"carrier": L.size, "objects": len(L.delta)})


def _fusion_summary(F) -> tuple[Report, dict]:
    S = F.S
    orbits = F.orbits()
    info = {
        "orbits": [[subgroup_labels(S, P) for P in orb] for orb in orbits],
        "centric": [subgroup_labels(S, P) for P in centrics(F)],
        "centric_radical": [subgroup_labels(S, P) for P in centric_radicals(F)],
        "aut_orders": {",".join(subgroup_labels(S, P)) or "1": len(F.aut(P)) for P in F.family},
    }
    rep = saturation_report(F)
    if hasattr(S, "torus_set") and S.dp.r > 0:
        rep.extend(torus_extension_property(F))
    return rep, info


def cmd_fusion(cfg: RunConfig) -> int:
    data = load_json(cfg.inputs[0])
    if data.get("format") == "fusion":
        F = read_fusion(data)
    else:
        F = fusion_from_locality(read_locality(data, cfg.truncation, cfg.prime).L)
    rep, info = _fusion_summary(F)
    return _emit([rep], cfg, info)


def cmd_roundtrip(cfg: RunConfig) -> int:
    L = _locality(cfg).L
    F = fusion_from_locality(L)
    pre = Report("precondition")
    pre.add("objects are exactly the centric subgroups", set(L.delta) == set(centrics(F)))
    pre.extend(check_partial_group_axioms(L, cfg.max_word_len))
    pre.extend(check_objectivity(L, cfg.max_word_len))
    if not pre.ok:
        return _emit([pre], cfg)
    T = transporter_from_locality(L)
    reports = [pre, transporter_report(T), check_linking(T, F)]
    try:
        Lr = build_partial_group(T)
    except ReconstructionError as exc:
        bad = Report("reconstruction")
        bad.add("classes and maximal members", False, str(exc))
        return _emit(reports + [bad], cfg)
    reports.append(check_reconstruction(Lr, cfg.max_word_len))
    reports.append(check_partial_group_axioms(Lr, cfg.max_word_len))
    reports.append(roundtrip_phi(L, Lr, cfg.max_word_len).report)
    O = orbit_category(F, L.delta)
    reports += [check_orbit_category(O), check_z_functor(O), check_sigma(T, O)]
    search = locality_isomorphism_search(L, Lr, budget=cfg.budget, max_len=cfg.max_word_len)
    iso = Report("isomorphism search")
    iso.add("isomorphism fixing every object", {"found": True, "none": False}.get(search.status), f"{search.nodes} nodes")
    reports.append(iso)
    return _emit(reports, cfg, {"carrier": L.size, "classes": Lr.size, "morphisms": T.n_morphisms})


def cmd_transporter(cfg: RunConfig) -> int:
    L = _locality(cfg).L
    T = transporter_from_locality(L)
    _write(cfg, dump_json(transporter_block(T)))
    return _emit([transporter_report(T)], cfg)


def cmd_rebuild(cfg: RunConfig) -> int:
    T, bullet = read_transporter(load_json(cfg.inputs[0]))
    rep = transporter_report(T)
    if not rep.ok:
        return _emit([rep], cfg)
    reports = [rep]
    if bullet is not None:
        b = bullet.validate(T, T.fusion())
        reports.append(b)
        if not b.ok:
            return _emit(reports, cfg)
    try:
        Lr = build_partial_group(T, bullet or BulletData.identity(T))
    except ReconstructionError as exc:
        bad = Report("reconstruction")
        bad.add("classes and maximal members", False, str(exc))
        return _emit(reports + [bad], cfg)
    reports.append(check_reconstruction(Lr, cfg.max_word_len))
    _write(cfg, dump_json(locality_table(Lr)))
    return _emit(reports, cfg, {"classes": Lr.size})


def _write(cfg: RunConfig, text: str) -> None:
    if cfg.output:
        Path(cfg.output).write_text(text)


COMMANDS = {
    "check": cmd_check,
    "fusion": cmd_fusion,
    "roundtrip": cmd_roundtrip,
    "transporter": cmd_transporter,
    "rebuild": cmd_rebuild,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="compactloc", description="Check localities, fusion systems and transporter systems.")
    ap.add_argument("command", choices=sorted(COMMANDS))
    ap.add_argument("input")
    ap.add_argument("-o", "--output", help="file for emitted transporter or locality data")
    ap.add_argument("--prime", type=int)
    ap.add_argument("--truncation", type=int)
    ap.add_argument("--max-word-len", type=int, default=3)
    ap.add_argument("--budget", type=int, default=100000)
    ap.add_argument("--structured", action="store_true", help="emit JSON reports")
    return ap


def main(argv: list[str] | None = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else 0
    cfg = RunConfig(args.prime, args.truncation, args.max_word_len, args.budget, [args.input], args.output, args.structured)
    try:
        cfg.validate()
    except ValueError as exc:
        sys.stderr.write(f"configuration error: {exc}\n")
        return EXIT_INPUT
    try:
        return COMMANDS[args.command](cfg)
    except FormatError as exc:
        sys.stderr.write(f"input error: {exc}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    raise SystemExit(main())
