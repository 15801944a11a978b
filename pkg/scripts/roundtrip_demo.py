"""Build the transporter system of a locality, rebuild a locality from it
and print the sizes along the way together with every check's status."""
from __future__ import annotations

import argparse
from pathlib import Path

from compactloc.fusion import fusion_from_locality, saturation_report
from compactloc.io import load_json, read_locality
from compactloc.reconstruction import build_partial_group, check_reconstruction, locality_isomorphism_search, roundtrip_phi
from compactloc.transporter import check_linking, transporter_from_locality, transporter_report

DATA = Path(__file__).resolve().parent.parent / "data"


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("input", nargs="?", default=str(DATA / "s4.json"))
    ap.add_argument("--max-word-len", type=int, default=3)
    args = ap.parse_args()
    L = read_locality(load_json(args.input)).L
    F = fusion_from_locality(L)
    T = transporter_from_locality(L)
    Lr = build_partial_group(T)
    print(f"locality: {L.size} elements, {len(L.delta)} objects")
    print(f"transporter system: {T.n_morphisms} morphisms")
    print(f"rebuilt: {Lr.size} classes")
    reports = [
        saturation_report(F),
        transporter_report(T),
        check_linking(T, F),
        check_reconstruction(Lr, args.max_word_len),
        roundtrip_phi(L, Lr, args.max_word_len).report,
    ]
    for r in reports:
        print(f"{r.title}: {r.status}")
    search = locality_isomorphism_search(L, Lr, max_len=args.max_word_len)
    print(f"isomorphism search: {search.status} after {search.nodes} nodes")
    return 0 if all(r.ok for r in reports) and search.status == "found" else 1


if __name__ == "__main__":
    raise SystemExit(main())
