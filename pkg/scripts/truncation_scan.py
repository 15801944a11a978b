"""Tabulate family size, fusion orbits and saturation status of a
discrete p-toral group across truncation levels."""
from __future__ import annotations

import argparse
import time

from compactloc import ptoral
from compactloc.catalog import torus_by_c2, torus_rank2
from compactloc.fusion import fusion_from_group, saturation_report
from compactloc.stability import cross_level_report

GROUPS = {"txc2": torus_by_c2, "rank2": torus_rank2}


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("group", choices=sorted(GROUPS), nargs="?", default="txc2")
    ap.add_argument("--levels", type=int, nargs="+", default=[1, 2, 3, 4])
    args = ap.parse_args()
    print(f"{'m':>2} {'|G_m|':>6} {'family':>7} {'orbits':>7} {'saturation':>12} {'next level':>11} {'seconds':>8}")
    for m in args.levels:
        t0 = time.perf_counter()
        dp = GROUPS[args.group](m)
        W = dp.working
        F = fusion_from_group(W, W.sylow(dp.p), dp.p)
        sat = saturation_report(F).status
        cross = cross_level_report(dp, m).status
        dt = time.perf_counter() - t0
        note = "  below headroom" if m < dp.headroom else ""
        print(f"{m:>2} {W.n:>6} {len(ptoral.subgroups(dp)):>7} {len(F.orbits()):>7} {sat:>12} {cross:>11} {dt:>8.2f}{note}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
