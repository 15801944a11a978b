"""Run the acceptance suite and print one pass/fail line per criterion."""
from __future__ import annotations

import subprocess
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def main() -> int:
    res = subprocess.run(
        [sys.executable, "-m", "pytest", "-q", "-s", str(ROOT / "tests" / "test_acceptance.py")],
        cwd=ROOT,
        capture_output=True,
        text=True,
        check=False,
    )
    lines = [ln for ln in res.stdout.splitlines() if ln.startswith("criterion ")]
    # the summary hook repeats each line; keep the first occurrence
    for ln in dict.fromkeys(lines):
        print(ln)
    if not lines:
        print(res.stdout)
        print(res.stderr, file=sys.stderr)
    return res.returncode


if __name__ == "__main__":
    raise SystemExit(main())
