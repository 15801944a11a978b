"""Run every CLI command on every data file with structured output.

The combined document goes to stdout; two runs are expected to be
byte-identical whatever the hash seed.
"""
from __future__ import annotations

import argparse
import io
import json
import sys
from contextlib import redirect_stderr, redirect_stdout
from pathlib import Path

from compactloc.cli import main

DATA = Path(__file__).resolve().parent.parent / "data"
LOCALITY_COMMANDS = ["check", "fusion", "roundtrip"]


def run_one(argv: list[str]) -> dict:
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(argv)
    text = out.getvalue()
    try:
        body = json.loads(text) if text else None
    except json.JSONDecodeError:
        body = text
    # keep machine-specific paths out of the document
    stderr = err.getvalue().strip().replace(str(Path(argv[1]).parent) + "/", "")
    return {"argv": argv[:1] + [Path(argv[1]).name] + argv[2:], "exit": code, "output": body, "stderr": stderr}


def suite(data_dir: Path) -> list[dict]:
    runs = []
    for path in sorted(data_dir.glob("*.json")):
        try:
            kind = json.loads(path.read_text()).get("format")
        except json.JSONDecodeError:
            kind = None
        commands = ["fusion"] if kind == "fusion" else LOCALITY_COMMANDS
        for cmd in commands:
            runs.append(run_one([cmd, str(path), "--structured"]))
    return runs


def main_script() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--data", default=str(DATA))
    args = ap.parse_args()
    sys.stdout.write(json.dumps(suite(Path(args.data)), indent=2, sort_keys=True) + "\n")
    return 0


if __name__ == "__main__":
    raise SystemExit(main_script())
