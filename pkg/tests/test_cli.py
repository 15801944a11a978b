import json
import os
import subprocess
import sys
from pathlib import Path

import pytest

from compactloc.cli import RunConfig, main
from compactloc.io import load_json

DATA = Path(__file__).resolve().parent.parent / "data"


def run(capsys, *args):
    code = main([str(a) for a in args])
    out = capsys.readouterr()
    return code, out.out, out.err


def structured(capsys, *args):
    code, out, _ = run(capsys, *args, "--structured")
    return code, json.loads(out)


def test_check_s4_passes(capsys):
    code, out, _ = run(capsys, "check", DATA / "s4.json")
    assert code == 0
    assert "overall: PASS" in out


@pytest.mark.parametrize("name", ["s3_p3.json", "a4.json", "d8_inner.json", "s4_sylow_only.json"])
def test_check_other_examples(capsys, name):
    assert run(capsys, "check", DATA / name)[0] == 0


def test_check_deleted_word_fails_with_witness(capsys):
    code, rep = structured(capsys, "check", DATA / "s4_deleted_word.json")
    assert code == 1
    failed = [c for r in rep["reports"] for c in r["checks"] if c["status"] == "fail"]
    assert failed and any(c["witness"] for c in failed)


def test_malformed_input_exit_code(capsys):
    code, _, err = run(capsys, "check", DATA / "malformed.json")
    assert code == 2
    assert "input error" in err


@pytest.mark.parametrize("flags", [["--prime", "4"], ["--truncation", "0"], ["--budget", "0"], ["--max-word-len", "0"], ["--bogus"]])
def test_configuration_errors(capsys, flags):
    assert run(capsys, "check", DATA / "s4.json", *flags)[0] == 2


def test_unknown_command(capsys):
    assert run(capsys, "frobnicate", DATA / "s4.json")[0] == 2


def test_run_config_validation():
    RunConfig(prime=2, truncation=3).validate()
    with pytest.raises(ValueError):
        RunConfig(prime=6).validate()


def test_fusion_s4_merges_klein_involutions(capsys):
    code, rep = structured(capsys, "fusion", DATA / "s4.json")
    assert code == 0
    orbits = [sorted(tuple(P) for P in o) for o in rep["orbits"]]
    doubles = sorted(("()", d) for d in ["(12)(34)", "(13)(24)", "(14)(23)"])
    assert doubles in orbits
    # the two Klein four-groups stay in separate classes
    assert [("()", "(12)(34)", "(13)(24)", "(14)(23)")] in orbits
    assert [("()", "(34)", "(12)", "(12)(34)")] in orbits
    assert len(rep["centric_radical"]) == 2


def test_fusion_inner_only(capsys):
    code, rep = structured(capsys, "fusion", DATA / "d8_inner.json")
    assert code == 0
    assert all(v in (1, 2, 4) for v in rep["aut_orders"].values())
    sizes = sorted(len(o) for o in rep["orbits"])
    assert sizes == [1, 1, 1, 1, 1, 1, 2, 2]


def test_fusion_torus_by_c2_torus_extension(capsys):
    code, rep = structured(capsys, "fusion", DATA / "txc2.json")
    checks = {c["name"]: c["status"] for r in rep["reports"] for c in r["checks"]}
    assert checks["torus extension: isomorphisms between torus subgroups extend to the torus"] == "pass"
    assert code == 3
    assert checks["saturation (II): every map into a fully order-centralized image extends over N_phi"] == "inconclusive"


def test_fusion_description_files(capsys):
    assert run(capsys, "fusion", DATA / "s4_fusion_d8.json")[0] == 0
    code, out, _ = run(capsys, "fusion", DATA / "d8_outer.json")
    assert code == 1
    assert "Sylow" in out


@pytest.mark.parametrize("name", ["s4.json", "s3_p3.json", "a4.json", "d8_inner.json"])
def test_roundtrip_passes(capsys, name):
    code, out, _ = run(capsys, "roundtrip", DATA / name)
    assert code == 0, out


def test_roundtrip_precondition(capsys):
    code, out, _ = run(capsys, "roundtrip", DATA / "s4_sylow_only.json")
    assert code == 1
    assert "objects are exactly the centric subgroups" in out


def test_roundtrip_refuses_a_non_objective_locality(capsys):
    code, out, _ = run(capsys, "roundtrip", DATA / "s4_deleted_word.json")
    assert code == 1
    assert "objectivity" in out


def test_roundtrip_torus_by_c2_is_inconclusive(capsys):
    code, rep = structured(capsys, "roundtrip", DATA / "txc2.json", "--truncation", "2")
    assert code == 3
    statuses = [c["status"] for r in rep["reports"] for c in r["checks"]]
    assert "fail" not in statuses
    assert rep["carrier"] == rep["classes"]


def test_transporter_then_rebuild(capsys, tmp_path):
    tfile = tmp_path / "t.json"
    lfile = tmp_path / "l.json"
    assert run(capsys, "transporter", DATA / "s4.json", "-o", tfile)[0] == 0
    code, out, _ = run(capsys, "rebuild", tfile, "-o", lfile)
    assert code == 0, out
    table = load_json(lfile)
    assert len(table["elements"]) == 24
    assert run(capsys, "check", lfile)[0] == 0


def test_rebuild_with_identity_bullet(capsys, tmp_path, s4_T):
    from compactloc.io import dump_json, transporter_block
    from compactloc.reconstruction import BulletData

    tfile = tmp_path / "t.json"
    tfile.write_text(dump_json(transporter_block(s4_T, BulletData.identity(s4_T))))
    code, out, _ = run(capsys, "rebuild", tfile)
    assert code == 0
    assert "bullet data" in out


def test_rebuild_broken_composition(capsys, tmp_path):
    tfile = tmp_path / "t.json"
    run(capsys, "transporter", DATA / "s4.json", "-o", tfile)
    data = load_json(tfile)
    a, b, c = data["compose"][5]
    data["compose"][5] = [a, b, next(x[2] for x in data["compose"] if x[2] != c and data["morphisms"][x[2]]["source"] == data["morphisms"][c]["source"] and data["morphisms"][x[2]]["target"] == data["morphisms"][c]["target"])]
    tfile.write_text(json.dumps(data))
    code, out, _ = run(capsys, "rebuild", tfile)
    assert code == 1
    assert "FAIL" in out


def test_structured_output_is_deterministic():
    outs = set()
    for seed in ["0", "1", "12345"]:
        env = dict(os.environ, PYTHONHASHSEED=seed)
        res = subprocess.run([sys.executable, "-m", "compactloc", "roundtrip", str(DATA / "s4.json"), "--structured"], capture_output=True, env=env, check=False)
        assert res.returncode == 0
        outs.add(res.stdout)
    assert len(outs) == 1
