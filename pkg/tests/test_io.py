import json
from pathlib import Path

import pytest

from compactloc.fusion import fusion_from_locality, saturation_report
from compactloc.io import (
    FormatError,
    dump_json,
    load_json,
    locality_table,
    parse_group,
    parse_subgroup,
    read_fusion,
    read_locality,
    read_locality_table,
    read_transporter,
    transporter_block,
)
from compactloc.partial_group import ExcludedWords, check_partial_group_axioms
from compactloc.reconstruction import BulletData, build_partial_group, verify_isomorphism
from compactloc.transporter import transporter_report

DATA = Path(__file__).resolve().parent.parent / "data"


def test_catalog_and_permutation_groups_agree():
    a = parse_group({"catalog": "S3"})
    b = parse_group({"permutations": [[1, 0, 2], [1, 2, 0]]})
    assert a.n == b.n == 6
    assert sorted(a.labels) == sorted(b.labels)


def test_labelled_table_group():
    G = parse_group({"table": [["e", "a"], ["a", "e"]], "name": "C2"})
    assert G.n == 2 and G.labels == ["e", "a"]


def test_description_group_with_truncation_override():
    desc = load_json(DATA / "txc2.json")["group"]
    assert parse_group(desc).n == 16
    assert parse_group(desc, truncation=2).n == 8


def test_subgroup_descriptors():
    desc = load_json(DATA / "txc2.json")["group"]
    W = parse_group(desc)
    T = parse_subgroup(W, {"generators": [], "full_torus": True})
    assert T == W.torus_set
    f = parse_subgroup(W, {"generators": [{"torus": ["0"], "finite": "f"}]})
    assert len(f) == 2
    S4 = parse_group({"catalog": "S4"})
    with pytest.raises(FormatError):
        parse_subgroup(S4, {"full_torus": True})
    with pytest.raises(FormatError):
        parse_subgroup(S4, ["(15)"])


@pytest.mark.parametrize("bad", [[], {"catalog": "S9"}, {"permutations": [[0, 0]]}, {"nothing": 1}])
def test_bad_group_blocks(bad):
    with pytest.raises(FormatError):
        parse_group(bad)


def test_malformed_file_is_a_format_error(tmp_path):
    with pytest.raises(FormatError):
        load_json(DATA / "malformed.json")
    with pytest.raises(FormatError):
        load_json(tmp_path / "missing.json")
    p = tmp_path / "list.json"
    p.write_text("[1, 2]")
    with pytest.raises(FormatError):
        load_json(p)


def test_locality_file_errors():
    with pytest.raises(FormatError, match="lacks"):
        read_locality({"group": {"catalog": "S4"}})
    with pytest.raises(FormatError, match="Sylow"):
        read_locality({"prime": 2, "group": {"catalog": "S4"}, "sylow": ["(12)"]})
    with pytest.raises(FormatError):
        read_locality({"prime": 2, "group": {"catalog": "S4"}, "delta": "everything"})
    with pytest.raises(FormatError, match="overgroup"):
        read_locality({"prime": 2, "group": {"catalog": "S4"}, "delta": [["(12)"]]})


def test_read_locality_examples():
    inp = read_locality(load_json(DATA / "s4.json"))
    assert inp.L.size == 24 and len(inp.L.delta) == 4
    inp = read_locality(load_json(DATA / "s4_sylow_only.json"))
    assert inp.L.size == 8
    inp = read_locality(load_json(DATA / "s4_deleted_word.json"))
    assert isinstance(inp.L, ExcludedWords)
    inp = read_locality(load_json(DATA / "txc2.json"), truncation=2)
    assert inp.L.S.n == 8


def test_locality_table_round_trip(s4_loc):
    data = json.loads(dump_json(locality_table(s4_loc)))
    M = read_locality_table(data)
    assert M.size == s4_loc.size
    ident = [M.labels.index(lab) for lab in s4_loc.labels]
    assert verify_isomorphism(s4_loc, M, ident, 3).ok
    assert check_partial_group_axioms(M, 3).ok
    assert read_locality(data).L.size == s4_loc.size


def test_bad_locality_table(s4_loc):
    data = locality_table(s4_loc)
    data["elements"] = data["elements"][:-1] + [data["elements"][0]]
    with pytest.raises(FormatError):
        read_locality_table(data)
    data = locality_table(s4_loc)
    del data["products"]
    with pytest.raises(FormatError):
        read_locality_table(data)


def test_transporter_round_trip(s4_T):
    data = json.loads(dump_json(transporter_block(s4_T, BulletData.identity(s4_T))))
    T, bullet = read_transporter(data)
    assert T.n_morphisms == s4_T.n_morphisms
    assert T.comp == s4_T.comp and T.eps == s4_T.eps and T.rho == s4_T.rho
    assert bullet.bullet_map == BulletData.identity(s4_T).bullet_map
    assert transporter_report(T).ok
    assert build_partial_group(T, bullet).size == 24


def test_transporter_without_bullet(s4_T):
    T, bullet = read_transporter(transporter_block(s4_T))
    assert bullet is None


def test_bad_transporter_files(s4_T):
    data = transporter_block(s4_T)
    data["compose"][0][2] = 10 ** 6
    with pytest.raises(FormatError, match="range"):
        read_transporter(data)
    data = transporter_block(s4_T)
    data["objects"][0] = ["(15)"]
    with pytest.raises(FormatError):
        read_transporter(data)


def test_fusion_files(s4_loc):
    F = read_fusion(load_json(DATA / "s4_fusion_d8.json"))
    G = fusion_from_locality(s4_loc)
    lab = lambda S, P: frozenset(S.labels[x] for x in P)
    assert sorted(sorted(lab(F.S, P) for P in o) for o in F.orbits()) == sorted(sorted(lab(G.S, P) for P in o) for o in G.orbits())
    assert saturation_report(F).ok
    assert not saturation_report(read_fusion(load_json(DATA / "d8_outer.json"))).ok
    with pytest.raises(FormatError):
        read_fusion({"prime": 2, "sylow": {"catalog": "D8"}, "generators": [{"domain": ["zz"], "images": ["zz"]}]})


def test_dump_is_sorted_and_stable(s4_loc):
    a = dump_json(locality_table(s4_loc))
    b = dump_json(json.loads(a))
    assert a == b
