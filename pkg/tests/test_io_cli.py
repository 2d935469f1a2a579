import json
import subprocess
import sys

import pytest

from equicohom import linalg as la
from equicohom.cli import main
from equicohom.io import (FIXTURES, SchemaError, canonical_json, digest, load_json, parse_document,
                          serialize_document)

FIXTURE_NAMES = sorted(p.stem for p in FIXTURES.glob("*.json"))
MUTATIONS = sorted(p.stem for p in (FIXTURES / "mutations").glob("*.json"))


def _same_system(M1, M2):
    assert M1.ranks == M2.ranks
    assert M1.rho.keys() == M2.rho.keys() and M1.tau.keys() == M2.tau.keys()
    for k in M1.rho:
        assert la.equal(M1.ring, M1.rho[k], M2.rho[k])
    for k in M1.tau:
        assert la.equal(M1.ring, M1.tau[k], M2.tau[k])


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_round_trip(name):
    raw = load_json(FIXTURES / f"{name}.json")
    d1 = parse_document(raw)
    s1 = serialize_document(d1)
    d2 = parse_document(json.loads(canonical_json(s1)))
    assert canonical_json(serialize_document(d2)) == canonical_json(s1)
    assert [set(l) for l in d1.complex.base.levels] == [set(l) for l in d2.complex.base.levels]
    _same_system(d1.coefficients, d2.coefficients)


def test_digest_ignores_key_order():
    assert digest({"a": 1, "b": [1, 2]}) == digest({"b": [1, 2], "a": 1})


def test_referential_integrity_error():
    doc = {"complex": {"truncation": 2, "simplices": {"0": ["v"], "1": {"e": ["v", "w"]}}}}
    with pytest.raises(SchemaError) as exc:
        parse_document(doc)
    assert "'w'" in str(exc.value) and exc.value.where.startswith("complex")


@pytest.mark.parametrize("doc,where", [
    ({}, "document.complex"),
    ({"complex": {"truncation": 0, "simplices": {}}}, "complex.truncation"),
    ({"complex": {"truncation": 2, "simplices": {"0": ["v"]}, "action": {"g": {}}}}, "complex.action.g"),
    ({"complex": {"truncation": 2, "simplices": {"0": ["v"]}}, "coefficients": {"ring": "R"}},
     "coefficients.ring"),
    ({"complex": {"truncation": 2, "simplices": {"0": ["v"], "1": {"e": ["v", "v"]}}},
      "coefficients": {"edges": [{"subgroup": ["e"], "edge": "e", "matrix": [[1, 2], [3]]}]}},
     "coefficients.edges[0].matrix"),
])
def test_schema_errors_are_located(doc, where):
    with pytest.raises(SchemaError) as exc:
        parse_document(doc)
    assert exc.value.where == where


def run(args, capsys):
    code = main(args)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize("name", FIXTURE_NAMES)
def test_validate_fixtures(name, capsys):
    assert run(["validate", name], capsys)[0] == 0


@pytest.mark.parametrize("name,needle", [
    ("s1_2_broken_identity", "∂0∂2"),
    ("t2_bad_relation", "2-simplex U"),
    ("s1_2_nonequivariant", "does not commute with t"),
    ("unknown_face", "'w'"),
])
def test_validate_mutations(name, needle, capsys):
    code, out, err = run(["validate", str(FIXTURES / "mutations" / f"{name}.json")], capsys)
    assert code == 2
    assert needle in out + err


def test_cohomology_command(tmp_path, capsys):
    out = tmp_path / "r.json"
    code, text, _ = run(["cohomology", "s1_twisted", "--degrees", "0..1", "--json", str(out)], capsys)
    assert code == 0 and "ℤ/2" in text
    rep = json.loads(out.read_text())
    assert rep["cohomology"] == {"0": {"rank": 0, "torsion": []}, "1": {"rank": 0, "torsion": [2]}}
    assert rep["digest"] == digest(load_json(FIXTURES / "s1_twisted.json"))
    code, text, _ = run(["cohomology", "point_z2_constant", "--degrees", "0"], capsys)
    assert code == 0 and "H^0 = ℤ" in text


def test_ring_override(capsys):
    code, text, _ = run(["cohomology", "k2_constant", "--ring", "Fp:2"], capsys)
    assert code == 0 and "H^1 = F_2^2" in text and "H^2 = F_2" in text


def test_eilenberg_command(capsys):
    for name in ("s1_twisted", "w2_swap_twisted", "t2_constant"):
        code, text, _ = run(["eilenberg", name], capsys)
        assert code == 0 and "agree" in text
    code, _, err = run(["eilenberg", "s1_2"], capsys)
    assert code == 2 and "NotOneVertex" in err


def test_serre_command(capsys):
    for name in ("product_t2_s1", "identity_t2", "double_cover_s1"):
        code, text, _ = run(["serre", name, "--rmax", "3"], capsys)
        assert code == 0 and "agree" in text
    code, _, err = run(["serre", "t2_constant"], capsys)
    assert code == 2
    code, _, err = run(["serre", "product_t2_s1", "--field", "Z"], capsys)
    assert code == 2 and "field" in err


def test_truncation_and_degree_errors(capsys):
    assert run(["cohomology", "s1", "--degrees", "0..5"], capsys)[0] == 2
    assert run(["cohomology", "s1", "--degrees", "x"], capsys)[0] == 2
    assert run(["validate", "no_such_file.json"], capsys)[0] == 2


def test_reports_are_deterministic(tmp_path):
    outs = []
    for k in range(2):
        p = tmp_path / f"r{k}.json"
        res = subprocess.run([sys.executable, "-m", "equicohom", "eilenberg", "t2_twisted", "--seed", "3",
                              "--json", str(p)], capture_output=True, text=True)
        assert res.returncode == 0
        outs.append((res.stdout, p.read_bytes()))
    assert outs[0] == outs[1]


def test_timing_is_opt_in(tmp_path, capsys):
    p = tmp_path / "t.json"
    run(["cohomology", "s1", "--json", str(p)], capsys)
    assert "seconds" not in json.loads(p.read_text())
    run(["cohomology", "s1", "--json", str(p), "--timing"], capsys)
    assert "seconds" in json.loads(p.read_text())


def test_size_guard_flag(capsys):
    code, _, err = run(["cohomology", "t2_constant", "--size-guard", "5"], capsys)
    assert code == 2 and "guard" in err


def test_report_records_config(tmp_path, capsys):
    out = tmp_path / "r.json"
    run(["cohomology", "s1", "--seed", "7", "--json", str(out)], capsys)
    cfg = json.loads(out.read_text())["config"]
    assert cfg["seed"] == 7 and cfg["size_guard"] == 50_000 and cfg["ring"] is None
