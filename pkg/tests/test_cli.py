import io
import json

import jsonschema
import pytest

from exactum.cli import EXIT, REPORT_SCHEMA, Report, run


def call(*argv, env=None):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


def call_json(*argv):
    code, out, err = call(*argv, "--json")
    data = json.loads(out)
    jsonschema.validate(data, REPORT_SCHEMA)
    assert Report.from_json(data).exit_code == code
    return code, data


def test_ccc_refuted_on_m3():
    code, data = call_json("check", "ccc", "m3")
    assert code == 1 and data["verdict"] == "refuted"
    span = data["payload"]["witness"]["span"]
    assert [span[0][1], span[0][0], span[1][1]] == ["T", "0", "p"]


def test_ccc_holds_on_chain2():
    code, data = call_json("check", "ccc", "chain2")
    assert code == 0 and data["payload"]["routes"] == {"oracle": "found", "projective": "found"}


def test_capped_check_is_undecided():
    code, data = call_json("check", "ccc", "free-gsets", "--cap", "2")
    assert code == 2 and data["caps"]["cap"] == 2


@pytest.mark.parametrize("argv", [
    ("check", "ccc", "m3"),
    ("check", "lccc", "diamond"),
    ("check", "wsp", "m3", "--span", "0>T,0>p"),
    ("check", "psp", "chain2", "--span", "0>1,0>0"),
    ("check", "gwsp", "m3", "--span", "0>T,0>p", "--rel", "equality", "--weak-mode"),
    ("check", "gwdp", "chain2"),
    ("check", "projectivity", "diamond"),
    ("exp", "chain2", "gamma:0", "gamma:1"),
    ("exp", "m3", "gamma:p", "gamma:q", "--method", "gwsp"),
    ("complete", "diamond"),
])
def test_text_and_json_agree(argv):
    code, text, _ = call(*argv)
    jcode, data = call_json(*argv)
    assert code == jcode == EXIT[data["verdict"]]
    assert f"verdict: {data['verdict']}" in text.splitlines()


def test_exponential_methods_agree():
    code, data = call_json("exp", "diamond", "gamma:l", "gamma:r")
    assert code == 0
    objs = {data["payload"][m]["object"] for m in ("gwsp", "reduct", "oracle")}
    assert objs == {"Γ('r')"}


def test_gen_then_validate(tmp_path):
    path = tmp_path / "m3.cat"
    code, _, _ = call("gen", "m3", "--out", str(path))
    assert code == 0 and path.read_text().startswith("category")
    code, data = call_json("validate", str(path))
    assert code == 0 and data["payload"]["objects"] == 5
    code, data = call_json("check", "ccc", str(path))
    assert code == 1


def test_invalid_table(tmp_path):
    bad = tmp_path / "bad.cat"
    bad.write_text("category bad\nobject x\narrow e : x -> x\n")
    code, data = call_json("validate", str(bad))
    assert code == 1 and data["payload"]["violations"][0]["law"] == "totality"
    code, _, err = call("check", "ccc", str(bad))
    assert code == 3 and "totality" in err


def test_parse_error_exits_3(tmp_path):
    bad = tmp_path / "broken.cat"
    bad.write_text("category b\nobject x\ncompose f . g = h\n")
    code, _, err = call("validate", str(bad))
    assert code == 3 and "line 3" in err


@pytest.mark.parametrize("argv", [
    ("check", "ccc", "nosuch"),
    ("check", "wsp", "m3", "--span", "0>T"),
    ("check", "wsp", "m3", "--span", "p>q,0>p"),
    ("exp", "m3", "gamma:z", "gamma:p"),
    ("suite", "/nonexistent/corpus"),
    ("frobnicate",),
])
def test_bad_input_exits_3(argv):
    code, _, err = call(*argv)
    assert code == 3 and err.startswith("exactum: error")


def test_bad_env_cap(monkeypatch):
    monkeypatch.setenv("EXACTUM_DEFAULT_CAP", "lots")
    code, _, err = call("check", "ccc", "finset")
    assert code == 3 and "EXACTUM_DEFAULT_CAP" in err


def test_env_cap_is_used(monkeypatch):
    monkeypatch.setenv("EXACTUM_DEFAULT_CAP", "2")
    code, data = call_json("complete", "finset")
    assert data["caps"]["cap"] == 2


def test_relation_file(tmp_path):
    rels = tmp_path / "rels.txt"
    # arrows 4 -> 2 in hom order: #3 is (0,0,1,1) and #5 is (0,1,0,1)
    rels.write_text("# relations over finite sets\nrel chaos on 4 => 2 : 4>2#3, 4>2#5\n"
                    "rel skew on 4 => 2 : 4>2#1, 4>2#2\n")
    code, data = call_json("check", "projectivity", "finset", "--cap", "4", "--object", f"rel:{rels}#chaos")
    # the quotient is a point, a retract of Γ1; internal projectivity needs 4 x 4 > cap
    assert code == 2
    [row] = data["payload"]["objects"].values()
    assert row == {"projective": "found", "internally_projective": "undecided"}
    code, _, err = call("check", "projectivity", "finset", "--cap", "4", "--object", f"rel:{rels}#skew")
    assert code == 3 and "not a pseudo equivalence relation" in err
    code, _, err = call("check", "projectivity", "finset", "--cap", "4", "--object", f"rel:{rels}#other")
    assert code == 3 and "no relation" in err


def test_empty_corpus(tmp_path):
    code, _, err = call("suite", str(tmp_path))
    assert code == 3 and "no fixture configs" in err


def test_small_suite(tmp_path):
    (tmp_path / "m3.json").write_text(json.dumps({"name": "m3", "fixture": "m3",
                                                  "expected": {"ccc": "refuted", "lccc": "refuted"}}))
    (tmp_path / "chain2.json").write_text(json.dumps({"name": "chain2", "fixture": "chain2",
                                                      "expected": {"ccc": "holds"}}))
    code, data = call_json("suite", str(tmp_path))
    assert code == 0
    assert data["payload"]["summary"] == {"chain2": "holds", "m3": "holds"}
    code2, text, _ = call("suite", str(tmp_path), "--jobs", "2")
    assert code2 == 0 and "m3: holds" in text


def test_suite_reports_unexpected_verdict(tmp_path):
    (tmp_path / "m3.json").write_text(json.dumps({"name": "m3", "fixture": "m3", "expected": {"ccc": "holds"}}))
    code, data = call_json("suite", str(tmp_path))
    assert code == 1


def test_malformed_config(tmp_path):
    (tmp_path / "x.json").write_text("{not json")
    code, _, err = call("suite", str(tmp_path))
    assert code == 3 and "line 1" in err


def test_category_without_weak_products(tmp_path):
    vee = tmp_path / "vee.cat"
    vee.write_text("category vee\nobject a\nobject b\nobject t\narrow u : a -> t\narrow v : b -> t\n")
    code, _, err = call("check", "ccc", str(vee))
    assert code == 3 and "precondition" in err
