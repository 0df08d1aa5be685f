import json

import pytest

from exactum.invariants import (
    DEFAULT_CORPUS, Context, FixtureSpec, _sample, check_closure, run_fixture, write_default_corpus,
)
from exactum.results import InputError


def test_default_corpus_roundtrips(tmp_path):
    paths = write_default_corpus(tmp_path)
    assert [p.stem for p in paths] == [s.name for s in DEFAULT_CORPUS]
    for spec, path in zip(DEFAULT_CORPUS, paths):
        assert FixtureSpec.from_json(json.loads(path.read_text())) == spec


def test_config_needs_a_fixture():
    with pytest.raises(InputError):
        FixtureSpec.from_json({"name": "x"})


def test_sampling_is_deterministic():
    items = list(range(100))
    assert _sample(items, 10) == _sample(items, 10)
    assert _sample(items, 200) == items


def test_unexpected_verdict_fails():
    spec = FixtureSpec("m3", "m3", expected={"ccc": "holds"})
    c = check_closure(Context.of(spec), local=False)
    assert c.status == "fail" and c.details["verdict"] == "refuted"


def test_selected_checks_only():
    spec = FixtureSpec("two", "two-infinities", k=2)
    names = [c.name for c in run_fixture(spec, only=["ccc", "truncation"])]
    assert names == ["ccc", "truncation"]


def test_full_run_on_a_small_fixture():
    checks = run_fixture(FixtureSpec("diamond", "diamond", expected={"ccc": "holds", "lccc": "holds"}))
    assert {c.status for c in checks} == {"pass"}
