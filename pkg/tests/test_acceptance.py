"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Run directly with ``python3 tests/test_acceptance.py`` or through pytest.
"""
import subprocess
import sys
import time

import pytest

from conftest import record
from exactum.catprovider import load_fixture
from exactum.construct import decide_cartesian_closure
from exactum.invariants import (
    DEFAULT_CORPUS, Context, embedding, exactness, exponential_agreement, galois_suite,
    internal_projectivity_suite, mode_coherence, truncation_degeneracy, write_default_corpus,
)
from exactum.results import Verdict

SPECS = {s.name: s for s in DEFAULT_CORPUS}
CCC_FIXTURES = [n for n, s in SPECS.items() if s.expected.get("ccc") == "holds"]
_contexts = {}


def ctx(name):
    if name not in _contexts:
        _contexts[name] = Context.of(SPECS[name])
    return _contexts[name]


def test_criterion_1_ccc_routes_agree():
    t = time.perf_counter()
    expected = {"chain2": True, "diamond": True, "m3": False}
    rows, ok = [], True
    for name, want in expected.items():
        v = decide_cartesian_closure(load_fixture(name))
        agree = v.routes["projective"] == v.routes["oracle"]
        ok &= agree and v.value is want
        rows.append(f"{name}={v.value}")
        if name == "m3":
            wit = v.witnesses["projective"]
            (f, g), rel = wit["span"], wit["rel"]
            ok &= (f[0], f[1], g[1]) == ("0", "T", "p")
            ok &= rel.x1 == rel.x0 == "0" and rel.d0 == rel.d1
    elapsed = time.perf_counter() - t
    ok &= elapsed < 10
    record(1, ok, f"{' '.join(rows)} in {elapsed:.2f}s")
    assert ok


def test_criterion_2_exponentials_agree():
    names = CCC_FIXTURES + ["free-gsets-z2", "finset-3"]
    t = time.perf_counter()
    pairs, failures = 0, []
    for name in names:
        c = exponential_agreement(ctx(name))
        pairs += c.details["isomorphic_pairs"]
        failures += c.details["failures"]
    elapsed = time.perf_counter() - t
    ok = pairs >= 20 and not failures and elapsed < 300
    record(2, ok, f"{pairs} isomorphic pairs, {len(failures)} failures, {elapsed:.1f}s")
    assert ok, failures


def test_criterion_3_internal_projectivity():
    failures, decided = [], 0
    for name in SPECS:
        c = internal_projectivity_suite(ctx(name))
        failures += c.details["failures"]
        decided += c.decided
    ok = not failures and decided > 0
    record(3, ok, f"{decided} decided instances, {len(failures)} exceptions")
    assert ok, failures


def test_criterion_4_mode_coherence():
    n, decided, failures = 0, 0, []
    for name in SPECS:
        c = mode_coherence(ctx(name))
        n += c.instances
        decided += c.decided
        failures += c.details["failures"]
    ok = decided >= 50 and not failures
    record(4, ok, f"{decided}/{n} spans coherent")
    assert ok, failures


def test_criterion_5_exactness():
    notes, ok = [], True
    for name in SPECS:
        c = exactness(ctx(name))
        # a fixture whose whole instance population is below 30 is checked exhaustively
        enough = c.decided >= 30 or c.decided == c.details["population"]
        ok &= enough and not c.details["failures"]
        notes.append(f"{name}:{c.decided}")
    record(5, ok, " ".join(notes))
    assert ok


def test_criterion_6_embedding():
    failures = []
    for name in SPECS:
        c = embedding(ctx(name))
        failures += c.details["failures"]
    record(6, not failures, f"{len(SPECS)} fixtures, {len(failures)} failures")
    assert not failures, failures


def test_criterion_7_truncation():
    c = truncation_degeneracy(6)
    ok = c.status == "pass" and c.decided == 6
    record(7, ok, "ya x yb represented by the chain top for k=1..6")
    assert ok, c.details


def test_criterion_8_galois():
    failures, decided = [], 0
    for name in SPECS:
        c = galois_suite(ctx(name))
        failures += c.details["failures"]
        decided += c.decided
    ok = not failures and decided > 0
    record(8, ok, f"{decided} inequalities checked, {len(failures)} failures")
    assert ok, failures


def _suite(corpus, jobs):
    cmd = [sys.executable, "-m", "exactum", "suite", str(corpus), "--jobs", str(jobs), "--json"]
    return subprocess.run(cmd, capture_output=True, check=False)


@pytest.mark.slow
def test_criterion_9_determinism(tmp_path):
    write_default_corpus(tmp_path)
    runs = [_suite(tmp_path, 1), _suite(tmp_path, 1), _suite(tmp_path, 3)]
    outs = [r.stdout for r in runs]
    ok = all(r.returncode == 0 for r in runs) and outs[0] == outs[1] == outs[2] and outs[0]
    record(9, bool(ok), f"{len(outs[0])} bytes, identical across 2 runs and --jobs 1/3")
    assert ok, [r.stderr.decode()[-500:] for r in runs]


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-s"]))
