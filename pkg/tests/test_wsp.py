import pytest

from exactum.catprovider import load_fixture, make_finset
from exactum.construct import gwdp_instances, gwsp_instances
from exactum.excomp import ExCompletion, is_projective, projectivity_report
from exactum.invariants import all_spans, span_equality, _same_class
from exactum.relation import PseudoEqRel, identity_relation
from exactum.results import PreconditionError, Verdict
from exactum.wsp import (
    UNDEFINED_NO_WSP, Mode, coequalises, factor_diagram, gwe_via_gwsp, same_class,
    search_gw_dependent_product, search_gw_exponential, search_gwsp, search_pseudo_simple_product,
    search_weak_simple_product, slice_gwsp_instance, wx_adjunction_check,
)

TOP_P = (("0", "T", None), ("0", "p", None))


@pytest.fixture(scope="module")
def m3():
    return load_fixture("m3")


def test_chain2_simple_product():
    c = load_fixture("chain2")
    r = search_weak_simple_product(c, ("0", "1", None), ("0", "0", None))
    assert r.found and r.witness.W == "1" and r.certificate.exhaustive


def test_m3_failing_span(m3):
    f, g = TOP_P
    for r in (search_weak_simple_product(m3, f, g), search_pseudo_simple_product(m3, f, g),
              search_gwsp(m3, f, g, identity_relation(m3, "0"))):
        assert r.verdict is Verdict.NOT_FOUND and r.certificate.exhaustive


def test_gsets_product_span():
    g = load_fixture("free-gsets")
    p1, p2 = g.analytic_product(1, 1)[1]
    r = search_weak_simple_product(g, p1, p2)
    assert r.found and not r.certificate.exhaustive
    assert search_pseudo_simple_product(g, p1, p2).found


@pytest.mark.parametrize("name", ["chain2", "diamond", "m3"])
def test_thin_psp_equals_wsp(name):
    p = load_fixture(name)
    for f, g in all_spans(p):
        a, b = search_weak_simple_product(p, f, g), search_pseudo_simple_product(p, f, g)
        assert _same_class(p, a, b)


@pytest.mark.parametrize("name", ["chain2", "m3", "two-infinities"])
def test_mode_coherence(name):
    p = load_fixture(name, k=2)
    for f, g in all_spans(p):
        ident = identity_relation(p, f[0])
        assert _same_class(p, search_weak_simple_product(p, f, g), search_gwsp(p, f, g, ident))
        eq = span_equality(p, f, g)
        assert _same_class(p, search_pseudo_simple_product(p, f, g), search_gwsp(p, f, g, eq))


def test_weak_mode_output_is_strong(m3):
    for f, g, rel in gwsp_instances(m3):
        strong = search_gwsp(m3, f, g, rel)
        weak = search_gwsp(m3, f, g, rel, weak_mode=True)
        assert weak.verdict == strong.verdict
        if weak.found:
            assert factor_diagram(m3, strong.witness, weak.witness) is not None


def test_gwsp_precondition():
    s = make_finset(2)
    # the chaotic relation on 2 is not coequalised by the identity
    chaos = PseudoEqRel(2, 2, (2, 2, (0, 1)), (2, 2, (1, 0)))
    assert not coequalises(s, s.identity(2), chaos)
    with pytest.raises(PreconditionError):
        search_gwsp(s, s.identity(2), s.identity(2), chaos)


def test_gw_exponentials(m3):
    c = load_fixture("chain2")
    r = search_gw_exponential(c, "0", identity_relation(c, "0"))
    assert r.found and r.witness.W == "1" and r.witness.mode is Mode.GWE
    assert search_gw_exponential(m3, "p", identity_relation(m3, "q")).verdict is Verdict.NOT_FOUND
    s = make_finset(2)
    r = search_gw_exponential(s, 1, identity_relation(s, 2))
    assert r.found and r.witness.W == 2
    via = gwe_via_gwsp(s, 1, identity_relation(s, 2))
    assert via.found and same_class(s, r.witness, via.witness)


def test_gw_exponential_capped_in_gsets():
    g = load_fixture("free-gsets")
    r = search_gw_exponential(g, 1, identity_relation(g, 1))
    assert r.verdict is Verdict.UNDECIDED


@pytest.mark.parametrize("name", ["chain2", "diamond", "m3"])
def test_gwe_routes_agree(name):
    p = load_fixture(name)
    for x in p.objects():
        for y in p.objects():
            rel = identity_relation(p, y)
            a, b = search_gw_exponential(p, x, rel), gwe_via_gwsp(p, x, rel)
            assert a.verdict == b.verdict
            if a.found:
                assert same_class(p, a.witness, b.witness)


def test_dependent_products(m3):
    c = load_fixture("chain2")
    assert all(search_gw_dependent_product(c, *i).found for i in gwdp_instances(c))
    bad = [i for i in gwdp_instances(m3) if not search_gw_dependent_product(m3, *i).found]
    assert [(g, f) for _, g, f in bad] == [
        (("0", x, None), (x, "T", None)) for x in "pqr"
    ]
    with pytest.raises(PreconditionError):
        search_gw_dependent_product(m3, identity_relation(m3, "0"), ("0", "p", None), ("q", "T", None))


@pytest.mark.parametrize("name, stride", [("m3", 1), ("diamond", 1), ("free-gsets", 166)])
def test_slice_reduction_agrees(name, stride):
    p = load_fixture(name)
    found = 0
    for rel, g, f in list(gwdp_instances(p))[::stride][:20]:
        direct = search_gw_dependent_product(p, rel, g, f)
        s, span_f, span_g, srel = slice_gwsp_instance(p, rel, g, f)
        sliced = search_gwsp(s, span_f, span_g, srel)
        assert direct.verdict == sliced.verdict
        found += direct.found
    assert found > 0


def test_wx_chain2():
    e = ExCompletion(load_fixture("chain2"))
    r = wx_adjunction_check(e, "1", "1")
    assert r.found and r.witness.defined
    assert projectivity_report(e, e.gamma("1")).internally_projective is Verdict.FOUND


def test_wx_m3_undefined():
    e = ExCompletion(load_fixture("m3"))
    r = wx_adjunction_check(e, "T", "p")
    assert r.verdict is Verdict.NOT_FOUND and r.reason == UNDEFINED_NO_WSP


def test_wx_gsets():
    e = ExCompletion(load_fixture("free-gsets"), 2)
    r = wx_adjunction_check(e, 1, 1)
    assert r.found and not r.certificate.exhaustive
    assert is_projective(e, e.gamma(2))
