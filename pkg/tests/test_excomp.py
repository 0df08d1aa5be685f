import pytest

from exactum.catprovider import load_fixture, make_finset
from exactum.excomp import (
    ExCompletion, analyze_arrow, covers_in, embed_projectives, enumerate_ex_objects, ex_hom,
    ex_kernel_pair, ex_product, image_factorisation, is_coequaliser, is_mono, is_mono_by_enumeration,
    is_projective, is_projective_by_lifting, is_quasi_exact, projectivity_report, subobjects,
    subobject_isomorphism, kernel_pair_exactness, image_pullback_stability, enough_projectives,
)
from exactum.relation import find_pseudo_eq_rel, identity_relation, is_transitive, with_witnesses
from exactum.results import Verdict


@pytest.fixture(scope="module")
def gsets():
    return ExCompletion(load_fixture("free-gsets"), 2)


@pytest.fixture(scope="module")
def chain2():
    return ExCompletion(load_fixture("chain2"))


def _chaos(e):
    return next(o for o in e.objects() if o.x0 == 1 and o.d0 != o.d1)


def test_relation_witnesses():
    s = make_finset(4)
    r = find_pseudo_eq_rel(s, (4, 2, (0, 0, 1, 1)), (4, 2, (0, 1, 0, 1)))
    assert r is not None and is_transitive(s, r)
    # a redundant relation small enough for its weak pullback to fit the cap
    s = make_finset(5)
    r = find_pseudo_eq_rel(s, (3, 2, (0, 1, 1)), (3, 2, (0, 1, 1)))
    cone, t = with_witnesses(s, r).trans
    assert s.compose(r.d0, t) == s.compose(r.d0, cone.legs[0])
    assert s.compose(r.d1, t) == s.compose(r.d1, cone.legs[1])
    # a non-symmetric pair is rejected
    assert find_pseudo_eq_rel(s, (2, 2, (0, 1)), (2, 2, (1, 1))) is None


def test_object_counts():
    assert len(enumerate_ex_objects(load_fixture("one"))) == 1
    assert len(enumerate_ex_objects(load_fixture("chain2"))) == 2


def test_gsets_objects_include_the_point(gsets):
    chaos = _chaos(gsets)
    # the quotient of a free orbit by everything is the one-point G-set
    assert gsets.find_iso(chaos, gsets.gamma(1)) is None
    assert len(gsets.hom(chaos, chaos)) == 1
    assert len(gsets.objects()) == 4


def test_hom_counts(gsets, chain2):
    assert len(ex_hom(chain2, chain2.gamma("0"), chain2.gamma("1"))) == 1
    assert len(ex_hom(gsets, gsets.gamma(1), gsets.gamma(1))) == 2
    # a fixed point cannot map equivariantly into a free G-set
    assert len(ex_hom(gsets, _chaos(gsets), gsets.gamma(2))) == 0


def test_embedding_full_and_faithful(gsets, chain2):
    for e in (gsets, chain2):
        gamma = embed_projectives(e)
        assert gamma.violations() == [] and gamma.is_full_and_faithful()
        assert enough_projectives(e) == []


def test_canonical_cover_of_the_point(gsets):
    a = analyze_arrow(gsets, gsets.cover(_chaos(gsets)))
    assert a.regular_epi and not a.split_epi and a.mono is False and not a.iso


def test_kernel_pair_of_cover_is_the_relation(gsets):
    chaos = _chaos(gsets)
    cone = ex_kernel_pair(gsets, gsets.cover(chaos)).witness.cone
    assert (cone.legs[0].rep, cone.legs[1].rep) == (chaos.d0, chaos.d1)
    assert kernel_pair_exactness(gsets, gsets.cover(chaos)).found


def test_products(gsets, chain2):
    g = gsets.gamma(1)
    prod = ex_product(gsets, g, g).witness.cone
    assert gsets.find_iso(prod.apex, gsets.gamma(2)) is not None
    prod = ex_product(chain2, chain2.gamma("0"), chain2.gamma("1")).witness.cone
    assert chain2.find_iso(prod.apex, chain2.gamma("0")) is not None


def test_gamma_does_not_preserve_weak_products():
    e = ExCompletion(make_finset(3))
    one = e.gamma(1)
    prod = ex_product(e, one, one).witness.cone
    # Γ2 with both legs constant is a weak product in the base but not a product
    assert e.find_iso(prod.apex, e.gamma(2)) is None


def test_image_factorisations(chain2):
    f = chain2.gamma_arrow(("0", "1", None))
    q, m = image_factorisation(chain2, f).witness
    assert q == chain2.identity(chain2.gamma("0")) and m == f
    i = chain2.identity(chain2.gamma("1"))
    assert image_factorisation(chain2, i).witness == (i, i)


def test_fold_is_its_own_image():
    e = ExCompletion(load_fixture("free-gsets", cap=4), 4)
    fold = e.gamma_arrow((2, 1, ((0, 0), (0, 0))))
    q, m = image_factorisation(e, fold).witness
    assert e.is_iso(m) is not None


def test_fold_image_is_capped_below_four(gsets):
    fold = gsets.gamma_arrow((2, 1, ((0, 0), (0, 0))))
    assert image_factorisation(gsets, fold).verdict is Verdict.UNDECIDED


def test_mono_not_epi_in_chain2(chain2):
    f = chain2.gamma_arrow(("0", "1", None))
    a = analyze_arrow(chain2, f)
    assert a.mono and not a.regular_epi and not a.iso
    assert is_mono(chain2, f).found == is_mono_by_enumeration(chain2, f)


def test_identity_is_iso(gsets):
    a = analyze_arrow(gsets, gsets.identity(gsets.gamma(1)))
    assert a.iso and a.mono and a.regular_epi and a.split_epi


def test_cover_is_quasi_exact(gsets):
    chaos = _chaos(gsets)
    cov = gsets.cover(chaos)
    k1 = gsets.arrow(gsets.gamma(2), gsets.gamma(1), chaos.d0)
    k2 = gsets.arrow(gsets.gamma(2), gsets.gamma(1), chaos.d1)
    assert is_coequaliser(gsets, k1, k2, cov)
    assert is_quasi_exact(gsets, k1, k2, cov).found


def test_subobject_lattices(gsets, chain2):
    m3 = ExCompletion(load_fixture("m3"))
    lat = subobjects(m3, m3.gamma("T")).witness
    assert len(lat) == 5 and lat.is_antisymmetric() and lat.meet(1, 2) == lat.bottom
    assert len(subobjects(gsets, gsets.gamma(1)).witness) == 2
    lat = subobjects(chain2, chain2.gamma("1")).witness
    assert len(lat) == 2 and lat.leq(lat.bottom, lat.top)
    for e, x in ((m3, "T"), (chain2, "1"), (gsets, 1)):
        assert subobject_isomorphism(e, x).found


def test_projectivity(gsets, chain2):
    for a in chain2.objects():
        rep = projectivity_report(chain2, a)
        assert rep.projective is Verdict.FOUND and rep.internally_projective is Verdict.FOUND
    for x in (0, 1, 2):
        assert is_projective(gsets, gsets.gamma(x))
        assert is_projective_by_lifting(gsets, gsets.gamma(x))[0]
    chaos = _chaos(gsets)
    assert not is_projective(gsets, chaos)
    assert is_projective_by_lifting(gsets, chaos)[0] is False


def test_images_stable_under_pullback(chain2):
    f = chain2.gamma_arrow(("0", "1", None))
    g = chain2.identity(chain2.gamma("1"))
    assert image_pullback_stability(chain2, f, g).found


def test_covers_are_regular_epis(gsets):
    assert all(analyze_arrow(gsets, c).regular_epi for c in covers_in(gsets))


def test_identity_relation_roundtrip(gsets):
    r = identity_relation(gsets.base, 1)
    assert r == gsets.gamma(1) and repr(r) == "Γ(1)"
