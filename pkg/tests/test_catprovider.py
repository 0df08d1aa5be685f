import pytest

from exactum.catprovider import (
    FreeGSets, cyclic_group, load_fixture, make_finset, make_free_gsets, make_m3,
    make_two_infinities, parse_group, representable_product, Z2_SPEC,
)
from exactum.fincat import slice_category
from exactum.results import InputError


def _laws(c, limit=400):
    arrows = c.arrows()[:limit]
    for f in arrows:
        assert c.compose(f, c.identity(f[0])) == f
        assert c.compose(c.identity(f[1]), f) == f
    for f in arrows[:40]:
        for g in c.hom(f[1], f[1])[:6]:
            for h in c.hom(f[1], f[1])[:6]:
                assert c.compose(h, c.compose(g, f)) == c.compose(c.compose(h, g), f)


@pytest.mark.parametrize("name", ["one", "chain2", "diamond", "m3", "two-infinities", "finset", "free-gsets"])
def test_fixture_laws(name):
    _laws(load_fixture(name))


def test_m3_meets():
    m3 = make_m3()
    assert m3.meet("p", "q") == "0"
    assert m3.meet("p", "T") == "p"


def test_two_infinities_shape():
    t = make_two_infinities(4)
    assert not t.leq("a", "b") and not t.leq("b", "a")
    assert all(t.leq(str(n), "a") and t.leq(str(n), "b") for n in range(5))
    assert t.meet("a", "b") == "4"


def test_representable_product_over_truncation():
    t = make_two_infinities(3)
    prod, m = representable_product(t, "a", "b")
    assert m == "3"
    assert prod.carriers["a"] == frozenset() and prod.carriers["b"] == frozenset()
    assert all(len(prod.carriers[str(n)]) == 1 for n in range(4))
    assert prod.is_functorial()
    with pytest.raises(InputError):
        representable_product(t, "a", "z")


def test_group_parsing():
    g = parse_group(Z2_SPEC)
    assert g.order == 2 and g.mul(1, 1) == 0 and g.inverse(1) == 1
    assert cyclic_group(3).mul(2, 2) == 1
    with pytest.raises(InputError):
        parse_group("group bad\nelements e,a\nmul a*a = a\n")
    with pytest.raises(InputError):
        parse_group("group bad\nelements e,a\nmul a*b = e\n")


def test_free_gsets_hom_counts():
    g = make_free_gsets(parse_group(Z2_SPEC), 2)
    # an equivariant map out of n free orbits picks an image for each generator
    assert [len(g.hom(1, m)) for m in range(3)] == [0, 2, 4]
    assert len(g.hom(0, 2)) == 1
    assert g.analytic_product(1, 1)[0] == 2


def test_free_gsets_act_is_equivariant():
    g = FreeGSets(cyclic_group(3), 2)
    for f in g.hom(1, 2):
        for h in range(3):
            assert g.act(f, (h, 0)) == (g.group.mul(h, f[2][0][0]), f[2][0][1])


def test_finset_products():
    s = make_finset(4)
    n, (p1, p2) = s.analytic_product(2, 2)
    assert n == 4 and len(set(zip(p1[2], p2[2]))) == 4
    assert s.analytic_product(2, 3) is None


def test_slice_of_free_gsets():
    g = load_fixture("free-gsets")
    s, _ = slice_category(g, 1)
    assert all(o[1][1] == 1 for o in s.objects())
    assert len(s.objects()) == 1 + 2 + 4


def test_unknown_fixture():
    with pytest.raises(InputError):
        load_fixture("nope")
    with pytest.raises(InputError):
        make_finset(0)
