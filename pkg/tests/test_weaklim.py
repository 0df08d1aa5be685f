from itertools import product

from exactum.catprovider import load_fixture, make_finset, make_m3
from exactum.fincat import FinCategory
from exactum.weaklim import (
    Cone, Diagram, all_cones, cone_preorder, equalities_for_weak_product, equality_for_weak_product,
    factorization, is_determined_by_projections, is_weakly_terminal, preserves_projections,
    recertify, weak_limit, weak_product, weak_terminal,
)
from exactum.relation import PseudoEqRel, find_pseudo_eq_rel
from exactum.results import Verdict

# finite sets: 3 -> (2, 1) with elements 0 and 2 sharing their projections
INFLATED = Cone(3, ((3, 2, (0, 1, 0)), (3, 1, (0, 0, 0))))


def test_m3_product_is_the_meet():
    m3 = make_m3()
    r = weak_product(m3, "p", "q")
    assert r.found and r.witness.apex == "0"
    assert r.certificate.exhaustive and recertify(m3, Diagram.discrete(("p", "q")), r.witness)


def test_m3_terminal():
    assert weak_terminal(make_m3()).witness.apex == "T"


def test_gsets_equalizer_of_distinct_maps_is_empty():
    g = load_fixture("free-gsets")
    f, h = g.hom(1, 1)
    r = weak_limit(g, Diagram.parallel(f, h))
    assert r.found and r.witness.apex == 0


def test_cone_preorders():
    pre = cone_preorder(make_m3(), ("p", "q"))
    assert len(pre.classes) == 1
    g = load_fixture("free-gsets")
    pre = cone_preorder(g, (1, 1))
    top = pre.cones[pre.classes[pre.top_class()][0]]
    assert top.apex == 2 and top == weak_product(g, 1, 1).witness
    assert not pre.exhaustive


def _function_category():
    """Sets of size 1 and 2 with all functions: finite but not thin."""
    sizes = {"s1": 1, "s2": 2}
    arrows, data = [], {}
    for a, b in product(sizes, repeat=2):
        for t in product(range(sizes[b]), repeat=sizes[a]):
            if a == b and t == tuple(range(sizes[a])):
                continue
            name = f"{a}_{b}_{''.join(map(str, t))}"
            arrows.append((name, a, b))
            data[name] = t
    ident = {a: tuple(range(n)) for a, n in sizes.items()}

    def named(a, b, t):
        return None if a == b and t == ident[a] else f"{a}_{b}_{''.join(map(str, t))}"

    comp = {}
    for g, gs, gt in arrows:
        for f, fs, ft in arrows:
            if ft == gs:
                t = tuple(data[g][i] for i in data[f])
                h = named(fs, gt, t)
                comp[(g, f)] = h if h is not None else f"id:{fs}"
    return FinCategory("fun12", ("s1", "s2"), tuple(arrows), comp)


def test_non_thin_table_has_no_weak_binary_product():
    c = _function_category()
    h = c.as_handle()
    assert not h.thin
    r = weak_product(h, "s2", "s2")
    assert r.verdict is Verdict.NOT_FOUND and r.certificate.exhaustive


def test_inflated_weak_product():
    s = make_finset(5)
    d = Diagram.discrete((2, 1))
    ok, _ = is_weakly_terminal(s, d, INFLATED)
    assert ok
    assert is_determined_by_projections(s, INFLATED, INFLATED.legs[0]).found
    split = is_determined_by_projections(s, INFLATED, (3, 2, (0, 1, 1)))
    assert split.verdict is Verdict.NOT_FOUND
    h, k = split.witness
    assert all(s.compose(lg, h) == s.compose(lg, k) for lg in INFLATED.legs)


def test_equality_identifies_the_two_preimages():
    s = make_finset(5)
    eq = equality_for_weak_product(s, INFLATED).witness
    pairs = {(u[2], v[2]) for u, v in eq.related_pairs(s, 1)}
    assert ((0,), (2,)) in pairs and ((0,), (1,)) not in pairs
    assert eq in equalities_for_weak_product(s, INFLATED)


def test_chain2_equality_is_trivial():
    c = load_fixture("chain2")
    w = weak_product(c, "0", "1").witness
    eq = equality_for_weak_product(c, w).witness
    assert eq.x1 == eq.x0 == "0"


def test_preserves_projections_relative_to_a_kernel_pair():
    s = make_finset(5)
    split = (3, 2, (0, 1, 1))
    fold = find_pseudo_eq_rel(s, (4, 2, (0, 0, 1, 1)), (4, 2, (0, 1, 0, 1)))
    assert fold is not None
    r = preserves_projections(s, INFLATED, split, fold)
    assert r.found
    # the tracking really is one
    eq = equality_for_weak_product(s, INFLATED).witness
    assert s.compose(fold.d0, r.witness) == s.compose(split, eq.d0)
    ident = PseudoEqRel(2, 2, s.identity(2), s.identity(2))
    assert preserves_projections(s, INFLATED, split, ident).verdict is Verdict.NOT_FOUND


def test_every_cone_factors_through_a_weak_limit():
    m3 = make_m3()
    d = Diagram.cospan(("p", "T", None), ("q", "T", None))
    w = weak_limit(m3, d).witness
    assert all(factorization(m3, k, w) is not None for k in all_cones(m3, d))
