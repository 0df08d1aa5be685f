"""Weak, pseudo and generalised weak simple products; dependent products; w_X."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum

from .handle import Arrow, CategoryHandle
from .relation import PseudoEqRel, find_pseudo_eq_rel, identity_relation
from .results import Certificate, PreconditionError, SearchResult, SoundnessError, Verdict
from .weaklim import (
    Cone,
    Diagram,
    equality_diagram,
    equality_for_weak_product,
    is_determined_by_projections,
    weak_limit,
    weakly_terminal_cones,
)


class Mode(str, Enum):
    WSP = "wsp"
    PSP = "psp"
    GWSP = "gwsp"
    GWE = "gwe"
    GWDP = "gwdp"


@dataclass(frozen=True)
class SimpleProductDiagram:
    """``W -w-> J``, a weak product (or weak pullback) ``W <-v1- V -v2-> X`` and
    an evaluation ``ev: V -> Y0``.  ``w`` is None for weak exponentials."""

    W: object
    w: Arrow | None
    V: Cone
    ev: Arrow
    mode: Mode = field(compare=False)

    @property
    def v1(self) -> Arrow:
        return self.V.legs[0]

    @property
    def v2(self) -> Arrow:
        return self.V.legs[1]


# --------------------------------------------------------------------------
# side conditions


def _preserves(c: CategoryHandle, cone: Cone, base: Diagram, ev: Arrow, rel: PseudoEqRel) -> bool:
    eq = equality_for_weak_product(c, cone, base)
    if not eq.found:
        return False
    v1 = eq.witness
    return rel.related(c, c.compose(ev, v1.d0), c.compose(ev, v1.d1))


def _side_condition(c, mode: Mode, cone: Cone, base: Diagram, ev: Arrow, rel: PseudoEqRel | None) -> bool:
    if mode is Mode.PSP:
        return True
    if mode is Mode.WSP:
        return is_determined_by_projections(c, cone, ev).found
    return _preserves(c, cone, base, ev, rel)


# --------------------------------------------------------------------------
# the generic weakly-terminal diagram search


@dataclass
class _Problem:
    """Shape of the diagrams being compared.

    ``j`` is the base object (None for weak exponentials); ``f`` is the arrow
    X -> J when the weak limit is a weak pullback (dependent products),
    otherwise the weak limit is a plain weak product of W and X.
    """

    x: object
    y0: object
    mode: Mode
    rel: PseudoEqRel | None
    j: object = None
    span_f: Arrow | None = None  # Y0 -> J
    span_g: Arrow | None = None  # Y0 -> X
    pull_f: Arrow | None = None  # X -> J (dependent products only)


def _base_diagram(c: CategoryHandle, prob: _Problem, W, w) -> Diagram:
    if prob.pull_f is not None:
        return Diagram((W, prob.x, prob.j), ((0, 2, w), (1, 2, prob.pull_f)))
    return Diagram((W, prob.x))


def competitors(c: CategoryHandle, prob: _Problem) -> list[SimpleProductDiagram]:
    key = ("competitors", prob.x, prob.y0, prob.mode, prob.rel, prob.j, prob.span_f, prob.span_g, prob.pull_f)
    if key in c.memo:
        return c.memo[key]
    out = []
    for W in c.objects():
        ws = [None] if prob.j is None else c.hom(W, prob.j)
        for w in ws:
            base = _base_diagram(c, prob, W, w)
            for full in weakly_terminal_cones(c, base):
                cone = Cone(full.apex, full.legs[:2])
                v1, v2 = cone.legs
                for ev in c.hom(cone.apex, prob.y0):
                    if prob.span_g is not None and c.compose(prob.span_g, ev) != v2:
                        continue
                    if prob.span_f is not None and c.compose(prob.span_f, ev) != c.compose(w, v1):
                        continue
                    if not _side_condition(c, prob.mode, full, base, ev, prob.rel):
                        continue
                    out.append(SimpleProductDiagram(W, w, cone, ev, prob.mode))
    c.memo[key] = out
    return out


def _reach(c: CategoryHandle, d: SimpleProductDiagram, apex) -> dict:
    """(v1.b, v2.b) -> ev.b over b: apex -> V, as insertion-ordered dict keys."""
    out: dict = {}
    for b in c.hom(apex, d.V.apex):
        key = (c.compose(d.v1, b), c.compose(d.v2, b))
        out.setdefault(key, {})[c.compose(d.ev, b)] = None
    return out


def factor_diagram(c, other: SimpleProductDiagram, d: SimpleProductDiagram, weak_rel: PseudoEqRel | None = None, reach=None):
    """Arrows ``(a, b)`` exhibiting ``other`` as factoring through ``d``.

    With ``weak_rel`` the evaluations only need to be related (the weaker
    notion); the returned ``b`` then comes with a relating arrow.
    """
    reach = reach if reach is not None else _reach(c, d, other.V.apex)
    for a in c.hom(other.W, d.W):
        if d.w is not None and c.compose(d.w, a) != other.w:
            continue
        evs = reach.get((c.compose(a, other.v1), other.v2))
        if not evs:
            continue
        if weak_rel is None:
            if other.ev in evs:
                b = _find_b(c, d, other, a, other.ev)
                return a, b
        else:
            for evb in evs:
                if weak_rel.related(c, evb, other.ev):
                    return a, _find_b(c, d, other, a, evb)
    return None


def _find_b(c, d, other, a, evb):
    for b in c.hom(other.V.apex, d.V.apex):
        if (
            c.compose(d.v1, b) == c.compose(a, other.v1)
            and c.compose(d.v2, b) == other.v2
            and c.compose(d.ev, b) == evb
        ):
            return b
    raise SoundnessError("reach table inconsistent")


def _is_terminal(c, d, comps, weak_rel=None) -> bool:
    reaches: dict = {}
    for o in comps:
        apex = o.V.apex
        if apex not in reaches:
            reaches[apex] = _reach(c, d, apex)
        if factor_diagram(c, o, d, weak_rel, reaches[apex]) is None:
            return False
    return True


def _search(c: CategoryHandle, prob: _Problem, weak_mode: bool = False) -> SearchResult:
    comps = competitors(c, prob)
    weak_rel = prob.rel if weak_mode else None
    for i, d in enumerate(comps):
        if _is_terminal(c, d, comps, weak_rel):
            cert = Certificate(
                prob.mode.value,
                exhaustive=c.exhaustive,
                checks=len(comps),
                details={"competitors": len(comps), "candidates_tried": i + 1, "weak_mode": weak_mode},
            )
            return SearchResult(Verdict.FOUND, d, cert)
    cert = Certificate(prob.mode.value, exhaustive=c.exhaustive, checks=len(comps), details={"competitors": len(comps)})
    return SearchResult.failure(c.exhaustive, "no weakly terminal diagram", cert)


def _check_span(c, f: Arrow, g: Arrow):
    if f[0] != g[0]:
        raise PreconditionError("span legs must share their domain")


def search_weak_simple_product(c: CategoryHandle, f: Arrow, g: Arrow, cap=None) -> SearchResult:
    """Span ``J <-f- Y -g-> X``; the evaluation must be determined by projections."""
    _check_span(c, f, g)
    prob = _Problem(g[1], f[0], Mode.WSP, None, f[1], f, g)
    return _search(c, prob)


def search_pseudo_simple_product(c: CategoryHandle, f: Arrow, g: Arrow, cap=None) -> SearchResult:
    _check_span(c, f, g)
    prob = _Problem(g[1], f[0], Mode.PSP, None, f[1], f, g)
    return _search(c, prob)


def coequalises(c: CategoryHandle, f: Arrow, rel: PseudoEqRel) -> bool:
    return c.compose(f, rel.d0) == c.compose(f, rel.d1)


def search_gwsp(c: CategoryHandle, f: Arrow, g: Arrow, rel: PseudoEqRel, cap=None, weak_mode: bool = False) -> SearchResult:
    """Generalised weak simple product of the span with respect to ``rel``.

    With ``weak_mode`` the terminal diagram is searched under the weaker
    factorization (evaluations only related through ``rel``) and then
    strengthened by replacing its weak product with a covering one, so the
    returned diagram always satisfies the strong certificate.
    """
    _check_span(c, f, g)
    if rel.x0 != f[0]:
        raise PreconditionError("relation must live on the apex of the span")
    if not (coequalises(c, f, rel) and coequalises(c, g, rel)):
        raise PreconditionError("span legs must coequalise the relation")
    prob = _Problem(g[1], f[0], Mode.GWSP, rel, f[1], f, g)
    if not weak_mode:
        return _search(c, prob)
    weak = _search(c, prob, weak_mode=True)
    if not weak.found:
        return weak
    strong = strengthen(c, prob, weak.witness)
    if strong is None:
        return SearchResult.failure(c.exhaustive, "weak-mode witness could not be strengthened", weak.certificate)
    if not _is_terminal(c, strong, competitors(c, prob)):
        raise SoundnessError("strengthened weak-mode witness fails the strong certificate")
    cert = Certificate("gwsp", c.exhaustive, weak.certificate.checks, {**weak.certificate.details, "strengthened": True})
    return SearchResult(Verdict.FOUND, strong, cert)


def strengthen(c: CategoryHandle, prob: _Problem, d: SimpleProductDiagram) -> SimpleProductDiagram | None:
    """Replace the weak product of ``d`` so that related evaluations become equal.

    Among the competitors with the same ``W`` (and ``w``) we take the first
    whose weak product maps onto that of ``d`` and which is weakly terminal
    in the strong sense; this realises the covering-square replacement.
    """
    comps = competitors(c, prob)
    for o in comps:
        if o.W != d.W or o.w != d.w:
            continue
        if _is_terminal(c, o, comps):
            return o
    return None


# --------------------------------------------------------------------------
# generalised weak exponentials


def search_gw_exponential(c: CategoryHandle, x, rel: PseudoEqRel, cap=None) -> SearchResult:
    """Direct search for a generalised weak exponential of ``x`` and ``rel``."""
    prob = _Problem(x, rel.x0, Mode.GWE, rel)
    return _search(c, prob)


def gwe_via_gwsp(c: CategoryHandle, x, rel: PseudoEqRel) -> SearchResult:
    """Derive a generalised weak exponential from a GWSP over a weak terminal.

    U0 is a weak product of (T, X, Y0); U1 relates two elements of U0 whose T
    and X components agree and whose Y0 components are related.
    """
    t = weak_limit(c, Diagram(()))
    if not t.found:
        return t
    T = t.witness.apex
    u0 = weak_limit(c, Diagram((T, x, rel.x0)))
    if not u0.found:
        return u0
    U0 = u0.witness
    uT, uX, uY = U0.legs
    d = Diagram(
        (U0.apex, U0.apex, rel.x1, rel.x0, rel.x0, T, x),
        (
            (0, 3, uY), (2, 3, rel.d0), (1, 4, uY), (2, 4, rel.d1),
            (0, 5, uT), (1, 5, uT), (0, 6, uX), (1, 6, uX),
        ),
    )
    u1 = weak_limit(c, d)
    if not u1.found:
        return u1
    r = find_pseudo_eq_rel(c, u1.witness.legs[0], u1.witness.legs[1])
    if r is None:
        raise SoundnessError("derived relation on U0 is not a pseudo equivalence relation")
    res = search_gwsp(c, uT, uX, r)
    if not res.found:
        return res
    s = res.witness
    gwe = SimpleProductDiagram(s.W, None, s.V, c.compose(uY, s.ev), Mode.GWE)
    return SearchResult(Verdict.FOUND, gwe, res.certificate)


def same_class(c: CategoryHandle, d1: SimpleProductDiagram, d2: SimpleProductDiagram) -> bool:
    """Mutual factorization ignoring the base arrow (used for weak exponentials)."""
    return factor_diagram(c, d1, d2) is not None and factor_diagram(c, d2, d1) is not None


# --------------------------------------------------------------------------
# dependent products


def search_gw_dependent_product(c: CategoryHandle, rel: PseudoEqRel, g: Arrow, f: Arrow, cap=None) -> SearchResult:
    """``Y0 -g-> X -f-> J`` with ``f`` coequalising ``rel`` (as arrows Y1 -> J via g)."""
    if g[0] != rel.x0 or g[1] != f[0]:
        raise PreconditionError("expected Y0 -g-> X -f-> J")
    fg = c.compose(f, g)
    if not coequalises(c, fg, rel):
        raise PreconditionError("f must coequalise the relation")
    prob = _Problem(g[1], g[0], Mode.GWDP, rel, f[1], None, g, f)
    return _search(c, prob)


def slice_gwsp_instance(c: CategoryHandle, rel: PseudoEqRel, g: Arrow, f: Arrow):
    """The same problem as a GWSP in the slice over J: terminal <- Y0 -> X."""
    from .fincat import SliceCategory

    J = f[1]
    s = SliceCategory(c, J)
    fg = c.compose(f, g)
    y0 = (rel.x0, fg)
    x = (g[1], f)
    top = (J, c.identity(J))
    y1 = (rel.x1, c.compose(fg, rel.d0))
    srel = PseudoEqRel(y1, y0, (y1, y0, rel.d0), (y1, y0, rel.d1))
    return s, (y0, top, fg), (y0, x, g), srel


# --------------------------------------------------------------------------
# the w_X map on subobjects


UNDEFINED_NO_WSP = "UndefinedNoWSP"


@dataclass
class SubobjectMap:
    """A map Sub(ΓJ x ΓX) -> Sub(ΓJ) given by lattice indices (None where undefined)."""

    J: object
    X: object
    table: dict
    undefined_at: list = field(default_factory=list)
    undecided_at: list = field(default_factory=list)

    @property
    def defined(self) -> bool:
        return not self.undefined_at and not self.undecided_at


def _product_setup(e, J, X):
    from .excomp import ex_product, subobjects

    gj, gx = e.gamma(J), e.gamma(X)
    prod = ex_product(e, gj, gx)
    if not prod.found:
        return None
    cone = prod.witness.cone
    sub_p = subobjects(e, cone.apex)
    sub_j = subobjects(e, gj)
    return cone, sub_p.witness, sub_j.witness


def _covers_of(e, src, limit: int = 2) -> list:
    """The canonical cover of ``src`` followed by other covers Γ(y) ->> src."""
    from .excomp import is_regular_epi

    out = [e.cover(src)]
    for y in e.base.objects():
        for q in e.hom(e.gamma(y), src):
            if len(out) >= limit:
                return out
            if q not in out and is_regular_epi(e, q):
                out.append(q)
    return out


def quantify_subobject(e, cone: Cone, sub_j, m, search, cover=None) -> SearchResult:
    """Push a subobject ``m`` of ΓJ x ΓX to Sub(ΓJ) through a span search.

    ``search(p, f, g)`` is a weak or pseudo simple product search; the result
    is the image of Γw for the diagram it returns.
    """
    from .excomp import image_factorisation

    p = e.base
    cov = cover if cover is not None else e.cover(m.src)
    pj, px = cone.legs
    into = e.compose(m, cov)
    f = e.compose(pj, into).rep
    g = e.compose(px, into).rep
    res = search(p, f, g)
    if not res.found:
        return SearchResult(res.verdict, None, res.certificate, UNDEFINED_NO_WSP if res.verdict is Verdict.NOT_FOUND else res.reason)
    d = res.witness
    img = image_factorisation(e, e.gamma_arrow(d.w))
    if not img.found:
        return SearchResult(Verdict.UNDECIDED, None, None, "image outside cap")
    idx = sub_j.locate(e, img.witness[1])
    if idx is None:
        return SearchResult(Verdict.UNDECIDED, None, None, "image not among enumerated subobjects")
    return SearchResult(Verdict.FOUND, idx, res.certificate)


def subobject_map(e, J, X, search=None) -> SubobjectMap | None:
    search = search or search_weak_simple_product
    setup = _product_setup(e, J, X)
    if setup is None:
        return None
    cone, sub_p, sub_j = setup
    table, undefined, undecided = {}, [], []
    for i, m in enumerate(sub_p.monos):
        r = quantify_subobject(e, cone, sub_j, m, search)
        table[i] = r.witness
        if r.verdict is Verdict.NOT_FOUND:
            undefined.append(i)
        elif r.verdict is Verdict.UNDECIDED:
            undecided.append(i)
    return SubobjectMap(J, X, table, undefined, undecided)


def inverse_image_leq(e, cone: Cone, b, a) -> bool:
    """Is the pullback of ``b`` along the projection to ΓJ below ``a``?"""
    from .excomp import ex_pullback, factors_through

    pb = ex_pullback(e, b, cone.legs[0])
    if not pb.found:
        raise PreconditionError("pullback outside cap")
    return factors_through(e, pb.witness.cone.legs[1], a) is not None


def galois_failures(e, cone, sub_p, sub_j, table: dict) -> list:
    """Pairs (b, a) where ``b x X <= a`` and ``b <= t(a)`` disagree."""
    bad = []
    for ai, a in enumerate(sub_p.monos):
        t = table.get(ai)
        if t is None:
            continue
        for bi, b in enumerate(sub_j.monos):
            if inverse_image_leq(e, cone, b, a) != sub_j.leq(bi, t):
                bad.append((bi, ai))
    return bad


def wx_adjunction_check(e, J, X) -> SearchResult:
    """w_X is defined on Sub(ΓJ x ΓX), independent of covers, and right adjoint
    to pulling back along the projection."""
    setup = _product_setup(e, J, X)
    if setup is None:
        return SearchResult(Verdict.UNDECIDED, None, None, "product outside cap")
    cone, sub_p, sub_j = setup
    smap = subobject_map(e, J, X)
    if smap.undefined_at:
        return SearchResult(Verdict.NOT_FOUND, smap, Certificate("wx", e.exhaustive), UNDEFINED_NO_WSP)
    if smap.undecided_at:
        return SearchResult(Verdict.UNDECIDED, smap, None, "a simple product search is undecided")
    for i, m in enumerate(sub_p.monos):
        for cov in _covers_of(e, m.src)[1:]:
            r = quantify_subobject(e, cone, sub_j, m, search_weak_simple_product, cover=cov)
            if r.found and r.witness != smap.table[i]:
                raise SoundnessError(f"w_X depends on the chosen cover at subobject {i}")
    bad = galois_failures(e, cone, sub_p, sub_j, smap.table)
    cert = Certificate("wx", e.exhaustive and sub_p.exhaustive and sub_j.exhaustive, len(sub_p) * len(sub_j), {"failures": bad})
    if bad:
        return SearchResult(Verdict.NOT_FOUND, smap, cert, "not adjoint")
    return SearchResult(Verdict.FOUND, smap, cert)
