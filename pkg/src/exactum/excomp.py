"""The exact completion of a category with weak finite limits.

Objects are pseudo equivalence relations ``x1 => x0`` in the base category;
arrows are tracked arrows ``x0 -> y0`` modulo homotopy.  The completion is
itself a :class:`CategoryHandle`, so the brute-force searchers in
:mod:`exactum.weaklim` run on it unchanged.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import NamedTuple

from scipy.cluster.hierarchy import DisjointSet

from .fincat import FunctorData
from .handle import Arrow, CategoryHandle
from .relation import PseudoEqRel, find_pseudo_eq_rel, identity_relation
from .results import Certificate, PreconditionError, SearchResult, SoundnessError, Verdict
from .weaklim import Cone, Diagram, cones_at, weak_limit



class ExArrow(NamedTuple):
    """A homotopy class of tracked arrows, named by its canonical representative."""

    src: PseudoEqRel
    dst: PseudoEqRel
    rep: Arrow


@dataclass
class _HomData:
    classes: list[Arrow]  # canonical representatives, in hom order
    canon: dict  # every tracked arrow -> its representative
    raw_closed: bool  # homotopy relation already an equivalence


class ExCompletion(CategoryHandle):
    def __init__(self, base: CategoryHandle, cap: int | None = None):
        super().__init__()
        self.base = base
        self.cap = cap
        self.name = f"ex({base.name})"
        self.exhaustive = base.exhaustive
        self._reps: tuple | None = None
        self._homdata: dict = {}

    # -- hom-sets -------------------------------------------------------
    def homdata(self, a: PseudoEqRel, b: PseudoEqRel) -> _HomData:
        key = (a, b)
        hd = self._homdata.get(key)
        if hd is not None:
            return hd
        p = self.base
        related_b1 = b.related_pairs(p, a.x1)
        tracked = [
            f
            for f in p.hom(a.x0, b.x0)
            if (p.compose(f, a.d0), p.compose(f, a.d1)) in related_b1
        ]
        related_b0 = b.related_pairs(p, a.x0)
        ds = DisjointSet(range(len(tracked)))
        index = {f: i for i, f in enumerate(tracked)}
        raw = set()
        for u, v in related_b0:
            if u in index and v in index:
                ds.merge(index[u], index[v])
                raw.add((index[u], index[v]))
        closure = {(i, j) for i in range(len(tracked)) for j in range(len(tracked)) if ds.connected(i, j)}
        canon = {}
        classes = []
        for i, f in enumerate(tracked):
            root = min(ds.subset(i))
            rep = tracked[root]
            canon[f] = rep
            if root == i:
                classes.append(f)
        hd = _HomData(classes, canon, raw == closure)
        self._homdata[key] = hd
        return hd

    def _hom(self, a, b):
        return [ExArrow(a, b, f) for f in self.homdata(a, b).classes]

    def arrow(self, a: PseudoEqRel, b: PseudoEqRel, f: Arrow) -> ExArrow:
        """The class of a tracked arrow ``f: a.x0 -> b.x0``."""
        canon = self.homdata(a, b).canon
        if f not in canon:
            raise PreconditionError(f"{f!r} is not tracked from {a!r} to {b!r}")
        return ExArrow(a, b, canon[f])

    def is_tracked(self, a, b, f) -> bool:
        return f in self.homdata(a, b).canon

    def tracking(self, f: ExArrow) -> Arrow | None:
        p, a, b = self.base, f.src, f.dst
        for f1 in p.hom(a.x1, b.x1):
            if p.compose(b.d0, f1) == p.compose(f.rep, a.d0) and p.compose(b.d1, f1) == p.compose(f.rep, a.d1):
                return f1
        return None

    def compose(self, g: ExArrow, f: ExArrow) -> ExArrow:
        if f.dst != g.src:
            raise ValueError("not composable")
        return self.arrow(f.src, g.dst, self.base.compose(g.rep, f.rep))

    def identity(self, a):
        return self.arrow(a, a, self.base.identity(a.x0))

    def gamma(self, x) -> PseudoEqRel:
        return identity_relation(self.base, x)

    def gamma_arrow(self, f: Arrow) -> ExArrow:
        return self.arrow(self.gamma(f[0]), self.gamma(f[1]), f)

    # -- objects --------------------------------------------------------
    def objects(self):
        if self._reps is None:
            self._reps = tuple(enumerate_ex_objects(self.base, self.cap, completion=self))
        return self._reps

    def grade(self, a):
        return self.base.grade(a.x0)

    def canonical(self, a: PseudoEqRel) -> PseudoEqRel | None:
        """The enumerated representative isomorphic to ``a`` (None if outside the cap)."""
        for r in self.objects():
            if self.find_iso(r, a) is not None:
                return r
        return None

    def cover(self, a: PseudoEqRel) -> ExArrow:
        """The canonical cover Γ(x0) ->> a."""
        return self.arrow(self.gamma(a.x0), a, self.base.identity(a.x0))


# --------------------------------------------------------------------------
# objects


def _split_epis(p: CategoryHandle, x1, x0) -> list:
    return [f for f in p.hom(x1, x0) if any(p.compose(f, s) == p.identity(x0) for s in p.hom(x0, x1))]


def candidate_relations(p: CategoryHandle) -> list[PseudoEqRel]:
    """Every pseudo equivalence relation with components among p.objects().

    Identity relations come first for each ``x0`` so Γ objects are the
    preferred representatives.
    """
    out = []
    for x0 in p.objects():
        out.append(identity_relation(p, x0))
        for x1 in p.objects():
            epis = _split_epis(p, x1, x0)
            for d0, d1 in product(epis, repeat=2):
                if x1 == x0 and d0 == d1 == p.identity(x0):
                    continue
                rel = find_pseudo_eq_rel(p, d0, d1)
                if rel is not None:
                    out.append(rel)
    return out


def _fingerprint(e: ExCompletion, a: PseudoEqRel) -> tuple:
    p = e.base
    return tuple(len(e.hom(e.gamma(y), a)) for y in p.objects()) + (len(e.hom(a, a)),)


def enumerate_ex_objects(p: CategoryHandle, cap=None, completion: ExCompletion | None = None) -> list[PseudoEqRel]:
    """Iso-class representatives of the completion with components within the cap."""
    e = completion if completion is not None else ExCompletion(p, cap)
    reps: list[PseudoEqRel] = []
    buckets: dict[tuple, list] = {}
    for rel in candidate_relations(p):
        fp = _fingerprint(e, rel)
        bucket = buckets.setdefault(fp, [])
        if any(e.find_iso(r, rel) is not None for r in bucket):
            continue
        bucket.append(rel)
        reps.append(rel)
    return reps


def ex_hom(e: ExCompletion, a: PseudoEqRel, b: PseudoEqRel) -> tuple:
    return e.hom(a, b)


def embed_projectives(e: ExCompletion) -> FunctorData:
    p = e.base
    return FunctorData(p, e, e.gamma, e.gamma_arrow)


# --------------------------------------------------------------------------
# finite limits


@dataclass
class ExLimit:
    cone: Cone  # apex: PseudoEqRel; legs: ExArrow
    diagram: Diagram
    certificate: Certificate


def _spanning_edges(d: Diagram) -> dict[int, tuple]:
    """For each non-root node, the incoming edge that determines it exactly.

    Edges are chosen greedily so that they form a forest; all remaining edges
    only commute up to the target relation.
    """
    ds = DisjointSet(range(len(d.nodes)))
    tree: dict[int, tuple] = {}
    for edge in d.edges:
        i, j, _ = edge
        if j in tree or i == j or ds.connected(i, j):
            continue
        tree[j] = edge
        ds.merge(i, j)
    return tree


def _base_limit_diagram(e: ExCompletion, d: Diagram):
    """Weak-limit diagram in the base whose cones cover the compatible families."""
    nodes = [a.x0 for a in d.nodes]
    edges = []
    tree = _spanning_edges(d)
    for edge in d.edges:
        i, j, f = edge
        if tree.get(j) is edge:
            edges.append((i, j, f.rep))
            continue
        aj = d.nodes[j]
        m = len(nodes)
        nodes += [aj.x1, aj.x0]
        edges += [(m, j, aj.d1), (m, m + 1, aj.d0), (i, m + 1, f.rep)]
    return Diagram(tuple(nodes), tuple(edges))


def _relation_diagram(d: Diagram, v0: Cone) -> Diagram:
    """Pairs of families related componentwise; determined nodes follow their roots."""
    tree = _spanning_edges(d)
    nodes = [v0.apex, v0.apex]
    edges = []
    for i, a in enumerate(d.nodes):
        if i in tree:
            continue
        m = len(nodes)
        nodes += [a.x1, a.x0, a.x0]
        edges += [(0, m + 1, v0.legs[i]), (m, m + 1, a.d0), (1, m + 2, v0.legs[i]), (m, m + 2, a.d1)]
    return Diagram(tuple(nodes), tuple(edges))


def certify_limit(e: ExCompletion, d: Diagram, cone: Cone) -> tuple[bool, int, list]:
    """Brute-force check that every enumerated cone factors uniquely."""
    checks = 0
    failures = []
    for c in e.objects():
        cones = cones_at(e, d, c)
        images = {}
        for m in e.hom(c, cone.apex):
            legs = tuple(e.compose(lg, m) for lg in cone.legs)
            if legs in images:
                failures.append((c, "non-unique factorization"))
                break
            images[legs] = m
        checks += len(cones)
        if set(images) != set(cones):
            failures.append((c, "cone without factorization"))
    return not failures, checks, failures


def ex_finite_limit(e: ExCompletion, d: Diagram, cap=None, certify: bool = True) -> SearchResult:
    """Limit in the completion built from weak limits in the base, then
    certified against its universal property by enumeration."""
    key = ("ex_limit", d, certify)
    if key in e.memo:
        return e.memo[key]
    p = e.base
    n = len(d.nodes)
    l0 = weak_limit(p, _base_limit_diagram(e, d))
    if not l0.found:
        res = SearchResult(l0.verdict, None, l0.certificate, "base weak limit: " + l0.reason)
        e.memo[key] = res
        return res
    v0 = Cone(l0.witness.apex, l0.witness.legs[:n])
    l1 = weak_limit(p, _relation_diagram(d, v0))
    if not l1.found:
        res = SearchResult(l1.verdict, None, l1.certificate, "relation weak limit: " + l1.reason)
        e.memo[key] = res
        return res
    rel = find_pseudo_eq_rel(p, l1.witness.legs[0], l1.witness.legs[1])
    if rel is None:
        raise SoundnessError("limit relation is not a pseudo equivalence relation")
    legs = tuple(e.arrow(rel, a, v0.legs[i]) for i, a in enumerate(d.nodes))
    cone = Cone(rel, legs)
    cert = Certificate("ex_limit", exhaustive=e.exhaustive)
    if certify:
        ok, checks, failures = certify_limit(e, d, cone)
        cert.checks = checks
        if not ok:
            raise SoundnessError(f"constructed limit fails its universal property: {failures[:2]}")
    res = SearchResult(Verdict.FOUND, ExLimit(cone, d, cert), cert)
    e.memo[key] = res
    return res


def ex_product(e: ExCompletion, *objs, certify: bool = True) -> SearchResult:
    return ex_finite_limit(e, Diagram(tuple(objs)), certify=certify)


def ex_pullback(e: ExCompletion, f: ExArrow, g: ExArrow, certify: bool = True) -> SearchResult:
    return ex_finite_limit(e, Diagram((f.src, g.src, f.dst), ((0, 2, f), (1, 2, g))), certify=certify)


def ex_kernel_pair(e: ExCompletion, f: ExArrow, certify: bool = True) -> SearchResult:
    return ex_pullback(e, f, f, certify=certify)


def mediate(e: CategoryHandle, cone: Cone, legs: tuple) -> Arrow | None:
    """The arrow into ``cone.apex`` whose composites with the legs are ``legs``."""
    src = legs[0][0]
    for m in e.hom(src, cone.apex):
        if all(e.compose(lg, m) == want for lg, want in zip(cone.legs, legs)):
            return m
    return None


def product_map(e: ExCompletion, left: Cone, right: Cone, arrows: tuple) -> Arrow | None:
    """``f1 x f2 x ...: left.apex -> right.apex`` between two product cones."""
    legs = tuple(e.compose(f, lg) for f, lg in zip(arrows, left.legs))
    return mediate(e, right, legs)


# --------------------------------------------------------------------------
# arrows


def _kernel_relation(e: ExCompletion, f: ExArrow) -> SearchResult:
    """Canonical weak limit of pairs in x0 whose images are related in the target."""
    a, b = f.src, f.dst
    d = Diagram(
        (a.x0, a.x0, b.x1, b.x0, b.x0),
        ((0, 3, f.rep), (2, 3, b.d0), (1, 4, f.rep), (2, 4, b.d1)),
    )
    return weak_limit(e.base, d)


def image_factorisation(e: ExCompletion, f: ExArrow) -> SearchResult:
    """``f = m . q`` with q regular epi and m mono; witness ``(q, m)``."""
    k = _kernel_relation(e, f)
    if not k.found:
        return SearchResult(k.verdict, None, k.certificate, "kernel relation: " + k.reason)
    p = e.base
    rel = find_pseudo_eq_rel(p, k.witness.legs[0], k.witness.legs[1])
    if rel is None:
        raise SoundnessError("kernel relation is not a pseudo equivalence relation")
    q = e.arrow(f.src, rel, p.identity(f.src.x0))
    m = e.arrow(rel, f.dst, f.rep)
    if e.compose(m, q) != f:
        raise SoundnessError("image factorisation does not compose to f")
    cert = Certificate("image_factorisation", e.exhaustive, 1, {"image": repr(rel)})
    return SearchResult(Verdict.FOUND, (q, m), cert)


def is_mono(e: ExCompletion, f: ExArrow) -> SearchResult:
    """Mono iff the two legs of the kernel relation are related in the source."""
    k = _kernel_relation(e, f)
    if not k.found:
        return SearchResult(k.verdict, None, k.certificate, k.reason)
    legs = k.witness.legs
    h = f.src.homotopy(e.base, legs[0], legs[1])
    cert = Certificate("mono", k.certificate.exhaustive, 1)
    if h is None:
        return SearchResult(Verdict.NOT_FOUND, (legs[0], legs[1]), cert, "kernel pair not diagonal")
    return SearchResult(Verdict.FOUND, h, cert)


def is_mono_by_enumeration(e: ExCompletion, f: ExArrow) -> bool:
    for c in e.objects():
        images = [e.compose(f, g) for g in e.hom(c, f.src)]
        if len(set(images)) != len(images):
            return False
    return True


def regular_epi_section(e: ExCompletion, f: ExArrow) -> Arrow | None:
    """A base arrow s: y0 -> x0 with f.s related to the identity, if any.

    Such an s exists iff the canonical cover of the target factors through
    ``f``, i.e. iff ``f`` is a regular epi.
    """
    p, a, b = e.base, f.src, f.dst
    rel = b.related_pairs(p, b.x0)
    idy = p.identity(b.x0)
    for s in p.hom(b.x0, a.x0):
        if (p.compose(f.rep, s), idy) in rel:
            return s
    return None


def is_regular_epi(e: ExCompletion, f: ExArrow) -> bool:
    return regular_epi_section(e, f) is not None


@dataclass
class ArrowAnalysis:
    mono: bool | None
    regular_epi: bool
    split_epi: bool
    iso: bool | None
    witnesses: dict = field(default_factory=dict)


def analyze_arrow(e: ExCompletion, f: ExArrow) -> ArrowAnalysis:
    mono = is_mono(e, f)
    mono_flag = None if mono.verdict is Verdict.UNDECIDED else mono.found
    s = regular_epi_section(e, f)
    section = next((g for g in e.hom(f.dst, f.src) if e.compose(f, g) == e.identity(f.dst)), None)
    inverse = e.is_iso(f)
    iso = inverse is not None
    if mono_flag is not None and iso != (mono_flag and s is not None):
        raise SoundnessError(f"iso flag disagrees with mono+regular epi for {f!r}")
    witnesses = {}
    if s is not None:
        witnesses["cover_lift"] = s
    if section is not None:
        witnesses["section"] = section
    if inverse is not None:
        witnesses["inverse"] = inverse
    if mono.found:
        witnesses["kernel_homotopy"] = mono.witness
    return ArrowAnalysis(mono_flag, s is not None, section is not None, iso, witnesses)


def is_coequaliser(e: ExCompletion, k1: ExArrow, k2: ExArrow, q: ExArrow) -> bool:
    """Brute-force: every arrow coequalising k1, k2 factors uniquely through q."""
    if e.compose(q, k1) != e.compose(q, k2):
        return False
    for c in e.objects():
        want = {g for g in e.hom(q.src, c) if e.compose(g, k1) == e.compose(g, k2)}
        got = [e.compose(g, q) for g in e.hom(q.dst, c)]
        if len(set(got)) != len(got) or set(got) != want:
            return False
    return True


def is_covering_square(e: ExCompletion, top: ExArrow, left: ExArrow, right: ExArrow, bottom: ExArrow) -> SearchResult:
    """Square X -top-> Y, X -left-> A, Y -right-> B, A -bottom-> B: ``right`` and
    the comparison X -> A x_B Y are regular epis."""
    if e.compose(right, top) != e.compose(bottom, left):
        return SearchResult(Verdict.NOT_FOUND, None, None, "square does not commute")
    if not is_regular_epi(e, right):
        return SearchResult(Verdict.NOT_FOUND, None, None, "right edge is not a cover")
    pb = ex_pullback(e, bottom, right)
    if not pb.found:
        return pb
    comparison = mediate(e, pb.witness.cone, (left, top, e.compose(bottom, left)))
    if comparison is None:
        raise SoundnessError("pullback did not mediate a commuting square")
    ok = is_regular_epi(e, comparison)
    return SearchResult(Verdict.FOUND if ok else Verdict.NOT_FOUND, comparison, pb.certificate)


def is_quasi_exact(e: ExCompletion, k1: ExArrow, k2: ExArrow, q: ExArrow) -> SearchResult:
    """``K => A -> B`` is a coequaliser whose comparison into the kernel pair is a cover."""
    if not is_coequaliser(e, k1, k2, q):
        return SearchResult(Verdict.NOT_FOUND, None, None, "not a coequaliser")
    return is_covering_square(e, k2, k1, q, q)


# --------------------------------------------------------------------------
# subobjects


@dataclass
class SubobjectLattice:
    ambient: PseudoEqRel
    monos: list  # ExArrow I -> ambient, one per class
    leq_matrix: list[list[bool]]
    exhaustive: bool = True

    def __len__(self) -> int:
        return len(self.monos)

    def leq(self, i: int, j: int) -> bool:
        return self.leq_matrix[i][j]

    def meet(self, i: int, j: int) -> int | None:
        lower = [k for k in range(len(self)) if self.leq(k, i) and self.leq(k, j)]
        for k in lower:
            if all(self.leq(m, k) for m in lower):
                return k
        return None

    def join(self, i: int, j: int) -> int | None:
        upper = [k for k in range(len(self)) if self.leq(i, k) and self.leq(j, k)]
        for k in upper:
            if all(self.leq(k, m) for m in upper):
                return k
        return None

    @property
    def top(self) -> int | None:
        return next((i for i in range(len(self)) if all(self.leq(j, i) for j in range(len(self)))), None)

    @property
    def bottom(self) -> int | None:
        return next((i for i in range(len(self)) if all(self.leq(i, j) for j in range(len(self)))), None)

    def is_antisymmetric(self) -> bool:
        n = len(self)
        return all(not (self.leq(i, j) and self.leq(j, i)) or i == j for i in range(n) for j in range(n))

    def locate(self, e: "ExCompletion", m: ExArrow) -> int | None:
        """Index of the class of the mono ``m`` (mutual factorization)."""
        for i, n in enumerate(self.monos):
            if factors_through(e, m, n) and factors_through(e, n, m):
                return i
        return None


def factors_through(e: CategoryHandle, m: Arrow, n: Arrow) -> Arrow | None:
    for u in e.hom(m[0], n[0]):
        if e.compose(n, u) == m:
            return u
    return None


def subobjects(e: ExCompletion, a: PseudoEqRel, cap=None) -> SearchResult:
    """Sub(a): images of every Γ(y) -> a, ordered by factorization in the completion."""
    key = ("subobjects", a)
    if key in e.memo:
        return e.memo[key]
    p = e.base
    monos: list[ExArrow] = []
    exhaustive = e.exhaustive
    for y in p.objects():
        for f in p.hom(y, a.x0):
            img = image_factorisation(e, e.arrow(e.gamma(y), a, f))
            if not img.found:
                exhaustive = False
                continue
            m = img.witness[1]
            if any(factors_through(e, m, n) and factors_through(e, n, m) for n in monos):
                continue
            monos.append(m)
    leq = [[factors_through(e, m, n) is not None for n in monos] for m in monos]
    lat = SubobjectLattice(a, monos, leq, exhaustive)
    res = SearchResult(Verdict.FOUND, lat, Certificate("subobjects", exhaustive, len(monos) ** 2))
    e.memo[key] = res
    return res


# --------------------------------------------------------------------------
# projectivity


def covers_in(e: ExCompletion) -> list[ExArrow]:
    """Every regular epi between enumerated objects."""
    key = ("covers",)
    if key not in e.memo:
        obs = e.objects()
        e.memo[key] = [f for b in obs for c in obs for f in e.hom(b, c) if is_regular_epi(e, f)]
    return e.memo[key]


def is_projective_by_lifting(e: ExCompletion, a: PseudoEqRel) -> tuple[bool, object]:
    for cov in covers_in(e):
        for f in e.hom(a, cov.dst):
            if not any(e.compose(cov, g) == f for g in e.hom(a, cov.src)):
                return False, (cov, f)
    return True, None


def retract_of_gamma(e: ExCompletion, a: PseudoEqRel):
    """``(x, s, r)`` with r.s = id_a and s: a -> Γx, or None."""
    ida = e.identity(a)
    for x in e.base.objects():
        gx = e.gamma(x)
        for s in e.hom(a, gx):
            for r in e.hom(gx, a):
                if e.compose(r, s) == ida:
                    return x, s, r
    return None


def is_projective(e: ExCompletion, a: PseudoEqRel) -> bool:
    return retract_of_gamma(e, a) is not None


def internally_projective_by_lifting(e: ExCompletion, x: PseudoEqRel) -> SearchResult:
    """Definitional check: every T x X -> B lifts along every cover A ->> B after
    precomposing a cover Γ(U) ->> T."""
    p = e.base
    checks = 0
    for t in e.objects():
        tx = ex_product(e, t, x)
        if not tx.found:
            return SearchResult(Verdict.UNDECIDED, None, None, f"product {t!r} x {x!r} outside cap")
        tx_cone = tx.witness.cone
        for cov in covers_in(e):
            for h in e.hom(tx_cone.apex, cov.dst):
                checks += 1
                if not _lift_after_cover(e, t, x, tx_cone, cov, h):
                    if not e.exhaustive:
                        return SearchResult(Verdict.UNDECIDED, (t, cov, h), None, "no lift within cap")
                    return SearchResult(Verdict.NOT_FOUND, (t, cov, h), Certificate("internal_projectivity", True, checks))
    return SearchResult(Verdict.FOUND, None, Certificate("internal_projectivity", e.exhaustive, checks))


def _lift_after_cover(e, t, x, tx_cone, cov, h) -> bool:
    for u_obj in e.base.objects():
        gu = e.gamma(u_obj)
        for u in e.hom(gu, t):
            if not is_regular_epi(e, u):
                continue
            ux = ex_product(e, gu, x)
            if not ux.found:
                continue
            ux_cone = ux.witness.cone
            ux_map = product_map(e, ux_cone, tx_cone, (u, e.identity(x)))
            target = e.compose(h, ux_map)
            if any(e.compose(cov, k) == target for k in e.hom(ux_cone.apex, cov.src)):
                return True
    return False


def product_preserves_projectives(e: ExCompletion, x: PseudoEqRel) -> SearchResult:
    """(_) x X sends every enumerated projective to a projective."""
    for q in e.objects():
        if not is_projective(e, q):
            continue
        qx = ex_product(e, q, x)
        if not qx.found:
            return SearchResult(Verdict.UNDECIDED, q, None, f"product {q!r} x {x!r} outside cap")
        if not is_projective(e, qx.witness.cone.apex):
            return SearchResult(Verdict.NOT_FOUND if e.exhaustive else Verdict.UNDECIDED, q, None)
    return SearchResult(Verdict.FOUND, None, Certificate("preserves_projectives", e.exhaustive))


@dataclass
class ProjectivityReport:
    projective: Verdict
    internally_projective: Verdict
    witnesses: dict = field(default_factory=dict)


def projectivity_report(e: ExCompletion, a: PseudoEqRel, cap=None) -> ProjectivityReport:
    lifting, counter = is_projective_by_lifting(e, a)
    retract = retract_of_gamma(e, a)
    if lifting != (retract is not None):
        # lifting only ranges over enumerated covers, so a disagreement is a soundness failure
        raise SoundnessError(f"projectivity routes disagree on {a!r}")
    witnesses = {"retract": retract, "lifting_counterexample": counter}
    by_def = internally_projective_by_lifting(e, a)
    by_products = product_preserves_projectives(e, a)
    if Verdict.UNDECIDED in (by_def.verdict, by_products.verdict):
        internal = Verdict.UNDECIDED
    elif by_def.verdict != by_products.verdict:
        if lifting:
            raise SoundnessError(f"internal projectivity routes disagree on {a!r}")
        # the product route characterises internal projectivity only for projectives
        internal = by_def.verdict
    else:
        internal = by_def.verdict
    witnesses["internal_by_definition"] = by_def.verdict.value
    witnesses["internal_by_products"] = by_products.verdict.value
    return ProjectivityReport(Verdict.FOUND if lifting else Verdict.NOT_FOUND, internal, witnesses)


# --------------------------------------------------------------------------
# exactness certification


def kernel_pair_exactness(e: ExCompletion, q: ExArrow) -> SearchResult:
    """A regular epi is the coequaliser of its own kernel pair."""
    kp = ex_kernel_pair(e, q)
    if not kp.found:
        return kp
    k1, k2 = kp.witness.cone.legs[:2]
    ok = is_coequaliser(e, k1, k2, q)
    return SearchResult(Verdict.FOUND if ok else Verdict.NOT_FOUND, (k1, k2), kp.certificate)


def _pairing(e, cone: Cone, f, g):
    return mediate(e, cone, (f, g))


def is_equivalence_relation(e: ExCompletion, aa: Cone, m: ExArrow) -> bool:
    """``m: R >-> A x A`` (product cone ``aa``) is reflexive, symmetric and transitive."""
    a = aa.legs[0].dst
    r1, r2 = e.compose(aa.legs[0], m), e.compose(aa.legs[1], m)
    ida = e.identity(a)
    diag = _pairing(e, aa, ida, ida)
    if factors_through(e, diag, m) is None:
        return False
    if factors_through(e, _pairing(e, aa, r2, r1), m) is None:
        return False
    pb = ex_pullback(e, r2, r1)
    if not pb.found:
        raise PreconditionError("composite relation outside cap")
    s, t = pb.witness.cone.legs[:2]
    comp = _pairing(e, aa, e.compose(r1, s), e.compose(r2, t))
    return factors_through(e, comp, m) is not None


def coequaliser(e: ExCompletion, k1: ExArrow, k2: ExArrow) -> SearchResult:
    """Brute-force coequaliser among enumerated objects."""
    for b in e.objects():
        for q in e.hom(k1.dst, b):
            if is_coequaliser(e, k1, k2, q):
                return SearchResult(Verdict.FOUND, q, Certificate("coequaliser", e.exhaustive))
    return SearchResult.failure(e.exhaustive, "no enumerated coequaliser")


def effectiveness(e: ExCompletion, aa: Cone, m: ExArrow) -> SearchResult:
    """An equivalence relation is the kernel pair of its coequaliser."""
    r1, r2 = e.compose(aa.legs[0], m), e.compose(aa.legs[1], m)
    q = coequaliser(e, r1, r2)
    if not q.found:
        return q
    kp = ex_kernel_pair(e, q.witness)
    if not kp.found:
        return kp
    k1, k2 = kp.witness.cone.legs[:2]
    km = _pairing(e, aa, k1, k2)
    same = factors_through(e, km, m) is not None and factors_through(e, m, km) is not None
    return SearchResult(Verdict.FOUND if same else Verdict.NOT_FOUND, q.witness, kp.certificate)


def image_pullback_stability(e: ExCompletion, f: ExArrow, g: ExArrow) -> SearchResult:
    """Pulling back along ``g`` commutes with taking the image of ``f``."""
    img = image_factorisation(e, f)
    if not img.found:
        return img
    m = img.witness[1]
    pm = ex_pullback(e, m, g)
    pf = ex_pullback(e, f, g)
    if not (pm.found and pf.found):
        return SearchResult(Verdict.UNDECIDED, None, None, "pullback outside cap")
    m1 = pm.witness.cone.legs[1]
    img2 = image_factorisation(e, pf.witness.cone.legs[1])
    if not img2.found:
        return img2
    m2 = img2.witness[1]
    same = factors_through(e, m1, m2) is not None and factors_through(e, m2, m1) is not None
    return SearchResult(Verdict.FOUND if same else Verdict.NOT_FOUND, (m1, m2))


def enough_projectives(e: ExCompletion) -> list:
    """Objects whose canonical cover fails to be a regular epi (should be empty)."""
    return [a for a in e.objects() if not is_regular_epi(e, e.cover(a))]


def subobject_isomorphism(e: ExCompletion, x) -> SearchResult:
    """Sub(Γx) against the order reflection of arrows into x, elementwise.

    The witness maps each cone class to its subobject index.
    """
    from .weaklim import cone_preorder

    pre = cone_preorder(e.base, (x,))
    lat = subobjects(e, e.gamma(x)).witness
    index = {}
    for ci, cl in enumerate(pre.classes):
        f = pre.cones[cl[0]].legs[0]
        img = image_factorisation(e, e.gamma_arrow(f))
        if not img.found:
            return SearchResult(Verdict.UNDECIDED, None, None, "image outside cap")
        i = lat.locate(e, img.witness[1])
        if i is None:
            return SearchResult(Verdict.NOT_FOUND, ci, None, "class without a subobject")
        index[ci] = i
    bijective = sorted(index.values()) == list(range(len(lat)))
    ordered = all(
        pre.class_leq(ci, cj) == lat.leq(index[ci], index[cj]) for ci in index for cj in index
    )
    ok = bijective and ordered
    return SearchResult(Verdict.FOUND if ok else Verdict.NOT_FOUND, index, Certificate("sub_iso", lat.exhaustive, len(index) ** 2))
