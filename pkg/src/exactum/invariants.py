"""Per-fixture invariant suite shared by the CLI corpus runner and the tests.

Each check returns a :class:`Check`; ``status`` is ``pass``, ``fail`` or
``undecided`` (nothing decidable within the cap).  Checks never raise on a
mathematical failure: a :class:`SoundnessError` is caught and reported as
``fail`` so the suite can aggregate it.
"""
from __future__ import annotations

import json
import random
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .catprovider import make_two_infinities, parse_group, load_fixture, representable_product, Z2_SPEC
from .construct import (
    build_exponential,
    build_exponential_proj,
    decide_cartesian_closure,
    oracle_exponential,
)
from .excomp import (
    ExCompletion,
    covers_in,
    embed_projectives,
    enough_projectives,
    effectiveness,
    ex_product,
    image_factorisation,
    image_pullback_stability,
    is_equivalence_relation,
    is_projective,
    kernel_pair_exactness,
    projectivity_report,
    subobject_isomorphism,
    subobjects,
)
from .relation import find_pseudo_eq_rel, identity_relation, is_identity_relation
from .results import InputError, PreconditionError, SoundnessError, Verdict
from .weaklim import Diagram, cone_preorder, weak_limit, weak_product
from .wsp import (
    UNDEFINED_NO_WSP,
    factor_diagram,
    search_gwsp,
    search_pseudo_simple_product,
    search_weak_simple_product,
    wx_adjunction_check,
)

PASS, FAIL, UNDECIDED = "pass", "fail", "undecided"
SAMPLE_SEED = 20240101


@dataclass
class Check:
    name: str
    status: str
    instances: int = 0
    decided: int = 0
    details: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return asdict(self)


@dataclass
class FixtureSpec:
    """A corpus entry: which provider to build and the verdicts we expect."""

    name: str
    fixture: str
    k: int = 4
    cap: int | None = None
    group: str | None = None
    expected: dict = field(default_factory=dict)

    def build(self):
        grp = parse_group(self.group) if self.group else None
        return load_fixture(self.fixture, k=self.k, cap=self.cap, group=grp)

    @classmethod
    def from_json(cls, data: dict, name: str | None = None) -> "FixtureSpec":
        if "fixture" not in data:
            raise InputError("fixture config lacks a 'fixture' entry")
        return cls(
            name=data.get("name", name or data["fixture"]),
            fixture=data["fixture"],
            k=int(data.get("k", 4)),
            cap=data.get("cap"),
            group=data.get("group"),
            expected=dict(data.get("expected", {})),
        )


DEFAULT_CORPUS = [
    FixtureSpec("one", "one", expected={"ccc": "holds", "lccc": "holds"}),
    FixtureSpec("chain2", "chain2", expected={"ccc": "holds", "lccc": "holds"}),
    FixtureSpec("diamond", "diamond", expected={"ccc": "holds", "lccc": "holds"}),
    FixtureSpec("m3", "m3", expected={"ccc": "refuted", "lccc": "refuted"}),
    FixtureSpec("two-infinities-4", "two-infinities", k=4, expected={"ccc": "refuted", "lccc": "holds"}),
    FixtureSpec("free-gsets-z2", "free-gsets", cap=2, group=Z2_SPEC, expected={"ccc": "undecided", "lccc": "undecided"}),
    FixtureSpec("finset-3", "finset", cap=3, expected={"ccc": "undecided", "lccc": "undecided"}),
]


def write_default_corpus(directory) -> list[Path]:
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    out = []
    for spec in DEFAULT_CORPUS:
        data = {k: v for k, v in asdict(spec).items() if v is not None}
        path = directory / f"{spec.name}.json"
        path.write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
        out.append(path)
    return out


@dataclass
class Context:
    spec: FixtureSpec
    p: object
    e: ExCompletion

    @classmethod
    def of(cls, spec: FixtureSpec) -> "Context":
        p = spec.build()
        return cls(spec, p, ExCompletion(p, spec.cap))


def _sample(items: list, n: int) -> list:
    if len(items) <= n:
        return list(items)
    rng = random.Random(SAMPLE_SEED)
    idx = sorted(rng.sample(range(len(items)), n))
    return [items[i] for i in idx]


def _guard(name, fn):
    try:
        return fn()
    except SoundnessError as exc:
        return Check(name, FAIL, details={"soundness": str(exc)})


def _status(failures: int, decided: int) -> str:
    if failures:
        return FAIL
    return PASS if decided else UNDECIDED


# --------------------------------------------------------------------------
# individual checks


def check_category_laws(ctx: Context) -> Check:
    e = ctx.e
    obs = e.objects()
    bad, n = [], 0
    for a in obs:
        for b in obs:
            if not e.homdata(a, b).raw_closed:
                bad.append(("homotopy not closed", repr(a), repr(b)))
            for f in e.hom(a, b):
                n += 1
                if e.compose(f, e.identity(a)) != f or e.compose(e.identity(b), f) != f:
                    bad.append(("identity", repr(f)))
    triples = [(f, g, h) for a in obs for b in obs for c in obs for d in obs
               for f in e.hom(a, b) for g in e.hom(b, c) for h in e.hom(c, d)]
    for f, g, h in _sample(triples, 200):
        n += 1
        if e.compose(h, e.compose(g, f)) != e.compose(e.compose(h, g), f):
            bad.append(("associativity", repr(f)))
    return Check("category_laws", _status(len(bad), n), n, n, {"failures": bad[:5]})


def _verdict_word(value) -> str:
    return {True: "holds", False: "refuted", None: "undecided"}[value]


def check_closure(ctx: Context, local: bool) -> Check:
    name = "lccc" if local else "ccc"

    def run():
        v = decide_cartesian_closure(ctx.p, ctx.spec.cap, local, ctx.e)
        got = _verdict_word(v.value)
        want = ctx.spec.expected.get(name)
        ok = want is None or want == got
        details = {"verdict": got, "expected": want, "routes": v.routes}
        wit = v.witnesses.get("projective")
        if v.value is False and wit:
            details["witness"] = repr(wit)
        return Check(name, PASS if ok else FAIL, 1, int(v.value is not None), details)

    return _guard(name, run)


def exponential_agreement(ctx: Context) -> Check:
    """All exponential constructions and the oracle agree up to isomorphism."""
    e = ctx.e
    agreed, failures, undecided, rows = 0, [], 0, []
    obs = e.objects()
    for A in obs:
        for B in obs:
            results = {}
            if is_identity_relation(ctx.p, A):
                results["proj"] = build_exponential_proj(e, A.x0, B)
            results["reduct"] = build_exponential(e, A, B)
            results["oracle"] = oracle_exponential(e, A, B)
            verdicts = {k: r.verdict for k, r in results.items()}
            found = [r.witness.obj for r in results.values() if r.found]
            refuted = [k for k, v in verdicts.items() if v is Verdict.NOT_FOUND]
            if Verdict.UNDECIDED in verdicts.values():
                undecided += 1
            elif refuted and len(refuted) != len(results):
                failures.append((repr(A), repr(B), {k: v.value for k, v in verdicts.items()}))
            elif found and not all(e.find_iso(found[0], o) for o in found[1:]):
                failures.append((repr(A), repr(B), "non-isomorphic results"))
            elif found:
                agreed += 1
                rows.append((repr(A), repr(B), repr(e.canonical(found[0]) or found[0])))
            else:
                rows.append((repr(A), repr(B), "none"))
    decided = len(obs) ** 2 - undecided
    return Check("exponentials", _status(len(failures), decided), len(obs) ** 2, decided,
                 {"isomorphic_pairs": agreed, "failures": failures[:5], "table": rows})


def internal_projectivity_suite(ctx: Context) -> Check:
    """The three equivalent internal-projectivity predicates, plus the product lemmas."""
    p, e = ctx.p, ctx.e
    failures, decided, rows = [], 0, {}
    obs = list(p.objects())
    adj = {}
    for X in obs:
        for J in obs:
            r = wx_adjunction_check(e, J, X)
            if r.verdict is Verdict.FOUND:
                adj[(J, X)] = True
            elif r.verdict is Verdict.NOT_FOUND:
                adj[(J, X)] = None if r.reason == UNDEFINED_NO_WSP else False
            else:
                adj[(J, X)] = "undecided"
    # lemma: adjunction for (J, X) makes ΓJ x ΓX projective
    for (J, X), ok in adj.items():
        if ok is True:
            prod = ex_product(e, e.gamma(J), e.gamma(X))
            if prod.found:
                decided += 1
                if not is_projective(e, prod.witness.cone.apex):
                    failures.append(("product not projective", J, X))
    for a in e.objects():
        if not is_projective(e, a):
            continue
        rep = projectivity_report(e, a)
        row = {"internal": rep.internally_projective.value, **rep.witnesses}
        row.pop("retract", None)
        row.pop("lifting_counterexample", None)
        xs = [x for x in obs if e.find_iso(e.gamma(x), a)]
        if xs:
            vals = [adj[(J, xs[0])] for J in obs]
            if all(v in (True, False) for v in vals):
                wx_all = all(vals)
                row["wx_adjoint_all"] = wx_all
                if rep.internally_projective is not Verdict.UNDECIDED:
                    decided += 1
                    if wx_all != (rep.internally_projective is Verdict.FOUND):
                        failures.append(("wx vs internal projectivity", repr(a)))
            else:
                row["wx_adjoint_all"] = "undefined" if None in vals else "undecided"
        if rep.internally_projective is not Verdict.UNDECIDED:
            decided += 1
        rows[repr(a)] = row
    # corollary: adjunction everywhere iff binary products of projectives are projective
    vals = list(adj.values())
    if all(v in (True, False) for v in vals):
        prods = []
        for J in obs:
            for X in obs:
                pr = ex_product(e, e.gamma(J), e.gamma(X))
                prods.append(is_projective(e, pr.witness.cone.apex) if pr.found else None)
        if None not in prods:
            decided += 1
            if all(vals) != all(prods):
                failures.append(("corollary", all(vals), all(prods)))
    return Check("internal_projectivity", _status(len(failures), decided), len(rows), decided,
                 {"failures": failures, "objects": rows,
                  "wx": {f"{J},{X}": v for (J, X), v in adj.items()}})


def span_equality(p, f, g):
    """The relation on the apex of a span identifying elements with equal legs."""
    y, j, x = f[0], f[1], g[1]
    d = Diagram((y, y, j, x), ((0, 2, f), (1, 2, f), (0, 3, g), (1, 3, g)))
    w = weak_limit(p, d)
    if not w.found:
        return None
    return find_pseudo_eq_rel(p, w.witness.legs[0], w.witness.legs[1])


def _same_class(p, r1, r2) -> bool | None:
    if r1.verdict is Verdict.UNDECIDED or r2.verdict is Verdict.UNDECIDED:
        return None
    if r1.verdict != r2.verdict:
        return False
    if not r1.found:
        return True
    return factor_diagram(p, r1.witness, r2.witness) is not None and factor_diagram(p, r2.witness, r1.witness) is not None


def all_spans(p) -> list:
    return [(f, g) for y in p.objects() for j in p.objects() for f in p.hom(y, j)
            for x in p.objects() for g in p.hom(y, x)]


def mode_coherence(ctx: Context, limit: int = 25) -> Check:
    p = ctx.p
    failures, decided, n = [], 0, 0
    for f, g in _sample(all_spans(p), limit):
        n += 1
        ident = identity_relation(p, f[0])
        pairs = [(search_weak_simple_product(p, f, g), search_gwsp(p, f, g, ident), "identity")]
        eq = span_equality(p, f, g)
        if eq is not None:
            pairs.append((search_pseudo_simple_product(p, f, g), search_gwsp(p, f, g, eq), "equality"))
        ok_all, any_decided = True, False
        for plain, gen, tag in pairs:
            same = _same_class(p, plain, gen)
            if same is None:
                continue
            any_decided = True
            if not same:
                ok_all = False
                failures.append((tag, repr(f), repr(g)))
        for rel in [ident] + ([eq] if eq is not None else []):
            search_gwsp(p, f, g, rel, weak_mode=True)  # raises if the strong certificate fails
        decided += int(any_decided and ok_all)
    return Check("mode_coherence", _status(len(failures), decided), n, decided, {"failures": failures[:5]})


def exactness(ctx: Context, per_kind: int = 60) -> Check:
    e = ctx.e
    obs = e.objects()
    failures, decided, n = [], 0, 0
    counts = {"kernel_pair": 0, "effective": 0, "image_stability": 0}

    def record(kind, res, tag):
        nonlocal decided, n
        n += 1
        if res.verdict is Verdict.UNDECIDED:
            return
        decided += 1
        counts[kind] += 1
        if res.verdict is not Verdict.FOUND:
            failures.append((kind, tag))

    covers = covers_in(e)
    for q in _sample(covers, per_kind):
        record("kernel_pair", kernel_pair_exactness(e, q), repr(q))
    eqrels = []
    for a in obs:
        aa = ex_product(e, a, a)
        if not aa.found:
            continue
        cone = aa.witness.cone
        for m in subobjects(e, cone.apex).witness.monos:
            try:
                if is_equivalence_relation(e, cone, m):
                    eqrels.append((cone, m))
            except PreconditionError:
                continue
    for cone, m in _sample(eqrels, per_kind):
        record("effective", effectiveness(e, cone, m), repr(m))
    pairs = [(f, g) for b in obs for a in obs for c in obs for f in e.hom(a, b) for g in e.hom(c, b)]
    for f, g in _sample(pairs, per_kind):
        record("image_stability", image_pullback_stability(e, f, g), repr((f, g)))
    population = len(covers) + len(eqrels) + len(pairs)
    return Check("exactness", _status(len(failures), decided), n, decided,
                 {"failures": failures[:5], "counts": counts, "population": population})


def embedding(ctx: Context) -> Check:
    p, e = ctx.p, ctx.e
    gamma = embed_projectives(e)
    failures = list(gamma.violations())
    if not gamma.is_full_and_faithful():
        failures.append("Γ not full and faithful")
    failures += [f"cover of {a!r} not regular epi" for a in enough_projectives(e)]
    decided = 3
    for x in p.objects():
        r = subobject_isomorphism(e, x)
        if r.verdict is Verdict.UNDECIDED:
            continue
        decided += 1
        if not r.found:
            failures.append(f"Sub(Γ{x!r}) differs from the order reflection")
    return Check("embedding", _status(len(failures), decided), decided, decided, {"failures": failures[:5]})


def galois_suite(ctx: Context) -> Check:
    """Right adjoints from pseudo simple products on cone-preorder reflections."""
    p = ctx.p
    failures, decided, skipped = [], 0, 0
    obs = list(p.objects())
    for J in obs:
        sj = cone_preorder(p, (J,))
        for X in obs:
            sjx = cone_preorder(p, (J, X))
            pairs = _galois_pairs(p, sj, sjx, X)
            if pairs is None:
                skipped += 1
                continue
            for bi, ai, lhs, rhs in pairs:
                decided += 1
                if lhs != rhs:
                    failures.append((J, X, bi, ai))
    return Check("galois", _status(len(failures), decided), decided + skipped, decided,
                 {"failures": failures[:5], "skipped_pairs": skipped})


def _galois_pairs(p, sj, sjx, X):
    """(b, a, b x X <= a, b <= ∀a) over all classes, or None if some PSP is missing."""
    forall = {}
    for ci, cl in enumerate(sjx.classes):
        f, g = sjx.cones[cl[0]].legs
        r = search_pseudo_simple_product(p, f, g)
        if not r.found:
            return None
        forall[ci] = _class_of_arrow(p, sj, r.witness.w)
    out = []
    for bi, bcl in enumerate(sj.classes):
        b = sj.cones[bcl[0]].legs[0]
        wp = weak_product(p, b[0], X)
        if not wp.found:
            return None
        v1, v2 = wp.witness.legs
        bx = _class_of_legs(p, sjx, (p.compose(b, v1), v2))
        for ai, t in forall.items():
            out.append((bi, ai, sjx.class_leq(bx, ai), sj.class_leq(bi, t)))
    return out


def _class_of_legs(p, pre, legs) -> int:
    for i, k in enumerate(pre.cones):
        if k.legs == tuple(legs):
            return pre.class_of(i)
    raise SoundnessError("cone missing from its preorder")


def _class_of_arrow(p, pre, f) -> int:
    return _class_of_legs(p, pre, (f,))


def truncation_degeneracy(kmax: int = 6) -> Check:
    """For the finite truncations, ya x yb is representable by the top of the chain."""
    rows, failures = {}, []
    for k in range(1, kmax + 1):
        p = make_two_infinities(k)
        _, m = representable_product(p, "a", "b")
        e = ExCompletion(p)
        prod = ex_product(e, e.gamma("a"), e.gamma("b"))
        iso = prod.found and e.find_iso(prod.witness.cone.apex, e.gamma(str(k))) is not None
        proj = prod.found and is_projective(e, prod.witness.cone.apex)
        rows[k] = {"representing": m, "iso_to_top_of_chain": bool(iso), "projective": bool(proj)}
        if m != str(k) or not iso or not proj:
            failures.append(k)
    return Check("truncation", _status(len(failures), kmax), kmax, kmax, {"rows": rows, "failures": failures})


CHECKS = {
    "category_laws": check_category_laws,
    "ccc": lambda ctx: check_closure(ctx, False),
    "lccc": lambda ctx: check_closure(ctx, True),
    "exponentials": exponential_agreement,
    "internal_projectivity": internal_projectivity_suite,
    "mode_coherence": mode_coherence,
    "exactness": exactness,
    "embedding": embedding,
    "galois": galois_suite,
}


def run_fixture(spec: FixtureSpec, only: list[str] | None = None) -> list[Check]:
    ctx = Context.of(spec)
    out = []
    for name, fn in CHECKS.items():
        if only and name not in only:
            continue
        out.append(_guard(name, lambda fn=fn: fn(ctx)))
    if spec.fixture == "two-infinities" and (not only or "truncation" in only):
        out.append(_guard("truncation", truncation_degeneracy))
    return out
