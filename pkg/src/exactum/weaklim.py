"""Weak limits, cone preorders, determined-by-projections and equalities."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Sequence

from .handle import Arrow, CategoryHandle
from .results import Certificate, SearchResult, Verdict


@dataclass(frozen=True)
class Diagram:
    """Finite shape labelled in a category: ``nodes[i]`` is an object and each
    edge ``(i, j, f)`` has ``f: nodes[i] -> nodes[j]``."""

    nodes: tuple
    edges: tuple = ()

    @classmethod
    def discrete(cls, objects: Sequence) -> "Diagram":
        return cls(tuple(objects))

    @classmethod
    def cospan(cls, f: Arrow, g: Arrow) -> "Diagram":
        # nodes: dom f, dom g, common codomain
        return cls((f[0], g[0], f[1]), ((0, 2, f), (1, 2, g)))

    @classmethod
    def parallel(cls, f: Arrow, g: Arrow) -> "Diagram":
        return cls((f[0], f[1]), ((0, 1, f), (0, 1, g)))

    def check(self, c: CategoryHandle) -> None:
        for i, j, f in self.edges:
            if (f[0], f[1]) != (self.nodes[i], self.nodes[j]):
                raise ValueError(f"edge {i}->{j} mislabelled by {f!r}")


@dataclass(frozen=True)
class Cone:
    apex: object
    legs: tuple

    def leg(self, i: int) -> Arrow:
        return self.legs[i]


def _plan(d: Diagram):
    """Order in which cone legs are assigned: free legs are enumerated, the
    others are derived from an incoming edge."""
    n = len(d.nodes)
    incoming = {i: [e for e in d.edges if e[1] == i] for i in range(n)}
    assigned: list[int] = []
    steps = []
    done = set()
    while len(done) < n:
        for i in range(n):
            if i in done:
                continue
            src = next((e for e in incoming[i] if e[0] in done), None)
            if src is not None:
                steps.append(("derived", i, src))
                break
        else:
            roots = [i for i in range(n) if i not in done and not incoming[i]]
            i = roots[0] if roots else min(set(range(n)) - done)
            steps.append(("free", i, None))
        i = steps[-1][1]
        done.add(i)
        assigned.append(i)
    # after step k, check edges whose endpoints are both assigned by then
    checks = []
    seen: set[int] = set()
    for kind, i, src in steps:
        seen.add(i)
        checks.append([e for e in d.edges if e[0] in seen and e[1] in seen and (e[0] == i or e[1] == i) and e is not src])
    return steps, checks


def cones_at(c: CategoryHandle, d: Diagram, apex) -> list[tuple]:
    """All cones over ``d`` with the given apex, as leg tuples in canonical order."""
    key = ("cones", d, apex)
    if key in c.memo:
        return c.memo[key]
    steps, checks = _plan(d)
    n = len(d.nodes)
    legs: list = [None] * n
    out: list[tuple] = []
    comp = c.compose

    def rec(k: int) -> None:
        if k == len(steps):
            out.append(tuple(legs))
            return
        kind, i, src = steps[k]
        if kind == "free":
            options = c.hom(apex, d.nodes[i])
        else:
            options = (comp(src[2], legs[src[0]]),)
        for f in options:
            legs[i] = f
            if all(comp(e[2], legs[e[0]]) == legs[e[1]] for e in checks[k]):
                rec(k + 1)
        legs[i] = None

    rec(0)
    c.memo[key] = out
    return out


def all_cones(c: CategoryHandle, d: Diagram) -> list[Cone]:
    return [Cone(a, legs) for a in c.objects() for legs in cones_at(c, d, a)]


def factorization(c: CategoryHandle, k: Cone, l: Cone) -> Arrow | None:
    """An arrow m: apex(k) -> apex(l) with l.legs . m == k.legs, if any."""
    for m in c.hom(k.apex, l.apex):
        if all(c.compose(lg, m) == kg for lg, kg in zip(l.legs, k.legs)):
            return m
    return None


def _reach(c: CategoryHandle, l: Cone, t) -> set[tuple]:
    return {tuple(c.compose(lg, m) for lg in l.legs) for m in c.hom(t, l.apex)}


def is_weakly_terminal(c: CategoryHandle, d: Diagram, l: Cone) -> tuple[bool, int]:
    checks = 0
    for t in c.objects():
        cs = cones_at(c, d, t)
        if not cs:
            continue
        if len(c.hom(t, l.apex)) < len(cs):
            return False, checks
        reach = _reach(c, l, t)
        checks += len(cs)
        if not reach.issuperset(cs):
            return False, checks
    return True, checks


def weak_limit(c: CategoryHandle, d: Diagram, cap=None) -> SearchResult:
    """Canonical-minimal weakly terminal cone over ``d``.

    NotFound is only returned when ``c`` is enumerated exhaustively; a capped
    provider yields Undecided instead.
    """
    key = ("weak_limit", d)
    if key in c.memo:
        return c.memo[key]
    d.check(c)
    tried = 0
    result = None
    for a in c.objects():
        for legs in cones_at(c, d, a):
            tried += 1
            cone = Cone(a, legs)
            ok, checks = is_weakly_terminal(c, d, cone)
            if ok:
                cert = Certificate(
                    "weak_limit",
                    exhaustive=c.exhaustive,
                    checks=checks,
                    details={"candidates_tried": tried, "objects": len(c.objects())},
                )
                result = SearchResult(Verdict.FOUND, cone, cert)
                break
        if result is not None:
            break
    if result is None:
        cert = Certificate("weak_limit", exhaustive=c.exhaustive, details={"candidates_tried": tried})
        result = SearchResult.failure(c.exhaustive, "no weakly terminal cone", cert)
    c.memo[key] = result
    return result


def weakly_terminal_cones(c: CategoryHandle, d: Diagram) -> list[Cone]:
    """Every weakly terminal cone (all weak limits, not just the canonical one)."""
    key = ("all_weak_limits", d)
    if key not in c.memo:
        c.memo[key] = [k for k in all_cones(c, d) if is_weakly_terminal(c, d, k)[0]]
    return c.memo[key]


def recertify(c: CategoryHandle, d: Diagram, l: Cone) -> bool:
    """Re-check a Found certificate: every enumerated cone factors through ``l``."""
    return all(factorization(c, k, l) is not None for k in all_cones(c, d))


def weak_product(c: CategoryHandle, *objects) -> SearchResult:
    return weak_limit(c, Diagram.discrete(objects))


def weak_terminal(c: CategoryHandle) -> SearchResult:
    return weak_limit(c, Diagram(()))


def weak_finite_limits(c: CategoryHandle, terminal: bool = True) -> SearchResult:
    """Weak binary products, weak equalizers and (optionally) a weak terminal.

    Only decidable on exhaustive handles; capped families come with analytic
    limit providers and are reported Undecided here.  The witness of a
    failure is the diagram without a weak limit.
    """
    key = ("weak_finite_limits", terminal)
    if key in c.memo:
        return c.memo[key]
    if not c.exhaustive:
        res = SearchResult(Verdict.UNDECIDED, None, None, "capped provider")
        c.memo[key] = res
        return res
    obs = c.objects()
    diagrams = [Diagram(())] if terminal else []
    diagrams += [Diagram.discrete((a, b)) for i, a in enumerate(obs) for b in obs[i:]]
    for a in obs:
        for b in obs:
            hom = c.hom(a, b)
            diagrams += [Diagram.parallel(f, g) for i, f in enumerate(hom) for g in hom[i + 1:]]
    res = SearchResult(Verdict.FOUND, None, Certificate("weak_finite_limits", True, len(diagrams)))
    for d in diagrams:
        if not weak_limit(c, d).found:
            res = SearchResult(Verdict.NOT_FOUND, d, Certificate("weak_finite_limits", True, len(diagrams)),
                               "diagram without a weak limit")
            break
    c.memo[key] = res
    return res


# --------------------------------------------------------------------------
# cone preorders


@dataclass
class ConePreorder:
    cones: list[Cone]
    # below[i] = indices j with cones[i] <= cones[j]
    below: list[set[int]]
    classes: list[list[int]] = field(default_factory=list)
    exhaustive: bool = True

    def leq(self, i: int, j: int) -> bool:
        return j in self.below[i]

    def class_of(self, i: int) -> int:
        return next(n for n, cl in enumerate(self.classes) if i in cl)

    def class_leq(self, a: int, b: int) -> bool:
        return self.leq(self.classes[a][0], self.classes[b][0])

    def top_class(self) -> int | None:
        for n in range(len(self.classes)):
            if all(self.class_leq(m, n) for m in range(len(self.classes))):
                return n
        return None


def cone_preorder(c: CategoryHandle, objects_or_diagram, cap=None) -> ConePreorder:
    d = objects_or_diagram if isinstance(objects_or_diagram, Diagram) else Diagram.discrete(objects_or_diagram)
    cones = all_cones(c, d)
    below = []
    for k in cones:
        reach = set()
        for j, l in enumerate(cones):
            if factorization(c, k, l) is not None:
                reach.add(j)
        below.append(reach)
    classes: list[list[int]] = []
    for i in range(len(cones)):
        for cl in classes:
            j = cl[0]
            if j in below[i] and i in below[j]:
                cl.append(i)
                break
        else:
            classes.append([i])
    return ConePreorder(cones, below, classes, c.exhaustive)


# --------------------------------------------------------------------------
# arrows out of weak limits


def is_determined_by_projections(c: CategoryHandle, w: Cone, f: Arrow, cap=None) -> SearchResult:
    """f: apex -> A coequalises every pair equalised by all legs of ``w``."""
    checks = 0
    for t in c.objects():
        seen: dict[tuple, tuple] = {}
        for h in c.hom(t, w.apex):
            key = tuple(c.compose(lg, h) for lg in w.legs)
            fh = c.compose(f, h)
            checks += 1
            prev = seen.get(key)
            if prev is None:
                seen[key] = (h, fh)
            elif prev[1] != fh:
                cert = Certificate("determined_by_projections", True, checks, {"h": prev[0], "k": h})
                return SearchResult(Verdict.NOT_FOUND, (prev[0], h), cert, "pair separated by f")
    cert = Certificate("determined_by_projections", c.exhaustive, checks)
    return SearchResult(Verdict.FOUND, None, cert)


def equality_diagram(w: Cone, d: Diagram) -> Diagram:
    """Two copies of the apex of ``w`` over the base diagram ``d``."""
    n = len(d.nodes)
    nodes = (w.apex, w.apex) + tuple(d.nodes)
    edges = tuple((2 + i, 2 + j, f) for i, j, f in d.edges)
    edges += tuple((0, 2 + i, w.legs[i]) for i in range(n))
    edges += tuple((1, 2 + i, w.legs[i]) for i in range(n))
    return Diagram(nodes, edges)


def equality_for_weak_product(c: CategoryHandle, w: Cone, base: Diagram | None = None, cap=None) -> SearchResult:
    """The canonical weak limit of two copies of the apex of ``w`` over the
    base diagram, packaged as a pseudo equivalence relation on the apex."""
    from .relation import find_pseudo_eq_rel

    base = base if base is not None else Diagram.discrete([lg[1] for lg in w.legs])
    res = weak_limit(c, equality_diagram(w, base))
    if not res.found:
        return res
    v1 = res.witness
    rel = find_pseudo_eq_rel(c, v1.legs[0], v1.legs[1])
    if rel is None:
        raise AssertionError("an equality for a weak limit must be a pseudo equivalence relation")
    return SearchResult(Verdict.FOUND, rel, res.certificate)


def equalities_for_weak_product(c: CategoryHandle, w: Cone, base: Diagram | None = None) -> list:
    """Every equality (one per weakly terminal cone of the equality diagram)."""
    from .relation import find_pseudo_eq_rel

    base = base if base is not None else Diagram.discrete([lg[1] for lg in w.legs])
    out = []
    for v1 in weakly_terminal_cones(c, equality_diagram(w, base)):
        rel = find_pseudo_eq_rel(c, v1.legs[0], v1.legs[1])
        if rel is not None and rel not in out:
            out.append(rel)
    return out


def preserves_projections(c: CategoryHandle, w: Cone, f: Arrow, rel, equality=None, cap=None) -> SearchResult:
    """Is there a tracking ``V1 -> Z1`` of ``f`` from an equality of ``w`` into ``rel``?"""
    if equality is None:
        eq = equality_for_weak_product(c, w)
        if not eq.found:
            return eq
        equality = eq.witness
    u = c.compose(f, equality.d0)
    v = c.compose(f, equality.d1)
    h = rel.homotopy(c, u, v)
    cert = Certificate("preserves_projections", True, len(c.hom(equality.x1, rel.x1)), {"equality": repr(equality)})
    if h is None:
        return SearchResult(Verdict.NOT_FOUND, None, cert, "no tracking of the equality")
    return SearchResult(Verdict.FOUND, h, cert)
