"""Pseudo equivalence relations in a category with finite hom-sets."""
from __future__ import annotations

from dataclasses import dataclass, field

from .handle import Arrow, CategoryHandle
from .results import PreconditionError


@dataclass(frozen=True)
class PseudoEqRel:
    """A parallel pair ``d0, d1: x1 => x0`` that is reflexive, symmetric and
    transitive on generalised elements.

    Only the pair itself takes part in equality and hashing; the witnesses
    are evidence and may differ between equal relations.
    """

    x1: object
    x0: object
    d0: Arrow
    d1: Arrow
    refl: Arrow | None = field(default=None, compare=False)
    sym: Arrow | None = field(default=None, compare=False)
    trans: tuple | None = field(default=None, compare=False, repr=False)

    def __repr__(self) -> str:
        if self.x1 == self.x0 and self.d0 == self.d1 and self.d0[0] == self.d0[1] == self.x0 and self.refl == self.d0:
            return f"Γ({self.x0!r})"
        return f"Rel({self.x1!r}⇉{self.x0!r}; {self.d0[2]!r}, {self.d1[2]!r})"

    def related_pairs(self, c: CategoryHandle, t) -> frozenset:
        """The relation on generalised elements ``t -> x0`` induced by ``x1``."""
        key = ("related", self, t)
        hit = c.memo.get(key)
        if hit is None:
            hit = frozenset((c.compose(self.d0, h), c.compose(self.d1, h)) for h in c.hom(t, self.x1))
            c.memo[key] = hit
        return hit

    def related(self, c: CategoryHandle, u: Arrow, v: Arrow) -> bool:
        return (u, v) in self.related_pairs(c, u[0])

    def homotopy(self, c: CategoryHandle, u: Arrow, v: Arrow) -> Arrow | None:
        """An arrow H with d0 H = u and d1 H = v."""
        for h in c.hom(u[0], self.x1):
            if c.compose(self.d0, h) == u and c.compose(self.d1, h) == v:
                return h
        return None


def identity_relation(c: CategoryHandle, x) -> PseudoEqRel:
    i = c.identity(x)
    return PseudoEqRel(x, x, i, i, i, i, None)


def is_identity_relation(c: CategoryHandle, r: PseudoEqRel) -> bool:
    i = c.identity(r.x0)
    return r.x1 == r.x0 and r.d0 == i and r.d1 == i


def find_pseudo_eq_rel(c: CategoryHandle, d0: Arrow, d1: Arrow) -> PseudoEqRel | None:
    """Return the relation with reflexivity/symmetry witnesses if ``d0, d1`` is
    a pseudo equivalence relation (transitivity checked on generalised
    elements over every enumerated object), else None."""
    x1, x0 = d0[0], d0[1]
    idx = c.identity(x0)
    refl = next((r for r in c.hom(x0, x1) if c.compose(d0, r) == idx and c.compose(d1, r) == idx), None)
    if refl is None:
        return None
    sym = next((s for s in c.hom(x1, x1) if c.compose(d0, s) == d1 and c.compose(d1, s) == d0), None)
    if sym is None:
        return None
    rel = PseudoEqRel(x1, x0, d0, d1, refl, sym)
    if not is_transitive(c, rel):
        return None
    return rel


def is_transitive(c: CategoryHandle, rel: PseudoEqRel) -> bool:
    for t in c.objects():
        pairs = rel.related_pairs(c, t)
        succ: dict = {}
        for u, v in pairs:
            succ.setdefault(u, set()).add(v)
        for u, vs in succ.items():
            for v in vs:
                if not succ.get(v, set()) <= vs:
                    return False
    return True


def transitivity_witness(c: CategoryHandle, rel: PseudoEqRel):
    """``(pullback cone, t)`` with t: P -> x1 composing the two halves, using the
    canonical weak pullback of d1 against d0; None if the weak pullback is
    not found inside the cap."""
    from .weaklim import Diagram, weak_limit

    res = weak_limit(c, Diagram.cospan(rel.d1, rel.d0))
    if not res.found:
        return None
    cone = res.witness
    p1, p2 = cone.legs[0], cone.legs[1]
    u, v = c.compose(rel.d0, p1), c.compose(rel.d1, p2)
    t = rel.homotopy(c, u, v)
    if t is None:
        raise PreconditionError("relation is not transitive on its weak pullback")
    return cone, t


def with_witnesses(c: CategoryHandle, rel: PseudoEqRel) -> PseudoEqRel:
    found = find_pseudo_eq_rel(c, rel.d0, rel.d1)
    if found is None:
        raise PreconditionError(f"{rel!r} is not a pseudo equivalence relation")
    return PseudoEqRel(rel.x1, rel.x0, rel.d0, rel.d1, found.refl, found.sym, transitivity_witness(c, rel))
