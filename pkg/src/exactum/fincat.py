"""Finite table-presented categories: parsing, validation, Cauchy completion, slices."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Callable

from .handle import Arrow, CategoryHandle
from .results import InputError

_ID = r"[A-Za-z0-9_'+\-]+"


@dataclass(frozen=True)
class FinCategory:
    name: str
    objects: tuple[str, ...]
    # (id, src, dst), in declaration order
    arrows: tuple[tuple[str, str, str], ...]
    # (g, f) -> g.f for composable non-identity pairs
    comp: dict = field(default_factory=dict, hash=False, compare=False)

    def arrow_ends(self) -> dict[str, tuple[str, str]]:
        return {a: (s, t) for a, s, t in self.arrows}

    def as_handle(self) -> "TableCategory":
        return TableCategory(self)


def _fail(msg: str, lineno: int, col: int = 1):
    raise InputError(msg, lineno, col)


def parse_spec(text: str) -> FinCategory:
    """Parse the line-oriented category format.

    Totality of the composition table is not checked here; see
    :func:`validate_category`.
    """
    name = None
    objects: list[str] = []
    arrows: list[tuple[str, str, str]] = []
    comp: dict[tuple[str, str], str] = {}
    ends: dict[str, tuple[str, str]] = {}
    pending: list[tuple[int, int, str, str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        stripped = line.strip()
        if not stripped:
            continue
        col = len(line) - len(line.lstrip()) + 1
        keyword = stripped.split()[0]
        if keyword == "category":
            m = re.fullmatch(rf"category\s+({_ID})", stripped)
            if not m:
                _fail("malformed category line", lineno, col)
            if name is not None:
                _fail("duplicate category header", lineno, col)
            name = m.group(1)
        elif keyword == "object":
            m = re.fullmatch(rf"object\s+({_ID})", stripped)
            if not m:
                _fail("malformed object line", lineno, col)
            oid = m.group(1)
            if oid in objects:
                _fail(f"duplicate object id {oid!r}", lineno, col)
            objects.append(oid)
        elif keyword == "arrow":
            m = re.fullmatch(rf"arrow\s+({_ID})\s*:\s*({_ID})\s*->\s*({_ID})", stripped)
            if not m:
                _fail("malformed arrow line", lineno, col)
            aid, s, t = m.groups()
            if aid in ends:
                _fail(f"duplicate arrow id {aid!r}", lineno, col)
            for end in (s, t):
                if end not in objects:
                    _fail(f"arrow {aid!r} references unknown object {end!r}", lineno, col)
            ends[aid] = (s, t)
            arrows.append((aid, s, t))
        elif keyword == "compose":
            m = re.fullmatch(rf"compose\s+({_ID})\s*\.\s*({_ID})\s*=\s*({_ID})", stripped)
            if not m:
                _fail("malformed compose line", lineno, col)
            pending.append((lineno, col, *m.groups()))
        else:
            _fail(f"unknown keyword {keyword!r}", lineno, col)
    if name is None:
        raise InputError("missing 'category NAME' header", 1, 1)
    for lineno, col, g, f, h in pending:
        for a in (g, f, h):
            if a not in ends:
                _fail(f"compose references unknown arrow {a!r}", lineno, col)
        if ends[f][1] != ends[g][0]:
            _fail(f"{g} . {f} is not composable", lineno, col)
        if (g, f) in comp:
            _fail(f"duplicate compose entry {g} . {f}", lineno, col)
        comp[(g, f)] = h
    return FinCategory(name, tuple(objects), tuple(arrows), comp)


def serialize_spec(c: FinCategory) -> str:
    lines = [f"category {c.name}"]
    lines += [f"object {o}" for o in c.objects]
    lines += [f"arrow {a} : {s} -> {t}" for a, s, t in c.arrows]
    order = {a: i for i, (a, _, _) in enumerate(c.arrows)}
    for (g, f), h in sorted(c.comp.items(), key=lambda kv: (order[kv[0][1]], order[kv[0][0]])):
        lines.append(f"compose {g} . {f} = {h}")
    return "\n".join(lines) + "\n"


@dataclass
class ValidationReport:
    violations: list[dict] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, law: str, *arrows: str, detail: str = "") -> None:
        self.violations.append({"law": law, "arrows": list(arrows), "detail": detail})

    def laws(self) -> set[str]:
        return {v["law"] for v in self.violations}


def validate_category(c: FinCategory) -> ValidationReport:
    """Report every violated category law; empty iff ``c`` is a category."""
    report = ValidationReport()
    ends = c.arrow_ends()
    # identities are implicit, so the unit laws can only fail through a bad
    # closure entry; ``ids`` lets compose() treat them uniformly
    ids = {f"id:{o}": (o, o) for o in c.objects}
    allends = {**ends, **ids}

    def compose(g: str, f: str) -> str | None:
        if g in ids:
            return f
        if f in ids:
            return g
        return c.comp.get((g, f))

    for g, (gs, gt) in ends.items():
        for f, (fs, ft) in ends.items():
            if ft != gs:
                continue
            h = c.comp.get((g, f))
            if h is None:
                report.add("totality", g, f, detail="missing composite")
            elif allends.get(h) != (fs, gt):
                report.add("closure", g, f, h, detail="composite has wrong endpoints")
    for h, (hs, ht) in ends.items():
        for g, (gs, gt) in ends.items():
            if gt != hs:
                continue
            for f, (fs, ft) in ends.items():
                if ft != gs:
                    continue
                gf, hg = compose(g, f), compose(h, g)
                if gf is None or hg is None:
                    continue
                left, right = compose(h, gf), compose(hg, f)
                if left is not None and right is not None and left != right:
                    report.add("associativity", h, g, f, detail=f"(h.g).f={right} but h.(g.f)={left}")
    return report


class TableCategory(CategoryHandle):
    """Handle over a validated :class:`FinCategory`; identities carry data ``None``."""

    def __init__(self, c: FinCategory):
        super().__init__()
        self.table = c
        self.name = c.name
        self._ends = c.arrow_ends()
        self._byhom: dict[tuple[str, str], list] = {}
        for a, s, t in c.arrows:
            self._byhom.setdefault((s, t), []).append((s, t, a))
        self.thin = all(
            len(self._byhom.get((a, b), [])) + (a == b) <= 1 for a in c.objects for b in c.objects
        )

    def objects(self):
        return self.table.objects

    def _hom(self, a, b):
        out = [(a, a, None)] if a == b else []
        return out + self._byhom.get((a, b), [])

    def identity(self, a):
        return (a, a, None)

    def compose(self, g, f):
        if f[1] != g[0]:
            raise ValueError(f"not composable: {g} . {f}")
        if g[2] is None:
            return f
        if f[2] is None:
            return g
        h = self.table.comp[(g[2], f[2])]
        return (f[0], g[1], h)


@dataclass
class FunctorData:
    source: CategoryHandle
    target: CategoryHandle
    on_objects: Callable
    on_arrows: Callable

    def violations(self) -> list[str]:
        """Check preservation of endpoints, identities and composition."""
        src, tgt = self.source, self.target
        out = []
        obs = src.objects()
        for a in obs:
            if self.on_arrows(src.identity(a)) != tgt.identity(self.on_objects(a)):
                out.append(f"identity of {a!r}")
        for a in obs:
            for b in obs:
                for f in src.hom(a, b):
                    Ff = self.on_arrows(f)
                    if (Ff[0], Ff[1]) != (self.on_objects(a), self.on_objects(b)):
                        out.append(f"endpoints of {f!r}")
                    for c in obs:
                        for g in src.hom(b, c):
                            if self.on_arrows(src.compose(g, f)) != tgt.compose(self.on_arrows(g), Ff):
                                out.append(f"composition {g!r} . {f!r}")
        return out

    def is_full_and_faithful(self) -> bool:
        obs = self.source.objects()
        for a in obs:
            for b in obs:
                image = [self.on_arrows(f) for f in self.source.hom(a, b)]
                target = self.target.hom(self.on_objects(a), self.on_objects(b))
                if len(set(image)) != len(image) or set(image) != set(target):
                    return False
        return True


class CauchyCompletion(CategoryHandle):
    """Splitting of idempotents: objects are pairs (X, e) with e idempotent."""

    def __init__(self, base: CategoryHandle):
        super().__init__()
        self.base = base
        self.name = f"cauchy({base.name})"
        self.exhaustive = base.exhaustive
        obs = []
        for x in base.objects():
            for e in base.hom(x, x):
                if base.compose(e, e) == e:
                    obs.append((x, e))
        self._objects = tuple(obs)

    def objects(self):
        return self._objects

    def _hom(self, a, b):
        (x, e), (y, d) = a, b
        c = self.base
        for f in c.hom(x, y):
            if c.compose(d, c.compose(f, e)) == f:
                yield (a, b, f)

    def identity(self, a):
        return (a, a, a[1])

    def compose(self, g, f):
        return (f[0], g[1], self.base.compose(g[2], f[2]))


def cauchy_completion(c: CategoryHandle) -> tuple[CauchyCompletion, FunctorData]:
    k = CauchyCompletion(c)
    embed = FunctorData(
        c,
        k,
        lambda x: (x, c.identity(x)),
        lambda f: ((f[0], c.identity(f[0])), (f[1], c.identity(f[1])), f),
    )
    return k, embed


def split_idempotent(c: CategoryHandle, e: Arrow):
    """Return (S, r, s) with s.r = e and r.s = id_S, or None."""
    x = e[0]
    for s_obj in c.objects():
        for r in c.hom(x, s_obj):
            for s in c.hom(s_obj, x):
                if c.compose(s, r) == e and c.compose(r, s) == c.identity(s_obj):
                    return s_obj, r, s
    return None


def unsplit_idempotents(c: CategoryHandle) -> list[Arrow]:
    out = []
    for x in c.objects():
        for e in c.hom(x, x):
            if c.compose(e, e) == e and split_idempotent(c, e) is None:
                out.append(e)
    return out


class SliceCategory(CategoryHandle):
    """Objects are arrows into ``u``; arrows are commuting triangles."""

    def __init__(self, base: CategoryHandle, u):
        super().__init__()
        self.base = base
        self.over = u
        self.name = f"{base.name}/{u}"
        self.exhaustive = base.exhaustive
        self.thin = base.thin
        self._objects = tuple((x, f) for x in base.objects() for f in base.hom(x, u))

    def objects(self):
        return self._objects

    def grade(self, a):
        return self.base.grade(a[0])

    def _hom(self, a, b):
        (x, f), (y, g) = a, b
        for h in self.base.hom(x, y):
            if self.base.compose(g, h) == f:
                yield (a, b, h)

    def identity(self, a):
        return (a, a, self.base.identity(a[0]))

    def compose(self, g, f):
        return (f[0], g[1], self.base.compose(g[2], f[2]))


def slice_category(c: CategoryHandle, u) -> tuple[SliceCategory, FunctorData]:
    if u not in c.objects():
        raise InputError(f"unknown object {u!r}")
    s = SliceCategory(c, u)
    proj = FunctorData(s, c, lambda a: a[0], lambda f: f[2])
    return s, proj
