"""Generated category families and the built-in fixture corpus."""
from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import product

from .fincat import FinCategory, parse_spec, validate_category
from .handle import CategoryHandle
from .results import InputError, PreconditionError


# --------------------------------------------------------------------------
# preorders


class Preorder(CategoryHandle):
    """A thin category; the unique arrow ``a -> b`` is ``(a, b, None)``."""

    thin = True

    def __init__(self, name: str, elements, leq: set[tuple]):
        super().__init__()
        self.name = name
        self._objects = tuple(elements)
        self.leq_pairs = frozenset(leq)

    def objects(self):
        return self._objects

    def leq(self, a, b) -> bool:
        return (a, b) in self.leq_pairs

    def _hom(self, a, b):
        return [(a, b, None)] if (a, b) in self.leq_pairs else []

    def identity(self, a):
        return (a, a, None)

    def compose(self, g, f):
        if f[1] != g[0]:
            raise ValueError(f"not composable: {g} . {f}")
        return (f[0], g[1], None)

    def down(self, a) -> frozenset:
        return frozenset(x for x in self._objects if self.leq(x, a))

    def meet(self, a, b):
        """Greatest lower bound, or None."""
        lower = self.down(a) & self.down(b)
        for m in self._objects:
            if m in lower and lower <= self.down(m):
                return m
        return None


def make_preorder(c: FinCategory) -> Preorder:
    report = validate_category(c)
    if not report.ok:
        raise PreconditionError(f"{c.name} is not a category: {report.violations[:3]}")
    seen = set()
    for _, s, t in c.arrows:
        if s == t or (s, t) in seen:
            raise PreconditionError(f"{c.name} is not thin at ({s}, {t})")
        seen.add((s, t))
    leq = {(o, o) for o in c.objects} | seen
    return Preorder(c.name, c.objects, leq)


def poset_spec(name: str, elements, covers) -> str:
    """Category-spec text for the reflexive-transitive closure of ``covers``."""
    elements = list(elements)
    changed = True
    leq = set((a, b) for a, b in covers)
    while changed:
        changed = False
        for a, b in list(leq):
            for c, d in list(leq):
                if b == c and (a, d) not in leq and a != d:
                    leq.add((a, d))
                    changed = True
    strict = [(a, b) for a in elements for b in elements if (a, b) in leq and a != b]
    lines = [f"category {name}"] + [f"object {x}" for x in elements]
    lines += [f"arrow {a}_{b} : {a} -> {b}" for a, b in strict]
    for a, b in strict:
        for c in elements:
            if (b, c) in leq and b != c:
                lines.append(f"compose {b}_{c} . {a}_{b} = {a}_{c}")
    return "\n".join(lines) + "\n"


def _poset(name, elements, covers) -> Preorder:
    return make_preorder(parse_spec(poset_spec(name, elements, covers)))


def make_one() -> Preorder:
    return _poset("one", ["0"], [])


def make_chain2() -> Preorder:
    return _poset("chain2", ["0", "1"], [("0", "1")])


def make_diamond() -> Preorder:
    return _poset("diamond", ["0", "l", "r", "1"], [("0", "l"), ("0", "r"), ("l", "1"), ("r", "1")])


def make_m3() -> Preorder:
    return _poset(
        "m3",
        ["0", "p", "q", "r", "T"],
        [("0", "p"), ("0", "q"), ("0", "r"), ("p", "T"), ("q", "T"), ("r", "T")],
    )


def make_two_infinities(k: int) -> Preorder:
    """Naturals 0..k below two incomparable points ``a`` and ``b``."""
    if k < 0:
        raise InputError("k must be >= 0")
    nats = [str(n) for n in range(k + 1)]
    covers = [(nats[n], nats[n + 1]) for n in range(k)]
    covers += [(n, "a") for n in nats] + [(n, "b") for n in nats]
    return _poset(f"two-infinities-{k}", nats + ["a", "b"], covers)


# --------------------------------------------------------------------------
# finite sets


class FinSet(CategoryHandle):
    """Skeletal finite sets ``0..cap``; an arrow ``n -> m`` is a tuple of length n."""

    exhaustive = False

    def __init__(self, cap: int):
        super().__init__()
        if cap < 1:
            raise InputError("finset cap must be >= 1")
        self.cap = cap
        self.name = f"finset-{cap}"

    def objects(self):
        return tuple(range(self.cap + 1))

    def grade(self, a):
        return a

    def _hom(self, a, b):
        return [(a, b, t) for t in product(range(b), repeat=a)]

    def identity(self, a):
        return (a, a, tuple(range(a)))

    def compose(self, g, f):
        gd = g[2]
        return (f[0], g[1], tuple(gd[i] for i in f[2]))

    def analytic_product(self, a, b):
        n = a * b
        if n > self.cap:
            return None
        pairs = [(i, j) for i in range(a) for j in range(b)]
        return n, ((n, a, tuple(p[0] for p in pairs)), (n, b, tuple(p[1] for p in pairs)))

    def analytic_equalizer(self, f, g):
        keep = [i for i in range(f[0]) if f[2][i] == g[2][i]]
        return len(keep), (len(keep), f[0], tuple(keep))


# --------------------------------------------------------------------------
# free G-sets


@dataclass(frozen=True)
class Group:
    name: str
    elements: tuple[str, ...]
    table: tuple[tuple[int, ...], ...]  # table[i][j] = index of elements[i]*elements[j]

    @property
    def order(self) -> int:
        return len(self.elements)

    def mul(self, i: int, j: int) -> int:
        return self.table[i][j]

    def inverse(self, i: int) -> int:
        return next(j for j in range(self.order) if self.table[i][j] == 0)


def parse_group(text: str) -> Group:
    """Parse ``group NAME`` / ``elements e,a,...`` / ``mul a*b = c`` (``e`` neutral)."""
    name, elements, entries = None, None, {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if m := re.fullmatch(r"group\s+(\S+)", line):
            name = m.group(1)
        elif m := re.fullmatch(r"elements\s+(.+)", line):
            elements = tuple(x.strip() for x in m.group(1).split(","))
            if len(set(elements)) != len(elements):
                raise InputError("duplicate group element", lineno, 1)
        elif m := re.fullmatch(r"mul\s+(\S+)\s*\*\s*(\S+)\s*=\s*(\S+)", line):
            if elements is None:
                raise InputError("mul before elements", lineno, 1)
            a, b, c = m.groups()
            for x in (a, b, c):
                if x not in elements:
                    raise InputError(f"unknown group element {x!r}", lineno, 1)
            entries[(a, b)] = c
        else:
            raise InputError("malformed group line", lineno, 1)
    if name is None or elements is None:
        raise InputError("group spec needs 'group' and 'elements' lines")
    if elements[0] != "e":
        raise InputError("the neutral element must be listed first as 'e'")
    idx = {x: i for i, x in enumerate(elements)}
    for a in elements:  # neutral entries may be omitted
        entries.setdefault(("e", a), a)
        entries.setdefault((a, "e"), a)
    table = []
    for a in elements:
        row = []
        for b in elements:
            if (a, b) not in entries:
                raise InputError(f"group table missing {a}*{b}")
            row.append(idx[entries[(a, b)]])
        table.append(tuple(row))
    g = Group(name, elements, tuple(table))
    validate_group(g)
    return g


def validate_group(g: Group) -> None:
    n = g.order
    for i in range(n):
        if g.mul(0, i) != i or g.mul(i, 0) != i:
            raise InputError("e is not neutral")
        if not any(g.mul(i, j) == 0 for j in range(n)):
            raise InputError(f"{g.elements[i]} has no inverse")
    for i, j, k in product(range(n), repeat=3):
        if g.mul(g.mul(i, j), k) != g.mul(i, g.mul(j, k)):
            raise InputError("group table is not associative")


def cyclic_group(n: int) -> Group:
    names = ("e",) + tuple(f"g{i}" for i in range(1, n))
    return Group(f"Z{n}", names, tuple(tuple((i + j) % n for j in range(n)) for i in range(n)))


Z2_SPEC = "group Z2\nelements e,a\nmul a*a = e\n"


class FreeGSets(CategoryHandle):
    """Free G-sets with at most ``cap`` orbits and equivariant maps.

    Object ``n`` is G x {0..n-1} with G acting on the left.  An arrow n -> m
    sends the generator (e, i) to (g_i, j_i) and is stored as the tuple of
    those pairs.
    """

    exhaustive = False

    def __init__(self, group: Group, cap: int):
        super().__init__()
        self.group = group
        self.cap = cap
        self.name = f"free-gsets-{group.name}-{cap}"

    def objects(self):
        return tuple(range(self.cap + 1))

    def grade(self, a):
        return a

    def _hom(self, a, b):
        images = [(g, j) for j in range(b) for g in range(self.group.order)]
        return [(a, b, t) for t in product(images, repeat=a)]

    def identity(self, a):
        return (a, a, tuple((0, i) for i in range(a)))

    def compose(self, g, f):
        mul = self.group.mul
        gd = g[2]
        out = []
        for h, j in f[2]:
            h2, k = gd[j]
            out.append((mul(h, h2), k))
        return (f[0], g[1], tuple(out))

    def act(self, f, element):
        """Apply the equivariant map ``f`` to the element (h, i)."""
        h, i = element
        g, j = f[2][i]
        return (self.group.mul(h, g), j)

    def analytic_product(self, a, b):
        n = self.group.order * a * b
        if n > self.cap:
            return None
        gens = [(i, j, k) for i in range(a) for j in range(b) for k in range(self.group.order)]
        p1 = (n, a, tuple((0, i) for i, _, _ in gens))
        p2 = (n, b, tuple((k, j) for _, j, k in gens))
        return n, (p1, p2)

    def analytic_equalizer(self, f, g):
        keep = [i for i in range(f[0]) if f[2][i] == g[2][i]]
        return len(keep), (len(keep), f[0], tuple((0, i) for i in keep))


def make_finset(cap: int) -> FinSet:
    return FinSet(cap)


def make_free_gsets(group: Group, cap: int) -> FreeGSets:
    validate_group(group)
    return FreeGSets(group, cap)


# --------------------------------------------------------------------------
# presheaves on a finite poset


@dataclass(frozen=True)
class Presheaf:
    """Carrier sets over poset elements; restrictions along x <= y are inclusions."""

    base: Preorder
    carriers: dict

    def is_functorial(self) -> bool:
        # restriction along x <= y is the inclusion F(y) -> F(x)
        p = self.base
        return all(
            self.carriers[y] <= self.carriers[x] for (x, y) in p.leq_pairs
        )


def representable(p: Preorder, x) -> Presheaf:
    return Presheaf(p, {z: frozenset({"*"}) if p.leq(z, x) else frozenset() for z in p.objects()})


def representable_product(p: Preorder, x, y) -> tuple[Presheaf, object]:
    """Pointwise product of yx and yy, and the representing object or None."""
    obs = p.objects()
    for o in (x, y):
        if o not in obs:
            raise InputError(f"unknown object {o!r}")
    yx, yy = representable(p, x), representable(p, y)
    prod = Presheaf(
        p,
        {z: frozenset(product(yx.carriers[z], yy.carriers[z])) for z in obs},
    )
    for m in obs:
        ym = representable(p, m)
        if all(len(prod.carriers[z]) == len(ym.carriers[z]) for z in obs):
            return prod, m
    return prod, None


# --------------------------------------------------------------------------
# fixture registry

POSET_FIXTURES = {
    "one": make_one,
    "chain2": make_chain2,
    "diamond": make_diamond,
    "m3": make_m3,
}


def load_fixture(name: str, *, k: int = 4, cap: int | None = None, group: Group | None = None):
    if name in POSET_FIXTURES:
        return POSET_FIXTURES[name]()
    if name == "two-infinities":
        return make_two_infinities(k)
    if name == "finset":
        return make_finset(3 if cap is None else cap)
    if name == "free-gsets":
        return make_free_gsets(group or parse_group(Z2_SPEC), 2 if cap is None else cap)
    raise InputError(f"unknown fixture {name!r}")
