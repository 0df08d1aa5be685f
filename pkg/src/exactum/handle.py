"""The computable-category interface every fixture and construction implements.

Arrows are plain tuples ``(src, dst, data)`` so they hash and compare cheaply.
Hom-sets are tuples in canonical order; searches return the first witness in
that order, which makes every result deterministic.
"""
from __future__ import annotations

from itertools import product
from typing import Any, Hashable, Iterable, Sequence

Arrow = tuple


class CategoryHandle:
    name: str = "category"
    # True when objects() lists every object of the category (no cap in force).
    exhaustive: bool = True
    thin: bool = False

    def __init__(self) -> None:
        self._hom_cache: dict[tuple, tuple] = {}
        # per-handle memo for derived data (cone lists, weak limits, ...)
        self.memo: dict = {}

    # -- to be provided by subclasses -------------------------------------
    def objects(self) -> tuple:
        raise NotImplementedError

    def _hom(self, a, b) -> Iterable[Arrow]:
        raise NotImplementedError

    def compose(self, g: Arrow, f: Arrow) -> Arrow:
        """``g`` after ``f``."""
        raise NotImplementedError

    def identity(self, a) -> Arrow:
        raise NotImplementedError

    # -- shared -----------------------------------------------------------
    def hom(self, a, b) -> tuple:
        key = (a, b)
        cached = self._hom_cache.get(key)
        if cached is None:
            cached = tuple(self._hom(a, b))
            self._hom_cache[key] = cached
        return cached

    @staticmethod
    def src(f: Arrow):
        return f[0]

    @staticmethod
    def dst(f: Arrow):
        return f[1]

    def grade(self, a) -> int:
        return 0

    def arrows(self) -> list:
        obs = self.objects()
        return [f for a in obs for b in obs for f in self.hom(a, b)]

    def comp(self, *fs: Arrow) -> Arrow:
        """Compose right to left: ``comp(h, g, f) == h . g . f``."""
        out = fs[-1]
        for g in reversed(fs[:-1]):
            out = self.compose(g, out)
        return out

    def is_iso(self, f: Arrow) -> Arrow | None:
        """Return an inverse of ``f`` if one exists."""
        a, b = f[0], f[1]
        for g in self.hom(b, a):
            if self.compose(g, f) == self.identity(a) and self.compose(f, g) == self.identity(b):
                return g
        return None

    def find_iso(self, a, b) -> tuple[Arrow, Arrow] | None:
        if len(self.hom(a, a)) != len(self.hom(b, b)):
            return None
        for f in self.hom(a, b):
            g = self.is_iso(f)
            if g is not None:
                return f, g
        return None

    def iso_classes(self, obs: Sequence | None = None) -> list[list]:
        """Partition objects into isomorphism classes, preserving order."""
        classes: list[list] = []
        for x in self.objects() if obs is None else obs:
            for cls in classes:
                if self.find_iso(cls[0], x) is not None:
                    cls.append(x)
                    break
            else:
                classes.append([x])
        return classes

    def __repr__(self) -> str:
        return f"<{type(self).__name__} {self.name}>"


def hom_product(c: CategoryHandle, apex, targets: Sequence) -> Iterable[tuple]:
    return product(*(c.hom(apex, t) for t in targets))


def freeze(value: Any) -> Hashable:
    """Turn nested lists/dicts into hashable tuples (for cache keys)."""
    if isinstance(value, dict):
        return tuple(sorted((k, freeze(v)) for k, v in value.items()))
    if isinstance(value, (list, tuple)):
        return tuple(freeze(v) for v in value)
    return value
