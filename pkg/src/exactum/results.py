"""Search verdicts and certificates shared by every searcher."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Any


class Verdict(str, Enum):
    FOUND = "found"
    NOT_FOUND = "not_found"
    UNDECIDED = "undecided"


@dataclass
class Certificate:
    """Evidence attached to a search result.

    ``exhaustive`` is true when every competitor in the ambient category was
    enumerated; otherwise the checks only cover the objects inside the cap.
    """

    kind: str
    exhaustive: bool = True
    checks: int = 0
    details: dict[str, Any] = field(default_factory=dict)

    def to_json(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "exhaustive": self.exhaustive,
            "checks": self.checks,
            "details": self.details,
        }


@dataclass
class SearchResult:
    verdict: Verdict
    witness: Any = None
    certificate: Certificate | None = None
    reason: str = ""

    @property
    def found(self) -> bool:
        return self.verdict is Verdict.FOUND

    @classmethod
    def failure(cls, exhaustive: bool, reason: str = "", certificate=None) -> "SearchResult":
        """NotFound is only ever emitted for exhaustive searches."""
        verdict = Verdict.NOT_FOUND if exhaustive else Verdict.UNDECIDED
        return cls(verdict, None, certificate, reason)


class InputError(ValueError):
    """Malformed user input (parse errors, unknown ids, bad tables)."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(message + where)


class PreconditionError(ValueError):
    """An operation was called on data violating its precondition."""


class SoundnessError(AssertionError):
    """Two independent routes disagreed; never silently resolved."""
