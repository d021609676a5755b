"""Trace model: retroactive operations, queries and answer serialization."""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Iterable

from retrograph.timeline import NOW, Time, Update, UpdateKind


class QueryKind(str, Enum):
    CONN = "conn"
    SF = "sf"
    SFSIZE = "sfsize"
    MSF = "msf"
    MSFWEIGHT = "msfweight"
    MAXDEG = "maxdeg"
    MATCHSIZE = "matchsize"
    EDGES = "edges"


ALL_QUERIES = frozenset(QueryKind)


@dataclass(frozen=True)
class CreateOp:
    update: Update


@dataclass(frozen=True)
class CancelOp:
    time: int


@dataclass(frozen=True)
class Query:
    kind: QueryKind
    time: Time = NOW
    u: int | None = None
    v: int | None = None


Step = CreateOp | CancelOp | Query


@dataclass
class Trace:
    """Operations and queries in issue order, with optional expected answers.

    Expected answers are keyed by query index (0-based position among the
    trace's queries). query() returns that index, counting queries already
    in steps however they were added.
    """

    n: int
    steps: list[Step] = field(default_factory=list)
    expected: dict[int, str] = field(default_factory=dict)
    _query_count: int = field(default=0, init=False, compare=False, repr=False)
    _counted_steps: int = field(default=0, init=False, compare=False, repr=False)

    def queries(self) -> list[Query]:
        return [step for step in self.steps if isinstance(step, Query)]

    def query_kinds(self) -> set[QueryKind]:
        return {q.kind for q in self.queries()}

    def has_deletes(self) -> bool:
        return any(
            isinstance(step, CreateOp) and step.update.kind is UpdateKind.DELETE
            for step in self.steps
        )

    def max_weight(self) -> int:
        return max(
            (step.update.weight for step in self.steps if isinstance(step, CreateOp)),
            default=1,
        )

    def counts(self) -> dict[str, int]:
        creates = sum(isinstance(step, CreateOp) for step in self.steps)
        cancels = sum(isinstance(step, CancelOp) for step in self.steps)
        return {
            "create": creates,
            "cancel": cancels,
            "query": len(self.steps) - creates - cancels,
        }

    # Builders used by the generators

    def insert(self, u: int, v: int, t: int, weight: int = 1):
        self.steps.append(CreateOp(Update(UpdateKind.INSERT, u, v, t, weight)))

    def delete(self, u: int, v: int, t: int):
        self.steps.append(CreateOp(Update(UpdateKind.DELETE, u, v, t)))

    def cancel(self, t: int):
        self.steps.append(CancelOp(t))

    def query(self, kind: QueryKind, t: Time, u: int | None = None, v: int | None = None,
              expect: str | None = None) -> int:
        """Append a query and return its index."""
        pending = self.steps[self._counted_steps:]
        self._query_count += sum(isinstance(step, Query) for step in pending)
        index = self._query_count
        self._query_count += 1
        self.steps.append(Query(kind, t, u, v))
        self._counted_steps = len(self.steps)
        if expect is not None:
            self.expected[index] = expect
        return index


def format_weight(value: Fraction | int) -> str:
    value = Fraction(value)
    return f"{value.numerator}/{value.denominator}"


def format_edges(edges: Iterable[Any]) -> str:
    """Edges (anything with u, v, weight) as "u-v:w" in (w, u, v) order."""
    ordered = sorted(edges, key=lambda e: (e.weight, e.u, e.v))
    if not ordered:
        return "empty"
    return " ".join(f"{e.u}-{e.v}:{e.weight}" for e in ordered)


def format_answer(kind: QueryKind, value: Any) -> str:
    """Serialize a raw query result."""
    if kind is QueryKind.CONN:
        return "true" if value else "false"
    if kind in (QueryKind.SFSIZE, QueryKind.MATCHSIZE):
        return str(int(value))
    if kind is QueryKind.MSFWEIGHT:
        return format_weight(value)
    if kind is QueryKind.MAXDEG:
        vertex, degree = value
        return f"{vertex}:{degree}"
    return format_edges(value)
