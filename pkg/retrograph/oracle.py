"""Brute-force reference answers.

The oracle keeps a copy of the update sequence (so it enforces the same
legality rules as every structure) and answers each query by building
E_t from scratch and running a textbook static algorithm on it.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Protocol

from retrograph.errors import UnsupportedQuery
from retrograph.static import connected_bfs, forest_size, greedy_matching, kruskal, max_degree
from retrograph.timeline import EdgeLife, Time, Update, UpdateSequence, check_time, check_vertex, format_time
from retrograph.trace import Query, QueryKind, format_answer


def answer_on(n: int, edges: list[EdgeLife], q: Query) -> Any:
    """Raw answer to q on the graph with edge set `edges`.

    The spanning forest for SF is Kruskal keyed by (start, u, v), which is
    the forest an incremental structure reports.
    """
    pairs = [(e.u, e.v) for e in edges]
    if q.kind is QueryKind.CONN:
        check_vertex(q.u, n)
        check_vertex(q.v, n)
        return connected_bfs(n, pairs, q.u, q.v)
    if q.kind is QueryKind.SF:
        return kruskal(n, edges, key=lambda e: (e.span.start, e.u, e.v))
    if q.kind is QueryKind.SFSIZE:
        return forest_size(n, pairs)
    if q.kind is QueryKind.MSF:
        return kruskal(n, edges, key=lambda e: e.order_key)
    if q.kind is QueryKind.MSFWEIGHT:
        return sum(e.weight for e in kruskal(n, edges, key=lambda e: e.order_key))
    if q.kind is QueryKind.MAXDEG:
        return max_degree(n, ((e.u, e.v, e.weight) for e in edges))
    if q.kind is QueryKind.MATCHSIZE:
        ordered = sorted(edges, key=lambda e: e.key)
        return len(greedy_matching((e.u, e.v) for e in ordered))
    if q.kind is QueryKind.EDGES:
        return sorted(edges, key=lambda e: e.order_key)
    raise UnsupportedQuery(f"unknown query kind {q.kind!r}")


class Oracle:
    """Replay-and-recompute reference over a full copy of S."""

    def __init__(self, n: int, seq: UpdateSequence | None = None):
        self.n = n
        self._seq = seq.copy() if seq is not None else UpdateSequence(n)
        self._graphs: dict[Time, list[EdgeLife]] = {}

    @property
    def sequence(self) -> UpdateSequence:
        return self._seq

    def create(self, upd: Update):
        self._seq.create(upd)
        self._graphs.clear()

    def cancel(self, t: Time) -> Update:
        upd, _ = self._seq.cancel(t)
        self._graphs.clear()
        return upd

    def graph_at(self, t: Time) -> list[EdgeLife]:
        """E_t, built once per time until the next create or cancel."""
        graph = self._graphs.get(t)
        if graph is None:
            graph = self._graphs[t] = self._seq.edges_at(t)
        return list(graph)

    def query(self, q: Query) -> Any:
        check_time(q.time, allow_now=True)
        return answer_on(self.n, self.graph_at(q.time), q)

    def answer(self, q: Query) -> str:
        return format_answer(q.kind, self.query(q))


class Answering(Protocol):
    def answer(self, q: Query) -> str:
        ...


@dataclass(frozen=True)
class Mismatch:
    """One query on which a structure disagreed with a reference."""

    index: int
    query: Query
    expected: str
    actual: str
    source: str = "oracle"

    def __str__(self) -> str:
        where = f"query {self.index} ({self.query.kind.value} @ {format_time(self.query.time)})"
        return f"{where}: {self.source} says '{self.expected}', structure says '{self.actual}'"


def parse_weight(text: str) -> Fraction:
    return Fraction(text.replace(" ", ""))


def answers_agree(q: Query, expected: str, actual: str, epsilon: Fraction | None = None) -> bool:
    """Exact comparison, or W <= a <= (1+epsilon)W for approximate MSF weights."""
    if epsilon is not None and q.kind is QueryKind.MSFWEIGHT:
        exact, approx = parse_weight(expected), parse_weight(actual)
        return exact <= approx <= (1 + epsilon) * exact
    return expected == actual


def diff(
    oracle: Oracle,
    structure: Answering,
    queries: list[tuple[int, Query]],
    epsilon: Fraction | None = None,
) -> list[Mismatch]:
    """Ask every (index, query) of both and collect disagreements.

    Args:
        oracle: reference built from the same operations as structure
        structure: anything with answer(query) -> str
        queries: queries paired with their trace indices
        epsilon: set for approximate structures; relaxes MSF weight checks

    Returns:
        Mismatches in query order; empty when the two agree.
    """
    mismatches = []
    for index, q in queries:
        expected = oracle.answer(q)
        actual = structure.answer(q)
        if not answers_agree(q, expected, actual, epsilon):
            mismatches.append(Mismatch(index, q, expected, actual))
    return mismatches
