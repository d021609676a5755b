"""Registry of runnable structures behind one create/cancel/answer interface."""

from abc import ABC, abstractmethod
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, ClassVar

from retrograph.errors import UnknownStructure, UnsupportedQuery, UnsupportedUpdate
from retrograph.oracle import Oracle
from retrograph.retro_full import RetroConnectivity, RetroEdgeSet, RetroMaxDegree, RetroMsf
from retrograph.retro_incremental import ApproxMsfRetro, IncrementalRetro
from retrograph.timeline import Time, Update, UpdateKind
from retrograph.trace import ALL_QUERIES, Query, QueryKind, Trace, format_answer
from retrograph.workloads import ReplayBaseline


@dataclass(frozen=True)
class StructureOptions:
    engine: str = "baseline"
    epsilon: Fraction = Fraction(1)
    max_weight: int | None = None


class Structure(ABC):
    """A retroactive structure that answers trace queries as strings."""

    kind: ClassVar[str]
    description: ClassVar[str]
    queries: ClassVar[frozenset[QueryKind]]
    incremental: ClassVar[bool] = False

    def __init__(self, n: int, options: StructureOptions):
        self.n = n
        self.options = options

    @property
    def epsilon(self) -> Fraction | None:
        """Approximation factor of MSF weight answers; None when exact."""
        return None

    @property
    def stats(self) -> Any:
        return None

    def create(self, upd: Update):
        if self.incremental and upd.kind is UpdateKind.DELETE:
            raise UnsupportedUpdate(f"'{self.kind}' accepts inserts only, got delete at {upd.time}")
        self._create(upd)

    def answer(self, q: Query) -> str:
        if q.kind not in self.queries:
            raise UnsupportedQuery(f"'{self.kind}' does not answer '{q.kind.value}' queries")
        return format_answer(q.kind, self._answer(q))

    @abstractmethod
    def _create(self, upd: Update):
        ...

    @abstractmethod
    def cancel(self, t: Time):
        ...

    @abstractmethod
    def _answer(self, q: Query) -> Any:
        ...


class IncConnStructure(Structure):
    kind = "inc-conn"
    description = "incremental fully retroactive connectivity and spanning forest"
    queries = frozenset({QueryKind.CONN, QueryKind.SF, QueryKind.SFSIZE})
    incremental = True

    def __init__(self, n: int, options: StructureOptions):
        super().__init__(n, options)
        self.impl = IncrementalRetro(n, options.engine)

    def _create(self, upd: Update):
        self.impl.create(upd)

    def cancel(self, t: Time):
        self.impl.cancel(t)

    def _answer(self, q: Query) -> Any:
        if q.kind is QueryKind.CONN:
            return self.impl.connected(q.u, q.v, q.time)
        if q.kind is QueryKind.SF:
            return self.impl.spanning_forest(q.time)
        return self.impl.sf_size(q.time)


class ApproxMsfStructure(Structure):
    kind = "approx-msf"
    description = "incremental (1+epsilon)-approximate MSF weight"
    queries = frozenset({QueryKind.MSFWEIGHT, QueryKind.CONN, QueryKind.SFSIZE})
    incremental = True

    def __init__(self, n: int, options: StructureOptions):
        super().__init__(n, options)
        self.impl = ApproxMsfRetro(n, options.epsilon, options.max_weight or 1, options.engine)

    @property
    def epsilon(self) -> Fraction:
        return self.impl.epsilon

    def _create(self, upd: Update):
        self.impl.create(upd)

    def cancel(self, t: Time):
        self.impl.cancel(t)

    def _answer(self, q: Query) -> Any:
        if q.kind is QueryKind.MSFWEIGHT:
            return self.impl.weight(q.time)
        if q.kind is QueryKind.CONN:
            return self.impl.connected(q.u, q.v, q.time)
        return self.impl.sf_size(q.time)


class _FullStructure(Structure):
    """Common create/cancel for the checkpoint-tree structures."""

    impl: Any

    def _create(self, upd: Update):
        self.impl.create(upd)

    def cancel(self, t: Time):
        self.impl.cancel(t)

    @property
    def stats(self) -> Any:
        return self.impl.tree.stats


class FullMaxDegStructure(_FullStructure):
    kind = "full-maxdeg"
    description = "fully retroactive maximum degree"
    queries = frozenset({QueryKind.MAXDEG})

    def __init__(self, n: int, options: StructureOptions):
        super().__init__(n, options)
        self.impl = RetroMaxDegree(n)

    def _answer(self, q: Query) -> Any:
        return self.impl.max_degree(q.time)


class FullMsfStructure(_FullStructure):
    kind = "full-msf"
    description = "fully retroactive minimum spanning forest"
    queries = frozenset({QueryKind.MSF, QueryKind.MSFWEIGHT, QueryKind.CONN, QueryKind.SFSIZE})
    impl_class: ClassVar[type[RetroMsf]] = RetroMsf

    def __init__(self, n: int, options: StructureOptions):
        super().__init__(n, options)
        self.impl = self.impl_class(n, options.engine)

    def _answer(self, q: Query) -> Any:
        if q.kind is QueryKind.MSF:
            return self.impl.msf(q.time).edges
        if q.kind is QueryKind.MSFWEIGHT:
            return self.impl.msf_weight(q.time)
        if q.kind is QueryKind.CONN:
            return self.impl.connected(q.u, q.v, q.time)
        return self.impl.sf_size(q.time)


class FullConnStructure(FullMsfStructure):
    kind = "full-conn"
    description = "fully retroactive connectivity"
    queries = frozenset({QueryKind.CONN, QueryKind.SFSIZE})
    impl_class = RetroConnectivity


class FullMatchStructure(_FullStructure):
    kind = "full-match"
    description = "fully retroactive edge gather with greedy maximal matching"
    queries = frozenset({QueryKind.EDGES, QueryKind.MATCHSIZE, QueryKind.CONN, QueryKind.SFSIZE})

    def __init__(self, n: int, options: StructureOptions):
        super().__init__(n, options)
        self.impl = RetroEdgeSet(n)

    def _answer(self, q: Query) -> Any:
        if q.kind is QueryKind.EDGES:
            return self.impl.edges(q.time)
        if q.kind is QueryKind.MATCHSIZE:
            return self.impl.matching_size(q.time)
        if q.kind is QueryKind.CONN:
            return self.impl.connected(q.u, q.v, q.time)
        return self.impl.sf_size(q.time)


class OracleStructure(Structure):
    kind = "oracle"
    description = "brute-force replay of E_t with static algorithms"
    queries = ALL_QUERIES

    def __init__(self, n: int, options: StructureOptions):
        super().__init__(n, options)
        self.impl = Oracle(n)

    def _create(self, upd: Update):
        self.impl.create(upd)

    def cancel(self, t: Time):
        self.impl.cancel(t)

    def _answer(self, q: Query) -> Any:
        return self.impl.query(q)


class ReplayStructure(Structure):
    kind = "replay"
    description = "naive baseline replaying the sorted update prefix per query"
    queries = ALL_QUERIES

    def __init__(self, n: int, options: StructureOptions):
        super().__init__(n, options)
        self.impl = ReplayBaseline(n)

    def _create(self, upd: Update):
        self.impl.create(upd)

    def cancel(self, t: Time):
        self.impl.cancel(t)

    def _answer(self, q: Query) -> Any:
        return self.impl.query(q)


STRUCTURES: dict[str, type[Structure]] = {
    cls.kind: cls
    for cls in (
        IncConnStructure,
        ApproxMsfStructure,
        FullMaxDegStructure,
        FullMsfStructure,
        FullConnStructure,
        FullMatchStructure,
        OracleStructure,
        ReplayStructure,
    )
}


def structure_class(kind: str) -> type[Structure]:
    try:
        return STRUCTURES[kind]
    except KeyError:
        raise UnknownStructure(
            f"unknown structure '{kind}' (choose from {', '.join(STRUCTURES)})"
        ) from None


def check_compatible(trace: Trace, kind: str, partial: bool = False):
    """Raise if the structure cannot replay the trace.

    With partial, queries the structure does not answer are allowed; only
    the kind and the updates are checked.

    Raises:
        UnknownStructure: kind is not registered
        UnsupportedQuery: the trace asks a query the structure does not answer
        UnsupportedUpdate: the trace deletes and the structure is incremental
    """
    cls = structure_class(kind)
    missing = trace.query_kinds() - cls.queries
    if missing and not partial:
        names = ", ".join(sorted(k.value for k in missing))
        raise UnsupportedQuery(f"'{kind}' does not answer: {names}")
    if cls.incremental and trace.has_deletes():
        raise UnsupportedUpdate(f"'{kind}' accepts inserts only, but the trace deletes edges")


def verifiable_kinds(trace: Trace) -> list[str]:
    """Every kind able to replay the trace's updates and answer some of its queries.

    A trace without queries is verifiable by every kind that accepts its updates.
    """
    asked = trace.query_kinds()
    return [
        kind
        for kind, cls in STRUCTURES.items()
        if (not asked or asked & cls.queries) and not (cls.incremental and trace.has_deletes())
    ]


def compatible_kinds(trace: Trace) -> list[str]:
    """Every registered kind able to replay the trace."""
    return [
        kind
        for kind, cls in STRUCTURES.items()
        if trace.query_kinds() <= cls.queries and not (cls.incremental and trace.has_deletes())
    ]


def make_structure(kind: str, n: int, options: StructureOptions | None = None) -> Structure:
    return structure_class(kind)(n, options or StructureOptions())
