"""Fully retroactive graph structures over the checkpoint tree.

Each structure keeps the update sequence and a CheckpointTree whose node
summaries aggregate the node's edge set. A query at time t combines the
summaries along the root path of t, which together hold exactly E_t.
"""

from abc import ABC, abstractmethod
from collections import Counter
from dataclasses import dataclass, replace

from retrograph.checkpoint_tree import CheckpointTree, Summary
from retrograph.dynforest import ForestEngine, make_engine
from retrograph.static import UnionFind, forest_size, greedy_matching, kruskal
from retrograph.timeline import (
    EdgeLife,
    Time,
    Update,
    UpdateKind,
    UpdateSequence,
    check_time,
    check_vertex,
)


class DegreeSummary(Summary):
    """Sparse weighted degree map of one node's edges."""

    def __init__(self):
        self.degree: dict[int, int] = {}

    def add_edge(self, life: EdgeLife):
        for x in (life.u, life.v):
            self.degree[x] = self.degree.get(x, 0) + life.weight

    def remove_edge(self, life: EdgeLife):
        for x in (life.u, life.v):
            d = self.degree[x] - life.weight
            if d:
                self.degree[x] = d
            else:
                del self.degree[x]


class ForestSummary(Summary):
    """Minimum spanning forest F_u of one node's edges.

    The engine is created on first use and dropped when the node empties.
    """

    def __init__(self, n: int, engine: str = 'baseline'):
        self.n = n
        self.engine_kind = engine
        self.engine: ForestEngine | None = None
        self._ids: dict[tuple, int] = {}
        self._lives: dict[int, EdgeLife] = {}

    def add_edge(self, life: EdgeLife):
        if self.engine is None:
            self.engine = make_engine(self.engine_kind, self.n)
        edge_id = self.engine.insert(life.u, life.v, life.weight)
        self._ids[life.key] = edge_id
        self._lives[edge_id] = life

    def remove_edge(self, life: EdgeLife):
        edge_id = self._ids.pop(life.key)
        del self._lives[edge_id]
        self.engine.delete(edge_id)
        if not self._ids:
            self.engine = None

    def forest(self) -> list[EdgeLife]:
        if self.engine is None:
            return []
        return [self._lives[edge.id] for edge in self.engine.forest()]

    def total_weight(self) -> int:
        return self.engine.total_weight() if self.engine is not None else 0


class EdgeSetSummary(Summary):
    """The raw edge set of one node."""

    def __init__(self):
        self.edges: dict[tuple, EdgeLife] = {}

    def add_edge(self, life: EdgeLife):
        self.edges[life.key] = life

    def remove_edge(self, life: EdgeLife):
        del self.edges[life.key]


class FullRetro(ABC):
    """Shared create/cancel plumbing; subclasses pick the summary."""

    def __init__(self, n: int):
        self.n = n
        self._seq = UpdateSequence(n)
        self._tree = CheckpointTree(self._new_summary)

    @abstractmethod
    def _new_summary(self) -> Summary:
        ...

    def __len__(self) -> int:
        return len(self._seq)

    @property
    def sequence(self) -> UpdateSequence:
        return self._seq

    @property
    def tree(self) -> CheckpointTree:
        return self._tree

    def create(self, upd: Update):
        """Add an update at upd.time.

        Raises:
            IllegalOperation, InvalidTime, InvalidVertex: as UpdateSequence.create
        """
        delta = self._seq.create(upd)
        self._tree.create_update(upd.time, delta)

    def insert(self, u: int, v: int, t: int, weight: int = 1):
        self.create(Update(UpdateKind.INSERT, u, v, t, weight))

    def delete(self, u: int, v: int, t: int):
        self.create(Update(UpdateKind.DELETE, u, v, t))

    def cancel(self, t: Time) -> Update:
        """Remove the update at time t.

        Raises:
            NoUpdateAtTime, WouldOrphanDelete, OverlappingLifespan: as UpdateSequence.cancel
        """
        upd, delta = self._seq.cancel(t)
        self._tree.cancel_update(upd.time, delta)
        return upd

    def _summaries(self, t: Time) -> list:
        return [node.summary for node in self._tree.root_path(t)]


class RetroMaxDegree(FullRetro):
    """Fully retroactive maximum (weighted) degree."""

    def _new_summary(self) -> DegreeSummary:
        return DegreeSummary()

    def max_degree(self, t: Time) -> tuple[int, int]:
        """(vertex, degree) with the largest degree at t, lowest vertex on ties.

        An empty graph gives (0, 0).
        """
        total: Counter[int] = Counter()
        for summary in self._summaries(t):
            total.update(summary.degree)
        if not total:
            return (0, 0)
        vertex, degree = min(total.items(), key=lambda item: (-item[1], item[0]))
        return (vertex, degree)


@dataclass(frozen=True)
class MsfResult:
    edges: list[EdgeLife]
    total_weight: int
    candidates: int


class RetroMsf(FullRetro):
    """Fully retroactive minimum spanning forest.

    A query gathers the F_u forests along the root path (at most n - 1
    edges per node) and runs Kruskal over them; an edge that is not in its
    own node's forest cannot be in the MSF of E_t.
    """

    def __init__(self, n: int, engine: str = 'baseline'):
        self.engine = engine
        self.last_gather = 0
        super().__init__(n)

    def _new_summary(self) -> ForestSummary:
        return ForestSummary(self.n, self.engine)

    def candidates(self, t: Time) -> list[EdgeLife]:
        found = [life for summary in self._summaries(t) for life in summary.forest()]
        self.last_gather = len(found)
        return found

    def msf(self, t: Time) -> MsfResult:
        found = self.candidates(t)
        forest = kruskal(self.n, found, key=lambda life: life.order_key)
        return MsfResult(forest, sum(life.weight for life in forest), len(found))

    def msf_weight(self, t: Time) -> int:
        return self.msf(t).total_weight

    def connected(self, u: int, v: int, t: Time) -> bool:
        check_vertex(u, self.n)
        check_vertex(v, self.n)
        if u == v:
            return True
        uf = UnionFind(self.n)
        for life in self.candidates(t):
            uf.union(life.u, life.v)
        return uf.same(u, v)

    def sf_size(self, t: Time) -> int:
        return len(self.msf(t).edges)


class RetroConnectivity(RetroMsf):
    """Fully retroactive connectivity: RetroMsf with every weight forced to 1."""

    def create(self, upd: Update):
        if upd.kind is UpdateKind.INSERT and upd.weight != 1:
            upd = replace(upd, weight=1)
        super().create(upd)


class RetroEdgeSet(FullRetro):
    """Gathers E_t itself and answers with linear-time static algorithms."""

    def _new_summary(self) -> EdgeSetSummary:
        return EdgeSetSummary()

    def edges(self, t: Time) -> list[EdgeLife]:
        """E_t in the canonical (weight, u, v, start) order."""
        check_time(t, allow_now=True)
        found = [life for summary in self._summaries(t) for life in summary.edges.values()]
        return sorted(found, key=lambda life: life.order_key)

    def matching_size(self, t: Time) -> int:
        """Size of the greedy maximal matching scanning edges by (u, v, start)."""
        ordered = sorted(self.edges(t), key=lambda life: life.key)
        return len(greedy_matching((life.u, life.v) for life in ordered))

    def connected(self, u: int, v: int, t: Time) -> bool:
        check_vertex(u, self.n)
        check_vertex(v, self.n)
        if u == v:
            return True
        uf = UnionFind(self.n)
        for life in self.edges(t):
            uf.union(life.u, life.v)
        return uf.same(u, v)

    def sf_size(self, t: Time) -> int:
        return forest_size(self.n, ((life.u, life.v) for life in self.edges(t)))
