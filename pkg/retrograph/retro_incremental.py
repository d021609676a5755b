"""Incremental fully retroactive connectivity, spanning forest and approximate MSF.

The update sequence S is treated as a graph H in which every inserted edge
weighs its insertion time. A minimum spanning forest of H answers
time-parameterized queries: u and v are connected at time t iff the
heaviest edge on their MSF_H path was inserted before t, and the MSF_H
edges lighter than t form a spanning forest of G_t.
"""

from dataclasses import dataclass
from fractions import Fraction

from retrograph.dynforest import ForestChange, make_engine
from retrograph.errors import UnsupportedUpdate, WeightOutOfRange
from retrograph.orderstat import RankTree
from retrograph.static import kruskal
from retrograph.timeline import (
    EdgeLife,
    Lifespan,
    Time,
    Update,
    UpdateKind,
    UpdateSequence,
    check_time,
    check_vertex,
)


class IncrementalRetro:
    """Fully retroactive connectivity when S holds insertions only.

    Cancel is still allowed. The rank index mirrors the multiset of MSF_H
    tree-edge times, so sf_size(t) is a single rank query.
    """

    def __init__(self, n: int, engine: str = 'baseline'):
        self.n = n
        self._seq = UpdateSequence(n)
        self._engine = make_engine(engine, n)
        self._edge_of: dict[int, int] = {}
        self._index = RankTree()

    def __len__(self) -> int:
        return len(self._seq)

    @property
    def sequence(self) -> UpdateSequence:
        return self._seq

    def create(self, upd: Update):
        if upd.kind is not UpdateKind.INSERT:
            raise UnsupportedUpdate(
                f"incremental structure accepts inserts only, got {upd.kind.value} at {upd.time}"
            )
        self.create_insert(upd.u, upd.v, upd.time, upd.weight)

    def create_insert(self, u: int, v: int, t: int, weight: int = 1):
        """Insert edge (u, v) at time t.

        Raises:
            DuplicateTime, IllegalInsert, InvalidTime, InvalidVertex: as UpdateSequence.create
        """
        self._seq.create(Update(UpdateKind.INSERT, u, v, t, weight))
        self._edge_of[t] = self._engine.insert(u, v, t)
        self._apply(self._engine.last_change)

    def cancel(self, t: Time) -> Update:
        """Remove the insertion at time t.

        Raises:
            NoUpdateAtTime: nothing is scheduled at t
        """
        upd, _ = self._seq.cancel(t)
        self._engine.delete(self._edge_of.pop(upd.time))
        self._apply(self._engine.last_change)
        return upd

    def connected(self, u: int, v: int, t: Time) -> bool:
        check_vertex(u, self.n)
        check_vertex(v, self.n)
        check_time(t, allow_now=True)
        if u == v:
            return True
        if not self._engine.connected(u, v):
            return False
        return self._engine.path_max(u, v).weight < t

    def spanning_forest(self, t: Time) -> list[EdgeLife]:
        """MSF_H edges inserted before t, in canonical edge order."""
        check_time(t, allow_now=True)
        forest = []
        for edge in self._engine.forest():
            if edge.weight >= t:
                break
            upd = self._seq.update_at(edge.weight)
            forest.append(EdgeLife(edge.u, edge.v, upd.weight, Lifespan(edge.weight)))
        return sorted(forest, key=lambda life: life.order_key)

    def sf_size(self, t: Time) -> int:
        check_time(t, allow_now=True)
        return self._index.rank(t)

    def forest_times(self) -> list[int]:
        """Contents of the rank index, ascending."""
        return list(self._index)

    def _apply(self, change: ForestChange):
        for edge in change.left:
            self._index.remove(edge.weight)
        for edge in change.entered:
            self._index.insert(edge.weight)


@dataclass(frozen=True)
class ApproxEdge:
    """A forest edge with its true weight and its weight-class rounding."""

    u: int
    v: int
    weight: int
    rounded: Fraction
    time: int


def ceil_log(base: Fraction, value: int) -> int:
    """Smallest i >= 0 with base**i >= value, found by integer search."""
    i = 0
    power = Fraction(1)
    while power < value:
        power *= base
        i += 1
    return i


class ApproxMsfRetro:
    """(1+epsilon)-approximate fully retroactive MSF weight for incremental S.

    Class j holds every edge of weight at most (1+epsilon)**j, so an edge
    of weight w lives in classes ceil_log(1+epsilon, w) through l.
    """

    def __init__(self, n: int, epsilon: Fraction | int | str, max_weight: int, engine: str = 'baseline'):
        epsilon = Fraction(epsilon)
        if epsilon <= 0:
            raise ValueError(f"epsilon must be positive, got {epsilon}")
        if isinstance(max_weight, bool) or not isinstance(max_weight, int) or max_weight < 1:
            raise ValueError(f"max weight must be a positive integer, got {max_weight!r}")
        self.n = n
        self.epsilon = epsilon
        self.max_weight = max_weight
        self._base = 1 + epsilon
        self.levels = ceil_log(self._base, max_weight)
        self._powers = [self._base**i for i in range(self.levels + 1)]
        self._seq = UpdateSequence(n)
        self._classes = [IncrementalRetro(n, engine) for _ in range(self.levels + 1)]

    def __len__(self) -> int:
        return len(self._seq)

    @property
    def sequence(self) -> UpdateSequence:
        return self._seq

    def class_index(self, weight: int) -> int:
        return ceil_log(self._base, weight)

    def classes_of(self, t: Time) -> list[int]:
        """Indices of the classes holding the insertion at time t."""
        return [j for j, c in enumerate(self._classes) if t in c.sequence]

    def create(self, upd: Update):
        if upd.kind is not UpdateKind.INSERT:
            raise UnsupportedUpdate(
                f"incremental structure accepts inserts only, got {upd.kind.value} at {upd.time}"
            )
        self.create_insert(upd.u, upd.v, upd.weight, upd.time)

    def create_insert(self, u: int, v: int, weight: int, t: int):
        """Insert a weighted edge at time t into every class that admits it.

        Raises:
            WeightOutOfRange: weight outside [1, max_weight]
        """
        if isinstance(weight, bool) or not isinstance(weight, int) or not 1 <= weight <= self.max_weight:
            raise WeightOutOfRange(f"weight {weight!r} not in [1, {self.max_weight}]")
        self._seq.create(Update(UpdateKind.INSERT, u, v, t, weight))
        for c in self._classes[self.class_index(weight):]:
            c.create_insert(u, v, t, weight)

    def cancel(self, t: Time) -> Update:
        upd, _ = self._seq.cancel(t)
        for c in self._classes[self.class_index(upd.weight):]:
            c.cancel(t)
        return upd

    def weight(self, t: Time) -> Fraction:
        """Approximate MSF weight of G_t, within [exact, (1+epsilon) * exact]."""
        sizes = [c.sf_size(t) for c in self._classes]
        total = Fraction(sizes[0])
        for i in range(1, len(sizes)):
            total += (sizes[i] - sizes[i - 1]) * self._powers[i]
        return total

    def forest(self, t: Time) -> list[ApproxEdge]:
        """Static MSF over every class's spanning forest under rounded weights.

        An edge gathered from several classes keeps all copies; Kruskal
        accepts at most one of them.
        """
        candidates = [
            ApproxEdge(life.u, life.v, life.weight, self._powers[j], life.span.start)
            for j, c in enumerate(self._classes)
            for life in c.spanning_forest(t)
        ]
        return kruskal(self.n, candidates, key=lambda e: (e.rounded, e.u, e.v, e.time))

    def connected(self, u: int, v: int, t: Time) -> bool:
        return self._classes[-1].connected(u, v, t)

    def sf_size(self, t: Time) -> int:
        return self._classes[-1].sf_size(t)
