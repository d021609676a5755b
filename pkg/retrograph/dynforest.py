"""Dynamic minimum spanning forest engines.

Two interchangeable implementations behind ForestEngine:

- BaselineForest: link-cut tree with path-max. Inserting applies the swap
  rule; deleting a tree edge scans every stored non-tree edge for the
  lightest replacement.
- LeveledForest: edge-level hierarchy. Deleting a tree edge searches for a
  replacement from the edge's level down to 0 inside the smaller side,
  promoting what it scans.

Edges are totally ordered by (weight, u, v, id), which makes the minimum
spanning forest unique. Weights may be any integers.
"""

from abc import ABC, abstractmethod
from collections import deque
from dataclasses import dataclass

from retrograph.errors import InvalidVertex, NotConnected, UnknownEdge
from retrograph.linkcut import LinkCutForest
from retrograph.timeline import check_vertex


@dataclass(frozen=True)
class ForestEdge:
    """An engine edge. Endpoints are stored with u < v."""

    id: int
    u: int
    v: int
    weight: int

    @property
    def key(self) -> tuple[int, int, int, int]:
        return (self.weight, self.u, self.v, self.id)


@dataclass(frozen=True)
class PathMaxResult:
    edge_id: int
    weight: int
    u: int
    v: int


@dataclass(frozen=True)
class ForestChange:
    """Forest edges that entered or left on the last mutation."""

    entered: tuple[ForestEdge, ...] = ()
    left: tuple[ForestEdge, ...] = ()


class ForestEngine(ABC):
    """Maintains the minimum spanning forest of a dynamic multigraph."""

    def __init__(self, n: int):
        self.n = n
        self._edges: dict[int, ForestEdge] = {}
        self._tree: set[int] = set()
        self._next_id = 0
        self.last_change = ForestChange()

    def __len__(self) -> int:
        return len(self._edges)

    def __contains__(self, edge_id: int) -> bool:
        return edge_id in self._edges

    def edge(self, edge_id: int) -> ForestEdge:
        try:
            return self._edges[edge_id]
        except KeyError:
            raise UnknownEdge(f"no edge with id {edge_id}") from None

    def is_tree_edge(self, edge_id: int) -> bool:
        return edge_id in self._tree

    def insert(self, u: int, v: int, weight: int) -> int:
        """Add an edge and restore the MSF. Returns the new edge's id.

        Raises:
            InvalidVertex: endpoint out of range, or u == v
        """
        check_vertex(u, self.n)
        check_vertex(v, self.n)
        if u == v:
            raise InvalidVertex(f"self-loop at vertex {u}")
        if u > v:
            u, v = v, u
        edge = ForestEdge(self._next_id, u, v, weight)
        self._next_id += 1
        self._edges[edge.id] = edge
        self.last_change = self._insert(edge)
        return edge.id

    def delete(self, edge_id: int):
        """Remove an edge; a tree edge is replaced by the lightest reconnecting edge.

        Raises:
            UnknownEdge: no such edge
        """
        edge = self.edge(edge_id)
        self.last_change = self._delete(edge)
        del self._edges[edge_id]

    def forest(self) -> list[ForestEdge]:
        """Tree edges in key order."""
        return sorted((self._edges[i] for i in self._tree), key=lambda e: e.key)

    def total_weight(self) -> int:
        return sum(self._edges[i].weight for i in self._tree)

    def connected(self, u: int, v: int) -> bool:
        check_vertex(u, self.n)
        check_vertex(v, self.n)
        return u == v or self._connected(u, v)

    def path_max(self, u: int, v: int) -> PathMaxResult:
        """Heaviest tree edge on the u..v path.

        Raises:
            NotConnected: u == v, or u and v lie in different trees
        """
        check_vertex(u, self.n)
        check_vertex(v, self.n)
        if u == v or not self._connected(u, v):
            raise NotConnected(f"no tree path between {u} and {v}")
        edge = self._path_max(u, v)
        return PathMaxResult(edge.id, edge.weight, edge.u, edge.v)

    @abstractmethod
    def _insert(self, edge: ForestEdge) -> ForestChange:
        ...

    @abstractmethod
    def _delete(self, edge: ForestEdge) -> ForestChange:
        ...

    @abstractmethod
    def _connected(self, u: int, v: int) -> bool:
        ...

    @abstractmethod
    def _path_max(self, u: int, v: int) -> ForestEdge:
        ...


class BaselineForest(ForestEngine):
    """Link-cut tree engine; O(m) replacement scan on tree-edge deletion."""

    def __init__(self, n: int):
        super().__init__(n)
        self._lct = LinkCutForest(n)
        self._slot: dict[int, int] = {}
        self._edge_at: dict[int, int] = {}
        self._nontree: set[int] = set()

    def _link(self, edge: ForestEdge):
        z = self._lct.add_node(edge.key)
        self._lct.link(edge.u, z)
        self._lct.link(z, edge.v)
        self._slot[edge.id] = z
        self._edge_at[z] = edge.id
        self._tree.add(edge.id)

    def _cut(self, edge: ForestEdge):
        z = self._slot.pop(edge.id)
        del self._edge_at[z]
        self._lct.cut(edge.u, z)
        self._lct.cut(z, edge.v)
        self._lct.release_node(z)
        self._tree.discard(edge.id)

    def _insert(self, edge: ForestEdge) -> ForestChange:
        if not self._lct.connected(edge.u, edge.v):
            self._link(edge)
            return ForestChange(entered=(edge,))
        heavy = self._path_max(edge.u, edge.v)
        if edge.key < heavy.key:
            self._cut(heavy)
            self._nontree.add(heavy.id)
            self._link(edge)
            return ForestChange(entered=(edge,), left=(heavy,))
        self._nontree.add(edge.id)
        return ForestChange()

    def _delete(self, edge: ForestEdge) -> ForestChange:
        if edge.id in self._nontree:
            self._nontree.discard(edge.id)
            return ForestChange()
        self._cut(edge)
        best: ForestEdge | None = None
        for fid in self._nontree:
            cand = self._edges[fid]
            if (best is None or cand.key < best.key) and not self._lct.connected(cand.u, cand.v):
                best = cand
        if best is None:
            return ForestChange(left=(edge,))
        self._nontree.discard(best.id)
        self._link(best)
        return ForestChange(entered=(best,), left=(edge,))

    def _connected(self, u: int, v: int) -> bool:
        return self._lct.connected(u, v)

    def _path_max(self, u: int, v: int) -> ForestEdge:
        return self._edges[self._edge_at[self._lct.path_max(u, v)]]


class LeveledForest(ForestEngine):
    """Edge-level hierarchy engine.

    F_i is the forest of tree edges with level >= i. Invariants: a non-tree
    edge of level i has its endpoints connected in F_i, and the heaviest
    edge on any cycle has the minimum level on that cycle. Insertions
    inside one component reset that component to level 0, which restores
    both invariants.
    """

    def __init__(self, n: int):
        super().__init__(n)
        self._level: dict[int, int] = {}
        self._tree_adj: list[set[int]] = [set() for _ in range(n)]
        self._nontree_adj: list[set[int]] = [set() for _ in range(n)]

    def _add_tree(self, edge: ForestEdge, level: int):
        self._level[edge.id] = level
        self._tree.add(edge.id)
        self._tree_adj[edge.u].add(edge.id)
        self._tree_adj[edge.v].add(edge.id)

    def _remove_tree(self, edge: ForestEdge):
        self._tree.discard(edge.id)
        self._tree_adj[edge.u].discard(edge.id)
        self._tree_adj[edge.v].discard(edge.id)

    def _add_nontree(self, edge: ForestEdge, level: int):
        self._level[edge.id] = level
        self._nontree_adj[edge.u].add(edge.id)
        self._nontree_adj[edge.v].add(edge.id)

    def _remove_nontree(self, edge: ForestEdge):
        self._nontree_adj[edge.u].discard(edge.id)
        self._nontree_adj[edge.v].discard(edge.id)

    def _other(self, edge: ForestEdge, x: int) -> int:
        return edge.v if edge.u == x else edge.u

    def _component(self, root: int, min_level: int) -> set[int]:
        """Vertices reachable from root in F_min_level."""
        seen = {root}
        queue = deque([root])
        while queue:
            x = queue.popleft()
            for eid in self._tree_adj[x]:
                if self._level[eid] < min_level:
                    continue
                y = self._other(self._edges[eid], x)
                if y not in seen:
                    seen.add(y)
                    queue.append(y)
        return seen

    def _tree_path(self, u: int, v: int) -> list[ForestEdge] | None:
        """Tree edges on the u..v path, or None if disconnected."""
        via: dict[int, int | None] = {u: None}
        queue = deque([u])
        while queue and v not in via:
            x = queue.popleft()
            for eid in self._tree_adj[x]:
                y = self._other(self._edges[eid], x)
                if y not in via:
                    via[y] = eid
                    queue.append(y)
        if v not in via:
            return None
        path = []
        x = v
        while via[x] is not None:
            edge = self._edges[via[x]]
            path.append(edge)
            x = self._other(edge, x)
        return path

    def _reset_levels(self, root: int):
        for x in self._component(root, 0):
            for eid in self._tree_adj[x]:
                self._level[eid] = 0
            for eid in self._nontree_adj[x]:
                self._level[eid] = 0

    def _insert(self, edge: ForestEdge) -> ForestChange:
        path = self._tree_path(edge.u, edge.v)
        if path is None:
            self._add_tree(edge, 0)
            return ForestChange(entered=(edge,))
        self._reset_levels(edge.u)
        heavy = max(path, key=lambda e: e.key)
        if edge.key < heavy.key:
            self._remove_tree(heavy)
            self._add_nontree(heavy, 0)
            self._add_tree(edge, 0)
            return ForestChange(entered=(edge,), left=(heavy,))
        self._add_nontree(edge, 0)
        return ForestChange()

    def _delete(self, edge: ForestEdge) -> ForestChange:
        level = self._level.pop(edge.id)
        if edge.id not in self._tree:
            self._remove_nontree(edge)
            return ForestChange()
        self._remove_tree(edge)

        for i in range(level, -1, -1):
            side_u = self._component(edge.u, i)
            side_v = self._component(edge.v, i)
            small = side_u if len(side_u) <= len(side_v) else side_v

            for x in small:
                for eid in self._tree_adj[x]:
                    if self._level[eid] == i:
                        self._level[eid] = i + 1

            candidates = {
                eid
                for x in small
                for eid in self._nontree_adj[x]
                if self._level[eid] == i
            }
            for cand in sorted((self._edges[eid] for eid in candidates), key=lambda e: e.key):
                if cand.u in small and cand.v in small:
                    self._level[cand.id] = i + 1
                    continue
                self._remove_nontree(cand)
                self._add_tree(cand, i)
                return ForestChange(entered=(cand,), left=(edge,))

        return ForestChange(left=(edge,))

    def _connected(self, u: int, v: int) -> bool:
        return v in self._component(u, 0)

    def _path_max(self, u: int, v: int) -> ForestEdge:
        return max(self._tree_path(u, v), key=lambda e: e.key)


ENGINES: dict[str, type[ForestEngine]] = {
    "baseline": BaselineForest,
    "leveled": LeveledForest,
}


def make_engine(kind: str, n: int) -> ForestEngine:
    """Construct a registered engine by name.

    Raises:
        ValueError: unknown engine name
    """
    try:
        return ENGINES[kind](n)
    except KeyError:
        raise ValueError(
            f"unknown forest engine '{kind}' (choose from {', '.join(sorted(ENGINES))})"
        ) from None
