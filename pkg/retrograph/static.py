"""Static graph algorithms shared by the oracle and the gather queries."""

from collections import defaultdict, deque
from typing import Callable, Iterable, TypeVar

E = TypeVar('E')


class UnionFind:
    """Disjoint sets over 0..n-1 with path halving and union by size."""

    def __init__(self, n: int):
        self._parent = list(range(n))
        self._size = [1] * n
        self.components = n

    def find(self, x: int) -> int:
        parent = self._parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, x: int, y: int) -> bool:
        """Merge the sets of x and y. Returns False if already merged."""
        rx, ry = self.find(x), self.find(y)
        if rx == ry:
            return False
        if self._size[rx] < self._size[ry]:
            rx, ry = ry, rx
        self._parent[ry] = rx
        self._size[rx] += self._size[ry]
        self.components -= 1
        return True

    def same(self, x: int, y: int) -> bool:
        return self.find(x) == self.find(y)


def kruskal(
    n: int,
    edges: Iterable[E],
    key: Callable[[E], tuple],
    ends: Callable[[E], tuple[int, int]] = lambda e: (e.u, e.v),
) -> list[E]:
    """Minimum spanning forest: edges accepted in ascending key order.

    Args:
        n: vertex count
        edges: any edge records
        key: total order on edges; ties must not occur for a unique result
        ends: extracts (u, v) from an edge record

    Returns:
        Forest edges in the order they were accepted.
    """
    uf = UnionFind(n)
    forest = []
    for edge in sorted(edges, key=key):
        u, v = ends(edge)
        if uf.union(u, v):
            forest.append(edge)
    return forest


def connected_bfs(n: int, pairs: Iterable[tuple[int, int]], u: int, v: int) -> bool:
    if u == v:
        return True
    adj: dict[int, list[int]] = defaultdict(list)
    for a, b in pairs:
        adj[a].append(b)
        adj[b].append(a)
    seen = {u}
    queue = deque([u])
    while queue:
        x = queue.popleft()
        for y in adj[x]:
            if y == v:
                return True
            if y not in seen:
                seen.add(y)
                queue.append(y)
    return False


def forest_size(n: int, pairs: Iterable[tuple[int, int]]) -> int:
    """Edges in any spanning forest, i.e. n minus the component count."""
    uf = UnionFind(n)
    for a, b in pairs:
        uf.union(a, b)
    return n - uf.components


def max_degree(n: int, weighted_pairs: Iterable[tuple[int, int, int]]) -> tuple[int, int]:
    """(vertex, degree) of maximum weighted degree, lowest vertex on ties.

    An empty graph gives (0, 0).
    """
    degree = [0] * n
    for a, b, w in weighted_pairs:
        degree[a] += w
        degree[b] += w
    best = 0
    for x in range(1, n):
        if degree[x] > degree[best]:
            best = x
    return (best, degree[best]) if n else (0, 0)


def greedy_matching(pairs: Iterable[tuple[int, int]]) -> list[tuple[int, int]]:
    """Maximal matching taking each pair, in the given order, when both ends are free."""
    used: set[int] = set()
    matching = []
    for a, b in pairs:
        if a not in used and b not in used:
            used.add(a)
            used.add(b)
            matching.append((a, b))
    return matching
