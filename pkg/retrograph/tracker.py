"""Constant-time maximum degree of a dynamic unweighted simple graph."""

from retrograph.errors import IllegalDelete, IllegalInsert, InvalidVertex
from retrograph.timeline import check_vertex

_NIL = -1


class DegreeTracker:
    """Vertices bucketed by degree in doubly linked lists.

    Every update moves two vertices between adjacent buckets and changes
    the maximum by at most one, so only buckets max and max+1 are checked.
    """

    def __init__(self, n: int):
        self.n = n
        self._degree = [0] * n
        self._head = [_NIL] * max(n, 1)
        self._next = [_NIL] * n
        self._prev = [_NIL] * n
        self._max = 0
        for x in range(n - 1, -1, -1):
            self._link(x)

    def degree(self, x: int) -> int:
        check_vertex(x, self.n)
        return self._degree[x]

    def max_degree(self) -> int:
        return self._max

    def bucket(self, d: int) -> list[int]:
        """Vertices currently of degree d."""
        out = []
        if 0 <= d < len(self._head):
            x = self._head[d]
            while x != _NIL:
                out.append(x)
                x = self._next[x]
        return out

    def insert_edge(self, u: int, v: int):
        """Add edge (u, v).

        Raises:
            InvalidVertex: endpoint out of range, or u == v
            IllegalInsert: an endpoint already has degree n - 1
        """
        self._check_pair(u, v)
        for x in (u, v):
            if self._degree[x] >= self.n - 1:
                raise IllegalInsert(f"vertex {x} already has degree {self._degree[x]}")
        self._move(u, +1)
        self._move(v, +1)
        if self._max + 1 < self.n and self._head[self._max + 1] != _NIL:
            self._max += 1

    def delete_edge(self, u: int, v: int):
        """Remove edge (u, v); the caller guarantees it is present.

        Raises:
            InvalidVertex: endpoint out of range, or u == v
            IllegalDelete: an endpoint has degree 0
        """
        self._check_pair(u, v)
        for x in (u, v):
            if self._degree[x] == 0:
                raise IllegalDelete(f"vertex {x} has no incident edge")
        self._move(u, -1)
        self._move(v, -1)
        if self._head[self._max] == _NIL:
            self._max -= 1

    def _check_pair(self, u: int, v: int):
        check_vertex(u, self.n)
        check_vertex(v, self.n)
        if u == v:
            raise InvalidVertex(f"self-loop at vertex {u}")

    def _move(self, x: int, step: int):
        self._unlink(x)
        self._degree[x] += step
        self._link(x)

    def _unlink(self, x: int):
        prev, nxt = self._prev[x], self._next[x]
        if prev == _NIL:
            self._head[self._degree[x]] = nxt
        else:
            self._next[prev] = nxt
        if nxt != _NIL:
            self._prev[nxt] = prev

    def _link(self, x: int):
        d = self._degree[x]
        first = self._head[d]
        self._next[x] = first
        self._prev[x] = _NIL
        if first != _NIL:
            self._prev[first] = x
        self._head[d] = x
