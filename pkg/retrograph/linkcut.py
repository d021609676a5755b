"""Link-cut trees with path-maximum aggregation.

Nodes are dense integer slots. Edges of the represented forest are modeled
as their own nodes (vertex - edge node - vertex) so the maximum over a path
is the heaviest edge on it. Vertex slots carry no key.
"""

from typing import Any

_NIL = -1


class LinkCutForest:
    """Splay-based link-cut forest over integer node slots.

    Keys are arbitrary comparable values (the engines use sort-key tuples);
    a slot with key None never wins a path-max.
    """

    def __init__(self, size: int = 0):
        self._left: list[int] = []
        self._right: list[int] = []
        self._parent: list[int] = []
        self._flip: list[bool] = []
        self._key: list[Any] = []
        self._best: list[int] = []
        self._free: list[int] = []
        for _ in range(size):
            self.add_node()

    def add_node(self, key: Any = None) -> int:
        """Allocate a fresh isolated node and return its slot."""
        if self._free:
            x = self._free.pop()
            self._left[x] = self._right[x] = self._parent[x] = _NIL
            self._flip[x] = False
            self._key[x] = key
        else:
            x = len(self._key)
            self._left.append(_NIL)
            self._right.append(_NIL)
            self._parent.append(_NIL)
            self._flip.append(False)
            self._key.append(key)
            self._best.append(_NIL)
        self._best[x] = x if key is not None else _NIL
        return x

    def release_node(self, x: int):
        """Return an isolated node's slot to the free list."""
        self._key[x] = None
        self._free.append(x)

    def link(self, x: int, y: int):
        """Make x a child of y. x and y must be in different trees."""
        self._make_root(x)
        self._parent[x] = y

    def cut(self, x: int, y: int):
        """Remove the tree edge between adjacent nodes x and y."""
        self._make_root(x)
        self._access(y)
        # x is now y's left child with no right subtree
        self._left[y] = _NIL
        self._parent[x] = _NIL
        self._pull(y)

    def find_root(self, x: int) -> int:
        self._access(x)
        y = x
        while True:
            self._push(y)
            if self._left[y] == _NIL:
                break
            y = self._left[y]
        self._splay(y)
        return y

    def connected(self, x: int, y: int) -> bool:
        return x == y or self.find_root(x) == self.find_root(y)

    def path_max(self, x: int, y: int) -> int:
        """Slot of the max-key node on the x..y path, or -1 if none has a key."""
        self._make_root(x)
        self._access(y)
        return self._best[y]

    def _is_root(self, x: int) -> bool:
        p = self._parent[x]
        return p == _NIL or (self._left[p] != x and self._right[p] != x)

    def _push(self, x: int):
        if self._flip[x]:
            left, right = self._left[x], self._right[x]
            self._left[x], self._right[x] = right, left
            if left != _NIL:
                self._flip[left] = not self._flip[left]
            if right != _NIL:
                self._flip[right] = not self._flip[right]
            self._flip[x] = False

    def _pull(self, x: int):
        key = self._key
        best = x if key[x] is not None else _NIL
        for child in (self._left[x], self._right[x]):
            if child == _NIL:
                continue
            cand = self._best[child]
            if cand != _NIL and (best == _NIL or key[cand] > key[best]):
                best = cand
        self._best[x] = best

    def _rotate(self, x: int):
        p = self._parent[x]
        g = self._parent[p]
        if not self._is_root(p):
            if self._left[g] == p:
                self._left[g] = x
            else:
                self._right[g] = x
        self._parent[x] = g
        if self._left[p] == x:
            b = self._right[x]
            self._right[x] = p
            self._left[p] = b
        else:
            b = self._left[x]
            self._left[x] = p
            self._right[p] = b
        if b != _NIL:
            self._parent[b] = p
        self._parent[p] = x
        self._pull(p)
        self._pull(x)

    def _splay(self, x: int):
        path = [x]
        y = x
        while not self._is_root(y):
            y = self._parent[y]
            path.append(y)
        for node in reversed(path):
            self._push(node)
        while not self._is_root(x):
            p = self._parent[x]
            if not self._is_root(p):
                g = self._parent[p]
                if (self._left[g] == p) == (self._left[p] == x):
                    self._rotate(p)
                else:
                    self._rotate(x)
            self._rotate(x)

    def _access(self, x: int):
        last = _NIL
        y = x
        while y != _NIL:
            self._splay(y)
            self._right[y] = last
            self._pull(y)
            last = y
            y = self._parent[y]
        self._splay(x)

    def _make_root(self, x: int):
        self._access(x)
        self._flip[x] = not self._flip[x]
        self._push(x)
