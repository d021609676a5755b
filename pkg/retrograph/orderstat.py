"""Order-statistic multiset backed by a size-augmented treap."""

import random
from dataclasses import dataclass
from typing import Any, Iterator


@dataclass
class _Node:
    key: Any
    priority: float
    count: int = 1
    size: int = 1
    left: '_Node | None' = None
    right: '_Node | None' = None


def _size(node: _Node | None) -> int:
    return node.size if node is not None else 0


def _update(node: _Node):
    node.size = node.count + _size(node.left) + _size(node.right)


def _split(node: _Node | None, key: Any) -> tuple[_Node | None, _Node | None]:
    """Split into (keys < key, keys >= key)."""
    if node is None:
        return None, None
    if node.key < key:
        lo, hi = _split(node.right, key)
        node.right = lo
        _update(node)
        return node, hi
    lo, hi = _split(node.left, key)
    node.left = hi
    _update(node)
    return lo, node


def _merge(a: _Node | None, b: _Node | None) -> _Node | None:
    """Merge two treaps where every key in a is below every key in b."""
    if a is None:
        return b
    if b is None:
        return a
    if a.priority > b.priority:
        a.right = _merge(a.right, b)
        _update(a)
        return a
    b.left = _merge(a, b.left)
    _update(b)
    return b


def _delete(node: _Node, key: Any) -> _Node | None:
    if node.key == key:
        return _merge(node.left, node.right)
    if key < node.key:
        node.left = _delete(node.left, key)
    else:
        node.right = _delete(node.right, key)
    _update(node)
    return node


class RankTree:
    """Multiset with O(log n) expected insert, remove, rank and select.

    Duplicate keys share one node with a count.
    """

    def __init__(self, seed: int = 0):
        self._root: _Node | None = None
        self._rng = random.Random(seed)

    def __len__(self) -> int:
        return _size(self._root)

    def __iter__(self) -> Iterator[Any]:
        stack: list[_Node] = []
        node = self._root
        while stack or node is not None:
            while node is not None:
                stack.append(node)
                node = node.left
            node = stack.pop()
            for _ in range(node.count):
                yield node.key
            node = node.right

    def __contains__(self, key: Any) -> bool:
        return self._find(key) is not None

    def insert(self, key: Any):
        node = self._find(key)
        if node is not None:
            self._adjust(key, +1)
            return
        lo, hi = _split(self._root, key)
        self._root = _merge(_merge(lo, _Node(key, self._rng.random())), hi)

    def remove(self, key: Any):
        """Remove one occurrence of key.

        Raises:
            KeyError: key is not present
        """
        node = self._find(key)
        if node is None:
            raise KeyError(key)
        if node.count > 1:
            self._adjust(key, -1)
            return
        self._root = _delete(self._root, key)

    def rank(self, key: Any) -> int:
        """Number of stored keys strictly below key."""
        below = 0
        node = self._root
        while node is not None:
            if key <= node.key:
                node = node.left
            else:
                below += _size(node.left) + node.count
                node = node.right
        return below

    def select(self, index: int) -> Any:
        """The key at 0-based position index in sorted order.

        Raises:
            IndexError: index out of range
        """
        if not 0 <= index < len(self):
            raise IndexError(f"rank {index} out of range for {len(self)} keys")
        node = self._root
        while True:
            left = _size(node.left)
            if index < left:
                node = node.left
            elif index < left + node.count:
                return node.key
            else:
                index -= left + node.count
                node = node.right

    def _find(self, key: Any) -> _Node | None:
        node = self._root
        while node is not None and node.key != key:
            node = node.left if key < node.key else node.right
        return node

    def _adjust(self, key: Any, delta: int):
        node = self._root
        while True:
            node.size += delta
            if node.key == key:
                node.count += delta
                return
            node = node.left if key < node.key else node.right
