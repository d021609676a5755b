"""Tests for the static graph algorithms."""

from dataclasses import dataclass

from retrograph.static import UnionFind, connected_bfs, forest_size, greedy_matching, kruskal, max_degree


@dataclass(frozen=True)
class E:
    u: int
    v: int
    weight: int


def test_union_find():
    """Test union, find and component counting."""
    uf = UnionFind(4)
    assert uf.union(0, 1)
    assert not uf.union(1, 0)
    assert uf.same(0, 1)
    assert not uf.same(0, 2)
    assert uf.components == 3


def test_kruskal_triangle():
    """Test Kruskal keeps the two lightest triangle edges."""
    edges = [E(0, 1, 1), E(1, 2, 2), E(0, 2, 3)]
    forest = kruskal(3, edges, key=lambda e: (e.weight, e.u, e.v))
    assert forest == [E(0, 1, 1), E(1, 2, 2)]


def test_connectivity_helpers():
    """Test BFS connectivity and forest size."""
    pairs = [(0, 1), (1, 2), (3, 4)]
    assert connected_bfs(5, pairs, 0, 2)
    assert not connected_bfs(5, pairs, 0, 3)
    assert connected_bfs(5, [], 4, 4)
    assert forest_size(5, pairs) == 3
    assert forest_size(5, pairs + [(0, 2)]) == 3


def test_max_degree_prefers_lowest_vertex():
    """Test tie-breaking and the empty graph."""
    assert max_degree(4, []) == (0, 0)
    assert max_degree(4, [(1, 2, 1), (2, 3, 1), (0, 1, 1)]) == (1, 2)
    assert max_degree(4, [(0, 3, 5), (1, 2, 1)]) == (0, 5)


def test_greedy_matching_follows_order():
    """Test the greedy scan on a path."""
    assert greedy_matching([(0, 1), (1, 2), (2, 3)]) == [(0, 1), (2, 3)]
    assert greedy_matching([(1, 2), (0, 1), (2, 3)]) == [(1, 2)]
