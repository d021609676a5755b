"""Tests for the bucketed maximum-degree tracker."""

import random

import pytest

from retrograph.errors import IllegalDelete, IllegalInsert, InvalidVertex
from retrograph.tracker import DegreeTracker


def test_insert_and_delete_move_maximum():
    """Test the maximum across two inserts and a delete."""
    tracker = DegreeTracker(4)
    assert tracker.max_degree() == 0
    tracker.insert_edge(0, 1)
    assert tracker.max_degree() == 1
    tracker.insert_edge(0, 2)
    assert tracker.max_degree() == 2
    assert tracker.bucket(2) == [0]
    tracker.delete_edge(0, 1)
    assert tracker.max_degree() == 1
    assert tracker.degree(0) == 1
    assert sorted(tracker.bucket(0)) == [1, 3]


def test_errors():
    """Test invalid vertices and impossible degree changes."""
    tracker = DegreeTracker(2)
    with pytest.raises(InvalidVertex):
        tracker.insert_edge(0, 0)
    with pytest.raises(InvalidVertex):
        tracker.insert_edge(0, 2)
    with pytest.raises(IllegalDelete):
        tracker.delete_edge(0, 1)
    tracker.insert_edge(0, 1)
    with pytest.raises(IllegalInsert):
        tracker.insert_edge(0, 1)


def _check_shadow(n, steps, seed):
    rng = random.Random(seed)
    tracker = DegreeTracker(n)
    present: set[tuple[int, int]] = set()
    shadow = [0] * n
    for _ in range(steps):
        u, v = sorted(rng.sample(range(n), 2))
        if (u, v) in present:
            tracker.delete_edge(u, v)
            present.discard((u, v))
            shadow[u] -= 1
            shadow[v] -= 1
        else:
            tracker.insert_edge(u, v)
            present.add((u, v))
            shadow[u] += 1
            shadow[v] += 1
        assert tracker.max_degree() == max(shadow)


def test_matches_shadow_array():
    """Test the maximum against a plain degree array."""
    _check_shadow(n=12, steps=5000, seed=1)


@pytest.mark.slow
def test_matches_shadow_array_at_scale():
    """Test 10^5 random updates."""
    _check_shadow(n=50, steps=100_000, seed=2)
