"""Tests for the checkpoint tree."""

import math
import random

import pytest

from retrograph.checkpoint_tree import CheckpointTree
from retrograph.errors import IllegalOperation, MisalignedLifespan
from retrograph.timeline import NOW, Lifespan, LifespanDelta, Update, UpdateKind, UpdateSequence


class Harness:
    """An UpdateSequence driving a CheckpointTree."""

    def __init__(self, n):
        self.seq = UpdateSequence(n)
        self.tree = CheckpointTree()

    def insert(self, u, v, t, w=1):
        delta = self.seq.create(Update(UpdateKind.INSERT, u, v, t, w))
        self.tree.create_update(t, delta)

    def delete(self, u, v, t):
        delta = self.seq.create(Update(UpdateKind.DELETE, u, v, t))
        self.tree.create_update(t, delta)

    def cancel(self, t):
        _, delta = self.seq.cancel(t)
        self.tree.cancel_update(t, delta)


def test_empty_tree_is_one_sentinel_leaf():
    """Test the initial state."""
    tree = CheckpointTree()
    assert tree.leaves() == [(-math.inf, NOW)]
    assert tree.root_path(5) == []
    assert tree.gather(NOW) == []
    assert tree.check_invariants().ok


def test_leaves_follow_update_times():
    """Test leaf intervals after inserts."""
    h = Harness(4)
    for t in (10, 20, 30):
        h.insert(0, t // 10, t)
    assert h.tree.leaves() == [(-math.inf, 10), (10, 20), (20, 30), (30, NOW)]
    assert h.tree.root.leaves == 4


def test_place_tiles_lifespan():
    """Test canonical placement and misaligned lifespans."""
    h = Harness(6)
    for i, t in enumerate((10, 20, 30, 40, 50)):
        h.insert(i, i + 1, t)
    nodes = h.tree.place(Lifespan(20, 50))
    covered = sorted((node.lo, node.hi) for node in nodes)
    assert covered[0][0] == 20 and covered[-1][1] == 50
    for (_, hi), (lo, _) in zip(covered, covered[1:]):
        assert hi == lo
    with pytest.raises(MisalignedLifespan):
        h.tree.place(Lifespan(15, 50))


def test_gather_matches_edges_at():
    """Test that root paths assemble E_t, with E_t empty before t_1."""
    h = Harness(4)
    h.insert(0, 1, 3)
    h.insert(1, 2, 5)
    h.delete(0, 1, 7)
    for t in (1, 3, 4, 6, 7, 8, NOW):
        gathered = sorted(life.key for life in h.tree.gather(t))
        expected = sorted(life.key for life in h.seq.edges_at(t))
        assert gathered == expected, t
    assert h.tree.root_path(3) == []


def test_cancel_merges_leaves():
    """Test leaf merging on cancel of middle and first updates."""
    h = Harness(4)
    h.insert(0, 1, 10)
    h.insert(1, 2, 20)
    h.insert(2, 3, 30)
    h.cancel(20)
    assert h.tree.leaves() == [(-math.inf, 10), (10, 30), (30, NOW)]
    h.cancel(10)
    assert h.tree.leaves() == [(-math.inf, 30), (30, NOW)]
    assert h.tree.check_invariants().ok
    h.cancel(30)
    assert h.tree.leaves() == [(-math.inf, NOW)]
    assert h.tree.lives() == []


def test_boundary_errors():
    """Test creating at an existing boundary and cancelling a non-boundary."""
    h = Harness(3)
    h.insert(0, 1, 10)
    with pytest.raises(ValueError, match="already a leaf boundary"):
        h.tree.create_update(10, LifespanDelta())
    with pytest.raises(ValueError, match="not a leaf boundary"):
        h.tree.cancel_update(12, LifespanDelta())
    assert h.tree.check_invariants().ok


def test_ascending_inserts_stay_balanced():
    """Test height and rebuilds on a sorted insertion run."""
    h = Harness(50)
    for t in range(1, 257):
        u, v = (t % 49), (t % 49) + 1
        if h.seq.lifespans_of(u, v) and h.seq.lifespans_of(u, v)[-1].span.end == NOW:
            h.delete(u, v, t)
        else:
            h.insert(u, v, t)
    report = h.tree.check_invariants()
    assert report.ok, report.violations
    assert h.tree.height() <= 2 * math.log2(257) + 2
    assert h.tree.stats.rebuilds > 0


def subtree(w):
    stack = [w]
    while stack:
        node = stack.pop()
        yield node
        if not node.is_leaf:
            stack.extend((node.left, node.right))


def sequential_harness(steps, n=6):
    """Toggle edges at times 1..steps, which forces rebuilds on the right spine."""
    h = Harness(n)
    for t in range(1, steps + 1):
        u, v = t % (n - 1), t % (n - 1) + 1
        lives = h.seq.lifespans_of(u, v)
        if lives and lives[-1].span.end == NOW:
            h.delete(u, v, t)
        else:
            h.insert(u, v, t)
    return h


def test_check_invariants_reports_moved_edge():
    """Test that an edge moved to a node its lifespan does not cover is reported."""
    h = Harness(4)
    h.insert(0, 1, 10)
    h.insert(1, 2, 20)
    h.insert(2, 3, 30)
    h.delete(0, 1, 40)
    assert h.tree.check_invariants().ok

    life = h.seq.lifespans_of(0, 1)[0]
    source = h.tree.placement(life.key)[0]
    del source.edges[life.key]
    wrong = h.tree.root_path(NOW)[0]
    wrong.edges[life.key] = life

    violations = h.tree.check_invariants().violations
    assert any("does not cover" in v for v in violations)
    assert any("not stored at its canonical nodes" in v for v in violations)
    assert any("placement index" in v for v in violations)


def test_rebuild_keeps_leaves_and_edges():
    """Test a rebuild of an inner subtree: same leaves, same lifespans, nothing outside moves."""
    h = sequential_harness(40)
    tree = h.tree
    w = tree.root.right
    assert not w.is_leaf

    inside = set(map(id, subtree(w)))
    leaves_before = tree.leaves()
    lives_before = sorted({key for node in subtree(w) for key in node.edges})
    outside_before = {id(node): dict(node.edges) for node in tree.nodes() if id(node) not in inside}

    tree.rebuild(w)

    assert tree.leaves() == leaves_before
    assert sorted({key for node in subtree(w) for key in node.edges}) == lives_before
    inside = set(map(id, subtree(w)))
    outside_after = {id(node): dict(node.edges) for node in tree.nodes() if id(node) not in inside}
    assert outside_after == outside_before
    for node in subtree(w):
        if not node.is_leaf:
            assert abs(node.left.leaves - node.right.leaves) <= 1
    report = tree.check_invariants()
    assert report.ok, report.violations


def test_check_recent_follows_each_update():
    """Test the per-update audit on splits, merges and rebuilds, and that it sees a touched corruption."""
    h = sequential_harness(30)
    report = h.tree.check_recent()
    assert report.ok, report.violations
    h.cancel(30)
    report = h.tree.check_recent([NOW, 1, 29])
    assert report.ok, report.violations

    h.insert(0, 5, 31)
    life = h.seq.lifespans_of(0, 5)[0]
    node = h.tree.placement(life.key)[0]
    node.edges[(0, 5, 2)] = life
    violations = h.tree.check_recent().violations
    assert any("unknown edge" in v for v in violations)


def _random_operations(steps, n, seed, full_every=1):
    """Apply random operations, auditing each one and the whole tree every full_every steps."""
    rng = random.Random(seed)
    h = Harness(n)
    for step in range(steps):
        action = rng.random()
        try:
            if action < 0.45:
                u, v = rng.sample(range(n), 2)
                h.insert(u, v, rng.randint(1, 20 * steps), rng.randint(1, 9))
            elif action < 0.75:
                lives = h.seq.open_lifespans()
                if not lives:
                    continue
                life = rng.choice(lives)
                h.delete(life.u, life.v, rng.randint(life.span.start + 1, life.span.start + 20 * steps))
            elif len(h.seq):
                h.cancel(rng.choice(h.seq.times()))
            else:
                continue
        except IllegalOperation:
            continue
        times = h.seq.times()
        sampled = rng.sample(times, min(15, len(times))) + [NOW]
        report = h.tree.check_recent(sampled)
        assert report.ok, report.violations
        if step % full_every == 0:
            _full_audit(h)
    _full_audit(h)
    return h


def _full_audit(h):
    report = h.tree.check_invariants()
    assert report.ok, report.violations
    times = h.seq.times()
    assert h.tree.leaves()[1:] == list(zip(times, times[1:] + [NOW]))


def test_invariants_under_random_operations():
    """Test every structural invariant after each random operation."""
    _random_operations(steps=600, n=8, seed=9)


@pytest.mark.slow
def test_invariants_at_scale():
    """Test 10^4 random operations: the per-update audit after each, the full audit every 500th."""
    _random_operations(steps=10_000, n=30, seed=10, full_every=500)
