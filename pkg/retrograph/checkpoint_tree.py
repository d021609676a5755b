"""Scapegoat tree over the intervals between consecutive update times.

Leaves are the intervals (t_i, t_{i+1}], plus a sentinel leaf (-inf, t_1]
on the left that never stores edges. Every node u covers the union I_u of
its leaves' intervals. An edge with lifespan L is stored at exactly the
nodes u with I_u inside L and I_parent(u) not inside L, so the sets stored
along any root-to-leaf path are disjoint and their union is E_t for every
t in that leaf.

Balance is the sibling rule: the leaf counts of two siblings differ by at
most a factor of 2. After a split or merge the highest violating node on
the modified path is rebuilt perfectly balanced.
"""

import bisect
import math
from abc import ABC, abstractmethod
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Callable, Iterator

from retrograph.errors import MisalignedLifespan
from retrograph.timeline import NOW, EdgeLife, Lifespan, LifespanDelta, Time, check_time, format_time

EdgeKey = tuple[int, int, Time]


class Summary(ABC):
    """Problem-specific aggregate over the edge set D(u) of one node."""

    @abstractmethod
    def add_edge(self, life: EdgeLife):
        ...

    @abstractmethod
    def remove_edge(self, life: EdgeLife):
        ...


@dataclass(eq=False)
class CheckNode:
    lo: Time
    hi: Time
    summary: Summary | None = None
    leaves: int = 1
    left: 'CheckNode | None' = None
    right: 'CheckNode | None' = None
    parent: 'CheckNode | None' = None
    edges: dict[EdgeKey, EdgeLife] = field(default_factory=dict)

    @property
    def is_leaf(self) -> bool:
        return self.left is None

    @property
    def is_sentinel(self) -> bool:
        return self.lo == -math.inf

    def __repr__(self) -> str:
        lo = "-inf" if self.is_sentinel else format_time(self.lo)
        return f"CheckNode(({lo}, {format_time(self.hi)}], leaves={self.leaves}, edges={len(self.edges)})"


@dataclass
class TreeStats:
    summary_ops: int = 0
    splits: int = 0
    merges: int = 0
    rebuilds: int = 0
    rebuilt_leaves: int = 0


@dataclass
class InvariantReport:
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, message: str):
        self.violations.append(message)


class CheckpointTree:
    """Checkpoint tree with per-node summaries built by summary_factory.

    Args:
        summary_factory: creates an empty Summary for each new node; None
            keeps only the raw edge dictionaries
    """

    def __init__(self, summary_factory: Callable[[], Summary] | None = None):
        self._factory = summary_factory
        self.root = self._new_node(-math.inf, NOW)
        self._placement: dict[EdgeKey, list[CheckNode]] = {}
        self._lives: dict[EdgeKey, EdgeLife] = {}
        self._ending: dict[Time, set[EdgeKey]] = defaultdict(set)
        self.stats = TreeStats()
        # What the last update touched, for check_recent
        self._touched: set[CheckNode] = set()
        self._touched_keys: set[EdgeKey] = set()
        self._last_time: Time | None = None

    # Read accessors

    def nodes(self) -> Iterator[CheckNode]:
        """Pre-order traversal."""
        return self._subtree(self.root)

    def leaves(self) -> list[tuple[Time, Time]]:
        return [(leaf.lo, leaf.hi) for leaf in self._leaves_under(self.root)]

    def height(self) -> int:
        best = 0
        stack = [(self.root, 0)]
        while stack:
            node, depth = stack.pop()
            best = max(best, depth)
            if not node.is_leaf:
                stack.append((node.left, depth + 1))
                stack.append((node.right, depth + 1))
        return best

    def placement(self, key: EdgeKey) -> list[CheckNode]:
        return list(self._placement.get(key, []))

    def lives(self) -> list[EdgeLife]:
        return sorted(self._lives.values(), key=lambda life: life.key)

    def place(self, span: Lifespan) -> list[CheckNode]:
        """Canonical nodes tiling span, left to right.

        Raises:
            MisalignedLifespan: an endpoint of span falls strictly inside a leaf
        """
        out: list[CheckNode] = []
        self._decompose(self.root, span, out)
        return out

    def root_path(self, t: Time) -> list[CheckNode]:
        """Nodes from the leaf containing t up to the root; [] for t <= t_1."""
        check_time(t, allow_now=True)
        leaf = self._leaf_for(t)
        if leaf.is_sentinel:
            return []
        path = []
        node = leaf
        while node is not None:
            path.append(node)
            node = node.parent
        return path

    def gather(self, t: Time) -> list[EdgeLife]:
        """E_t assembled from the D-sets along the root path of t."""
        return [life for node in self.root_path(t) for life in node.edges.values()]

    # Updates

    def create_update(self, t: int, delta: LifespanDelta):
        """Split the leaf containing t, then apply the lifespan delta.

        Raises:
            ValueError: t is already a leaf boundary
        """
        check_time(t)
        leaf = self._leaf_for(t)
        if not leaf.lo < t < leaf.hi:
            raise ValueError(f"time {t} is already a leaf boundary")
        self._begin(t)
        leaf.left = self._new_node(leaf.lo, t, parent=leaf)
        leaf.right = self._new_node(t, leaf.hi, parent=leaf)
        self._touched.update((leaf.left, leaf.right))
        node = leaf
        while node is not None:
            node.leaves += 1
            self._touched.add(node)
            node = node.parent
        self.stats.splits += 1

        for life in delta.removed:
            self._uninstall(life)
        for life in delta.added:
            self._install(life)
        self._rebalance(leaf)

    def cancel_update(self, t: int, delta: LifespanDelta):
        """Merge the leaves on either side of t, then apply the lifespan delta.

        Raises:
            ValueError: t is not a leaf boundary
        """
        self._begin(t)
        for life in delta.removed:
            self._uninstall(life)

        x = self._leaf_for(t)
        if x.hi != t:
            raise ValueError(f"time {format_time(t)} is not a leaf boundary")
        y = self._leaf_after(t)
        p = x.parent
        s = p.right if p.left is x else p.left
        g = p.parent

        # Lifespans touching the removed nodes, and those ending at x.lo
        # whose parents shrink, need their placement recomputed.
        dirty = {**x.edges, **p.edges}
        if x.lo in self._ending:
            for key in self._ending[x.lo]:
                dirty[key] = self._lives[key]
        for life in dirty.values():
            self._uninstall(life)

        node = y
        while node is not None and node.lo == t:
            node.lo = x.lo
            self._touched.add(node)
            node = node.parent
        node = g
        while node is not None and node.hi == t:
            node.hi = x.lo
            node = node.parent

        s.parent = g
        if g is None:
            self.root = s
        elif g.left is p:
            g.left = s
        else:
            g.right = s
        self._touched.add(s)
        node = g
        while node is not None:
            node.leaves -= 1
            self._touched.add(node)
            node = node.parent
        self.stats.merges += 1

        for life in dirty.values():
            self._install(life)
        for life in delta.added:
            self._install(life)
        if g is not None:
            self._rebalance(g)

    def rebuild(self, w: CheckNode):
        """Replace the subtree below w by a perfectly balanced one over the same leaves."""
        if w.is_leaf:
            return
        intervals = [(leaf.lo, leaf.hi) for leaf in self._leaves_under(w)]
        displaced: dict[EdgeKey, EdgeLife] = {}
        stack = [w.left, w.right]
        while stack:
            node = stack.pop()
            for key, life in node.edges.items():
                displaced[key] = life
                self._placement[key].remove(node)
            if not node.is_leaf:
                stack.append(node.left)
                stack.append(node.right)

        mid = len(intervals) // 2
        w.left = self._build(intervals[:mid], w)
        w.right = self._build(intervals[mid:], w)

        for key, life in displaced.items():
            out: list[CheckNode] = []
            self._decompose(w.left, life.span, out)
            self._decompose(w.right, life.span, out)
            for node in out:
                self._store(node, life)
        self._touched.update(self._subtree(w))
        self.stats.rebuilds += 1
        self.stats.rebuilt_leaves += len(intervals)

    # Invariant checking

    def check_invariants(self, times: list[Time] | None = None) -> InvariantReport:
        """Audit structure, storage, balance, duplication, height and root paths.

        Args:
            times: query times for the root-path checks; defaults to at most
                16 leaf right endpoints spread across the tree
        """
        report = InvariantReport()
        root = self.root
        if root.parent is not None:
            report.add("root has a parent")
        if root.lo != -math.inf or root.hi != NOW:
            report.add(f"root covers {root!r}, expected (-inf, now]")

        stored: dict[EdgeKey, list[CheckNode]] = defaultdict(list)
        for node in self.nodes():
            self._check_node(node, report)
            for key in node.edges:
                stored[key].append(node)

        height = self.height()
        bound = 2 * (height + 1)
        for key, life in self._lives.items():
            nodes = stored.get(key, [])
            if {id(n) for n in nodes} != {id(n) for n in self._placement.get(key, [])}:
                report.add(f"placement index for {key} disagrees with node contents")
            try:
                canonical = self.place(life.span)
            except MisalignedLifespan as e:
                report.add(str(e))
                continue
            if {id(n) for n in nodes} != {id(n) for n in canonical}:
                report.add(f"edge {key} {life.span} is not stored at its canonical nodes")
            if len(nodes) > bound:
                report.add(f"edge {key} stored at {len(nodes)} nodes, bound {bound}")

        self._check_height(height, report)
        self._check_root_paths(times if times is not None else self._spread_times(), report)
        return report

    def check_recent(self, times: list[Time] | None = None) -> InvariantReport:
        """Audit only what the last create_update or cancel_update changed.

        Covers every node that operation split, merged, resized, rebuilt or
        stored into (and the edges of their children, whose parent interval
        may have moved), the placement of every lifespan it installed or
        removed, the height bound, and root paths at the operation's time
        plus `times`. Nodes and lifespans it did not touch keep the state
        the previous audit saw.

        Args:
            times: extra query times for the root-path checks; defaults to
                at most 15 leaf right endpoints spread across the tree
        """
        report = InvariantReport()
        height = self.height()
        bound = 2 * (height + 1)
        for node in self._touched:
            if not self._attached(node):
                continue
            self._check_node(node, report)
            if not node.is_leaf:
                self._check_storage(node.left, report)
                self._check_storage(node.right, report)

        for key in self._touched_keys:
            life = self._lives.get(key)
            nodes = self._placement.get(key)
            if life is None:
                if nodes is not None:
                    report.add(f"removed edge {key} still has a placement")
                continue
            self._check_tiling(key, life, nodes or [], bound, report)

        self._check_height(height, report)
        extra = times if times is not None else self._spread_times(15)
        recent = [self._last_time] if self._last_time is not None else []
        self._check_root_paths(recent + list(extra), report)
        return report

    def _check_node(self, node: CheckNode, report: InvariantReport):
        if not node.lo < node.hi:
            report.add(f"empty interval at {node!r}")
        if node.is_leaf:
            if node.leaves != 1:
                report.add(f"leaf {node!r} has leaf count {node.leaves}")
            if node.is_sentinel and node.edges:
                report.add("sentinel leaf stores edges")
        else:
            left, right = node.left, node.right
            if left.parent is not node or right.parent is not node:
                report.add(f"broken parent link under {node!r}")
            if left.lo != node.lo or left.hi != right.lo or right.hi != node.hi:
                report.add(f"children of {node!r} do not tile its interval")
            if node.leaves != left.leaves + right.leaves:
                report.add(f"leaf count mismatch at {node!r}")
            small, big = sorted((left.leaves, right.leaves))
            if big > 2 * small:
                report.add(f"sibling balance violated under {node!r}: {left.leaves} vs {right.leaves}")
        self._check_storage(node, report)

    def _check_storage(self, node: CheckNode, report: InvariantReport):
        """Each edge at node covers I_node and does not cover I_parent."""
        parent = node.parent
        for key, life in node.edges.items():
            if key not in self._lives:
                report.add(f"node {node!r} stores unknown edge {key}")
                continue
            if not life.span.covers(node.lo, node.hi):
                report.add(f"edge {key} {life.span} does not cover {node!r}")
            if parent is not None and life.span.covers(parent.lo, parent.hi):
                report.add(f"edge {key} {life.span} stored below a covered parent at {node!r}")

    def _check_tiling(self, key: EdgeKey, life: EdgeLife, nodes: list[CheckNode], bound: int,
                      report: InvariantReport):
        """The placement holds the edge, and its intervals tile the lifespan exactly."""
        if any(node.edges.get(key) != life for node in nodes):
            report.add(f"placement index for {key} disagrees with node contents")
        spans = sorted((node.lo, node.hi) for node in nodes)
        tiled = (
            bool(spans)
            and spans[0][0] == life.span.start
            and spans[-1][1] == life.span.end
            and all(hi == lo for (_, hi), (lo, _) in zip(spans, spans[1:]))
        )
        if not tiled:
            report.add(f"edge {key} {life.span} is not tiled by its stored nodes")
        if len(nodes) > bound:
            report.add(f"edge {key} stored at {len(nodes)} nodes, bound {bound}")

    def _check_height(self, height: int, report: InvariantReport):
        leaf_count = self.root.leaves
        if height > 2 * math.log2(leaf_count) + 2:
            report.add(f"height {height} exceeds 2*log2({leaf_count}) + 2")

    def _check_root_paths(self, times: list[Time], report: InvariantReport):
        alive = self._alive_at(times)
        for t in times:
            seen: set[EdgeKey] = set()
            for node in self.root_path(t):
                for key in node.edges:
                    if key in seen:
                        report.add(f"edge {key} stored twice on the root path of {format_time(t)}")
                    seen.add(key)
            if seen != alive[t]:
                report.add(f"root path of {format_time(t)} yields {len(seen)} edges, expected {len(alive[t])}")

    def _alive_at(self, times: list[Time]) -> dict[Time, set[EdgeKey]]:
        """Keys alive at each of times, in one pass over the lifespans."""
        ordered = sorted(set(times))
        alive: dict[Time, set[EdgeKey]] = {t: set() for t in ordered}
        for key, life in self._lives.items():
            lo = bisect.bisect_right(ordered, life.span.start)
            hi = bisect.bisect_right(ordered, life.span.end)
            for t in ordered[lo:hi]:
                alive[t].add(key)
        return alive

    def _spread_times(self, count: int = 16) -> list[Time]:
        his = [hi for _, hi in self.leaves()]
        step = max(1, len(his) // count)
        return his[::step][:count]

    def _attached(self, node: CheckNode) -> bool:
        while node.parent is not None:
            if node.parent.left is not node and node.parent.right is not node:
                return False
            node = node.parent
        return node is self.root

    # Internals

    def _begin(self, t: Time):
        self._touched = set()
        self._touched_keys = set()
        self._last_time = t

    def _new_node(self, lo: Time, hi: Time, parent: CheckNode | None = None) -> CheckNode:
        summary = self._factory() if self._factory is not None else None
        return CheckNode(lo, hi, summary=summary, parent=parent)

    def _build(self, intervals: list[tuple[Time, Time]], parent: CheckNode) -> CheckNode:
        node = self._new_node(intervals[0][0], intervals[-1][1], parent=parent)
        node.leaves = len(intervals)
        if len(intervals) > 1:
            mid = len(intervals) // 2
            node.left = self._build(intervals[:mid], node)
            node.right = self._build(intervals[mid:], node)
        return node

    def _leaf_for(self, t: Time) -> CheckNode:
        """The leaf (lo, hi] with lo < t <= hi."""
        node = self.root
        while not node.is_leaf:
            node = node.left if t <= node.left.hi else node.right
        return node

    def _leaf_after(self, t: Time) -> CheckNode:
        """The leaf whose interval starts at boundary t."""
        node = self.root
        while not node.is_leaf:
            node = node.left if node.left.hi > t else node.right
        return node

    def _subtree(self, w: CheckNode) -> Iterator[CheckNode]:
        stack = [w]
        while stack:
            node = stack.pop()
            yield node
            if not node.is_leaf:
                stack.append(node.right)
                stack.append(node.left)

    def _leaves_under(self, w: CheckNode) -> list[CheckNode]:
        out = []
        stack = [w]
        while stack:
            node = stack.pop()
            if node.is_leaf:
                out.append(node)
            else:
                stack.append(node.right)
                stack.append(node.left)
        return out

    def _decompose(self, node: CheckNode, span: Lifespan, out: list[CheckNode]):
        if not span.overlaps(node.lo, node.hi):
            return
        if span.covers(node.lo, node.hi):
            out.append(node)
            return
        if node.is_leaf:
            raise MisalignedLifespan(
                f"lifespan {span} cuts leaf ({format_time(node.lo)}, {format_time(node.hi)}]"
            )
        self._decompose(node.left, span, out)
        self._decompose(node.right, span, out)

    def _store(self, node: CheckNode, life: EdgeLife):
        node.edges[life.key] = life
        self._touched.add(node)
        self._touched_keys.add(life.key)
        self._placement.setdefault(life.key, []).append(node)
        if node.summary is not None:
            node.summary.add_edge(life)
            self.stats.summary_ops += 1

    def _install(self, life: EdgeLife):
        nodes = self.place(life.span)
        self._lives[life.key] = life
        if life.span.end != NOW:
            self._ending[life.span.end].add(life.key)
        self._placement[life.key] = []
        for node in nodes:
            self._store(node, life)

    def _uninstall(self, life: EdgeLife):
        key = life.key
        life = self._lives.pop(key)
        self._touched_keys.add(key)
        if life.span.end != NOW:
            ending = self._ending[life.span.end]
            ending.discard(key)
            if not ending:
                del self._ending[life.span.end]
        for node in self._placement.pop(key):
            del node.edges[key]
            self._touched.add(node)
            if node.summary is not None:
                node.summary.remove_edge(life)
                self.stats.summary_ops += 1

    def _rebalance(self, start: CheckNode):
        worst = None
        node = start
        while node is not None:
            if not node.is_leaf:
                small, big = sorted((node.left.leaves, node.right.leaves))
                if big > 2 * small:
                    worst = node
            node = node.parent
        if worst is not None:
            self.rebuild(worst)
