"""Trace generators and the naive replay baseline.

Random workloads mix retroactive creates, cancels and queries under a
seed. The OMv gadgets encode a boolean matrix M and vectors v_k as
retroactive graph traces; their expected answers come straight from
numpy boolean products, never from a retroactive structure.
"""

import bisect
import math
import random
from dataclasses import dataclass
from typing import Any

import numpy as np

from retrograph.errors import DuplicateTime, IllegalOperation, NoUpdateAtTime
from retrograph.oracle import answer_on
from retrograph.timeline import NOW, EdgeLife, Lifespan, Time, Update, UpdateKind, UpdateSequence, check_time
from retrograph.trace import CancelOp, CreateOp, Query, QueryKind, Trace, format_answer

UPDATE_KINDS = ("insert", "delete", "cancel")
MIX_KINDS = UPDATE_KINDS + tuple(k.value for k in QueryKind)

# Gadget clock: block i occupies [(i+1) * BLOCK, (i+2) * BLOCK).
BLOCK = 1_000_000
QUERY_OFFSET = 500_000
_STEP = 10
_ATTEMPTS = 20


def validate_mix(mix: dict[str, float]) -> dict[str, float]:
    """Check a workload mix: known kinds, non-negative ratios summing to 1.

    Raises:
        ValueError: naming the offending key or the bad total
    """
    for kind, ratio in mix.items():
        if kind not in MIX_KINDS:
            raise ValueError(f"unknown mix kind '{kind}' (choose from {', '.join(MIX_KINDS)})")
        if isinstance(ratio, bool) or not isinstance(ratio, (int, float)) or ratio < 0:
            raise ValueError(f"mix ratio for '{kind}' must be a non-negative number, got {ratio!r}")
    total = sum(mix.values())
    if not math.isclose(total, 1.0, abs_tol=1e-9):
        raise ValueError(f"mix ratios must sum to 1, got {total}")
    return dict(mix)


class _RandomWorkload:
    """Stateful generator behind wl_random."""

    def __init__(self, n: int, mix: dict[str, float], seed: int, max_weight: int, now_ratio: float):
        if n < 2:
            raise ValueError(f"random workloads need at least 2 vertices, got {n}")
        self.n = n
        self.kinds = [k for k in MIX_KINDS if mix.get(k, 0) > 0]
        self.weights = [mix[k] for k in self.kinds]
        self.rng = random.Random(seed)
        self.max_weight = max_weight
        self.now_ratio = now_ratio
        self.seq = UpdateSequence(n)
        self.trace = Trace(n)
        self.clock = 0

    def generate(self, steps: int) -> Trace:
        for _ in range(steps):
            self.clock += _STEP
            kind = self.rng.choices(self.kinds, self.weights)[0]
            if kind == "insert":
                self._insert() or self._cancel()
            elif kind == "delete":
                self._delete() or self._insert() or self._cancel()
            elif kind == "cancel":
                self._cancel() or self._insert()
            else:
                self._query(QueryKind(kind))
        return self.trace

    def _fresh_time(self, lo: int) -> int | None:
        """An unused time in (lo, clock], or None."""
        if lo + 1 > self.clock:
            return None
        for _ in range(_ATTEMPTS):
            t = self.rng.randint(lo + 1, self.clock)
            if t not in self.seq:
                return t
        return None

    def _insert(self) -> bool:
        for _ in range(_ATTEMPTS):
            u, v = sorted(self.rng.sample(range(self.n), 2))
            lives = self.seq.lifespans_of(u, v)
            if lives and lives[-1].span.end == NOW:
                continue
            t = self._fresh_time(lives[-1].span.end if lives else 0)
            if t is None:
                continue
            weight = self.rng.randint(1, self.max_weight)
            self.seq.create(Update(UpdateKind.INSERT, u, v, t, weight))
            self.trace.insert(u, v, t, weight)
            return True
        return False

    def _delete(self) -> bool:
        open_lives = self.seq.open_lifespans()
        self.rng.shuffle(open_lives)
        for life in open_lives[:_ATTEMPTS]:
            t = self._fresh_time(life.span.start)
            if t is None:
                continue
            self.seq.create(Update(UpdateKind.DELETE, life.u, life.v, t))
            self.trace.delete(life.u, life.v, t)
            return True
        return False

    def _cancel(self) -> bool:
        times = self.seq.times()
        if not times:
            return False
        candidates = self.rng.sample(times, min(len(times), _ATTEMPTS))
        # The latest update can always be cancelled.
        candidates.append(times[-1])
        for t in candidates:
            try:
                self.seq.cancel(t)
            except IllegalOperation:
                continue
            self.trace.cancel(t)
            return True
        return False

    def _query(self, kind: QueryKind):
        if self.rng.random() < self.now_ratio:
            t: Time = NOW
        else:
            t = self.rng.randint(1, self.clock + _STEP)
        if kind is QueryKind.CONN:
            u, v = self.rng.randrange(self.n), self.rng.randrange(self.n)
            self.trace.query(kind, t, u, v)
        else:
            self.trace.query(kind, t)


def wl_random(
    n: int,
    steps: int,
    mix: dict[str, float],
    seed: int = 0,
    max_weight: int = 1,
    now_ratio: float = 0.1,
) -> Trace:
    """Deterministic random trace; every emitted operation is legal when issued.

    The generator keeps a present clock that advances each step; create
    times are sampled uniformly over the past. Infeasible picks are
    substituted: a delete with nothing to delete becomes an insert, an
    impossible insert becomes a cancel, and a cancel on an empty sequence
    becomes an insert.
    """
    mix = validate_mix(mix)
    return _RandomWorkload(n, mix, seed, max_weight, now_ratio).generate(steps)


@dataclass
class OmvInstance:
    """Boolean matrix M (rows m_i) and query vectors v_k."""

    matrix: np.ndarray
    vectors: np.ndarray

    def __post_init__(self):
        self.matrix = np.asarray(self.matrix, dtype=bool)
        self.vectors = np.atleast_2d(np.asarray(self.vectors, dtype=bool))
        if self.matrix.ndim != 2 or self.matrix.shape[0] != self.matrix.shape[1]:
            raise ValueError(f"matrix must be square, got shape {self.matrix.shape}")
        if self.vectors.shape[1] != self.n:
            raise ValueError(f"vectors must have length {self.n}, got {self.vectors.shape[1]}")

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @classmethod
    def random(cls, n: int, density: float = 0.5, seed: int = 0) -> 'OmvInstance':
        rng = np.random.default_rng(seed)
        return cls(rng.random((n, n)) < density, rng.random((n, n)) < density)

    def product(self, k: int) -> np.ndarray:
        """Boolean M v_k."""
        return (self.matrix.astype(np.int64) @ self.vectors[k].astype(np.int64)) > 0


def _block(i: int) -> int:
    return (i + 1) * BLOCK


def _row_phase(trace: Trace, inst: OmvInstance, b: int, u0: int):
    """Row i's (u_j, b) edges alive exactly on (t_i, t_{i+1}]."""
    n = inst.n
    for i in range(1, n + 1):
        t = _block(i) + 1
        if i >= 2:
            for j in np.flatnonzero(inst.matrix[i - 2]):
                trace.delete(u0 + int(j), b, t)
                t += 1
        for j in np.flatnonzero(inst.matrix[i - 1]):
            trace.insert(u0 + int(j), b, t)
            t += 1


def _reset_vector(trace: Trace, vector: np.ndarray, a: int, u0: int, previous: list[int]) -> list[int]:
    """Replace the (a, u_j) edges at t_0 by those of the next vector."""
    for t in previous:
        trace.cancel(t)
    times = []
    t = _block(0) + 1
    for j in np.flatnonzero(vector):
        trace.insert(a, u0 + int(j), t)
        times.append(t)
        t += 1
    return times


def omv_connectivity(inst: OmvInstance) -> Trace:
    """Connectivity gadget on n + 2 vertices a=0, b=1, u_j=2+j.

    For vector k and row i, a and b are connected at a time in
    (t_i, t_{i+1}] iff m_i . v_k >= 1.
    """
    n = inst.n
    a, b, u0 = 0, 1, 2
    trace = Trace(n + 2)
    _row_phase(trace, inst, b, u0)
    previous: list[int] = []
    for k in range(len(inst.vectors)):
        previous = _reset_vector(trace, inst.vectors[k], a, u0, previous)
        product = inst.product(k)
        for i in range(1, n + 1):
            expect = format_answer(QueryKind.CONN, bool(product[i - 1]))
            trace.query(QueryKind.CONN, _block(i) + QUERY_OFFSET, a, b, expect=expect)
    return trace


def omv_msf(inst: OmvInstance) -> Trace:
    """Connectivity gadget plus a permanent (a, b) edge inserted at time 1.

    The spanning forest at a time in (t_i, t_{i+1}] has 1 + |m_i or v_k|
    edges, which is at most |m_i| + |v_k| iff m_i . v_k = 1.
    """
    n = inst.n
    a, b, u0 = 0, 1, 2
    trace = Trace(n + 2)
    trace.insert(a, b, 1)
    _row_phase(trace, inst, b, u0)
    previous: list[int] = []
    for k in range(len(inst.vectors)):
        previous = _reset_vector(trace, inst.vectors[k], a, u0, previous)
        v = inst.vectors[k]
        for i in range(1, n + 1):
            m = inst.matrix[i - 1]
            size = 1 + int(np.count_nonzero(m | v))
            t = _block(i) + QUERY_OFFSET
            trace.query(QueryKind.MSFWEIGHT, t, expect=format_answer(QueryKind.MSFWEIGHT, size))
            trace.query(QueryKind.SFSIZE, t + 1, expect=format_answer(QueryKind.SFSIZE, size))
    return trace


def omv_maxdeg_incremental(inst: OmvInstance) -> Trace:
    """Insert-only maximum degree gadget on 3n vertices.

    Vertices a_j = j, u_j = n + j, b_j = 2n + j. At t_i, row i pads every
    u_j left at m_{i-1,j} = 0 and adds a signal edge for m_ij = 1, with a
    cyclic shift on the b side so no pair repeats. Vectors are layered at
    t_0 the same way on the a side. After vector k, at a time in
    (t_i, t_{i+1}], the maximum degree is i + k iff m_i . v_k = 1, and at
    most i + k - 1 otherwise.
    """
    n = inst.n
    size = 3 * n
    trace = Trace(size)

    def a(j: int) -> int:
        return j % n

    def u(j: int) -> int:
        return n + j

    def b(j: int) -> int:
        return 2 * n + j % n

    # Cumulative degree after each row
    row_degree = []
    degree = np.zeros(size, dtype=np.int64)
    for i in range(1, n + 1):
        t = _block(i) + 1
        edges = []
        if i >= 2:
            edges += [(u(j), b(j + i - 2)) for j in np.flatnonzero(~inst.matrix[i - 2])]
        edges += [(u(j), b(j + i - 1)) for j in np.flatnonzero(inst.matrix[i - 1])]
        for x, y in edges:
            trace.insert(int(x), int(y), t)
            t += 1
        if edges:
            degree += np.bincount(np.asarray(edges, dtype=np.int64).ravel(), minlength=size)
        row_degree.append(degree.copy())

    vector_degree = np.zeros(size, dtype=np.int64)
    t0 = _block(0) + 1
    for k in range(1, len(inst.vectors) + 1):
        edges = []
        if k >= 2:
            edges += [(u(j), a(j + k - 2)) for j in np.flatnonzero(~inst.vectors[k - 2])]
        edges += [(u(j), a(j + k - 1)) for j in np.flatnonzero(inst.vectors[k - 1])]
        for x, y in edges:
            trace.insert(int(x), int(y), t0)
            t0 += 1
        if edges:
            vector_degree += np.bincount(np.asarray(edges, dtype=np.int64).ravel(), minlength=size)

        for i in range(1, n + 1):
            total = row_degree[i - 1] + vector_degree
            vertex = int(np.argmax(total))
            peak = int(total[vertex])
            trace.query(QueryKind.MAXDEG, _block(i) + QUERY_OFFSET, expect=f"{vertex}:{peak}")
    return trace


OMV_FAMILIES = {
    "omv-conn": omv_connectivity,
    "omv-msf": omv_msf,
    "omv-maxdeg": omv_maxdeg_incremental,
}


class ReplayBaseline:
    """Keeps only the raw update list; each query sorts and replays the prefix before t.

    Legality is not rechecked here; traces are validated when parsed.
    """

    def __init__(self, n: int):
        self.n = n
        self._updates: dict[int, Update] = {}

    def create(self, upd: Update):
        check_time(upd.time)
        if upd.time in self._updates:
            raise DuplicateTime(f"an update already exists at time {upd.time}")
        self._updates[upd.time] = upd

    def cancel(self, t: Time) -> Update:
        try:
            return self._updates.pop(t)
        except KeyError:
            raise NoUpdateAtTime(f"no update at time {t}") from None

    def edges_before(self, t: Time) -> list[EdgeLife]:
        ordered = sorted(self._updates)
        alive: dict[tuple[int, int], EdgeLife] = {}
        for time in ordered[: bisect.bisect_left(ordered, t)]:
            upd = self._updates[time]
            if upd.kind is UpdateKind.INSERT:
                alive[upd.pair] = EdgeLife(*upd.pair, upd.weight, Lifespan(time))
            else:
                alive.pop(upd.pair, None)
        return list(alive.values())

    def query(self, q: Query) -> Any:
        check_time(q.time, allow_now=True)
        return answer_on(self.n, self.edges_before(q.time), q)


def baseline_replay(trace: Trace) -> list[str]:
    """Answer every query of the trace with the replay baseline, in order."""
    replay = ReplayBaseline(trace.n)
    answers = []
    for step in trace.steps:
        if isinstance(step, CreateOp):
            replay.create(step.update)
        elif isinstance(step, CancelOp):
            replay.cancel(step.time)
        else:
            answers.append(format_answer(step.kind, replay.query(step)))
    return answers
