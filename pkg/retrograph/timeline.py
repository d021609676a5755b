"""Time model, update sequence and lifespan bookkeeping."""

import bisect
import math
from dataclasses import dataclass, replace
from enum import Enum
from typing import Final, Iterator

from retrograph.errors import (
    DuplicateTime,
    IllegalDelete,
    IllegalInsert,
    InvalidTime,
    InvalidVertex,
    NoUpdateAtTime,
    OverlappingLifespan,
    WouldOrphanDelete,
)

# The present. Compares greater than every finite time.
NOW: Final[float] = math.inf

Time = int | float
Pair = tuple[int, int]

_MIN_TIME = -(2**63)
_MAX_TIME = 2**63 - 1


def check_time(t: Time, allow_now: bool = False) -> None:
    """Raise InvalidTime unless t is a finite 64-bit integer (or NOW if allowed)."""
    if t == NOW and allow_now:
        return
    if isinstance(t, bool) or not isinstance(t, int):
        raise InvalidTime(f"time must be an integer, got {t!r}")
    if not _MIN_TIME <= t <= _MAX_TIME:
        raise InvalidTime(f"time {t} does not fit in 64 bits")


def check_vertex(x: int, n: int) -> None:
    """Raise InvalidVertex unless 0 <= x < n."""
    if isinstance(x, bool) or not isinstance(x, int) or not 0 <= x < n:
        raise InvalidVertex(f"vertex {x!r} not in [0, {n})")


def normalize_pair(u: int, v: int, n: int) -> Pair:
    """Validate an edge's endpoints and return them as (min, max)."""
    check_vertex(u, n)
    check_vertex(v, n)
    if u == v:
        raise InvalidVertex(f"self-loop at vertex {u}")
    return (u, v) if u < v else (v, u)


def format_time(t: Time) -> str:
    return "now" if t == NOW else str(t)


class UpdateKind(str, Enum):
    INSERT = "insert"
    DELETE = "delete"


@dataclass(frozen=True)
class Update:
    """An edge insertion or deletion at a finite time."""

    kind: UpdateKind
    u: int
    v: int
    time: int
    weight: int = 1

    @property
    def pair(self) -> Pair:
        return (self.u, self.v) if self.u < self.v else (self.v, self.u)


@dataclass(frozen=True, order=True)
class Lifespan:
    """Half-open interval (start, end] during which an edge exists."""

    start: Time
    end: Time = NOW

    def __post_init__(self):
        if not self.start < self.end:
            raise InvalidTime(f"empty lifespan ({self.start}, {self.end}]")

    def contains(self, t: Time) -> bool:
        return self.start < t <= self.end

    def covers(self, lo: Time, hi: Time) -> bool:
        """True if the interval (lo, hi] lies inside this lifespan."""
        return self.start <= lo and hi <= self.end

    def overlaps(self, lo: Time, hi: Time) -> bool:
        return self.start < hi and lo < self.end

    def __str__(self) -> str:
        return f"({format_time(self.start)}, {format_time(self.end)}]"


@dataclass(frozen=True)
class EdgeLife:
    """One incarnation of an edge: endpoints (u < v), weight and lifespan."""

    u: int
    v: int
    weight: int
    span: Lifespan

    @property
    def key(self) -> tuple[int, int, Time]:
        """Identity of this incarnation; re-insertions get a new key."""
        return (self.u, self.v, self.span.start)

    @property
    def order_key(self) -> tuple:
        """Deterministic total order: weight, endpoints, then start."""
        return (self.weight, self.u, self.v, self.span.start)

    def alive_at(self, t: Time) -> bool:
        return self.span.contains(t)

    def with_end(self, end: Time) -> 'EdgeLife':
        return replace(self, span=Lifespan(self.span.start, end))


@dataclass(frozen=True)
class LifespanDelta:
    """Lifespans removed from and added to the index by one operation."""

    removed: tuple[EdgeLife, ...] = ()
    added: tuple[EdgeLife, ...] = ()


def _start(life: EdgeLife) -> Time:
    return life.span.start


class UpdateSequence:
    """The sorted update sequence S with a per-pair lifespan index.

    Every operation validates before it mutates, so a raised error leaves
    the sequence untouched.
    """

    def __init__(self, n: int):
        if n < 0:
            raise ValueError(f"vertex count must be non-negative, got {n}")
        self.n = n
        self._updates: dict[int, Update] = {}
        self._times: list[int] = []
        self._lives: dict[Pair, list[EdgeLife]] = {}

    def __len__(self) -> int:
        return len(self._times)

    def __contains__(self, t: Time) -> bool:
        return t in self._updates

    def times(self) -> list[int]:
        """All update times in ascending order."""
        return list(self._times)

    def updates(self) -> Iterator[Update]:
        for t in self._times:
            yield self._updates[t]

    def update_at(self, t: Time) -> Update | None:
        return self._updates.get(t)

    def first_time(self) -> int | None:
        return self._times[0] if self._times else None

    def lifespans(self) -> list[EdgeLife]:
        """Every lifespan currently induced by S, sorted by key."""
        return sorted(
            (life for lives in self._lives.values() for life in lives),
            key=lambda life: life.key,
        )

    def open_lifespans(self) -> list[EdgeLife]:
        """Lifespans no delete has ended yet, sorted by key.

        Only the last lifespan of a pair can be open.
        """
        return sorted(
            (lives[-1] for lives in self._lives.values() if lives and lives[-1].span.end == NOW),
            key=lambda life: life.key,
        )

    def lifespans_of(self, u: int, v: int) -> list[EdgeLife]:
        pair = (u, v) if u < v else (v, u)
        return list(self._lives.get(pair, []))

    def edges_at(self, t: Time) -> list[EdgeLife]:
        """E_t: every lifespan containing t, in the canonical edge order."""
        check_time(t, allow_now=True)
        alive = []
        for lives in self._lives.values():
            # Lifespans of a pair are disjoint: only the last one starting before t can hold t
            idx = bisect.bisect_left(lives, t, key=_start)
            if idx and lives[idx - 1].alive_at(t):
                alive.append(lives[idx - 1])
        return sorted(alive, key=lambda life: life.order_key)

    def alive_pairs(self, t: Time) -> set[Pair]:
        return {(life.u, life.v) for life in self.edges_at(t)}

    def create(self, upd: Update) -> LifespanDelta:
        """Add an update to S and return the induced lifespan change.

        Raises:
            InvalidTime, InvalidVertex: malformed update
            DuplicateTime: an update already exists at upd.time
            IllegalInsert: the pair is alive at upd.time or has a later lifespan
            IllegalDelete: no alive edge at upd.time, or it is deleted later
        """
        check_time(upd.time)
        pair = normalize_pair(upd.u, upd.v, self.n)
        if upd.time in self._updates:
            raise DuplicateTime(f"an update already exists at time {upd.time}")

        lives = self._lives.get(pair, [])
        idx = bisect.bisect_left(lives, upd.time, key=_start)

        if upd.kind is UpdateKind.INSERT:
            if upd.weight < 1:
                raise IllegalInsert(f"weight must be positive, got {upd.weight}")
            if idx > 0 and lives[idx - 1].alive_at(upd.time):
                raise IllegalInsert(
                    f"edge {pair} is already alive at time {upd.time} "
                    f"(lifespan {lives[idx - 1].span})"
                )
            if idx < len(lives):
                raise IllegalInsert(
                    f"edge {pair} has a later lifespan {lives[idx].span}; "
                    f"inserting at {upd.time} would overlap it"
                )
            life = EdgeLife(pair[0], pair[1], upd.weight, Lifespan(upd.time, NOW))
            lives.insert(idx, life)
            self._lives[pair] = lives
            self._store(replace(upd, u=pair[0], v=pair[1]))
            return LifespanDelta(added=(life,))

        if idx == 0 or not lives[idx - 1].alive_at(upd.time):
            raise IllegalDelete(f"edge {pair} is not alive at time {upd.time}")
        old = lives[idx - 1]
        if old.span.end != NOW:
            raise IllegalDelete(
                f"edge {pair} is already deleted later, at time {old.span.end}"
            )
        new = old.with_end(upd.time)
        lives[idx - 1] = new
        self._store(replace(upd, u=pair[0], v=pair[1], weight=old.weight))
        return LifespanDelta(removed=(old,), added=(new,))

    def cancel(self, t: Time) -> tuple[Update, LifespanDelta]:
        """Remove the update at time t and return it with the lifespan change.

        Raises:
            NoUpdateAtTime: nothing is scheduled at t
            WouldOrphanDelete: t holds an Insert whose Delete still exists
            OverlappingLifespan: t holds a Delete and the pair is re-inserted later
        """
        upd = self._updates.get(t)
        if upd is None:
            raise NoUpdateAtTime(f"no update at time {format_time(t)}")

        lives = self._lives[upd.pair]
        if upd.kind is UpdateKind.INSERT:
            idx = bisect.bisect_left(lives, t, key=_start)
            life = lives[idx]
            if life.span.end != NOW:
                raise WouldOrphanDelete(
                    f"insert at {t} is still deleted at {life.span.end}; "
                    f"cancel that delete first"
                )
            del lives[idx]
            if not lives:
                del self._lives[upd.pair]
            self._unstore(t)
            return upd, LifespanDelta(removed=(life,))

        idx = bisect.bisect_left(lives, t, key=_start) - 1
        life = lives[idx]
        if idx + 1 < len(lives):
            raise OverlappingLifespan(
                f"cancelling delete at {t} would overlap lifespan {lives[idx + 1].span} "
                f"of edge {upd.pair}"
            )
        extended = life.with_end(NOW)
        lives[idx] = extended
        self._unstore(t)
        return upd, LifespanDelta(removed=(life,), added=(extended,))

    def copy(self) -> 'UpdateSequence':
        other = UpdateSequence(self.n)
        other._updates = dict(self._updates)
        other._times = list(self._times)
        other._lives = {pair: list(lives) for pair, lives in self._lives.items()}
        return other

    def _store(self, upd: Update):
        self._updates[upd.time] = upd
        bisect.insort(self._times, upd.time)

    def _unstore(self, t: int):
        del self._updates[t]
        del self._times[bisect.bisect_left(self._times, t)]


def recompute_lifespans(updates: list[Update]) -> list[EdgeLife]:
    """Lifespans induced by pairing each Insert with the next Delete of its pair.

    A from-scratch rescan used as a reference for the incremental index.
    """
    open_lives: dict[Pair, EdgeLife] = {}
    closed: list[EdgeLife] = []
    for upd in sorted(updates, key=lambda u: u.time):
        if upd.kind is UpdateKind.INSERT:
            open_lives[upd.pair] = EdgeLife(*upd.pair, upd.weight, Lifespan(upd.time, NOW))
        else:
            life = open_lives.pop(upd.pair)
            closed.append(life.with_end(upd.time))
    return sorted(closed + list(open_lives.values()), key=lambda life: life.key)
