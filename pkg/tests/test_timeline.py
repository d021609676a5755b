"""Tests for the update sequence and lifespan bookkeeping."""

import random

import pytest

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
from retrograph.timeline import (
    NOW,
    EdgeLife,
    Lifespan,
    Update,
    UpdateKind,
    UpdateSequence,
    check_time,
    recompute_lifespans,
)


def ins(u, v, t, w=1):
    return Update(UpdateKind.INSERT, u, v, t, w)


def dele(u, v, t):
    return Update(UpdateKind.DELETE, u, v, t)


def test_now_is_after_every_finite_time():
    """Test NOW compares greater than finite times."""
    assert NOW > 2**63
    assert Lifespan(3).end == NOW
    assert Lifespan(3).contains(10**18)


def test_check_time_rejects_non_integers():
    """Test time validation."""
    check_time(5)
    check_time(NOW, allow_now=True)
    with pytest.raises(InvalidTime):
        check_time(NOW)
    with pytest.raises(InvalidTime):
        check_time(2.5)
    with pytest.raises(InvalidTime):
        check_time(True)


def test_lifespan_is_start_exclusive_end_inclusive():
    """Test (start, end] membership."""
    span = Lifespan(3, 7)
    assert not span.contains(3)
    assert span.contains(5)
    assert span.contains(7)
    assert not span.contains(8)
    with pytest.raises(InvalidTime):
        Lifespan(7, 7)


def test_create_insert_adds_open_lifespan():
    """Test inserting into an empty sequence."""
    seq = UpdateSequence(3)
    delta = seq.create(ins(0, 1, 3))
    assert delta.removed == ()
    assert delta.added == (EdgeLife(0, 1, 1, Lifespan(3, NOW)),)
    assert len(seq) == 1


def test_create_delete_closes_lifespan():
    """Test deleting an alive edge."""
    seq = UpdateSequence(3)
    seq.create(ins(0, 1, 3))
    delta = seq.create(dele(1, 0, 7))
    assert delta.removed == (EdgeLife(0, 1, 1, Lifespan(3, NOW)),)
    assert delta.added == (EdgeLife(0, 1, 1, Lifespan(3, 7)),)
    assert seq.update_at(7).weight == 1


def test_insert_inside_lifespan_is_illegal():
    """Test that an insert while the pair is alive is rejected."""
    seq = UpdateSequence(3)
    seq.create(ins(0, 1, 3))
    seq.create(dele(0, 1, 7))
    with pytest.raises(IllegalInsert, match="already alive"):
        seq.create(ins(0, 1, 5))
    assert seq.times() == [3, 7]


def test_insert_before_later_lifespan_is_illegal():
    """Test that an insert which would overlap a later lifespan is rejected."""
    seq = UpdateSequence(3)
    seq.create(ins(0, 1, 10))
    with pytest.raises(IllegalInsert, match="later lifespan"):
        seq.create(ins(0, 1, 4))


def test_duplicate_time_is_rejected():
    """Test that two updates cannot share a time."""
    seq = UpdateSequence(3)
    seq.create(ins(0, 1, 3))
    with pytest.raises(DuplicateTime):
        seq.create(ins(1, 2, 3))


def test_delete_legality():
    """Test delete of a dead edge and delete when a later delete exists."""
    seq = UpdateSequence(3)
    with pytest.raises(IllegalDelete):
        seq.create(dele(0, 1, 5))
    seq.create(ins(0, 1, 3))
    seq.create(dele(0, 1, 9))
    with pytest.raises(IllegalDelete, match="deleted later"):
        seq.create(dele(0, 1, 6))


def test_invalid_vertices():
    """Test out-of-range endpoints and self-loops."""
    seq = UpdateSequence(3)
    with pytest.raises(InvalidVertex):
        seq.create(ins(0, 3, 1))
    with pytest.raises(InvalidVertex, match="self-loop"):
        seq.create(ins(1, 1, 1))


def test_cancel_delete_reopens_lifespan():
    """Test cancelling a delete extends the lifespan back to NOW."""
    seq = UpdateSequence(3)
    seq.create(ins(0, 1, 3))
    seq.create(dele(0, 1, 7))
    upd, delta = seq.cancel(7)
    assert upd.kind is UpdateKind.DELETE
    assert delta.removed == (EdgeLife(0, 1, 1, Lifespan(3, 7)),)
    assert delta.added == (EdgeLife(0, 1, 1, Lifespan(3, NOW)),)


def test_cancel_insert_removes_lifespan():
    """Test cancelling the only insert of a pair."""
    seq = UpdateSequence(3)
    seq.create(ins(0, 1, 3))
    upd, delta = seq.cancel(3)
    assert upd == ins(0, 1, 3)
    assert delta.removed == (EdgeLife(0, 1, 1, Lifespan(3, NOW)),)
    assert seq.lifespans_of(0, 1) == []
    assert len(seq) == 0


def test_cancel_errors():
    """Test cancel legality failures leave the sequence unchanged."""
    seq = UpdateSequence(3)
    seq.create(ins(0, 1, 3))
    seq.create(dele(0, 1, 7))
    with pytest.raises(WouldOrphanDelete):
        seq.cancel(3)
    with pytest.raises(NoUpdateAtTime):
        seq.cancel(5)

    seq.create(ins(0, 1, 9))
    with pytest.raises(OverlappingLifespan):
        seq.cancel(7)
    assert seq.times() == [3, 7, 9]


def test_edges_at_boundaries():
    """Test E_t at, inside and after a lifespan."""
    seq = UpdateSequence(3)
    seq.create(ins(0, 1, 3))
    seq.create(dele(0, 1, 7))
    assert seq.alive_pairs(5) == {(0, 1)}
    assert seq.alive_pairs(3) == set()
    assert seq.alive_pairs(7) == {(0, 1)}
    assert seq.alive_pairs(8) == set()
    assert seq.edges_at(NOW) == []


def test_query_before_first_update_is_empty():
    """Test times before the first update see the empty graph."""
    seq = UpdateSequence(4)
    seq.create(ins(0, 1, 10))
    seq.create(ins(2, 3, 20))
    assert seq.edges_at(1) == []
    assert seq.edges_at(-5) == []


def test_lifespans_match_recomputation_on_random_scripts():
    """Test the incremental lifespan index against a from-scratch rescan."""
    rng = random.Random(11)
    seq = UpdateSequence(6)
    for _ in range(1500):
        t = rng.randint(1, 400)
        u, v = rng.sample(range(6), 2)
        action = rng.random()
        try:
            if action < 0.45:
                seq.create(ins(u, v, t, rng.randint(1, 5)))
            elif action < 0.75:
                seq.create(dele(u, v, t))
            elif len(seq):
                seq.cancel(rng.choice(seq.times()))
        except (IllegalInsert, IllegalDelete, DuplicateTime, WouldOrphanDelete, OverlappingLifespan):
            pass
        assert seq.lifespans() == recompute_lifespans(list(seq.updates()))
        assert seq.open_lifespans() == [life for life in seq.lifespans() if life.span.end == NOW]

    for _ in range(200):
        t = rng.choice([NOW, rng.randint(0, 410)])
        expected = {(life.u, life.v) for life in recompute_lifespans(list(seq.updates())) if life.alive_at(t)}
        assert seq.alive_pairs(t) == expected


def test_copy_is_independent():
    """Test that a copy does not share state."""
    seq = UpdateSequence(3)
    seq.create(ins(0, 1, 3))
    other = seq.copy()
    other.create(dele(0, 1, 5))
    assert seq.times() == [3]
    assert other.times() == [3, 5]
