"""Tests for the trace generators and the replay baseline."""

import numpy as np
import pytest

from retrograph.config import PRESETS
from retrograph.runner import TraceRunner
from retrograph.structures import compatible_kinds
from retrograph.timeline import UpdateKind, UpdateSequence
from retrograph.trace import CancelOp, CreateOp, QueryKind
from retrograph.workloads import (
    BLOCK,
    OMV_FAMILIES,
    OmvInstance,
    baseline_replay,
    omv_connectivity,
    omv_maxdeg_incremental,
    omv_msf,
    validate_mix,
    wl_random,
)


def replay_legality(trace):
    """Replay creates and cancels on a fresh sequence; raises if any is illegal."""
    seq = UpdateSequence(trace.n)
    for step in trace.steps:
        if isinstance(step, CreateOp):
            seq.create(step.update)
        elif isinstance(step, CancelOp):
            seq.cancel(step.time)
    return seq


def expected_answers(trace):
    return [trace.expected[i] for i in range(len(trace.queries()))]


def test_insert_only_mix():
    """Test that an all-insert mix emits only creates of inserts."""
    trace = wl_random(n=6, steps=10, mix=PRESETS["inserts"], seed=1)
    assert len(trace.steps) == 10
    assert all(isinstance(s, CreateOp) and s.update.kind is UpdateKind.INSERT for s in trace.steps)


def test_random_is_deterministic():
    """Test that a seed fixes the trace and a new seed changes it."""
    first = wl_random(n=10, steps=300, mix=PRESETS["full"], seed=5, max_weight=4)
    assert first == wl_random(n=10, steps=300, mix=PRESETS["full"], seed=5, max_weight=4)
    assert first != wl_random(n=10, steps=300, mix=PRESETS["full"], seed=6, max_weight=4)


def test_random_trace_is_legal():
    """Test that the timeline accepts every generated operation."""
    trace = wl_random(n=30, steps=1000, mix=PRESETS["full"], seed=7, max_weight=9)
    replay_legality(trace)
    counts = trace.counts()
    assert counts["create"] > 0 and counts["cancel"] > 0 and counts["query"] > 0
    assert trace.has_deletes()
    assert 1 <= trace.max_weight() <= 9


def test_incremental_preset_never_deletes():
    """Test the incremental preset."""
    trace = wl_random(n=12, steps=500, mix=PRESETS["incremental"], seed=2)
    assert not trace.has_deletes()
    assert trace.query_kinds() <= {QueryKind.CONN, QueryKind.SF, QueryKind.SFSIZE}
    assert "inc-conn" in compatible_kinds(trace)


@pytest.mark.parametrize("mix,match", [
    ({"insert": 0.5, "teleport": 0.5}, "unknown mix kind"),
    ({"insert": 1.5, "cancel": -0.5}, "non-negative"),
    ({"insert": 0.5}, "sum to 1"),
    ({"insert": True}, "non-negative number"),
])
def test_validate_mix_errors(mix, match):
    """Test rejected mixes."""
    with pytest.raises(ValueError, match=match):
        validate_mix(mix)


def test_random_needs_two_vertices():
    """Test that a single vertex cannot hold an edge."""
    with pytest.raises(ValueError, match="at least 2 vertices"):
        wl_random(n=1, steps=5, mix=PRESETS["inserts"])


def test_omv_instance_shapes():
    """Test instance validation and the boolean product."""
    inst = OmvInstance(np.eye(3), [[1, 0, 1]])
    assert inst.n == 3
    assert inst.product(0).tolist() == [True, False, True]
    with pytest.raises(ValueError, match="square"):
        OmvInstance(np.ones((2, 3)), [[1, 0, 0]])
    with pytest.raises(ValueError, match="length 3"):
        OmvInstance(np.eye(3), [[1, 0]])
    assert np.array_equal(OmvInstance.random(5, seed=4).matrix, OmvInstance.random(5, seed=4).matrix)


def test_connectivity_gadget_on_identity():
    """Test M = I, v = (1, 0): true in the first row window, false in the second."""
    trace = omv_connectivity(OmvInstance(np.eye(2), [[1, 0]]))
    assert trace.n == 4
    assert expected_answers(trace) == ["true", "false"]
    queries = trace.queries()
    assert all(q.kind is QueryKind.CONN and (q.u, q.v) == (0, 1) for q in queries)
    assert [a.answer for a in TraceRunner(trace, "full-conn").run()] == ["true", "false"]


def test_connectivity_gadget_all_zeros():
    """Test that an all-zero matrix answers false everywhere."""
    trace = omv_connectivity(OmvInstance(np.zeros((4, 4)), np.ones((2, 4))))
    assert set(expected_answers(trace)) == {"false"}
    assert len(trace.queries()) == 8


def test_msf_gadget_on_identity():
    """Test forest sizes for M = I, v = (1, 0)."""
    trace = omv_msf(OmvInstance(np.eye(2), [[1, 0]]))
    assert expected_answers(trace) == ["2/1", "2", "3/1", "3"]
    report = TraceRunner(trace, "full-msf").verify()
    assert report.ok, [str(m) for m in report.mismatches]


def test_msf_gadget_all_zeros():
    """Test that with M = 0 the forest is the (a, b) edge plus the vector edges."""
    vectors = np.array([[1, 1, 0], [0, 0, 0]])
    trace = omv_msf(OmvInstance(np.zeros((3, 3)), vectors))
    answers = expected_answers(trace)
    assert answers[:6] == ["3/1", "3"] * 3
    assert answers[6:] == ["1/1", "1"] * 3


def test_maxdeg_gadget_worked_rows():
    """Test the row edges between u and b after the third row."""
    matrix = [[1, 0, 0, 1], [1, 1, 0, 0], [0, 0, 1, 1], [0, 0, 0, 0]]
    trace = omv_maxdeg_incremental(OmvInstance(matrix, [[1, 1, 1, 1]]))
    n = 4
    row_edges = {
        (s.update.u, s.update.v)
        for s in trace.steps
        if isinstance(s, CreateOp) and 2 * BLOCK <= s.update.time < 5 * BLOCK
    }
    u = [n + j for j in range(n)]
    b = [2 * n + j for j in range(n)]
    assert row_edges == {
        (u[0], b[0]), (u[3], b[3]),
        (u[1], b[1]), (u[2], b[2]), (u[0], b[1]), (u[1], b[2]),
        (u[2], b[3]), (u[3], b[0]), (u[2], b[0]), (u[3], b[1]),
    }


def test_maxdeg_gadget_all_ones():
    """Test that every query expects degree i + k on u_0."""
    n = 3
    trace = omv_maxdeg_incremental(OmvInstance(np.ones((n, n)), np.ones((n, n))))
    expected = [f"{n}:{i + k}" for k in range(1, n + 1) for i in range(1, n + 1)]
    assert expected_answers(trace) == expected


def test_maxdeg_gadget_is_incremental():
    """Test that the gadget only creates inserts and verifies cleanly."""
    trace = omv_maxdeg_incremental(OmvInstance.random(8, seed=3))
    creates = [s for s in trace.steps if isinstance(s, CreateOp)]
    assert creates and all(s.update.kind is UpdateKind.INSERT for s in creates)
    assert not any(isinstance(s, CancelOp) for s in trace.steps)
    assert not trace.has_deletes()
    report = TraceRunner(trace, "full-maxdeg").verify()
    assert report.ok, [str(m) for m in report.mismatches]


@pytest.mark.parametrize("seed", range(6))
def test_gadget_expectations_encode_the_product(seed):
    """Test that each embedded answer reveals m_i . v_k."""
    inst = OmvInstance.random(6 + seed, seed=seed)
    n = inst.n
    msf = expected_answers(omv_msf(inst))
    maxdeg = expected_answers(omv_maxdeg_incremental(inst))
    for k in range(len(inst.vectors)):
        product = inst.product(k)
        v = inst.vectors[k]
        for i in range(n):
            m = inst.matrix[i]
            size = int(msf[2 * (k * n + i) + 1])
            assert msf[2 * (k * n + i)] == f"{size}/1"
            assert (size <= int(m.sum()) + int(v.sum())) == bool(product[i])

            peak = int(maxdeg[k * n + i].split(":")[1])
            assert peak <= i + 1 + k + 1
            assert (peak == i + 1 + k + 1) == bool(product[i])


def _check_family(trace):
    replay_legality(trace)
    expected = expected_answers(trace)
    assert baseline_replay(trace) == expected
    assert [a.answer for a in TraceRunner(trace, "oracle").run()] == expected
    for kind in compatible_kinds(trace):
        report = TraceRunner(trace, kind).verify()
        assert report.ok, (kind, [str(m) for m in report.mismatches[:3]])


@pytest.mark.parametrize("family", sorted(OMV_FAMILIES))
def test_gadgets_match_structures(family):
    """Test expected answers against the replay baseline, the oracle and every compatible kind."""
    _check_family(OMV_FAMILIES[family](OmvInstance.random(8, seed=11)))


def test_replay_baseline_matches_oracle_on_random_trace():
    """Test the replay baseline against the oracle on a mixed trace."""
    trace = wl_random(n=10, steps=400, mix=PRESETS["full"], seed=12, max_weight=6)
    oracle = [a.answer for a in TraceRunner(trace, "oracle").run()]
    assert baseline_replay(trace) == oracle


@pytest.mark.slow
def test_gadgets_at_scale():
    """Test 20 random instances with n in {8, 16, 32} for every family."""
    for seed in range(20):
        inst = OmvInstance.random((8, 16, 32)[seed % 3], seed=seed)
        for family in OMV_FAMILIES.values():
            trace = family(inst)
            _check_family(trace)
        assert not omv_maxdeg_incremental(inst).has_deletes()
