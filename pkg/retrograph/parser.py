"""Parser and printer for retrograph trace files.

One directive per line, "#" starts a comment:

    retrograph-trace v1 n=<vertex count>
    create insert <u> <v> [w=<weight>] @ <t>
    create delete <u> <v> @ <t>
    cancel @ <t>
    query conn <u> <v> @ <t|now>
    query <sf|sfsize|msf|msfweight|maxdeg|matchsize|edges> @ <t|now>
    expect <query-index> <answer>
"""

import re
from pathlib import Path

from retrograph.errors import (
    IllegalOperation,
    InvalidTime,
    InvalidVertex,
    TraceLegalityError,
    TraceSyntaxError,
)
from retrograph.timeline import NOW, Time, Update, UpdateKind, UpdateSequence, check_vertex, format_time
from retrograph.trace import CancelOp, CreateOp, Query, QueryKind, Trace

HEADER = "retrograph-trace v1"
_HEADER_RE = re.compile(r"^retrograph-trace v1 n=(\d+)$")
_INT_RE = re.compile(r"^\d+$")


class TraceParser:
    """Parse a trace file from disk."""

    def __init__(self, trace_path: Path):
        self.trace_path = trace_path

    def parse(self, check_legality: bool = True) -> Trace:
        """Read and parse the trace file.

        Returns:
            The parsed Trace

        Raises:
            FileNotFoundError: If the trace file doesn't exist
            TraceSyntaxError: If a directive is malformed
            TraceLegalityError: If an operation is illegal at its position
        """
        if not self.trace_path.exists():
            raise FileNotFoundError(f"trace not found at {self.trace_path}")
        return parse_trace(self.trace_path.read_text(), check_legality=check_legality)


def parse_trace(text: str, check_legality: bool = True) -> Trace:
    """Parse trace text, validating legality by replaying it on an UpdateSequence."""
    trace: Trace | None = None
    seq: UpdateSequence | None = None
    expects: list[tuple[int, int, str]] = []

    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue

        if trace is None:
            match = _HEADER_RE.match(" ".join(line.split()))
            if not match:
                raise TraceSyntaxError(lineno, f"expected header '{HEADER} n=<vertex count>', got '{line}'")
            trace = Trace(n=int(match.group(1)))
            seq = UpdateSequence(trace.n)
            continue

        tokens = line.split()
        if tokens[0] == "expect":
            if len(tokens) < 3 or not _INT_RE.match(tokens[1]):
                raise TraceSyntaxError(lineno, f"expected 'expect <query-index> <answer>', got '{line}'")
            expects.append((lineno, int(tokens[1]), " ".join(tokens[2:])))
            continue

        head, time = _split_time(lineno, line)
        words = head.split()
        try:
            if words[0] == "create":
                upd = _parse_create(lineno, words, time)
                if check_legality:
                    seq.create(upd)
                trace.steps.append(CreateOp(upd))
            elif words[0] == "cancel":
                if len(words) != 1:
                    raise TraceSyntaxError(lineno, f"expected 'cancel @ <t>', got '{line}'")
                if time == NOW:
                    raise TraceSyntaxError(lineno, "cancel needs a finite time")
                if check_legality:
                    seq.cancel(time)
                trace.cancel(time)
            elif words[0] == "query":
                q = _parse_query(lineno, words, time)
                if q.u is not None:
                    check_vertex(q.u, trace.n)
                    check_vertex(q.v, trace.n)
                trace.query(q.kind, q.time, q.u, q.v)
            else:
                raise TraceSyntaxError(lineno, f"unknown directive '{words[0]}'")
        except (IllegalOperation, InvalidVertex, InvalidTime) as e:
            raise TraceLegalityError(lineno, str(e)) from e

    if trace is None:
        raise TraceSyntaxError(1, f"missing header '{HEADER} n=<vertex count>'")

    total = len(trace.queries())
    for lineno, index, answer in expects:
        if index >= total:
            raise TraceSyntaxError(lineno, f"expect refers to query {index}, trace has {total}")
        trace.expected[index] = answer
    return trace


def format_trace(trace: Trace) -> str:
    """Render a trace; parse_trace(format_trace(t)) == t."""
    lines = [f"{HEADER} n={trace.n}"]
    for step in trace.steps:
        if isinstance(step, CreateOp):
            upd = step.update
            if upd.kind is UpdateKind.INSERT:
                weight = f" w={upd.weight}" if upd.weight != 1 else ""
                lines.append(f"create insert {upd.u} {upd.v}{weight} @ {upd.time}")
            else:
                lines.append(f"create delete {upd.u} {upd.v} @ {upd.time}")
        elif isinstance(step, CancelOp):
            lines.append(f"cancel @ {step.time}")
        elif step.kind is QueryKind.CONN:
            lines.append(f"query conn {step.u} {step.v} @ {format_time(step.time)}")
        else:
            lines.append(f"query {step.kind.value} @ {format_time(step.time)}")
    for index in sorted(trace.expected):
        lines.append(f"expect {index} {trace.expected[index]}")
    return "\n".join(lines) + "\n"


def _split_time(lineno: int, line: str) -> tuple[str, Time]:
    head, sep, tail = line.partition("@")
    if not sep or not head.strip():
        raise TraceSyntaxError(lineno, f"missing '@ <time>' in '{line}'")
    token = tail.strip()
    if token == "now":
        return head, NOW
    if not _INT_RE.match(token) or int(token) < 1:
        raise TraceSyntaxError(lineno, f"time must be a positive integer or 'now', got '{token}'")
    return head, int(token)


def _vertex(lineno: int, token: str) -> int:
    if not _INT_RE.match(token):
        raise TraceSyntaxError(lineno, f"vertex must be a non-negative integer, got '{token}'")
    return int(token)


def _parse_create(lineno: int, words: list[str], time: Time) -> Update:
    if time == NOW:
        raise TraceSyntaxError(lineno, "updates need a finite time")
    if len(words) < 4 or words[1] not in ("insert", "delete"):
        raise TraceSyntaxError(lineno, "expected 'create insert|delete <u> <v> ...'")
    u, v = _vertex(lineno, words[2]), _vertex(lineno, words[3])

    if words[1] == "delete":
        if len(words) != 4:
            raise TraceSyntaxError(lineno, "delete takes no weight")
        return Update(UpdateKind.DELETE, u, v, time)

    weight = 1
    if len(words) == 5:
        match = re.match(r"^w=(\d+)$", words[4])
        if not match or int(match.group(1)) < 1:
            raise TraceSyntaxError(lineno, f"weight must look like w=<positive int>, got '{words[4]}'")
        weight = int(match.group(1))
    elif len(words) > 5:
        raise TraceSyntaxError(lineno, "too many fields in insert")
    return Update(UpdateKind.INSERT, u, v, time, weight)


def _parse_query(lineno: int, words: list[str], time: Time) -> Query:
    if len(words) < 2:
        raise TraceSyntaxError(lineno, "query needs a kind")
    try:
        kind = QueryKind(words[1])
    except ValueError:
        raise TraceSyntaxError(lineno, f"unknown query kind '{words[1]}'") from None
    if kind is QueryKind.CONN:
        if len(words) != 4:
            raise TraceSyntaxError(lineno, "expected 'query conn <u> <v> @ <t>'")
        return Query(kind, time, _vertex(lineno, words[2]), _vertex(lineno, words[3]))
    if len(words) != 2:
        raise TraceSyntaxError(lineno, f"query {kind.value} takes no arguments")
    return Query(kind, time)
