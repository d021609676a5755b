"""Replay a trace through one structure, optionally checking every answer."""

import sys
from dataclasses import dataclass, field, replace
from typing import TextIO

from retrograph.oracle import Mismatch, Oracle, answers_agree
from retrograph.structures import Structure, StructureOptions, check_compatible, make_structure
from retrograph.trace import CancelOp, CreateOp, Query, Trace


@dataclass
class QueryAnswer:
    """Answer to one trace query."""

    index: int
    query: Query
    answer: str

    def __str__(self) -> str:
        return f"{self.index} {self.answer}"


@dataclass
class VerifyReport:
    """Outcome of checking one structure kind against the oracle and expect lines."""

    kind: str
    checked: int = 0
    skipped: int = 0
    mismatches: list[Mismatch] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.mismatches


def resolve_options(trace: Trace, options: StructureOptions | None) -> StructureOptions:
    """Fill the max weight of approximate MSF from the trace when unset."""
    options = options or StructureOptions()
    if options.max_weight is None:
        options = replace(options, max_weight=trace.max_weight())
    return options


class TraceRunner:
    """Drive one structure kind through a trace in issue order."""

    def __init__(
        self,
        trace: Trace,
        kind: str,
        options: StructureOptions | None = None,
        output: TextIO = sys.stderr,
        verbose: bool = False,
    ):
        """Initialize the runner.

        Args:
            trace: Parsed trace to replay
            kind: Registered structure kind
            options: Engine, epsilon and max weight (approx-msf defaults the
                max weight to the trace's largest weight)
            output: Stream for progress output (default: stderr)
            verbose: If True, log structure statistics after the replay

        Raises:
            UnknownStructure: If kind is not registered
            UnsupportedUpdate: If the trace deletes and kind is incremental
        """
        check_compatible(trace, kind, partial=True)
        self.trace = trace
        self.kind = kind
        self.options = resolve_options(trace, options)
        self.output = output
        self.verbose = verbose

    def run(self) -> list[QueryAnswer]:
        """Answer every query of the trace.

        Raises:
            UnsupportedQuery: If the trace asks something the kind cannot answer
        """
        check_compatible(self.trace, self.kind)
        structure = self._new_structure()
        answers = []
        for step in self.trace.steps:
            if isinstance(step, CreateOp):
                structure.create(step.update)
            elif isinstance(step, CancelOp):
                structure.cancel(step.time)
            else:
                answers.append(QueryAnswer(len(answers), step, structure.answer(step)))
        self._log_stats(structure)
        return answers

    def verify(self, stop_at_first: bool = False) -> VerifyReport:
        """Compare each answer with a step-wise oracle and with expect lines.

        The oracle receives the same operations as the structure, so each
        query is checked against the state it was issued in. Queries the kind
        does not answer are skipped and counted. Approximate structures get
        the relaxed W <= a <= (1+epsilon)W check on weights.

        Args:
            stop_at_first: Return as soon as one mismatch is found

        Returns:
            VerifyReport with mismatches in query order
        """
        structure = self._new_structure()
        oracle = Oracle(self.trace.n)
        report = VerifyReport(self.kind)
        index = 0
        for step in self.trace.steps:
            if isinstance(step, CreateOp):
                structure.create(step.update)
                oracle.create(step.update)
                continue
            if isinstance(step, CancelOp):
                structure.cancel(step.time)
                oracle.cancel(step.time)
                continue

            if step.kind not in structure.queries:
                report.skipped += 1
                index += 1
                continue
            actual = structure.answer(step)
            reference = oracle.answer(step)
            report.checked += 1
            if not answers_agree(step, reference, actual, structure.epsilon):
                report.mismatches.append(Mismatch(index, step, reference, actual))
            expected = self.trace.expected.get(index)
            if expected is not None and not answers_agree(step, expected, actual, structure.epsilon):
                report.mismatches.append(Mismatch(index, step, expected, actual, source="expect"))
            index += 1
            if stop_at_first and report.mismatches:
                break

        skipped = f", {report.skipped} skipped" if report.skipped else ""
        self._log(
            f"{self.kind}: {report.checked} query(s) checked{skipped}, {len(report.mismatches)} mismatch(es)"
        )
        self._log_stats(structure)
        return report

    def _new_structure(self) -> Structure:
        return make_structure(self.kind, self.trace.n, self.options)

    def _log_stats(self, structure: Structure):
        if not self.verbose or structure.stats is None:
            return
        stats = structure.stats
        self._log(
            f"  {self.kind} checkpoint tree: {stats.summary_ops} summary ops, "
            f"{stats.splits} splits, {stats.merges} merges, "
            f"{stats.rebuilds} rebuilds ({stats.rebuilt_leaves} leaves rebuilt)"
        )

    def _log(self, message: str):
        """Log message to output stream."""
        print(message, file=self.output, flush=True)
