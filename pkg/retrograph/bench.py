"""Per-operation wall-time benchmarks and the shared YAML report."""

import sys
import time
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import TextIO

import numpy as np
import yaml
from filelock import FileLock

from retrograph.runner import resolve_options
from retrograph.structures import StructureOptions, check_compatible, make_structure
from retrograph.trace import CancelOp, CreateOp, Trace

OP_CLASSES = ("create", "cancel", "query")


@dataclass
class OpTimings:
    """Wall-time summary for one operation class, in seconds."""

    count: int = 0
    total: float = 0.0
    mean: float = 0.0
    p50: float = 0.0
    p90: float = 0.0
    p99: float = 0.0
    max: float = 0.0

    @classmethod
    def from_samples(cls, samples: list[float]) -> 'OpTimings':
        if not samples:
            return cls()
        arr = np.asarray(samples, dtype=np.float64)
        p50, p90, p99 = np.percentile(arr, [50, 90, 99])
        return cls(
            count=len(samples),
            total=float(arr.sum()),
            mean=float(arr.mean()),
            p50=float(p50),
            p90=float(p90),
            p99=float(p99),
            max=float(arr.max()),
        )


@dataclass
class BenchReport:
    """Timings of one structure kind on one repetition of a trace."""

    kind: str
    repetition: int
    engine: str
    operations: dict[str, OpTimings] = field(default_factory=dict)

    @property
    def total(self) -> float:
        return sum(t.total for t in self.operations.values())

    def to_dict(self) -> dict:
        return {
            'kind': self.kind,
            'repetition': self.repetition,
            'engine': self.engine,
            'total': self.total,
            'operations': {name: asdict(t) for name, t in self.operations.items()},
        }


def time_trace(trace: Trace, kind: str, repetition: int = 0,
               options: StructureOptions | None = None) -> BenchReport:
    """Replay the trace once on a fresh structure, timing each operation."""
    options = resolve_options(trace, options)
    structure = make_structure(kind, trace.n, options)
    samples: dict[str, list[float]] = {name: [] for name in OP_CLASSES}
    clock = time.perf_counter
    for step in trace.steps:
        if isinstance(step, CreateOp):
            start = clock()
            structure.create(step.update)
            samples["create"].append(clock() - start)
        elif isinstance(step, CancelOp):
            start = clock()
            structure.cancel(step.time)
            samples["cancel"].append(clock() - start)
        else:
            start = clock()
            structure.answer(step)
            samples["query"].append(clock() - start)
    return BenchReport(
        kind=kind,
        repetition=repetition,
        engine=options.engine,
        operations={name: OpTimings.from_samples(s) for name, s in samples.items()},
    )


def bench(
    trace: Trace,
    kinds: list[str],
    repetitions: int = 1,
    options: StructureOptions | None = None,
    max_workers: int | None = None,
    output: TextIO = sys.stderr,
) -> list[BenchReport]:
    """Benchmark several kinds on one trace, one thread per kind.

    Repetitions of a kind run serially inside its thread; kinds never
    share a structure.

    Args:
        trace: Trace to replay
        kinds: Structure kinds to time
        repetitions: Replays per kind
        options: Structure options shared by every kind
        max_workers: Thread pool size (default: one per kind)
        output: Stream for progress output (default: stderr)

    Returns:
        Reports ordered by kind (as given) then repetition

    Raises:
        ValueError: If repetitions < 1 or a kind cannot replay the trace
    """
    if repetitions < 1:
        raise ValueError(f"repetitions must be at least 1, got {repetitions}")
    for kind in kinds:
        check_compatible(trace, kind)

    def run_kind(kind: str) -> list[BenchReport]:
        return [time_trace(trace, kind, rep, options) for rep in range(repetitions)]

    by_kind: dict[str, list[BenchReport]] = {}
    with ThreadPoolExecutor(max_workers=max_workers or max(1, len(kinds))) as executor:
        futures = {executor.submit(run_kind, kind): kind for kind in kinds}
        for future in as_completed(futures):
            kind = futures[future]
            by_kind[kind] = future.result()
            mean = sum(r.total for r in by_kind[kind]) / repetitions
            print(f"  ✓ {kind}: {mean:.4f}s per replay", file=output, flush=True)

    return [report for kind in kinds for report in by_kind[kind]]


class BenchReportWriter:
    """Append benchmark blocks to a YAML report shared between processes."""

    def __init__(self, report_path: Path):
        self.report_path = report_path
        self.file_lock = FileLock(str(report_path) + ".lock")

    def append(self, trace_name: str, reports: list[BenchReport]):
        """Append one block per report under the file lock."""
        with self.file_lock:
            if self.report_path.exists():
                with open(self.report_path) as f:
                    data = yaml.safe_load(f) or {}
            else:
                data = {}
            if 'runs' not in data:
                data['runs'] = []

            for report in reports:
                data['runs'].append({'trace': trace_name, **report.to_dict()})

            # Atomic write (write to temp, then rename)
            temp_path = self.report_path.with_suffix('.tmp')
            with open(temp_path, 'w') as f:
                yaml.dump(data, f, sort_keys=False, default_flow_style=False)
            temp_path.replace(self.report_path)
