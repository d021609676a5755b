"""Integration tests for the retrograph CLI."""

import os
import subprocess
import sys
import tempfile
from pathlib import Path

import pytest
import yaml

from retrograph.parser import TraceParser

ROOT = Path(__file__).parent.parent


def retrograph(*args, cwd):
    return subprocess.run(
        [sys.executable, "-m", "retrograph.cli", *args],
        cwd=cwd,
        env={**os.environ, "PYTHONPATH": str(ROOT)},
        capture_output=True,
        text=True,
    )


@pytest.fixture
def workdir():
    """Create a temporary working directory."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield Path(tmpdir)


def test_run_two_queries(workdir):
    """Test one output line per query, with indices 0 and 1."""
    (workdir / "two.trace").write_text(
        "retrograph-trace v1 n=3\n"
        "create insert 0 1 @ 5\n"
        "create insert 1 2 @ 9\n"
        "query conn 0 2 @ 7\n"
        "query sfsize @ now\n"
    )

    result = retrograph("run", "two.trace", "-k", "inc-conn", cwd=workdir)

    assert result.returncode == 0, result.stderr
    assert result.stdout.splitlines() == ["0 false", "1 2"]


def test_gen_then_verify(workdir):
    """Test that generated traces verify against every compatible kind."""
    for family in ("omv-conn", "omv-msf", "omv-maxdeg"):
        result = retrograph("gen", family, "-n", "5", "--seed", "3", "-o", f"{family}.trace", cwd=workdir)
        assert result.returncode == 0, result.stderr
        assert (workdir / f"{family}.trace").exists()

        result = retrograph("verify", f"{family}.trace", cwd=workdir)
        assert result.returncode == 0, result.stderr
        assert "✓ oracle" in result.stderr
        assert "✗" not in result.stderr

    result = retrograph("gen", "random", "--mix", "full", "-n", "8", "--steps", "300", "--seed", "1",
                        "--max-weight", "5", "-o", "full.trace", cwd=workdir)
    assert result.returncode == 0, result.stderr
    result = retrograph("verify", "full.trace", "-k", "full-msf", "-k", "replay", "-e", "leveled", cwd=workdir)
    assert result.returncode == 0, result.stderr
    assert "✓ full-msf" in result.stderr and "✓ replay" in result.stderr


def test_verify_full_trace_checks_every_full_kind(workdir):
    """Test that plain verify of a full mix checks each non-incremental kind on its own queries."""
    retrograph("gen", "random", "--mix", "full", "-n", "8", "--steps", "200", "--seed", "1", "-o", "full.trace",
               cwd=workdir)

    result = retrograph("verify", "full.trace", cwd=workdir)

    assert result.returncode == 0, result.stderr
    for kind in ("full-maxdeg", "full-msf", "full-conn", "full-match"):
        assert f"✓ {kind}: " in result.stderr
    assert "skipped" in result.stderr
    assert "inc-conn" not in result.stderr

    result = retrograph("verify", "full.trace", "-k", "full-maxdeg", cwd=workdir)
    assert result.returncode == 0, result.stderr

    result = retrograph("run", "full.trace", "-k", "full-maxdeg", cwd=workdir)
    assert result.returncode == 2
    assert "does not answer" in result.stderr


def test_gen_to_stdout_parses(workdir):
    """Test that stdout output is a loadable trace."""
    result = retrograph("gen", "random", "--mix", "incremental", "--steps", "50", "-n", "6", cwd=workdir)
    assert result.returncode == 0, result.stderr
    (workdir / "inc.trace").write_text(result.stdout)
    trace = TraceParser(workdir / "inc.trace").parse()
    assert trace.n == 6
    assert not trace.has_deletes()


def test_gen_from_workload_file(workdir):
    """Test a YAML workload passed as --mix."""
    (workdir / "workload.yaml").write_text("mix:\n  insert: 0.7\n  msfweight: 0.3\nn: 7\nsteps: 40\nmax_weight: 9\n")
    result = retrograph("gen", "random", "--mix", "workload.yaml", "-o", "w.trace", cwd=workdir)
    assert result.returncode == 0, result.stderr
    trace = TraceParser(workdir / "w.trace").parse()
    assert trace.n == 7

    result = retrograph("verify", "w.trace", "-k", "approx-msf", "--epsilon", "1/2", cwd=workdir)
    assert result.returncode == 0, result.stderr


def test_verify_mismatch_exits_1(workdir):
    """Test that a wrong expect line fails verification."""
    (workdir / "bad.trace").write_text(
        "retrograph-trace v1 n=3\n"
        "create insert 0 1 @ 5\n"
        "query conn 0 1 @ now\n"
        "expect 0 false\n"
    )

    result = retrograph("verify", "bad.trace", "-k", "full-conn", cwd=workdir)

    assert result.returncode == 1
    assert "✗ full-conn" in result.stderr
    assert "expect says 'false'" in result.stderr


@pytest.mark.parametrize("content,args,message", [
    ("retrograph-trace v1 n=2\ncreate insert 0 1 w=3 @ 5\ncreate insert 0 1 w=4 @ 9\n", ["run"], "line 3"),
    ("retrograph-trace v1 n=2\nquery triangles @ now\n", ["run"], "unknown query kind"),
    ("retrograph-trace v1 n=3\nquery msfweight @ now\n", ["run", "-k", "inc-conn"], "does not answer"),
    ("retrograph-trace v1 n=3\ncreate insert 0 1 @ 2\ncreate delete 0 1 @ 4\nquery conn 0 1 @ now\n",
     ["verify", "-k", "inc-conn"], "inserts only"),
])
def test_errors_exit_2(workdir, content, args, message):
    """Test parse, legality and compatibility errors."""
    (workdir / "err.trace").write_text(content)

    result = retrograph(args[0], "err.trace", *args[1:], cwd=workdir)

    assert result.returncode == 2
    assert message in result.stderr


def test_unknown_kind_exits_2(workdir):
    """Test that an unregistered kind is refused."""
    (workdir / "t.trace").write_text("retrograph-trace v1 n=2\n")
    result = retrograph("run", "t.trace", "-k", "splay", cwd=workdir)
    assert result.returncode == 2


def test_bench_writes_report(workdir):
    """Test three repetitions produce three blocks per kind."""
    retrograph("gen", "omv-conn", "-n", "4", "-o", "conn.trace", cwd=workdir)

    result = retrograph("bench", "conn.trace", "-k", "full-conn", "-k", "oracle", "-r", "3",
                        "--report", "report.yaml", cwd=workdir)

    assert result.returncode == 0, result.stderr
    data = yaml.safe_load((workdir / "report.yaml").read_text())
    blocks = [(r["kind"], r["repetition"]) for r in data["runs"]]
    assert blocks == [("full-conn", i) for i in range(3)] + [("oracle", i) for i in range(3)]
    assert all(r["trace"] == "conn.trace" for r in data["runs"])
    assert data["runs"][0]["operations"]["query"]["count"] > 0
    assert "Appended 6 block(s)" in result.stderr


@pytest.mark.parametrize("name", ["retro.trace", "identity-conn.trace"])
def test_example_traces_verify(name):
    """Test the hand-written traces shipped in example-retro/."""
    example_dir = ROOT / "example-retro"

    result = retrograph("verify", name, cwd=example_dir)

    assert result.returncode == 0, result.stderr
    assert "✗" not in result.stderr
