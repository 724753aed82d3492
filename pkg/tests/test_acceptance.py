"""End-to-end acceptance criteria 1-16.

The full suite runs once through the ``verify`` command in a subprocess; each
criterion then gets its own test and its own PASS/FAIL line in the terminal
summary.
"""

import re
import subprocess
import sys
import textwrap
import time

import pytest

from conftest import ACCEPTANCE_LINES

LINE = re.compile(r"^\[(PASS|FAIL)\]\s+(\d+)\s")
TIME_LIMIT = 300


@pytest.fixture(scope="module")
def verify_run():
    start = time.perf_counter()
    proc = subprocess.run(
        [sys.executable, "-m", "padic_schneider.cli", "verify"],
        capture_output=True,
        text=True,
        timeout=2 * TIME_LIMIT,
    )
    elapsed = time.perf_counter() - start
    lines = {}
    for line in proc.stdout.splitlines():
        m = LINE.match(line)
        if m:
            lines[int(m.group(2))] = (m.group(1) == "PASS", line)
    return proc, elapsed, lines


def _record(line):
    print(line)
    ACCEPTANCE_LINES.append(line)


@pytest.mark.parametrize("number", range(1, 16))
def test_criterion(verify_run, number):
    _, _, lines = verify_run
    assert number in lines, f"criterion {number} produced no result line"
    passed, line = lines[number]
    _record(line)
    assert passed, line


def test_criterion_16_verify_exits_zero_in_time(verify_run):
    proc, elapsed, lines = verify_run
    ok = proc.returncode == 0 and elapsed < TIME_LIMIT and len(lines) == 15
    mark = "PASS" if ok else "FAIL"
    _record(f"[{mark}] 16 cli        verify exit code {proc.returncode}, {len(lines)} criteria, {elapsed:.1f}s")
    assert ok, proc.stdout + proc.stderr


def test_tampered_constant_fails_verification():
    # shift the closed-form spectrum by 1e-6 and run the thermo group
    script = textwrap.dedent(
        """
        import sys
        from dataclasses import replace
        from padic_schneider import cli, thermo

        original = thermo.spectrum_full
        thermo.spectrum_full = lambda p, a: replace(original(p, a), dimension=original(p, a).dimension + 1e-6)
        sys.exit(cli.main(["verify", "--only", "thermo"]))
        """
    )
    proc = subprocess.run([sys.executable, "-c", script], capture_output=True, text=True, timeout=120)
    assert proc.returncode == 3, proc.stdout + proc.stderr
    assert "[FAIL]  1" in proc.stdout and "[FAIL]  2" in proc.stdout
