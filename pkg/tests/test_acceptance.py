"""Acceptance run: one pass/fail line per criterion.

    pytest -s tests/test_acceptance.py      or      python3 tests/test_acceptance.py
"""

import sys

import pytest

from qdeq.acceptance import CRITERIA, run_criterion
from qdeq.config import RunConfig


def _report(res) -> str:
    lines = [res.line() + f" ({res.seconds:.1f}s)"]
    for c in res.failures():
        lines.append(f"    failed: {c.name}")
    return "\n".join(lines)


@pytest.mark.parametrize("k", sorted(CRITERIA))
def test_criterion(k, capsys):
    res = run_criterion(k, RunConfig())
    with capsys.disabled():
        print("\n" + _report(res))
    assert res.passed, [c.name for c in res.failures()]


if __name__ == "__main__":
    ok = True
    for k in sorted(CRITERIA):
        res = run_criterion(k, RunConfig())
        print(_report(res), flush=True)
        ok = ok and res.passed
    sys.exit(0 if ok else 1)
