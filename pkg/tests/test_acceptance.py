"""Acceptance gate: every release criterion, one test per check.

Each check function owns its tolerances and sample sizes; this file just
runs them and reports one pass/fail line apiece. Run with ``-s`` (or read
captured output on failure) to see the numeric details.
"""

import pytest

from witnesskit import selfcheck

NAMES = [name for name, _ in selfcheck.CHECKS]
FNS = dict(selfcheck.CHECKS)


@pytest.mark.parametrize("name", NAMES)
def test_criterion(name):
    passed, detail = FNS[name]()
    print(f"[{'PASS' if passed else 'FAIL'}] {name}: {detail}")
    assert passed, f"{name}: {detail}"
