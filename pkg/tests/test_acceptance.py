"""Acceptance criteria 1-10, one test each, backed by the selftest groups.

Each test prints a single ``PASS``/``FAIL`` line; the same lines are repeated
in the pytest terminal summary. Run ``python3 tests/test_acceptance.py`` to
get only those lines.
"""

import sys

import pytest

from mpk import selftest

RESULTS = {}


def summary_line(result):
    status = "PASS" if result.passed else "FAIL"
    line = f"{status} acceptance {result.key} ({result.name}): {result.title} [{result.elapsed:.2f} s of {result.budget:g} s]"
    if result.error:
        line += f" error: {result.error}"
    failed = [c.label for c in result.checks if not c.passed]
    if failed:
        line += " failed checks: " + "; ".join(failed)
    return line


@pytest.mark.parametrize("key", list(selftest.GROUPS))
def test_acceptance(key):
    result = selftest.run_group(key, seed=0)
    line = summary_line(result)
    RESULTS[key] = line
    print(line)
    for check in result.checks:
        status = "PASS" if check.passed else "FAIL"
        print(f"    {status} {check.label}: {check.value:.6g} {check.relation} {check.tolerance:g}")
    assert result.passed, line


if __name__ == "__main__":
    ok = True
    for key in selftest.GROUPS:
        result = selftest.run_group(key, seed=0)
        print(summary_line(result))
        ok = ok and result.passed
    sys.exit(0 if ok else 1)
