"""The invariant suite itself: deterministic and fully green."""

from acfv import validation


def test_run_all_passes():
    checks = validation.run_all()
    assert checks
    assert all(c.passed for c in checks), "\n".join(
        c.line() for c in checks if not c.passed)


def test_suite_is_deterministic():
    first = [(c.name, c.passed, c.detail) for c in validation.run_all(seed=7)]
    second = [(c.name, c.passed, c.detail) for c in validation.run_all(seed=7)]
    assert first == second


def test_check_line_format():
    line = validation.CheckResult("demo", True, "ok").line()
    assert line == "[PASS] demo: ok"
