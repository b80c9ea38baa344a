import pytest

_ACCEPTANCE: list[tuple[str, str, float]] = []


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    label = getattr(item.function, "criterion", None)
    if label is None or rep.when != "call":
        return
    _ACCEPTANCE.append((label, "PASS" if rep.passed else "FAIL", rep.duration))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for label, verdict, seconds in sorted(_ACCEPTANCE):
        terminalreporter.write_line(f"{verdict} {label} ({seconds:.2f} s)")
