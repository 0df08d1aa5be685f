import pytest

# criterion number -> (passed, note); filled by the acceptance tests
CRITERIA = {}


def record(n: int, passed: bool, note: str = "") -> None:
    CRITERIA[n] = (passed, note)
    print(f"criterion {n}: {'PASS' if passed else 'FAIL'} {note}".rstrip())


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        ok, note = CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} {note}".rstrip())


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: runs the full corpus or another long search")
