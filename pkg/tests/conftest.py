import pytest

# Filled by test_acceptance.py: (criterion number, passed, detail); 5.5 is the
# strict-tolerance variant of criterion 5.
ACCEPTANCE: list[tuple[int, bool, str]] = []


def pytest_addoption(parser):
    parser.addoption("--runslow", action="store_true", help="run long searches (minutes to hours)")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--runslow"):
        return
    skip = pytest.mark.skip(reason="needs --runslow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n, ok, detail in sorted(ACCEPTANCE):
        label = f"{n:4.1f}" if n != int(n) else f"{int(n):4d}"
        terminalreporter.write_line(f"criterion {label}: {'PASS' if ok else 'FAIL'}  {detail}")
