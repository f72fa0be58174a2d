import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

_RESULTS: dict[int, list[bool]] = {}
_DESCRIPTIONS: dict[int, str] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, description): acceptance criterion covered by a test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    num, desc = marker.args
    _DESCRIPTIONS[num] = desc
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        _RESULTS.setdefault(num, []).append(rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(_RESULTS):
        ok = all(_RESULTS[num])
        terminalreporter.write_line(f"criterion {num}: {'PASS' if ok else 'FAIL'}  {_DESCRIPTIONS[num]}")
