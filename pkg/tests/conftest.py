import os
import tempfile

# keep coefficient caches out of the home directory during tests
os.environ.setdefault("UMVUE_CACHE_DIR", tempfile.mkdtemp(prefix="umvue-cache-"))

import pytest


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    import test_acceptance

    if test_acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for name in sorted(test_acceptance.RESULTS):
            terminalreporter.write_line(test_acceptance.RESULTS[name])
