import os
import sys
import warnings

import pytest

sys.path.insert(0, os.path.dirname(__file__))

DATA = os.path.join(os.path.dirname(__file__), os.pardir, "src", "catflow", "data")


@pytest.fixture
def data_dir():
    return os.path.abspath(DATA)


@pytest.fixture(autouse=True)
def _quiet_name_conflicts():
    from catflow.composition import NameConflictWarning

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", NameConflictWarning)
        yield


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.line(n))
