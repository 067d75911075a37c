import pytest

from imextinction.keyrate import ChannelProfile
from imextinction.state_model import ExtinctionModel

# Stand-in long-distance fiber test bed (same numbers as profiles/example.profile).
EXAMPLE = dict(y0=1.7e-6, eta_bob=0.045, alpha_fiber=0.21, e_detect=0.033, mu=0.48, q=0.5, f_ec=1.22)


@pytest.fixture
def example_profile():
    return ChannelProfile(**EXAMPLE)


@pytest.fixture
def em500():
    return ExtinctionModel(500.0)


@pytest.fixture
def perfect():
    return ExtinctionModel.perfect()


# Acceptance results: (criterion id, passed, detail), filled by test_acceptance.py.
ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for cid, ok, detail in sorted(ACCEPTANCE_RESULTS, key=lambda t: t[0]):
        terminalreporter.write_line(f"criterion {cid}: {'PASS' if ok else 'FAIL'}  {detail}")
