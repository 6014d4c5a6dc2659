import math

import pytest

from polarforge.index import ChannelSpec


def awgn_for_llr(L):
    """AWGN channel whose initial LLR mean is ``L``."""
    return ChannelSpec.awgn(math.sqrt(2.0 / L))


@pytest.fixture
def below_half_pi():
    return 0.999 * math.pi / 2


@pytest.fixture
def below_pi():
    return 0.999 * math.pi


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(mod.REPORT, key=lambda s: int(s.split()[2].rstrip(":"))):
        terminalreporter.write_line(line)
