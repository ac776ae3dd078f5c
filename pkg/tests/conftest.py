import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from acceptance_log import ACCEPTANCE  # noqa: E402


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, passed, detail in sorted(ACCEPTANCE):
        flag = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"[{flag}] {number:>2}. {title}: {detail}")


@pytest.fixture
def rng():
    return np.random.default_rng(20220117)
