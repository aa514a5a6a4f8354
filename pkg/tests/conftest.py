from pathlib import Path

import numpy as np
import pytest

from edgeplan import ActivationMatrix, DeviceProfile, PlannerConfig, StudentArch

DATA = Path(__file__).parent / "data"


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def fixture_instance():
    """Two fast and two slow devices, two planted filter blocks, two students.

    Only the fast pair can hold the large student. Grouping by capacity with
    d_th = 6e6 separates the pairs; p_out 0.4 needs two replicas (0.16 <= 0.25).
    """
    devices = [
        DeviceProfile("a", 20e6, 2.0e6, 1000.0, 0.4),
        DeviceProfile("b", 25e6, 2.5e6, 1000.0, 0.4),
        DeviceProfile("c", 4e6, 0.5e6, 1000.0, 0.4),
        DeviceProfile("d", 5e6, 0.6e6, 1000.0, 0.4),
    ]
    acts = ActivationMatrix(np.array([[3.0, 1, 2, 0, 0, 0], [0, 0, 0, 3, 1, 2]]))
    students = [
        StudentArch("small", 10e6, 0.4e6, 1000.0),
        StudentArch("large", 40e6, 1.5e6, 1000.0),
    ]
    cfg = PlannerConfig(d_th=6e6, p_th=0.25, seed=0)
    return devices, acts, students, cfg


# Hand value: slow group runs "small" (min(10/4 + 1, 10/5 + 1) = 3.0 s),
# fast group runs "large" (min(40/20 + 1, 40/25 + 1) = 2.6 s); the max is 3.0 s.
FIXTURE_LATENCY = 3.0


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
