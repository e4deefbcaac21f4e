import numpy as np
import pytest

from gpuslice import PAPER_AGENTS, PAPER_RATES, T4_GPU
from gpuslice.config import bundled_config_path, load_config
from gpuslice.workload import constant_trace

ACCEPTANCE_LINES = []


@pytest.fixture
def paper_agents():
    return PAPER_AGENTS


@pytest.fixture
def paper_trace():
    return constant_trace(PAPER_RATES, 100)


@pytest.fixture
def paper_cfg():
    return load_config(bundled_config_path())


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def record_criterion():
    def _record(label, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] {label}" + (f" :: {detail}" if detail else "")
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok
    return _record


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
