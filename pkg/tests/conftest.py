import numpy as np
import pytest

from mimocov.monte_carlo import run_coverage
from mimocov.network_sim import SimConfig

ACCEPTANCE_LINES = []

GRID_DB = np.linspace(-10.0, 30.0, 20)


def record_acceptance(criterion, ok, detail):
    line = f"criterion {criterion}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def grid_20():
    return 10.0 ** (GRID_DB / 10.0)


@pytest.fixture(scope="session")
def dl_campaign(grid_20):
    """1e5-sample asymptotic downlink campaign at alpha = 4, seed 0."""
    cfg = SimConfig(mode="asymptotic_dl", alpha=4.0, n_samples=100_000, seed=0)
    return run_coverage(cfg, grid_20, keep_samples=True)


@pytest.fixture(scope="session")
def ul_campaign(grid_20):
    # A different seed: with a shared seed the uplink draws coincide with the downlink ones.
    cfg = SimConfig(mode="uplink", alpha=4.0, n_samples=100_000, seed=1)
    return run_coverage(cfg, grid_20, keep_samples=True)


@pytest.fixture(scope="session")
def dl_samples(dl_campaign):
    return np.sort(dl_campaign.samples), dl_campaign.rejected_count
