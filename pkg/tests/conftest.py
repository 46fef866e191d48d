import time
from pathlib import Path

import numpy as np
import pytest

from ovb_sense.io import DARFUR_CONTROLS, load_darfur
from ovb_sense.regress import Dataset, ModelSpec

FIXTURE_DIR = Path(__file__).parent / "fixtures"
ORACLE_DIR = FIXTURE_DIR / "oracle"
ORACLE_SEED = 12345
SUITE_BUDGET_S = 60.0

_acceptance: dict[str, tuple[str, str]] = {}
_started = [0.0]


@pytest.fixture(scope="session")
def darfur():
    data = load_darfur()
    spec = ModelSpec(
        "peacefactor",
        "directlyharmed",
        DARFUR_CONTROLS + tuple(data.dummy_names("village")),
    )
    return data.with_dummies("village"), spec


def random_dataset(rng: np.random.Generator, n: int, k: int, extra=("y", "d", "z")) -> Dataset:
    X = rng.standard_normal((n, k))
    cols = {f"x{i + 1}": X[:, i] for i in range(k)}
    for name in extra:
        cols[name] = X @ rng.uniform(-1, 1, k) + rng.standard_normal(n)
    return Dataset(cols)


# -- acceptance reporting ----------------------------------------------------

def pytest_sessionstart(session):
    _started[0] = time.perf_counter()


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if not name.startswith("test_ac"):
        return
    tag = name[len("test_"):].split("_")[0].upper()
    if report.when == "call":
        _acceptance[tag] = ("PASS" if report.passed else "FAIL", name)
    elif report.when == "setup" and report.skipped:
        _acceptance[tag] = ("N/A", name)
    elif report.failed:
        _acceptance[tag] = ("FAIL", name)


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    elapsed = time.perf_counter() - _started[0]
    if not _acceptance:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for tag in sorted(_acceptance, key=lambda t: int(t[2:])):
        status, name = _acceptance[tag]
        tr.write_line(f"{tag:<5} {status:<5} {name}")
    ok = elapsed < SUITE_BUDGET_S
    tr.write_line(
        f"{'AC9':<5} {'PASS' if ok else 'FAIL':<5} full suite wall time {elapsed:.1f}s "
        f"(budget {SUITE_BUDGET_S:.0f}s)"
    )


def pytest_sessionfinish(session, exitstatus):
    if time.perf_counter() - _started[0] >= SUITE_BUDGET_S and exitstatus == 0:
        session.exitstatus = 1
