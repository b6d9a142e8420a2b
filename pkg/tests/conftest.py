import pytest

from nctlab.data import generate_blobs
from nctlab.noise import corrupt_symmetric_exclusive
from nctlab.schedules import ScheduleParams
from nctlab.trainer import TrainConfig


def noisy_blobs(seed, n=2000, rate=0.4, separation=3.0):
    """The desk-scale benchmark: 2-D, 2-class blobs with symmetric-exclusive noise."""
    clean = generate_blobs(n, 2, 2, separation, seed)
    return corrupt_symmetric_exclusive(clean, rate, seed), generate_blobs(2000, 2, 2, separation, 1000 + seed)


def small_config(method, epochs=6, **kw):
    sched = ScheduleParams.for_epochs(epochs, **kw.pop("schedule", {}))
    kw.setdefault("layer_dims", (2, 8, 2))
    kw.setdefault("batch_size", 32)
    return TrainConfig(method=method, schedule=sched, **kw)


@pytest.fixture
def tiny_noisy():
    ds, test = noisy_blobs(0, n=256)
    return ds, test.subset(slice(0, 256))


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = {}


def record_criterion(number, passed, detail):
    ACCEPTANCE_LINES[number] = f"[{'PASS' if passed else 'FAIL'}] criterion {number:>2}: {detail}"


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[n])
