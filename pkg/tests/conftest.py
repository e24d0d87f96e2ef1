import numpy as np
import pytest

from opensetpad import corpus
from opensetpad._backend import HAS_NUMBA, use_backend

ACCEPTANCE_LINES: list[str] = []

BACKENDS = ["numpy"] + (["numba"] if HAS_NUMBA else [])


@pytest.fixture(scope="session")
def corpus_records():
    """Full NIR + VIS corpus fixture (112,224 records)."""
    return corpus.corpus_manifest()


@pytest.fixture(scope="session")
def nir_records(corpus_records):
    return [r for r in corpus_records if r.spectrum == "NIR"]


@pytest.fixture(scope="session")
def small_records():
    """Every corpus cell shrunk 100x; same structure, fast to partition."""
    return corpus.corpus_manifest(scale=0.01)


@pytest.fixture(params=BACKENDS)
def backend(request):
    with use_backend(request.param):
        yield request.param


@pytest.fixture
def rs():
    return np.random.default_rng(20240611)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
