import os
import sys
from pathlib import Path

import numpy as np
import pytest

from lognnet.mnist_io import default_data_dir, load_mnist

REPO = Path(__file__).resolve().parents[1]


def _data_dir():
    d = default_data_dir()
    if not d.is_absolute() and not d.exists():
        d = REPO / d
    return d


def _have_mnist():
    d = _data_dir()
    return any((d / f).exists() for f in ("t10k-images-idx3-ubyte", "t10k-images-idx3-ubyte.gz"))


requires_mnist = pytest.mark.skipif(not _have_mnist(),
                                    reason="MNIST IDX files not found (set LOGNNET_DATA)")


@pytest.fixture(scope="session")
def mnist():
    if not _have_mnist():
        pytest.skip("MNIST IDX files not found (set LOGNNET_DATA)")
    return load_mnist(_data_dir())


@pytest.fixture(scope="session")
def data_dir():
    return _data_dir()


@pytest.fixture
def rng():
    return np.random.default_rng(20200829)


@pytest.fixture
def random_inputs(rng):
    def make(n):
        y = rng.random((n, 785))
        y[:, 0] = 1.0
        return y
    return make


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "SUMMARY", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
