from pathlib import Path

import numpy as np
import pytest

from qwmix import io
from qwmix.chains import StochasticMatrix, stationary_distribution

DATA_CHAIN = Path(__file__).resolve().parents[1] / "src" / "qwmix" / "data" / "chain12.txt"


@pytest.fixture(scope="session")
def chain12_path() -> Path:
    return DATA_CHAIN


@pytest.fixture(scope="session")
def chain12() -> StochasticMatrix:
    return io.read_chain(DATA_CHAIN)


@pytest.fixture(scope="session")
def chain12_pi(chain12):
    return stationary_distribution(chain12)


@pytest.fixture
def run_cli(capsys):
    """Invoke the CLI in-process; returns (exit_code, stdout, stderr)."""
    from qwmix import cli

    def _run(*args):
        code = cli.main([str(a) for a in args])
        captured = capsys.readouterr()
        return code, captured.out, captured.err

    return _run


def two_state_uniform() -> StochasticMatrix:
    return StochasticMatrix(np.array([[0.5, 0.5], [0.5, 0.5]]))
