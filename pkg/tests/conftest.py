import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from kdvlab import (
    FrequencyGrid,
    InitialDataSpec,
    MultiplierParams,
    SolverConfig,
    make_initial_data,
    run,
)


@pytest.fixture(scope="session")
def params_std() -> MultiplierParams:
    return MultiplierParams(s=-1.0 / 24.0, N=16.0)


@pytest.fixture(scope="session")
def grid32() -> FrequencyGrid:
    return FrequencyGrid(L=2.0 * np.pi, M=32)


@pytest.fixture(scope="session")
def field32(grid32):
    spec = InitialDataSpec(kind="random-phase", hs_target=0.4, s=0.0,
                           seed=11, decay=1.2, band=(1, 10))
    return make_initial_data(spec, grid32)


@pytest.fixture(scope="session")
def short_run(field32):
    """One short nonlinear trajectory shared by the solver/energy tests.

    dt and t_end are small enough that the run takes well under a second
    but long enough that the energies move measurably.
    """
    cfg = SolverConfig(dt=2.0e-4, t_end=0.01, observe_stride=1)
    return run(field32, cfg)
