import numpy as np
import pytest

from fst.asymptotics import AsymptoticData
from fst.errors import ScheduleExhausted
from fst.solver import SolverConfig, solve_conditional, solve_global
from fst.trajectory import Trajectory, TrajectoryPair

FAMILY = [-100.0, -200.0, -400.0, -800.0]


def line(x0, v, start=-20.0, end=20.0, step=0.5, **kw):
    """Uniform motion x0 + v*t sampled on a grid, tail on the same line."""
    return Trajectory.from_function(lambda t: (x0 + v * t, v + 0 * t), start, end, step, **kw)


def family_run(data, schedule=FAMILY, **kw):
    cfg = SolverConfig(T_schedule=schedule, tol_global=1e-12, **kw)
    try:
        return solve_global(data, cfg)
    except ScheduleExhausted as e:
        return e.run


@pytest.fixture(scope="session")
def sym_data():
    return AsymptoticData(1.0, -1.0, -0.4, 0.4, 1.0, 1.0)


@pytest.fixture(scope="session")
def asym_data():
    return AsymptoticData(1.0, -1.0, -0.3, 0.5, 1.0, 2.0)


@pytest.fixture(scope="session")
def static_pair():
    return TrajectoryPair(line(1.0, 0.0), line(-1.0, 0.0), 1.0, 1.0)


@pytest.fixture(scope="session")
def linear_pair():
    # a = 1 at rest, b = -1 + t/2
    return TrajectoryPair(line(1.0, 0.0, end=3.0, step=0.25), line(-1.0, 0.5, end=3.0, step=0.25))


@pytest.fixture(scope="session")
def sym_T200(sym_data):
    return solve_conditional(sym_data, -200.0, SolverConfig())


@pytest.fixture(scope="session")
def sym_family(sym_data):
    return family_run(sym_data)


@pytest.fixture(scope="session")
def asym_family(asym_data):
    return family_run(asym_data)


@pytest.fixture(scope="session")
def sym_report(sym_family, sym_data):
    from fst.diagnostics import run_all
    return run_all(sym_family, sym_data)


@pytest.fixture(scope="session")
def asym_report(asym_family, asym_data):
    from fst.diagnostics import run_all
    return run_all(asym_family, asym_data)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
