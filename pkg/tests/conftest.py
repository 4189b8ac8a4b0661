"""Shared fixtures: heat runs reused by the energy and acceptance modules.

The heat run (p = 2, f = 0, one component, periodic unit cube) is the
cheapest completed RunRecord that every cylinder-energy check accepts.
The matching parameter tuple declares w = 1: any w bounds f = 0, and
w = 1 drops the s-floor p - 2w - 2 to -2, below the -lam/Lam floor,
so the s0 = 0 seed is admissible.
"""

import numpy as np
import pytest

from gradbound import (
    Boundary,
    Field,
    FluxKind,
    FluxSpec,
    Grid,
    Prescribed,
    ProblemParams,
    RandomSmooth,
    RhsKind,
    RhsSpec,
    RunRecord,
    RunStatus,
    SolveConfig,
    StatusKind,
    node_coords,
    run,
)


def prescribed_record(grid: Grid, sample, times, N: int = 1) -> RunRecord:
    """RunRecord whose snapshots are sample(x, t) at the given times, no solve.

    sample maps node coordinates (*node_shape, n) and a time to (*node_shape, N).
    """
    x = node_coords(grid)
    snaps = [Field(grid, np.asarray(sample(x, t), dtype=np.float64), t) for t in times]
    config = SolveConfig(
        grid=grid,
        flux=FluxSpec(FluxKind.PURE_P_LAPLACE, 2.0),
        rhs=RhsSpec(RhsKind.ZERO),
        initial=Prescribed(snaps[0].values),
        N=N,
        t_end=float(times[-1]),
        snapshot_count=max(64, len(times)),
    )
    return RunRecord(config, snaps, np.diff(np.asarray(times, dtype=np.float64)),
                     RunStatus(StatusKind.COMPLETED))


def heat_config(cells: int, t_end: float = 0.1, snapshot_count: int = 80) -> SolveConfig:
    grid = Grid(3, (1.0, 1.0, 1.0), (cells,) * 3, Boundary.PERIODIC)
    return SolveConfig(
        grid=grid,
        flux=FluxSpec(FluxKind.PURE_P_LAPLACE, 2.0),
        rhs=RhsSpec(RhsKind.ZERO),
        initial=RandomSmooth(seed=0, amplitude=1.0, modes=2),
        N=1,
        t_end=t_end,
        snapshot_count=snapshot_count,
    )


@pytest.fixture(scope="session")
def heat_params() -> ProblemParams:
    return ProblemParams(n=3, N=1, p=2.0, w=1.0, s0=0.0)


@pytest.fixture(scope="session")
def heat_run_16():
    return run(heat_config(16))


@pytest.fixture(scope="session")
def heat_run_32():
    return run(heat_config(32))
