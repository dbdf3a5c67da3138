"""Shared fixtures.

The expensive six-example reproduction run is session-scoped because three
acceptance criteria consume it (the table itself, the NRMSE range check, and
the monotonicity/bounds check on the emitted theory curves).
"""

import time
from types import SimpleNamespace

import pytest

import tubemc as tm
from tubemc import benchmarks, cli

# Table II scenarios (d2 = d1 + 20 um throughout)
EX1 = tm.Scenario(rho=10.0, v=1000.0, d_coef=700.0, d1=2000.0, d2=2020.0)
EX2 = tm.Scenario(rho=10.0, v=2000.0, d_coef=400.0, d1=2000.0, d2=2020.0)
EX3 = tm.Scenario(rho=10.0, v=3000.0, d_coef=100.0, d1=2000.0, d2=2020.0)
EX4 = tm.Scenario(rho=20.0, v=1000.0, d_coef=700.0, d1=3000.0, d2=3020.0)
EX5 = tm.Scenario(rho=20.0, v=2000.0, d_coef=400.0, d1=3000.0, d2=3020.0)
EX6 = tm.Scenario(rho=20.0, v=3000.0, d_coef=100.0, d1=3000.0, d2=3020.0)


@pytest.fixture(scope="session")
def table2_run(tmp_path_factory):
    """One full `reproduce-table2` invocation at the acceptance settings.

    Defaults are dt=1e-5 s, 20 replications x 1000 molecules, seed 0,
    (10,10) truncation, early exit enabled.
    """
    out = tmp_path_factory.mktemp("table2")
    t0 = time.perf_counter()
    code = cli.main(["reproduce-table2", "--out", str(out)])
    wall = time.perf_counter() - t0
    rows = benchmarks.read_summary_csv(str(out / "reproduce_summary.csv"))
    return SimpleNamespace(out=out, wall=wall, exit_code=code, rows=rows)
