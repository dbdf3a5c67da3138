"""Built-in benchmark sweep: six reference channel configurations with
published Re, Pe and NRMSE values that the reproduce command checks against.

All six share a 20 um ring (d2 = d1 + 20) and 1000 emitted molecules.
"""

import dataclasses
import time
from dataclasses import dataclass

import numpy as np

from . import analytic, mcsim, metrics
from .scenario import Scenario, peclet, reynolds

__all__ = [
    "Benchmark",
    "BenchmarkRow",
    "BENCHMARKS",
    "RE_EXPECTED",
    "PE_EXPECTED",
    "NRMSE_EXPECTED",
    "NRMSE_TOLERANCE",
    "PE_TOLERANCE",
    "run_benchmark",
    "run_all",
]


@dataclass(frozen=True)
class Benchmark:
    example_id: str
    scenario: Scenario
    expected_re: float
    expected_pe: float
    expected_nrmse: float


def _scn(rho, v, d_coef, d1):
    return Scenario(rho=rho, v=v, d_coef=d_coef, d1=d1, d2=d1 + 20.0, n_emit=1000)


BENCHMARKS = (
    Benchmark("ex1", _scn(10.0, 1000.0, 700.0, 2000.0), 0.01, 14.2857, 0.9824),
    Benchmark("ex2", _scn(10.0, 2000.0, 400.0, 2000.0), 0.02, 50.0, 0.9610),
    Benchmark("ex3", _scn(10.0, 3000.0, 100.0, 2000.0), 0.03, 300.0, 0.9848),
    Benchmark("ex4", _scn(20.0, 1000.0, 700.0, 3000.0), 0.02, 28.5714, 0.9488),
    Benchmark("ex5", _scn(20.0, 2000.0, 400.0, 3000.0), 0.04, 100.0, 0.9518),
    Benchmark("ex6", _scn(20.0, 3000.0, 100.0, 3000.0), 0.06, 600.0, 0.9600),
)

RE_EXPECTED = tuple(b.expected_re for b in BENCHMARKS)
PE_EXPECTED = tuple(b.expected_pe for b in BENCHMARKS)
NRMSE_EXPECTED = tuple(b.expected_nrmse for b in BENCHMARKS)

NRMSE_TOLERANCE = 0.05
PE_TOLERANCE = 1e-4


@dataclass(frozen=True)
class BenchmarkRow:
    example_id: str
    re: float
    pe: float
    nrmse: float
    expected_re: float
    expected_pe: float
    expected_nrmse: float
    rmse: float
    nmse: float
    n_samples: int
    seed: int
    wall_time_s: float

    @property
    def re_ok(self):
        return self.re == self.expected_re

    @property
    def pe_ok(self):
        return abs(self.pe - self.expected_pe) <= PE_TOLERANCE

    @property
    def nrmse_ok(self):
        return abs(self.nrmse - self.expected_nrmse) <= NRMSE_TOLERANCE

    @property
    def passed(self):
        return self.re_ok and self.pe_ok and self.nrmse_ok


def run_benchmark(bench, sim_cfg, trunc=None, grid_step=0.01,
                  quad_tol=analytic.DEFAULT_QUAD_TOL):
    """Run one benchmark end to end.

    Returns (row, artifacts) where artifacts holds the theory curve, the
    ensemble and the aligned pair for callers that want to serialize them.
    """
    t0 = time.perf_counter()
    s = bench.scenario
    if trunc is None:
        trunc = analytic.Truncation()
    model = analytic.SeriesModel(s, trunc)
    n = int(np.floor(sim_cfg.horizon / grid_step + 1e-9))
    grid = np.arange(n + 1) * grid_step
    theory = analytic.arrival_probability(model, grid, quad_tol)
    ensemble = mcsim.run_ensemble(s, sim_cfg)
    pair = metrics.align(theory, ensemble, grid_step)
    row = BenchmarkRow(
        example_id=bench.example_id,
        re=reynolds(s),
        pe=peclet(s),
        nrmse=metrics.nrmse(pair),
        expected_re=bench.expected_re,
        expected_pe=bench.expected_pe,
        expected_nrmse=bench.expected_nrmse,
        rmse=metrics.rmse(pair),
        nmse=metrics.nmse(pair),
        n_samples=len(pair),
        seed=sim_cfg.seed,
        wall_time_s=time.perf_counter() - t0,
    )
    artifacts = {"theory": theory, "ensemble": ensemble, "pair": pair, "model": model}
    return row, artifacts


def run_all(sim_cfg, trunc=None, grid_step=0.01,
            quad_tol=analytic.DEFAULT_QUAD_TOL, progress=None):
    """Run every benchmark; each example gets its own derived seed.

    Returns (rows, artifacts_by_id).
    """
    rows = []
    artifacts = {}
    for idx, bench in enumerate(BENCHMARKS):
        cfg = dataclasses.replace(sim_cfg, seed=sim_cfg.seed + idx)
        row, art = run_benchmark(bench, cfg, trunc, grid_step, quad_tol)
        rows.append(row)
        artifacts[bench.example_id] = art
        if progress is not None:
            progress(row)
    return rows, artifacts


SUMMARY_HEADER = (
    "example_id,re,pe,nrmse,expected_re,expected_pe,expected_nrmse,"
    "rmse,nmse,n_samples,seed,status"
)


def write_summary_csv(rows, path):
    with open(path, "w", newline="\n") as f:
        f.write(SUMMARY_HEADER + "\n")
        for r in rows:
            status = "ok" if r.passed else "fail"
            f.write(
                f"{r.example_id},{r.re:.9g},{r.pe:.9g},{r.nrmse:.9g},"
                f"{r.expected_re:.9g},{r.expected_pe:.9g},{r.expected_nrmse:.9g},"
                f"{r.rmse:.9g},{r.nmse:.9g},{r.n_samples},{r.seed},{status}\n"
            )


def read_summary_csv(path):
    rows = []
    with open(path, "r") as f:
        header = f.readline().strip()
        if header != SUMMARY_HEADER:
            raise ValueError(f"unexpected header {header!r} in {path}")
        for line in f:
            line = line.strip()
            if not line:
                continue
            parts = line.split(",")
            rows.append(
                {
                    "example_id": parts[0],
                    "re": float(parts[1]),
                    "pe": float(parts[2]),
                    "nrmse": float(parts[3]),
                    "expected_re": float(parts[4]),
                    "expected_pe": float(parts[5]),
                    "expected_nrmse": float(parts[6]),
                    "rmse": float(parts[7]),
                    "nmse": float(parts[8]),
                    "n_samples": int(parts[9]),
                    "seed": int(parts[10]),
                    "status": parts[11],
                }
            )
    return rows
