"""Error metrics between a theoretical response curve (test data) and a
simulated one (reference data), plus the grid alignment that produces the
compared pair."""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, UndefinedMetricError

__all__ = [
    "CurvePair",
    "rmse",
    "nmse",
    "nrmse",
    "align",
    "write_metrics_csv",
    "read_metrics_csv",
    "METRICS_HEADER",
]

METRICS_HEADER = "example_id,rmse,nmse,nrmse,n_samples,seed"


@dataclass(frozen=True)
class CurvePair:
    """Aligned samples: test values x_i (theory) and reference values y_i
    (simulation) on one common ascending grid."""

    times: np.ndarray
    test: np.ndarray
    reference: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        x = np.asarray(self.test, dtype=float)
        y = np.asarray(self.reference, dtype=float)
        if t.ndim != 1 or t.size < 2 or x.shape != t.shape or y.shape != t.shape:
            raise DomainError("curve pair needs equal-length 1-d arrays, length >= 2")
        if not (np.isfinite(t).all() and np.isfinite(x).all() and np.isfinite(y).all()):
            raise DomainError("curve pair entries must be finite")
        if not (np.diff(t) > 0.0).all():
            raise DomainError("times must be strictly increasing")
        for name, arr in (("times", t), ("test", x), ("reference", y)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self):
        return self.times.size


def rmse(p):
    """Root-mean-square difference between test and reference."""
    d = p.test - p.reference
    return float(math.sqrt(np.mean(d * d)))


def _error_ratio(p):
    y = p.reference
    denom = float(np.sum((y - y.mean()) ** 2))
    # the mean of identical entries need not be exact, so test constancy too
    if denom == 0.0 or np.all(y == y[0]):
        raise UndefinedMetricError(
            "reference curve is constant; NMSE/NRMSE are undefined"
        )
    num = float(np.sum((p.test - y) ** 2))
    return num / denom


def nmse(p):
    """1 - sum((x-y)^2) / sum((y-ybar)^2); closer to one is a better fit."""
    return 1.0 - _error_ratio(p)


def nrmse(p):
    """1 - sqrt of the NMSE error ratio, so nrmse = 1 - sqrt(1 - nmse)."""
    return 1.0 - math.sqrt(_error_ratio(p))


def align(theory, sim, grid_step=0.01):
    """Sample the analytic curve and the empirical CDF onto {k*grid_step}.

    Theory is linearly interpolated; the simulation CDF is looked up
    right-continuously from the raw absorption times.
    """
    if not (grid_step > 0.0):
        raise DomainError(f"grid_step must be > 0, got {grid_step!r}")
    n = int(math.floor(sim.horizon / grid_step + 1e-9))
    if n < 1:
        raise DomainError("grid_step larger than the simulated horizon")
    grid = np.arange(n + 1) * grid_step
    tol = 1e-9 * max(1.0, sim.horizon)
    if grid[0] < theory.times[0] - tol or grid[-1] > theory.times[-1] + tol:
        raise DomainError(
            f"grid [0, {grid[-1]}] exceeds the theory curve domain "
            f"[{theory.times[0]}, {theory.times[-1]}]"
        )
    test = np.interp(grid, theory.times, theory.values)
    reference = sim.cdf_at(grid)
    return CurvePair(times=grid, test=test, reference=reference)


def write_metrics_csv(rows, path):
    """rows: iterables of (example_id, rmse, nmse, nrmse, n_samples, seed)."""
    with open(path, "w", newline="\n") as f:
        f.write(METRICS_HEADER + "\n")
        for ex_id, r, nm, nr, ns, seed in rows:
            f.write(f"{ex_id},{r:.9g},{nm:.9g},{nr:.9g},{ns},{seed}\n")


def read_metrics_csv(path):
    rows = []
    with open(path, "r") as f:
        header = f.readline().strip()
        if header != METRICS_HEADER:
            raise DomainError(f"unexpected header {header!r} in {path}")
        for line in f:
            line = line.strip()
            if not line:
                continue
            ex_id, r, nm, nr, ns, seed = line.split(",")
            rows.append((ex_id, float(r), float(nm), float(nr), int(ns), int(seed)))
    return rows
