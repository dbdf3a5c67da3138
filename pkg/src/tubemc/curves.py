"""Time-series container shared by the analytic model and the simulator,
plus its CSV wire format (header `t,value,kind`, 9 significant digits)."""

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError

__all__ = ["ResponseCurve", "CURVE_KINDS", "write_response_csv", "read_response_csv"]

CURVE_KINDS = ("arrival_probability", "arrival_rate", "survival")


@dataclass(frozen=True)
class ResponseCurve:
    """Values of one response quantity on an ascending time grid.

    kind is one of arrival_probability, arrival_rate, survival. For
    arrival_probability the values are expected to stay in [-eps_trunc, 1]
    and be nondecreasing up to eps_trunc (see analytic.Truncation); that is
    a property of correct inputs, asserted by tests rather than enforced here
    so truncated-series artifacts stay observable.
    """

    times: np.ndarray
    values: np.ndarray
    kind: str = field(default="arrival_probability")

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if self.kind not in CURVE_KINDS:
            raise DomainError(f"kind must be one of {CURVE_KINDS}, got {self.kind!r}")
        if t.ndim != 1 or v.ndim != 1 or t.shape != v.shape:
            raise DomainError("times and values must be 1-d and of equal length")
        if t.size == 0:
            raise DomainError("curve must contain at least one sample")
        if not np.isfinite(t).all() or not np.isfinite(v).all():
            raise DomainError("times and values must be finite")
        if t.size > 1 and not (np.diff(t) > 0.0).all():
            raise DomainError("times must be strictly increasing")
        t.setflags(write=False)
        v.setflags(write=False)
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.times.size


def write_response_csv(curve, path):
    with open(path, "w", newline="\n") as f:
        f.write("t,value,kind\n")
        for t, v in zip(curve.times, curve.values):
            f.write(f"{t:.9g},{v:.9g},{curve.kind}\n")


def read_response_csv(path):
    times, values, kinds = [], [], set()
    with open(path, "r") as f:
        header = f.readline().strip()
        if header != "t,value,kind":
            raise DomainError(f"unexpected header {header!r} in {path}")
        for line in f:
            line = line.strip()
            if not line:
                continue
            t, v, k = line.split(",")
            times.append(float(t))
            values.append(float(v))
            kinds.add(k)
    if len(kinds) != 1:
        raise DomainError(f"expected exactly one curve kind in {path}, got {kinds}")
    return ResponseCurve(times=np.array(times), values=np.array(values), kind=kinds.pop())
