"""Physical scenario description and flow-regime checks.

Units are fixed: lengths in micrometers, times in seconds, so velocities are
um/s and diffusion coefficients um^2/s.
"""

import math
from dataclasses import dataclass

from .errors import DomainError, ValidationError

__all__ = ["Scenario", "RegimeReport", "reynolds", "peclet", "validate_regime"]

LAMINAR_REYNOLDS_LIMIT = 2000.0
DEFAULT_PE_THRESHOLD = 10.0


@dataclass(frozen=True)
class Scenario:
    """One channel configuration.

    rho: tube radius, um
    v: axial flow velocity, um/s
    d_coef: diffusion coefficient, um^2/s
    d1, d2: axial start/end of the absorbing ring, um
    n_emit: number of molecules released at the origin
    kin_visc: kinematic viscosity, um^2/s (default: water)

    d_coef = 0 and d2 = d1 are accepted as degenerate closures (no diffusion,
    zero-width ring); the simulator handles them, the series model does not.
    """

    rho: float
    v: float
    d_coef: float
    d1: float
    d2: float
    n_emit: int = 1000
    kin_visc: float = 1.0e6

    def violations(self):
        out = []
        for name in ("rho", "v", "d_coef", "d1", "d2", "kin_visc"):
            if not math.isfinite(getattr(self, name)):
                out.append(f"{name} must be finite")
        if out:
            return out
        if self.rho <= 0.0:
            out.append(f"rho must be > 0, got {self.rho}")
        if self.v <= 0.0:
            out.append(f"v must be > 0, got {self.v}")
        if self.d_coef < 0.0:
            out.append(f"d_coef must be >= 0, got {self.d_coef}")
        if self.d1 <= 0.0:
            out.append(f"d1 must be > 0, got {self.d1}")
        if self.d2 < self.d1:
            out.append(f"d2 must be >= d1, got d1={self.d1}, d2={self.d2}")
        if self.n_emit < 1:
            out.append(f"n_emit must be >= 1, got {self.n_emit}")
        if self.kin_visc <= 0.0:
            out.append(f"kin_visc must be > 0, got {self.kin_visc}")
        return out

    def __post_init__(self):
        bad = self.violations()
        if bad:
            raise ValidationError(bad)

    @property
    def ring_length(self):
        return self.d2 - self.d1


@dataclass(frozen=True)
class RegimeReport:
    reynolds: float
    peclet: float
    laminar: bool
    flow_dominated: bool


def reynolds(s):
    """Re = rho v / kin_visc."""
    return s.rho * s.v / s.kin_visc


def peclet(s):
    """Pe = rho v / d_coef (inf for the zero-diffusion closure)."""
    if s.d_coef == 0.0:
        return math.inf
    return s.rho * s.v / s.d_coef


def validate_regime(s, pe_threshold=DEFAULT_PE_THRESHOLD):
    """Classify the scenario; callers should treat bad regimes as warnings.

    flow_dominated uses an inclusive comparison: Pe == pe_threshold counts.
    """
    if not (pe_threshold > 0.0):
        raise DomainError(f"pe_threshold must be > 0, got {pe_threshold!r}")
    bad = s.violations()
    if bad:
        raise ValidationError(bad)
    re = reynolds(s)
    pe = peclet(s)
    return RegimeReport(
        reynolds=re,
        peclet=pe,
        laminar=re < LAMINAR_REYNOLDS_LIMIT,
        flow_dominated=pe >= pe_threshold,
    )
