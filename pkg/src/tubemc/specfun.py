"""Special-function kernel: Bessel J0/J1, their zeros, the Gaussian Q-function,
and inverse-Gaussian first-passage primitives.

All functions are pure; root tables are computed once per process and cached.
"""

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy import special

from .errors import DomainError, NumericalError

__all__ = [
    "BesselRootTable",
    "InverseGaussianParams",
    "bessel_j",
    "bessel_root",
    "bessel_root_table",
    "q_function",
    "ig_pdf",
    "ig_cdf",
    "ig_tail",
    "ig_tilted_partial",
]


# ---------------------------------------------------------------------------
# Bessel functions and their zeros


def bessel_j(order, x):
    """J_order(x) for order 0 or 1, accurate to <= 1e-12 absolute for |x| <= 1e3."""
    if order not in (0, 1):
        raise DomainError(f"order must be 0 or 1, got {order!r}")
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"x must be finite, got {x!r}")
    return float(special.j0(x) if order == 0 else special.j1(x))


def _mcmahon_guess(order, k):
    # McMahon's asymptotic expansion for the k-th positive zero of J_order.
    b = (k + 0.5 * order - 0.25) * math.pi
    mu = 4.0 * order * order
    e = 8.0 * b
    guess = b - (mu - 1.0) / e
    guess -= 4.0 * (mu - 1.0) * (7.0 * mu - 31.0) / (3.0 * e**3)
    guess -= 32.0 * (mu - 1.0) * (83.0 * mu * mu - 982.0 * mu + 3779.0) / (15.0 * e**5)
    guess -= (
        64.0
        * (mu - 1.0)
        * (6949.0 * mu**3 - 153855.0 * mu * mu + 1585743.0 * mu - 6277237.0)
        / (105.0 * e**7)
    )
    return guess


def _refine_root(order, guess):
    # Safeguarded Newton inside a sign-change bracket around the guess.
    # Zeros of J0/J1 are ~pi apart and the McMahon guess is within a few 1e-3,
    # so a half-unit bracket always isolates exactly one zero.
    if order == 0:
        f = lambda t: float(special.j0(t))
        df = lambda t: -float(special.j1(t))
    else:
        f = lambda t: float(special.j1(t))
        df = lambda t: float(special.j0(t)) - float(special.j1(t)) / t

    lo, hi = guess - 0.5, guess + 0.5
    flo, fhi = f(lo), f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo < 0.0) == (fhi < 0.0):
        raise NumericalError(
            f"no sign change around McMahon guess {guess} for order {order}",
            order=order, guess=guess,
        )
    neg_lo = flo < 0.0

    x = guess
    for _ in range(100):
        fx = f(x)
        if fx == 0.0:
            return x
        if (fx < 0.0) == neg_lo:
            lo = x
        else:
            hi = x
        d = df(x)
        xn = x - fx / d if d != 0.0 else 0.5 * (lo + hi)
        if not (lo <= xn <= hi):
            xn = 0.5 * (lo + hi)
        if abs(xn - x) <= 4e-16 * abs(x):
            return xn
        x = xn
    return x


@lru_cache(maxsize=None)
def bessel_root(order, k):
    """k-th zero j_{order,k}; (1, 0) is 0 by convention, (0, 0) is undefined."""
    if order not in (0, 1):
        raise DomainError(f"order must be 0 or 1, got {order!r}")
    k = int(k)
    if k < 0:
        raise DomainError(f"root index must be non-negative, got {k}")
    if k == 0:
        if order == 0:
            raise DomainError("j_{0,0} is undefined; indexing starts at k=1 for order 0")
        return 0.0
    return _refine_root(order, _mcmahon_guess(order, k))


@dataclass(frozen=True)
class BesselRootTable:
    """Ascending zeros of J0 or J1; for order 1 the table starts with the
    defined value j_{1,0} = 0."""

    order: int
    roots: tuple
    count: int

    def __post_init__(self):
        if self.order not in (0, 1):
            raise DomainError(f"order must be 0 or 1, got {self.order!r}")
        if self.count < 1 or len(self.roots) != self.count:
            raise DomainError("count must be positive and match len(roots)")
        if any(b <= a for a, b in zip(self.roots, self.roots[1:])):
            raise DomainError("roots must be strictly increasing")
        if self.order == 0 and self.roots[0] <= 0.0:
            raise DomainError("order-0 roots must all be positive")
        if self.order == 1 and self.roots[0] != 0.0:
            raise DomainError("order-1 table must start with the defined 0")


@lru_cache(maxsize=None)
def bessel_root_table(order, count):
    """First `count` entries of the zero table (cached, immutable)."""
    if count < 1:
        raise DomainError(f"count must be positive, got {count}")
    if order == 0:
        roots = tuple(bessel_root(0, k) for k in range(1, count + 1))
    else:
        roots = tuple(bessel_root(1, k) for k in range(count))
    return BesselRootTable(order=order, roots=roots, count=count)


# ---------------------------------------------------------------------------
# Gaussian tail


def q_function(x):
    """Standard normal upper-tail probability Q(x)."""
    x = float(x)
    if not math.isfinite(x):
        raise DomainError(f"x must be finite, got {x!r}")
    # erfc form avoids cancellation for large x
    return 0.5 * float(special.erfc(x / math.sqrt(2.0)))


# ---------------------------------------------------------------------------
# Inverse Gaussian


@dataclass(frozen=True)
class InverseGaussianParams:
    """Parameters of IG[mu, lam]: mean mu and shape lam, both in seconds."""

    mu: float
    lam: float

    def __post_init__(self):
        if not (math.isfinite(self.mu) and self.mu > 0.0):
            raise DomainError(f"mu must be finite and positive, got {self.mu!r}")
        if not (math.isfinite(self.lam) and self.lam > 0.0):
            raise DomainError(f"lam must be finite and positive, got {self.lam!r}")

    @classmethod
    def from_passage(cls, distance, velocity, d_coef):
        """First-passage law of a drifted Brownian motion through `distance`:
        IG[distance/velocity, distance^2/(2 d_coef)]."""
        if distance <= 0.0 or velocity <= 0.0 or d_coef <= 0.0:
            raise DomainError("distance, velocity and d_coef must be positive")
        return cls(mu=distance / velocity, lam=distance * distance / (2.0 * d_coef))

    @property
    def std(self):
        return math.sqrt(self.mu**3 / self.lam)

    def mode(self):
        r = 3.0 * self.mu / (2.0 * self.lam)
        return self.mu * (math.sqrt(1.0 + r * r) - r)


def _as_array(x):
    a = np.asarray(x, dtype=float)
    return a, (a.ndim == 0)


def ig_pdf(p, x):
    """IG density at x; 0 for x <= 0."""
    a, scalar = _as_array(x)
    a = np.atleast_1d(a)
    out = np.zeros_like(a)
    pos = a > 0.0
    if pos.any():
        xp = a[pos]
        out[pos] = np.sqrt(p.lam / (2.0 * math.pi * xp**3)) * np.exp(
            -p.lam * (xp - p.mu) ** 2 / (2.0 * p.mu**2 * xp)
        )
    return float(out[0]) if scalar else out


def _ig_cdf_raw(mu, lam, x):
    # CDF of IG[mu, lam] in the two-Phi form; exp(2 lam/mu)*Phi(-b2) is kept in
    # log space because the exponent reaches ~100 for typical channel params.
    # mu may be an array (used by the tilted integral); x >= 0 elementwise.
    mu = np.asarray(mu, dtype=float)
    x = np.asarray(x, dtype=float)
    shape = np.broadcast_shapes(mu.shape, x.shape)
    mu = np.broadcast_to(mu, shape)
    x = np.broadcast_to(x, shape)
    out = np.zeros(shape)
    inf = np.isinf(x)
    out[inf] = 1.0
    pos = (x > 0.0) & ~inf
    if pos.any():
        xp = x[pos]
        mp = mu[pos]
        rt = np.sqrt(lam / xp)
        b1 = rt * (xp / mp - 1.0)
        b2 = rt * (xp / mp + 1.0)
        out[pos] = special.ndtr(b1) + np.exp(2.0 * lam / mp + special.log_ndtr(-b2))
    return out


def ig_cdf(p, x):
    """IG distribution function at x; 0 for x <= 0."""
    a, scalar = _as_array(x)
    out = _ig_cdf_raw(p.mu, p.lam, np.atleast_1d(a))
    return float(out.reshape(-1)[0]) if scalar else out


def ig_tail(p, x):
    """P{X > x} for X ~ IG[mu, lam], in the two-Q closed form."""
    a, scalar = _as_array(x)
    a = np.atleast_1d(a)
    if (a < 0.0).any():
        raise DomainError("ig_tail requires x >= 0")
    out = np.ones_like(a)
    inf = np.isinf(a)
    out[inf] = 0.0
    pos = (a > 0.0) & ~inf
    if pos.any():
        xp = a[pos]
        rt = np.sqrt(p.lam / xp)
        b1 = rt * (xp / p.mu - 1.0)
        b2 = rt * (xp / p.mu + 1.0)
        val = special.ndtr(-b1) - np.exp(2.0 * p.lam / p.mu + special.log_ndtr(-b2))
        # difference of two tails; roundoff can leave ~-1e-17 for extreme x
        out[pos] = np.maximum(val, 0.0)
    return float(out[0]) if scalar else out


def ig_tilted_partial(p, s, x):
    """Exponentially tilted partial integral of the IG density:

        integral_0^x exp(-s u) f_IG(u) du
          = exp(lam/mu - lam/mu_s) * CDF_IG[mu_s, lam](x),
        mu_s = mu / sqrt(1 + 2 s mu^2 / lam).

    Broadcasts over s and x; s = 0 reduces to the plain CDF.
    """
    s_arr, s_scalar = _as_array(s)
    x_arr, x_scalar = _as_array(x)
    if (np.atleast_1d(s_arr) < 0.0).any():
        raise DomainError("ig_tilted_partial requires s >= 0")
    if (np.atleast_1d(x_arr) < 0.0).any():
        raise DomainError("ig_tilted_partial requires x >= 0")
    mu_s = p.mu / np.sqrt(1.0 + 2.0 * s_arr * p.mu * p.mu / p.lam)
    # lam/mu - lam/mu_s <= 0 always, so the prefactor never overflows
    pref = np.exp(p.lam / p.mu - p.lam / mu_s)
    out = pref * _ig_cdf_raw(mu_s, p.lam, x_arr)
    if s_scalar and x_scalar:
        return float(out.reshape(-1)[0])
    return out
