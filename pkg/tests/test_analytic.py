"""Series coefficients, concentration factors, conditional survival, the
response curves, and the adaptive quadrature engine.

Cross-checks lean on two independent routes through the math wherever the
package has them (coefficient formulas vs. the survival matrix, disk
integrals vs. plateau values), plus mpmath recomputation and scipy
quadrature as external oracles.
"""

import math

import mpmath
import numpy as np
import pytest
from scipy import integrate

import tubemc as tm
from tubemc.analytic import (
    CrossingTimes,
    SeriesModel,
    Truncation,
    adaptive_quadrature,
    alpha_coeff,
    arrival_probability,
    arrival_rate,
    axial_concentration,
    beta_coeff,
    c_mn,
    concentration,
    conditional_survival,
    default_crossing_times,
    gamma_coeff,
    radial_concentration,
    survival,
)

from conftest import EX2, EX3

mpmath.mp.dps = 30


@pytest.fixture(scope="module")
def model2():
    return SeriesModel(EX2, Truncation(10, 10))


@pytest.fixture(scope="module")
def ct2():
    return default_crossing_times(EX2)


# ---------------------------------------------------------------------------
# construction


def test_series_model_requires_diffusion_and_ring_width():
    s0 = tm.Scenario(rho=10.0, v=100.0, d_coef=0.0, d1=100.0, d2=120.0)
    with pytest.raises(tm.DomainError):
        SeriesModel(s0, Truncation(5, 5))
    s1 = tm.Scenario(rho=10.0, v=100.0, d_coef=1.0, d1=100.0, d2=100.0)
    with pytest.raises(tm.DomainError):
        SeriesModel(s1, Truncation(5, 5))


def test_truncation_defaults_and_validation():
    t = Truncation()
    assert (t.m_max, t.n_max, t.l_max) == (10, 10, 10)
    assert Truncation(5, 3).l_max == 3
    with pytest.raises(tm.ValidationError):
        Truncation(0, 5)


def test_crossing_times_ordering():
    with pytest.raises(tm.ValidationError):
        CrossingTimes(2.0, 1.0)
    ct = default_crossing_times(EX2)
    assert ct.t1 == pytest.approx(1.0)
    assert ct.t2 == pytest.approx(1.01)


# ---------------------------------------------------------------------------
# coefficients


def test_alpha_pinned_values(model2):
    assert alpha_coeff(model2, 0) == pytest.approx(1.0 / (100.0 * math.pi), rel=1e-14)
    assert alpha_coeff(model2, 1) == pytest.approx(1.9623e-2, rel=1e-4)


def test_alpha_scales_inverse_square_radius(model2):
    wide = tm.Scenario(rho=20.0, v=2000.0, d_coef=400.0, d1=2000.0, d2=2020.0)
    mw = SeriesModel(wide, Truncation(10, 10))
    for n in range(5):
        assert alpha_coeff(mw, n) == pytest.approx(alpha_coeff(model2, n) / 4.0, rel=1e-13)


def test_c_mn_pinned_value(model2):
    j01 = 2.404825557695773
    assert c_mn(model2, 1, 0) == pytest.approx(4.0 / j01**2, rel=1e-13)
    assert c_mn(model2, 1, 0) == pytest.approx(0.691660, abs=5e-7)


def test_beta_large_t1_limit(model2):
    # every n >= 1 term underflows, leaving the n=0 (uniform) projection
    rho = EX2.rho
    for m in (1, 2, 7):
        j0m = model2.root_table_0.roots[m - 1]
        want = (2.0 / (math.pi * rho**2)) * j0m / (tm.bessel_j(1, j0m) * j0m**2)
        assert beta_coeff(model2, m, 50.0) == pytest.approx(want, rel=1e-12)


def test_beta_m1_against_mpmath_recomputation(model2):
    # independent arbitrary-precision evaluation of the projection sum
    rho, d_coef, t1 = mpmath.mpf(10), mpmath.mpf(400), mpmath.mpf(1)
    j01 = mpmath.besseljzero(0, 1)
    total = mpmath.mpf(0)
    for n in range(0, 11):
        j1n = mpmath.besseljzero(1, n) if n >= 1 else mpmath.mpf(0)
        decay = mpmath.e ** (-((j1n / rho) ** 2) * d_coef * t1)
        total += decay / (mpmath.besselj(0, j1n) * (j01**2 - j1n**2))
    want = (2 / (mpmath.pi * rho**2)) * (j01 / mpmath.besselj(1, j01)) * total
    assert beta_coeff(model2, 1, 1.0) == pytest.approx(float(want), rel=1e-12)


def test_gamma_uniform_mode_carries_surviving_mass(model2, ct2):
    # gamma_coeff and conditional_survival are independent code paths
    mass = gamma_coeff(model2, 0, ct2) * math.pi * EX2.rho**2
    assert mass == pytest.approx(conditional_survival(model2, ct2.t2, ct2), rel=1e-12)


# ---------------------------------------------------------------------------
# concentration factors


def test_radial_disk_integral_is_one_before_the_ring(model2, ct2):
    for t in (0.05, 0.5, 0.999):
        val, err = integrate.quad(
            lambda r: 2.0 * math.pi * r * radial_concentration(model2, r, t, ct2),
            0.0,
            EX2.rho,
            limit=300,
            epsabs=1e-13,
            epsrel=1e-12,
        )
        assert val == pytest.approx(1.0, abs=1e-10)


def test_radial_wall_value_vanishes_during_absorption(model2, ct2):
    # every retained mode has a root on the wall in period 2
    center = radial_concentration(model2, 0.0, 1.005, ct2)
    wall = radial_concentration(model2, EX2.rho, 1.005, ct2)
    assert abs(wall) < 1e-12 * abs(center)


def test_radial_mass_is_continuous_into_each_period(model2, ct2):
    # the disk integral immediately after t1 (and t2) must match the plateau
    # and the post-window survival computed from the c-matrix
    for t, ref in (
        (ct2.t1 * (1 + 1e-12), conditional_survival(model2, ct2.t1, ct2)),
        (ct2.t2 * (1 + 1e-12), conditional_survival(model2, ct2.t2, ct2)),
    ):
        val, err = integrate.quad(
            lambda r: 2.0 * math.pi * r * radial_concentration(model2, r, t, ct2),
            0.0,
            EX2.rho,
            limit=300,
            epsabs=1e-13,
            epsrel=1e-12,
        )
        assert val == pytest.approx(ref, abs=1e-9)


def _axial_window(s, t, half_width_sigmas=60.0):
    # finite window around the drifted center; the clipped tail mass is
    # ~exp(-half_width^2/2), far below every tolerance used here, and the
    # interior points keep quad from stepping over the narrow peak
    center = s.v * t
    sigma = math.sqrt(2.0 * s.d_coef * t)
    lo = center - half_width_sigmas * sigma
    hi = center + half_width_sigmas * sigma
    pts = [center - 5.0 * sigma, center, center + 5.0 * sigma]
    return lo, hi, pts


def test_axial_normalization_peak_and_spread():
    t = 1.0
    lo, hi, pts = _axial_window(EX2, t)
    val, _ = integrate.quad(
        lambda z: axial_concentration(EX2, z, t),
        lo, hi, points=pts, limit=300, epsabs=1e-13, epsrel=1e-12,
    )
    assert val == pytest.approx(1.0, abs=1e-10)
    zs = np.linspace(EX2.v * t - 200, EX2.v * t + 200, 2001)
    dens = np.array([axial_concentration(EX2, z, t) for z in zs])
    assert zs[np.argmax(dens)] == pytest.approx(EX2.v * t, abs=0.2)
    m2, _ = integrate.quad(
        lambda z: (z - EX2.v * t) ** 2 * axial_concentration(EX2, z, t),
        lo, hi, points=pts, limit=300, epsabs=1e-13, epsrel=1e-12,
    )
    assert math.sqrt(m2) == pytest.approx(28.2843, abs=1e-3)


def test_concentration_triple_integral_counts_all_molecules(model2, ct2):
    t = 0.4
    radial, _ = integrate.quad(
        lambda r: 2.0 * math.pi * r * concentration(model2, r, 0.0, EX2.v * t, t, ct2),
        0.0,
        EX2.rho,
        limit=300,
            epsabs=1e-13,
            epsrel=1e-12,
    )
    lo, hi, pts = _axial_window(EX2, t)
    axial, _ = integrate.quad(
        lambda z: axial_concentration(EX2, z, t),
        lo, hi, points=pts, limit=300, epsabs=1e-13, epsrel=1e-12,
    )
    peak = axial_concentration(EX2, EX2.v * t, t)
    total = radial / peak * axial
    assert total == pytest.approx(EX2.n_emit, abs=1e-6 * EX2.n_emit)


def test_concentration_is_angle_invariant_and_linear_in_emission(model2, ct2):
    base = concentration(model2, 3.0, 0.0, 800.0, 0.4, ct2)
    assert concentration(model2, 3.0, 1.7, 800.0, 0.4, ct2) == base
    assert concentration(model2, 3.0, -math.pi, 800.0, 0.4, ct2) == base
    doubled = tm.Scenario(rho=10.0, v=2000.0, d_coef=400.0, d1=2000.0, d2=2020.0, n_emit=2000)
    md = SeriesModel(doubled, Truncation(10, 10))
    assert concentration(md, 3.0, 0.0, 800.0, 0.4, ct2) == pytest.approx(2 * base, rel=1e-13)


# ---------------------------------------------------------------------------
# conditional survival


def test_conditional_survival_is_flat_before_the_window(model2, ct2):
    s0 = conditional_survival(model2, 0.0, ct2)
    assert conditional_survival(model2, 0.5, ct2) == pytest.approx(s0, rel=1e-14)
    assert conditional_survival(model2, ct2.t1, ct2) == pytest.approx(s0, rel=1e-14)


def test_conditional_survival_plateau_converges_to_one():
    ct = default_crossing_times(EX2)
    plateaus = []
    for m_max in (10, 20, 40, 500):
        m = SeriesModel(EX2, Truncation(m_max, 10))
        plateaus.append(conditional_survival(m, 0.0, ct))
    assert all(a < b for a, b in zip(plateaus, plateaus[1:]))
    assert all(p < 1.0 for p in plateaus)
    assert 0.998 <= plateaus[-1] <= 1.002


def test_conditional_survival_decays_in_window_then_freezes(model2, ct2):
    ts = np.linspace(ct2.t1, ct2.t2, 40)
    vals = [conditional_survival(model2, float(t), ct2) for t in ts]
    assert all(a >= b - 1e-14 for a, b in zip(vals, vals[1:]))
    late = conditional_survival(model2, ct2.t2 + 1.0, ct2)
    later = conditional_survival(model2, ct2.t2 + 2.5, ct2)
    assert late == pytest.approx(vals[-1], rel=1e-14)
    assert later == pytest.approx(late, rel=1e-14)
    assert 0.0 < late < 1.0


# ---------------------------------------------------------------------------
# response curves


def test_arrival_probability_starts_at_zero_and_stays_below_one(model2):
    grid = np.arange(0.0, 3.51, 0.05)
    R = arrival_probability(model2, grid)
    S = survival(model2, grid)
    assert R.values[0] == 0.0
    assert np.all(R.values < 1.0)
    assert R.values + S.values == pytest.approx(np.ones_like(grid), abs=1e-12)
    assert np.all(np.diff(R.values) >= -1e-3)  # truncation slack only
    assert R.kind == "arrival_probability"
    assert S.kind == "survival"


def test_arrival_rate_nonnegative_and_peaks_at_ring_transit():
    m3 = SeriesModel(EX3, Truncation(10, 10))
    grid = np.arange(0.55, 0.85, 0.005)
    r = arrival_rate(m3, grid)
    assert np.all(r.values >= -1e-9)
    peak_t = grid[np.argmax(r.values)]
    assert 0.6 <= peak_t <= 0.75
    assert r.kind == "arrival_rate"


def test_response_times_must_be_sane(model2):
    with pytest.raises(tm.DomainError):
        survival(model2, np.array([0.0, 0.5, 0.5]))
    with pytest.raises(tm.DomainError):
        survival(model2, np.array([-0.1, 0.5]))


# ---------------------------------------------------------------------------
# adaptive quadrature


def test_quadrature_on_smooth_integrands():
    val = adaptive_quadrature(lambda x: x * x, 0.0, 1.0, tol=1e-12)
    assert val == pytest.approx(1.0 / 3.0, abs=1e-13)
    val = adaptive_quadrature(np.sin, 0.0, math.pi, tol=1e-12)
    assert val == pytest.approx(2.0, abs=1e-12)


def test_quadrature_matches_scipy_on_gaussian():
    f = lambda x: np.exp(-(x**2))
    want, _ = integrate.quad(lambda x: math.exp(-x * x), -3.0, 7.0, limit=200)
    assert adaptive_quadrature(f, -3.0, 7.0, tol=1e-12) == pytest.approx(want, abs=1e-10)


def test_quadrature_handles_integrable_endpoint_singularity():
    val = adaptive_quadrature(lambda x: x**-0.25, 0.0, 1.0, tol=1e-9)
    assert val == pytest.approx(4.0 / 3.0, abs=1e-7)


def test_quadrature_empty_interval_is_zero():
    assert adaptive_quadrature(np.sin, 2.0, 2.0) == 0.0


def test_quadrature_reports_nonconvergence():
    with pytest.raises(tm.NumericalError) as exc:
        adaptive_quadrature(lambda x: np.sin(1.0 / x), 1e-12, 1.0, tol=1e-14)
    assert exc.value.diagnostics  # carries interval/tolerance context


def test_quadrature_rejects_nonfinite_integrand():
    def bad(x):
        return np.where(np.asarray(x) > 0.5, np.nan, 1.0)

    with pytest.raises(tm.NumericalError):
        adaptive_quadrature(bad, 0.0, 1.0)
