"""Bessel evaluation, Bessel roots, the Gaussian tail Q, and the inverse
Gaussian family. Oracles are mpmath (arbitrary precision) and scipy.integrate
quadrature; the production code never touches either."""

import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from tubemc import DomainError
from tubemc.specfun import (
    InverseGaussianParams,
    bessel_j,
    bessel_root,
    bessel_root_table,
    ig_cdf,
    ig_pdf,
    ig_tail,
    ig_tilted_partial,
    q_function,
)

mpmath.mp.dps = 30


# ---------------------------------------------------------------------------
# bessel_j


def test_bessel_j_j0_at_one():
    assert bessel_j(0, 1.0) == pytest.approx(0.7651976865579666, abs=1e-15)


def test_bessel_j_matches_mpmath_on_grid():
    xs = np.linspace(-30.0, 30.0, 121)
    for order in (0, 1):
        for x in xs:
            want = float(mpmath.besselj(order, x))
            assert bessel_j(order, float(x)) == pytest.approx(want, abs=1e-13)


def test_bessel_j_rejects_bad_order_and_nonfinite():
    with pytest.raises(DomainError):
        bessel_j(2, 1.0)
    with pytest.raises(DomainError):
        bessel_j(0, float("nan"))
    with pytest.raises(DomainError):
        bessel_j(1, float("inf"))


# ---------------------------------------------------------------------------
# bessel_root


def test_first_roots_frozen_values():
    assert bessel_root(0, 1) == pytest.approx(2.404825557695773, abs=1e-12)
    assert bessel_root(1, 1) == pytest.approx(3.831705970207512, abs=1e-12)


def test_j1_zeroth_root_is_zero_and_j0_has_none():
    assert bessel_root(1, 0) == 0.0
    with pytest.raises(DomainError):
        bessel_root(0, 0)


def test_root_residuals_tiny():
    for order in (0, 1):
        for k in range(1, 51):
            r = bessel_root(order, k)
            # |J'| ~ 0.2-0.5 near a simple root, so the residual bounds the
            # root error up to a small factor
            assert abs(bessel_j(order, r)) < 1e-13


def test_roots_interlace():
    # 0 = j_{1,0} < j_{0,1} < j_{1,1} < j_{0,2} < j_{1,2} < ...
    j0 = bessel_root_table(0, 40).roots
    j1 = bessel_root_table(1, 41).roots
    assert j1[0] == 0.0
    for k in range(40):
        assert j1[k] < j0[k] < j1[k + 1]


def test_root_table_is_cached_and_consistent():
    t1 = bessel_root_table(0, 25)
    t2 = bessel_root_table(0, 25)
    assert t1 is t2
    assert t1.count == 25
    assert t1.roots[4] == bessel_root(0, 5)


def test_product_sum_identity():
    # sum_m 1/(j0m^2 - x^2) = J1(x) / (2 x J0(x)), away from poles
    j0 = np.array(bessel_root_table(0, 500).roots)
    for x in (0.5, 1.0, 3.0, 5.2):
        lhs = float(np.sum(1.0 / (j0**2 - x * x)))
        rhs = bessel_j(1, x) / (2.0 * x * bessel_j(0, x))
        assert lhs == pytest.approx(rhs, abs=2e-3)


# ---------------------------------------------------------------------------
# q_function


def test_q_function_pinned_values():
    assert q_function(0.0) == 0.5
    assert q_function(1.0) == pytest.approx(0.15865525393145707, abs=1e-16)
    assert q_function(40.0) <= 1e-300


@given(st.floats(min_value=-8.0, max_value=8.0))
def test_q_function_symmetry(x):
    assert q_function(x) + q_function(-x) == pytest.approx(1.0, abs=1e-14)


def test_q_function_monotone_decreasing():
    xs = np.linspace(-10, 10, 201)
    qs = [q_function(float(x)) for x in xs]
    assert all(a >= b for a, b in zip(qs, qs[1:]))
    # strictly decreasing wherever 1 - Q is still resolvable in double
    mid = [q_function(float(x)) for x in np.linspace(-6, 6, 121)]
    assert all(a > b for a, b in zip(mid, mid[1:]))


# ---------------------------------------------------------------------------
# inverse Gaussian


def test_ig_pdf_pinned_value():
    p = InverseGaussianParams(mu=1.0, lam=1.0)
    assert ig_pdf(p, 1.0) == pytest.approx(0.3989422804014327, abs=1e-12)


def test_ig_pdf_zero_at_nonpositive_x():
    p = InverseGaussianParams(mu=0.5, lam=2.0)
    assert ig_pdf(p, 0.0) == 0.0
    assert ig_pdf(p, -3.0) == 0.0


def test_ig_pdf_normalizes():
    p = InverseGaussianParams(mu=0.01, lam=0.5)
    val, err = integrate.quad(lambda x: ig_pdf(p, x), 0, np.inf, limit=200)
    assert val == pytest.approx(1.0, abs=1e-10)


def test_ig_from_passage_arithmetic():
    p = InverseGaussianParams.from_passage(2000.0, 2000.0, 400.0)
    assert p.mu == pytest.approx(1.0)
    assert p.lam == pytest.approx(2000.0**2 / (2 * 400.0))
    assert p.std == pytest.approx(math.sqrt(p.mu**3 / p.lam))


def test_ig_mode_is_argmax():
    p = InverseGaussianParams(mu=1.0, lam=2000.0)
    m = p.mode()
    xs = np.linspace(m * 0.9, m * 1.1, 4001)
    dens = ig_pdf(p, xs)
    assert xs[np.argmax(dens)] == pytest.approx(m, rel=1e-3)
    # closed form: mu*(sqrt(1+(3mu/2lam)^2) - 3mu/2lam)
    b = 3.0 * p.mu / (2.0 * p.lam)
    assert m == pytest.approx(p.mu * (math.sqrt(1 + b * b) - b), rel=1e-14)


def test_ig_cdf_tail_complement():
    p = InverseGaussianParams(mu=0.7, lam=12.0)
    for x in (0.01, 0.3, 0.7, 1.4, 9.0):
        assert ig_cdf(p, x) + ig_tail(p, x) == pytest.approx(1.0, abs=1e-12)
    assert ig_cdf(p, np.inf) == 1.0
    assert ig_tail(p, 0.0) == 1.0
    with pytest.raises(DomainError):
        ig_tail(p, -1e-9)


def test_ig_tail_deep_tail_vs_quadrature():
    # far-left tail where the naive 1 - CDF form would cancel
    p = InverseGaussianParams(mu=0.01, lam=0.5)
    want, err = integrate.quad(
        lambda u: ig_pdf(p, u), 0.01, np.inf, limit=400, epsabs=1e-11
    )
    assert err < 1e-9
    assert ig_tail(p, 0.01) == pytest.approx(want, abs=1e-8)


def test_ig_cdf_monotone_and_bounded():
    p = InverseGaussianParams(mu=0.3, lam=5.0)
    xs = np.linspace(0.0, 3.0, 301)
    cd = ig_cdf(p, xs)
    assert np.all(np.diff(cd) >= -1e-15)
    assert np.all((cd >= 0.0) & (cd <= 1.0))


def test_ig_tilted_partial_pinned_point_vs_quadrature():
    p = InverseGaussianParams(mu=1.0, lam=1.0)
    want, err = integrate.quad(
        lambda u: math.exp(-0.5 * u) * ig_pdf(p, u),
        0.0,
        2.0,
        points=[p.mode()],
        limit=400,
        epsabs=1e-13,
        epsrel=1e-12,
    )
    assert err < 1e-12
    assert ig_tilted_partial(p, 0.5, 2.0) == pytest.approx(want, abs=1e-9)


def test_ig_tilted_partial_s_zero_recovers_cdf():
    p = InverseGaussianParams(mu=0.4, lam=3.0)
    for x in (0.1, 0.4, 2.0):
        assert ig_tilted_partial(p, 0.0, x) == pytest.approx(
            ig_cdf(p, x), abs=1e-14
        )


def test_ig_tilted_partial_limit_is_laplace_transform():
    p = InverseGaussianParams(mu=0.01, lam=0.5)
    s = 23.0
    want = math.exp(
        (p.lam / p.mu) * (1.0 - math.sqrt(1.0 + 2.0 * s * p.mu**2 / p.lam))
    )
    assert ig_tilted_partial(p, s, 10.0) == pytest.approx(want, rel=1e-12)


@given(
    st.floats(min_value=0.0, max_value=50.0),
    st.floats(min_value=0.0, max_value=60.0),
)
@settings(max_examples=60)
def test_ig_tilted_partial_monotone_in_s(s_lo, ds):
    p = InverseGaussianParams(mu=0.5, lam=4.0)
    hi = ig_tilted_partial(p, s_lo, 1.0)
    lo = ig_tilted_partial(p, s_lo + ds, 1.0)
    assert lo <= hi + 1e-15
    assert lo >= 0.0
    assert hi <= ig_cdf(p, 1.0) + 1e-15


def test_ig_tilted_partial_rejects_negative_arguments():
    p = InverseGaussianParams(mu=0.5, lam=4.0)
    with pytest.raises(DomainError):
        ig_tilted_partial(p, -1.0, 1.0)
    with pytest.raises(DomainError):
        ig_tilted_partial(p, 1.0, -1.0)
