import math

import mpmath
import numpy as np
import pytest
import scipy.special as sc

from hybriddelta import specfun as sf
from hybriddelta.errors import DomainError

ORDERS = [0, 1, 0.5, 1.5]
mpmath.mp.dps = 40


def naive_series_j(nu, x, terms=60):
    """Truncated power series of J_nu, summed directly."""
    half = 0.5 * x
    return math.fsum((-1) ** k * half ** (2 * k + nu)
                     / (math.gamma(k + 1) * math.gamma(k + nu + 1))
                     for k in range(terms))


def naive_series_i(nu, x, terms=60):
    half = 0.5 * x
    return math.fsum(half ** (2 * k + nu)
                     / (math.gamma(k + 1) * math.gamma(k + nu + 1))
                     for k in range(terms))


def naive_series_k(nu, x):
    if nu in (0.5, 1.5):
        # reflection formula for non-integer order
        return 0.5 * math.pi * (naive_series_i(-nu, x) - naive_series_i(nu, x)) \
            / math.sin(nu * math.pi)
    log_half = math.log(0.5 * x)
    q = 0.25 * x * x
    if nu == 0:
        acc = [-(log_half + np.euler_gamma) * naive_series_i(0, x)]
        h = 0.0
        for k in range(1, 40):
            h += 1.0 / k
            acc.append(h * q ** k / math.factorial(k) ** 2)
        return math.fsum(acc)
    acc = [1.0 / x, log_half * naive_series_i(1, x)]
    h_k, h_k1 = 0.0, 1.0
    for k in range(40):
        if k:
            h_k += 1.0 / k
            h_k1 += 1.0 / (k + 1)
        acc.append(-0.25 * x * (h_k + h_k1 - 2 * np.euler_gamma) * q ** k
                   / (math.factorial(k) * math.factorial(k + 1)))
    return math.fsum(acc)


def naive_series_y(nu, x):
    if nu in (0.5, 1.5):
        return (naive_series_j(nu, x) * math.cos(nu * math.pi)
                - naive_series_j(-nu, x)) / math.sin(nu * math.pi)
    return float(mpmath.bessely(nu, x))


def bisect(f, lo, hi, tol=1e-15):
    flo = f(lo)
    while hi - lo > tol * hi:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_trivial_values_at_origin():
    assert sf.bessel_j(0, 0.0) == 1.0
    assert sf.bessel_j(1, 0.0) == 0.0
    assert sf.bessel_j(0.5, 0.0) == 0.0


def test_first_zero_of_j0_matches_series_bisection():
    x0 = bisect(lambda x: naive_series_j(0, x), 2.0, 3.0)
    assert abs(sf.bessel_j(0, x0)) < 1e-10
    assert x0 == pytest.approx(2.404825557695773, rel=1e-14)


@pytest.mark.parametrize("order", [0, 1, 0.5, 1.5])
def test_agrees_with_truncated_series_below_two(order):
    for x in np.linspace(0.01, 2.0, 60):
        assert sf.bessel_j(order, x) == pytest.approx(naive_series_j(order, x), rel=1e-12, abs=1e-300)
        assert sf.bessel_i(order, x) == pytest.approx(naive_series_i(order, x), rel=1e-12)
        assert sf.bessel_k(order, x) == pytest.approx(naive_series_k(order, x), rel=1e-12)


def test_half_order_series_cross_check_for_y():
    for x in np.linspace(0.05, 2.0, 20):
        for order in (0.5, 1.5):
            h = sf.hankel1(order, x)
            assert h.imag == pytest.approx(naive_series_y(order, x), rel=1e-12)


def test_elementary_half_order_values():
    assert sf.bessel_i(0.5, 1.0) == pytest.approx(math.sqrt(2 / math.pi) * math.sinh(1.0), rel=1e-15)
    assert sf.bessel_k(0.5, 2.0) == pytest.approx(math.sqrt(math.pi / 4) * math.exp(-2.0), rel=1e-15)
    x = 3.7
    h = sf.hankel1(0.5, x)
    ref = -1j * math.sqrt(2 / (math.pi * x)) * complex(math.cos(x), math.sin(x))
    assert abs(h - ref) < 1e-15


def test_wronskian_at_reference_point():
    x = 1.5
    w = sf.bessel_i(1, x) * sf.bessel_k(0, x) + sf.bessel_i(0, x) * sf.bessel_k(1, x)
    assert w == pytest.approx(1 / x, rel=1e-12)


@pytest.mark.parametrize("x", np.geomspace(1e-2, 50, 97))
def test_wronskians_on_log_grid(x):
    w0 = sf.bessel_i(1, x) * sf.bessel_k(0, x) + sf.bessel_i(0, x) * sf.bessel_k(1, x)
    w_half = (sf.bessel_i(0.5, x) * sf.bessel_k(1.5, x)
              + sf.bessel_i(1.5, x) * sf.bessel_k(0.5, x))
    assert abs(w0 * x - 1) < 1e-11
    assert abs(w_half * x - 1) < 1e-11


def test_hankel_imag_is_y0():
    assert sf.hankel1(0, 1.0).imag == pytest.approx(sc.y0(1.0), rel=1e-12)
    assert sf.hankel1(0, 1.0).imag == pytest.approx(sf._bessel_y(0, 1.0), rel=0, abs=0)


def test_continuation_identity_links_k0_and_hankel():
    # K0(z) = (i pi/2) H0(i z); the right side is evaluated by an independent
    # complex-argument routine and compared with the real-axis K0
    x = 2.0
    cont = abs(0.5j * math.pi * complex(mpmath.hankel1(0, 1j * x)))
    assert sf.bessel_k(0, x) == pytest.approx(cont, rel=1e-10)


def test_hankel_parts_satisfy_cross_wronskian():
    for x in np.geomspace(0.05, 500, 60):
        h0, h1 = sf.hankel1(0, x), sf.hankel1(1, x)
        w = h1.real * h0.imag - h0.real * h1.imag
        assert w == pytest.approx(2 / (math.pi * x), rel=1e-12)


@pytest.mark.parametrize("order", ORDERS)
def test_against_high_precision_reference(order):
    for x in np.geomspace(1e-3, 50, 120):
        ref = mpmath.besselj(order, x)
        env = max(abs(float(ref)), math.sqrt(2 / (math.pi * x)) if x > 1 else abs(float(ref)))
        assert abs(sf.bessel_j(order, x) - float(ref)) <= 1e-12 * env
        assert sf.bessel_i(order, x) == pytest.approx(float(mpmath.besseli(order, x)), rel=1e-12)
        assert sf.bessel_k(order, x) == pytest.approx(float(mpmath.besselk(order, x)), rel=1e-12)


@pytest.mark.parametrize("order", ORDERS)
def test_large_argument_j_and_hankel(order):
    for x in np.geomspace(50, 1e4, 40):
        env = math.sqrt(2 / (math.pi * x))
        ref_j = float(mpmath.besselj(order, x))
        assert abs(sf.bessel_j(order, x) - ref_j) <= 1e-10 * env
        if x <= 1e3:
            ref_h = complex(mpmath.hankel1(order, x))
            assert abs(sf.hankel1(order, x) - ref_h) <= 1e-10 * abs(ref_h)


@pytest.mark.parametrize("order", ORDERS)
def test_hankel_against_scipy_small_and_mid(order):
    for x in np.geomspace(1e-3, 1e3, 200):
        ref = sc.hankel1(order, x)
        assert abs(sf.hankel1(order, x) - ref) <= 1e-10 * abs(ref)


@pytest.mark.parametrize("order", ORDERS)
def test_scaled_variants(order):
    for x in [1e-3, 0.7, 2.0, 19.9, 20.1, 300.0, 5000.0]:
        assert sf.bessel_ie(order, x) == pytest.approx(sc.ive(order, x), rel=1e-12)
        assert sf.bessel_ke(order, x) == pytest.approx(sc.kve(order, x), rel=1e-12)


def test_positivity_and_monotonicity():
    xs = np.geomspace(1e-2, 50, 300)
    for order in ORDERS:
        i_vals = [sf.bessel_i(order, x) for x in xs]
        k_vals = [sf.bessel_k(order, x) for x in xs]
        assert min(i_vals) > 0 and min(k_vals) > 0
        assert all(b > a for a, b in zip(i_vals, i_vals[1:]))
        assert all(b < a for a, b in zip(k_vals, k_vals[1:]))


def test_j0_squared_bounded():
    assert max(sf.bessel_j(0, x) ** 2 for x in np.linspace(0, 200, 2001)) <= 1.0


@pytest.mark.parametrize("bad", [-1.0, float("nan"), float("inf")])
def test_domain_errors(bad):
    with pytest.raises(DomainError):
        sf.bessel_j(0, bad)
    with pytest.raises(DomainError):
        sf.bessel_k(0, bad)


def test_nonpositive_argument_rejected_for_modified_and_hankel():
    for f in (sf.bessel_i, sf.bessel_k, sf.hankel1):
        with pytest.raises(DomainError):
            f(0, 0.0)


@pytest.mark.parametrize("order", [2, -0.5, 2.5, "1"])
def test_unsupported_orders(order):
    with pytest.raises(DomainError):
        sf.bessel_j(order, 1.0)


def test_order_enum_roundtrip():
    assert sf.BesselOrder(0.5) is sf.BesselOrder.HALF
    assert sf.BesselOrder.coerce(1) is sf.BesselOrder.ONE
    assert sf.bessel_j(sf.BesselOrder.THREE_HALVES, 2.0) == sf.bessel_j(1.5, 2.0)
