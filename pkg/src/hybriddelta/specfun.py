"""Bessel-family functions of real argument at orders 0, 1, 1/2 and 3/2.

Only the four orders that appear in the principal matrices are supported.
Everything is scalar, pure Python, and depends on nothing but :mod:`math`.

Evaluation strategy per function (crossovers chosen so that every branch
stays at or below a few ulps of relative error):

========  ==================  ========================  =================
function  x <= 2              2 < x <= 20               x > 20
========  ==================  ========================  =================
J, Y      power series        Miller recurrence for J,  Hankel asymptotic
                              Neumann series for Y
I         power series        power series              asymptotic
K         power series        trapezoid rule on         asymptotic
                              exp(-x cosh t)
========  ==================  ========================  =================

Half-integer orders are elementary and always use the closed forms
(with a short Taylor series where the closed form cancels).

The exponentially scaled variants :func:`bessel_ie` (``exp(-x) I``) and
:func:`bessel_ke` (``exp(x) K``) never overflow; products such as
``I0(nu R) K0(nu a)`` should be formed from them.
"""

from __future__ import annotations

import cmath
import math
from enum import Enum

from .errors import DomainError

__all__ = [
    "BesselOrder",
    "bessel_j",
    "bessel_i",
    "bessel_k",
    "bessel_ie",
    "bessel_ke",
    "hankel1",
]

EULER_GAMMA = 0.57721566490153286061

SERIES_MAX = 2.0
MID_MAX = 20.0
# trapezoid step for the K integral; the aliasing error is below 1e-20 for x <= 20
_K_STEP = 1.0 / 32.0
_K_CUTOFF = 46.0  # stop once x (cosh t - 1) exceeds this


class BesselOrder(Enum):
    """The orders that may be evaluated. Construct with ``BesselOrder(0.5)``."""

    ZERO = 0.0
    ONE = 1.0
    HALF = 0.5
    THREE_HALVES = 1.5

    @classmethod
    def coerce(cls, order) -> "BesselOrder":
        if isinstance(order, cls):
            return order
        try:
            return cls(order)
        except (ValueError, TypeError):
            raise DomainError(
                f"unsupported Bessel order {order!r}; "
                "only 0, 1, 1/2 and 3/2 are available") from None

    @property
    def is_half_integer(self) -> bool:
        return self in (BesselOrder.HALF, BesselOrder.THREE_HALVES)


def _check_nonneg(x) -> float:
    x = float(x)
    if not math.isfinite(x) or x < 0.0:
        raise DomainError(f"argument must be finite and >= 0, got {x!r}")
    return x


def _check_pos(x) -> float:
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"argument must be finite and > 0, got {x!r}")
    return x


# ---------------------------------------------------------------------------
# integer orders, small argument: power series

def _series_j(n: int, x: float) -> float:
    q = -0.25 * x * x
    term = 1.0 if n == 0 else 0.5 * x
    total = term
    k = 0
    while True:
        k += 1
        term *= q / (k * (k + n))
        total += term
        if abs(term) < 1e-17 * abs(total):
            return total


def _series_i(n: int, x: float) -> float:
    q = 0.25 * x * x
    term = 1.0 if n == 0 else 0.5 * x
    total = term
    k = 0
    while True:
        k += 1
        term *= q / (k * (k + n))
        total += term
        if term < 1e-17 * total:
            return total


def _series_log_sums(n: int, x: float, sign: float) -> float:
    """Sum of the digamma-weighted series shared by Y_n and K_n.

    For n = 0 returns sum_{k>=1} H_k q^k/(k!)^2 and for n = 1 returns
    sum_{k>=0} (psi(k+1) + psi(k+2) + 2 gamma) q^k/(k!(k+1)!), q = sign x^2/4.
    The gamma parts are handled by the caller.
    """
    q = sign * 0.25 * x * x
    if n == 0:
        term = 1.0
        harmonic = 0.0
        total = 0.0
        k = 0
        while True:
            k += 1
            term *= q / (k * k)
            harmonic += 1.0 / k
            contrib = harmonic * term
            total += contrib
            if abs(contrib) < 1e-17 * abs(total):
                return total
    term = 1.0
    h_k = 0.0
    h_k1 = 1.0
    total = h_k + h_k1
    k = 0
    while True:
        k += 1
        term *= q / (k * (k + 1))
        h_k += 1.0 / k
        h_k1 += 1.0 / (k + 1)
        contrib = (h_k + h_k1) * term
        total += contrib
        if abs(contrib) < 1e-17 * abs(total):
            return total


def _series_y(n: int, x: float) -> float:
    log_term = math.log(0.5 * x) + EULER_GAMMA
    if n == 0:
        return (2.0 / math.pi) * (log_term * _series_j(0, x)
                                  - _series_log_sums(0, x, -1.0))
    # psi(k+1) + psi(k+2) = H_k + H_{k+1} - 2 gamma
    s = _series_log_sums(1, x, -1.0)
    return (-2.0 / (math.pi * x) + (2.0 / math.pi) * log_term * _series_j(1, x)
            - (0.5 * x / math.pi) * s)


def _series_k(n: int, x: float) -> float:
    log_term = math.log(0.5 * x) + EULER_GAMMA
    if n == 0:
        return -log_term * _series_i(0, x) + _series_log_sums(0, x, 1.0)
    s = _series_log_sums(1, x, 1.0)
    return 1.0 / x + log_term * _series_i(1, x) - 0.25 * x * s


# ---------------------------------------------------------------------------
# integer orders, intermediate argument

def _miller_sequence(x: float) -> list[float]:
    """J_0 .. J_M at x by backward recurrence, normalised with the
    identity J_0 + 2 sum J_2k = 1."""
    top = 2 * int(0.5 * x) + 40
    vals = [0.0] * (top + 2)
    vals[top] = 1.0
    for m in range(top, 0, -1):
        vals[m - 1] = (2.0 * m / x) * vals[m] - vals[m + 1]
        if abs(vals[m - 1]) > 1e250:
            for j in range(m - 1, top + 1):
                vals[j] *= 1e-250
    norm = vals[0] + 2.0 * math.fsum(vals[2:top + 1:2])
    return [v / norm for v in vals[:top + 1]]


def _mid_jy(x: float) -> tuple[float, float, float, float]:
    """(J0, J1, Y0, Y1) for moderate x via Miller + Neumann series."""
    js = _miller_sequence(x)
    top = len(js) - 1
    log_term = math.log(0.5 * x) + EULER_GAMMA
    s0 = math.fsum((-1) ** k * js[2 * k] / k for k in range(1, top // 2 + 1))
    y0 = (2.0 / math.pi) * log_term * js[0] - (4.0 / math.pi) * s0
    s1 = math.fsum((-1) ** k * (js[2 * k - 1] - js[2 * k + 1]) / k
                   for k in range(1, (top - 1) // 2 + 1))
    y1 = (-2.0 / (math.pi * x) * js[0] + (2.0 / math.pi) * log_term * js[1]
          + (2.0 / math.pi) * s1)
    return js[0], js[1], y0, y1


def _mid_ke(n: int, x: float) -> float:
    """exp(x) K_n(x) = int_0^inf exp(-x (cosh t - 1)) cosh(n t) dt."""
    h = _K_STEP
    total = 0.5
    j = 0
    while True:
        j += 1
        t = j * h
        s = math.sinh(0.5 * t)
        expo = 2.0 * x * s * s
        term = math.exp(-expo)
        if n:
            term *= math.cosh(t)
        total += term
        if expo > _K_CUTOFF:
            return h * total


# ---------------------------------------------------------------------------
# integer orders, large argument: asymptotic expansions

def _asym_coeffs(n: int, x: float, alternate: bool) -> tuple[float, float]:
    """Even and odd parts of sum a_k(n) / x^k, stopping at the smallest term.

    With ``alternate`` the terms carry the factor (-1)^k.
    """
    mu = 4.0 * n * n
    term = 1.0
    even = 1.0
    odd = 0.0
    k = 0
    prev = math.inf
    while k < 60:
        k += 1
        term *= (mu - (2 * k - 1) ** 2) / (8.0 * k * x)
        if abs(term) >= prev or term == 0.0:
            break
        prev = abs(term)
        signed = -term if (alternate and k % 2) else term
        if k % 2:
            odd += signed
        else:
            even += signed
        if abs(term) < 1e-17:
            break
    return even, odd


def _asym_jy(n: int, x: float) -> tuple[float, float]:
    # P = sum (-1)^k a_2k / x^2k, Q = sum (-1)^k a_{2k+1} / x^{2k+1}
    mu = 4.0 * n * n
    p = 1.0
    q = 0.0
    term = 1.0
    prev = math.inf
    k = 0
    while k < 60:
        k += 1
        term *= (mu - (2 * k - 1) ** 2) / (8.0 * k * x)
        if abs(term) >= prev or term == 0.0:
            break
        prev = abs(term)
        if k % 2:
            q += term if (k // 2) % 2 == 0 else -term
        else:
            p += term if (k // 2) % 2 == 0 else -term
        if abs(term) < 1e-17:
            break
    # chi = x - (n/2 + 1/4) pi; expand to keep full accuracy for large x
    c = (0.5 * n + 0.25) * math.pi
    cx, sx = math.cos(x), math.sin(x)
    cc, sc = math.cos(c), math.sin(c)
    cos_chi = cx * cc + sx * sc
    sin_chi = sx * cc - cx * sc
    amp = math.sqrt(2.0 / (math.pi * x))
    return amp * (p * cos_chi - q * sin_chi), amp * (p * sin_chi + q * cos_chi)


def _asym_ie(n: int, x: float) -> float:
    even, odd = _asym_coeffs(n, x, alternate=True)
    return (even + odd) / math.sqrt(2.0 * math.pi * x)


def _asym_ke(n: int, x: float) -> float:
    even, odd = _asym_coeffs(n, x, alternate=False)
    return (even + odd) * math.sqrt(0.5 * math.pi / x)


# ---------------------------------------------------------------------------
# dispatch for integer orders

def _jy_int(n: int, x: float) -> tuple[float, float]:
    if x <= SERIES_MAX:
        return _series_j(n, x), _series_y(n, x)
    if x <= MID_MAX:
        j0, j1, y0, y1 = _mid_jy(x)
        return (j0, y0) if n == 0 else (j1, y1)
    return _asym_jy(n, x)


def _j_int(n: int, x: float) -> float:
    if x <= SERIES_MAX:
        return _series_j(n, x)
    if x <= MID_MAX:
        return _miller_sequence(x)[n]
    return _asym_jy(n, x)[0]


def _ie_int(n: int, x: float) -> float:
    if x <= MID_MAX:
        return _series_i(n, x) * math.exp(-x)
    return _asym_ie(n, x)


def _ke_int(n: int, x: float) -> float:
    if x <= SERIES_MAX:
        return _series_k(n, x) * math.exp(x)
    if x <= MID_MAX:
        return _mid_ke(n, x)
    return _asym_ke(n, x)


# ---------------------------------------------------------------------------
# half-integer orders

def _sinc_minus_cos(x: float) -> float:
    """sin(x)/x - cos(x) without cancellation near 0."""
    if x < 1.0:
        # sum_{k>=1} (-1)^(k+1) 2k x^2k / (2k+1)!
        x2 = x * x
        term = x2 / 3.0  # k = 1: 2 x^2 / 3!
        total = term
        k = 1
        while abs(term) > 1e-18 * abs(total):
            k += 1
            term *= -x2 * k / ((k - 1) * (2 * k) * (2 * k + 1))
            total += term
        return total
    return math.sin(x) / x - math.cos(x)


def _cosh_minus_sinhc_scaled(x: float) -> float:
    """exp(-x) (cosh x - sinh(x)/x)."""
    if x < 1.0:
        x2 = x * x
        term = x2 / 3.0
        total = term
        k = 1
        while term > 1e-18 * total:
            k += 1
            term *= x2 * k / ((k - 1) * (2 * k) * (2 * k + 1))
            total += term
        return total * math.exp(-x)
    e2 = math.exp(-2.0 * x)
    return 0.5 * (1.0 + e2) + 0.5 * math.expm1(-2.0 * x) / x


def _j_half(order: BesselOrder, x: float) -> float:
    if x == 0.0:
        return 0.0
    amp = math.sqrt(2.0 / (math.pi * x))
    if order is BesselOrder.HALF:
        return amp * math.sin(x)
    return amp * _sinc_minus_cos(x)


def _y_half(order: BesselOrder, x: float) -> float:
    amp = math.sqrt(2.0 / (math.pi * x))
    if order is BesselOrder.HALF:
        return -amp * math.cos(x)
    return -amp * (math.cos(x) / x + math.sin(x))


def _ie_half(order: BesselOrder, x: float) -> float:
    amp = math.sqrt(2.0 / (math.pi * x))
    if order is BesselOrder.HALF:
        return -0.5 * amp * math.expm1(-2.0 * x)
    return amp * _cosh_minus_sinhc_scaled(x)


def _ke_half(order: BesselOrder, x: float) -> float:
    amp = math.sqrt(0.5 * math.pi / x)
    if order is BesselOrder.HALF:
        return amp
    return amp * (1.0 + 1.0 / x)


# ---------------------------------------------------------------------------
# public API

def bessel_j(order, x) -> float:
    """Bessel function of the first kind J_order(x) for x >= 0."""
    order = BesselOrder.coerce(order)
    x = _check_nonneg(x)
    if order.is_half_integer:
        return _j_half(order, x)
    n = int(order.value)
    if x == 0.0:
        return 1.0 if n == 0 else 0.0
    return _j_int(n, x)


def _bessel_y(order, x) -> float:
    """Bessel function of the second kind. Only used through hankel1."""
    order = BesselOrder.coerce(order)
    x = _check_pos(x)
    if order.is_half_integer:
        return _y_half(order, x)
    return _jy_int(int(order.value), x)[1]


def bessel_ie(order, x) -> float:
    """Exponentially scaled modified Bessel function exp(-x) I_order(x)."""
    order = BesselOrder.coerce(order)
    x = _check_pos(x)
    if order.is_half_integer:
        return _ie_half(order, x)
    return _ie_int(int(order.value), x)


def bessel_ke(order, x) -> float:
    """Exponentially scaled modified Bessel function exp(x) K_order(x)."""
    order = BesselOrder.coerce(order)
    x = _check_pos(x)
    if order.is_half_integer:
        return _ke_half(order, x)
    return _ke_int(int(order.value), x)


def bessel_i(order, x) -> float:
    """Modified Bessel function I_order(x) for x > 0.

    Raises OverflowError for x beyond roughly 700; use :func:`bessel_ie`.
    """
    order = BesselOrder.coerce(order)
    x = _check_pos(x)
    if order.is_half_integer:
        amp = math.sqrt(2.0 / (math.pi * x))
        if order is BesselOrder.HALF:
            return amp * math.sinh(x)
        if x < 1.0:
            return amp * _cosh_minus_sinhc_scaled(x) * math.exp(x)
        return amp * (math.cosh(x) - math.sinh(x) / x)
    n = int(order.value)
    if x <= MID_MAX:
        return _series_i(n, x)
    return _asym_ie(n, x) * math.exp(x)


def bessel_k(order, x) -> float:
    """Modified Bessel function K_order(x) for x > 0."""
    order = BesselOrder.coerce(order)
    x = _check_pos(x)
    if order.is_half_integer:
        return _ke_half(order, x) * math.exp(-x)
    n = int(order.value)
    if x <= SERIES_MAX:
        return _series_k(n, x)
    return _ke_int(n, x) * math.exp(-x)


def hankel1(order, x) -> complex:
    """Hankel function of the first kind H1_order(x) = J + iY for x > 0."""
    order = BesselOrder.coerce(order)
    x = _check_pos(x)
    if order is BesselOrder.HALF:
        return -1j * math.sqrt(2.0 / (math.pi * x)) * cmath.exp(1j * x)
    if order is BesselOrder.THREE_HALVES:
        return (-math.sqrt(2.0 / (math.pi * x)) * cmath.exp(1j * x)
                * (1.0 + 1j / x))
    j, y = _jy_int(int(order.value), x)
    return complex(j, y)
