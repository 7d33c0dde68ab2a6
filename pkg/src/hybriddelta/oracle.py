"""Brute-force quadrature used to validate closed forms.

Nothing here calls :mod:`hybriddelta.specfun`: the integrands are built
from :mod:`scipy.special`, so agreement between the two is a genuine
cross-check rather than a tautology.

Semi-infinite integrals of the form

    int_0^inf w(p) J_m(alpha p) J_n(beta p) dp

are split at ``p_cut``. The head is handled by adaptive Gauss-Kronrod
(:func:`scipy.integrate.quad`). In the tail the product is rewritten
exactly as

    J_m J_n = 1/2 Re[H_m(alpha p) H_n(beta p)] + 1/2 Re[H_m(alpha p) conj H_n(beta p)]

so that each piece oscillates at a single frequency (alpha + beta or
|alpha - beta|). An oscillatory piece is summed half-period by half-period
and the resulting alternating series is accelerated; a non-oscillatory
piece (alpha == beta) is mapped onto (0, 1] with p = p_cut / t.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy import integrate, special

from .errors import ConvergenceError, DomainError

__all__ = [
    "INTEGRAL_KINDS",
    "QuadratureSpec",
    "QuadratureResult",
    "OracleRow",
    "bessel_product_integral",
    "bessel_tail_integral",
    "closed_form",
    "j0j1_identities",
    "oracle_table",
    "perturbed_root_slope",
    "periodic_mean",
    "sphere_mean",
]


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-10
    rel_tol: float = 1e-8
    max_refinements: int = 4
    tail_zero_count: int = 24

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise DomainError("quadrature tolerances must be positive")
        if self.max_refinements < 1:
            raise DomainError("max_refinements must be >= 1")
        if self.tail_zero_count < 8:
            raise DomainError("tail_zero_count must be >= 8")


class QuadratureResult(NamedTuple):
    value: float
    error: float


# ---------------------------------------------------------------------------
# angular quadratures

def _evaluate(psi: Callable, *args: np.ndarray) -> np.ndarray:
    """Evaluate psi on arrays, falling back to a scalar loop."""
    try:
        out = np.asarray(psi(*args), dtype=float)
        if out.shape == np.broadcast(*args).shape:
            return out
        if out.ndim == 0:
            return np.full(np.broadcast(*args).shape, float(out))
    except (TypeError, ValueError):
        pass
    flat = np.broadcast_arrays(*args)
    return np.array([float(psi(*vals)) for vals in zip(*(f.ravel() for f in flat))],
                    dtype=float).reshape(flat[0].shape)


def _snap(value: float, scale: float) -> float:
    # a result at the rounding floor of the summation is a zero-mean profile
    return 0.0 if abs(value) <= 64.0 * np.finfo(float).eps * scale else value


def _check_nodes(n: int) -> None:
    if n < 64 or n & (n - 1):
        raise DomainError(f"node count must be a power of two >= 64, got {n}")


def periodic_mean(psi: Callable, n: int = 64, rel_tol: float = 1e-13,
                  max_nodes: int = 1 << 16) -> float:
    """Integral of a 2 pi-periodic function over one period.

    Uses the trapezoid rule with node doubling until two successive
    estimates agree to ``rel_tol`` (relative to the integral of |psi|).
    """
    _check_nodes(n)
    prev = None
    while n <= max_nodes:
        theta = 2.0 * math.pi * np.arange(n) / n
        vals = _evaluate(psi, theta)
        if not np.all(np.isfinite(vals)):
            raise DomainError("profile is not finite on the circle")
        est = 2.0 * math.pi * math.fsum(vals) / n
        scale = 2.0 * math.pi * float(np.mean(np.abs(vals)))
        if prev is not None and abs(est - prev) <= rel_tol * max(scale, 1e-300):
            return _snap(est, scale)
        prev = est
        n *= 2
    raise ConvergenceError("periodic trapezoid did not converge", best=prev)


def _gauss_theta(n: int) -> tuple[np.ndarray, np.ndarray]:
    # Gauss-Legendre in the polar angle itself; integrand psi sin(theta) is
    # smooth on [0, pi] even when psi is not a polynomial in cos(theta)
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * math.pi * (x + 1.0), 0.5 * math.pi * w


def sphere_mean(psi: Callable, n_theta: int = 64, n_phi: int = 64,
                azimuthal: bool = False, rel_tol: float = 1e-13,
                max_nodes: int = 1 << 11) -> float:
    """Integral of psi over the unit sphere, int psi dOmega.

    ``psi(theta, phi)`` in general, ``psi(theta)`` when ``azimuthal``.
    Gauss-Legendre in theta times the periodic trapezoid in phi, both
    doubled until two successive estimates agree.
    """
    _check_nodes(n_theta)
    if not azimuthal:
        _check_nodes(n_phi)
    prev = None
    while n_theta <= max_nodes:
        theta, w = _gauss_theta(n_theta)
        if azimuthal:
            vals = _evaluate(psi, theta)
            scale_vals = np.abs(vals)
            inner = vals
        else:
            phi = 2.0 * math.pi * np.arange(n_phi) / n_phi
            grid = _evaluate(psi, theta[:, None], phi[None, :])
            inner = grid.mean(axis=1)
            scale_vals = np.abs(grid).mean(axis=1)
        if not np.all(np.isfinite(inner)):
            raise DomainError("profile is not finite on the sphere")
        est = 2.0 * math.pi * math.fsum(w * np.sin(theta) * inner)
        scale = 2.0 * math.pi * float(np.sum(w * np.sin(theta) * scale_vals))
        if prev is not None and abs(est - prev) <= rel_tol * max(scale, 1e-300):
            return _snap(est, scale)
        prev = est
        n_theta *= 2
        n_phi *= 2
    raise ConvergenceError("sphere quadrature did not converge", best=prev)


# ---------------------------------------------------------------------------
# semi-infinite Bessel products

def _cvz_alternating(a: np.ndarray) -> float:
    """Sum of (-1)^k a_k by the Cohen-Rodriguez Villegas-Zagier weights.

    An Euler-type linear acceleration: for smooth a_k the error falls like
    5.8^-n with n = len(a).
    """
    n = len(a)
    d = (3.0 + math.sqrt(8.0)) ** n
    d = 0.5 * (d + 1.0 / d)
    b = -1.0
    c = -d
    s = 0.0
    for k in range(n):
        c = b - c
        s += c * a[k]
        b = (k + n) * (k - n) * b / ((k + 0.5) * (k + 1.0))
    return s / d


_GL_LOBE = np.polynomial.legendre.leggauss(24)
_GL_LOBE_COARSE = np.polynomial.legendre.leggauss(12)


def _lobe_sums(g: Callable, start: float, length: float, count: int,
               rule=_GL_LOBE) -> np.ndarray:
    x, w = rule
    lo = start + length * np.arange(count)
    nodes = lo[:, None] + 0.5 * length * (x[None, :] + 1.0)
    return 0.5 * length * (g(nodes) @ w)


def _oscillatory_tail(g: Callable, start: float, omega: float,
                      count: int) -> QuadratureResult:
    length = math.pi / omega
    s = _lobe_sums(g, start, length, count)
    # sign-normalise so the accelerator sees a smooth sequence
    signs = np.where(np.arange(count) % 2 == 0, 1.0, -1.0)
    a = signs * s
    best = _cvz_alternating(a)
    check = _cvz_alternating(a[:-2])
    coarse = _lobe_sums(g, start, length, 2, _GL_LOBE_COARSE)
    err = abs(best - check) + abs(coarse[0] - s[0]) + abs(coarse[1] - s[1])
    return QuadratureResult(float(best), float(err))


def _algebraic_tail(g: Callable, start: float) -> QuadratureResult:
    """int_start^inf g(p) dp for non-oscillatory g decaying like p^-2."""
    def mapped(rule):
        x, w = rule
        t = 0.5 * (x + 1.0)
        p = start / t
        return 0.5 * float(np.dot(w, g(p) * start / (t * t)))
    fine = mapped(np.polynomial.legendre.leggauss(96))
    coarse = mapped(np.polynomial.legendre.leggauss(48))
    return QuadratureResult(fine, abs(fine - coarse))


def bessel_product_integral(weight: Callable, m: float, alpha: float,
                            n: float, beta: float,
                            spec: QuadratureSpec | None = None,
                            peak: float | None = None) -> QuadratureResult:
    """int_0^inf weight(p) J_m(alpha p) J_n(beta p) dp.

    ``weight`` must be vectorised, smooth, and algebraically bounded;
    ``peak`` is an optional breakpoint for the head integration (e.g. the
    pole scale nu of 1/(p^2 + nu^2)).
    """
    spec = spec or QuadratureSpec()
    if alpha <= 0 or beta <= 0:
        raise DomainError("Bessel scale factors must be positive")
    fast_order, fast_scale = (m, alpha) if alpha >= beta else (n, beta)
    zero20 = (20.0 + 0.5 * fast_order - 0.25) * math.pi / fast_scale
    p_cut = max(zero20, 5.0 * (peak or 0.0))

    def head_integrand(p):
        return weight(p) * special.jv(m, alpha * p) * special.jv(n, beta * p)

    def fast(p):
        return 0.5 * weight(p) * np.real(special.hankel1(m, alpha * p)
                                         * special.hankel1(n, beta * p))

    def slow(p):
        return 0.5 * weight(p) * np.real(special.hankel1(m, alpha * p)
                                         * np.conj(special.hankel1(n, beta * p)))

    count = spec.tail_zero_count
    limit = 400
    best = None
    for _ in range(spec.max_refinements):
        points = [peak] if peak and peak < p_cut else None
        with warnings.catch_warnings():
            # quad's own error estimate is folded into ours below
            warnings.simplefilter("ignore", integrate.IntegrationWarning)
            head, head_err = integrate.quad(
                head_integrand, 0.0, p_cut, epsabs=0.1 * spec.abs_tol,
                epsrel=0.1 * spec.rel_tol, limit=limit, points=points)
        tail_fast = _oscillatory_tail(fast, p_cut, alpha + beta, count)
        if math.isclose(alpha, beta, rel_tol=1e-14):
            tail_slow = _algebraic_tail(slow, p_cut)
        else:
            tail_slow = _oscillatory_tail(slow, p_cut, abs(alpha - beta), count)
        value = head + tail_fast.value + tail_slow.value
        err = head_err + tail_fast.error + tail_slow.error
        best = QuadratureResult(float(value), float(err))
        if err <= max(spec.abs_tol, spec.rel_tol * abs(value)):
            return best
        count *= 2
        limit *= 2
    raise ConvergenceError(
        f"Bessel product integral did not converge (estimate {best.value!r}, "
        f"error bound {best.error:.3g})", best=best.value, error_bound=best.error)


# ---------------------------------------------------------------------------
# the five identities behind the principal-matrix entries

@dataclass(frozen=True)
class _IntegralKind:
    description: str
    weight: Callable[[float], Callable]
    orders: tuple[float, float]
    needs_point: bool


def _w_resolvent(nu):
    return lambda p: p / (p * p + nu * nu)


def _w_momentum(nu):
    return lambda p: p * p / (p * p + nu * nu)


INTEGRAL_KINDS: dict[str, _IntegralKind] = {
    "j0j0_2d": _IntegralKind("int p J0(a p) J0(R p) / (p^2 + nu^2) dp = K0(nu a) I0(nu R)",
                             _w_resolvent, (0.0, 0.0), True),
    "j0sq_2d": _IntegralKind("int p J0(R p)^2 / (p^2 + nu^2) dp = I0(nu R) K0(nu R)",
                             _w_resolvent, (0.0, 0.0), False),
    "j0j1_2d": _IntegralKind("int p^2 J0(R p) J1(R p) / (p^2 + nu^2) dp = -1/(2R) + nu I0(nu R) K1(nu R)",
                             _w_momentum, (0.0, 1.0), False),
    "sph_offdiag_3d": _IntegralKind("int p J1/2(a p) J1/2(R p) / (p^2 + nu^2) dp = K1/2(nu a) I1/2(nu R)",
                                    _w_resolvent, (0.5, 0.5), True),
    "sph_diag_3d": _IntegralKind("int p J1/2(R p)^2 / (p^2 + nu^2) dp = I1/2(nu R) K1/2(nu R)",
                                 _w_resolvent, (0.5, 0.5), False),
}


def _geometry(params):
    """Accept SystemParams or any object/mapping with R and optional a."""
    if isinstance(params, dict):
        return float(params["R"]), params.get("a")
    return float(params.R), getattr(params, "a", None)


def bessel_tail_integral(kind: str, params, nu: float,
                         spec: QuadratureSpec | None = None) -> QuadratureResult:
    """Numerical value of one of the :data:`INTEGRAL_KINDS` integrals."""
    if kind not in INTEGRAL_KINDS:
        raise DomainError(f"unknown integral kind {kind!r}")
    if not nu > 0:
        raise DomainError("nu must be positive")
    info = INTEGRAL_KINDS[kind]
    R, a = _geometry(params)
    if info.needs_point:
        if a is None or not a > R:
            raise DomainError(f"{kind} needs a point distance a > R")
        scales = (float(a), R)
    else:
        scales = (R, R)
    m, n = info.orders
    return bessel_product_integral(info.weight(nu), m, scales[0], n, scales[1],
                                   spec, peak=nu)


def j0j1_identities(R: float, nu: float, spec: QuadratureSpec | None = None
                    ) -> tuple[QuadratureResult, QuadratureResult]:
    """int J0(Rp) J1(Rp) dp and int J0(Rp) J1(Rp) / (p^2 + nu^2) dp.

    Closed forms: 1/(2R) and I1(nu R) K0(nu R) / nu.
    """
    if not (R > 0 and nu > 0):
        raise DomainError("R and nu must be positive")
    first = bessel_product_integral(lambda p: np.ones_like(p), 0.0, R, 1.0, R, spec)
    second = bessel_product_integral(lambda p: 1.0 / (p * p + nu * nu),
                                     0.0, R, 1.0, R, spec, peak=nu)
    return first, second


def closed_form(kind: str, params, nu: float) -> float:
    """The closed-form value of an integral kind, read back from the
    principal-matrix entries that the library actually uses."""
    from . import principal
    from .principal import SystemKind, SystemParams

    R, a = _geometry(params)
    lam = 1.0
    if kind == "j0j0_2d":
        p = SystemParams(SystemKind.CIRCLE_POINT, R=R, a=a, lambda2=lam, mu=1.0)
        return -2.0 * math.pi * principal.build_phi_bound(p, nu).entry(1, 2).real
    if kind == "j0sq_2d":
        p = SystemParams(SystemKind.CIRCLE_ONLY, R=R, lambda2=lam)
        return 2.0 * math.pi * (1.0 / lam - principal.build_phi_bound(p, nu).entry(1, 1).real)
    if kind == "j0j1_2d":
        # first-order deformation coefficient = -(1/2 pi^2) * integral
        return -2.0 * math.pi ** 2 * principal.deformation_coefficient_bound(
            "circle", R, nu)
    if kind == "sph_offdiag_3d":
        p = SystemParams(SystemKind.SPHERE_POINT, R=R, a=a, lambda2=lam, mu=1.0)
        return -4.0 * math.pi * math.sqrt(a * R) * principal.build_phi_bound(p, nu).entry(1, 2).real
    if kind == "sph_diag_3d":
        p = SystemParams(SystemKind.SPHERE_ONLY, R=R, lambda2=lam)
        return 4.0 * math.pi * R * (1.0 / lam - principal.build_phi_bound(p, nu).entry(1, 1).real)
    raise DomainError(f"unknown integral kind {kind!r}")


class OracleRow(NamedTuple):
    identity: str
    parameters: str
    closed_form: float
    quadrature: float
    abs_err: float
    rel_err: float
    passed: bool


DEFAULT_NU_GRID = (0.1, 0.5, 1.0, 2.0, 5.0)


def oracle_table(R: float, a: float, nu_values=DEFAULT_NU_GRID,
                 spec: QuadratureSpec | None = None,
                 pass_rel: float = 1e-6) -> list[OracleRow]:
    """Closed form vs quadrature for every identity and every nu."""
    from .specfun import bessel_i, bessel_k

    geometry = {"R": R, "a": a}
    rows = []

    def add(identity, params_text, exact, approx):
        abs_err = abs(approx - exact)
        rel_err = abs_err / abs(exact) if exact else abs_err
        rows.append(OracleRow(identity, params_text, exact, approx, abs_err,
                              rel_err, rel_err <= pass_rel))

    for kind in INTEGRAL_KINDS:
        for nu in nu_values:
            exact = closed_form(kind, geometry, nu)
            approx = bessel_tail_integral(kind, geometry, nu, spec).value
            add(kind, f"R={R!r};a={a!r};nu={nu!r}", exact, approx)
    for nu in nu_values:
        first, second = j0j1_identities(R, nu, spec)
        if nu == nu_values[0]:
            add("j0j1_plain", f"R={R!r}", 0.5 / R, first.value)
        add("j0j1_resolvent", f"R={R!r};nu={nu!r}",
            bessel_i(1, nu * R) * bessel_k(0, nu * R) / nu, second.value)
    return rows


# ---------------------------------------------------------------------------
# equivalent-radius slope

def perturbed_root_slope(params, profile, eps_step: float = 1e-4,
                         tol: float = 1e-13) -> float:
    """Central-difference dE/d(eps) at eps = 0 for the equivalent-radius system.

    E(eps) is the exact root energy of the undeformed single-defect system
    with radius R - eps * M, M being the angular mean of the profile.
    """
    from .spectrum import ground_energy
    from .principal import undeformed_params

    if not 1e-6 <= eps_step <= 1e-3:
        raise DomainError("eps_step must lie in [1e-6, 1e-3]")
    base = undeformed_params(params)
    solid = 2.0 * math.pi if profile.geometry == "circle" else 4.0 * math.pi
    mean = profile.mean_integral / solid
    e_plus = ground_energy(base.with_radius(base.R - eps_step * mean), tol=tol)
    e_minus = ground_energy(base.with_radius(base.R + eps_step * mean), tol=tol)
    return (e_plus - e_minus) / (2.0 * eps_step)
