"""Plane-wave scattering off the supported geometries.

Geometry: in 2D the point defect is at (a, 0) and the incident wave vector
points along +x; the scattering angle theta is the polar angle of the
outgoing wave vector. In 3D the point defect is at (0, 0, a), the incident
wave travels along +z, and theta is the polar angle of the outgoing wave
vector (results do not depend on its azimuth).

The on-shell T-matrix element is

    t(theta) = -sum_ij <k'|f_i> [Phi(k^2 + i0)^-1]_ij <f_j|k>

with form factors <f|k>; the overall sign is the same for every kind and
never reaches a cross section. The amplitude is
f = -(e^{i pi/4}/4) sqrt(2/(pi k)) t in 2D and f = -t/(4 pi) in 3D.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import DomainError, NearResonanceError
from .principal import (
    DeformationProfile,
    SystemKind,
    SystemParams,
    build_phi_scatter,
    check_profile,
)
from .specfun import bessel_j

__all__ = [
    "ScatteringSample",
    "form_factor",
    "t_element",
    "amplitude",
    "cross_section_scan",
    "CIRCLE_NODES",
    "SPHERE_NODES",
    "CONDITION_LIMIT",
]

CIRCLE_NODES = 256
SPHERE_NODES = 64
CONDITION_LIMIT = 1e12

_ELEMENTS = ("point", "circle", "sphere", "deformed_circle", "deformed_sphere")


@dataclass(frozen=True)
class ScatteringSample:
    k: float
    theta: float
    amplitude: complex
    dsigma: float


def _circle_nodes(n: int = CIRCLE_NODES) -> np.ndarray:
    return 2.0 * math.pi * np.arange(n) / n


def _polar_gauss(n: int = SPHERE_NODES):
    x, w = np.polynomial.legendre.leggauss(n)
    return 0.5 * math.pi * (x + 1.0), 0.5 * math.pi * w


def _deformed_circle_factor(R: float, k: float, alpha: float,
                            profile: DeformationProfile, nodes: int) -> complex:
    """<Gamma~|k> to first order for a wave vector at angle alpha."""
    eps = profile.eps
    base = bessel_j(0, k * R)
    if eps == 0.0:
        return complex(base)
    theta = _circle_nodes(nodes)
    psi = profile.evaluate(theta)
    c = np.cos(theta - alpha)
    phase = np.exp(1j * k * R * c)
    w = 2.0 * math.pi / nodes
    i_plain = w * np.sum(phase * psi)
    i_normal = w * np.sum(phase * c * psi)
    length_factor = 1.0 + eps * profile.mean_integral / (2.0 * math.pi * R)
    return complex(length_factor * (base - eps / (2.0 * math.pi * R) * i_plain
                                    - 0.5j * eps * k / math.pi * i_normal))


def _deformed_sphere_factor(R: float, k: float, alpha: float,
                            profile: DeformationProfile, nodes: int) -> complex:
    """<Sigma~|k> to first order for a wave vector at polar angle alpha.

    The azimuthal integral is done exactly:
    int dphi exp(i k.sigma) = 2 pi e^{i beta} J0(y) and
    int dphi exp(i k.sigma) (k.n) = 2 pi k e^{i beta} (cos t cos alpha J0(y)
    + i sin t sin alpha J1(y)), beta = kR cos t cos alpha, y = kR sin t sin alpha.
    """
    if not profile.azimuthal:
        raise DomainError("sphere form factors need an azimuthal profile psi(theta)")
    eps = profile.eps
    x = k * R
    base = math.sin(x) / x
    if eps == 0.0:
        return complex(base)
    theta, w = _polar_gauss(nodes)
    psi = profile.evaluate(theta)
    st, ct = np.sin(theta), np.cos(theta)
    # J0 is even and sin(alpha) J1(y) is even in sin(alpha), so |sin| is exact
    sa, ca = abs(math.sin(alpha)), math.cos(alpha)
    y = x * st * sa
    j0 = np.array([bessel_j(0, v) for v in y])
    j1 = np.array([bessel_j(1, v) for v in y])
    phase = np.exp(1j * x * ct * ca)
    weight = w * st * psi * 2.0 * math.pi
    i_plain = np.sum(weight * phase * j0)
    i_normal = k * np.sum(weight * phase * (ct * ca * j0 + 1j * st * sa * j1))
    area_factor = 1.0 + eps * profile.mean_integral / (2.0 * math.pi * R)
    return complex(area_factor * (base - eps / (2.0 * math.pi * R) * i_plain
                                  - 0.25j * eps / math.pi * i_normal))


def form_factor(element: str, params: SystemParams, k: float, direction_angle: float,
                profile: DeformationProfile | None = None, *,
                nodes: int | None = None) -> complex:
    """Overlap <f|k> of a defect with the plane wave of wave vector k.

    ``direction_angle`` is the polar angle of k (from +x in 2D, from +z in
    3D). The bra-side overlap <k|f> is the complex conjugate.
    """
    if element not in _ELEMENTS:
        raise DomainError(f"unknown element {element!r}")
    if not (math.isfinite(k) and k > 0):
        raise DomainError("k must be finite and > 0")
    R = params.R
    if element == "point":
        if params.a is None:
            raise DomainError("point form factor needs a")
        return cmath.exp(1j * k * params.a * math.cos(direction_angle))
    if element == "circle":
        return complex(bessel_j(0, k * R))
    if element == "sphere":
        return complex(math.sin(k * R) / (k * R))
    if profile is None:
        raise DomainError(f"{element} form factor needs a deformation profile")
    expected = "circle" if element == "deformed_circle" else "sphere"
    if profile.geometry != expected:
        raise DomainError(f"profile geometry {profile.geometry!r} does not match {element}")
    if abs(profile.eps) * profile.sup_abs >= 0.1 * R:
        raise DomainError("deformation too large for the first-order form factor")
    if element == "deformed_circle":
        return _deformed_circle_factor(R, k, direction_angle, profile,
                                       nodes or CIRCLE_NODES)
    return _deformed_sphere_factor(R, k, direction_angle, profile,
                                   nodes or SPHERE_NODES)


def _elements(params: SystemParams) -> tuple[str, ...]:
    kind = params.kind
    if kind is SystemKind.CIRCLE_POINT:
        return ("point", "circle")
    if kind is SystemKind.SPHERE_POINT:
        return ("point", "sphere")
    if kind is SystemKind.CIRCLE_ONLY:
        return ("circle",)
    if kind is SystemKind.SPHERE_ONLY:
        return ("sphere",)
    if kind is SystemKind.DEFORMED_CIRCLE:
        return ("deformed_circle",)
    return ("deformed_sphere",)


def _solve_parts(params, k, theta, profile):
    check_profile(params, profile)
    phi = build_phi_scatter(params, k, profile)
    mat = phi.to_array()
    if not params.kind.is_deformed:
        # H1 = J + iY makes every diagonal entry lie in the lower half plane;
        # a violation means something upstream is wrong
        if np.any(np.diag(mat).imag > 1e-15 * np.abs(np.diag(mat))):
            raise ArithmeticError("scattering principal matrix has a diagonal "
                                  "entry with positive imaginary part")
    cond = float(np.linalg.cond(mat))
    if not math.isfinite(cond) or cond > CONDITION_LIMIT:
        raise NearResonanceError(
            f"principal matrix nearly singular at k = {k!r} (condition {cond:.3g})", cond)
    names = _elements(params)
    incoming = np.array([form_factor(e, params, k, 0.0, profile) for e in names])
    outgoing = np.array([form_factor(e, params, k, theta, profile) for e in names])
    return mat, incoming, outgoing


def t_element(params: SystemParams, k: float, theta: float,
              profile: DeformationProfile | None = None) -> complex:
    """On-shell T-matrix element <k'|T(k^2 + i0)|k> at scattering angle theta."""
    mat, incoming, outgoing = _solve_parts(params, k, theta, profile)
    x = np.linalg.solve(mat, incoming)
    return complex(-np.dot(np.conj(outgoing), x))


def t_element_via_inverse(params: SystemParams, k: float, theta: float,
                          profile: DeformationProfile | None = None) -> complex:
    """Same as :func:`t_element` but with an explicit inverse (for checks)."""
    mat, incoming, outgoing = _solve_parts(params, k, theta, profile)
    return complex(-np.conj(outgoing) @ np.linalg.inv(mat) @ incoming)


def amplitude_prefactor(params: SystemParams, k: float) -> complex:
    if params.dimension == 2:
        return -cmath.exp(0.25j * math.pi) / 4.0 * math.sqrt(2.0 / (math.pi * k))
    return -1.0 / (4.0 * math.pi)


def amplitude(params: SystemParams, k: float, theta: float,
              profile: DeformationProfile | None = None) -> complex:
    """Scattering amplitude f(k, theta); the cross section is |f|^2."""
    return amplitude_prefactor(params, k) * t_element(params, k, theta, profile)


def cross_section_scan(params: SystemParams, k_grid: Iterable[float],
                       theta_grid: Iterable[float],
                       profile: DeformationProfile | None = None) -> list[ScatteringSample]:
    """Amplitudes on the product grid, ordered by k then theta."""
    thetas = [float(t) for t in theta_grid]
    out = []
    for k in k_grid:
        k = float(k)
        for theta in thetas:
            f = amplitude(params, k, theta, profile)
            out.append(ScatteringSample(k, theta, f, abs(f) ** 2))
    return out
