"""Principal matrices for the six supported geometries.

Conventions (units with hbar = 2m = 1):

* 2D hybrid: point defect at (a, 0), circle of radius R centred at the
  origin, a > R. 3D hybrid: point at (0, 0, a), sphere of radius R.
* Bound form: Phi(-nu^2) with nu > 0, real entries.
* Scattering form: Phi(k^2 + i0) with k > 0, obtained from the bound form
  by the continuation nu = -i k.
* Deformed circle/sphere: the boundary is displaced by eps * psi along the
  *inward* normal, so a constant psi = c shrinks the radius to R - eps c.
  Only the first-order term in eps is kept.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Callable

import numpy as np

from .errors import DomainError
from .oracle import periodic_mean, sphere_mean
from .specfun import bessel_ie, bessel_j, bessel_ke, hankel1

__all__ = [
    "SystemKind",
    "SystemParams",
    "SpectralPoint",
    "PrincipalMatrix",
    "DeformationProfile",
    "build_phi_bound",
    "build_phi_bound_derivative",
    "build_phi_scatter",
    "deformation_coefficient_bound",
    "deformation_coefficient_scatter",
    "mean_deformation",
    "undeformed_params",
]

TWO_PI = 2.0 * math.pi
FOUR_PI = 4.0 * math.pi


class SystemKind(str, Enum):
    CIRCLE_POINT = "circle_point"
    SPHERE_POINT = "sphere_point"
    CIRCLE_ONLY = "circle_only"
    SPHERE_ONLY = "sphere_only"
    DEFORMED_CIRCLE = "deformed_circle"
    DEFORMED_SPHERE = "deformed_sphere"

    @property
    def is_hybrid(self) -> bool:
        return self in (SystemKind.CIRCLE_POINT, SystemKind.SPHERE_POINT)

    @property
    def is_deformed(self) -> bool:
        return self in (SystemKind.DEFORMED_CIRCLE, SystemKind.DEFORMED_SPHERE)

    @property
    def geometry(self) -> str:
        return "circle" if self in (SystemKind.CIRCLE_POINT, SystemKind.CIRCLE_ONLY,
                                    SystemKind.DEFORMED_CIRCLE) else "sphere"

    @property
    def dimension(self) -> int:
        return 2 if self.geometry == "circle" else 3

    @property
    def matrix_dim(self) -> int:
        return 2 if self.is_hybrid else 1


@dataclass(frozen=True)
class SystemParams:
    """Geometry and couplings.

    ``lambda2`` is the strength of the circle/sphere defect (the only
    coupling for single-defect kinds). ``a`` and ``mu`` are only used by
    the hybrid kinds and are ignored otherwise.
    """

    kind: SystemKind
    R: float
    lambda2: float
    a: float | None = None
    mu: float | None = None

    def __post_init__(self):
        try:
            kind = SystemKind(self.kind)
        except ValueError:
            raise DomainError(f"unknown system kind {self.kind!r}") from None
        object.__setattr__(self, "kind", kind)
        if not _positive(self.R):
            raise DomainError("R must be finite and > 0")
        if not _positive(self.lambda2):
            raise DomainError("lambda2 must be finite and > 0")
        if kind.is_hybrid:
            if self.a is None:
                raise DomainError(f"a is required for kind {kind.value}")
            if self.mu is None:
                raise DomainError(f"mu is required for kind {kind.value}")
            if not (_positive(self.a) and self.a > self.R):
                raise DomainError("the point defect must lie outside: a > R")
            if not _positive(self.mu):
                raise DomainError("mu must be finite and > 0")

    @property
    def dimension(self) -> int:
        return self.kind.dimension

    def with_radius(self, R: float) -> "SystemParams":
        return replace(self, R=R)


def _positive(x) -> bool:
    return x is not None and math.isfinite(x) and x > 0


def undeformed_params(params: SystemParams) -> SystemParams:
    """The single-defect system a deformed kind reduces to at eps = 0."""
    kind = params.kind
    if kind in (SystemKind.DEFORMED_CIRCLE, SystemKind.CIRCLE_ONLY):
        return SystemParams(SystemKind.CIRCLE_ONLY, R=params.R, lambda2=params.lambda2)
    if kind in (SystemKind.DEFORMED_SPHERE, SystemKind.SPHERE_ONLY):
        return SystemParams(SystemKind.SPHERE_ONLY, R=params.R, lambda2=params.lambda2)
    raise DomainError(f"kind {kind.value} is not a single-defect system")


@dataclass(frozen=True)
class SpectralPoint:
    """Either bound(nu) at E = -nu^2 or scatter(k) at E = k^2 + i0."""

    kind: str
    value: float

    def __post_init__(self):
        if self.kind not in ("bound", "scatter"):
            raise DomainError(f"unknown spectral point kind {self.kind!r}")

    @property
    def energy(self) -> float:
        return -self.value ** 2 if self.kind == "bound" else self.value ** 2


@dataclass(frozen=True)
class PrincipalMatrix:
    dim: int
    entries: tuple[complex, ...]
    point: SpectralPoint

    @classmethod
    def scalar(cls, value: complex, point: SpectralPoint) -> "PrincipalMatrix":
        return cls(1, (complex(value),), point)

    @classmethod
    def symmetric(cls, p11: complex, p12: complex, p22: complex,
                  point: SpectralPoint) -> "PrincipalMatrix":
        off = complex(p12)
        return cls(2, (complex(p11), off, off, complex(p22)), point)

    def entry(self, i: int, j: int) -> complex:
        """Entry in 1-based (row, column) indexing."""
        if not (1 <= i <= self.dim and 1 <= j <= self.dim):
            raise IndexError(f"entry ({i}, {j}) out of range for dim {self.dim}")
        return self.entries[(i - 1) * self.dim + (j - 1)]

    def to_array(self) -> np.ndarray:
        return np.array(self.entries, dtype=complex).reshape(self.dim, self.dim)

    def is_real(self, tol: float = 0.0) -> bool:
        return all(abs(z.imag) <= tol * max(1.0, abs(z)) for z in self.entries)

    def real_array(self) -> np.ndarray:
        return np.array([z.real for z in self.entries]).reshape(self.dim, self.dim)


# ---------------------------------------------------------------------------
# deformation profiles

@dataclass(frozen=True)
class DeformationProfile:
    """Normal displacement eps * psi of a circle or sphere (inward).

    ``psi`` takes theta for the circle, theta for an azimuthal sphere
    profile, and (theta, phi) otherwise; it should accept numpy arrays.
    The angular integral and a sampled sup|psi| are computed once at
    construction, so instances are immutable and safe to share.
    """

    psi: Callable
    eps: float
    geometry: str
    azimuthal: bool = True
    name: str = "custom"
    mean_integral: float = field(init=False, repr=False)
    sup_abs: float = field(init=False, repr=False)

    def __post_init__(self):
        if self.geometry not in ("circle", "sphere"):
            raise DomainError(f"geometry must be circle or sphere, got {self.geometry!r}")
        if not math.isfinite(self.eps):
            raise DomainError("eps must be finite")
        if self.geometry == "circle":
            object.__setattr__(self, "azimuthal", True)
            mean = periodic_mean(self.psi)
            grid = (np.linspace(0.0, TWO_PI, 1025)[:-1],)
        else:
            mean = sphere_mean(self.psi, azimuthal=self.azimuthal)
            theta = np.linspace(0.0, math.pi, 257)
            if self.azimuthal:
                grid = (theta,)
            else:
                phi = np.linspace(0.0, TWO_PI, 257)[:-1]
                grid = (theta[:, None], phi[None, :])
        from .oracle import _evaluate
        sup = float(np.max(np.abs(_evaluate(self.psi, *grid))))
        object.__setattr__(self, "mean_integral", mean)
        object.__setattr__(self, "sup_abs", sup)

    def with_eps(self, eps: float) -> "DeformationProfile":
        return replace(self, eps=eps)

    def evaluate(self, *angles):
        from .oracle import _evaluate
        return _evaluate(self.psi, *(np.asarray(a, dtype=float) for a in angles))


def mean_deformation(profile: DeformationProfile, geometry: str | None = None) -> float:
    """int psi dtheta over the circle or int psi dOmega over the sphere."""
    if geometry is not None and geometry != profile.geometry:
        raise DomainError(f"profile was built for a {profile.geometry}, not a {geometry}")
    return profile.mean_integral


def check_profile(params: SystemParams, profile: DeformationProfile | None) -> None:
    """Raise unless the profile is present exactly for deformed kinds and
    the deformation is small compared with R."""
    if params.kind.is_deformed:
        if profile is None:
            raise DomainError(f"kind {params.kind.value} needs a deformation profile")
        if profile.geometry != params.kind.geometry:
            raise DomainError("profile geometry does not match the system")
        if abs(profile.eps) * profile.sup_abs >= 0.1 * params.R:
            raise DomainError(
                f"deformation too large: |eps| sup|psi| = "
                f"{abs(profile.eps) * profile.sup_abs:.3g} must stay below R/10")
    elif profile is not None:
        raise DomainError(f"kind {params.kind.value} does not accept a deformation profile")


# ---------------------------------------------------------------------------
# bound form

def _check_positive(name: str, x: float) -> float:
    x = float(x)
    if not (math.isfinite(x) and x > 0):
        raise DomainError(f"{name} must be finite and > 0, got {x!r}")
    return x


def _circle_self(nu: float, R: float) -> float:
    """I0(nu R) K0(nu R)."""
    x = nu * R
    return bessel_ie(0, x) * bessel_ke(0, x)


def _sphere_self(nu: float, R: float) -> float:
    """I1/2(nu R) K1/2(nu R)."""
    x = nu * R
    return bessel_ie(0.5, x) * bessel_ke(0.5, x)


def deformation_coefficient_bound(geometry: str, R: float, nu: float) -> float:
    """d Phi~ / d(eps) divided by the angular integral of psi, at -nu^2."""
    x = nu * R
    if geometry == "circle":
        bracket = -0.5 / R + nu * bessel_ie(0, x) * bessel_ke(1, x)
        return -bracket / (2.0 * math.pi ** 2)
    bracket = -0.5 / R + nu * bessel_ie(0.5, x) * bessel_ke(1.5, x)
    return -bracket / (8.0 * math.pi ** 2 * R)


def build_phi_bound(params: SystemParams, nu: float,
                    profile: DeformationProfile | None = None) -> PrincipalMatrix:
    """Phi(-nu^2) for any system kind."""
    nu = _check_positive("nu", nu)
    check_profile(params, profile)
    point = SpectralPoint("bound", nu)
    kind, R, lam = params.kind, params.R, params.lambda2
    if kind is SystemKind.CIRCLE_POINT:
        a, mu = params.a, params.mu
        p11 = math.log(nu / mu) / TWO_PI
        p12 = -(bessel_ke(0, nu * a) * bessel_ie(0, nu * R)
                * math.exp(nu * (R - a))) / TWO_PI
        p22 = 1.0 / lam - _circle_self(nu, R) / TWO_PI
        return PrincipalMatrix.symmetric(p11, p12, p22, point)
    if kind is SystemKind.SPHERE_POINT:
        a, mu = params.a, params.mu
        p11 = (nu - mu) / FOUR_PI
        p12 = -(bessel_ke(0.5, nu * a) * bessel_ie(0.5, nu * R)
                * math.exp(nu * (R - a))) / (FOUR_PI * math.sqrt(a * R))
        p22 = 1.0 / lam - _sphere_self(nu, R) / (FOUR_PI * R)
        return PrincipalMatrix.symmetric(p11, p12, p22, point)
    if kind.geometry == "circle":
        value = 1.0 / lam - _circle_self(nu, R) / TWO_PI
    else:
        value = 1.0 / lam - _sphere_self(nu, R) / (FOUR_PI * R)
    if profile is not None:
        value += profile.eps * (deformation_coefficient_bound(kind.geometry, R, nu)
                                * profile.mean_integral)
    return PrincipalMatrix.scalar(value, point)


def build_phi_bound_derivative(params: SystemParams, nu: float) -> np.ndarray:
    """d Phi(-nu^2) / d nu for the undeformed kinds, as a real array.

    Equals 2 nu times the Gram matrix of the vectors R0(-nu^2) f_i, which
    makes it positive definite; used for eigenfunction norms.
    """
    nu = _check_positive("nu", nu)
    kind, R = params.kind, params.R
    if kind.is_deformed:
        raise DomainError("derivative is only provided for undeformed kinds")
    x = nu * R
    if kind.geometry == "circle":
        i0, i1 = bessel_ie(0, x), bessel_ie(1, x)
        k0, k1 = bessel_ke(0, x), bessel_ke(1, x)
        d22 = -R * (i1 * k0 - i0 * k1) / TWO_PI
        if kind is SystemKind.CIRCLE_ONLY:
            return np.array([[d22]])
        a = params.a
        scale = math.exp(nu * (R - a))
        d12 = -(-a * bessel_ke(1, nu * a) * i0 + R * bessel_ke(0, nu * a) * i1) \
            * scale / TWO_PI
        d11 = 1.0 / (TWO_PI * nu)
    else:
        e2 = math.exp(-2.0 * x)
        h_prime = 2.0 * R * e2 / nu + math.expm1(-2.0 * x) / nu ** 2
        d22 = -h_prime / (8.0 * math.pi * R * R)
        if kind is SystemKind.SPHERE_ONLY:
            return np.array([[d22]])
        a = params.a
        # g = exp(-nu a) sinh(nu R) / nu
        ea_sinh = 0.5 * (math.exp(nu * (R - a)) - math.exp(-nu * (R + a)))
        ea_cosh = 0.5 * (math.exp(nu * (R - a)) + math.exp(-nu * (R + a)))
        g = ea_sinh / nu
        g_prime = (R * ea_cosh - a * ea_sinh) / nu - g / nu
        d12 = -g_prime / (FOUR_PI * a * R)
        d11 = 1.0 / FOUR_PI
    return np.array([[d11, d12], [d12, d22]])


# ---------------------------------------------------------------------------
# scattering form

def deformation_coefficient_scatter(geometry: str, R: float, k: float) -> complex:
    """Continuation of :func:`deformation_coefficient_bound` to k^2 + i0."""
    x = k * R
    if geometry == "circle":
        bracket = -0.5 / R + 0.5j * math.pi * k * bessel_j(0, x) * hankel1(1, x)
        return -bracket / (2.0 * math.pi ** 2)
    bracket = -0.5 / R + 0.5j * math.pi * k * bessel_j(0.5, x) * hankel1(1.5, x)
    return -bracket / (8.0 * math.pi ** 2 * R)


def build_phi_scatter(params: SystemParams, k: float,
                      profile: DeformationProfile | None = None) -> PrincipalMatrix:
    """Phi(k^2 + i0): boundary value of the principal matrix on the
    positive energy axis."""
    k = _check_positive("k", k)
    check_profile(params, profile)
    point = SpectralPoint("scatter", k)
    kind, R, lam = params.kind, params.R, params.lambda2
    x = k * R
    if kind.geometry == "circle":
        self_term = 0.25j * bessel_j(0, x) * hankel1(0, x)
    else:
        self_term = 0.125j * bessel_j(0.5, x) * hankel1(0.5, x) / R
    if kind is SystemKind.CIRCLE_POINT:
        a, mu = params.a, params.mu
        p11 = complex(math.log(k / mu), -0.5 * math.pi) / TWO_PI
        p12 = -0.25j * hankel1(0, k * a) * bessel_j(0, x)
        return PrincipalMatrix.symmetric(p11, p12, 1.0 / lam - self_term, point)
    if kind is SystemKind.SPHERE_POINT:
        a, mu = params.a, params.mu
        p11 = complex(-mu, -k) / FOUR_PI
        p12 = -0.125j * hankel1(0.5, k * a) * bessel_j(0.5, x) / math.sqrt(a * R)
        return PrincipalMatrix.symmetric(p11, p12, 1.0 / lam - self_term, point)
    value = 1.0 / lam - self_term
    if profile is not None:
        value += profile.eps * (deformation_coefficient_scatter(kind.geometry, R, k)
                                * profile.mean_integral)
    return PrincipalMatrix.scalar(value, point)
