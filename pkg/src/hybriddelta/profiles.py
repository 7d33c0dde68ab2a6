"""Named deformation profiles used by the command-line front end."""

from __future__ import annotations

import numpy as np

from .errors import DomainError
from .principal import DeformationProfile

__all__ = ["PROFILE_NAMES", "make_profile"]

PROFILE_NAMES = ("const", "sin2", "sin", "cos", "fourier")


def _const(c):
    return lambda theta: np.full(np.shape(theta), float(c))


def _fourier(cos_coeffs, sin_coeffs):
    cos_coeffs = [float(c) for c in cos_coeffs]
    sin_coeffs = [float(s) for s in sin_coeffs]

    def psi(theta):
        theta = np.asarray(theta, dtype=float)
        out = np.zeros_like(theta)
        for m, c in enumerate(cos_coeffs):
            out = out + c * np.cos(m * theta)
        for m, s in enumerate(sin_coeffs, start=1):
            out = out + s * np.sin(m * theta)
        return out
    return psi


def make_profile(name: str, eps: float, geometry: str, *, c: float = 1.0,
                 m: int = 1, cos_coeffs=(), sin_coeffs=()) -> DeformationProfile:
    """Build one of the named profiles.

    const: psi = c; sin2: sin^2(theta); sin: sin(theta); cos: cos(m theta);
    fourier: sum_m a_m cos(m theta) + sum_m b_m sin(m theta), with the cosine
    list starting at m = 0 and the sine list at m = 1. On the sphere theta is
    the polar angle and all profiles are azimuthal.
    """
    if name == "const":
        psi = _const(c)
        label = f"const({c!r})"
    elif name == "sin2":
        psi, label = (lambda theta: np.sin(theta) ** 2), "sin2"
    elif name == "sin":
        psi, label = np.sin, "sin"
    elif name == "cos":
        if int(m) != m:
            raise DomainError("cos profile needs an integer m")
        m = int(m)
        psi, label = (lambda theta: np.cos(m * theta)), f"cos({m})"
    elif name == "fourier":
        if not (len(cos_coeffs) or len(sin_coeffs)):
            raise DomainError("fourier profile needs at least one coefficient")
        psi = _fourier(cos_coeffs, sin_coeffs)
        label = f"fourier({list(cos_coeffs)}, {list(sin_coeffs)})"
    else:
        raise DomainError(f"unknown profile {name!r}; choose from {', '.join(PROFILE_NAMES)}")
    return DeformationProfile(psi=psi, eps=float(eps), geometry=geometry,
                              azimuthal=True, name=label)
