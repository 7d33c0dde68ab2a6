"""Eigenvalue flow of the principal matrix and the bound states it encodes.

A negative energy E = -nu^2 is an eigenvalue exactly when Phi(-nu^2) is
singular. Each eigenvalue branch omega_i(nu) of Phi is strictly increasing
in nu, so a branch contributes at most one bound state; roots are located
by scanning a geometric nu grid for sign changes and refining each bracket
with Brent's method.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, IncompleteScanError, NoBoundStateError
from .principal import (
    DeformationProfile,
    PrincipalMatrix,
    SystemKind,
    SystemParams,
    build_phi_bound,
    build_phi_bound_derivative,
    check_profile,
    undeformed_params,
)
from .specfun import bessel_ie, bessel_ke

__all__ = [
    "EigenPair",
    "FlowRow",
    "BoundState",
    "eigen_pair",
    "closed_form_eigenvalues",
    "eigen_flow",
    "find_bound_states",
    "ground_energy",
    "eval_eigenfunction",
    "eigenfunction_norm",
    "first_order_slope",
    "first_order_energy",
    "equivalent_radius",
]

NU_CAP = 1e4


@dataclass(frozen=True)
class EigenPair:
    omega1: float
    omega2: float | None
    vec1: tuple[float, ...]
    vec2: tuple[float, ...] | None


def _symmetric_2x2(a: float, b: float, d: float):
    """Eigen-decomposition of [[a, b], [b, d]] by one Jacobi rotation.

    Returns (low, high, v_low, v_high). The rotation is computed from the
    smaller root of t^2 + 2 tau t - 1 = 0, which avoids cancellation.
    """
    if b == 0.0:
        if a <= d:
            return a, d, (1.0, 0.0), (0.0, 1.0)
        return d, a, (0.0, 1.0), (1.0, 0.0)
    tau = (d - a) / (2.0 * b)
    if abs(tau) > 1e150:
        t = 0.5 / tau
    else:
        t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
    c = 1.0 / math.hypot(1.0, t)
    s = t * c
    first = a - t * b    # eigenvector (c, -s)
    second = d + t * b   # eigenvector (s, c)
    if first <= second:
        return first, second, (c, -s), (s, c)
    return second, first, (s, c), (c, -s)


def eigen_pair(phi: PrincipalMatrix) -> EigenPair:
    """Eigenvalues (ascending) and unit eigenvectors of a real bound-form Phi."""
    if not phi.is_real(1e-14):
        raise DomainError("eigen_pair needs a real (bound-form) matrix")
    if phi.dim == 1:
        return EigenPair(phi.entries[0].real, None, (1.0,), None)
    if phi.entry(1, 2) != phi.entry(2, 1):
        raise DomainError("matrix is not symmetric")
    low, high, v_low, v_high = _symmetric_2x2(
        phi.entry(1, 1).real, phi.entry(1, 2).real, phi.entry(2, 2).real)
    return EigenPair(low, high, v_low, v_high)


def closed_form_eigenvalues(params: SystemParams, nu: float) -> tuple[float, float]:
    """Explicit omega_1 <= omega_2 for the circle + point system.

    Written out in terms of log(nu/mu) and the Bessel products, without
    forming the matrix; serves as an independent route to the eigenvalues.
    """
    if params.kind is not SystemKind.CIRCLE_POINT:
        raise DomainError("closed-form eigenvalues are available for circle_point only")
    lam, R, a, mu = params.lambda2, params.R, params.a, params.mu
    xr, xa = nu * R, nu * a
    i0k0 = bessel_ie(0, xr) * bessel_ke(0, xr)
    i0_k0a = bessel_ie(0, xr) * bessel_ke(0, xa) * math.exp(xr - xa)
    log_term = math.log(nu / mu)
    u = lam * log_term - 2.0 * math.pi
    root = math.sqrt(lam ** 2 * (4.0 * i0_k0a ** 2 + i0k0 ** 2) + u * u
                     + 2.0 * lam * i0k0 * u)
    head = 2.0 * math.pi + lam * log_term - lam * i0k0
    scale = 4.0 * math.pi * lam
    return (head - root) / scale, (head + root) / scale


@dataclass(frozen=True)
class FlowRow:
    nu: float
    omega1: float
    omega2: float | None


def eigen_flow(params: SystemParams, nu_grid: Sequence[float],
               profile: DeformationProfile | None = None) -> list[FlowRow]:
    """Eigenvalues of Phi(-nu^2) along an ascending grid of nu."""
    grid = [float(v) for v in nu_grid]
    if not grid:
        raise DomainError("nu grid is empty")
    if grid[0] <= 0 or any(b <= a for a, b in zip(grid, grid[1:])):
        raise DomainError("nu grid must be positive and strictly ascending")
    rows = []
    for nu in grid:
        pair = eigen_pair(build_phi_bound(params, nu, profile))
        rows.append(FlowRow(nu, pair.omega1, pair.omega2))
    return rows


@dataclass(frozen=True)
class BoundState:
    nu_star: float
    energy: float
    branch: int
    eigvec: tuple[float, ...]
    det_residual: float
    vec_residual: float
    multiplicity: int = 1


def _branch_values(params, nu, profile):
    pair = eigen_pair(build_phi_bound(params, nu, profile))
    return (pair.omega1,) if pair.omega2 is None else (pair.omega1, pair.omega2)


def _default_nu_max(params: SystemParams) -> float:
    scales = [10.0 / params.R]
    if params.kind.is_hybrid:
        scales += [10.0 * params.mu, 10.0 / params.a]
    return max(scales)


def _canonical_sign(vec) -> tuple[float, ...]:
    big = max(range(len(vec)), key=lambda i: abs(vec[i]))
    sign = 1.0 if vec[big] >= 0 else -1.0
    return tuple(sign * float(v) for v in vec)


def _make_state(params, profile, nu, branch, multiplicity=1) -> BoundState:
    phi = build_phi_bound(params, nu, profile)
    pair = eigen_pair(phi)
    vec = pair.vec1 if branch == 1 else pair.vec2
    mat = phi.real_array()
    det = float(np.linalg.det(mat)) if phi.dim == 2 else float(mat[0, 0])
    residual = float(np.linalg.norm(mat @ np.asarray(vec)))
    return BoundState(nu, -nu * nu, branch, _canonical_sign(vec), abs(det),
                      residual, multiplicity)


def find_bound_states(params: SystemParams,
                      profile: DeformationProfile | None = None, *,
                      nu_min: float = 1e-6, nu_max: float | None = None,
                      points_per_decade: int = 200,
                      tol: float = 1e-12) -> list[BoundState]:
    """All bound states, most deeply bound first.

    When ``nu_max`` is not given it starts at max(10 mu, 10/R, 10/a) and is
    doubled until every branch is positive there, up to 1e4. A branch that is
    still negative at the end of the scan raises :class:`IncompleteScanError`
    carrying the states found so far. Bound states with nu below ``nu_min``
    (binding energy below nu_min^2) are not resolved.
    """
    check_profile(params, profile)
    if not (nu_min > 0 and tol > 0 and points_per_decade >= 2):
        raise DomainError("need nu_min > 0, tol > 0 and points_per_decade >= 2")
    tol = max(tol, 4.0 * np.finfo(float).eps)
    if nu_max is None:
        nu_max = max(_default_nu_max(params), 2.0 * nu_min)
        while min(_branch_values(params, nu_max, profile)) < 0 and nu_max < NU_CAP:
            nu_max = min(2.0 * nu_max, NU_CAP)
    if not nu_max > nu_min:
        raise DomainError("nu_max must exceed nu_min")

    n_points = int(math.ceil(points_per_decade * math.log10(nu_max / nu_min))) + 1
    grid = np.geomspace(nu_min, nu_max, n_points)
    values = np.array([_branch_values(params, nu, profile) for nu in grid])
    n_branches = values.shape[1]

    roots: list[tuple[float, int]] = []
    for b in range(n_branches):
        col = values[:, b]

        def branch(nu, b=b):
            return _branch_values(params, nu, profile)[b]

        for i in range(n_points - 1):
            lo, hi = col[i], col[i + 1]
            if lo == 0.0:
                roots.append((float(grid[i]), b + 1))
            elif lo * hi < 0.0:
                nu_star = brentq(branch, grid[i], grid[i + 1], xtol=1e-300,
                                 rtol=tol, maxiter=500)
                roots.append((float(nu_star), b + 1))
        if col[-1] == 0.0:
            roots.append((float(grid[-1]), b + 1))

    roots.sort(key=lambda r: (-r[0], r[1]))
    states: list[BoundState] = []
    i = 0
    while i < len(roots):
        nu, branch = roots[i]
        if i + 1 < len(roots) and abs(roots[i + 1][0] - nu) <= 1e-10 * nu \
                and roots[i + 1][1] != branch:
            states.append(_make_state(params, profile, nu, branch, multiplicity=2))
            i += 2
            continue
        states.append(_make_state(params, profile, nu, branch))
        i += 1

    if np.any(values[-1] < 0.0):
        raise IncompleteScanError(
            f"a branch is still negative at nu = {nu_max:g}; spectrum may extend "
            "below the scanned range", partial=states)
    return states


def ground_energy(params: SystemParams, profile: DeformationProfile | None = None,
                  tol: float = 1e-12) -> float:
    states = find_bound_states(params, profile, tol=tol)
    if not states:
        raise NoBoundStateError(f"no bound state for {params}")
    return states[0].energy


# ---------------------------------------------------------------------------
# eigenfunctions

def _kernels(params: SystemParams, nu: float, r) -> list[float]:
    r = np.asarray(r, dtype=float)
    dim = params.dimension
    if r.shape != (dim,):
        raise DomainError(f"position must have {dim} components")
    R = params.R
    rho = float(np.linalg.norm(r))
    if abs(rho - R) <= 1e-12 * R:
        raise DomainError("eigenfunction is not evaluated on the circle/sphere")
    r_in, r_out = min(rho, R), max(rho, R)
    out = []
    if params.kind.is_hybrid:
        point = np.zeros(dim)
        point[0 if dim == 2 else 2] = params.a
        d = float(np.linalg.norm(r - point))
        if d <= 1e-12 * params.a:
            raise DomainError("eigenfunction is singular at the point defect")
        if dim == 2:
            out.append(bessel_ke(0, nu * d) * math.exp(-nu * d) / (2.0 * math.pi))
        else:
            out.append(math.exp(-nu * d) / (4.0 * math.pi * d))
    if dim == 2:
        g2 = (bessel_ie(0, nu * r_in) * bessel_ke(0, nu * r_out)
              * math.exp(nu * (r_in - r_out)) / (2.0 * math.pi)) if r_in > 0 else \
            bessel_ke(0, nu * R) * math.exp(-nu * R) / (2.0 * math.pi)
    else:
        # sinh(nu r_in) exp(-nu r_out) / (nu r_in), finite as r_in -> 0
        if r_in > 0:
            ratio = 0.5 * (math.exp(nu * (r_in - r_out))
                           - math.exp(-nu * (r_in + r_out))) / (nu * r_in)
        else:
            ratio = math.exp(-nu * r_out)
        g2 = ratio / (4.0 * math.pi * r_out)
    out.append(g2)
    return out


def eigenfunction_norm(params: SystemParams, state: BoundState) -> float:
    """L2 norm of the unnormalised eigenfunction.

    Uses ||sum A_i R0 f_i||^2 = A^T (dPhi/dnu) A / (2 nu), which follows from
    dR0(-nu^2)/dnu = -2 nu R0(-nu^2)^2.
    """
    d_phi = build_phi_bound_derivative(params, state.nu_star)
    vec = np.asarray(state.eigvec)
    return math.sqrt(float(vec @ d_phi @ vec) / (2.0 * state.nu_star))


def eval_eigenfunction(params: SystemParams, state: BoundState, r,
                       normalize: bool = False) -> float:
    """psi(r) = sum_i A_i G_i(r) with G_i the free Green's function applied
    to the i-th defect. Positions are Cartesian; the point defect sits on
    the x axis (2D) or z axis (3D)."""
    if params.kind.is_deformed:
        raise DomainError("eigenfunctions of deformed systems are not available")
    value = float(np.dot(_kernels(params, state.nu_star, r), state.eigvec))
    if normalize:
        value /= eigenfunction_norm(params, state)
    return value


# ---------------------------------------------------------------------------
# first-order deformation energies

def _solid_angle(geometry: str) -> float:
    return 2.0 * math.pi if geometry == "circle" else 4.0 * math.pi


def equivalent_radius(params: SystemParams, profile: DeformationProfile) -> float:
    """R - eps M, M being the angular mean of psi."""
    if not params.kind.is_deformed:
        raise DomainError("equivalent radius is defined for deformed kinds")
    check_profile(params, profile)
    return params.R - profile.eps * profile.mean_integral / _solid_angle(profile.geometry)


def first_order_slope(params: SystemParams, profile: DeformationProfile,
                      nu0: float | None = None) -> float:
    """dE/d(eps) at eps = 0 from the closed first-order formulas."""
    geometry = params.kind.geometry
    if nu0 is None:
        nu0 = math.sqrt(-ground_energy(undeformed_params(params)))
    R = params.R
    S = profile.mean_integral
    if geometry == "circle":
        return -nu0 ** 2 * S / (math.pi * R)
    x = nu0 * R
    ih, i3 = bessel_ie(0.5, x), bessel_ie(1.5, x)
    kh, k3 = bessel_ke(0.5, x), bessel_ke(1.5, x)
    numerator = 0.5 / R - nu0 * ih * k3
    denominator = i3 * kh - ih * k3 + ih * kh / x
    return -(nu0 / (math.pi * R)) * (numerator / denominator) * S


def first_order_energy(params: SystemParams, profile: DeformationProfile) -> float:
    """Bound-state energy of the deformed circle/sphere to first order in eps."""
    if not params.kind.is_deformed:
        raise DomainError("first_order_energy needs a deformed kind")
    check_profile(params, profile)
    base = undeformed_params(params)
    states = find_bound_states(base)
    if not states:
        raise NoBoundStateError("the undeformed system has no bound state")
    nu0 = states[0].nu_star
    return -nu0 ** 2 + profile.eps * first_order_slope(params, profile, nu0)
