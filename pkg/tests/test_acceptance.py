"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line."""

import math
import time

import numpy as np

from hybriddelta.cli import parse_config, run
from hybriddelta.oracle import INTEGRAL_KINDS, oracle_table, perturbed_root_slope
from hybriddelta.principal import SystemParams, build_phi_bound, build_phi_scatter
from hybriddelta.profiles import make_profile
from hybriddelta.scattering import amplitude, cross_section_scan
from hybriddelta.spectrum import (
    closed_form_eigenvalues,
    eigen_flow,
    eigen_pair,
    find_bound_states,
    first_order_slope,
)

BASE_CP = SystemParams("circle_point", R=1.0, a=2.0, lambda2=10.0, mu=1.0)
SPHERE10 = SystemParams("sphere_point", R=1.0, a=2.0, lambda2=10.0, mu=1.0)
SPHERE20 = SystemParams("sphere_point", R=1.0, a=2.0, lambda2=20.0, mu=1.0)
CIRCLE = SystemParams("circle_only", R=1.0, lambda2=10.0)
SPHERE_WEAK = SystemParams("sphere_only", R=1.0, lambda2=1.0)
SPHERE_STRONG = SystemParams("sphere_only", R=1.0, lambda2=20.0)
UNDEFORMED = [BASE_CP, SPHERE10, SPHERE20, CIRCLE, SPHERE_WEAK, SPHERE_STRONG]

ORACLE_REL = 1e-6
RESIDUAL_DET = 1e-9
RESIDUAL_VEC = 1e-8
SLOPE_REL = 1e-3
ZERO_SLOPE = 1e-8
MIN_ORDER = 0.9
MIRROR_TOL = 1e-10
EIGEN_REL = 1e-12


def test_criterion_1_oracle_equivalence(criterion):
    start = time.perf_counter()
    rows = oracle_table(BASE_CP.R, BASE_CP.a, (0.1, 0.5, 1.0, 2.0, 5.0), pass_rel=ORACLE_REL)
    elapsed = time.perf_counter() - start
    kind_rows = [r for r in rows if r.identity in INTEGRAL_KINDS]
    worst = max(r.rel_err for r in kind_rows)
    ok = len(kind_rows) == 25 and all(r.passed for r in kind_rows) and elapsed < 10.0
    criterion(1, "closed forms match quadrature", ok,
              f"25 rows, worst rel {worst:.2e} <= {ORACLE_REL:g}, {elapsed:.2f} s < 10 s")
    assert ok


def test_criterion_2_monotone_flow(criterion):
    grid = np.geomspace(1e-3, 20.0, 400)
    violations = 0
    for params in UNDEFORMED:
        rows = eigen_flow(params, grid)
        branches = [[r.omega1 for r in rows]]
        if rows[0].omega2 is not None:
            branches.append([r.omega2 for r in rows])
        for w in branches:
            violations += int(np.sum(np.diff(w) <= 0))
    ok = violations == 0
    criterion(2, "eigenvalue branches strictly increasing", ok,
              f"{len(UNDEFORMED)} systems x 400 points, {violations} violations")
    assert ok


def test_criterion_3_bound_state_counts(criterion):
    base_states = find_bound_states(BASE_CP)
    counts = {
        "circle_point": len(base_states),
        "sphere_point_10": len(find_bound_states(SPHERE10)),
        "sphere_point_20": len(find_bound_states(SPHERE20)),
        "sphere_only_1": len(find_bound_states(SPHERE_WEAK)),
    }
    states = base_states + find_bound_states(SPHERE10) + find_bound_states(SPHERE20)
    det = max(s.det_residual for s in states)
    vec = max(s.vec_residual for s in states)
    ok = (counts["circle_point"] in (1, 2) and any(s.branch == 1 for s in base_states)
          and counts["sphere_point_10"] == 1 and counts["sphere_point_20"] == 2
          and counts["sphere_only_1"] == 0 and det <= RESIDUAL_DET and vec <= RESIDUAL_VEC)
    criterion(3, "bound-state counts and residuals", ok,
              f"counts {counts}, max |det| {det:.1e}, max |Phi A| {vec:.1e}")
    assert ok


def test_criterion_4_deformation_lemma(criterion):
    start = time.perf_counter()
    cases = [
        (SystemParams("deformed_circle", R=1.0, lambda2=10.0), "circle", "sin2"),
        # lambda = 10 has no sphere root (needs lambda > 4 pi R), so use 20
        (SystemParams("deformed_sphere", R=1.0, lambda2=20.0), "sphere", "sin"),
    ]
    worst_rel, worst_zero = 0.0, 0.0
    for params, geometry, name in cases:
        profile = make_profile(name, 0.01, geometry)
        formula = first_order_slope(params, profile)
        oracle = perturbed_root_slope(params, profile, eps_step=1e-4)
        worst_rel = max(worst_rel, abs(formula - oracle) / abs(oracle))
        zero_mean = make_profile("cos", 0.01, geometry, m=1)
        worst_zero = max(worst_zero, abs(first_order_slope(params, zero_mean)),
                         abs(perturbed_root_slope(params, zero_mean, eps_step=1e-4)))
    elapsed = time.perf_counter() - start
    ok = worst_rel <= SLOPE_REL and worst_zero <= ZERO_SLOPE and elapsed < 5.0
    criterion(4, "first-order slope matches equivalent radius", ok,
              f"rel {worst_rel:.1e} <= {SLOPE_REL:g}, zero-mean {worst_zero:.1e} <= {ZERO_SLOPE:g}, "
              f"{elapsed:.2f} s < 5 s")
    assert ok


def _ulps(x):
    return 4 * np.finfo(float).eps * max(abs(x), 1e-300)


def test_criterion_5_reductions_and_convergence(criterion):
    exact, linear = True, True
    orders = []
    for geometry in ("circle", "sphere"):
        deformed = SystemParams(f"deformed_{geometry}", R=1.0, lambda2=20.0)
        plain = SystemParams(f"{geometry}_only", R=1.0, lambda2=20.0)
        for build, point in ((build_phi_bound, 0.9), (build_phi_scatter, 1.7)):
            base = build(plain, point).entry(1, 1)
            for name in ("sin2", "sin", "const"):
                exact &= build(deformed, point, make_profile(name, 0.0, geometry)).entry(1, 1) == base
                d1 = build(deformed, point, make_profile(name, 0.01, geometry)).entry(1, 1) - base
                d2 = build(deformed, point, make_profile(name, 0.02, geometry)).entry(1, 1) - base
                linear &= abs(d2 - 2 * d1) <= _ulps(abs(base))
        for k, theta in ((0.8, 0.0), (2.0, 1.2), (3.5, 2.5)):
            ref = abs(amplitude(plain, k, theta)) ** 2
            for eps in (1e-2, 1e-3):
                err = [abs(abs(amplitude(deformed, k, theta, make_profile("sin2", e, geometry))) ** 2 - ref)
                       for e in (eps, eps / 2)]
                orders.append(math.log2(err[0] / err[1]))
    ok = exact and linear and min(orders) >= MIN_ORDER
    criterion(5, "deformed Phi reductions and O(eps) convergence", ok,
              f"eps=0 exact {exact}, linear to 4 ulp {linear}, min order {min(orders):.3f} >= {MIN_ORDER}")
    assert ok


def test_criterion_6_scattering_sanity(criterion):
    ks = np.linspace(0.05, 20.0, 400)
    thetas = np.linspace(0.0, 2 * math.pi, 73)
    negative = 0
    scans = [(BASE_CP, None), (SPHERE10, None), (CIRCLE, None), (SPHERE_STRONG, None),
             (SystemParams("deformed_circle", R=1.0, lambda2=10.0), make_profile("sin2", 0.01, "circle")),
             (SystemParams("deformed_sphere", R=1.0, lambda2=20.0), make_profile("sin", 0.01, "sphere"))]
    for params, profile in scans:
        for s in cross_section_scan(params, ks[::20], thetas, profile):
            negative += int(not s.dsigma >= 0)
    mirror = 0.0
    for params in (BASE_CP, SystemParams("circle_point", R=1.0, a=5.0, lambda2=20.0, mu=1.0)):
        for k in (0.5, 2.0, 6.0):
            for theta in thetas[1:37]:
                d1 = abs(amplitude(params, k, theta)) ** 2
                d2 = abs(amplitude(params, k, 2 * math.pi - theta)) ** 2
                mirror = max(mirror, abs(d1 - d2) / max(d1, 1e-300))
    positive_imag = 0
    for params in UNDEFORMED:
        for k in ks:
            phi = build_phi_scatter(params, k)
            positive_imag += sum(phi.entry(i, i).imag > 0 for i in range(1, phi.dim + 1))
    ok = negative == 0 and mirror <= MIRROR_TOL and positive_imag == 0
    criterion(6, "scattering sanity", ok,
              f"negative dsigma {negative}, mirror rel {mirror:.1e} <= {MIRROR_TOL:g}, "
              f"Im diag > 0 count {positive_imag}")
    assert ok


def test_criterion_7_closed_form_eigenvalues(criterion):
    rng = np.random.default_rng(20240501)
    worst = 0.0
    for _ in range(100):
        R = rng.uniform(0.5, 2.0)
        params = SystemParams("circle_point", R=R, a=R * rng.uniform(1.2, 5.0),
                              lambda2=rng.uniform(1.0, 50.0), mu=rng.uniform(0.2, 5.0))
        nu = math.exp(rng.uniform(math.log(1e-2), math.log(20.0)))
        pair = eigen_pair(build_phi_bound(params, nu))
        w1, w2 = closed_form_eigenvalues(params, nu)
        worst = max(worst, abs(pair.omega1 - w1) / abs(w1), abs(pair.omega2 - w2) / abs(w2))
    ok = worst <= EIGEN_REL
    criterion(7, "closed-form eigenvalues match matrix route", ok,
              f"100 seeded samples, worst rel {worst:.1e} <= {EIGEN_REL:g}")
    assert ok


def test_criterion_8_cli_determinism(criterion, tmp_path):
    from pathlib import Path

    configs = Path(__file__).resolve().parent.parent / "configs"
    jobs = [("circle_point.cfg", "bound-states"), ("sphere_point.cfg", "eigen-flow"),
            ("cross_section.cfg", "cross-section"), ("deformed_circle.cfg", "deform-energy"),
            ("oracle_check.cfg", "oracle-check")]
    identical, codes = True, []
    for name, command in jobs:
        outs = [tmp_path / f"{command}-{i}" for i in (1, 2)]
        for out in outs:
            codes.append(run(parse_config((configs / name).read_text(), command), out))
        files = sorted(p.name for p in outs[0].glob("*.csv"))
        identical &= bool(files) and all(
            (outs[0] / f).read_bytes() == (outs[1] / f).read_bytes() for f in files)
    report = (tmp_path / "oracle-check-1" / "oracle_report.csv").read_text().splitlines()[1:]
    all_pass = bool(report) and all(line.endswith(",PASS") for line in report)
    ok = identical and all_pass and all(c == 0 for c in codes)
    criterion(8, "CLI determinism and oracle-check", ok,
              f"byte-identical {identical}, {len(report)} oracle rows all PASS {all_pass}, exit codes {set(codes)}")
    assert ok
