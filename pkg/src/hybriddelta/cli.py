"""Command-line front end.

Usage::

    hybriddelta <command> --config run.cfg [--out DIR]

The configuration is a flat ``key = value`` file; ``#`` starts a comment.
Keys are grouped by prefix (``system.``, ``deformation.``, ``grid.``,
``tolerances.``). Unknown keys are rejected before anything is computed.

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import datetime as _dt
import math
import os
import sys
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .errors import (
    ConfigError,
    ConvergenceError,
    DomainError,
    IncompleteScanError,
    NearResonanceError,
    NoBoundStateError,
)
from .oracle import DEFAULT_NU_GRID, QuadratureSpec, oracle_table, perturbed_root_slope
from .principal import DeformationProfile, SystemKind, SystemParams, check_profile, undeformed_params
from .profiles import PROFILE_NAMES, make_profile
from .scattering import cross_section_scan
from .spectrum import (
    eigen_flow,
    equivalent_radius,
    find_bound_states,
    first_order_energy,
    first_order_slope,
    ground_energy,
)

COMMANDS = ("bound-states", "eigen-flow", "cross-section", "deform-energy", "oracle-check")

FLOAT_KEYS = {
    "system.R", "system.a", "system.lambda2", "system.mu",
    "deformation.eps", "deformation.c",
    "grid.nu_min", "grid.nu_max", "grid.k", "grid.k_min", "grid.k_max",
    "grid.theta", "grid.eps_step",
    "tolerances.root_tol", "tolerances.quad_abs", "tolerances.quad_rel",
    "tolerances.pass_rel",
}
INT_KEYS = {"deformation.m", "grid.nu_points", "grid.k_points", "grid.theta_points",
            "grid.points_per_decade"}
LIST_KEYS = {"deformation.cos_coeffs", "deformation.sin_coeffs", "grid.eps_values",
             "grid.oracle_nu"}
STRING_KEYS = {"command", "system.kind", "deformation.profile", "output_dir"}
KNOWN_KEYS = FLOAT_KEYS | INT_KEYS | LIST_KEYS | STRING_KEYS

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERIC = 3


@dataclass
class RunConfig:
    command: str | None
    values: dict
    lines: list[tuple[str, str]]
    params: SystemParams | None = None
    profile: DeformationProfile | None = None
    line_of: dict = field(default_factory=dict)

    @property
    def output_dir(self) -> str | None:
        return self.values.get("output_dir")

    def get(self, key, default=None):
        return self.values.get(key, default)


# ---------------------------------------------------------------------------
# parsing

def _convert(key: str, raw: str, line: int):
    try:
        if key in FLOAT_KEYS:
            value = float(raw)
            if not math.isfinite(value):
                raise ValueError
            return value
        if key in INT_KEYS:
            return int(raw)
        if key in LIST_KEYS:
            items = [s.strip() for s in raw.split(",") if s.strip()]
            values = [float(s) for s in items]
            if not all(math.isfinite(v) for v in values):
                raise ValueError
            return values
    except ValueError:
        raise ConfigError(f"invalid value {raw!r} for {key}", line) from None
    return raw


def parse_config(text: str, command: str | None = None) -> RunConfig:
    """Parse and validate a configuration.

    ``command`` (from the command line) takes part in validation; a
    ``command`` key in the file must agree with it when both are given.
    """
    values: dict = {}
    lines: list[tuple[str, str]] = []
    line_of: dict = {}
    for number, raw_line in enumerate(text.splitlines(), start=1):
        content = raw_line.split("#", 1)[0].strip()
        if not content:
            continue
        if "=" not in content:
            raise ConfigError(f"expected 'key = value', got {content!r}", number)
        key, _, raw = content.partition("=")
        key, raw = key.strip(), raw.strip()
        if not key:
            raise ConfigError("missing key before '='", number)
        if key not in KNOWN_KEYS:
            raise ConfigError(f"unknown key {key!r}", number)
        if key in values:
            raise ConfigError(f"duplicate key {key!r}", number)
        if not raw:
            raise ConfigError(f"missing value for {key}", number)
        values[key] = _convert(key, raw, number)
        lines.append((key, raw))
        line_of[key] = number

    file_command = values.get("command")
    if command and file_command and command != file_command:
        raise ConfigError(f"config is for {file_command!r} but command {command!r} was requested",
                          line_of["command"])
    command = command or file_command
    if command is None:
        raise ConfigError("no command given")
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}; choose from {', '.join(COMMANDS)}")
    config = RunConfig(command, values, lines, line_of=line_of)
    _validate(config)
    return config


def _require(config: RunConfig, *keys: str) -> None:
    for key in keys:
        if key not in config.values:
            raise ConfigError(f"missing required key {key!r} for {config.command}")


def _build_params(config: RunConfig) -> SystemParams:
    _require(config, "system.kind", "system.R", "system.lambda2")
    kind = config.get("system.kind")
    try:
        kind = SystemKind(kind)
    except ValueError:
        raise ConfigError(f"unknown system.kind {kind!r}",
                          config.line_of.get("system.kind")) from None
    if kind.is_hybrid:
        _require(config, "system.a", "system.mu")
    try:
        return SystemParams(kind, R=config.get("system.R"),
                            lambda2=config.get("system.lambda2"),
                            a=config.get("system.a"), mu=config.get("system.mu"))
    except DomainError as exc:
        raise ConfigError(str(exc)) from None


def _build_profile(config: RunConfig, params: SystemParams) -> DeformationProfile | None:
    deformation_keys = [k for k in config.values if k.startswith("deformation.")]
    if not params.kind.is_deformed:
        if deformation_keys:
            raise ConfigError(f"deformation keys are not allowed for kind {params.kind.value}",
                              config.line_of[deformation_keys[0]])
        return None
    _require(config, "deformation.profile")
    name = config.get("deformation.profile")
    if name not in PROFILE_NAMES:
        raise ConfigError(f"unknown profile {name!r}; choose from {', '.join(PROFILE_NAMES)}",
                          config.line_of["deformation.profile"])
    eps = config.get("deformation.eps")
    if eps is None:
        eps_values = config.get("grid.eps_values")
        if config.command != "deform-energy" or not eps_values:
            raise ConfigError(f"missing required key 'deformation.eps' for {config.command}")
        eps = max(eps_values, key=abs)
    try:
        profile = make_profile(name, eps, params.kind.geometry,
                               c=config.get("deformation.c", 1.0),
                               m=config.get("deformation.m", 1),
                               cos_coeffs=config.get("deformation.cos_coeffs", ()),
                               sin_coeffs=config.get("deformation.sin_coeffs", ()))
        check_profile(params, profile)
    except DomainError as exc:
        raise ConfigError(str(exc)) from None
    return profile


def _validate(config: RunConfig) -> None:
    cmd = config.command
    if cmd == "oracle-check":
        _require(config, "system.R", "system.a")
        R, a = config.get("system.R"), config.get("system.a")
        if not (R > 0 and a > R):
            raise ConfigError("oracle-check needs 0 < system.R < system.a")
        if any(v <= 0 for v in config.get("grid.oracle_nu", [1.0])):
            raise ConfigError("grid.oracle_nu values must be positive")
        return
    params = _build_params(config)
    config.params = params
    config.profile = _build_profile(config, params)
    if cmd == "eigen-flow":
        _require(config, "grid.nu_min", "grid.nu_max", "grid.nu_points")
        if not (0 < config.get("grid.nu_min") < config.get("grid.nu_max")):
            raise ConfigError("need 0 < grid.nu_min < grid.nu_max")
        if config.get("grid.nu_points") < 2:
            raise ConfigError("grid.nu_points must be >= 2")
    elif cmd == "cross-section":
        has_k = "grid.k" in config.values
        has_k_range = any(k in config.values for k in ("grid.k_min", "grid.k_max", "grid.k_points"))
        if has_k == has_k_range:
            raise ConfigError("give either grid.k or grid.k_min/grid.k_max/grid.k_points")
        if has_k_range:
            _require(config, "grid.k_min", "grid.k_max", "grid.k_points")
            if not (0 < config.get("grid.k_min") <= config.get("grid.k_max")):
                raise ConfigError("need 0 < grid.k_min <= grid.k_max")
            if config.get("grid.k_points") < 1:
                raise ConfigError("grid.k_points must be >= 1")
        elif not config.get("grid.k") > 0:
            raise ConfigError("grid.k must be > 0")
        if ("grid.theta" in config.values) == ("grid.theta_points" in config.values):
            raise ConfigError("give either grid.theta or grid.theta_points")
        if config.get("grid.theta_points", 2) < 2:
            raise ConfigError("grid.theta_points must be >= 2")
    elif cmd == "deform-energy":
        if not config.params.kind.is_deformed:
            raise ConfigError("deform-energy needs a deformed kind")
        step = config.get("grid.eps_step", 1e-4)
        if not 1e-6 <= step <= 1e-3:
            raise ConfigError("grid.eps_step must lie in [1e-6, 1e-3]")
        for eps in config.get("grid.eps_values", []):
            try:
                check_profile(config.params, config.profile.with_eps(eps))
            except DomainError as exc:
                raise ConfigError(str(exc), config.line_of["grid.eps_values"]) from None


# ---------------------------------------------------------------------------
# commands

def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    return format(float(x), ".17g")


def _quad_spec(config: RunConfig) -> QuadratureSpec:
    return QuadratureSpec(abs_tol=config.get("tolerances.quad_abs", 1e-10),
                          rel_tol=config.get("tolerances.quad_rel", 1e-8))


def _cmd_bound_states(config: RunConfig):
    params = config.params
    states = find_bound_states(params, config.profile,
                               points_per_decade=config.get("grid.points_per_decade", 200),
                               tol=config.get("tolerances.root_tol", 1e-12),
                               nu_min=config.get("grid.nu_min", 1e-6),
                               nu_max=config.get("grid.nu_max"))
    header = ["kind", "branch", "nu_star", "energy", "A1", "A2", "det_residual", "vec_residual"]
    rows = []
    for s in states:
        a2 = s.eigvec[1] if len(s.eigvec) > 1 else None
        rows.append([params.kind.value, str(s.branch), _fmt(s.nu_star), _fmt(s.energy),
                     _fmt(s.eigvec[0]), _fmt(a2), _fmt(s.det_residual), _fmt(s.vec_residual)])
    return {"bound_states.csv": (header, rows)}


def _cmd_eigen_flow(config: RunConfig):
    grid = np.geomspace(config.get("grid.nu_min"), config.get("grid.nu_max"),
                        config.get("grid.nu_points"))
    flow = eigen_flow(config.params, grid, config.profile)
    rows = [[_fmt(r.nu), _fmt(r.omega1), _fmt(r.omega2)] for r in flow]
    return {"eigenflow.csv": (["nu", "omega1", "omega2"], rows)}


def _cmd_cross_section(config: RunConfig):
    if "grid.k" in config.values:
        ks = [config.get("grid.k")]
    else:
        ks = np.linspace(config.get("grid.k_min"), config.get("grid.k_max"),
                         config.get("grid.k_points"))
    if "grid.theta" in config.values:
        thetas = [config.get("grid.theta")]
    else:
        top = 2.0 * math.pi if config.params.dimension == 2 else math.pi
        thetas = np.linspace(0.0, top, config.get("grid.theta_points"))
    samples = cross_section_scan(config.params, ks, thetas, config.profile)
    rows = [[_fmt(s.k), _fmt(s.theta), _fmt(s.amplitude.real), _fmt(s.amplitude.imag),
             _fmt(s.dsigma)] for s in samples]
    return {"cross_section.csv": (["k", "theta", "re_f", "im_f", "dsigma"], rows)}


def _cmd_deform_energy(config: RunConfig):
    params, profile = config.params, config.profile
    eps_values = config.get("grid.eps_values") or [profile.eps]
    step = config.get("grid.eps_step", 1e-4)
    tol = config.get("tolerances.root_tol", 1e-12)
    base = undeformed_params(params)
    nu0 = math.sqrt(-ground_energy(base, tol=tol))
    slope_formula = first_order_slope(params, profile, nu0)
    slope_oracle = perturbed_root_slope(params, profile, step)
    diff = abs(slope_formula - slope_oracle)
    rel = diff / abs(slope_oracle) if slope_oracle != 0.0 else diff
    rows = []
    for eps in eps_values:
        p = profile.with_eps(eps)
        e_first = first_order_energy(params, p)
        e_exact = ground_energy(base.with_radius(equivalent_radius(params, p)), tol=tol)
        rows.append([_fmt(eps), _fmt(e_first), _fmt(e_exact), _fmt(slope_formula),
                     _fmt(slope_oracle), _fmt(rel)])
    header = ["eps", "E_first_order", "E_equivalent_radius_exact", "slope_formula",
              "slope_oracle", "rel_diff"]
    return {"deform_energy.csv": (header, rows)}


def _cmd_oracle_check(config: RunConfig):
    table = oracle_table(config.get("system.R"), config.get("system.a"),
                         tuple(config.get("grid.oracle_nu", DEFAULT_NU_GRID)),
                         _quad_spec(config), config.get("tolerances.pass_rel", 1e-6))
    rows = [[r.identity, r.parameters, _fmt(r.closed_form), _fmt(r.quadrature),
             _fmt(r.abs_err), _fmt(r.rel_err), "PASS" if r.passed else "FAIL"]
            for r in table]
    header = ["identity", "parameters", "closed_form", "quadrature", "abs_err",
              "rel_err", "status"]
    return {"oracle_report.csv": (header, rows)}, all(r.passed for r in table)


HANDLERS = {
    "bound-states": _cmd_bound_states,
    "eigen-flow": _cmd_eigen_flow,
    "cross-section": _cmd_cross_section,
    "deform-energy": _cmd_deform_energy,
    "oracle-check": _cmd_oracle_check,
}


# ---------------------------------------------------------------------------
# output

def _write_csv(path: Path, header, rows) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(header)
            writer.writerows(rows)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _write_manifest(path: Path, config: RunConfig, seconds: float, status: str) -> None:
    stamp = _dt.datetime.now(_dt.timezone.utc).isoformat(timespec="seconds")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"command = {config.command}\n")
        for key, raw in config.lines:
            if key != "command":
                fh.write(f"{key} = {raw}\n")
        fh.write(f"# version = hybriddelta {__version__}\n")
        fh.write(f"# timestamp = {stamp}\n")
        fh.write(f"# wall_seconds = {seconds:.3f}\n")
        fh.write(f"# status = {status}\n")


def run(config: RunConfig, out_dir: str | os.PathLike | None = None) -> int:
    """Execute a parsed configuration and write its outputs; returns the exit code."""
    out = Path(out_dir or config.output_dir or ".")
    started = time.perf_counter()
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        print(f"error: cannot create output directory: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    written: list[Path] = []
    try:
        result = HANDLERS[config.command](config)
        ok = True
        if isinstance(result, tuple):
            result, ok = result
        for name, (header, rows) in result.items():
            path = out / name
            _write_csv(path, header, rows)
            written.append(path)
        manifest = out / "manifest.txt"
        _write_manifest(manifest, config, time.perf_counter() - started,
                        "ok" if ok else "oracle mismatch")
        if not ok:
            print("error: oracle check reported FAIL rows", file=sys.stderr)
            return EXIT_NUMERIC
        return EXIT_OK
    except (ConvergenceError, NoBoundStateError, IncompleteScanError,
            NearResonanceError, ArithmeticError) as exc:
        for path in written:
            path.unlink(missing_ok=True)
        print(f"error: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except DomainError as exc:
        for path in written:
            path.unlink(missing_ok=True)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="hybriddelta",
        description="Bound states and scattering for delta interactions on a point "
                    "plus a circle/sphere.")
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", required=True, help="path to the key = value config")
    parser.add_argument("--out", default=None, help="output directory (overrides output_dir)")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        text = Path(args.config).read_text(encoding="utf-8")
    except OSError as exc:
        print(f"error: cannot read config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        config = parse_config(text, args.command)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return run(config, args.out)


if __name__ == "__main__":
    sys.exit(main())
