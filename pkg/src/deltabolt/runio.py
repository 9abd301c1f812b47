"""Config files, report formatting, and the run manifest.

Configs are INI files with a fixed schema; unknown sections or keys are hard
errors, as are malformed values.  Reports are plain delimited text with every
float in shortest round-trip decimal form, so identical runs produce
byte-identical files.  Timestamps appear only in the manifest.
"""

from __future__ import annotations

import configparser
import hashlib
import json
import math
import os

import numpy as np

from .bounds import VerificationRecord, _fmt
from .collision import QuadratureSpec
from .grid import Distribution, GridSpec, maxwellian
from .integrator import SimulationConfig, TimeSeriesRecord
from .kernel import KernelParams
from .landau import GrazingGapRecord
from .snapshot import read_snapshot


class ConfigError(ValueError):
    pass


def _parse_bool(s: str) -> bool:
    low = s.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _parse_vec3(s: str) -> tuple[float, float, float]:
    parts = [float(tok) for tok in s.split(",")]
    if len(parts) != 3:
        raise ValueError(f"expected three comma-separated numbers, got {s!r}")
    return tuple(parts)


def _parse_float_list(s: str) -> tuple[float, ...]:
    vals = tuple(float(tok) for tok in s.split(",") if tok.strip())
    if not vals:
        raise ValueError(f"empty list: {s!r}")
    return vals


def _parse_p_list(s: str) -> tuple[float, ...]:
    vals = []
    for tok in s.split(","):
        tok = tok.strip()
        if not tok:
            continue
        vals.append(math.inf if tok == "inf" else float(tok))
    if not vals:
        raise ValueError(f"empty list: {s!r}")
    return tuple(vals)


_PARSERS = {
    "float": float,
    "int": int,
    "bool": _parse_bool,
    "str": str.strip,
    "vec3": _parse_vec3,
    "flist": _parse_float_list,
    "plist": _parse_p_list,
}

_SCHEMA = {
    "kernel": {"eps": "float", "gamma": "float"},
    "grid": {"n": "int", "v_max": "float"},
    "quadrature": {"m_phi": "int", "interpolation": "str"},
    "time": {
        "dt": "float",
        "t_end": "float",
        "report_every": "int",
        "lp_list": "plist",
        "conservation_correction": "bool",
    },
    "monitors": {"entropy_tol": "float", "conservation_tol": "float", "ceiling_tol": "float"},
    "output": {
        "directory": "str",
        "time_series": "str",
        "snapshot_every": "int",
        "snapshot_format": "str",
        "grazing_report": "str",
    },
    "initial": {
        "kind": "str",
        "mass": "float",
        "bulk": "vec3",
        "temperature": "float",
        "offset": "vec3",
        "path": "str",
    },
    "grazing": {
        "eps_list": "flist",
        "gamma_list": "flist",
        "phi": "str",
        "phi_center": "vec3",
        "phi_scale": "float",
    },
}


def load_config(path) -> dict:
    """Parse and validate an INI config into {section: {key: typed value}}."""
    parser = configparser.ConfigParser(interpolation=None, default_section="__defaults__")
    try:
        with open(path, "r") as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path!r}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"malformed config {path!r}: {exc}") from exc
    config = {}
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown config section [{section}]")
        allowed = _SCHEMA[section]
        parsed = {}
        for key, raw in parser.items(section):
            if key not in allowed:
                raise ConfigError(f"unknown key {key!r} in section [{section}]")
            try:
                parsed[key] = _PARSERS[allowed[key]](raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for {section}.{key}: {exc}") from exc
        config[section] = parsed
    return config


def _require(config: dict, section: str, keys=()) -> dict:
    if section not in config:
        raise ConfigError(f"missing required section [{section}]")
    sec = config[section]
    for key in keys:
        if key not in sec:
            raise ConfigError(f"missing required key {key!r} in section [{section}]")
    return sec


def kernel_params(config: dict) -> KernelParams:
    sec = _require(config, "kernel", ("eps", "gamma"))
    try:
        return KernelParams(sec["eps"], sec["gamma"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def grid_spec(config: dict) -> GridSpec:
    sec = _require(config, "grid", ("n", "v_max"))
    try:
        return GridSpec(sec["n"], sec["v_max"])
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def quadrature_spec(config: dict) -> QuadratureSpec:
    sec = config.get("quadrature", {})
    try:
        return QuadratureSpec(
            m_phi=sec.get("m_phi", 16),
            interpolation=sec.get("interpolation", "trilinear"),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def simulation_config(config: dict) -> SimulationConfig:
    time_sec = _require(config, "time", ("dt", "t_end"))
    monitors = config.get("monitors", {})
    try:
        return SimulationConfig(
            kernel=kernel_params(config),
            grid=grid_spec(config),
            quad=quadrature_spec(config),
            dt=time_sec["dt"],
            t_end=time_sec["t_end"],
            report_every=time_sec.get("report_every", 1),
            lp_list=time_sec.get("lp_list", (1.0, 2.0, math.inf)),
            conservation_correction=time_sec.get("conservation_correction", False),
            entropy_tol=monitors.get("entropy_tol", 1e-6),
            conservation_tol=monitors.get("conservation_tol", 1e-10),
            ceiling_tol=monitors.get("ceiling_tol", 1e-12),
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def initial_distribution(config: dict, grid: GridSpec) -> tuple[Distribution, str]:
    """Build the initial condition named by [initial]; returns (f0, f_id)."""
    sec = _require(config, "initial", ("kind",))
    kind = sec["kind"]
    if kind == "maxwellian":
        f = maxwellian(
            grid,
            sec.get("mass", 1.0),
            sec.get("bulk", (0.0, 0.0, 0.0)),
            sec.get("temperature", 1.0),
        )
        return f, "maxwellian"
    if kind == "two_bump":
        mass = sec.get("mass", 1.0)
        off = np.asarray(sec.get("offset", (1.0, 0.0, 0.0)))
        temp = sec.get("temperature", 0.5)
        half = maxwellian(grid, 0.5 * mass, off, temp)
        other = maxwellian(grid, 0.5 * mass, -off, temp)
        return Distribution(grid, half.values + other.values), "two_bump"
    if kind == "snapshot":
        if "path" not in sec:
            raise ConfigError("initial.kind = snapshot requires initial.path")
        try:
            f, _, _ = read_snapshot(sec["path"])
        except (OSError, ValueError) as exc:
            raise ConfigError(f"cannot load initial snapshot: {exc}") from exc
        if f.grid != grid:
            raise ConfigError(
                f"snapshot grid (n={f.grid.n}, v_max={f.grid.v_max!r}) does not match "
                f"config grid (n={grid.n}, v_max={grid.v_max!r})"
            )
        return f, "snapshot"
    raise ConfigError(f"unknown initial.kind {kind!r}")


# report formatting


def format_time_series(records: list[TimeSeriesRecord], lp_list) -> str:
    cols = ["t", "mass", "px", "py", "pz", "energy", "entropy"]
    cols += [f"lp_{_fmt(p)}" for p in lp_list]
    cols += [f"ceiling_{_fmt(p)}" for p in lp_list]
    cols.append("boundary_mass")
    lines = [" ".join(cols)]
    for r in records:
        row = [r.t, r.mass, *r.momentum, r.energy, r.entropy]
        row += [r.lp[p] for p in lp_list]
        row += [r.lp_bound[p] for p in lp_list]
        row.append(r.boundary_mass)
        lines.append(" ".join(repr(float(x)) for x in row))
    return "\n".join(lines) + "\n"


def format_verification_report(records: list[VerificationRecord]) -> str:
    lines = []
    failures = 0
    for r in records:
        failures += 0 if r.passed else 1
        lines.append(
            f"{r.inequality_id} seed={r.trial_seed} lhs={r.lhs!r} rhs={r.rhs!r} "
            f"margin={r.margin!r} {'pass' if r.passed else 'FAIL'}"
        )
    min_margin = min((r.margin for r in records), default=math.nan)
    lines.append(f"# summary records={len(records)} failures={failures} min_margin={min_margin!r}")
    return "\n".join(lines) + "\n"


def format_grazing_report(groups: list[tuple[list[GrazingGapRecord], float | None]]) -> str:
    """One data line per record; a slope summary line per fitted group."""
    lines = ["# gamma eps weak_boltzmann weak_landau gap phi_id f_id"]
    for records, _ in groups:
        for r in records:
            lines.append(
                f"{r.gamma!r} {r.eps!r} {r.weak_boltzmann!r} {r.weak_landau!r} "
                f"{r.gap!r} {r.phi_id} {r.f_id}"
            )
    for records, slope in groups:
        if slope is not None:
            lines.append(f"# slope gamma={records[0].gamma!r} slope={slope!r}")
    return "\n".join(lines) + "\n"


# manifest


def file_digest(path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(path, config_path, emitted, started: str, finished: str) -> None:
    """JSON manifest: config digest, code version, timestamps, file checksums.

    `emitted` is a list of paths; each appears exactly once.
    """
    from . import __version__

    seen = set()
    files = []
    for fp in emitted:
        rel = os.path.relpath(fp, os.path.dirname(path) or ".")
        if rel in seen:
            raise ValueError(f"file {rel!r} emitted twice")
        seen.add(rel)
        files.append({"path": rel, "sha256": file_digest(fp)})
    manifest = {
        "config_sha256": file_digest(config_path) if config_path else None,
        "version": __version__,
        "started": started,
        "finished": finished,
        "files": files,
    }
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
