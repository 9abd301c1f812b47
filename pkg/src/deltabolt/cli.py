"""Command-line entry points; the only code that writes files.

Exit codes: 0 clean, 1 config or input error, 2 monitor breach mid-run.
"""

from __future__ import annotations

import argparse
import datetime
import math
import os
import sys

from .bounds import SUITE_NAMES, run_suite
from .grid import moments
from .integrator import MonitorBreach, run
from .kernel import KernelParams
from .landau import fit_gap_slope, grazing_gap
from .runio import (
    ConfigError,
    file_digest,
    format_grazing_report,
    format_time_series,
    format_verification_report,
    grid_spec,
    initial_distribution,
    kernel_params,
    load_config,
    quadrature_spec,
    simulation_config,
    write_manifest,
)
from .snapshot import read_snapshot, write_snapshot
from .testfunctions import bump, constant_one, gaussian, speed_squared, tent


def _fail(message: str) -> int:
    print(f"error: {message}", file=sys.stderr)
    return 1


def _now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat()


def _write_text(path, text: str) -> None:
    with open(path, "w", newline="\n") as fh:
        fh.write(text)


def cmd_simulate(config_path) -> int:
    started = _now()
    try:
        config = load_config(config_path)
        cfg = simulation_config(config)
        f0, _ = initial_distribution(config, cfg.grid)
        out = config.get("output", {})
        if "directory" not in out:
            raise ConfigError("missing required key 'directory' in section [output]")
    except ConfigError as exc:
        return _fail(str(exc))

    mass0 = cfg.grid.cell_volume * float(f0.values.sum())
    if mass0 <= 0.0:
        return _fail("initial data has no mass")
    cap = cfg.kernel.eps / (8.0 * mass0)
    if cfg.dt > cap * (1.0 + 1e-12):
        return _fail(
            f"dt = {cfg.dt!r} violates the positivity constraint delta <= eps/8 "
            f"(for this initial mass, dt <= eps/(8*mass) = {cap!r})"
        )

    outdir = out["directory"]
    os.makedirs(outdir, exist_ok=True)
    series_path = os.path.join(outdir, out.get("time_series", "time_series.txt"))
    snap_every = out.get("snapshot_every", 0)
    snap_fmt = out.get("snapshot_format", "txt")
    if snap_fmt not in ("txt", "bin"):
        return _fail(f"output.snapshot_format must be txt or bin, got {snap_fmt!r}")
    emitted = []

    def observer(k, t, f):
        if snap_every > 0 and k % snap_every == 0:
            path = os.path.join(outdir, f"snapshot_{k:06d}.{snap_fmt}")
            write_snapshot(path, f, t, cfg.kernel)
            emitted.append(path)

    breach = None
    try:
        records = run(f0, cfg, observer=observer)
    except MonitorBreach as exc:
        breach = exc
        records = exc.records
    except ValueError as exc:
        return _fail(str(exc))

    _write_text(series_path, format_time_series(records, cfg.lp_list))
    emitted.append(series_path)
    write_manifest(os.path.join(outdir, "manifest.json"), config_path, emitted, started, _now())
    if breach is not None:
        print(f"error: {breach}", file=sys.stderr)
        return 2
    return 0


def cmd_verify(suite: str, seed: int, trials: int, out=None) -> int:
    if suite != "all" and suite not in SUITE_NAMES:
        return _fail(f"unknown suite {suite!r}; choose from {', '.join(SUITE_NAMES + ('all',))}")
    started = _now()
    records = run_suite(suite, seed=seed, trials=trials)
    text = format_verification_report(records)
    if out is not None:
        _write_text(out, text)
        write_manifest(out + ".manifest.json", None, [out], started, _now())
    else:
        sys.stdout.write(text)
    return 0 if all(r.passed for r in records) else 1


_PHI_BUILDERS = {
    "bump": lambda center, scale: bump(center, scale if scale else 2.0),
    "gaussian": lambda center, scale: gaussian(center, scale if scale else 1.0),
    "tent": lambda center, scale: tent(center, scale if scale else 2.0),
    "speed_squared": lambda center, scale: speed_squared(),
    "one": lambda center, scale: constant_one(),
}


def cmd_grazing(config_path) -> int:
    started = _now()
    try:
        config = load_config(config_path)
        grid = grid_spec(config)
        quad = quadrature_spec(config)
        f0, f_id = initial_distribution(config, grid)
        if "grazing" not in config or "eps_list" not in config["grazing"]:
            raise ConfigError("grazing runs need [grazing] with an eps_list")
        gsec = config["grazing"]
        if "gamma_list" in gsec:
            gammas = gsec["gamma_list"]
        elif "kernel" in config and "gamma" in config["kernel"]:
            gammas = (config["kernel"]["gamma"],)
        else:
            raise ConfigError("no gamma_list in [grazing] and no [kernel] gamma to fall back on")
        phi_kind = gsec.get("phi", "bump")
        if phi_kind not in _PHI_BUILDERS:
            raise ConfigError(f"unknown grazing.phi {phi_kind!r}")
        phi = _PHI_BUILDERS[phi_kind](gsec.get("phi_center", (0.0, 0.0, 0.0)), gsec.get("phi_scale", 0.0))
        out = _require_output(config)
    except ConfigError as exc:
        return _fail(str(exc))

    groups = []
    try:
        for gamma in gammas:
            params_list = [KernelParams(e, gamma) for e in gsec["eps_list"]]
            records = grazing_gap(f0, phi, params_list, quad, f_id=f_id)
            try:
                slope = fit_gap_slope(records) if len(records) >= 2 else None
            except ValueError:
                slope = None
            groups.append((records, slope))
    except ValueError as exc:
        return _fail(str(exc))

    outdir = out["directory"]
    os.makedirs(outdir, exist_ok=True)
    report_path = os.path.join(outdir, out.get("grazing_report", "grazing.txt"))
    _write_text(report_path, format_grazing_report(groups))
    write_manifest(os.path.join(outdir, "manifest.json"), config_path, [report_path], started, _now())
    return 0


def _require_output(config: dict) -> dict:
    out = config.get("output", {})
    if "directory" not in out:
        raise ConfigError("missing required key 'directory' in section [output]")
    return out


def cmd_moments(snapshot_path) -> int:
    try:
        f, time, params = read_snapshot(snapshot_path)
    except (OSError, ValueError) as exc:
        return _fail(str(exc))
    rep = moments(f, lp_orders=(1.0, 2.0, math.inf))
    lines = [
        f"time {time!r}",
        f"eps {params.eps!r}",
        f"gamma {params.gamma!r}",
        f"mass {rep.mass!r}",
        f"px {rep.momentum[0]!r}",
        f"py {rep.momentum[1]!r}",
        f"pz {rep.momentum[2]!r}",
        f"energy {rep.energy!r}",
        f"entropy {rep.entropy!r}",
        f"llogl {rep.llogl!r}",
        f"lp_1 {rep.lp[1.0]!r}",
        f"lp_2 {rep.lp[2.0]!r}",
        f"lp_inf {rep.lp[math.inf]!r}",
    ]
    sys.stdout.write("\n".join(lines) + "\n")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="deltabolt",
        description="Velocity-grid Boltzmann solver with a concentrated collision kernel.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="run the time integrator from a config file")
    p_sim.add_argument("config")

    p_ver = sub.add_parser("verify", help="run a randomized verification suite")
    p_ver.add_argument("suite")
    p_ver.add_argument("--seed", type=int, default=0)
    p_ver.add_argument("--trials", type=int, default=200)
    p_ver.add_argument("--out", default=None, help="write the report here instead of stdout")

    p_grz = sub.add_parser("grazing", help="compare weak collision functionals across eps")
    p_grz.add_argument("config")

    p_mom = sub.add_parser("moments", help="print the moment report of a snapshot file")
    p_mom.add_argument("snapshot")

    args = parser.parse_args(argv)
    if args.command == "simulate":
        return cmd_simulate(args.config)
    if args.command == "verify":
        if args.trials < 0:
            return _fail("--trials must be nonnegative")
        return cmd_verify(args.suite, args.seed, args.trials, args.out)
    if args.command == "grazing":
        return cmd_grazing(args.config)
    return cmd_moments(args.snapshot)


if __name__ == "__main__":
    raise SystemExit(main())
