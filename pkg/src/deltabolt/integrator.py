"""Positivity-preserving explicit time stepping with run monitors.

The step is the subtangency construction: with dt*(8/eps)*mass <= 1 the
update f + dt*(gain - loss) is a convex combination of f and the nonnegative
gain, so every node of every iterate stays >= 0 exactly, not up to tolerance.
An optional five-parameter exponential multiplier restores the input moments
after each step; a run aborts with a diagnostic when any monitor breaches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .collision import QuadratureSpec, q_gain
from .grid import Distribution, GridSpec, MomentReport, boundary_mass, llogl_norm, lp_norm, moments
from .kernel import KernelParams

_CORRECTION_TOL = 1e-13
_CORRECTION_MAX_ITER = 25


@dataclass(frozen=True)
class SimulationConfig:
    kernel: KernelParams
    grid: GridSpec
    quad: QuadratureSpec
    dt: float
    t_end: float
    report_every: int = 1
    lp_list: tuple[float, ...] = (1.0, 2.0, math.inf)
    conservation_correction: bool = False
    entropy_tol: float = 1e-6
    conservation_tol: float = 1e-10
    ceiling_tol: float = 1e-12

    def __post_init__(self):
        # dt = 0 is legal for a bare step (the identity map); run() insists
        # on dt > 0 since it must reach t_end
        if not self.dt >= 0.0:
            raise ValueError(f"dt must be nonnegative, got {self.dt}")
        if not self.t_end > 0.0:
            raise ValueError(f"t_end must be positive, got {self.t_end}")
        if self.report_every < 1:
            raise ValueError(f"report_every must be >= 1, got {self.report_every}")
        for p in self.lp_list:
            if not (math.isinf(p) or p >= 1.0):
                raise ValueError(f"lp_list entries must be >= 1 or inf, got {p}")


@dataclass(frozen=True)
class TimeSeriesRecord:
    t: float
    mass: float
    momentum: tuple[float, float, float]
    energy: float
    entropy: float
    llogl: float
    lp: dict[float, float] = field(default_factory=dict)
    lp_bound: dict[float, float] = field(default_factory=dict)
    boundary_mass: float = 0.0


class MonitorBreach(Exception):
    """A run monitor failed; carries the records accumulated so far."""

    def __init__(self, monitor, step, time, detail, records=None):
        super().__init__(f"monitor '{monitor}' breached at step {step} (t={time:.6g}): {detail}")
        self.monitor = monitor
        self.step = step
        self.time = time
        self.detail = detail
        self.records = list(records or [])


def lp_ceiling(f0: Distribution, p: float) -> float:
    """Uniform-in-time bound max(16*exp(8*||f0||_LlogL), ||f0||_p)."""
    return max(16.0 * math.exp(8.0 * llogl_norm(f0)), lp_norm(f0, p))


def _moment_targets(rep: MomentReport) -> np.ndarray:
    return np.array([rep.mass, *rep.momentum, rep.energy])


def conservation_correct(f: Distribution, target: np.ndarray) -> Distribution:
    """Rescale f by exp(a + b.v + c|v|^2) so (mass, momentum, energy) = target.

    Newton iteration on the five multipliers; the Jacobian is the symmetric
    Gram matrix of f-weighted invariants, positive definite for f >= 0 with
    spread-out support.
    """
    g = f.grid
    nodes = g.nodes().reshape(-1, 3)
    basis = np.empty((nodes.shape[0], 5))
    basis[:, 0] = 1.0
    basis[:, 1:4] = nodes
    basis[:, 4] = (nodes**2).sum(axis=1)
    fvals = f.values.reshape(-1)
    target = np.asarray(target, dtype=float)
    scale = np.maximum(1.0, np.abs(target))
    lam = np.zeros(5)
    for _ in range(_CORRECTION_MAX_ITER):
        w = g.cell_volume * fvals * np.exp(np.clip(basis @ lam, -100.0, 100.0))
        m = basis.T @ w
        resid = m - target
        if float(np.max(np.abs(resid) / scale)) <= _CORRECTION_TOL:
            return f.with_values((fvals * np.exp(np.clip(basis @ lam, -100.0, 100.0))).reshape(f.values.shape))
        jac = basis.T @ (w[:, None] * basis)
        lam = lam - np.linalg.solve(jac, resid)
    raise RuntimeError("conservation correction did not converge")


def step(f: Distribution, cfg: SimulationConfig, target: np.ndarray | None = None) -> Distribution:
    """One Euler step of the gain/loss split; nodewise >= 0 by construction.

    With conservation_correction on, the iterate is rescaled to match
    `target` (default: the input's own mass, momentum, energy).
    """
    eps = cfg.kernel.eps
    mass = f.grid.cell_volume * float(f.values.sum())
    cap = eps / (8.0 * mass) if mass > 0 else math.inf
    if cfg.dt * (8.0 / eps) * mass > 1.0 + 1e-12:
        raise ValueError(
            f"dt = {cfg.dt:.6g} breaks positivity: the step requires dt <= eps/(8*mass) = {cap:.6g}"
        )
    gain = q_gain(f, cfg.kernel, cfg.quad)
    decay = 1.0 - cfg.dt * (8.0 / eps) * mass
    nxt = f.with_values(decay * f.values + cfg.dt * gain.values)
    if cfg.conservation_correction:
        if target is None:
            target = _moment_targets(moments(f))
        nxt = conservation_correct(nxt, target)
    return nxt


def _record(t: float, f: Distribution, cfg: SimulationConfig, ceilings: dict) -> TimeSeriesRecord:
    rep = moments(f, lp_orders=tuple(cfg.lp_list))
    return TimeSeriesRecord(
        t=t,
        mass=rep.mass,
        momentum=rep.momentum,
        energy=rep.energy,
        entropy=rep.entropy,
        llogl=rep.llogl,
        lp=dict(rep.lp),
        lp_bound=dict(ceilings),
        boundary_mass=boundary_mass(f),
    )


def run(f0: Distribution, cfg: SimulationConfig, observer=None) -> list[TimeSeriesRecord]:
    """Iterate step to t_end, reporting every report_every steps.

    Monitors, checked on every step: exact nodewise positivity; entropy
    non-increasing within entropy_tol*|H(0)| per step; the L^p ceiling
    (at report steps, for each p in lp_list); and, with correction on,
    conservation of the initial invariants to conservation_tol at report
    steps.  `observer(step_index, t, f)` is called at every report step.
    """
    if not cfg.dt > 0.0:
        raise ValueError("run requires dt > 0")
    vals = f0.values
    if float(vals.min()) < 0.0:
        raise ValueError("initial data must be nonnegative")
    mass0 = f0.grid.cell_volume * float(vals.sum())
    if not mass0 > 0.0:
        raise ValueError("initial data must have positive mass")

    ceilings = {p: lp_ceiling(f0, p) for p in cfg.lp_list}
    rep0 = moments(f0)
    target = _moment_targets(rep0)
    cons_scale = np.maximum(1.0, np.abs(target))
    h_prev = rep0.entropy
    h_slack = cfg.entropy_tol * abs(rep0.entropy)

    n_steps = max(1, math.ceil(cfg.t_end / cfg.dt - 1e-9))
    records = [_record(0.0, f0, cfg, ceilings)]
    if observer is not None:
        observer(0, 0.0, f0)

    f = f0
    for k in range(1, n_steps + 1):
        f = step(f, cfg, target=target if cfg.conservation_correction else None)
        t = k * cfg.dt

        if float(f.values.min()) < 0.0:
            raise MonitorBreach("positivity", k, t, f"min node value {float(f.values.min()):.3e}", records)
        rep = moments(f)
        if rep.entropy > h_prev + h_slack:
            raise MonitorBreach(
                "entropy", k, t, f"H rose from {h_prev:.12g} to {rep.entropy:.12g}", records
            )
        h_prev = rep.entropy

        if k % cfg.report_every == 0 or k == n_steps:
            rec = _record(t, f, cfg, ceilings)
            for p in cfg.lp_list:
                if rec.lp[p] > ceilings[p] * (1.0 + cfg.ceiling_tol):
                    raise MonitorBreach(
                        "lp_ceiling", k, t, f"||f||_{p:g} = {rec.lp[p]:.12g} exceeds {ceilings[p]:.12g}", records
                    )
            if cfg.conservation_correction:
                drift = np.abs(_moment_targets(rep) - target) / cons_scale
                if float(drift.max()) > cfg.conservation_tol:
                    raise MonitorBreach(
                        "conservation", k, t, f"max invariant drift {float(drift.max()):.3e}", records
                    )
            records.append(rec)
            if observer is not None:
                observer(k, t, f)
    return records
