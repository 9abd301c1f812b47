"""Weak-form Landau functional and the grazing-limit comparison harness.

Only the weak functional is discretized. The diagonal u = 0 is excluded
(|u|^gamma is singular there); the near-diagonal shell |u| <= 2h is summed
separately so its weight in the total is visible.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _backend
from .collision import QuadratureSpec, weak_form_q
from .grid import Distribution
from .kernel import KernelParams
from .testfunctions import TestFunction

__all__ = [
    "GrazingGapRecord",
    "projector",
    "weak_form_ql",
    "weak_form_ql_parts",
    "grazing_gap",
    "fit_gap_slope",
]


@dataclass(frozen=True)
class GrazingGapRecord:
    gamma: float
    eps: float
    weak_boltzmann: float
    weak_landau: float
    gap: float
    phi_id: str
    f_id: str


def projector(u) -> np.ndarray:
    """Projection onto the plane orthogonal to u: I - u_hat (x) u_hat."""
    u = np.asarray(u, dtype=float)
    norm = np.linalg.norm(u, axis=-1, keepdims=True)
    if np.any(norm == 0.0):
        raise ValueError("projector undefined at u = 0")
    uh = u / norm
    eye = np.broadcast_to(np.eye(3), u.shape[:-1] + (3, 3))
    return eye - uh[..., :, None] * uh[..., None, :]


def _derivative_fields(f: Distribution, phi: TestFunction):
    if phi.gradient is None or phi.hessian is None:
        raise ValueError(f"test function {phi.phi_id!r} carries no analytic derivatives")
    nodes = f.grid.nodes()
    grad = np.ascontiguousarray(phi.gradient(nodes), dtype=float)
    hess = np.asarray(phi.hessian(nodes), dtype=float)
    trh = np.ascontiguousarray(hess[..., 0, 0] + hess[..., 1, 1] + hess[..., 2, 2])
    hess6 = np.ascontiguousarray(
        np.stack(
            [
                hess[..., 0, 0],
                hess[..., 1, 1],
                hess[..., 2, 2],
                hess[..., 0, 1],
                hess[..., 0, 2],
                hess[..., 1, 2],
            ],
            axis=-1,
        )
    )
    return grad, trh, hess6


def weak_form_ql_parts(f: Distribution, phi: TestFunction, gamma: float, shell=None):
    """Weak Landau pair sum; returns (total, near, maxterm, nterms).

    near is the contribution of pairs with |u| <= shell (default 2h),
    already included in total. maxterm/nterms describe the dynamic range
    of the four-term bracket decomposition, as in weak_form_q_batch.
    """
    if not (-3.0 <= gamma < 0.0):
        raise ValueError(f"gamma must lie in [-3, 0), got {gamma}")
    grad, trh, hess6 = _derivative_fields(f, phi)
    if shell is None:
        shell = 2.0 * f.grid.h
    total, near, maxterm, nterms = _backend.kernels.landau_pairs(
        f.values, grad, trh, hess6, f.grid.h, gamma, float(shell), _backend.num_threads()
    )
    return float(total), float(near), float(maxterm), int(nterms)


def weak_form_ql(f: Distribution, phi: TestFunction, gamma: float) -> float:
    return weak_form_ql_parts(f, phi, gamma)[0]


def grazing_gap(
    f: Distribution,
    phi: TestFunction,
    params_list: Sequence[KernelParams],
    quad: QuadratureSpec,
    f_id: str = "f",
) -> list[GrazingGapRecord]:
    """One record per eps: gap between the two weak functionals on fixed f."""
    if not params_list:
        raise ValueError("params_list is empty")
    gamma = params_list[0].gamma
    if any(p.gamma != gamma for p in params_list):
        raise ValueError("all kernel parameters must share gamma")
    wl = weak_form_ql(f, phi, gamma)
    records = []
    for params in params_list:
        wb = weak_form_q(f, phi, params, quad)
        records.append(
            GrazingGapRecord(
                gamma=gamma,
                eps=params.eps,
                weak_boltzmann=wb,
                weak_landau=wl,
                gap=abs(wb - wl),
                phi_id=phi.phi_id,
                f_id=f_id,
            )
        )
    return records


def fit_gap_slope(records: Sequence[GrazingGapRecord]) -> float:
    """Least-squares slope of log(gap) against log(eps).

    Requires at least two records with positive gaps; a positive slope
    means the gap shrinks as eps does.
    """
    pts = [(r.eps, r.gap) for r in records if r.gap > 0.0]
    if len(pts) < 2:
        raise ValueError("need at least two records with positive gap to fit a slope")
    le = np.log([p[0] for p in pts])
    lg = np.log([p[1] for p in pts])
    return float(np.polyfit(le, lg, 1)[0])
