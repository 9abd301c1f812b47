"""Concentrated angular collision kernel and its closed-form moments.

The kernel is a Dirac mass in the scattering cosine: for relative speed
x = |u| the angle is pinned at mu = 1 - m(x) with

    m(x)  = min(2, eps * x**gamma),         m(0) = 2 by convention,
    theta = arccos(1 - m(x)),

and total sigma-sphere rate 8/eps independent of u. The angular moments

    beta_k(x) = (2**(2 - k/2) / pi) * eps**(k/2 - 1) * x**(gamma*k/2)

hold on the grazing window eps * x**gamma <= 1 (equivalently m <= 1) and are
zero outside it; the window is deliberately asymmetric to the full-sphere
rate, which carries no indicator.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "KernelParams",
    "m_eps",
    "mu_eps",
    "theta_eps",
    "beta_k_closed",
    "total_rate",
]


@dataclass(frozen=True)
class KernelParams:
    """Concentration parameter eps > 0 and potential exponent gamma in [-3, 0)."""

    eps: float
    gamma: float

    def __post_init__(self) -> None:
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if not (-3.0 <= self.gamma < 0.0):
            raise ValueError(f"gamma must lie in [-3, 0), got {self.gamma}")


def m_eps(params: KernelParams, x):
    """min(2, eps * x**gamma) for x >= 0, elementwise; m(0) = 2."""
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise ValueError("relative speed must be nonnegative")
    xp = np.where(x > 0, x, 1.0)
    out = np.where(x > 0, np.minimum(2.0, params.eps * xp**params.gamma), 2.0)
    return out if out.ndim else float(out)


def mu_eps(params: KernelParams, x):
    """Pinned scattering cosine 1 - m_eps(x), always in [-1, 1)."""
    m = np.asarray(m_eps(params, x))
    out = 1.0 - m
    return out if out.ndim else float(out)


def theta_eps(params: KernelParams, x):
    """Pinned scattering angle arccos(mu_eps(x)) in (0, pi]."""
    out = np.arccos(np.asarray(mu_eps(params, x)))
    return out if out.ndim else float(out)


def beta_k_closed(params: KernelParams, u_norm, k: float):
    """Closed-form angular moment beta_k at relative speed u_norm > 0.

    Vanishes outside the grazing window eps * u_norm**gamma <= 1. Real k >= 2
    is accepted. u_norm = 0 is rejected: the closed form is a power law in
    u_norm and the pinned angle degenerates there.
    """
    if not k >= 2:
        raise ValueError(f"moment order k must be >= 2, got {k}")
    u_norm = np.asarray(u_norm, dtype=float)
    if np.any(u_norm <= 0):
        raise ValueError("u_norm must be strictly positive")
    eps, gamma = params.eps, params.gamma
    active = eps * u_norm**gamma <= 1.0
    out = np.where(
        active,
        (2.0 ** (2.0 - k / 2.0) / np.pi) * eps ** (k / 2.0 - 1.0) * u_norm ** (gamma * k / 2.0),
        0.0,
    )
    return out if out.ndim else float(out)


def total_rate(params: KernelParams) -> float:
    """Full sigma-sphere collision rate, 8/eps for every relative velocity."""
    return 8.0 / params.eps
