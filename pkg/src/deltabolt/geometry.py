"""Binary collision geometry on the sigma sphere.

Post-collision velocities follow the sigma parametrization

    v'  = v  + (|u| sigma - u) / 2,    v_*' = v_* - (|u| sigma - u) / 2,

which conserves momentum and kinetic energy identically. sigma is built from
an orthonormal scattering frame (u_hat, j_hat, k_hat) where j_hat is the unit
projection of e1 orthogonal to u_hat (e2 replaces e1 when u is within 1e-12
of the e1 axis) and k_hat = j_hat x u_hat.

All functions broadcast over a leading batch shape.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ScatteringFrame",
    "CollisionPair",
    "AzimuthalMoments",
    "frame_of",
    "sigma_of",
    "post_collision",
    "u_plus_minus",
    "azimuthal_moments",
]

_AXIS_TOL = 1e-12


@dataclass(frozen=True)
class ScatteringFrame:
    """Orthonormal triad (u_hat, j_hat, k_hat), each of shape (..., 3)."""

    u_hat: np.ndarray
    j_hat: np.ndarray
    k_hat: np.ndarray


@dataclass(frozen=True)
class CollisionPair:
    """Pre-collision velocities and their relative velocity u = v - v_star."""

    v: np.ndarray
    v_star: np.ndarray

    @property
    def u(self) -> np.ndarray:
        return np.asarray(self.v, dtype=float) - np.asarray(self.v_star, dtype=float)


@dataclass(frozen=True)
class AzimuthalMoments:
    """Uniform-in-phi circle moments of the jump dv = v' - v at fixed angle."""

    first: np.ndarray  # (..., 3)   integral of dv
    second: np.ndarray  # (..., 3, 3) integral of dv (x) dv
    cubic: np.ndarray  # (...)      integral of |dv|^3


def frame_of(u) -> ScatteringFrame:
    """Scattering frame for relative velocity u (nonzero), batched."""
    u = np.asarray(u, dtype=float)
    norm = np.linalg.norm(u, axis=-1, keepdims=True)
    if np.any(norm == 0):
        raise ValueError("frame_of requires nonzero relative velocity")
    u_hat = u / norm
    e1 = np.zeros_like(u_hat)
    e1[..., 0] = 1.0
    j = e1 - u_hat[..., :1] * u_hat
    jn = np.linalg.norm(j, axis=-1, keepdims=True)
    if np.any(jn[..., 0] < _AXIS_TOL):
        e2 = np.zeros_like(u_hat)
        e2[..., 1] = 1.0
        alt = e2 - u_hat[..., 1:2] * u_hat
        j = np.where(jn < _AXIS_TOL, alt, j)
        jn = np.linalg.norm(j, axis=-1, keepdims=True)
    j_hat = j / jn
    k_hat = np.cross(j_hat, u_hat)
    return ScatteringFrame(u_hat, j_hat, k_hat)


def sigma_of(frame: ScatteringFrame, theta, phi) -> np.ndarray:
    """Unit scattering direction at polar angle theta and azimuths phi."""
    theta = np.asarray(theta, dtype=float)[..., None]
    phi = np.asarray(phi, dtype=float)[..., None]
    omega = frame.j_hat * np.cos(phi) + frame.k_hat * np.sin(phi)
    return frame.u_hat * np.cos(theta) + omega * np.sin(theta)


def post_collision(pair: CollisionPair, sigma) -> tuple[np.ndarray, np.ndarray]:
    """Post-collision pair (v', v_*'); sigma must be unit within 1e-10."""
    sigma = np.asarray(sigma, dtype=float)
    err = np.abs(np.linalg.norm(sigma, axis=-1) - 1.0)
    if np.any(err > 1e-10):
        raise ValueError(f"sigma must be a unit vector within 1e-10, worst deviation {float(np.max(err)):.3e}")
    u = pair.u
    speed = np.linalg.norm(u, axis=-1, keepdims=True)
    jump = 0.5 * (speed * sigma - u)
    v = np.asarray(pair.v, dtype=float)
    v_star = np.asarray(pair.v_star, dtype=float)
    return v + jump, v_star - jump


def u_plus_minus(u, sigma) -> tuple[np.ndarray, np.ndarray]:
    """Split u into u+ = (u + |u| sigma)/2 and u- = (u - |u| sigma)/2.

    The pair satisfies u+ + u- = u, u+ . u- = 0, and
    |u+|^2 + |u-|^2 = |u|^2, and the post-collision map reads
    v' = v - u- and v_*' = v_* + u-.
    """
    u = np.asarray(u, dtype=float)
    sigma = np.asarray(sigma, dtype=float)
    speed = np.linalg.norm(u, axis=-1, keepdims=True)
    half = 0.5 * speed * sigma
    return 0.5 * u + half, 0.5 * u - half


def azimuthal_moments(u, theta, m_phi: int = 16) -> AzimuthalMoments:
    """Trapezoid circle quadrature of the first, second, and cubic moments
    of the jump dv(phi) = (|u| sigma(theta, phi) - u)/2.

    The integrands are trigonometric polynomials of degree <= 2 plus a
    phi-independent cubic term, so any m_phi >= 4 is exact to rounding.
    Closed forms:

        first  = -2 pi u sin^2(theta/2)
        second = pi sin^4(theta/2) (2 u (x) u - |u|^2 Pi(u))
                 + pi |u|^2 Pi(u) sin^2(theta/2)
        cubic  = 2 pi |u|^3 sin^3(theta/2)
    """
    if m_phi < 4:
        raise ValueError(f"m_phi must be >= 4, got {m_phi}")
    u = np.asarray(u, dtype=float)
    frame = frame_of(u)
    phi = -np.pi + 2.0 * np.pi * np.arange(m_phi) / m_phi
    w = 2.0 * np.pi / m_phi
    theta_b = np.asarray(theta, dtype=float)[..., None]
    sigma = sigma_of(
        ScatteringFrame(frame.u_hat[..., None, :], frame.j_hat[..., None, :], frame.k_hat[..., None, :]),
        np.broadcast_to(theta_b, theta_b.shape[:-1] + (m_phi,)),
        phi,
    )
    speed = np.linalg.norm(u, axis=-1)[..., None, None]
    jump = 0.5 * (speed * sigma - u[..., None, :])
    first = w * jump.sum(axis=-2)
    second = w * np.einsum("...ma,...mb->...ab", jump, jump)
    cubic = w * (np.linalg.norm(jump, axis=-1) ** 3).sum(axis=-1)
    return AzimuthalMoments(first, second, cubic)
