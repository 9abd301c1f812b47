"""Smooth test functions with analytic gradients and Hessians.

The weak-form evaluators accept any TestFunction whose `kind` tag is one of
quadratic, bump, gaussian, or tent; the tag lets the compiled pair-sum kernel
evaluate phi at off-grid points without calling back into Python. `params` is
the fixed-width packing the kernel reads. Untagged callables (kind None) are
accepted by the slower generic evaluator only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

__all__ = [
    "TestFunction",
    "quadratic",
    "constant_one",
    "coordinate",
    "speed_squared",
    "bump",
    "gaussian",
    "tent",
    "PARAM_WIDTH",
    "KIND_CODES",
]

PARAM_WIDTH = 10
KIND_CODES = {"quadratic": 0, "bump": 1, "gaussian": 2, "tent": 3}


@dataclass(frozen=True)
class TestFunction:
    """Scalar field phi with optional derivatives, vectorized over (..., 3).

    support_radius bounds the support of phi (math.inf when unbounded);
    gradient and hessian return shapes (..., 3) and (..., 3, 3).
    """

    phi_id: str
    value: Callable[[np.ndarray], np.ndarray]
    gradient: Optional[Callable[[np.ndarray], np.ndarray]] = None
    hessian: Optional[Callable[[np.ndarray], np.ndarray]] = None
    support_radius: float = math.inf
    kind: Optional[str] = None
    params: Optional[tuple[float, ...]] = None


def _pack(*vals: float) -> tuple[float, ...]:
    out = list(map(float, vals))
    if len(out) > PARAM_WIDTH:
        raise ValueError("too many parameters")
    return tuple(out + [0.0] * (PARAM_WIDTH - len(out)))


def quadratic(c0: float, b, C, phi_id: str = "quadratic") -> TestFunction:
    """phi(v) = c0 + b . v + v^T C v with symmetric C."""
    b = np.asarray(b, dtype=float).reshape(3)
    C = np.asarray(C, dtype=float).reshape(3, 3)
    if not np.allclose(C, C.T, atol=1e-14):
        raise ValueError("C must be symmetric")

    def value(v):
        v = np.asarray(v, dtype=float)
        return c0 + v @ b + np.einsum("...a,ab,...b->...", v, C, v)

    def grad(v):
        v = np.asarray(v, dtype=float)
        return b + 2.0 * np.einsum("ab,...b->...a", C, v)

    def hess(v):
        v = np.asarray(v, dtype=float)
        return np.broadcast_to(2.0 * C, v.shape[:-1] + (3, 3)).copy()

    params = _pack(c0, b[0], b[1], b[2], C[0, 0], C[1, 1], C[2, 2], C[0, 1], C[0, 2], C[1, 2])
    return TestFunction(phi_id, value, grad, hess, math.inf, "quadratic", params)


def constant_one() -> TestFunction:
    return quadratic(1.0, np.zeros(3), np.zeros((3, 3)), phi_id="one")


def coordinate(axis: int) -> TestFunction:
    b = np.zeros(3)
    b[axis] = 1.0
    return quadratic(0.0, b, np.zeros((3, 3)), phi_id=f"v{axis + 1}")


def speed_squared() -> TestFunction:
    return quadratic(0.0, np.zeros(3), np.eye(3), phi_id="speed2")


def bump(center, radius: float, amplitude: float = 1.0, phi_id: str = "bump") -> TestFunction:
    """Compact C^3 bump A*(1 - |v-c|^2/r^2)^4 on |v-c| < r, else 0."""
    center = np.asarray(center, dtype=float).reshape(3)
    if not radius > 0:
        raise ValueError("radius must be positive")
    r2 = radius**2

    def value(v):
        d = np.asarray(v, dtype=float) - center
        q = 1.0 - (d**2).sum(axis=-1) / r2
        return amplitude * np.where(q > 0, q, 0.0) ** 4

    def grad(v):
        d = np.asarray(v, dtype=float) - center
        q = 1.0 - (d**2).sum(axis=-1) / r2
        qp = np.where(q > 0, q, 0.0)
        return (-8.0 * amplitude / r2) * (qp**3)[..., None] * d

    def hess(v):
        d = np.asarray(v, dtype=float) - center
        q = 1.0 - (d**2).sum(axis=-1) / r2
        qp = np.where(q > 0, q, 0.0)
        eye = np.eye(3)
        outer = d[..., :, None] * d[..., None, :]
        return (-8.0 * amplitude / r2) * (qp**3)[..., None, None] * eye + (
            48.0 * amplitude / r2**2
        ) * (qp**2)[..., None, None] * outer

    params = _pack(amplitude, center[0], center[1], center[2], radius)
    return TestFunction(phi_id, value, grad, hess, float(np.linalg.norm(center) + radius), "bump", params)


def gaussian(center, width: float, amplitude: float = 1.0, phi_id: str = "gaussian") -> TestFunction:
    """A*exp(-|v-c|^2 / (2 s^2))."""
    center = np.asarray(center, dtype=float).reshape(3)
    if not width > 0:
        raise ValueError("width must be positive")
    s2 = width**2

    def value(v):
        d = np.asarray(v, dtype=float) - center
        return amplitude * np.exp(-(d**2).sum(axis=-1) / (2.0 * s2))

    def grad(v):
        d = np.asarray(v, dtype=float) - center
        return -(value(v) / s2)[..., None] * d

    def hess(v):
        d = np.asarray(v, dtype=float) - center
        outer = d[..., :, None] * d[..., None, :]
        eye = np.eye(3)
        return value(v)[..., None, None] * (outer / s2**2 - eye / s2)

    params = _pack(amplitude, center[0], center[1], center[2], width)
    return TestFunction(phi_id, value, grad, hess, math.inf, "gaussian", params)


def tent(center, width: float, phi_id: str = "tent") -> TestFunction:
    """Separable nodal hat, product over axes of max(0, 1 - |v_a - c_a|/width).

    Piecewise linear, so it carries no gradient or hessian; it is meant for
    weak-form evaluation only.
    """
    center = np.asarray(center, dtype=float).reshape(3)
    if not width > 0:
        raise ValueError("width must be positive")

    def value(v):
        d = np.abs(np.asarray(v, dtype=float) - center) / width
        t = np.where(d < 1.0, 1.0 - d, 0.0)
        return t[..., 0] * t[..., 1] * t[..., 2]

    params = _pack(center[0], center[1], center[2], width)
    return TestFunction(
        phi_id, value, None, None, float(np.linalg.norm(center) + math.sqrt(3.0) * width), "tent", params
    )
