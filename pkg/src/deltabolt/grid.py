"""Velocity grid, gridded distributions, and their moment functionals.

The grid is the uniform cube [-v_max, v_max]^3 with n nodes per axis
(endpoints included, spacing h = 2*v_max/(n-1)) and every integral below is
the midpoint rule with weight h^3 per node. Entropy sums f*log(f) over nodes
with f > 0 only, and the L log L functional is sum of f*|log f| over the same
nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GridSpec",
    "Distribution",
    "MomentReport",
    "moments",
    "lp_norm",
    "llogl_norm",
    "maxwellian",
    "matched_maxwellian",
    "interpolate",
    "truncate_ball",
    "boundary_mass",
]


@dataclass(frozen=True)
class GridSpec:
    """Uniform cubic velocity grid with n >= 8 nodes per axis."""

    n: int
    v_max: float

    def __post_init__(self) -> None:
        if not isinstance(self.n, int) or self.n < 8:
            raise ValueError(f"n must be an integer >= 8, got {self.n}")
        if not self.v_max > 0:
            raise ValueError(f"v_max must be positive, got {self.v_max}")

    @property
    def h(self) -> float:
        return 2.0 * self.v_max / (self.n - 1)

    @property
    def cell_volume(self) -> float:
        return self.h**3

    def axis(self) -> np.ndarray:
        return np.linspace(-self.v_max, self.v_max, self.n)

    def nodes(self) -> np.ndarray:
        """Node coordinates, shape (n, n, n, 3), C ordered with k fastest."""
        a = self.axis()
        out = np.empty((self.n, self.n, self.n, 3))
        out[..., 0] = a[:, None, None]
        out[..., 1] = a[None, :, None]
        out[..., 2] = a[None, None, :]
        return out

    def speed_squared(self) -> np.ndarray:
        a2 = self.axis() ** 2
        return a2[:, None, None] + a2[None, :, None] + a2[None, None, :]


@dataclass(frozen=True)
class Distribution:
    """Immutable nodal values f(v_ijk) on a GridSpec.

    The value array is copied on construction and marked read-only; every
    operation returns a new Distribution.
    """

    grid: GridSpec
    values: np.ndarray

    def __post_init__(self) -> None:
        v = np.array(self.values, dtype=np.float64, order="C", copy=True)
        n = self.grid.n
        if v.shape != (n, n, n):
            raise ValueError(f"values must have shape {(n, n, n)}, got {v.shape}")
        if not np.all(np.isfinite(v)):
            raise ValueError("values must be finite")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def with_values(self, values: np.ndarray) -> "Distribution":
        return Distribution(self.grid, values)


@dataclass(frozen=True)
class MomentReport:
    """Velocity moments of a distribution under the midpoint rule.

    energy is the full second moment integral of f*|v|^2 (no 1/2 factor);
    entropy is sum over f > 0 of f*log(f); llogl is sum over f > 0 of
    f*|log f|; lp maps each requested order to the discrete norm.
    """

    mass: float
    momentum: tuple[float, float, float]
    energy: float
    entropy: float
    llogl: float
    lp: dict[float, float] = field(default_factory=dict)


def moments(f: Distribution, lp_orders: tuple[float, ...] = ()) -> MomentReport:
    g = f.grid
    w = g.cell_volume
    vals = f.values
    a = g.axis()
    mass = w * float(vals.sum())
    px = w * float((vals.sum(axis=(1, 2)) * a).sum())
    py = w * float((vals.sum(axis=(0, 2)) * a).sum())
    pz = w * float((vals.sum(axis=(0, 1)) * a).sum())
    energy = w * float((vals * g.speed_squared()).sum())
    pos = vals > 0
    logs = np.log(vals[pos])
    entropy = w * float((vals[pos] * logs).sum())
    llogl = w * float((vals[pos] * np.abs(logs)).sum())
    lp = {p: lp_norm(f, p) for p in lp_orders}
    return MomentReport(mass, (px, py, pz), energy, entropy, llogl, lp)


def lp_norm(f: Distribution, p: float) -> float:
    """Discrete L^p norm, (h^3 sum |f|^p)^(1/p); p = inf gives max |f|."""
    if math.isinf(p):
        return float(np.max(np.abs(f.values)))
    if not p >= 1:
        raise ValueError(f"p must be >= 1, got {p}")
    w = f.grid.cell_volume
    if p == 1:
        return w * float(np.abs(f.values).sum())
    return float((w * (np.abs(f.values) ** p).sum()) ** (1.0 / p))


def llogl_norm(f: Distribution) -> float:
    return moments(f).llogl


def maxwellian(grid: GridSpec, mass: float, bulk, temperature: float) -> Distribution:
    """Maxwellian with the given continuum parameters, not renormalized.

    Discrete moments therefore differ from (mass, bulk, energy) by the
    quadrature and domain-truncation error of the grid.
    """
    if not mass >= 0:
        raise ValueError("mass must be nonnegative")
    if not temperature > 0:
        raise ValueError("temperature must be positive")
    bulk = np.asarray(bulk, dtype=float).reshape(3)
    nodes = grid.nodes()
    c2 = ((nodes - bulk) ** 2).sum(axis=-1)
    amp = mass / (2.0 * np.pi * temperature) ** 1.5
    return Distribution(grid, amp * np.exp(-c2 / (2.0 * temperature)))


def matched_maxwellian(f: Distribution) -> Distribution:
    """Maxwellian with the same discrete mass, momentum, and energy as f."""
    rep = moments(f)
    if rep.mass <= 0:
        raise ValueError("matched Maxwellian requires positive mass")
    bulk = np.asarray(rep.momentum) / rep.mass
    temperature = (rep.energy / rep.mass - float(bulk @ bulk)) / 3.0
    if temperature <= 0:
        raise ValueError("matched Maxwellian requires positive temperature")
    return maxwellian(f.grid, rep.mass, bulk, temperature)


def interpolate(f: Distribution, points) -> np.ndarray:
    """Trilinear interpolation of f at points of shape (..., 3).

    Returns 0 outside [-v_max, v_max]^3. The weights are convex, so
    interpolation of a nonnegative distribution stays nonnegative and within
    the local nodal bounds.
    """
    pts = np.asarray(points, dtype=float)
    if pts.shape[-1] != 3:
        raise ValueError("points must have trailing dimension 3")
    g = f.grid
    flat = pts.reshape(-1, 3)
    inside = np.all(np.abs(flat) <= g.v_max, axis=1)
    out = np.zeros(flat.shape[0])
    if np.any(inside):
        q = (flat[inside] + g.v_max) / g.h
        # clamp the cell so nodes on the upper face read their own value
        i0 = np.minimum(q.astype(np.int64), g.n - 2)
        t = q - i0
        vals = np.zeros(q.shape[0])
        fv = f.values
        for a in (0, 1):
            wx = t[:, 0] if a else 1.0 - t[:, 0]
            for b in (0, 1):
                wy = t[:, 1] if b else 1.0 - t[:, 1]
                for c in (0, 1):
                    wz = t[:, 2] if c else 1.0 - t[:, 2]
                    vals += wx * wy * wz * fv[i0[:, 0] + a, i0[:, 1] + b, i0[:, 2] + c]
        out[inside] = vals
    return out.reshape(pts.shape[:-1])


def truncate_ball(f: Distribution, radius: float) -> Distribution:
    """Zero every node with |v| > radius."""
    if not radius >= 0:
        raise ValueError("radius must be nonnegative")
    keep = f.grid.speed_squared() <= radius**2
    return f.with_values(np.where(keep, f.values, 0.0))


def boundary_mass(f: Distribution) -> float:
    """Mass carried by nodes within 2h of the domain boundary."""
    g = f.grid
    a = np.abs(g.axis()) > g.v_max - 2.0 * g.h
    near = a[:, None, None] | a[None, :, None] | a[None, None, :]
    return g.cell_volume * float(f.values[near].sum())
