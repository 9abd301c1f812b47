"""Strong- and weak-form collision operator on the velocity grid.

The gain term gathers f at post-collision points by trilinear interpolation;
pairs whose scattering angle is exactly pi (u = 0, or eps*|u|^gamma >= 2)
are handled as exact velocity swaps with no interpolation. The weak-form
evaluator never interpolates f: test functions are evaluated analytically at
the post-collision points, which makes it the reference for conservation
and grazing-limit checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import _backend
from ._backend import pad_width
from .grid import Distribution, moments
from .kernel import KernelParams, total_rate
from .testfunctions import KIND_CODES, PARAM_WIDTH, TestFunction

__all__ = [
    "QuadratureSpec",
    "q_gain",
    "q_loss",
    "q_total",
    "weak_form_q",
    "weak_form_q_batch",
]


@dataclass(frozen=True)
class QuadratureSpec:
    """Azimuthal node count and interpolation scheme for the gain term."""

    m_phi: int = 16
    interpolation: str = "trilinear"

    def __post_init__(self):
        if not isinstance(self.m_phi, int) or self.m_phi < 8:
            raise ValueError(f"m_phi must be an integer >= 8, got {self.m_phi}")
        if self.interpolation != "trilinear":
            raise ValueError(f"unsupported interpolation scheme {self.interpolation!r}")


def _padded(values: np.ndarray, pad: int) -> np.ndarray:
    n = values.shape[0]
    out = np.zeros((n + 2 * pad,) * 3)
    out[pad : pad + n, pad : pad + n, pad : pad + n] = values
    return out


def q_gain(
    f: Distribution,
    params: KernelParams,
    quad: QuadratureSpec,
    other: Optional[Distribution] = None,
) -> Distribution:
    """Gain term Q+(f, other)(v_i), evaluating f at v' and other at v*'.

    other defaults to f (the quadratic case). The result is nonnegative by
    construction: interpolation weights and inputs are all >= 0.
    """
    if other is None:
        other = f
    if other.grid != f.grid:
        raise ValueError("distributions live on different grids")
    g = f.grid
    pad = pad_width(g.n)
    acc = _backend.kernels.gain(
        _padded(f.values, pad),
        _padded(other.values, pad),
        g.n,
        pad,
        g.h,
        params.eps,
        params.gamma,
        quad.m_phi,
        _backend.num_threads(),
    )
    return f.with_values(acc)


def q_loss(
    f: Distribution, params: KernelParams, other: Optional[Distribution] = None
) -> Distribution:
    """Loss term (8/eps) * mass(other) * f, with other defaulting to f."""
    if other is None:
        other = f
    if other.grid != f.grid:
        raise ValueError("distributions live on different grids")
    rho = moments(other).mass
    return f.with_values(total_rate(params) * rho * f.values)


def q_total(f: Distribution, params: KernelParams, quad: QuadratureSpec) -> np.ndarray:
    """Q(f,f) = gain - loss as a plain (n,n,n) array (it is signed)."""
    return q_gain(f, params, quad).values - q_loss(f, params).values


def _tagged(phis: Sequence[TestFunction]):
    kinds = np.empty(len(phis), dtype=np.int64)
    params = np.zeros((len(phis), PARAM_WIDTH))
    for t, phi in enumerate(phis):
        kinds[t] = KIND_CODES[phi.kind]
        params[t] = phi.params
    return kinds, params


def weak_form_q_batch(
    f: Distribution,
    phis: Sequence[TestFunction],
    params: KernelParams,
    quad: QuadratureSpec,
):
    """Evaluate the weak form for several test functions in one pair sweep.

    Returns (vals, maxterms, nterms). vals[t] approximates the integral of
    Q(f,f)*phi_t; maxterms[t] is the largest magnitude among the four
    signed bracket terms W*phi(.) encountered, and nterms counts those
    terms, so maxterms[t]*nterms is the dynamic range against which the
    cancellation of vals[t] should be judged.
    """
    if all(phi.kind is not None for phi in phis):
        kinds, packed = _tagged(phis)
        vals, maxterms, nterms = _backend.kernels.weak_pairs(
            f.values,
            f.grid.h,
            -f.grid.v_max,
            params.eps,
            params.gamma,
            quad.m_phi,
            kinds,
            packed,
            _backend.num_threads(),
        )
    else:
        vals, maxterms, nterms = _weak_generic(f, phis, params, quad)
    return np.asarray(vals), np.asarray(maxterms), int(nterms)


def weak_form_q(
    f: Distribution, phi: TestFunction, params: KernelParams, quad: QuadratureSpec
) -> float:
    vals, _, _ = weak_form_q_batch(f, [phi], params, quad)
    return float(vals[0])


def _weak_generic(f, phis, params, quad):
    # Slow path for untagged test functions: same pair/phi semantics as the
    # backend kernels, with phi.value called on stacked coordinate arrays.
    from . import _corepy

    g = f.grid
    n, h, v0 = g.n, g.h, -g.v_max
    eps, gamma = params.eps, params.gamma
    m_phi = quad.m_phi
    T = len(phis)
    vals = np.zeros(T)
    maxterms = np.zeros(T)
    nterms = 0
    h3 = h * h * h
    coeff = h3 * h3 * 4.0 / (eps * m_phi)
    phase = -np.pi + 2.0 * np.pi * np.arange(m_phi) / m_phi
    cph, sph = np.cos(phase), np.sin(phase)
    axc = v0 + h * np.arange(n)
    fv = f.values

    def at(t, w0, w1, w2):
        pts = np.stack(np.broadcast_arrays(w0, w1, w2), axis=-1)
        return np.asarray(phis[t].value(pts), dtype=float)

    for dx in range(-(n - 1), n):
        for dy in range(-(n - 1), n):
            for dz in range(-(n - 1), n):
                ux, uy, uz = dx * h, dy * h, dz * h
                x = math.sqrt(ux * ux + uy * uy + uz * uz)
                if x == 0.0 or eps * x**gamma >= 2.0:
                    continue
                mval = eps * x**gamma
                mu = 1.0 - mval
                st = math.sqrt(mval * (2.0 - mval))
                uhx, uhy, uhz = ux / x, uy / x, uz / x
                jx, jy, jz, kx, ky, kz = _corepy._frame(uhx, uhy, uhz)
                a0, a1 = max(0, dx), n + min(0, dx)
                b0, b1 = max(0, dy), n + min(0, dy)
                c0, c1 = max(0, dz), n + min(0, dz)
                fi = fv[a0:a1, b0:b1, c0:c1]
                fj = fv[a0 - dx : a1 - dx, b0 - dy : b1 - dy, c0 - dz : c1 - dz]
                W = coeff * fi * fj
                X = axc[a0:a1][:, None, None]
                Y = axc[b0:b1][None, :, None]
                Z = axc[c0:c1][None, None, :]
                nterms += 4 * m_phi * fi.size
                for t in range(T):
                    Ti = at(t, X, Y, Z)
                    Tj = at(t, X - ux, Y - uy, Z - uz)
                    aTn = np.maximum(np.abs(Ti), np.abs(Tj))
                    for m in range(m_phi):
                        omx = jx * cph[m] + kx * sph[m]
                        omy = jy * cph[m] + ky * sph[m]
                        omz = jz * cph[m] + kz * sph[m]
                        jmx = 0.5 * (x * (mu * uhx + st * omx) - ux)
                        jmy = 0.5 * (x * (mu * uhy + st * omy) - uy)
                        jmz = 0.5 * (x * (mu * uhz + st * omz) - uz)
                        Tp = at(t, X + jmx, Y + jmy, Z + jmz)
                        Tq = at(t, X - ux - jmx, Y - uy - jmy, Z - uz - jmz)
                        vals[t] += float(np.sum(W * (Tp + Tq - Ti - Tj)))
                        big = np.maximum(np.maximum(np.abs(Tp), np.abs(Tq)), aTn)
                        mt = float(np.max(W * big))
                        if mt > maxterms[t]:
                            maxterms[t] = mt
    return vals, maxterms, nterms
