"""Pure NumPy pair-sum kernels.

Reference implementation of the four O(n^6) reductions; the compiled module
in _core.pyx mirrors the loop structure (offsets in lexicographic order,
azimuthal nodes inner) so the two backends agree to rounding. The nthreads
argument is accepted for signature parity and ignored; this backend is
serial.

Conventions shared by both backends:
  - offsets d = i - j, d_a in [-(n-1), n-1], lexicographic (dx slowest)
  - i-box per axis a: [max(0, d_a), n + min(0, d_a))
  - swap branch (u = 0 or eps*|u|^gamma >= 2): exact node reads, no phi loop
  - phi nodes at -pi + 2*pi*m/M, weight 2*pi/M
  - sin(theta) computed as sqrt(m*(2-m))
"""

from __future__ import annotations

import math

import numpy as np

_AXIS_TOL = 1e-12


def _frame(uhx, uhy, uhz):
    # j from e1 - (u.e1)u, e2 fallback near +-e1; k = j x u_hat
    jx = 1.0 - uhx * uhx
    jy = -uhx * uhy
    jz = -uhx * uhz
    jn = math.sqrt(jx * jx + jy * jy + jz * jz)
    if jn < _AXIS_TOL:
        jx = -uhy * uhx
        jy = 1.0 - uhy * uhy
        jz = -uhy * uhz
        jn = math.sqrt(jx * jx + jy * jy + jz * jz)
    jx /= jn
    jy /= jn
    jz /= jn
    kx = jy * uhz - jz * uhy
    ky = jz * uhx - jx * uhz
    kz = jx * uhy - jy * uhx
    return jx, jy, jz, kx, ky, kz


def _phi_eval(kind, prm, w0, w1, w2):
    """Evaluate one tagged test function on broadcastable coordinates."""
    if kind == 0:
        return (
            prm[0]
            + prm[1] * w0
            + prm[2] * w1
            + prm[3] * w2
            + prm[4] * w0 * w0
            + prm[5] * w1 * w1
            + prm[6] * w2 * w2
            + 2.0 * (prm[7] * w0 * w1 + prm[8] * w0 * w2 + prm[9] * w1 * w2)
        )
    if kind == 1:
        d0 = w0 - prm[1]
        d1 = w1 - prm[2]
        d2 = w2 - prm[3]
        q = 1.0 - (d0 * d0 + d1 * d1 + d2 * d2) / (prm[4] * prm[4])
        qp = np.where(q > 0.0, q, 0.0)
        q2 = qp * qp
        return prm[0] * q2 * q2
    if kind == 2:
        d0 = w0 - prm[1]
        d1 = w1 - prm[2]
        d2 = w2 - prm[3]
        return prm[0] * np.exp(-(d0 * d0 + d1 * d1 + d2 * d2) / (2.0 * prm[4] * prm[4]))
    if kind == 3:
        t0 = 1.0 - np.abs(w0 - prm[0]) / prm[3]
        t1 = 1.0 - np.abs(w1 - prm[1]) / prm[3]
        t2 = 1.0 - np.abs(w2 - prm[2]) / prm[3]
        t0 = np.where(t0 > 0.0, t0, 0.0)
        t1 = np.where(t1 > 0.0, t1, 0.0)
        t2 = np.where(t2 > 0.0, t2, 0.0)
        return t0 * t1 * t2
    raise ValueError(f"unknown test-function kind code {kind}")


def _boxes(n, dx, dy, dz):
    a0, a1 = max(0, dx), n + min(0, dx)
    b0, b1 = max(0, dy), n + min(0, dy)
    c0, c1 = max(0, dz), n + min(0, dz)
    return a0, a1, b0, b1, c0, c1


def _interp_box(fpad, a0, a1, b0, b1, c0, c1, pad, ox, oy, oz, wx, wy, wz):
    # weighted 8-corner read of the padded array over the shifted i-box
    ia, ib, ic = a0 + pad + ox, b0 + pad + oy, c0 + pad + oz
    na, nb, nc = a1 - a0, b1 - b0, c1 - c0
    out = None
    for ex, gx in ((0, 1.0 - wx), (1, wx)):
        for ey, gy in ((0, 1.0 - wy), (1, wy)):
            for ez, gz in ((0, 1.0 - wz), (1, wz)):
                blk = (gx * gy * gz) * fpad[
                    ia + ex : ia + ex + na, ib + ey : ib + ey + nb, ic + ez : ic + ez + nc
                ]
                out = blk if out is None else out + blk
    return out


def gain(fa_pad, fb_pad, n, pad, h, eps, gamma, m_phi, nthreads=1):
    """Gain pair sum: acc[i] = h^3 sum_j (4/(pi eps)) sum_phi w fa(v') fb(v*')."""
    acc = np.zeros((n, n, n))
    h3 = h * h * h
    c_int = h3 * 8.0 / (eps * m_phi)
    c_swap = h3 * 8.0 / eps
    phis = -np.pi + 2.0 * np.pi * np.arange(m_phi) / m_phi
    cph = np.cos(phis)
    sph = np.sin(phis)
    for dx in range(-(n - 1), n):
        for dy in range(-(n - 1), n):
            for dz in range(-(n - 1), n):
                a0, a1, b0, b1, c0, c1 = _boxes(n, dx, dy, dz)
                ux, uy, uz = dx * h, dy * h, dz * h
                x2 = ux * ux + uy * uy + uz * uz
                x = math.sqrt(x2)
                if x == 0.0 or eps * x**gamma >= 2.0:
                    fa_j = fa_pad[
                        a0 - dx + pad : a1 - dx + pad,
                        b0 - dy + pad : b1 - dy + pad,
                        c0 - dz + pad : c1 - dz + pad,
                    ]
                    fb_i = fb_pad[a0 + pad : a1 + pad, b0 + pad : b1 + pad, c0 + pad : c1 + pad]
                    acc[a0:a1, b0:b1, c0:c1] += c_swap * (fa_j * fb_i)
                    continue
                mval = eps * x**gamma
                mu = 1.0 - mval
                st = math.sqrt(mval * (2.0 - mval))
                uhx, uhy, uhz = ux / x, uy / x, uz / x
                jx, jy, jz, kx, ky, kz = _frame(uhx, uhy, uhz)
                fb_box = fb_pad[a0 + pad : a1 + pad, b0 + pad : b1 + pad, c0 + pad : c1 + pad]
                for m in range(m_phi):
                    omx = jx * cph[m] + kx * sph[m]
                    omy = jy * cph[m] + ky * sph[m]
                    omz = jz * cph[m] + kz * sph[m]
                    jmx = 0.5 * (x * (mu * uhx + st * omx) - ux)
                    jmy = 0.5 * (x * (mu * uhy + st * omy) - uy)
                    jmz = 0.5 * (x * (mu * uhz + st * omz) - uz)
                    d1x, d1y, d1z = jmx / h, jmy / h, jmz / h
                    d2x, d2y, d2z = -dx - d1x, -dy - d1y, -dz - d1z
                    o1x, o1y, o1z = math.floor(d1x), math.floor(d1y), math.floor(d1z)
                    o2x, o2y, o2z = math.floor(d2x), math.floor(d2y), math.floor(d2z)
                    A = _interp_box(
                        fa_pad, a0, a1, b0, b1, c0, c1, pad,
                        int(o1x), int(o1y), int(o1z), d1x - o1x, d1y - o1y, d1z - o1z,
                    )
                    B = _interp_box(
                        fb_pad, a0, a1, b0, b1, c0, c1, pad,
                        int(o2x), int(o2y), int(o2z), d2x - o2x, d2y - o2y, d2z - o2z,
                    )
                    acc[a0:a1, b0:b1, c0:c1] += c_int * (A * B)
    return acc


def weak_pairs(f, h, v0, eps, gamma, m_phi, kinds, params, nthreads=1):
    """Weak-form pair sums for a batch of tagged test functions.

    Returns (vals, maxterms, nterms): vals[t] is the signed sum over
    non-swap ordered pairs and phi nodes of W*(phi(v') + phi(v*')
    - phi(v_i) - phi(v_j)) with W = h^6 (4/(eps M)) f_i f_j; maxterms[t]
    is the largest |W*single bracket term|; nterms counts 4 per
    (pair, phi) event, the denominator scale for cancellation checks.
    """
    f = np.asarray(f)
    n = f.shape[0]
    kinds = np.asarray(kinds, dtype=np.int64)
    params = np.asarray(params, dtype=float)
    T = kinds.shape[0]
    vals = np.zeros(T)
    maxterms = np.zeros(T)
    nterms = 0
    h3 = h * h * h
    coeff = h3 * h3 * 4.0 / (eps * m_phi)
    phis = -np.pi + 2.0 * np.pi * np.arange(m_phi) / m_phi
    cph = np.cos(phis)
    sph = np.sin(phis)
    ax = v0 + h * np.arange(n)
    for dx in range(-(n - 1), n):
        for dy in range(-(n - 1), n):
            for dz in range(-(n - 1), n):
                ux, uy, uz = dx * h, dy * h, dz * h
                x2 = ux * ux + uy * uy + uz * uz
                x = math.sqrt(x2)
                if x == 0.0 or eps * x**gamma >= 2.0:
                    continue
                mval = eps * x**gamma
                mu = 1.0 - mval
                st = math.sqrt(mval * (2.0 - mval))
                uhx, uhy, uhz = ux / x, uy / x, uz / x
                jx, jy, jz, kx, ky, kz = _frame(uhx, uhy, uhz)
                a0, a1, b0, b1, c0, c1 = _boxes(n, dx, dy, dz)
                fi = f[a0:a1, b0:b1, c0:c1]
                fj = f[a0 - dx : a1 - dx, b0 - dy : b1 - dy, c0 - dz : c1 - dz]
                W = coeff * fi * fj
                X = ax[a0:a1][:, None, None]
                Y = ax[b0:b1][None, :, None]
                Z = ax[c0:c1][None, None, :]
                nterms += 4 * m_phi * fi.size
                for t in range(T):
                    Ti = _phi_eval(kinds[t], params[t], X, Y, Z)
                    Tj = _phi_eval(kinds[t], params[t], X - ux, Y - uy, Z - uz)
                    aTn = np.maximum(np.abs(Ti), np.abs(Tj))
                    for m in range(m_phi):
                        omx = jx * cph[m] + kx * sph[m]
                        omy = jy * cph[m] + ky * sph[m]
                        omz = jz * cph[m] + kz * sph[m]
                        jmx = 0.5 * (x * (mu * uhx + st * omx) - ux)
                        jmy = 0.5 * (x * (mu * uhy + st * omy) - uy)
                        jmz = 0.5 * (x * (mu * uhz + st * omz) - uz)
                        Tp = _phi_eval(kinds[t], params[t], X + jmx, Y + jmy, Z + jmz)
                        Tq = _phi_eval(
                            kinds[t], params[t], X - ux - jmx, Y - uy - jmy, Z - uz - jmz
                        )
                        vals[t] += float(np.sum(W * (Tp + Tq - Ti - Tj)))
                        big = np.maximum(np.maximum(np.abs(Tp), np.abs(Tq)), aTn)
                        mt = float(np.max(W * big))
                        if mt > maxterms[t]:
                            maxterms[t] = mt
    return vals, maxterms, nterms


def landau_pairs(f, grad, trh, hess6, h, gamma, shell, nthreads=1):
    """Weak Landau pair sum over off-diagonal ordered pairs.

    grad is (n,n,n,3), trh (n,n,n), hess6 (n,n,n,6) packed
    (00,11,22,01,02,12). Returns (total, near, maxterm, nterms) where near
    is the contribution from pairs with |u| <= shell (included in total).
    """
    f = np.asarray(f)
    n = f.shape[0]
    h3 = h * h * h
    coeff = h3 * h3
    total = 0.0
    near = 0.0
    maxterm = 0.0
    nterms = 0
    for dx in range(-(n - 1), n):
        for dy in range(-(n - 1), n):
            for dz in range(-(n - 1), n):
                if dx == 0 and dy == 0 and dz == 0:
                    continue
                ux, uy, uz = dx * h, dy * h, dz * h
                x2 = ux * ux + uy * uy + uz * uz
                x = math.sqrt(x2)
                uhx, uhy, uhz = ux / x, uy / x, uz / x
                q00, q11, q22 = uhx * uhx, uhy * uhy, uhz * uhz
                q01, q02, q12 = 2.0 * uhx * uhy, 2.0 * uhx * uhz, 2.0 * uhy * uhz
                a0, a1, b0, b1, c0, c1 = _boxes(n, dx, dy, dz)
                sl_i = (slice(a0, a1), slice(b0, b1), slice(c0, c1))
                sl_j = (slice(a0 - dx, a1 - dx), slice(b0 - dy, b1 - dy), slice(c0 - dz, c1 - dz))
                W = coeff * x**gamma * f[sl_i] * f[sl_j]
                gi = grad[sl_i]
                gj = grad[sl_j]
                t1 = -2.0 * (gi[..., 0] * ux + gi[..., 1] * uy + gi[..., 2] * uz)
                t2 = 2.0 * (gj[..., 0] * ux + gj[..., 1] * uy + gj[..., 2] * uz)
                hi = hess6[sl_i]
                hj = hess6[sl_j]
                qf_i = (
                    q00 * hi[..., 0] + q11 * hi[..., 1] + q22 * hi[..., 2]
                    + q01 * hi[..., 3] + q02 * hi[..., 4] + q12 * hi[..., 5]
                )
                qf_j = (
                    q00 * hj[..., 0] + q11 * hj[..., 1] + q22 * hj[..., 2]
                    + q01 * hj[..., 3] + q02 * hj[..., 4] + q12 * hj[..., 5]
                )
                t3 = 0.5 * x2 * (trh[sl_i] - qf_i)
                t4 = 0.5 * x2 * (trh[sl_j] - qf_j)
                part = float(np.sum(W * (t1 + t2 + t3 + t4)))
                total += part
                if x <= shell:
                    near += part
                big = np.maximum(np.maximum(np.abs(t1), np.abs(t2)), np.maximum(np.abs(t3), np.abs(t4)))
                mt = float(np.max(W * big))
                if mt > maxterm:
                    maxterm = mt
                nterms += 4 * (a1 - a0) * (b1 - b0) * (c1 - c0)
    return total, near, maxterm, nterms


def pair_power(f, h, alpha, nthreads=1):
    """h^6 sum over pairs of f_i f_j |v_i - v_j|^alpha.

    The diagonal is included only at alpha = 0 (0^0 = 1 convention); for
    alpha != 0 it contributes nothing (alpha > 0) or is excluded as
    singular (alpha < 0).
    """
    f = np.asarray(f)
    n = f.shape[0]
    h3 = h * h * h
    coeff = h3 * h3
    total = 0.0
    for dx in range(-(n - 1), n):
        for dy in range(-(n - 1), n):
            for dz in range(-(n - 1), n):
                if dx == 0 and dy == 0 and dz == 0:
                    if alpha == 0.0:
                        total += coeff * float(np.sum(f * f))
                    continue
                ux, uy, uz = dx * h, dy * h, dz * h
                x = math.sqrt(ux * ux + uy * uy + uz * uz)
                a0, a1, b0, b1, c0, c1 = _boxes(n, dx, dy, dz)
                fi = f[a0:a1, b0:b1, c0:c1]
                fj = f[a0 - dx : a1 - dx, b0 - dy : b1 - dy, c0 - dz : c1 - dz]
                total += coeff * x**alpha * float(np.sum(fi * fj))
    return total
