# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
# cython: language_level=3
"""Compiled pair-sum kernels (OpenMP).

Mirrors _corepy.py loop-for-loop; see that module for the shared index and
weighting conventions. Offsets are distributed over threads with a static
schedule and per-thread partials are merged in thread order, so results
are deterministic at fixed thread count (and identical in exact arithmetic
to the serial fallback).
"""

import numpy as np

from cython.parallel cimport parallel, prange, threadid
from libc.math cimport exp, fabs, floor, pow, sqrt
from libc.stdlib cimport free, malloc


cdef double _AXIS_TOL = 1e-12


cdef inline double phi_eval(long kind, const double* prm,
                            double w0, double w1, double w2) noexcept nogil:
    cdef double d0, d1, d2, q, q2, t0, t1, t2
    if kind == 0:
        return (prm[0] + prm[1] * w0 + prm[2] * w1 + prm[3] * w2
                + prm[4] * w0 * w0 + prm[5] * w1 * w1 + prm[6] * w2 * w2
                + 2.0 * (prm[7] * w0 * w1 + prm[8] * w0 * w2 + prm[9] * w1 * w2))
    elif kind == 1:
        d0 = w0 - prm[1]
        d1 = w1 - prm[2]
        d2 = w2 - prm[3]
        q = 1.0 - (d0 * d0 + d1 * d1 + d2 * d2) / (prm[4] * prm[4])
        if q <= 0.0:
            return 0.0
        q2 = q * q
        return prm[0] * q2 * q2
    elif kind == 2:
        d0 = w0 - prm[1]
        d1 = w1 - prm[2]
        d2 = w2 - prm[3]
        return prm[0] * exp(-(d0 * d0 + d1 * d1 + d2 * d2) / (2.0 * prm[4] * prm[4]))
    else:
        t0 = 1.0 - fabs(w0 - prm[0]) / prm[3]
        t1 = 1.0 - fabs(w1 - prm[1]) / prm[3]
        t2 = 1.0 - fabs(w2 - prm[2]) / prm[3]
        if t0 < 0.0:
            t0 = 0.0
        if t1 < 0.0:
            t1 = 0.0
        if t2 < 0.0:
            t2 = 0.0
        return t0 * t1 * t2


def gain(const double[:, :, ::1] fa_pad, const double[:, :, ::1] fb_pad,
         int n, int pad, double h, double eps, double gamma,
         int m_phi, int nthreads=1):
    cdef int nt = nthreads if nthreads > 0 else 1
    cdef int side = 2 * n - 1
    cdef long s2 = <long>side * side
    cdef long noff = s2 * side

    acc_np = np.zeros((nt, n, n, n))
    cdef double[:, :, :, ::1] acc = acc_np
    phis = -np.pi + 2.0 * np.pi * np.arange(m_phi) / m_phi
    cph_np = np.cos(phis)
    sph_np = np.sin(phis)
    cdef double[::1] cph = cph_np
    cdef double[::1] sph = sph_np

    cdef double h3 = h * h * h
    cdef double c_int = h3 * 8.0 / (eps * m_phi)
    cdef double c_swap = h3 * 8.0 / eps

    cdef long idx, rem
    cdef int tid, dx, dy, dz, a0, a1, b0, b1, c0, c1, i1, i2, i3, m
    cdef double ux, uy, uz, x2, x, mval, mu, st, uhx, uhy, uhz
    cdef double jhx, jhy, jhz, jn, khx, khy, khz
    cdef double omx, omy, omz, jmx, jmy, jmz
    cdef double d1x, d1y, d1z, d2x, d2y, d2z, fl
    cdef long o1x, o1y, o1z, o2x, o2y, o2z
    cdef double gx0, gx1, gy0, gy1, gz0, gz1
    cdef double hx0, hx1, hy0, hy1, hz0, hz1
    cdef double wa000, wa001, wa010, wa011, wa100, wa101, wa110, wa111
    cdef double wb000, wb001, wb010, wb011, wb100, wb101, wb110, wb111
    cdef const double *pa00
    cdef const double *pa01
    cdef const double *pa10
    cdef const double *pa11
    cdef const double *pb00
    cdef const double *pb01
    cdef const double *pb10
    cdef const double *pb11
    cdef const double *pj
    cdef const double *pi
    cdef double *po
    cdef long za, zb
    cdef double A, B

    with nogil, parallel(num_threads=nt):
        tid = threadid()
        for idx in prange(noff, schedule='static'):
            dx = <int>(idx // s2) - (n - 1)
            rem = idx % s2
            dy = <int>(rem // side) - (n - 1)
            dz = <int>(rem % side) - (n - 1)
            a0 = max(0, dx)
            a1 = n + min(0, dx)
            b0 = max(0, dy)
            b1 = n + min(0, dy)
            c0 = max(0, dz)
            c1 = n + min(0, dz)
            ux = dx * h
            uy = dy * h
            uz = dz * h
            x2 = ux * ux + uy * uy + uz * uz
            x = sqrt(x2)
            if x == 0.0 or eps * pow(x, gamma) >= 2.0:
                for i1 in range(a0, a1):
                    for i2 in range(b0, b1):
                        pj = &fa_pad[i1 - dx + pad, i2 - dy + pad, 0]
                        pi = &fb_pad[i1 + pad, i2 + pad, 0]
                        po = &acc[tid, i1, i2, 0]
                        for i3 in range(c0, c1):
                            po[i3] = po[i3] + c_swap * (pj[i3 - dz + pad] * pi[i3 + pad])
                continue
            mval = eps * pow(x, gamma)
            mu = 1.0 - mval
            st = sqrt(mval * (2.0 - mval))
            uhx = ux / x
            uhy = uy / x
            uhz = uz / x
            jhx = 1.0 - uhx * uhx
            jhy = -uhx * uhy
            jhz = -uhx * uhz
            jn = sqrt(jhx * jhx + jhy * jhy + jhz * jhz)
            if jn < _AXIS_TOL:
                jhx = -uhy * uhx
                jhy = 1.0 - uhy * uhy
                jhz = -uhy * uhz
                jn = sqrt(jhx * jhx + jhy * jhy + jhz * jhz)
            jhx = jhx / jn
            jhy = jhy / jn
            jhz = jhz / jn
            khx = jhy * uhz - jhz * uhy
            khy = jhz * uhx - jhx * uhz
            khz = jhx * uhy - jhy * uhx
            for m in range(m_phi):
                omx = jhx * cph[m] + khx * sph[m]
                omy = jhy * cph[m] + khy * sph[m]
                omz = jhz * cph[m] + khz * sph[m]
                jmx = 0.5 * (x * (mu * uhx + st * omx) - ux)
                jmy = 0.5 * (x * (mu * uhy + st * omy) - uy)
                jmz = 0.5 * (x * (mu * uhz + st * omz) - uz)
                d1x = jmx / h
                d1y = jmy / h
                d1z = jmz / h
                d2x = -dx - d1x
                d2y = -dy - d1y
                d2z = -dz - d1z
                fl = floor(d1x)
                o1x = <long>fl
                gx1 = d1x - fl
                gx0 = 1.0 - gx1
                fl = floor(d1y)
                o1y = <long>fl
                gy1 = d1y - fl
                gy0 = 1.0 - gy1
                fl = floor(d1z)
                o1z = <long>fl
                gz1 = d1z - fl
                gz0 = 1.0 - gz1
                fl = floor(d2x)
                o2x = <long>fl
                hx1 = d2x - fl
                hx0 = 1.0 - hx1
                fl = floor(d2y)
                o2y = <long>fl
                hy1 = d2y - fl
                hy0 = 1.0 - hy1
                fl = floor(d2z)
                o2z = <long>fl
                hz1 = d2z - fl
                hz0 = 1.0 - hz1
                wa000 = gx0 * gy0 * gz0
                wa001 = gx0 * gy0 * gz1
                wa010 = gx0 * gy1 * gz0
                wa011 = gx0 * gy1 * gz1
                wa100 = gx1 * gy0 * gz0
                wa101 = gx1 * gy0 * gz1
                wa110 = gx1 * gy1 * gz0
                wa111 = gx1 * gy1 * gz1
                wb000 = hx0 * hy0 * hz0
                wb001 = hx0 * hy0 * hz1
                wb010 = hx0 * hy1 * hz0
                wb011 = hx0 * hy1 * hz1
                wb100 = hx1 * hy0 * hz0
                wb101 = hx1 * hy0 * hz1
                wb110 = hx1 * hy1 * hz0
                wb111 = hx1 * hy1 * hz1
                for i1 in range(a0, a1):
                    for i2 in range(b0, b1):
                        pa00 = &fa_pad[i1 + pad + o1x, i2 + pad + o1y, 0]
                        pa01 = &fa_pad[i1 + pad + o1x, i2 + pad + o1y + 1, 0]
                        pa10 = &fa_pad[i1 + pad + o1x + 1, i2 + pad + o1y, 0]
                        pa11 = &fa_pad[i1 + pad + o1x + 1, i2 + pad + o1y + 1, 0]
                        pb00 = &fb_pad[i1 + pad + o2x, i2 + pad + o2y, 0]
                        pb01 = &fb_pad[i1 + pad + o2x, i2 + pad + o2y + 1, 0]
                        pb10 = &fb_pad[i1 + pad + o2x + 1, i2 + pad + o2y, 0]
                        pb11 = &fb_pad[i1 + pad + o2x + 1, i2 + pad + o2y + 1, 0]
                        po = &acc[tid, i1, i2, 0]
                        for i3 in range(c0, c1):
                            za = i3 + pad + o1z
                            zb = i3 + pad + o2z
                            A = (wa000 * pa00[za] + wa001 * pa00[za + 1]
                                 + wa010 * pa01[za] + wa011 * pa01[za + 1]
                                 + wa100 * pa10[za] + wa101 * pa10[za + 1]
                                 + wa110 * pa11[za] + wa111 * pa11[za + 1])
                            B = (wb000 * pb00[zb] + wb001 * pb00[zb + 1]
                                 + wb010 * pb01[zb] + wb011 * pb01[zb + 1]
                                 + wb100 * pb10[zb] + wb101 * pb10[zb + 1]
                                 + wb110 * pb11[zb] + wb111 * pb11[zb + 1])
                            po[i3] = po[i3] + c_int * (A * B)

    out = acc_np[0].copy()
    for m in range(1, nt):
        out += acc_np[m]
    return out


def weak_pairs(const double[:, :, ::1] f, double h, double v0, double eps,
               double gamma, int m_phi, const long[::1] kinds,
               const double[:, ::1] params, int nthreads=1):
    cdef int nt = nthreads if nthreads > 0 else 1
    cdef int n = f.shape[0]
    cdef int T = kinds.shape[0]
    cdef int side = 2 * n - 1
    cdef long s2 = <long>side * side
    cdef long noff = s2 * side
    cdef long nmax = <long>n * n * n
    cdef long t
    for t in range(T):
        if kinds[t] < 0 or kinds[t] > 3:
            raise ValueError(f"unknown test-function kind code {kinds[t]}")

    vals_np = np.zeros((nt, T))
    max_np = np.zeros((nt, T))
    nterm_np = np.zeros(nt, dtype=np.int64)
    cdef double[:, ::1] vals_buf = vals_np
    cdef double[:, ::1] max_buf = max_np
    cdef long[::1] nterm_buf = nterm_np

    phis = -np.pi + 2.0 * np.pi * np.arange(m_phi) / m_phi
    cph_np = np.cos(phis)
    sph_np = np.sin(phis)
    cdef double[::1] cph = cph_np
    cdef double[::1] sph = sph_np

    cdef double h3 = h * h * h
    cdef double coeff = h3 * h3 * 4.0 / (eps * m_phi)

    cdef long idx, rem, bs, bi, kd
    cdef int tid, dx, dy, dz, a0, a1, b0, b1, c0, c1, i1, i2, i3, m, tt
    cdef double ux, uy, uz, x2, x, mval, mu, st, uhx, uhy, uhz
    cdef double jhx, jhy, jhz, jn, khx, khy, khz
    cdef double omx, omy, omz, jmx, jmy, jmz
    cdef double w0, w1, w2, W, Tp, Tq, tiv, tjv, partial, mt, big, b2, tv
    cdef const double *prm
    cdef const double *pfi
    cdef const double *pfj
    cdef double *scratch
    cdef double *tiP
    cdef double *tjP

    with nogil, parallel(num_threads=nt):
        tid = threadid()
        scratch = <double*>malloc(2 * T * nmax * sizeof(double))
        tiP = scratch
        tjP = scratch + T * nmax
        for idx in prange(noff, schedule='static'):
            dx = <int>(idx // s2) - (n - 1)
            rem = idx % s2
            dy = <int>(rem // side) - (n - 1)
            dz = <int>(rem % side) - (n - 1)
            ux = dx * h
            uy = dy * h
            uz = dz * h
            x2 = ux * ux + uy * uy + uz * uz
            x = sqrt(x2)
            if x == 0.0 or eps * pow(x, gamma) >= 2.0:
                continue
            mval = eps * pow(x, gamma)
            mu = 1.0 - mval
            st = sqrt(mval * (2.0 - mval))
            uhx = ux / x
            uhy = uy / x
            uhz = uz / x
            jhx = 1.0 - uhx * uhx
            jhy = -uhx * uhy
            jhz = -uhx * uhz
            jn = sqrt(jhx * jhx + jhy * jhy + jhz * jhz)
            if jn < _AXIS_TOL:
                jhx = -uhy * uhx
                jhy = 1.0 - uhy * uhy
                jhz = -uhy * uhz
                jn = sqrt(jhx * jhx + jhy * jhy + jhz * jhz)
            jhx = jhx / jn
            jhy = jhy / jn
            jhz = jhz / jn
            khx = jhy * uhz - jhz * uhy
            khy = jhz * uhx - jhx * uhz
            khz = jhx * uhy - jhy * uhx
            a0 = max(0, dx)
            a1 = n + min(0, dx)
            b0 = max(0, dy)
            b1 = n + min(0, dy)
            c0 = max(0, dz)
            c1 = n + min(0, dz)
            bs = <long>(a1 - a0) * (b1 - b0) * (c1 - c0)
            for tt in range(T):
                kd = kinds[tt]
                prm = &params[tt, 0]
                bi = 0
                for i1 in range(a0, a1):
                    w0 = v0 + h * i1
                    for i2 in range(b0, b1):
                        w1 = v0 + h * i2
                        for i3 in range(c0, c1):
                            w2 = v0 + h * i3
                            tiP[tt * bs + bi] = phi_eval(kd, prm, w0, w1, w2)
                            tjP[tt * bs + bi] = phi_eval(kd, prm, w0 - ux, w1 - uy, w2 - uz)
                            bi = bi + 1
            nterm_buf[tid] += 4 * m_phi * bs
            for tt in range(T):
                kd = kinds[tt]
                prm = &params[tt, 0]
                mt = max_buf[tid, tt]
                for m in range(m_phi):
                    omx = jhx * cph[m] + khx * sph[m]
                    omy = jhy * cph[m] + khy * sph[m]
                    omz = jhz * cph[m] + khz * sph[m]
                    jmx = 0.5 * (x * (mu * uhx + st * omx) - ux)
                    jmy = 0.5 * (x * (mu * uhy + st * omy) - uy)
                    jmz = 0.5 * (x * (mu * uhz + st * omz) - uz)
                    partial = 0.0
                    bi = 0
                    for i1 in range(a0, a1):
                        w0 = v0 + h * i1
                        for i2 in range(b0, b1):
                            w1 = v0 + h * i2
                            pfi = &f[i1, i2, 0]
                            pfj = &f[i1 - dx, i2 - dy, 0]
                            for i3 in range(c0, c1):
                                w2 = v0 + h * i3
                                W = coeff * pfi[i3] * pfj[i3 - dz]
                                Tp = phi_eval(kd, prm, w0 + jmx, w1 + jmy, w2 + jmz)
                                Tq = phi_eval(kd, prm, w0 - ux - jmx, w1 - uy - jmy,
                                              w2 - uz - jmz)
                                tiv = tiP[tt * bs + bi]
                                tjv = tjP[tt * bs + bi]
                                partial = partial + W * (Tp + Tq - tiv - tjv)
                                big = fabs(Tp)
                                b2 = fabs(Tq)
                                if b2 > big:
                                    big = b2
                                b2 = fabs(tiv)
                                if b2 > big:
                                    big = b2
                                b2 = fabs(tjv)
                                if b2 > big:
                                    big = b2
                                tv = W * big
                                if tv > mt:
                                    mt = tv
                                bi = bi + 1
                    vals_buf[tid, tt] += partial
                    max_buf[tid, tt] = mt
        free(scratch)

    vals = vals_np[0].copy()
    for m in range(1, nt):
        vals += vals_np[m]
    maxterms = max_np.max(axis=0)
    nterms = int(nterm_np.sum())
    return vals, maxterms, nterms


def landau_pairs(const double[:, :, ::1] f, const double[:, :, :, ::1] grad,
                 const double[:, :, ::1] trh, const double[:, :, :, ::1] hess6,
                 double h, double gamma, double shell, int nthreads=1):
    cdef int nt = nthreads if nthreads > 0 else 1
    cdef int n = f.shape[0]
    cdef int side = 2 * n - 1
    cdef long s2 = <long>side * side
    cdef long noff = s2 * side

    tot_np = np.zeros(nt)
    near_np = np.zeros(nt)
    max_np = np.zeros(nt)
    nterm_np = np.zeros(nt, dtype=np.int64)
    cdef double[::1] tot_buf = tot_np
    cdef double[::1] near_buf = near_np
    cdef double[::1] max_buf = max_np
    cdef long[::1] nterm_buf = nterm_np

    cdef double h3 = h * h * h
    cdef double coeff = h3 * h3

    cdef long idx, rem
    cdef int tid, dx, dy, dz, a0, a1, b0, b1, c0, c1, i1, i2, i3
    cdef double ux, uy, uz, x2, x, uhx, uhy, uhz, cg
    cdef double q00, q11, q22, q01, q02, q12
    cdef double W, t1, t2, t3, t4, qf_i, qf_j, part, mt, big, b2, tv
    cdef const double *pfi
    cdef const double *pfj
    cdef const double *pgi
    cdef const double *pgj
    cdef const double *phi6
    cdef const double *phj6
    cdef const double *pti
    cdef const double *ptj
    cdef long zi, zj

    with nogil, parallel(num_threads=nt):
        tid = threadid()
        for idx in prange(noff, schedule='static'):
            dx = <int>(idx // s2) - (n - 1)
            rem = idx % s2
            dy = <int>(rem // side) - (n - 1)
            dz = <int>(rem % side) - (n - 1)
            if dx == 0 and dy == 0 and dz == 0:
                continue
            ux = dx * h
            uy = dy * h
            uz = dz * h
            x2 = ux * ux + uy * uy + uz * uz
            x = sqrt(x2)
            uhx = ux / x
            uhy = uy / x
            uhz = uz / x
            q00 = uhx * uhx
            q11 = uhy * uhy
            q22 = uhz * uhz
            q01 = 2.0 * uhx * uhy
            q02 = 2.0 * uhx * uhz
            q12 = 2.0 * uhy * uhz
            a0 = max(0, dx)
            a1 = n + min(0, dx)
            b0 = max(0, dy)
            b1 = n + min(0, dy)
            c0 = max(0, dz)
            c1 = n + min(0, dz)
            cg = coeff * pow(x, gamma)
            part = 0.0
            mt = max_buf[tid]
            for i1 in range(a0, a1):
                for i2 in range(b0, b1):
                    pfi = &f[i1, i2, 0]
                    pfj = &f[i1 - dx, i2 - dy, 0]
                    pgi = &grad[i1, i2, 0, 0]
                    pgj = &grad[i1 - dx, i2 - dy, 0, 0]
                    phi6 = &hess6[i1, i2, 0, 0]
                    phj6 = &hess6[i1 - dx, i2 - dy, 0, 0]
                    pti = &trh[i1, i2, 0]
                    ptj = &trh[i1 - dx, i2 - dy, 0]
                    for i3 in range(c0, c1):
                        zi = 3 * i3
                        zj = 3 * (i3 - dz)
                        W = cg * pfi[i3] * pfj[i3 - dz]
                        t1 = -2.0 * (pgi[zi] * ux + pgi[zi + 1] * uy + pgi[zi + 2] * uz)
                        t2 = 2.0 * (pgj[zj] * ux + pgj[zj + 1] * uy + pgj[zj + 2] * uz)
                        zi = 6 * i3
                        zj = 6 * (i3 - dz)
                        qf_i = (q00 * phi6[zi] + q11 * phi6[zi + 1] + q22 * phi6[zi + 2]
                                + q01 * phi6[zi + 3] + q02 * phi6[zi + 4] + q12 * phi6[zi + 5])
                        qf_j = (q00 * phj6[zj] + q11 * phj6[zj + 1] + q22 * phj6[zj + 2]
                                + q01 * phj6[zj + 3] + q02 * phj6[zj + 4] + q12 * phj6[zj + 5])
                        t3 = 0.5 * x2 * (pti[i3] - qf_i)
                        t4 = 0.5 * x2 * (ptj[i3 - dz] - qf_j)
                        part = part + W * (t1 + t2 + t3 + t4)
                        big = fabs(t1)
                        b2 = fabs(t2)
                        if b2 > big:
                            big = b2
                        b2 = fabs(t3)
                        if b2 > big:
                            big = b2
                        b2 = fabs(t4)
                        if b2 > big:
                            big = b2
                        tv = W * big
                        if tv > mt:
                            mt = tv
            tot_buf[tid] += part
            if x <= shell:
                near_buf[tid] += part
            max_buf[tid] = mt
            nterm_buf[tid] += 4 * <long>(a1 - a0) * (b1 - b0) * (c1 - c0)

    cdef int k
    total = 0.0
    near = 0.0
    for k in range(nt):
        total += tot_np[k]
        near += near_np[k]
    return total, near, float(max_np.max()), int(nterm_np.sum())


def pair_power(const double[:, :, ::1] f, double h, double alpha, int nthreads=1):
    cdef int nt = nthreads if nthreads > 0 else 1
    cdef int n = f.shape[0]
    cdef int side = 2 * n - 1
    cdef long s2 = <long>side * side
    cdef long noff = s2 * side

    tot_np = np.zeros(nt)
    cdef double[::1] tot_buf = tot_np

    cdef double h3 = h * h * h
    cdef double coeff = h3 * h3

    cdef long idx, rem
    cdef int tid, dx, dy, dz, a0, a1, b0, b1, c0, c1, i1, i2, i3
    cdef double ux, uy, uz, x, S
    cdef const double *pfi
    cdef const double *pfj

    with nogil, parallel(num_threads=nt):
        tid = threadid()
        for idx in prange(noff, schedule='static'):
            dx = <int>(idx // s2) - (n - 1)
            rem = idx % s2
            dy = <int>(rem // side) - (n - 1)
            dz = <int>(rem % side) - (n - 1)
            if dx == 0 and dy == 0 and dz == 0:
                if alpha == 0.0:
                    S = 0.0
                    for i1 in range(n):
                        for i2 in range(n):
                            pfi = &f[i1, i2, 0]
                            for i3 in range(n):
                                S = S + pfi[i3] * pfi[i3]
                    tot_buf[tid] += coeff * S
                continue
            ux = dx * h
            uy = dy * h
            uz = dz * h
            x = sqrt(ux * ux + uy * uy + uz * uz)
            a0 = max(0, dx)
            a1 = n + min(0, dx)
            b0 = max(0, dy)
            b1 = n + min(0, dy)
            c0 = max(0, dz)
            c1 = n + min(0, dz)
            S = 0.0
            for i1 in range(a0, a1):
                for i2 in range(b0, b1):
                    pfi = &f[i1, i2, 0]
                    pfj = &f[i1 - dx, i2 - dy, 0]
                    for i3 in range(c0, c1):
                        S = S + pfi[i3] * pfj[i3 - dz]
            tot_buf[tid] += coeff * pow(x, alpha) * S

    total = 0.0
    cdef int k
    for k in range(nt):
        total += tot_np[k]
    return total
