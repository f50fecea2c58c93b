# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled hot loops: valid cross-correlation plus its adjoints, and the
two-stage RK2 finite-difference advance. Mirrors ``pykernels.py`` op for op."""

import numpy as np


ctypedef fused real:
    float
    double


def conv2d_fwd(real[:, :, :, ::1] x, real[:, :, :, ::1] w, Py_ssize_t stride):
    cdef Py_ssize_t b = x.shape[0], c = x.shape[1], h = x.shape[2], wd = x.shape[3]
    cdef Py_ssize_t o = w.shape[0], k = w.shape[2]
    cdef Py_ssize_t ho = (h - k) // stride + 1
    cdef Py_ssize_t wo = (wd - k) // stride + 1
    if real is float:
        out_np = np.zeros((b, o, ho, wo), dtype=np.float32)
    else:
        out_np = np.zeros((b, o, ho, wo), dtype=np.float64)
    cdef real[:, :, :, ::1] y = out_np
    cdef Py_ssize_t bi, oi, ci, hi, wi, i, j
    cdef real acc
    with nogil:
        for bi in range(b):
            for oi in range(o):
                for hi in range(ho):
                    for wi in range(wo):
                        acc = 0
                        for ci in range(c):
                            for i in range(k):
                                for j in range(k):
                                    acc = acc + x[bi, ci, hi * stride + i, wi * stride + j] * w[oi, ci, i, j]
                        y[bi, oi, hi, wi] = acc
    return out_np


def conv2d_bwd_w(real[:, :, :, ::1] gy, real[:, :, :, ::1] x, Py_ssize_t stride, Py_ssize_t k):
    cdef Py_ssize_t b = gy.shape[0], o = gy.shape[1], ho = gy.shape[2], wo = gy.shape[3]
    cdef Py_ssize_t c = x.shape[1]
    if real is float:
        out_np = np.zeros((o, c, k, k), dtype=np.float32)
    else:
        out_np = np.zeros((o, c, k, k), dtype=np.float64)
    cdef real[:, :, :, ::1] gw = out_np
    cdef Py_ssize_t bi, oi, ci, hi, wi, i, j
    cdef real g
    with nogil:
        for bi in range(b):
            for oi in range(o):
                for hi in range(ho):
                    for wi in range(wo):
                        g = gy[bi, oi, hi, wi]
                        for ci in range(c):
                            for i in range(k):
                                for j in range(k):
                                    gw[oi, ci, i, j] = gw[oi, ci, i, j] + g * x[bi, ci, hi * stride + i, wi * stride + j]
    return out_np


def conv2d_bwd_x(real[:, :, :, ::1] gy, real[:, :, :, ::1] w, Py_ssize_t stride,
                 Py_ssize_t h, Py_ssize_t width):
    cdef Py_ssize_t b = gy.shape[0], o = gy.shape[1], ho = gy.shape[2], wo = gy.shape[3]
    cdef Py_ssize_t c = w.shape[1], k = w.shape[2]
    if real is float:
        out_np = np.zeros((b, c, h, width), dtype=np.float32)
    else:
        out_np = np.zeros((b, c, h, width), dtype=np.float64)
    cdef real[:, :, :, ::1] gx = out_np
    cdef Py_ssize_t bi, oi, ci, hi, wi, i, j
    cdef real g
    with nogil:
        for bi in range(b):
            for oi in range(o):
                for hi in range(ho):
                    for wi in range(wo):
                        g = gy[bi, oi, hi, wi]
                        for ci in range(c):
                            for i in range(k):
                                for j in range(k):
                                    gx[bi, ci, hi * stride + i, wi * stride + j] = (
                                        gx[bi, ci, hi * stride + i, wi * stride + j] + g * w[oi, ci, i, j]
                                    )
    return out_np


def col2im_add(real[:, :, :, :, :, ::1] t, Py_ssize_t stride, real[:, :, :, ::1] gx):
    """Scatter-add window gradients t (b,ho,wo,c,k,k) into gx (b,c,h,w)."""
    cdef Py_ssize_t b = t.shape[0], ho = t.shape[1], wo = t.shape[2]
    cdef Py_ssize_t c = t.shape[3], k = t.shape[4]
    cdef Py_ssize_t bi, hi, wi, ci, i, j, r0, c0
    with nogil:
        for bi in range(b):
            for hi in range(ho):
                for wi in range(wo):
                    r0 = hi * stride
                    c0 = wi * stride
                    for ci in range(c):
                        for i in range(k):
                            for j in range(k):
                                gx[bi, ci, r0 + i, c0 + j] = gx[bi, ci, r0 + i, c0 + j] + t[bi, hi, wi, ci, i, j]
    return None


cdef inline void _fill_pad(real[:, ::1] u, real[:, ::1] p, Py_ssize_t n,
                           int bc, double bcv, double dx) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef real g = <real> (bcv * dx)
    for i in range(n):
        for j in range(n):
            p[i + 1, j + 1] = u[i, j]
    if bc == 0:
        for j in range(n):
            p[0, j + 1] = u[n - 1, j]
            p[n + 1, j + 1] = u[0, j]
        for i in range(n):
            p[i + 1, 0] = u[i, n - 1]
            p[i + 1, n + 1] = u[i, 0]
        p[0, 0] = u[n - 1, n - 1]
        p[0, n + 1] = u[n - 1, 0]
        p[n + 1, 0] = u[0, n - 1]
        p[n + 1, n + 1] = u[0, 0]
    else:
        if bc == 2:
            g = 0
        for j in range(n):
            p[0, j + 1] = u[0, j] + g
            p[n + 1, j + 1] = u[n - 1, j] + g
        for i in range(n):
            p[i + 1, 0] = u[i, 0] + g
            p[i + 1, n + 1] = u[i, n - 1] + g
        p[0, 0] = u[0, 0] + g
        p[0, n + 1] = u[0, n - 1] + g
        p[n + 1, 0] = u[n - 1, 0] + g
        p[n + 1, n + 1] = u[n - 1, n - 1] + g


cdef inline void _rhs(real[:, ::1] p, real[:, ::1] out, Py_ssize_t n,
                      double beta, double ax, double ay, double inv_dx) noexcept nogil:
    cdef Py_ssize_t i, j
    cdef double uc, lap, sx, sy, d
    cdef double inv_dx2 = inv_dx * inv_dx
    for i in range(n):
        for j in range(n):
            uc = p[i + 1, j + 1]
            lap = (p[i + 1, j + 2] + p[i + 1, j] + p[i + 2, j + 1] + p[i, j + 1] - 4.0 * uc) * inv_dx2
            d = beta * lap
            sx = ax * uc
            if sx > 0.0:
                d -= sx * (uc - p[i + 1, j]) * inv_dx
            else:
                d -= sx * (p[i + 1, j + 2] - uc) * inv_dx
            sy = ay * uc
            if sy > 0.0:
                d -= sy * (uc - p[i, j + 1]) * inv_dx
            else:
                d -= sy * (p[i + 2, j + 1] - uc) * inv_dx
            out[i, j] = <real> d


cdef inline void _clamp_edges(real[:, ::1] u, Py_ssize_t n, double value) noexcept nogil:
    cdef Py_ssize_t i
    for i in range(n):
        u[0, i] = <real> value
        u[n - 1, i] = <real> value
        u[i, 0] = <real> value
        u[i, n - 1] = <real> value


def advance_diffuse_advect(real[:, ::1] u0, double beta, double ax, double ay,
                           int bc, double bc_value, double dx, double dt, Py_ssize_t nsteps):
    """Heun advance of u_t = beta*lap(u) - (ax*u*u_x + ay*u*u_y); see pykernels."""
    cdef Py_ssize_t n = u0.shape[0]
    if real is float:
        dtype = np.float32
    else:
        dtype = np.float64
    u_np = np.array(u0, copy=True)
    pad_np = np.zeros((n + 2, n + 2), dtype=dtype)
    k1_np = np.zeros((n, n), dtype=dtype)
    k2_np = np.zeros((n, n), dtype=dtype)
    mid_np = np.zeros((n, n), dtype=dtype)
    cdef real[:, ::1] u = u_np
    cdef real[:, ::1] pad = pad_np
    cdef real[:, ::1] k1 = k1_np
    cdef real[:, ::1] k2 = k2_np
    cdef real[:, ::1] mid = mid_np
    cdef Py_ssize_t step, i, j
    cdef double inv_dx = 1.0 / dx
    with nogil:
        for step in range(nsteps):
            _fill_pad(u, pad, n, bc, bc_value, dx)
            _rhs(pad, k1, n, beta, ax, ay, inv_dx)
            for i in range(n):
                for j in range(n):
                    mid[i, j] = u[i, j] + <real> dt * k1[i, j]
            if bc == 2:
                _clamp_edges(mid, n, bc_value)
            _fill_pad(mid, pad, n, bc, bc_value, dx)
            _rhs(pad, k2, n, beta, ax, ay, inv_dx)
            for i in range(n):
                for j in range(n):
                    u[i, j] = u[i, j] + <real> (0.5 * dt) * (k1[i, j] + k2[i, j])
            if bc == 2:
                _clamp_edges(u, n, bc_value)
    return u_np
