"""Pure-numpy implementations of the hot kernels.

Same signatures and the same math as the compiled extension in
``_ckernels.pyx``; this module is the fallback when the extension is not
built (or when ``PDETEXT_KERNELS=python`` forces it).

Convolutions are "valid" cross-correlations. ``conv2d_bwd_x`` doubles as the
forward pass of the transposed convolution, which is what makes the
conv / conv-transpose pair exactly adjoint.
"""

import numpy as np


def _window_view(x, k, stride):
    b, c, h, w = x.shape
    ho = (h - k) // stride + 1
    wo = (w - k) // stride + 1
    sb, sc, sh, sw = x.strides
    cols = np.lib.stride_tricks.as_strided(
        x, (b, ho, wo, c, k, k), (sb, sh * stride, sw * stride, sc, sh, sw)
    )
    return cols.reshape(b * ho * wo, c * k * k), ho, wo


def conv2d_fwd(x, w, stride):
    """x: (b,c,h,w), w: (o,c,k,k) -> (b,o,h',w')."""
    x = np.ascontiguousarray(x)
    o, _, k, _ = w.shape
    cols, ho, wo = _window_view(x, k, stride)
    y = cols @ w.reshape(o, -1).T
    return np.ascontiguousarray(y.reshape(x.shape[0], ho, wo, o).transpose(0, 3, 1, 2))


def conv2d_bwd_w(gy, x, stride, k):
    """Gradient of conv2d_fwd wrt the kernel. gy: (b,o,h',w'), x: (b,c,h,w)."""
    x = np.ascontiguousarray(x)
    b, o, ho, wo = gy.shape
    c = x.shape[1]
    cols, _, _ = _window_view(x, k, stride)
    g = gy.transpose(0, 2, 3, 1).reshape(b * ho * wo, o)
    return np.ascontiguousarray((g.T @ cols).reshape(o, c, k, k))


def conv2d_bwd_x(gy, w, stride, h, width):
    """Adjoint of conv2d_fwd wrt the input; also the transposed-conv forward.

    gy: (b,o,h',w'), w: (o,c,k,k) -> (b,c,h,width) scattered with stride.
    """
    b, o, ho, wo = gy.shape
    _, c, k, _ = w.shape
    t = np.tensordot(gy, w, axes=([1], [0]))  # (b, ho, wo, c, k, k)
    gx = np.zeros((b, c, h, width), dtype=gy.dtype)
    he = (ho - 1) * stride + 1
    we = (wo - 1) * stride + 1
    for i in range(k):
        for j in range(k):
            gx[:, :, i : i + he : stride, j : j + we : stride] += t[..., i, j].transpose(
                0, 3, 1, 2
            )
    return gx


def _pad_bc(u, bc, bc_value, dx):
    # bc: 0 periodic, 1 neumann, 2 dirichlet (ghosts are zero-gradient dummies
    # for dirichlet, where edge cells are clamped instead).
    if bc == 0:
        return np.pad(u, 1, mode="wrap")
    p = np.pad(u, 1, mode="edge")
    if bc == 1:
        g = bc_value * dx
        p[0, :] += g
        p[-1, :] += g
        p[:, 0] += g
        p[:, -1] += g
    return p


def _rhs(u, beta, ax, ay, bc, bc_value, dx):
    p = _pad_bc(u, bc, bc_value, dx)
    inv_dx = 1.0 / dx
    lap = (
        p[1:-1, 2:] + p[1:-1, :-2] + p[2:, 1:-1] + p[:-2, 1:-1] - 4.0 * u
    ) * (inv_dx * inv_dx)
    out = beta * lap
    # u . grad(u) with first-order upwinding; x runs along axis 1.
    sx = ax * u
    dxm = (u - p[1:-1, :-2]) * inv_dx
    dxp = (p[1:-1, 2:] - u) * inv_dx
    out -= sx * np.where(sx > 0.0, dxm, dxp)
    sy = ay * u
    dym = (u - p[:-2, 1:-1]) * inv_dx
    dyp = (p[2:, 1:-1] - u) * inv_dx
    out -= sy * np.where(sy > 0.0, dym, dyp)
    return out


def advance_diffuse_advect(u, beta, ax, ay, bc, bc_value, dx, dt, nsteps):
    """Heun (two-stage RK2) advance of u_t = beta*lap(u) - (ax*u*u_x + ay*u*u_y).

    Dirichlet edge cells are re-clamped after every stage so they stay exactly
    at ``bc_value``.
    """
    u = np.array(u, copy=True)
    for _ in range(nsteps):
        k1 = _rhs(u, beta, ax, ay, bc, bc_value, dx)
        mid = u + dt * k1
        if bc == 2:
            _clamp_edges(mid, bc_value)
        k2 = _rhs(mid, beta, ax, ay, bc, bc_value, dx)
        u += 0.5 * dt * (k1 + k2)
        if bc == 2:
            _clamp_edges(u, bc_value)
    return u


def _clamp_edges(u, value):
    u[0, :] = value
    u[-1, :] = value
    u[:, 0] = value
    u[:, -1] = value
