"""Numba inner loops for stencil sweeps and group convolution.

Everything here has a pure-numpy counterpart in geometry/kernels that the
test suite checks against; these kernels only exist for speed.  Boundary
policies are encoded as 0 = clamp-to-far-field, 1 = replicate edge,
2 = periodic.
"""

from __future__ import annotations

import numpy as np
from numba import njit

__all__ = ["heat_substeps_grid", "group_convolve_grid", "se2_substeps_grid"]


@njit(cache=True)
def _fill_ghosts(p, far, pol):
    n1, n2, n3 = p.shape[0] - 2, p.shape[1] - 2, p.shape[2] - 2
    # axis 0
    for j in range(1, n2 + 1):
        for k in range(1, n3 + 1):
            if pol[0] == 0:
                p[0, j, k] = far[0, 0]
                p[n1 + 1, j, k] = far[0, 1]
            elif pol[0] == 1:
                p[0, j, k] = p[1, j, k]
                p[n1 + 1, j, k] = p[n1, j, k]
            else:
                p[0, j, k] = p[n1, j, k]
                p[n1 + 1, j, k] = p[1, j, k]
    # axis 1
    for i in range(0, n1 + 2):
        for k in range(1, n3 + 1):
            if pol[1] == 0:
                p[i, 0, k] = far[1, 0]
                p[i, n2 + 1, k] = far[1, 1]
            elif pol[1] == 1:
                p[i, 0, k] = p[i, 1, k]
                p[i, n2 + 1, k] = p[i, n2, k]
            else:
                p[i, 0, k] = p[i, n2, k]
                p[i, n2 + 1, k] = p[i, 1, k]
    # axis 2
    for i in range(0, n1 + 2):
        for j in range(0, n2 + 2):
            if pol[2] == 0:
                p[i, j, 0] = far[2, 0]
                p[i, j, n3 + 1] = far[2, 1]
            elif pol[2] == 1:
                p[i, j, 0] = p[i, j, 1]
                p[i, j, n3 + 1] = p[i, j, n3]
            else:
                p[i, j, 0] = p[i, j, n3]
                p[i, j, n3 + 1] = p[i, j, 1]


@njit(cache=True)
def heat_substeps_grid(values, origin, spacing, dt, substeps, far, pol):
    """Explicit substeps of dv/dt = Delta_H v on a uniform grid."""
    n1, n2, n3 = values.shape
    h1, h2, h3 = spacing[0], spacing[1], spacing[2]
    c1 = 1.0 / (h1 * h1)
    c2 = 1.0 / (h2 * h2)
    c3 = 1.0 / (h3 * h3)
    c13 = 1.0 / (4.0 * h1 * h3)
    c23 = 1.0 / (4.0 * h2 * h3)
    a = np.empty((n1 + 2, n2 + 2, n3 + 2))
    b = np.empty((n1 + 2, n2 + 2, n3 + 2))
    a[1:-1, 1:-1, 1:-1] = values
    for _ in range(substeps):
        _fill_ghosts(a, far, pol)
        for i in range(1, n1 + 1):
            x1 = origin[0] + (i - 1) * h1
            for j in range(1, n2 + 1):
                x2 = origin[1] + (j - 1) * h2
                q = 0.25 * (x1 * x1 + x2 * x2)
                for k in range(1, n3 + 1):
                    cc = a[i, j, k]
                    lap = (
                        c1 * (a[i + 1, j, k] - 2.0 * cc + a[i - 1, j, k])
                        + c2 * (a[i, j + 1, k] - 2.0 * cc + a[i, j - 1, k])
                        + q * c3 * (a[i, j, k + 1] - 2.0 * cc + a[i, j, k - 1])
                        + x1 * c23 * (a[i, j + 1, k + 1] - a[i, j + 1, k - 1]
                                      - a[i, j - 1, k + 1] + a[i, j - 1, k - 1])
                        - x2 * c13 * (a[i + 1, j, k + 1] - a[i + 1, j, k - 1]
                                      - a[i - 1, j, k + 1] + a[i - 1, j, k - 1])
                    )
                    b[i, j, k] = cc + dt * lap
        a, b = b, a
    return a[1:-1, 1:-1, 1:-1].copy()


@njit(cache=True, inline="always")
def _sample(values, far, pol, n1, n2, n3, i, j, k):
    """Field value at a possibly out-of-range index, resolved per policy."""
    if i < 0:
        if pol[0] == 0:
            return far[0, 0]
        i = 0 if pol[0] == 1 else i % n1
    elif i >= n1:
        if pol[0] == 0:
            return far[0, 1]
        i = n1 - 1 if pol[0] == 1 else i % n1
    if j < 0:
        if pol[1] == 0:
            return far[1, 0]
        j = 0 if pol[1] == 1 else j % n2
    elif j >= n2:
        if pol[1] == 0:
            return far[1, 1]
        j = n2 - 1 if pol[1] == 1 else j % n2
    if k < 0:
        if pol[2] == 0:
            return far[2, 0]
        k = 0 if pol[2] == 1 else k % n3
    elif k >= n3:
        if pol[2] == 0:
            return far[2, 1]
        k = n3 - 1 if pol[2] == 1 else k % n3
    return values[i, j, k]


@njit(cache=True)
def group_convolve_grid(values, ox, oy, h1, h2, h3, w1, w2,
                        table, bh, bv, far, pol):
    """Group convolution with a tabulated analytic kernel.

    table[p, q] samples the rescaled kernel at horizontal radius
    p * bh/(P-1) and |third coordinate| q * bv/(Q-1).  For offset d = y - x
    the kernel argument is y^-1 o x = (-d1, -d2, -d3 + (d1 x2 - d2 x1)/2),
    whose third coordinate depends on the column (x1, x2) only.  Discrete
    weights are renormalised to unit mass at every output point.
    """
    n1, n2, n3 = values.shape
    P, Q = table.shape
    inv_dr = (P - 1) / bh
    inv_dz = (Q - 1) / bv
    out = np.empty_like(values)
    num = np.empty(n3)
    den = np.empty(n3)
    for i in range(n1):
        x1 = ox + i * h1
        for j in range(n2):
            x2 = oy + j * h2
            for k in range(n3):
                num[k] = 0.0
                den[k] = 0.0
            for a in range(-w1, w1 + 1):
                d1 = a * h1
                for b in range(-w2, w2 + 1):
                    d2 = b * h2
                    r = np.sqrt(d1 * d1 + d2 * d2)
                    if r >= bh:
                        continue
                    rp = r * inv_dr
                    p0 = int(rp)
                    fr = rp - p0
                    twist = 0.5 * (d1 * x2 - d2 * x1)
                    clo = int(np.ceil((twist - bv) / h3))
                    chi = int(np.floor((twist + bv) / h3))
                    for c in range(clo, chi + 1):
                        zeta = twist - c * h3
                        az = abs(zeta)
                        if az >= bv:
                            continue
                        zq = az * inv_dz
                        q0 = int(zq)
                        fz = zq - q0
                        w = ((1 - fr) * (1 - fz) * table[p0, q0]
                             + fr * (1 - fz) * table[p0 + 1, q0]
                             + (1 - fr) * fz * table[p0, q0 + 1]
                             + fr * fz * table[p0 + 1, q0 + 1])
                        if w <= 0.0:
                            continue
                        for k in range(n3):
                            v = _sample(values, far, pol, n1, n2, n3,
                                        i + a, j + b, k + c)
                            num[k] += w * v
                            den[k] += w
            for k in range(n3):
                out[i, j, k] = num[k] / den[k]
    return out


@njit(cache=True)
def se2_substeps_grid(values, theta, spacing, dt, substeps, far, pol):
    """Explicit substeps of dv/dt = (Y1 Y1 + Y2 Y2) v on an R^2 x S^1 grid.

    Expanded form: cos^2 d11 + 2 sin cos d12 + sin^2 d22 + d_theta_theta,
    with theta the (periodic) third axis.
    """
    n1, n2, n3 = values.shape
    h1, h2, ht = spacing[0], spacing[1], spacing[2]
    c1 = 1.0 / (h1 * h1)
    c2 = 1.0 / (h2 * h2)
    ct = 1.0 / (ht * ht)
    c12 = 1.0 / (4.0 * h1 * h2)
    cos2 = np.cos(theta) ** 2
    sin2 = np.sin(theta) ** 2
    sc2 = 2.0 * np.sin(theta) * np.cos(theta)
    a = np.empty((n1 + 2, n2 + 2, n3 + 2))
    b = np.empty((n1 + 2, n2 + 2, n3 + 2))
    a[1:-1, 1:-1, 1:-1] = values
    for _ in range(substeps):
        _fill_ghosts(a, far, pol)
        for i in range(1, n1 + 1):
            for j in range(1, n2 + 1):
                for k in range(1, n3 + 1):
                    cc = a[i, j, k]
                    lap = (
                        cos2[k - 1] * c1 * (a[i + 1, j, k] - 2.0 * cc + a[i - 1, j, k])
                        + sin2[k - 1] * c2 * (a[i, j + 1, k] - 2.0 * cc + a[i, j - 1, k])
                        + sc2[k - 1] * c12 * (a[i + 1, j + 1, k] - a[i + 1, j - 1, k]
                                              - a[i - 1, j + 1, k] + a[i - 1, j - 1, k])
                        + ct * (a[i, j, k + 1] - 2.0 * cc + a[i, j, k - 1])
                    )
                    b[i, j, k] = cc + dt * lap
        a, b = b, a
    return a[1:-1, 1:-1, 1:-1].copy()
