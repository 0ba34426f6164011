"""Roto-translation group on R^2 x S^1: frame, exponential coordinates,
local anisotropic dilations, sub-Laplacian and the two-step evolution.

Points are (x1, x2, theta) with theta periodic; the frame is
Y1 = (cos theta, sin theta, 0), Y2 = (0, 0, 1) and the commutator
Y3 = [Y1, Y2] = (sin theta, -cos theta, 0).  The flow of the constant
combination a1 Y1 + a2 Y2 + a3 Y3 has the closed form (for w = a2, any w)

    theta(1) = theta0 + w,   psi = theta0 + w/2,   c = sin(w/2)/(w/2),
    x1(1) = x1 + c (a1 cos psi + a3 sin psi),
    x2(1) = x2 + c (a1 sin psi - a3 cos psi),

which is uniformly valid through w = 0 (the half-angle sinc removes the
branch at vanishing rotation speed).
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from .geometry import ScalarField, UniformGrid3
from .kernels import eval_kernel, rescale_kernel
from .evolution import EvolutionParams, Trajectory, _diags

__all__ = [
    "OutsideChart",
    "se2_frame",
    "se2_mul",
    "se2_exp",
    "se2_log",
    "se2_local_dilate",
    "se2_sub_laplacian",
    "se2_heat_bound",
    "se2_smooth",
    "se2_evolve",
]


class OutsideChart(ValueError):
    """Angle separation >= pi: outside the exponential chart."""


def _wrap(theta):
    return np.mod(theta, 2.0 * np.pi)


def _sinc_half(w):
    # sin(w/2)/(w/2); numpy sinc is sin(pi z)/(pi z)
    return np.sinc(np.asarray(w, dtype=float) / (2.0 * np.pi))


def se2_frame(p):
    """Frame vectors (Y1, Y2, Y3) at a point, as rows."""
    th = float(p[2])
    return (np.array([np.cos(th), np.sin(th), 0.0]),
            np.array([0.0, 0.0, 1.0]),
            np.array([np.sin(th), -np.cos(th), 0.0]))


def se2_mul(g, h):
    """Group product (rotation-translation composition)."""
    g = np.asarray(g, dtype=float)
    h = np.asarray(h, dtype=float)
    c, s = np.cos(g[..., 2]), np.sin(g[..., 2])
    out = np.empty(np.broadcast_shapes(g.shape, h.shape), dtype=float)
    out[..., 0] = g[..., 0] + c * h[..., 0] - s * h[..., 1]
    out[..., 1] = g[..., 1] + s * h[..., 0] + c * h[..., 1]
    out[..., 2] = _wrap(g[..., 2] + h[..., 2])
    return out


def se2_exp(x0, a):
    """Time-1 flow of a1 Y1 + a2 Y2 + a3 Y3 from x0."""
    x0 = np.asarray(x0, dtype=float)
    a = np.asarray(a, dtype=float)
    w = a[..., 1]
    psi = x0[..., 2] + 0.5 * w
    c = _sinc_half(w)
    out = np.empty(np.broadcast_shapes(x0.shape, a.shape), dtype=float)
    out[..., 0] = x0[..., 0] + c * (a[..., 0] * np.cos(psi) + a[..., 2] * np.sin(psi))
    out[..., 1] = x0[..., 1] + c * (a[..., 0] * np.sin(psi) - a[..., 2] * np.cos(psi))
    out[..., 2] = _wrap(x0[..., 2] + w)
    return out


def se2_log(x0, y):
    """Canonical (exponential) coordinates of y around x0; |dtheta| < pi."""
    x0 = np.asarray(x0, dtype=float)
    y = np.asarray(y, dtype=float)
    w = np.mod(y[..., 2] - x0[..., 2] + np.pi, 2.0 * np.pi) - np.pi
    if np.any(np.abs(w) >= np.pi - 1e-12):
        raise OutsideChart("angle separation at or beyond pi")
    psi = x0[..., 2] + 0.5 * w
    c = _sinc_half(w)
    dx1 = y[..., 0] - x0[..., 0]
    dx2 = y[..., 1] - x0[..., 1]
    # [dx1, dx2] = c * M(psi) [a1, a3] with the symmetric involution
    # M = [[cos, sin], [sin, -cos]]; M^{-1} = M
    a1 = (np.cos(psi) * dx1 + np.sin(psi) * dx2) / c
    a3 = (np.sin(psi) * dx1 - np.cos(psi) * dx2) / c
    out = np.empty(np.broadcast_shapes(x0.shape, y.shape), dtype=float)
    out[..., 0] = a1
    out[..., 1] = w
    out[..., 2] = a3
    return out


def se2_local_dilate(x0, lam: float, y):
    """exp o (lam a1, lam a2, lam^2 a3) o log around x0."""
    if lam < 0:
        raise ValueError("dilation parameter must be nonnegative")
    a = se2_log(x0, y)
    a[..., 0] *= lam
    a[..., 1] *= lam
    a[..., 2] *= lam * lam
    return se2_exp(x0, a)


# ---------------------------------------------------------------------------
# sub-Laplacian and smoothing on an R^2 x S^1 grid (theta = third axis)

def se2_sub_laplacian(field: ScalarField) -> ScalarField:
    """Y1(Y1 u) + Y2(Y2 u) by centered differences with periodic theta.

    Expanded form: cos^2 d11 + 2 sin cos d12 + sin^2 d22 + d_theta_theta.
    """
    g = field.grid
    if g.axis_policy[2] != "periodic":
        raise ValueError("theta axis must be periodic")
    h1, h2, ht = g.spacing
    p = field.padded(1)
    c = p[1:-1, 1:-1, 1:-1]
    d11 = (p[2:, 1:-1, 1:-1] - 2 * c + p[:-2, 1:-1, 1:-1]) / h1 ** 2
    d22 = (p[1:-1, 2:, 1:-1] - 2 * c + p[1:-1, :-2, 1:-1]) / h2 ** 2
    dtt = (p[1:-1, 1:-1, 2:] - 2 * c + p[1:-1, 1:-1, :-2]) / ht ** 2
    d12 = (p[2:, 2:, 1:-1] - p[2:, :-2, 1:-1]
           - p[:-2, 2:, 1:-1] + p[:-2, :-2, 1:-1]) / (4 * h1 * h2)
    th = g.axis(2)[None, None, :]
    cos, sin = np.cos(th), np.sin(th)
    out = cos ** 2 * d11 + 2 * sin * cos * d12 + sin ** 2 * d22 + dtt
    return ScalarField(g, out, np.zeros((3, 2)))


def se2_heat_bound(grid: UniformGrid3, safety: float = 0.9) -> float:
    h1, h2, ht = grid.spacing
    denom = 2.0 / h1 ** 2 + 2.0 / h2 ** 2 + 2.0 / ht ** 2 + 1.0 / (h1 * h2)
    return safety / denom


def _se2_semigroup(m: ScalarField, tau: float, substeps: int = 0) -> ScalarField:
    from ._fast import se2_substeps_grid
    from .kernels import _policy_codes

    bound = se2_heat_bound(m.grid)
    if substeps <= 0:
        substeps = max(1, int(np.ceil(tau / bound)))
    dt = tau / substeps
    out = se2_substeps_grid(
        m.values, m.grid.axis(2),
        np.asarray(m.grid.spacing, dtype=float), dt, substeps,
        m.far_field, _policy_codes(m.grid))
    return m.copy_with(out)


def _se2_algebra_convolve(m: ScalarField, spec, eps: float) -> ScalarField:
    """Algebra-coordinate convolution sum_a J_eps(a) m(exp_a(x)) w(a).

    Off-grid targets are read by trilinear interpolation; targets outside the
    (x1, x2) box replicate the nearest edge value (equal to the far field for
    the fields of interest).  Weights are renormalised to unit mass.
    """
    scaled = rescale_kernel(spec, eps)
    bh, bv = scaled.box_h, scaled.box_v
    g = m.grid
    h1, h2, ht = g.spacing
    n1, n2, n3 = g.dims
    # quadrature: at least ~3 nodes across each support axis, aligned to
    # roughly half the grid spacing for the horizontal slots
    def _axis(b, h):
        n = max(7, 2 * int(np.ceil(2 * b / h)) + 1)
        return np.linspace(-b, b, n)

    a1s = _axis(bh, h1)
    a2s = _axis(bh, ht)
    a3s = _axis(bv, min(h1, h2))
    th = g.axis(2)
    pad = int(np.ceil(bh / ht)) + 1
    vals = np.concatenate([m.values[:, :, -pad:], m.values,
                           m.values[:, :, :pad]], axis=2)
    i1, i2 = np.meshgrid(np.arange(n1, dtype=float),
                         np.arange(n2, dtype=float), indexing="ij")
    num = np.zeros_like(m.values)
    den = 0.0
    for a1 in a1s:
        for a2 in a2s:
            psi = th + 0.5 * a2
            c = _sinc_half(a2)
            kth = (th + a2 - g.origin[2]) / ht + pad  # fractional theta index
            for a3 in a3s:
                w = float(eval_kernel(scaled, np.array([a1, a2, a3])))
                if w <= 0.0:
                    continue
                s1 = c * (a1 * np.cos(psi) + a3 * np.sin(psi)) / h1
                s2 = c * (a1 * np.sin(psi) - a3 * np.cos(psi)) / h2
                coords = np.empty((3, n1, n2, n3))
                coords[0] = i1[:, :, None] + s1[None, None, :]
                coords[1] = i2[:, :, None] + s2[None, None, :]
                coords[2] = np.broadcast_to(kth, (n1, n2, n3))
                samp = ndimage.map_coordinates(vals, coords, order=1,
                                               mode="nearest")
                num += w * samp
                den += w
    return m.copy_with(num / den)


def se2_smooth(m: ScalarField, p: EvolutionParams) -> ScalarField:
    if p.kernel.kind == "heat":
        return _se2_semigroup(m, p.eps ** 2, p.kernel.substeps)
    return _se2_algebra_convolve(m, p.kernel, p.eps)


def se2_evolve(m0: ScalarField, p: EvolutionParams,
               snapshot_times=()) -> Trajectory:
    """Two-step scheme on R^2 x S^1 (smoothing by the sub-Laplacian
    semigroup or by algebra-coordinate convolution)."""
    if m0.grid.axis_policy[2] != "periodic":
        raise ValueError("theta axis must be periodic")
    snaps = sorted(float(t) for t in snapshot_times)
    n_steps = int(round(p.t_end / p.dt))
    snap_steps = sorted({int(round(t / p.dt)) for t in snaps})
    diag = {"t": [], "min": [], "max": [], "radius": [], "x3_intercept": []}
    times, fields = [], []
    m = m0.copy_with(m0.values.copy())
    _diags(m, 0.0, diag)
    if snap_steps and snap_steps[0] == 0:
        times.append(0.0)
        fields.append(m0.copy_with(m0.values.copy()))
    d = p.delta_scheme
    for k in range(1, n_steps + 1):
        v = se2_smooth(m, p)
        out = (1.0 - d) * m.values + d * np.tanh(p.beta * v.values + p.forcing_a)
        far = (1.0 - d) * m.far_field + d * np.tanh(
            p.beta * m.far_field + p.forcing_a)
        m = ScalarField(m.grid, out, far)
        t = k * p.dt
        _diags(m, t, diag)
        if k in snap_steps:
            times.append(t)
            fields.append(m.copy_with(m.values.copy()))
    diag = {k2: np.asarray(v2) for k2, v2 in diag.items()}
    return Trajectory(times, fields, diag)
