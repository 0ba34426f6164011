"""Interaction kernels on the Heisenberg group.

Two kinds are supported:

* "analytic": a smooth, compactly supported kernel J(x) = C g(x1^2+x2^2, |x3|),
  radially symmetric in the horizontal plane and even in x3, normalised so its
  integral over R^3 is one.  The default profile is a bump in the
  gauge-compatible variable q = (rho^2 + |x3|)/s^2.
* "heat": the heat semigroup of the horizontal Laplacian, realised as a PDE
  solve (explicit substeps), never as a kernel table.

The anisotropic rescaling is J_eps(x) = eps^-4 J(x1/eps, x2/eps, x3/eps^2);
its mass is invariant because the Jacobian of the dilation is eps^4.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np

from .geometry import ScalarField, UniformGrid3, heat_step_bound

__all__ = [
    "KernelSpec",
    "ReducedKernels",
    "default_bump_kernel",
    "heat_kernel",
    "eval_kernel",
    "rescale_kernel",
    "reduce_kernels",
    "group_convolve",
    "heat_semigroup",
    "SupportUnresolved",
    "StabilityViolation",
]


class SupportUnresolved(ValueError):
    """Rescaled kernel support covers fewer than 3 grid cells on some axis."""


class StabilityViolation(ValueError):
    """Requested explicit heat substep exceeds the stability bound."""


@dataclass(frozen=True)
class KernelSpec:
    """Either an analytic compactly supported kernel or the heat semigroup.

    For kind "analytic", `profile(rho2, ax3)` is the unnormalised shape as a
    function of x1^2+x2^2 and |x3|, zero outside the gauge ball of radius
    `supp_r`; `norm` makes the total mass one.  For kind "heat", `tau` is the
    diffusion time (set to eps^2 by the evolution scheme) and `substeps` the
    number of explicit steps (0 = choose from the stability bound).
    """

    kind: str
    profile: Optional[Callable] = None
    supp_r: float = 0.0
    norm: float = 1.0
    tau: float = 0.0
    substeps: int = 0
    box_h: float = 0.0  # half-extent of the support box, horizontal axes
    box_v: float = 0.0  # half-extent of the support box, vertical axis

    def __post_init__(self):
        if self.kind not in ("analytic", "heat"):
            raise ValueError("kind must be 'analytic' or 'heat'")
        if self.kind == "analytic" and (self.profile is None or self.supp_r <= 0):
            raise ValueError("analytic kernel needs a profile and supp_r > 0")
        if self.kind == "heat" and self.tau < 0:
            raise ValueError("heat kernel needs tau >= 0")
        if self.kind == "analytic" and self.box_h <= 0:
            # gauge ball of radius supp_r: rho <= supp_r, |x3| <= supp_r^2/4
            object.__setattr__(self, "box_h", self.supp_r)
            object.__setattr__(self, "box_v", self.supp_r ** 2 / 4.0)


@dataclass(frozen=True)
class ReducedKernels:
    """Marginals of an analytic kernel.

    hat_J(x1, x2) integrates out x3 (radially symmetric); bar_J(r) integrates
    out x2 and x3 (even in r).  Both carry mass one.
    """

    hat_J: Callable
    bar_J: Callable
    supp_r: float


def _bump(q):
    out = np.zeros_like(q)
    inside = q < 1.0
    out[inside] = np.exp(-1.0 / (1.0 - q[inside]))
    return out


def default_bump_kernel(supp_r: float = 2.0) -> KernelSpec:
    """Smooth bump C exp(-1/(1-q)), q = (rho^2+|x3|)/s^2, s = supp_r/2.

    The support set {q < 1} sits inside the gauge ball of radius 2s = supp_r.
    """
    s2 = (supp_r / 2.0) ** 2

    def profile(rho2, ax3):
        q = (np.asarray(rho2, dtype=float) + np.asarray(ax3, dtype=float)) / s2
        return _bump(q)

    s = supp_r / 2.0
    spec = KernelSpec("analytic", profile=profile, supp_r=supp_r, norm=1.0,
                      box_h=s, box_v=s * s)
    return replace(spec, norm=1.0 / _mass(spec))


def heat_kernel(tau: float, substeps: int = 0) -> KernelSpec:
    return KernelSpec("heat", tau=tau, substeps=substeps)


def _support_box(spec: KernelSpec):
    """Half-extents of the support box (horizontal, vertical)."""
    return spec.box_h, spec.box_v


def _quad_axes(spec: KernelSpec, nodes: int):
    bh, bv = _support_box(spec)
    x = np.linspace(-bh, bh, nodes)
    z = np.linspace(-bv, bv, nodes)
    return x, z


def _mass(spec: KernelSpec, nodes: int = 121) -> float:
    """Trapezoidal mass of the (possibly unnormalised) analytic kernel."""
    x, z = _quad_axes(spec, nodes)
    X1, X2, X3 = np.meshgrid(x, x, z, indexing="ij")
    vals = spec.norm * spec.profile(X1 ** 2 + X2 ** 2, np.abs(X3))
    hx, hz = x[1] - x[0], z[1] - z[0]
    return float(np.trapezoid(np.trapezoid(np.trapezoid(vals, dx=hz), dx=hx), dx=hx))


def eval_kernel(spec: KernelSpec, x) -> np.ndarray:
    """Pointwise value of an analytic kernel; zero outside its support."""
    if spec.kind != "analytic":
        raise ValueError("eval_kernel requires an analytic kernel")
    x = np.asarray(x, dtype=float)
    rho2 = x[..., 0] ** 2 + x[..., 1] ** 2
    return spec.norm * spec.profile(rho2, np.abs(x[..., 2]))


def rescale_kernel(spec: KernelSpec, eps: float) -> KernelSpec:
    """Anisotropic rescaling J_eps(x) = eps^-4 J(x1/eps, x2/eps, x3/eps^2)."""
    if eps <= 0:
        raise ValueError("eps must be positive")
    if spec.kind == "heat":
        return replace(spec, tau=spec.tau * eps * eps)
    base_profile, e = spec.profile, float(eps)

    def profile(rho2, ax3):
        return base_profile(np.asarray(rho2) / e ** 2, np.asarray(ax3) / e ** 2)

    return KernelSpec("analytic", profile=profile, supp_r=spec.supp_r * e,
                      norm=spec.norm / e ** 4,
                      box_h=spec.box_h * e, box_v=spec.box_v * e * e)


def reduce_kernels(spec: KernelSpec, nodes: int = 201) -> ReducedKernels:
    """Dimensional reductions hat_J (over x3) and bar_J (over x2, x3).

    Returned callables accept arrays; they interpolate dense trapezoidal
    quadratures of the marginals and vanish outside the support.
    """
    if spec.kind != "analytic":
        raise ValueError("reduce_kernels requires an analytic kernel")
    bh, bv = _support_box(spec)
    z = np.linspace(-bv, bv, nodes)
    hz = z[1] - z[0]
    r = np.linspace(0.0, bh, nodes)

    # hat_J as a radial table: integrate over x3 at each planar radius
    vals = spec.norm * spec.profile(r[:, None] ** 2, np.abs(z[None, :]))
    hat_table = np.trapezoid(vals, dx=hz, axis=1)

    def hat_J(x1, x2=None):
        if x2 is None:
            rad = np.abs(np.asarray(x1, dtype=float))
        else:
            rad = np.hypot(np.asarray(x1, dtype=float), np.asarray(x2, dtype=float))
        return np.interp(rad, r, hat_table, right=0.0)

    # bar_J(r) integrates hat_J over the second planar coordinate
    y = np.linspace(-bh, bh, nodes)
    hy = y[1] - y[0]
    rad = np.hypot(r[:, None], y[None, :])
    bar_table = np.trapezoid(np.interp(rad, r, hat_table, right=0.0),
                             dx=hy, axis=1)

    def bar_J(rr):
        return np.interp(np.abs(np.asarray(rr, dtype=float)), r, bar_table,
                         right=0.0)

    return ReducedKernels(hat_J=hat_J, bar_J=bar_J, supp_r=spec.supp_r)


# ---------------------------------------------------------------------------
# smoothing backends

def group_convolve(m: ScalarField, spec: KernelSpec, eps: float) -> ScalarField:
    """Group convolution (J_eps * m)(x) = sum_y J_eps(y^-1 o x) m(y) w(y).

    The sum runs over the compact support window around each point; the
    group twist enters through the third coordinate of
    y^-1 o x = (-d1, -d2, -d3 + (d1 x2 - d2 x1)/2) for the grid offset
    d = y - x.  Discrete weights are renormalised to unit mass per point,
    which keeps constants exact and the map monotone.
    """
    if spec.kind != "analytic":
        raise ValueError("group_convolve requires an analytic kernel")
    scaled = rescale_kernel(spec, eps)
    bh, bv = _support_box(scaled)
    g = m.grid
    h1, h2, h3 = g.spacing
    n_h1, n_h2, n_v = bh / h1, bh / h2, bv / h3
    if min(n_h1, n_h2, n_v) < 1.5:
        raise SupportUnresolved(
            f"kernel support ({bh:.3g} horizontal, {bv:.3g} vertical) spans "
            f"fewer than 3 cells on some axis of spacing {g.spacing}")
    from ._fast import group_convolve_grid  # deferred: numba compile cost

    w1 = int(np.ceil(n_h1))
    w2 = int(np.ceil(n_h2))
    nodes = 257
    r = np.linspace(0.0, bh, nodes)
    z = np.linspace(0.0, bv, nodes)
    table = scaled.norm * scaled.profile(r[:, None] ** 2, z[None, :])
    out = group_convolve_grid(
        m.values, g.origin[0], g.origin[1], h1, h2, h3, w1, w2,
        np.ascontiguousarray(table, dtype=float), bh, bv,
        m.far_field, _policy_codes(g))
    return m.copy_with(out)


def _policy_codes(grid: UniformGrid3) -> np.ndarray:
    codes = {"clamp": 0, "edge": 1, "periodic": 2}
    return np.array([codes[p] for p in grid.axis_policy], dtype=np.int64)


def heat_semigroup(m: ScalarField, tau: float, substeps: int = 0) -> ScalarField:
    """Solve dv/dt = Delta_H v for time tau with explicit substeps.

    substeps = 0 picks the smallest count satisfying the stability bound;
    an explicit count below that bound raises StabilityViolation.
    """
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    if tau == 0:
        return m.copy_with(m.values.copy())
    bound = heat_step_bound(m.grid)
    if substeps <= 0:
        substeps = max(1, int(np.ceil(tau / bound)))
    dt = tau / substeps
    if dt > bound * (1 + 1e-12):
        raise StabilityViolation(
            f"substep {dt:.3e} exceeds stability bound {bound:.3e}")
    from ._fast import heat_substeps_grid

    g = m.grid
    out = heat_substeps_grid(
        m.values, np.asarray(g.origin, dtype=float),
        np.asarray(g.spacing, dtype=float),
        dt, substeps, m.far_field, _policy_codes(g))
    return m.copy_with(out)
