"""Two-step semi-implicit scheme driving the mean-field dynamics on a 3-D grid.

Each step smooths the state (heat semigroup of the horizontal Laplacian for
time eps^2, or group convolution with a rescaled analytic kernel) and then
applies the pointwise update

    m <- (1 - delta) m + delta tanh(beta v + a),  delta = (dt/eps^2) / (1 + dt/eps^2),

which is the backward-Euler treatment of the linear part of
eps^2 dm/dt = -m + tanh(beta J_eps * m + a).  The constant forcing a enters
inside the tanh; with the unit-mass kernels used here the spatially constant
equilibria are the roots of m = tanh(beta m + a).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .geometry import ScalarField, UniformGrid3
from .kernels import KernelSpec, group_convolve, heat_kernel, heat_semigroup
from .profile1d import InstantonProfile, NoTripleRoot, equilibria

__all__ = [
    "EvolutionParams",
    "Trajectory",
    "ResolutionTooCoarse",
    "BracketViolated",
    "init_levelset_field",
    "shape_policies",
    "step",
    "evolve",
    "forcing_bracket",
    "interface_radius",
    "x3_intercept",
]


class ResolutionTooCoarse(ValueError):
    """Interface width eps not resolvable on the given grid."""


class BracketViolated(AssertionError):
    """Forced trajectories failed to enclose the unforced one."""


@dataclass(frozen=True)
class EvolutionParams:
    beta: float
    eps: float
    dt: float
    t_end: float
    forcing_a: float = 0.0
    kernel: KernelSpec = field(default_factory=lambda: heat_kernel(1.0))

    def __post_init__(self):
        if self.beta <= 1 or self.eps <= 0 or self.dt <= 0:
            raise ValueError("need beta > 1, eps > 0, dt > 0")
        if self.dt / self.eps ** 2 >= 1:
            raise ValueError("scheme requires dt / eps^2 < 1")

    @property
    def delta_scheme(self) -> float:
        """Interpolation weight of the pointwise update, in (0, 1)."""
        q = self.dt / self.eps ** 2
        return q / (1.0 + q)


@dataclass
class Trajectory:
    times: list
    snapshots: list      # ScalarField per requested time
    diagnostics: dict    # per-step series: t, min, max, radius, x3_intercept

    def snapshot_at(self, t: float) -> ScalarField:
        i = int(np.argmin(np.abs(np.asarray(self.times) - t)))
        if abs(self.times[i] - t) > 1e-9 * max(1.0, abs(t)):
            raise KeyError(f"no snapshot at t={t}; have {self.times}")
        return self.snapshots[i]


# ---------------------------------------------------------------------------
# initialisers

def _level_function(shape, grid: UniformGrid3):
    X1, X2, X3 = grid.meshgrid()
    kind = shape[0]
    if kind == "gauge_ball":
        r = float(shape[1])
        rho2 = X1 ** 2 + X2 ** 2
        return (rho2 ** 2 + 16.0 * X3 ** 2) ** 0.25 - r
    if kind == "cylinder":
        rho = float(shape[1])
        return np.hypot(X1, X2) - rho
    if kind == "halfspace":
        n = np.asarray(shape[1], dtype=float)
        n = n / np.linalg.norm(n)
        return n[0] * X1 + n[1] * X2 + n[2] * X3
    raise ValueError(f"unknown shape {shape!r}")


def shape_policies(shape) -> tuple:
    """Ghost policy per axis: clamp where the far field is constant, edge
    along axes the level function does not depend on."""
    kind = shape[0]
    if kind == "gauge_ball":
        return ("clamp", "clamp", "clamp")
    if kind == "cylinder":
        return ("clamp", "clamp", "edge")
    if kind == "halfspace":
        n = np.asarray(shape[1], dtype=float)
        return tuple("clamp" if abs(c) > 1e-14 else "edge" for c in n)
    raise ValueError(f"unknown shape {shape!r}")


def init_levelset_field(shape, eps: float, profile: InstantonProfile,
                        grid: UniformGrid3) -> ScalarField:
    """m(x) = profile(phi(x)/eps) with phi the signed level function of the
    requested shape; far-field constants are read off phi at the box faces."""
    h1, h2, _ = grid.spacing
    if eps < 2.0 * max(h1, h2):
        raise ResolutionTooCoarse(
            f"eps={eps} below two horizontal cells ({max(h1, h2)})")
    phi = _level_function(shape, grid)
    m = profile.spline()(phi / eps)
    far = np.empty((3, 2))
    mid = [g // 2 for g in grid.dims]
    for ax in range(3):
        for side, idx in ((0, 0), (1, grid.dims[ax] - 1)):
            sel = list(mid)
            sel[ax] = idx
            far[ax, side] = profile.m_beta * np.sign(phi[tuple(sel)])
    return ScalarField(grid, m, far)


# ---------------------------------------------------------------------------
# stepping

def _smooth(m: ScalarField, p: EvolutionParams) -> ScalarField:
    if p.kernel.kind == "heat":
        return heat_semigroup(m, p.eps ** 2, p.kernel.substeps)
    return group_convolve(m, p.kernel, p.eps)


def step(m: ScalarField, p: EvolutionParams) -> ScalarField:
    """One scheme step; the far-field constants follow the same recursion."""
    v = _smooth(m, p)
    d = p.delta_scheme
    out = (1.0 - d) * m.values + d * np.tanh(p.beta * v.values + p.forcing_a)
    far = (1.0 - d) * m.far_field + d * np.tanh(
        p.beta * m.far_field + p.forcing_a)
    return ScalarField(m.grid, out, far)


def _diags(m: ScalarField, t: float, diag: dict):
    diag["t"].append(t)
    diag["min"].append(float(m.values.min()))
    diag["max"].append(float(m.values.max()))
    diag["radius"].append(interface_radius(m))
    diag["x3_intercept"].append(x3_intercept(m))


def evolve(m0: ScalarField, p: EvolutionParams,
           snapshot_times: Sequence[float] = ()) -> Trajectory:
    """Run the scheme to t_end, recording snapshots at the requested times.

    Snapshot times must lie on multiples of dt within [0, t_end]."""
    snaps = sorted(float(t) for t in snapshot_times)
    for t in snaps:
        if t < 0 or t > p.t_end + 1e-9 or abs(t / p.dt - round(t / p.dt)) > 1e-6:
            raise ValueError(f"snapshot time {t} is not a step multiple in range")
    n_steps = int(round(p.t_end / p.dt))
    snap_steps = sorted({int(round(t / p.dt)) for t in snaps})
    diag = {"t": [], "min": [], "max": [], "radius": [], "x3_intercept": []}
    times, fields = [], []
    m = m0.copy_with(m0.values.copy())
    _diags(m, 0.0, diag)
    if snap_steps and snap_steps[0] == 0:
        times.append(0.0)
        fields.append(m0.copy_with(m0.values.copy()))
    for k in range(1, n_steps + 1):
        m = step(m, p)
        t = k * p.dt
        _diags(m, t, diag)
        if k in snap_steps:
            times.append(t)
            fields.append(m.copy_with(m.values.copy()))
    diag = {k: np.asarray(v) for k, v in diag.items()}
    return Trajectory(times, fields, diag)


def forcing_bracket(m0: ScalarField, p: EvolutionParams, delta_force: float,
                    snapshot_times: Sequence[float] = ()):
    """Evolve with forcing -delta_force*eps and +delta_force*eps and check the
    unforced run stays pointwise between them at every snapshot."""
    a = delta_force * p.eps
    # flag runs whose forcing destroys the metastable triple
    equilibria(p.beta, a / p.beta)  # raises NoTripleRoot beyond the fold
    from dataclasses import replace
    lower = evolve(m0, replace(p, forcing_a=-a), snapshot_times)
    upper = evolve(m0, replace(p, forcing_a=+a), snapshot_times)
    middle = evolve(m0, p, snapshot_times)
    for lo, mid, up in zip(lower.snapshots, middle.snapshots, upper.snapshots):
        if (lo.values - mid.values).max() > 1e-12 or \
                (mid.values - up.values).max() > 1e-12:
            raise BracketViolated("forced runs do not enclose the unforced one")
    return lower, upper


# ---------------------------------------------------------------------------
# per-step interface diagnostics

def _zero_cross(x: np.ndarray, v: np.ndarray) -> Optional[float]:
    """Outermost sign change of v along x (scanning from the end), linearly
    interpolated; None if v has one sign."""
    s = np.sign(v)
    idx = np.nonzero(s[:-1] * s[1:] < 0)[0]
    if len(idx) == 0:
        return None
    i = idx[-1]
    t = v[i] / (v[i] - v[i + 1])
    return float(x[i] + t * (x[i + 1] - x[i]))


def interface_radius(m: ScalarField) -> Optional[float]:
    """Zero crossing along the positive x1-axis at x2 = x3 = 0."""
    g = m.grid
    j = int(np.argmin(np.abs(g.axis(1))))
    k = int(np.argmin(np.abs(g.axis(2))))
    i0 = int(np.argmin(np.abs(g.axis(0))))
    return _zero_cross(g.axis(0)[i0:], m.values[i0:, j, k])


def x3_intercept(m: ScalarField) -> Optional[float]:
    """Zero crossing along the positive x3-axis at x1 = x2 = 0."""
    g = m.grid
    i = int(np.argmin(np.abs(g.axis(0))))
    j = int(np.argmin(np.abs(g.axis(1))))
    k0 = int(np.argmin(np.abs(g.axis(2))))
    return _zero_cross(g.axis(2)[k0:], m.values[i, j, k0:])
