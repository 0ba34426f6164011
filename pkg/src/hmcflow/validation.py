"""Interface extraction, exact benchmark shapes, distances, calibration
fits and text file I/O for fields and profiles."""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .geometry import ScalarField, UniformGrid3

__all__ = [
    "Extinct",
    "NoZeroSet",
    "EmptyCurve",
    "LevelCurve",
    "RegressionFit",
    "ball_extinction_time",
    "exact_ball_curve",
    "extract_zero_levelset",
    "hausdorff_distance",
    "calibrate_theta_cylinder",
    "validate_gauge_ball",
    "extract_profiles",
    "write_profile_csv",
    "read_profile_csv",
    "write_field",
    "read_field",
]


class Extinct(ValueError):
    """The exact shrinking set is empty at the requested time."""


class NoZeroSet(ValueError):
    """The field has a single sign on the requested slice."""


class EmptyCurve(ValueError):
    """Too few crossing points to form a curve."""


@dataclass(frozen=True)
class LevelCurve:
    """Planar curve as an ordered (n, 2) array of vertices."""

    points: np.ndarray
    plane: str

    def __post_init__(self):
        object.__setattr__(self, "points", np.asarray(self.points, dtype=float))
        if self.points.ndim != 2 or self.points.shape[1] != 2:
            raise ValueError("points must have shape (n, 2)")


@dataclass(frozen=True)
class RegressionFit:
    slope: float
    intercept: float
    r_squared: float
    window: tuple


# ---------------------------------------------------------------------------
# exact shrinking gauge ball

def ball_extinction_time(r0: float, theta: float) -> float:
    """Time at which the exact shrinking set with gauge radius r0 vanishes."""
    return r0 ** 2 / (np.sqrt(12.0) * theta)


def exact_ball_curve(r0: float, theta: float, t: float, plane: str,
                     n: int = 721) -> LevelCurve:
    """Boundary of the exact shrinking set at time t in the plane x2 = 0
    (coordinates (x1, x3)) or x3 = 0 (coordinates (x1, x2)).

    The set is { (rho^2)^2 + 12 theta t rho^2 + 16 x3^2 + 12 (theta t)^2
    <= r0^4 } with rho^2 = x1^2 + x2^2.
    """
    q = theta * t
    disc = r0 ** 4 - 12.0 * q ** 2
    if disc <= 0.0:
        raise Extinct(f"set empty at t = {t}")
    rho_max = np.sqrt(-6.0 * q + np.sqrt(r0 ** 4 + 24.0 * q ** 2))
    if plane == "x3=0":
        ang = np.linspace(0.0, 2.0 * np.pi, n)
        pts = np.column_stack([rho_max * np.cos(ang), rho_max * np.sin(ang)])
        return LevelCurve(pts, plane)
    if plane == "x2=0":
        x1 = rho_max * np.cos(np.linspace(0.0, np.pi, n // 2 + 1))
        rad = np.maximum(disc - 12.0 * q * x1 ** 2 - x1 ** 4, 0.0)
        x3 = 0.25 * np.sqrt(rad)
        upper = np.column_stack([x1, x3])
        lower = np.column_stack([x1[-2:0:-1], -x3[-2:0:-1]])
        return LevelCurve(np.vstack([upper, lower]), plane)
    raise ValueError(f"unknown plane {plane!r}")


# ---------------------------------------------------------------------------
# discrete zero level set

def _slice(field: ScalarField, plane: str):
    g = field.grid
    if plane == "x2=0":
        j = int(np.argmin(np.abs(g.axis(1))))
        return field.values[:, j, :], g.axis(0), g.axis(2)
    if plane == "x3=0":
        k = int(np.argmin(np.abs(g.axis(2))))
        return field.values[:, :, k], g.axis(0), g.axis(1)
    raise ValueError(f"unknown plane {plane!r}")


def extract_zero_levelset(field: ScalarField, plane: str = "x2=0") -> LevelCurve:
    """Zero crossings of the field on a coordinate plane, collected from all
    grid edges and ordered by angle about their centroid."""
    v, xa, ya = _slice(field, plane)
    if v.min() >= 0.0 or v.max() <= 0.0:
        raise NoZeroSet(f"single-signed field on plane {plane}")
    pts = []
    # crossings along the first coordinate
    s = v[:-1, :] * v[1:, :]
    ii, jj = np.nonzero(s < 0.0)
    t = v[ii, jj] / (v[ii, jj] - v[ii + 1, jj])
    pts.append(np.column_stack([xa[ii] + t * (xa[ii + 1] - xa[ii]), ya[jj]]))
    # and along the second
    s = v[:, :-1] * v[:, 1:]
    ii, jj = np.nonzero(s < 0.0)
    t = v[ii, jj] / (v[ii, jj] - v[ii, jj + 1])
    pts.append(np.column_stack([xa[ii], ya[jj] + t * (ya[jj + 1] - ya[jj])]))
    pts = np.vstack(pts)
    if len(pts) < 3:
        raise EmptyCurve("fewer than three crossing points")
    centroid = pts.mean(axis=0)
    ang = np.arctan2(pts[:, 1] - centroid[1], pts[:, 0] - centroid[0])
    return LevelCurve(pts[np.argsort(ang)], plane)


def _point_segment_dist(p: np.ndarray, a: np.ndarray, b: np.ndarray):
    """Distances from points p (n,2) to each segment [a_i, b_i] (m,2)."""
    d = b - a                                     # (m, 2)
    L2 = np.maximum((d ** 2).sum(axis=1), 1e-300)
    w = p[:, None, :] - a[None, :, :]             # (n, m, 2)
    t = np.clip((w * d[None, :, :]).sum(axis=2) / L2, 0.0, 1.0)
    proj = a[None, :, :] + t[:, :, None] * d[None, :, :]
    return np.sqrt(((p[:, None, :] - proj) ** 2).sum(axis=2)).min(axis=1)


def hausdorff_distance(a: LevelCurve, b: LevelCurve) -> float:
    """Symmetric Hausdorff distance between two polylines (vertex to
    segment, both directions; curves are treated as closed)."""
    pa = a.points
    pb = b.points
    sa = np.roll(pa, -1, axis=0)
    sb = np.roll(pb, -1, axis=0)
    d_ab = _point_segment_dist(pa, pb, sb).max()
    d_ba = _point_segment_dist(pb, pa, sa).max()
    return float(max(d_ab, d_ba))


# ---------------------------------------------------------------------------
# mobility calibration and benchmark validation

def calibrate_theta_cylinder(trajectory, eps: float,
                             min_radius_factor: float = 4.0) -> RegressionFit:
    """Fit r(t)^2 = r(0)^2 - 2 theta t on the recorded cylinder radii and
    return the fit; the mobility estimate is -slope / 2.

    Steps with radius below min_radius_factor * eps (or with no interface)
    are excluded from the fit.
    """
    t = np.asarray(trajectory.diagnostics["t"], dtype=float)
    r = np.asarray(trajectory.diagnostics["radius"], dtype=float)
    mask = np.isfinite(r) & (r >= min_radius_factor * eps)
    if mask.sum() < 3:
        raise ValueError("too few usable radii for a fit")
    tt, rr = t[mask], r[mask] ** 2
    slope, intercept = np.polyfit(tt, rr, 1)
    resid = rr - (slope * tt + intercept)
    ss_tot = ((rr - rr.mean()) ** 2).sum()
    r2 = 1.0 - (resid ** 2).sum() / ss_tot if ss_tot > 0 else 1.0
    return RegressionFit(float(slope), float(intercept), float(r2),
                         (float(tt[0]), float(tt[-1])))


def validate_gauge_ball(trajectory, r0: float, theta: float,
                        plane: str = "x2=0") -> dict:
    """Hausdorff distance between the computed zero level set and the exact
    shrinking-set boundary at every snapshot time."""
    out = {"t": [], "hausdorff": [], "x3_intercept": []}
    for t, field in zip(trajectory.times, trajectory.snapshots):
        exact = exact_ball_curve(r0, theta, t, plane)
        curve = extract_zero_levelset(field, plane)
        out["t"].append(t)
        out["hausdorff"].append(hausdorff_distance(curve, exact))
        z = curve.points[:, 1]
        out["x3_intercept"].append(float(np.abs(
            curve.points[np.argmax(np.abs(z))][1])))
    return {k: np.asarray(v) for k, v in out.items()}


def extract_profiles(field: ScalarField) -> dict:
    """1-D sections along the positive x1- and x3-axes, recentred so the
    interface crossing sits at argument zero."""
    g = field.grid
    i0 = int(np.argmin(np.abs(g.axis(0))))
    j0 = int(np.argmin(np.abs(g.axis(1))))
    k0 = int(np.argmin(np.abs(g.axis(2))))
    out = {}
    for name, (x, v) in {
        "x1": (g.axis(0)[i0:], field.values[i0:, j0, k0]),
        "x3": (g.axis(2)[k0:], field.values[i0, j0, k0:]),
    }.items():
        s = np.sign(v)
        idx = np.nonzero(s[:-1] * s[1:] < 0)[0]
        if len(idx) == 0:
            raise NoZeroSet(f"no interface along the {name}-axis")
        i = idx[-1]
        frac = v[i] / (v[i] - v[i + 1])
        x0 = x[i] + frac * (x[i + 1] - x[i])
        out[name] = (x - x0, v.copy())
    return out


# ---------------------------------------------------------------------------
# text I/O (round-trip exact via 17 significant digits)

def write_profile_csv(path, columns: dict):
    """Write named equal-length 1-D arrays as CSV with a header row."""
    names = list(columns)
    arrs = [np.asarray(columns[n], dtype=float) for n in names]
    with open(path, "w", newline="") as f:
        w = csv.writer(f)
        w.writerow(names)
        for row in zip(*arrs):
            w.writerow([f"{x:.17g}" for x in row])


def read_profile_csv(path) -> dict:
    with open(path, newline="") as f:
        rows = list(csv.reader(f))
    names = rows[0]
    data = np.array([[float(x) for x in row] for row in rows[1:]])
    return {n: data[:, i] for i, n in enumerate(names)}


def write_field(path, field: ScalarField):
    """Structured-grid text format: header (dims, origin, spacing, boundary
    policies, far-field values) then the values in C order."""
    g = field.grid
    with open(path, "w") as f:
        f.write("field 1\n")
        f.write("dims " + " ".join(str(n) for n in g.dims) + "\n")
        f.write("origin " + " ".join(f"{x:.17g}" for x in g.origin) + "\n")
        f.write("spacing " + " ".join(f"{x:.17g}" for x in g.spacing) + "\n")
        f.write("policy " + " ".join(g.axis_policy) + "\n")
        f.write("far " + " ".join(f"{x:.17g}"
                                  for x in field.far_field.ravel()) + "\n")
        f.write("data\n")
        np.savetxt(f, field.values.reshape(-1, g.dims[2]), fmt="%.17g")


def read_field(path) -> ScalarField:
    with open(path) as f:
        if f.readline().split() != ["field", "1"]:
            raise ValueError("not a field file")
        head = {}
        for _ in range(5):
            parts = f.readline().split()
            head[parts[0]] = parts[1:]
        if f.readline().strip() != "data":
            raise ValueError("missing data section")
        dims = tuple(int(x) for x in head["dims"])
        values = np.loadtxt(f).reshape(dims)
    grid = UniformGrid3(
        origin=tuple(float(x) for x in head["origin"]),
        spacing=tuple(float(x) for x in head["spacing"]),
        dims=dims,
        axis_policy=tuple(head["policy"]))
    far = np.array([float(x) for x in head["far"]]).reshape(3, 2)
    return ScalarField(grid, values, far)
