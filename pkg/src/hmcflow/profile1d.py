"""One-dimensional phase machinery.

Equilibria of m = tanh(beta (m + a)), the standing transition profile
("instanton") solving  m = tanh(beta J1 * m)  on the line for an even
unit-mass kernel J1, the linearisation around it, the weighted inner product
<f, g> = int f g / (1 - m^2) dr, and the mobility coefficient that multiplies
the horizontal mean curvature in the limiting interface law.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .kernels import KernelSpec, reduce_kernels

__all__ = [
    "NoTripleRoot",
    "NonConvergence",
    "WeightBlowup",
    "SolvabilityViolated",
    "Phase1DGrid",
    "InstantonProfile",
    "Mobility",
    "equilibria",
    "triple_root_threshold",
    "kernel_taps",
    "compute_instanton",
    "apply_linearized",
    "l2mu_inner",
    "solve_corrector",
    "compute_theta",
]


class NoTripleRoot(ValueError):
    """Forcing too large for three equilibria; carries the single root."""

    def __init__(self, msg, root):
        super().__init__(msg)
        self.root = root


class NonConvergence(RuntimeError):
    pass


class WeightBlowup(FloatingPointError):
    pass


class SolvabilityViolated(ValueError):
    pass


@dataclass(frozen=True)
class Phase1DGrid:
    """Uniform grid on [-r_max, r_max] with n points (symmetric about 0)."""

    r_max: float
    n: int

    def __post_init__(self):
        if self.r_max <= 0 or self.n < 3 or self.n % 2 == 0:
            raise ValueError("need r_max > 0 and odd n >= 3 (a node at 0)")

    @property
    def h(self) -> float:
        return 2.0 * self.r_max / (self.n - 1)

    @property
    def r(self) -> np.ndarray:
        return np.linspace(-self.r_max, self.r_max, self.n)


@dataclass
class InstantonProfile:
    grid: Phase1DGrid
    values: np.ndarray
    beta: float
    m_beta: float
    residual: float
    iterations: int = 0

    def derivative(self) -> np.ndarray:
        """Centered-difference derivative, one-sided at the ends."""
        return np.gradient(self.values, self.grid.h)

    def spline(self) -> Callable:
        """Evaluate the profile anywhere; tails clamp to +-m_beta."""
        cs = CubicSpline(self.grid.r, self.values)
        r_max, mb = self.grid.r_max, self.m_beta

        def f(x):
            x = np.asarray(x, dtype=float)
            out = cs(np.clip(x, -r_max, r_max))
            return np.where(x > r_max, mb, np.where(x < -r_max, -mb, out))

        return f


@dataclass
class Mobility:
    theta: float
    N: float
    meta: dict = field(default_factory=dict)


# ---------------------------------------------------------------------------
# equilibria

def equilibria(beta: float, a: float = 0.0):
    """The three ordered roots of m = tanh(beta (m + a)) for beta > 1.

    Raises NoTripleRoot (carrying the single root) when |a| is beyond the
    fold where the metastable pair disappears.
    """
    if beta <= 1:
        raise ValueError("beta must exceed 1")

    def g(m):
        return np.tanh(beta * (m + a)) - m

    mc = np.arccosh(np.sqrt(beta)) / beta  # critical points at -a +- mc
    lo_c, hi_c = -a - mc, -a + mc
    eps = 1e-15
    if not (g(lo_c) < 0 < g(hi_c)):
        root = brentq(g, -1 + eps, 1 - eps, xtol=1e-14)
        raise NoTripleRoot(f"no metastable triple for beta={beta}, a={a}", root)
    m_minus = brentq(g, -1 + eps, lo_c, xtol=1e-14)
    m_zero = brentq(g, lo_c, hi_c, xtol=1e-14)
    m_plus = brentq(g, hi_c, 1 - eps, xtol=1e-14)
    return m_minus, m_zero, m_plus


def triple_root_threshold(beta: float) -> float:
    """Largest |a| for which three equilibria exist (fold point)."""
    # fold where the local extremum of tanh(beta(m+a)) - m touches zero,
    # i.e. g(-a + mc) = 0 with sech^2(beta mc) = 1/beta
    mc = np.arccosh(np.sqrt(beta)) / beta
    return float(np.tanh(beta * mc) - mc)


# ---------------------------------------------------------------------------
# instanton

def kernel_taps(bar_J: Callable, h: float, supp_r: float) -> np.ndarray:
    """Discrete convolution taps for an even 1-D kernel at spacing h.

    Trapezoidal samples renormalised to unit discrete mass, so spatially
    constant states are exact fixed points of the discrete dynamics.
    """
    k = int(np.ceil(supp_r / h))
    x = h * np.arange(-k, k + 1)
    w = np.asarray(bar_J(x), dtype=float) * h
    s = w.sum()
    if s <= 0:
        raise ValueError("kernel taps have nonpositive mass")
    return w / s


def _conv_clamped(m: np.ndarray, taps: np.ndarray, lo: float, hi: float):
    """Convolution with the field extended by constants beyond the grid."""
    k = (len(taps) - 1) // 2
    ext = np.concatenate([np.full(k, lo), m, np.full(k, hi)])
    return np.convolve(ext, taps[::-1], mode="valid")


def compute_instanton(bar_J: Callable, beta: float, grid: Phase1DGrid,
                      supp_r: float, m0: Optional[np.ndarray] = None,
                      tol: float = 1e-8, max_iter: int = 200_000,
                      omega: float = 0.5) -> InstantonProfile:
    """Damped fixed-point iteration for the standing profile.

    m <- (1-omega) m + omega tanh(beta J1*m), odd-symmetrised every sweep,
    with far-field clamping to +-m_beta; stops when the sup-residual of the
    fixed-point equation drops below tol.
    """
    _, _, m_beta = equilibria(beta, 0.0)
    taps = kernel_taps(bar_J, grid.h, supp_r)
    r = grid.r
    m = m_beta * np.tanh(r) if m0 is None else np.asarray(m0, dtype=float).copy()
    for it in range(1, max_iter + 1):
        g = np.tanh(beta * _conv_clamped(m, taps, -m_beta, m_beta))
        res = float(np.max(np.abs(g - m)))
        m = (1.0 - omega) * m + omega * g
        m = 0.5 * (m - m[::-1])
        if res < tol:
            return InstantonProfile(grid, m, beta, m_beta, res, it)
    raise NonConvergence(f"instanton iteration stalled at residual {res:.3e} "
                         f"after {max_iter} sweeps")


def instanton_residual(profile: InstantonProfile, bar_J: Callable,
                       supp_r: float) -> float:
    taps = kernel_taps(bar_J, profile.grid.h, supp_r)
    mb = profile.m_beta
    g = np.tanh(profile.beta * _conv_clamped(profile.values, taps, -mb, mb))
    return float(np.max(np.abs(g - profile.values)))


# ---------------------------------------------------------------------------
# linearised operator and inner product

def apply_linearized(f: np.ndarray, profile: InstantonProfile,
                     bar_J: Callable, supp_r: float) -> np.ndarray:
    """(L f)(r) = -f(r) + beta (1 - m^2(r)) (J1 * f)(r), zero-extended f."""
    taps = kernel_taps(bar_J, profile.grid.h, supp_r)
    conv = _conv_clamped(np.asarray(f, dtype=float), taps, 0.0, 0.0)
    return -np.asarray(f, dtype=float) + profile.beta * (
        1.0 - profile.values ** 2) * conv


def l2mu_inner(f: np.ndarray, g: np.ndarray, profile: InstantonProfile) -> float:
    """Trapezoidal value of int f g / (1 - m^2) dr."""
    w = 1.0 - profile.values ** 2
    if np.min(w) < 1e-12:
        raise WeightBlowup("weight 1/(1-m^2) blows up on the grid")
    return float(np.trapezoid(np.asarray(f) * np.asarray(g) / w,
                              dx=profile.grid.h))


def _linearized_matrix(profile: InstantonProfile, bar_J: Callable,
                       supp_r: float) -> np.ndarray:
    n = profile.grid.n
    taps = kernel_taps(bar_J, profile.grid.h, supp_r)
    k = (len(taps) - 1) // 2
    C = np.zeros((n, n))
    for off in range(-k, k + 1):
        idx = np.arange(max(0, -off), min(n, n - off))
        C[idx, idx + off] = taps[k + off]
    return -np.eye(n) + profile.beta * (1.0 - profile.values ** 2)[:, None] * C


def solve_corrector(Rhat: np.ndarray, profile: InstantonProfile,
                    bar_J: Callable, supp_r: float,
                    tol: float = 1e-6) -> np.ndarray:
    """Least-squares solution of L m1 = orthogonal part of Rhat.

    The input is first projected onto the complement of the derivative mode
    in the weighted inner product; the derivative component of the output is
    removed (gauge fixing).  Raises SolvabilityViolated when the residual of
    the projected system stays above tol relative to the data.
    """
    Rhat = np.asarray(Rhat, dtype=float)
    mp = profile.derivative()
    nsq = l2mu_inner(mp, mp, profile)
    R_perp = Rhat - (l2mu_inner(Rhat, mp, profile) / nsq) * mp
    L = _linearized_matrix(profile, bar_J, supp_r)
    m1, *_ = np.linalg.lstsq(L, R_perp, rcond=None)
    m1 = m1 - (l2mu_inner(m1, mp, profile) / nsq) * mp
    scale = max(1.0, float(np.max(np.abs(R_perp))))
    resid = float(np.max(np.abs(L @ m1 - R_perp)))
    if resid > tol * scale:
        raise SolvabilityViolated(
            f"projected system residual {resid:.3e} exceeds {tol:.1e}")
    return m1


# ---------------------------------------------------------------------------
# mobility

def compute_theta(spec: KernelSpec, profile: InstantonProfile,
                  quad_nodes: int = 201) -> Mobility:
    """Mobility from the curvature term of the convolution expansion.

    theta = beta / (2 N) * int dr dy1 dy2  m'(r) m'(r+y1) Jhat(|y|) y2^2,
    with Jhat the planar marginal of the kernel and
    N = int (m')^2 / (1 - m^2) dr.  The 1/2 comes from the second-order
    Taylor coefficient of the squared-distance term; the projection of the
    curvature forcing onto the derivative mode divides by N.
    """
    red = reduce_kernels(spec)
    bh = spec.box_h
    mp = profile.derivative()
    N = l2mu_inner(mp, mp, profile)

    y = np.linspace(-bh, bh, quad_nodes)
    hy = y[1] - y[0]
    rad = np.hypot(y[:, None], y[None, :])
    W = np.trapezoid(red.hat_J(rad) * y[None, :] ** 2, dx=hy, axis=1)

    r = profile.grid.r
    cs = CubicSpline(r, mp)

    def mp_at(x):
        x = np.asarray(x, dtype=float)
        out = cs(np.clip(x, r[0], r[-1]))
        return np.where(np.abs(x) > profile.grid.r_max, 0.0, out)

    inner = np.array([np.trapezoid(mp * mp_at(r + y1), dx=profile.grid.h)
                      for y1 in y])
    theta = profile.beta / (2.0 * N) * float(np.trapezoid(W * inner, dx=hy))
    return Mobility(theta=float(theta), N=float(N),
                    meta={"quad_nodes": quad_nodes, "beta": profile.beta})
