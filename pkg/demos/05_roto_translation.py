"""The same scheme on the roto-translation group SE(2).

Points are (x, y, theta): a position in the plane plus an orientation.
Admissible motions combine driving along the heading (cos theta, sin theta)
with turning; sideways translation only arises through their commutator,
which is exactly the Heisenberg structure in the small -- the exponential
chart below exhibits the nilpotent product as its leading behaviour.
"""

import numpy as np

import hmcflow as hf

BETA = 1.2


def main():
    x0 = np.array([0.2, -0.5, 0.7])
    a = np.array([0.3, 0.4, 0.1])
    y = hf.se2_exp(x0, a)
    print("exponential chart at x0 =", np.round(x0, 3))
    print("  exp(a)      =", np.round(y, 6))
    print("  log(exp(a)) =", np.round(hf.se2_log(x0, y), 6), " (round trip)")

    print()
    print("composing two small moves approaches the Heisenberg product:")
    a0, b0 = np.array([0.7, -0.4, 0.5]), np.array([0.2, 0.8, -0.3])
    for s in (0.4, 0.1, 0.025):
        aa = np.array([s * a0[0], s * a0[1], s ** 2 * a0[2]])
        bb = np.array([s * b0[0], s * b0[1], s ** 2 * b0[2]])
        c = hf.se2_log(x0, hf.se2_exp(hf.se2_exp(x0, aa), bb))
        nil = np.array([aa[0] + bb[0], aa[1] + bb[1],
                        aa[2] + bb[2] + 0.5 * (aa[0] * bb[1] - aa[1] * bb[0])])
        print(f"  scale {s:5.3f}: deviation from nilpotent law "
              f"{np.abs(c - nil).max():.2e}")

    print()
    print("shrinking a disk of orientation-independent phase field:")
    n, nth = 49, 24
    grid = hf.UniformGrid3(
        origin=(-1.6, -1.6, 0.0),
        spacing=(3.2 / (n - 1), 3.2 / (n - 1), 2 * np.pi / nth),
        dims=(n, n, nth), axis_policy=("clamp", "clamp", "periodic"))
    spec = hf.default_bump_kernel(2.0)
    prof = hf.compute_instanton(hf.reduce_kernels(spec).bar_J, BETA,
                                hf.Phase1DGrid(20.0, 801), spec.supp_r)
    X, Y, _ = grid.meshgrid()
    phi = np.hypot(X, Y) - 0.97
    eps = 0.25
    m0 = hf.ScalarField(grid, prof.spline()(phi / eps), prof.m_beta)
    p = hf.EvolutionParams(beta=BETA, eps=eps, dt=0.02, t_end=0.3)
    traj = hf.se2_evolve(m0, p, [p.t_end])
    t = np.asarray(traj.diagnostics["t"])
    r = np.asarray(traj.diagnostics["radius"])
    for i in range(0, len(t), 3):
        print(f"  t = {t[i]:5.2f}   r = {r[i]:.4f}")


if __name__ == "__main__":
    main()
