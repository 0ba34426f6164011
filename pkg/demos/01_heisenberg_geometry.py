"""A short tour of the Heisenberg group machinery.

The group is R^3 with the non-commutative product whose third component
picks up the signed area 0.5 * (x1 y2 - x2 y1).  Left translations and the
anisotropic dilations (lam x1, lam x2, lam^2 x3) are the symmetries every
grid operator in this package respects.
"""

import numpy as np

import hmcflow as hf


def main():
    rng = np.random.default_rng(0)
    x, y = rng.uniform(-1, 1, (2, 3))

    print("two random points")
    print("  x =", np.round(x, 4))
    print("  y =", np.round(y, 4))
    print("their products differ because the group is non-commutative:")
    print("  x o y =", np.round(hf.group_mul(x, y), 4))
    print("  y o x =", np.round(hf.group_mul(y, x), 4))
    comm = hf.group_mul(hf.group_inv(hf.group_mul(y, x)), hf.group_mul(x, y))
    print("  their commutator is purely vertical:", np.round(comm, 4))

    print()
    print("the gauge norm is 1-homogeneous under the anisotropic dilations:")
    for lam in (0.5, 2.0, 3.0):
        print(f"  |delta_{lam}(x)| = {hf.gauge_norm(hf.dilate(lam, x)):.6f}"
              f"  =  {lam} * {hf.gauge_norm(x):.6f}")

    print()
    print("the horizontal Laplacian annihilates the vertical coordinate and")
    print("returns 4 on the horizontal radius squared:")
    grid = hf.UniformGrid3.from_box(lo=(-1,) * 3, hi=(1,) * 3,
                                    dims=(17, 17, 17))
    quad = hf.sample_function(grid, lambda a, b, c: a ** 2 + b ** 2)
    vert = hf.sample_function(grid, lambda a, b, c: c)
    print("  L(x1^2 + x2^2) =",
          np.round(hf.horizontal_laplacian(quad).values[8, 8, 8], 12))
    print("  L(x3)          =",
          np.round(hf.horizontal_laplacian(vert).values[8, 8, 8], 12))

    print()
    print("a paraboloid graph x3 = (x1^2 + x2^2) / 4 has a characteristic")
    print("point at the origin, where the horizontal normal degenerates:")
    f = lambda a, b: (a ** 2 + b ** 2) / 4
    fx = lambda a, b: a / 2
    fy = lambda a, b: b / 2
    half = lambda a, b: 0.5
    zero = lambda a, b: 0.0
    k = hf.graph_horizontal_laplacian(f, fx, fy, half, zero, half, (1.0, 0.0))
    print(f"  curvature at (1, 0): {k:.6f}")
    try:
        hf.graph_horizontal_laplacian(f, fx, fy, half, zero, half, (0.0, 0.0))
    except hf.CharacteristicPoint as e:
        print("  at the origin:", type(e).__name__, "-", e)


if __name__ == "__main__":
    main()
