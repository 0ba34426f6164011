import numpy as np
import pytest

import hmcflow as hf
from hmcflow.geometry import (CharacteristicPoint, apply_X,
                              graph_horizontal_laplacian, heat_step_bound,
                              horizontal_laplacian, sample_function,
                              taylor_residual)


def random_points(rng, n=50, scale=2.0):
    return rng.uniform(-scale, scale, size=(n, 3))


class TestGroupOps:
    def test_associativity(self, rng):
        x, y, z = (random_points(rng) for _ in range(3))
        lhs = hf.group_mul(hf.group_mul(x, y), z)
        rhs = hf.group_mul(x, hf.group_mul(y, z))
        assert np.allclose(lhs, rhs, atol=1e-12)

    def test_identity_and_inverse(self, rng):
        x = random_points(rng)
        e = np.zeros(3)
        assert np.allclose(hf.group_mul(x, e), x)
        assert np.allclose(hf.group_mul(e, x), x)
        assert np.allclose(hf.group_mul(x, hf.group_inv(x)), 0.0, atol=1e-12)

    def test_noncommutative_third_component(self):
        x = np.array([1.0, 0.0, 0.0])
        y = np.array([0.0, 1.0, 0.0])
        assert hf.group_mul(x, y)[2] == pytest.approx(0.5)
        assert hf.group_mul(y, x)[2] == pytest.approx(-0.5)

    def test_dilation_is_automorphism(self, rng):
        x, y = random_points(rng), random_points(rng)
        lam = 1.7
        lhs = hf.dilate(lam, hf.group_mul(x, y))
        rhs = hf.group_mul(hf.dilate(lam, x), hf.dilate(lam, y))
        assert np.allclose(lhs, rhs, atol=1e-12)

    def test_gauge_homogeneity(self, rng):
        x = random_points(rng)
        for lam in (0.3, 1.0, 2.5):
            assert np.allclose(hf.gauge_norm(hf.dilate(lam, x)),
                               lam * hf.gauge_norm(x), rtol=1e-12)

    def test_gauge_symmetry(self, rng):
        x = random_points(rng)
        assert np.allclose(hf.gauge_norm(hf.group_inv(x)), hf.gauge_norm(x))

    def test_gauge_unit_values(self):
        assert hf.gauge_norm([1.0, 0.0, 0.0]) == pytest.approx(1.0)
        assert hf.gauge_norm([0.0, 0.0, 0.25]) == pytest.approx(1.0)


class TestGridAndField:
    def test_from_box(self):
        g = hf.UniformGrid3.from_box(lo=(-1, -1, -1), hi=(1, 1, 1),
                                     dims=(5, 5, 5))
        assert g.spacing == (0.5, 0.5, 0.5)
        assert np.allclose(g.axis(0), [-1, -0.5, 0, 0.5, 1])

    def test_bad_grid(self):
        with pytest.raises(ValueError):
            hf.UniformGrid3((0, 0, 0), (0.1, 0.1, 0.1), (2, 5, 5))
        with pytest.raises(ValueError):
            hf.UniformGrid3((0, 0, 0), (0.1, 0.1, 0.1), (5, 5, 5),
                            ("clamp", "clamp", "mirror"))

    def test_far_field_broadcast(self):
        g = hf.UniformGrid3.from_box(lo=(0, 0, 0), hi=(1, 1, 1), dims=(4, 4, 4))
        f = hf.ScalarField(g, np.zeros((4, 4, 4)), 0.5)
        assert f.far_field.shape == (3, 2)
        assert (f.far_field == 0.5).all()
        f2 = hf.ScalarField(g, np.zeros((4, 4, 4)), (-1.0, 1.0))
        assert (f2.far_field[:, 0] == -1.0).all()
        assert (f2.far_field[:, 1] == 1.0).all()

    def test_padding_policies(self):
        g = hf.UniformGrid3((0, 0, 0), (1, 1, 1), (3, 3, 3),
                            ("clamp", "edge", "periodic"))
        v = np.arange(27, dtype=float).reshape(3, 3, 3)
        f = hf.ScalarField(g, v, ((-9.0, 9.0), (0, 0), (0, 0)))
        p = f.padded(1)
        assert p.shape == (5, 5, 5)
        assert p[0, 1, 1] == -9.0 and p[-1, 1, 1] == 9.0   # clamp
        assert p[1, 0, 1] == v[0, 0, 0]                    # edge replicates
        assert p[1, 1, 0] == v[0, 0, 2]                    # periodic wraps


class TestStencils:
    def grid(self, n=21):
        return hf.UniformGrid3.from_box(lo=(-1, -1, -1), hi=(1, 1, 1),
                                        dims=(n, n, n))

    def test_frame_derivatives_exact_on_linear(self):
        g = self.grid()
        f = sample_function(g, lambda x, y, z: 2 * x - 3 * y + 4 * z)
        idx = (10, 10, 10)  # origin
        # X1 u = d1 u - (x2/2) d3 u etc.; at the origin the x3 terms drop
        assert apply_X(f, 1, idx) == pytest.approx(2.0, abs=1e-12)
        assert apply_X(f, 2, idx) == pytest.approx(-3.0, abs=1e-12)
        assert apply_X(f, 3, idx) == pytest.approx(4.0, abs=1e-12)

    def test_frame_derivatives_with_vertical_coupling(self):
        g = self.grid()
        f = sample_function(g, lambda x, y, z: z)
        idx = (15, 5, 10)  # x1 = 0.5, x2 = -0.5
        assert apply_X(f, 1, idx) == pytest.approx(0.25, abs=1e-12)
        assert apply_X(f, 2, idx) == pytest.approx(0.25, abs=1e-12)

    def test_laplacian_exact_on_horizontal_quadratic(self):
        g = self.grid()
        f = sample_function(g, lambda x, y, z: x ** 2 + y ** 2)
        L = horizontal_laplacian(f).values
        assert np.allclose(L[2:-2, 2:-2, 2:-2], 4.0, atol=1e-10)

    def test_laplacian_annihilates_vertical_coordinate(self):
        g = self.grid()
        f = sample_function(g, lambda x, y, z: z)
        L = horizontal_laplacian(f).values
        assert np.allclose(L[2:-2, 2:-2, 2:-2], 0.0, atol=1e-10)

    def test_laplacian_on_gauge_power(self):
        # u = rho^2 x3 has X1X1 u + X2X2 u = -2 x2 x1 + ... computed exactly:
        # d11 u = 2 x3, d22 u = 2 x3, d33 u = 0, d13 u = 2 x1, d23 u = 2 x2
        # => L u = 4 x3 + x1 (2 x2) - x2 (2 x1) = 4 x3
        g = self.grid(31)
        f = sample_function(g, lambda x, y, z: (x ** 2 + y ** 2) * z)
        L = horizontal_laplacian(f).values
        z = g.axis(2)[None, None, :]
        assert np.allclose(L[3:-3, 3:-3, 3:-3],
                           np.broadcast_to(4 * z, L.shape)[3:-3, 3:-3, 3:-3],
                           atol=1e-9)

    def test_index_out_of_range(self):
        g = self.grid(5)
        f = sample_function(g, lambda x, y, z: x)
        with pytest.raises(IndexError):
            apply_X(f, 1, (5, 0, 0))

    def test_heat_step_bound_positive_and_scales(self):
        g = self.grid(21)
        g2 = self.grid(41)
        assert heat_step_bound(g) > heat_step_bound(g2) > 0


class TestTaylor:
    def test_exact_on_adapted_quadratic(self, rng):
        # u = x1^2 + x1 x2 is reproduced exactly by its horizontal Taylor
        # polynomial at the origin to second order
        u = lambda p: p[..., 0] ** 2 + p[..., 0] * p[..., 1]
        grad = lambda p: (2 * p[0] + p[1], p[0])
        dz = lambda p: 0.0
        hess = lambda p: np.array([[2.0, 1.0], [1.0, 0.0]])
        x0 = np.zeros(3)
        for _ in range(5):
            x = rng.uniform(-0.1, 0.1, 3)
            assert abs(taylor_residual(u, grad, dz, hess, x0, x)) < 1e-12

    def test_empirical_order(self, rng):
        # smooth non-polynomial function: remainder should shrink at least
        # like the square of the anisotropic scale
        u = lambda p: np.sin(p[..., 0]) * np.cos(p[..., 1]) + np.sin(p[..., 2])

        def grad(p):
            x, y, z = p
            return (np.cos(x) * np.cos(y) - 0.5 * y * np.cos(z),
                    -np.sin(x) * np.sin(y) + 0.5 * x * np.cos(z))

        dz = lambda p: np.cos(p[2])

        def hess(p):
            x, y, z = p
            # symmetrised second frame derivatives of u
            a11 = -np.sin(x) * np.cos(y) - 0.25 * y ** 2 * np.sin(z)
            a22 = -np.sin(x) * np.cos(y) - 0.25 * x ** 2 * np.sin(z)
            a12 = (-np.cos(x) * np.sin(y) + 0.25 * x * y * np.sin(z))
            return np.array([[a11, a12], [a12, a22]])

        x0 = np.array([0.3, -0.2, 0.1])
        dirs = rng.standard_normal((8, 3))
        scales = np.array([0.2, 0.1, 0.05, 0.025])
        errs = []
        for s in scales:
            worst = 0.0
            for d in dirs:
                x = np.array([s * d[0], s * d[1], s ** 2 * d[2]])
                worst = max(worst, abs(taylor_residual(u, grad, dz, hess,
                                                       x0, x)))
            errs.append(worst)
        order = np.polyfit(np.log(scales), np.log(errs), 1)[0]
        assert order >= 1.8


class TestGraphCurvature:
    def test_vertical_plane_like_graph(self):
        # f(x, y) = x y / 2 makes F = x3 - xy/2 with X1 F = -y, X2 F = 0 at
        # points with x = 0; curvature is then fyy * X1F^2 / |X1F|^3 = 0
        zero = lambda x, y: 0.0
        f = lambda x, y: 0.5 * x * y
        fx = lambda x, y: 0.5 * y
        fy = lambda x, y: 0.5 * x
        k = graph_horizontal_laplacian(f, fx, fy, zero,
                                       lambda x, y: 0.5, zero, (0.0, 1.0))
        assert k == pytest.approx(0.0, abs=1e-12)

    def test_characteristic_point_raises(self):
        # the graph x3 = 0 has X1 F = -y/2, X2 F = x/2: the origin is
        # characteristic
        zero = lambda x, y: 0.0
        with pytest.raises(CharacteristicPoint):
            graph_horizontal_laplacian(zero, zero, zero, zero, zero, zero,
                                       (0.0, 0.0))

    def test_matches_formula_on_paraboloid(self):
        # x3 = (x^2 + y^2)/2: direct evaluation of the closed-form quotient
        f = lambda x, y: 0.5 * (x ** 2 + y ** 2)
        fx = lambda x, y: x
        fy = lambda x, y: y
        one = lambda x, y: 1.0
        zero = lambda x, y: 0.0
        x, y = 0.7, -0.4
        X1F = -x - 0.5 * y
        X2F = -y + 0.5 * x
        E = (-1.0) * X2F ** 2 + (-1.0) * X1F ** 2  # symmetrised cross = -fxy = 0
        expect = E / np.hypot(X1F, X2F) ** 3
        got = graph_horizontal_laplacian(f, fx, fy, one, zero, one, (x, y))
        assert got == pytest.approx(expect, rel=1e-12)
