import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from curveclass.errors import GridMismatch
from curveclass.numerics import (
    RNG_ALGORITHM_ID,
    FunctionOnGrid,
    Grid,
    RandomStream,
    SymmetricMatrix,
    inner_product,
    integrate,
    symmetric_eigen,
)


class TestGrid:
    def test_points_and_spacing(self):
        g = Grid(0.0, 1.0, 5)
        assert np.allclose(g.points, [0.0, 0.25, 0.5, 0.75, 1.0])
        assert g.spacing == 0.25
        assert g.length == 1.0

    def test_trapezoid_weights(self):
        g = Grid(0.0, 2.0, 5)
        w = g.trapezoid_weights
        assert np.allclose(w, [0.25, 0.5, 0.5, 0.5, 0.25])
        assert w.sum() == pytest.approx(g.length)

    def test_validation(self):
        with pytest.raises(ValueError):
            Grid(0.0, 1.0, 1)
        with pytest.raises(ValueError):
            Grid(1.0, 1.0, 5)

    def test_points_read_only(self):
        g = Grid(0.0, 1.0, 5)
        with pytest.raises(ValueError):
            g.points[0] = 3.0


class TestFunctionOnGrid:
    def test_shape_and_finite_validation(self):
        g = Grid(0.0, 1.0, 4)
        with pytest.raises(ValueError):
            FunctionOnGrid(g, [1.0, 2.0])
        with pytest.raises(ValueError):
            FunctionOnGrid(g, [1.0, np.nan, 2.0, 3.0])

    def test_from_callable(self):
        g = Grid(0.0, 1.0, 11)
        f = FunctionOnGrid.from_callable(g, lambda t: t**2)
        assert f.values[5] == pytest.approx(0.25)


class TestIntegrate:
    def test_exact_for_affine(self):
        # trapezoid rule is exact on piecewise-linear integrands
        g = Grid(-1.0, 3.0, 17)
        f = FunctionOnGrid.from_callable(g, lambda t: 2.0 * t + 1.0)
        assert integrate(f) == pytest.approx(12.0, abs=1e-12)

    def test_quadratic_convergence(self):
        exact = 1.0 / 3.0
        errs = []
        for n in (11, 21, 41):
            g = Grid(0.0, 1.0, n)
            f = FunctionOnGrid.from_callable(g, lambda t: t**2)
            errs.append(abs(integrate(f) - exact))
        assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)
        assert errs[1] / errs[2] == pytest.approx(4.0, rel=0.05)

    def test_inner_product_grid_mismatch(self):
        f = FunctionOnGrid.from_callable(Grid(0, 1, 5), lambda t: t)
        g = FunctionOnGrid.from_callable(Grid(0, 1, 7), lambda t: t)
        with pytest.raises(GridMismatch):
            inner_product(f, g)

    @given(st.lists(st.floats(-10, 10), min_size=4, max_size=4),
           st.lists(st.floats(-10, 10), min_size=4, max_size=4))
    def test_inner_product_symmetric(self, a, b):
        g = Grid(0.0, 1.0, 4)
        f1 = FunctionOnGrid(g, a)
        f2 = FunctionOnGrid(g, b)
        assert inner_product(f1, f2) == inner_product(f2, f1)


class TestSymmetricEigen:
    def test_known_two_by_two(self):
        m = SymmetricMatrix(np.array([[2.0, 1.0], [1.0, 2.0]]))
        lam, vec = symmetric_eigen(m)
        assert lam == pytest.approx([3.0, 1.0])
        assert np.allclose(np.abs(vec[:, 0]), [1 / math.sqrt(2)] * 2)

    def test_symmetrization_uses_lower_triangle(self):
        m = SymmetricMatrix(np.array([[1.0, 99.0], [5.0, 2.0]]))
        assert m.entries[0, 1] == m.entries[1, 0] == 5.0

    @settings(max_examples=25, deadline=None)
    @given(st.integers(2, 6), st.integers(0, 10_000))
    def test_reconstruction_and_orthonormality(self, dim, seed):
        rng = np.random.default_rng(seed)
        a = rng.normal(size=(dim, dim))
        m = SymmetricMatrix(a @ a.T)
        lam, vec = symmetric_eigen(m)
        assert np.all(np.diff(lam) <= 1e-12)
        assert np.allclose(vec.T @ vec, np.eye(dim), atol=1e-10)
        assert np.allclose(vec @ np.diag(lam) @ vec.T, m.entries, atol=1e-8)

    def test_deterministic_sign(self):
        m = SymmetricMatrix(np.diag([3.0, 1.0]))
        _, vec = symmetric_eigen(m)
        assert vec[0, 0] > 0 and vec[1, 1] > 0


class TestRandomStream:
    def test_algorithm_id(self):
        assert RandomStream(1).algorithm == RNG_ALGORITHM_ID

    def test_reproducible(self):
        a = RandomStream(42).uniform(0, 1, 100)
        b = RandomStream(42).uniform(0, 1, 100)
        assert np.array_equal(a, b)

    def test_children_differ_and_are_reproducible(self):
        root = RandomStream(42)
        c1 = root.child(0).uniform(0, 1, 10)
        c2 = root.child(1).uniform(0, 1, 10)
        c1_again = RandomStream(42).child(0).uniform(0, 1, 10)
        assert not np.array_equal(c1, c2)
        assert np.array_equal(c1, c1_again)

    def test_uniform_range(self):
        u = RandomStream(3).uniform(-2.0, 5.0, 10_000)
        assert u.min() >= -2.0 and u.max() < 5.0
        assert u.mean() == pytest.approx(1.5, abs=0.1)

    def test_normal_matches_boxmuller_rederivation(self):
        # independent re-derivation from the same raw uniform sequence
        stream = RandomStream(7)
        z = stream.normal(0.0, 1.0, 5)
        gen = np.random.Generator(np.random.PCG64(np.random.SeedSequence(7)))
        u1 = 1.0 - gen.random(5)
        u2 = gen.random(5)
        expect = np.sqrt(-2.0 * np.log(u1)) * np.cos(2.0 * math.pi * u2)
        assert np.array_equal(z, expect)

    def test_normal_moments(self):
        z = RandomStream(11).normal(2.0, 3.0, 200_000)
        assert z.mean() == pytest.approx(2.0, abs=0.03)
        assert z.std() == pytest.approx(3.0, abs=0.03)

    def test_exponential_moments(self):
        e = RandomStream(5).exponential(0.5, 200_000)
        assert np.all(e >= 0)
        assert e.mean() == pytest.approx(2.0, abs=0.03)
        assert e.var() == pytest.approx(4.0, abs=0.15)

    def test_parameter_validation(self):
        s = RandomStream(1)
        with pytest.raises(ValueError):
            s.uniform(1.0, 1.0)
        with pytest.raises(ValueError):
            s.normal(0.0, 0.0)
        with pytest.raises(ValueError):
            s.exponential(0.0)
