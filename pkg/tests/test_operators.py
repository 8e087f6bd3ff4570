import math

import numpy as np
import pytest

from cnpi.errors import NotSPDError, ParameterError
from cnpi.operators import (
    CompositeOperator,
    SpatialGrid,
    apply,
    example1_bundle,
    example2_bundle,
    scalar_bundle,
    solve_shifted,
)
from oracles import dense_bundle


def sine_eig(h):
    return 4 / h**2 * math.sin(math.pi * h / 2) ** 2


def test_grid_geometry():
    g = SpatialGrid(2, 8, 1.0)
    assert g.h * g.M == pytest.approx(1.0, rel=1e-14)
    assert g.interior_count == 49
    x1, x2 = g.points()
    assert x1.shape == (49,) and x1.min() > 0 and x1.max() < 1
    with pytest.raises(ParameterError):
        SpatialGrid(3, 8)
    with pytest.raises(ParameterError):
        SpatialGrid(1, 1)


def test_1d_eigenpair():
    g = SpatialGrid(1, 4)
    op = example1_bundle(g).A
    x = np.sin(np.pi * g.nodes())
    np.testing.assert_allclose(apply(op, x), sine_eig(g.h) * x, rtol=1e-12)
    D, _ = dense_bundle("1d", M=4)
    np.testing.assert_allclose(D @ x, sine_eig(g.h) * x, rtol=1e-12)


def test_zero_maps_to_zero():
    g = SpatialGrid(2, 6)
    b = example2_bundle(g)
    for op in (b.A, *b.B):
        np.testing.assert_array_equal(op.apply(np.zeros(g.interior_count)), 0.0)


def test_2d_directional_eigenpair():
    g = SpatialGrid(2, 8)
    x1, x2 = g.points()
    phi = np.sin(np.pi * x1) * np.sin(np.pi * x2)
    b = example2_bundle(g)
    lam = sine_eig(g.h)
    np.testing.assert_allclose(b.B[0].apply(phi), lam * phi, rtol=1e-12)
    np.testing.assert_allclose(b.B[1].apply(phi), lam * phi, rtol=1e-12)
    np.testing.assert_allclose(b.A.apply(phi), 2 * lam * phi, rtol=1e-12)
    # B_1 acts along x_1 only
    psi = np.sin(np.pi * x1) * np.sin(2 * np.pi * x2)
    np.testing.assert_allclose(b.B[0].apply(psi), lam * psi, rtol=1e-12)


def test_matches_dense_matrices():
    g = SpatialGrid(2, 5)
    b = example2_bundle(g)
    A, Bs = dense_bundle("2d", M=5)
    rng = np.random.default_rng(0)
    x = rng.normal(size=g.interior_count)
    np.testing.assert_allclose(b.A.apply(x), A @ x, rtol=1e-13)
    for op, B in zip(b.B, Bs):
        np.testing.assert_allclose(op.apply(x), B @ x, rtol=1e-13)


def test_dimension_mismatch():
    b = example1_bundle(SpatialGrid(1, 8))
    with pytest.raises(ValueError):
        b.A.apply(np.ones(8))


@pytest.mark.parametrize("bundle", [
    example1_bundle(SpatialGrid(1, 17)),
    example2_bundle(SpatialGrid(2, 9)),
])
def test_self_adjoint_and_positive(bundle):
    rng = np.random.default_rng(1)
    n = bundle.size
    for _ in range(100):
        x, y = rng.normal(size=n), rng.normal(size=n)
        for op in (bundle.A, *bundle.B):
            lhs, rhs = op.apply(x) @ y, x @ op.apply(y)
            assert abs(lhs - rhs) <= 1e-10 * np.linalg.norm(x) * np.linalg.norm(y)
        assert bundle.A.apply(x) @ x > 0


def test_scalar_solve():
    b = scalar_bundle(1.0, [0.0])
    assert solve_shifted(b, 2.0, 1.0, [0.0], np.array([3.0]))[0] == 1.0


def test_scalar_arithmetic_is_exact():
    b = scalar_bundle(0.5, [0.25, 2.0])
    comp = CompositeOperator(b, 1.5, 2.0, [4.0, 0.125])
    assert comp.apply(np.array([2.0]))[0] == (1.5 + 1.0 + 1.0 + 0.25) * 2.0


def test_solve_inverts_eigenvalue():
    g = SpatialGrid(1, 4)
    x = np.sin(np.pi * g.nodes())
    got = solve_shifted(example1_bundle(g), 0.0, 1.0, [0.0, 0.0], x)
    np.testing.assert_allclose(got, x / sine_eig(g.h), rtol=1e-13)


@pytest.mark.parametrize("dim, M", [(1, 64), (2, 8), (2, 20)])
def test_solve_residual(dim, M):
    g = SpatialGrid(dim, M)
    b = example1_bundle(g) if dim == 1 else example2_bundle(g)
    rng = np.random.default_rng(dim * 100 + M)
    for _ in range(10):
        c0 = rng.uniform(-5, 50)
        cA = rng.uniform(0.1, 2)
        cB = rng.uniform(0, 0.5, size=2)
        rhs = rng.normal(size=g.interior_count)
        x = solve_shifted(b, c0, cA, cB, rhs)
        resid = CompositeOperator(b, c0, cA, cB).apply(x) - rhs
        assert np.linalg.norm(resid) <= 1e-11 * np.linalg.norm(rhs)


def test_rejects_indefinite_composite():
    b = example1_bundle(SpatialGrid(1, 8))
    with pytest.raises(NotSPDError, match="not positive definite"):
        solve_shifted(b, -100.0, 1.0, [0.0, 0.0], np.ones(7))
    with pytest.raises(NotSPDError):
        solve_shifted(scalar_bundle(1.0, [1.0]), -3.0, 1.0, [1.0], np.ones(1))
