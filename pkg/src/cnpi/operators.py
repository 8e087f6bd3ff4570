"""Finite-difference operators on interior grid points and shifted solves.

State vectors are flat float arrays over the interior points (row-major in
2D, first index along x_1). Boundary values are pinned to zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import solve_banded

from .errors import NotSPDError, ParameterError, SolverError


@dataclass(frozen=True)
class SpatialGrid:
    dim: int
    M: int
    L: float = 1.0

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ParameterError(f"grid dimension must be 1 or 2, got {self.dim!r}")
        if int(self.M) != self.M or self.M < 2:
            raise ParameterError(f"need M >= 2 partitions, got {self.M!r}")
        if not self.L > 0:
            raise ParameterError(f"domain edge must be > 0, got {self.L!r}")

    @property
    def h(self) -> float:
        return self.L / self.M

    @property
    def n_side(self) -> int:
        return self.M - 1

    @property
    def shape(self) -> tuple:
        return (self.n_side,) * self.dim

    @property
    def interior_count(self) -> int:
        return self.n_side**self.dim

    def nodes(self) -> np.ndarray:
        """Interior node coordinates along one axis."""
        return self.h * np.arange(1, self.M)

    def points(self) -> tuple:
        """Coordinate arrays, one per dimension, each flattened to interior_count."""
        x = self.nodes()
        if self.dim == 1:
            return (x,)
        x1, x2 = np.meshgrid(x, x, indexing="ij")
        return (x1.ravel(), x2.ravel())

    def norm(self, x) -> float:
        """Discrete L2 norm ``sqrt(h^dim sum x_i^2)``."""
        x = np.asarray(x)
        return math.sqrt(self.h**self.dim * float(np.dot(x.ravel(), x.ravel())))


def fd_eigenvalue(h: float, L: float, i: int = 1) -> float:
    """``i``-th eigenvalue of the 1D Dirichlet second-difference operator ``-D_h``."""
    return 4.0 / h**2 * math.sin(i * math.pi * h / (2.0 * L)) ** 2


class SecondDifference:
    """``-sum_{a in axes} d^2/dx_a^2`` by central differences, homogeneous Dirichlet."""

    def __init__(self, grid: SpatialGrid, axes=(0,)):
        axes = tuple(axes)
        if not axes or any(a not in range(grid.dim) for a in axes):
            raise ParameterError(f"invalid axes {axes} for a {grid.dim}-d grid")
        self.grid = grid
        self.axes = axes
        self.size = grid.interior_count

    def __repr__(self):
        return f"SecondDifference(dim={self.grid.dim}, M={self.grid.M}, axes={self.axes})"

    def apply(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.size,):
            raise ValueError(f"expected a vector of length {self.size}, got shape {x.shape}")
        u = x.reshape(self.grid.shape)
        out = np.zeros_like(u)
        for ax in self.axes:
            out += 2.0 * u
            lo = [slice(None)] * u.ndim
            hi = [slice(None)] * u.ndim
            lo[ax], hi[ax] = slice(1, None), slice(None, -1)
            out[tuple(lo)] -= u[tuple(hi)]
            out[tuple(hi)] -= u[tuple(lo)]
        return out.ravel() / self.grid.h**2

    def eig_bounds(self) -> tuple:
        g = self.grid
        n = len(self.axes)
        return n * fd_eigenvalue(g.h, g.L, 1), n * fd_eigenvalue(g.h, g.L, g.M - 1)

    def tridiagonal(self):
        """``(diag, off)`` for 1D operators, ``None`` otherwise."""
        if self.grid.dim != 1:
            return None
        n, h2 = self.size, self.grid.h**2
        return np.full(n, 2.0 / h2), np.full(n - 1, -1.0 / h2)


class ScalarMultiplier:
    """Multiplication by a constant on a one-entry state (hand-checkable recurrences)."""

    size = 1

    def __init__(self, value: float):
        self.value = float(value)

    def __repr__(self):
        return f"ScalarMultiplier({self.value!r})"

    def apply(self, x):
        x = np.asarray(x, dtype=float)
        if x.shape != (1,):
            raise ValueError(f"expected a vector of length 1, got shape {x.shape}")
        return self.value * x

    def eig_bounds(self) -> tuple:
        return self.value, self.value

    def tridiagonal(self):
        return np.array([self.value]), np.zeros(0)


@dataclass(frozen=True)
class OperatorBundle:
    A: object
    B: tuple
    descriptor: str
    grid: SpatialGrid | None = None

    @property
    def m(self) -> int:
        return len(self.B)

    @property
    def size(self) -> int:
        return self.A.size

    def norm(self, x) -> float:
        if self.grid is None:
            return float(np.linalg.norm(x))
        return self.grid.norm(x)


def example1_bundle(grid: SpatialGrid, m: int = 2) -> OperatorBundle:
    """1D: ``A = B_1 = ... = B_m = -d^2/dx^2``."""
    if grid.dim != 1:
        raise ParameterError("example 1 lives on a 1-d grid")
    op = SecondDifference(grid, (0,))
    return OperatorBundle(A=op, B=(op,) * m, descriptor="Example1_1D", grid=grid)


def example2_bundle(grid: SpatialGrid) -> OperatorBundle:
    """2D: ``A = -Laplacian``, ``B_1 = -d^2/dx_1^2``, ``B_2 = -d^2/dx_2^2``."""
    if grid.dim != 2:
        raise ParameterError("example 2 lives on a 2-d grid")
    return OperatorBundle(
        A=SecondDifference(grid, (0, 1)),
        B=(SecondDifference(grid, (0,)), SecondDifference(grid, (1,))),
        descriptor="Example2_2D",
        grid=grid,
    )


def scalar_bundle(a: float, b) -> OperatorBundle:
    b = tuple(float(v) for v in np.atleast_1d(b))
    return OperatorBundle(
        A=ScalarMultiplier(a),
        B=tuple(ScalarMultiplier(v) for v in b),
        descriptor=f"Scalar(a={float(a)!r}, b={list(b)!r})",
    )


def apply(op, x):
    return op.apply(x)


class CompositeOperator:
    """``c0 I + cA A + sum_j cB[j] B_j`` applied matrix-free."""

    def __init__(self, bundle: OperatorBundle, c0: float, cA: float, cB):
        cB = np.atleast_1d(np.asarray(cB, dtype=float))
        if cB.shape != (bundle.m,):
            raise ValueError(f"need {bundle.m} B-coefficients, got {cB.shape[0]}")
        self.bundle = bundle
        self.c0, self.cA, self.cB = float(c0), float(cA), cB
        self.size = bundle.size

    def terms(self):
        yield self.cA, self.bundle.A
        yield from zip(self.cB, self.bundle.B)

    def apply(self, x):
        x = np.asarray(x, dtype=float)
        out = self.c0 * x
        for c, op in self.terms():
            if c != 0.0:
                out = out + c * op.apply(x)
        return out

    def lower_bound(self) -> float:
        """Lower bound on the spectrum from the per-operator eigenvalue bounds."""
        lb = self.c0
        for c, op in self.terms():
            lo, hi = op.eig_bounds()
            lb += c * (lo if c >= 0 else hi)
        return lb

    def tridiagonal(self):
        diag = np.full(self.size, self.c0)
        off = np.zeros(self.size - 1)
        for c, op in self.terms():
            if c == 0.0:
                continue
            tri = op.tridiagonal()
            if tri is None:
                return None
            diag += c * tri[0]
            off += c * tri[1]
        return diag, off


def conjugate_gradient(apply_op, b, rtol=1e-12, maxiter=None, x0=None):
    """Plain CG for a symmetric positive definite matrix-free operator."""
    b = np.asarray(b, dtype=float)
    if maxiter is None:
        maxiter = 10 * b.size
    x = np.zeros_like(b) if x0 is None else np.array(x0, dtype=float)
    r = b - apply_op(x) if x0 is not None else b.copy()
    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return np.zeros_like(b), 0
    p = r.copy()
    rr = r @ r
    for it in range(1, maxiter + 1):
        Ap = apply_op(p)
        step = rr / (p @ Ap)
        x += step * p
        r -= step * Ap
        rr_new = r @ r
        if math.sqrt(rr_new) <= rtol * bnorm:
            return x, it
        p = r + (rr_new / rr) * p
        rr = rr_new
    raise SolverError(f"CG did not reach rtol={rtol:g} within {maxiter} iterations")


def solve_shifted(bundle: OperatorBundle, c0: float, cA: float, cB, rhs, rtol: float = 1e-12):
    """Solve ``(c0 I + cA A + sum_j cB[j] B_j) x = rhs``.

    1D and scalar bundles use banded elimination, 2D bundles use matrix-free CG.
    """
    comp = CompositeOperator(bundle, c0, cA, cB)
    rhs = np.asarray(rhs, dtype=float)
    if rhs.shape != (comp.size,):
        raise ValueError(f"rhs must have length {comp.size}, got shape {rhs.shape}")
    lb = comp.lower_bound()
    if not lb > 0:
        raise NotSPDError(
            f"composite c0={c0:g}, cA={cA:g}, cB={list(comp.cB)} is not positive definite "
            f"(spectral lower bound {lb:g})"
        )
    tri = comp.tridiagonal()
    if tri is not None:
        diag, off = tri
        if comp.size == 1:
            return rhs / diag
        ab = np.zeros((3, comp.size))
        ab[0, 1:] = off
        ab[1] = diag
        ab[2, :-1] = off
        return solve_banded((1, 1), ab, rhs)
    x, _ = conjugate_gradient(comp.apply, rhs, rtol=rtol)
    return x
