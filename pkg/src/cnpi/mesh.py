"""Graded time meshes ``t_n = (n k)^gamma`` and checks of the grading hypotheses."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError


@dataclass(frozen=True)
class GradedMesh:
    """Time partition ``0 = t_0 < ... < t_N = T``.

    ``k[n-1]`` holds the step ``k_n = t_n - t_{n-1}`` (0-based storage of a
    1-based quantity). ``k_base`` is the grading parameter ``T^(1/gamma)/N``.
    """

    N: int
    gamma: float
    T: float
    t: np.ndarray = field(repr=False)
    k: np.ndarray = field(repr=False)
    k_base: float

    @classmethod
    def from_points(cls, t, gamma: float = 1.0) -> "GradedMesh":
        """Wrap an arbitrary user-supplied partition."""
        t = np.array(t, dtype=float)
        if t.ndim != 1 or t.size < 2 or t[0] != 0.0:
            raise ParameterError("mesh must be a 1-d array starting at 0 with at least 2 points")
        k = np.diff(t)
        if np.any(k <= 0):
            raise ParameterError("mesh points must be strictly increasing")
        N = t.size - 1
        T = float(t[-1])
        t.setflags(write=False)
        k.setflags(write=False)
        return cls(N=N, gamma=float(gamma), T=T, t=t, k=k, k_base=T ** (1.0 / gamma) / N)

    def step(self, n: int) -> float:
        """``k_n`` for 1 <= n <= N."""
        return float(self.k[n - 1])

    def midpoint(self, n: int) -> float:
        return 0.5 * float(self.t[n] + self.t[n - 1])


def build_graded_mesh(N: int, gamma: float, T: float = 1.0) -> GradedMesh:
    if int(N) != N or N < 1:
        raise ParameterError(f"N must be a positive integer, got {N!r}")
    if not np.isfinite(gamma) or gamma < 1:
        raise ParameterError(f"grading exponent must be >= 1, got {gamma!r}")
    if not np.isfinite(T) or T <= 0:
        raise ParameterError(f"final time must be > 0, got {T!r}")
    N = int(N)
    k_base = T ** (1.0 / gamma) / N
    n = np.arange(1, N + 1, dtype=float)
    t = np.empty(N + 1)
    t[0] = 0.0
    t[1:] = np.exp(gamma * np.log(n * k_base))
    t[N] = T
    k = np.diff(t)
    t.setflags(write=False)
    k.setflags(write=False)
    return GradedMesh(N=N, gamma=float(gamma), T=float(T), t=t, k=k, k_base=k_base)


def optimal_grading(alpha: float) -> float:
    """Smallest grading exponent giving full second order, ``2/(1+alpha)``."""
    return 2.0 / (1.0 + alpha)


@dataclass(frozen=True)
class MeshHypothesisReport:
    """Tightest constants for the graded-mesh hypotheses.

    c_initial    largest c with t_1 >= c k^gamma
    C_step       smallest C with k_n <= C k min(1, t_n^(1-1/gamma))
    C_ratio      smallest C with t_n <= C t_{n-1}, n >= 2
    C_increment  smallest C with 0 <= k_{n+1}-k_n <= C k^2 min(1, t_n^(1-2/gamma)), n >= 2
    """

    c_initial: float
    C_step: float
    C_ratio: float
    C_increment: float
    satisfied: dict

    @property
    def all_satisfied(self) -> bool:
        return all(self.satisfied.values())


def validate_mesh_hypotheses(mesh: GradedMesh) -> MeshHypothesisReport:
    t, k, kb, g = mesh.t, mesh.k, mesh.k_base, mesh.gamma
    N = mesh.N

    c_initial = t[1] / kb**g

    scale = kb * np.minimum(1.0, t[1:] ** (1.0 - 1.0 / g))
    C_step = float(np.max(k / scale))

    C_ratio = float(np.max(t[2:] / t[1:-1])) if N >= 2 else 0.0

    # n runs over 2..N-1 so that k_{n+1} exists
    C_increment = 0.0
    increments_ok = True
    if N >= 3:
        dk = k[2:] - k[1:-1]
        # steps are differences of levels, so equal steps differ by a few ulps of t
        tol = 8 * np.finfo(float).eps * t[3:]
        increments_ok = bool(np.all(dk >= -tol))
        dk = np.where(np.abs(dk) <= tol, 0.0, dk)
        bound = kb**2 * np.minimum(1.0, t[2:-1] ** (1.0 - 2.0 / g))
        C_increment = float(np.max(np.maximum(dk, 0.0) / bound))

    satisfied = {
        "initial": bool(np.isfinite(c_initial) and c_initial > 0),
        "step": bool(np.isfinite(C_step)),
        "ratio": bool(np.isfinite(C_ratio)),
        "increment": increments_ok and bool(np.isfinite(C_increment)),
    }
    return MeshHypothesisReport(
        c_initial=float(c_initial),
        C_step=C_step,
        C_ratio=C_ratio,
        C_increment=C_increment,
        satisfied=satisfied,
    )
