"""Crank-Nicolson / product-integration stepping for the tempered problem.

Stepping is done for ``v = exp(kappa t) u`` which solves

    v' + A v + sum_j (omega_{alpha_j} * B_j v)(t) - kappa v = g(t),   v(0) = u0,

with ``g = exp(kappa t) f``. The first step is implicit in ``V^1`` (the
memory term sees ``V^1`` on the first interval); later steps are centred at
``t_(n-1/2)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ParameterError
from .mesh import GradedMesh
from .operators import OperatorBundle, solve_shifted
from .quadrature import KernelSpec, pi_weight_row

SOURCE_RULES = ("midpoint", "average")
MAX_KAPPA_T = 30.0


@dataclass
class ProblemSpec:
    kernel: KernelSpec
    bundle: OperatorBundle
    mesh: GradedMesh
    g: Callable[[float], np.ndarray]
    u0: np.ndarray
    source_rule: str = "average"

    def __post_init__(self):
        self.u0 = np.atleast_1d(np.asarray(self.u0, dtype=float))
        if self.u0.shape != (self.bundle.size,):
            raise ParameterError(
                f"initial state has shape {self.u0.shape}, operators act on {self.bundle.size} entries"
            )
        if self.kernel.m != self.bundle.m:
            raise ParameterError(f"{self.kernel.m} kernels but {self.bundle.m} memory operators")
        if self.source_rule not in SOURCE_RULES:
            raise ParameterError(f"source rule must be one of {SOURCE_RULES}, got {self.source_rule!r}")
        if self.kernel.kappa * self.mesh.T > MAX_KAPPA_T:
            raise ParameterError(f"kappa*T = {self.kernel.kappa * self.mesh.T:g} exceeds {MAX_KAPPA_T:g}")


@dataclass
class SchemeState:
    """History ``V^0..V^n`` plus the piecewise-constant reconstruction.

    ``Vbar[0]`` is unused; ``Vbar[1] = V^1`` and ``Vbar[p] = (V^p + V^(p-1))/2``.
    ``energy_terms`` accumulates ``sum_s k_s |Vtilde^s|^2`` (grid norm), where
    ``Vtilde^s`` is the same reconstruction.
    """

    n: int
    _V: np.ndarray = field(repr=False)
    _Vbar: np.ndarray = field(repr=False)
    energy_terms: float = 0.0

    @classmethod
    def initial(cls, spec: ProblemSpec) -> "SchemeState":
        V = np.zeros((spec.mesh.N + 1, spec.bundle.size))
        V[0] = spec.u0
        return cls(n=0, _V=V, _Vbar=np.zeros_like(V))

    @property
    def V(self) -> np.ndarray:
        return self._V[: self.n + 1]

    @property
    def Vbar(self) -> np.ndarray:
        return self._Vbar[: self.n + 1]

    def _push(self, Vn: np.ndarray, vbar: np.ndarray, k: float, norm):
        self.n += 1
        self._V[self.n] = Vn
        self._Vbar[self.n] = vbar
        self.energy_terms += k * norm(vbar) ** 2


def source_average(spec: ProblemSpec, n: int) -> np.ndarray:
    t = spec.mesh.t
    if spec.source_rule == "midpoint":
        return np.asarray(spec.g(spec.mesh.midpoint(n)), dtype=float)
    return 0.5 * (np.asarray(spec.g(t[n - 1]), dtype=float) + np.asarray(spec.g(t[n]), dtype=float))


def step_first(spec: ProblemSpec, state: SchemeState) -> SchemeState:
    if state.n != 0:
        raise ValueError(f"step_first needs an initial state, got n={state.n}")
    k1 = spec.mesh.step(1)
    kappa = spec.kernel.kappa
    w11 = [pi_weight_row(spec.mesh, a, 1).w[0] for a in spec.kernel.alphas]
    rhs = source_average(spec, 1) + state.V[0] / k1
    V1 = solve_shifted(spec.bundle, 1.0 / k1 - kappa, 1.0, np.array(w11) * k1, rhs)
    state._push(V1, V1, k1, spec.bundle.norm)
    return state


def step_n(spec: ProblemSpec, state: SchemeState) -> SchemeState:
    n = state.n + 1
    if n < 2:
        raise ValueError("step_n advances from n >= 1; use step_first for the first step")
    mesh, bundle = spec.mesh, spec.bundle
    kn = mesh.step(n)
    kappa = spec.kernel.kappa
    Vprev = state.V[n - 1]
    hist = state.Vbar[1:n]

    cB = np.empty(bundle.m)
    rhs = source_average(spec, n) + (1.0 / kn + 0.5 * kappa) * Vprev - 0.5 * bundle.A.apply(Vprev)
    for j, (alpha, B) in enumerate(zip(spec.kernel.alphas, bundle.B)):
        w = pi_weight_row(mesh, alpha, n).w
        cB[j] = 0.5 * w[-1] * kn
        # history first, then a single application of B_j
        memory = (w[:-1] * mesh.k[: n - 1]) @ hist + cB[j] * Vprev
        rhs -= B.apply(memory)

    Vn = solve_shifted(bundle, 1.0 / kn - 0.5 * kappa, 0.5, cB, rhs)
    state._push(Vn, 0.5 * (Vn + Vprev), kn, bundle.norm)
    return state


def run(spec: ProblemSpec) -> SchemeState:
    state = step_first(spec, SchemeState.initial(spec))
    for _ in range(2, spec.mesh.N + 1):
        step_n(spec, state)
    return state


def to_physical(state: SchemeState, mesh: GradedMesh, kappa: float) -> np.ndarray:
    """``U^n = exp(-kappa t_n) V^n`` for n = 0..state.n."""
    if kappa * mesh.T > MAX_KAPPA_T:
        raise ParameterError(f"kappa*T = {kappa * mesh.T:g} exceeds {MAX_KAPPA_T:g}")
    damp = np.exp(-kappa * mesh.t[: state.n + 1])
    return state.V * damp[:, None]


def energy(state: SchemeState, mesh: GradedMesh, kappa: float, n: int, norm=None) -> float:
    """``|V^n|^2 - 2 kappa sum_{s<=n} k_s |Vtilde^s|^2``; grid norm via ``norm``."""
    if not 0 <= n <= state.n:
        raise IndexError(f"energy requested at n={n}, state holds 0..{state.n}")
    norm = norm or np.linalg.norm
    Vbar = state.Vbar
    acc = sum(mesh.step(s) * norm(Vbar[s]) ** 2 for s in range(1, n + 1))
    return norm(state.V[n]) ** 2 - 2.0 * kappa * acc


def energy_sequence(state: SchemeState, mesh: GradedMesh, kappa: float, norm=None) -> np.ndarray:
    norm = norm or np.linalg.norm
    sq = np.array([norm(v) ** 2 for v in state.V])
    tilde = np.array([mesh.step(s) * norm(state.Vbar[s]) ** 2 for s in range(1, state.n + 1)])
    return sq - 2.0 * kappa * np.concatenate(([0.0], np.cumsum(tilde)))
