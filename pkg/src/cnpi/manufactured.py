"""Manufactured solutions ``u(x, t) = w(t) exp(-kappa t) phi(x)`` for the two model problems.

``phi`` is a product of sines, an eigenfunction of every operator involved,
so sources follow in closed form from the eigenvalues and from the
Riemann-Liouville integral of the power terms in ``w``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ParameterError
from .operators import SpatialGrid, fd_eigenvalue
from .quadrature import KernelSpec, gamma_function


def frac_int_power(alpha: float, mu: float, t: float) -> float:
    """``int_0^t omega_alpha(t - s) s^mu ds = Gamma(mu+1)/Gamma(mu+1+alpha) t^(mu+alpha)``."""
    if not mu > -1:
        raise ParameterError(f"power must exceed -1, got mu={mu!r}")
    if t < 0:
        raise ParameterError(f"t must be >= 0, got {t!r}")
    if t == 0:
        return 0.0
    return gamma_function(mu + 1.0) / gamma_function(mu + 1.0 + alpha) * t ** (mu + alpha)


@dataclass(frozen=True)
class ManufacturedCase:
    """Separable exact solution with time amplitude ``w(t) = sum_i c_i t^(mu_i)``."""

    id: str
    kernel: KernelSpec
    dim: int
    terms: tuple  # ((c_i, mu_i), ...)
    lam_A: float
    lam_B: tuple
    L: float = 1.0

    @property
    def eigen(self) -> dict:
        return {"A": self.lam_A, "B": self.lam_B}

    def profile(self, *x):
        out = 1.0
        for xa in x:
            out = out * np.sin(np.pi * np.asarray(xa, dtype=float) / self.L)
        return out

    def amplitude(self, t: float) -> float:
        return sum(c * t**mu for c, mu in self.terms)

    def amplitude_rate(self, t: float) -> float:
        return sum(c * mu * t ** (mu - 1.0) for c, mu in self.terms if mu != 0)

    def amplitude_integral(self, alpha: float, t: float) -> float:
        return sum(c * frac_int_power(alpha, mu, t) for c, mu in self.terms)

    def source_amplitude(self, t: float, lam_A: float | None = None, lam_B=None) -> float:
        """Time factor of ``g = exp(kappa t) f``; eigenvalues default to the continuum ones."""
        lam_A = self.lam_A if lam_A is None else lam_A
        lam_B = self.lam_B if lam_B is None else lam_B
        w = self.amplitude(t)
        out = self.amplitude_rate(t) - self.kernel.kappa * w + lam_A * w
        for lam, alpha in zip(lam_B, self.kernel.alphas):
            out += lam * self.amplitude_integral(alpha, t)
        return out

    def exact_u(self, x, t):
        x = x if isinstance(x, tuple) else (x,)
        return self.amplitude(t) * math.exp(-self.kernel.kappa * t) * self.profile(*x)

    def u0(self, x):
        return self.exact_u(x, 0.0)

    def f(self, x, t):
        x = x if isinstance(x, tuple) else (x,)
        return math.exp(-self.kernel.kappa * t) * self.source_amplitude(t) * self.profile(*x)

    def g(self, x, t):
        x = x if isinstance(x, tuple) else (x,)
        return self.source_amplitude(t) * self.profile(*x)

    def discrete_eigen(self, grid: SpatialGrid) -> dict:
        """Eigenvalues of the FD operators on the sampled profile."""
        lam = fd_eigenvalue(grid.h, grid.L, 1)
        scale = lam / (math.pi / self.L) ** 2
        return {"A": self.lam_A * scale, "B": tuple(v * scale for v in self.lam_B)}


def _check(alphas, L):
    alphas = tuple(float(a) for a in alphas)
    if len(alphas) != 2:
        raise ParameterError(f"both examples use two kernels, got {len(alphas)}")
    if not L > 0:
        raise ParameterError(f"L must be > 0, got {L!r}")
    return alphas


def example1_case(alphas, kappa: float, L: float = 1.0) -> ManufacturedCase:
    """1D, ``w(t) = t^(1+a1) + t^(1+a2)``, ``u0 = 0``."""
    a1, a2 = _check(alphas, L)
    lam = (math.pi / L) ** 2
    return ManufacturedCase(
        id="Example1",
        kernel=KernelSpec((a1, a2), kappa),
        dim=1,
        terms=((1.0, 1.0 + a1), (1.0, 1.0 + a2)),
        lam_A=lam,
        lam_B=(lam, lam),
        L=L,
    )


def example2_case(alphas, kappa: float, L: float = 1.0) -> ManufacturedCase:
    """2D, ``w(t) = t^(1+alpha) + 1`` with ``alpha = min(a1, a2)``."""
    a1, a2 = _check(alphas, L)
    lam = (math.pi / L) ** 2
    return ManufacturedCase(
        id="Example2",
        kernel=KernelSpec((a1, a2), kappa),
        dim=2,
        terms=((1.0, 1.0 + min(a1, a2)), (1.0, 0.0)),
        lam_A=2.0 * lam,
        lam_B=(lam, lam),
        L=L,
    )


def make_case(example: int, alphas, kappa: float, L: float = 1.0) -> ManufacturedCase:
    if example == 1:
        return example1_case(alphas, kappa, L)
    if example == 2:
        return example2_case(alphas, kappa, L)
    raise ParameterError(f"unknown example {example!r}")
