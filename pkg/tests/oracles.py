"""Independent reference computations (scipy quadrature, dense assembly).

Nothing here calls the weight formulas or the stepper from ``cnpi``.
"""

import math

import numpy as np
import sympy as sp
from scipy import integrate
from scipy.special import gamma as sp_gamma


def pi_weight_quad(t, alpha, n, p):
    """``w_(n,p)`` from its double-integral definition.

    Inner integral in closed form, outer integral adaptive.
    """
    t = np.asarray(t, dtype=float)
    kn, kp = t[n] - t[n - 1], t[p] - t[p - 1]

    def inner(s):
        top = min(s, t[p])
        if top <= t[p - 1]:
            return 0.0
        return ((s - t[p - 1]) ** alpha - (s - top) ** alpha) / sp_gamma(alpha + 1)

    val, _ = integrate.quad(inner, t[n - 1], t[n], epsabs=0, epsrel=1e-13, limit=200)
    return val / (kn * kp)


def frac_integral_quad(t, alpha, values, n):
    """``(1/k_n) int_{t_(n-1)}^{t_n} int_0^s omega_alpha(s - r) Vbar(r) dr ds`` by nested quadrature.

    ``values[p-1]`` is the constant on ``(t_(p-1), t_p)``. The inner integral
    uses ``r = s - tau^(1/alpha)``, which removes the kernel singularity.
    """
    t = np.asarray(t, dtype=float)

    def vbar(r):
        idx = np.searchsorted(t, r, side="left")
        return values[min(max(idx, 1), len(values)) - 1]

    def inner(s):
        upper = s**alpha
        brk = sorted({(s - tp) ** alpha for tp in t[1:n] if 0 < tp < s})
        total = 0.0
        edges = [0.0] + [b for b in brk if 0 < b < upper] + [upper]
        for a, b in zip(edges[:-1], edges[1:]):
            # Vbar is constant on each piece in tau
            mid = 0.5 * (a + b)
            total += (b - a) * vbar(s - mid ** (1 / alpha))
        return total / (alpha * sp_gamma(alpha))

    val, _ = integrate.quad(inner, t[n - 1], t[n], epsabs=0, epsrel=1e-13, limit=400)
    return val / (t[n] - t[n - 1])


def laplacian_1d_dense(M, L=1.0):
    h = L / M
    n = M - 1
    return (2 * np.eye(n) - np.eye(n, k=1) - np.eye(n, k=-1)) / h**2


def dense_bundle(kind, M=None, a=None, b=None):
    """Dense (A, [B_j]) matching the library bundles, built from scratch."""
    if kind == "scalar":
        return np.array([[a]]), [np.array([[v]]) for v in b]
    D = laplacian_1d_dense(M)
    if kind == "1d":
        return D, [D, D]
    I = np.eye(M - 1)
    B1, B2 = np.kron(D, I), np.kron(I, D)
    return B1 + B2, [B1, B2]


def dense_scheme_solution(t, alphas, kappa, A, Bs, u0, gbar):
    """Solve the whole time-discrete system as one block lower-triangular matrix.

    ``gbar[n-1]`` is the source average on step n. Returns ``V^0..V^N``.
    """
    t = np.asarray(t, dtype=float)
    N = len(t) - 1
    d = A.shape[0]
    k = np.diff(t)
    I = np.eye(d)
    W = [np.array([[pi_weight_quad(t, al, n, p) if p <= n else 0.0 for p in range(1, N + 1)]
                   for n in range(1, N + 1)]) for al in alphas]

    S = np.zeros((N * d, N * d))
    rhs = np.zeros(N * d)

    def blk(n, p):  # unknown V^p (p >= 1) in equation n
        return S[(n - 1) * d:n * d, (p - 1) * d:p * d]

    # first block row: (V1 - V0)/k1 + A V1 + sum_j B_j w11 k1 V1 - kappa V1 = g
    blk(1, 1)[:] = I / k[0] + A - kappa * I + sum(Wj[0, 0] * k[0] * B for Wj, B in zip(W, Bs))
    rhs[:d] = gbar[0] + u0 / k[0]
    for n in range(2, N + 1):
        kn = k[n - 1]
        r = gbar[n - 1].astype(float).copy()
        blk(n, n)[:] += I / kn + 0.5 * A - 0.5 * kappa * I
        blk(n, n - 1)[:] += -I / kn + 0.5 * A - 0.5 * kappa * I
        for Wj, B in zip(W, Bs):
            # history: w_n1 k_1 V^1 + sum_{p=2}^n w_np k_p (V^p + V^(p-1))/2
            blk(n, 1)[:] += Wj[n - 1, 0] * k[0] * B
            for p in range(2, n + 1):
                c = 0.5 * Wj[n - 1, p - 1] * k[p - 1]
                blk(n, p)[:] += c * B
                blk(n, p - 1)[:] += c * B
        rhs[(n - 1) * d:n * d] = r
    X = np.linalg.solve(S, rhs)
    return np.vstack([u0[None, :], X.reshape(N, d)])


# --- manufactured-solution residual -----------------------------------------


def symbolic_solution(case):
    """Build u(x, t) in sympy from the amplitude terms and sine profile."""
    t = sp.Symbol("t", positive=True)
    xs = sp.symbols(f"x1:{case.dim + 1}", real=True)
    w = sum(sp.Float(c) * t ** sp.Float(mu) for c, mu in case.terms)
    phi = sp.Mul(*[sp.sin(sp.pi * x / case.L) for x in xs])
    return t, xs, w * sp.exp(-sp.Float(case.kernel.kappa) * t) * phi


def memory_term(u_fn, x, t, alpha, kappa):
    """``int_0^t e^(-kappa(t-s)) (t-s)^(alpha-1)/Gamma(alpha) u(x, s) ds`` with ``s = t - tau^(1/alpha)``."""
    def integrand(tau):
        r = tau ** (1 / alpha)
        return math.exp(-kappa * r) * u_fn(*x, t - r)
    val, _ = integrate.quad(integrand, 0, t**alpha, epsabs=0, epsrel=1e-12, limit=200)
    return val / (alpha * sp_gamma(alpha))


def residual(case, x, t, funcs):
    """``u_t + A u + sum_j B_j (beta_j * u) - f`` with every operator a negated second derivative."""
    u_t, u_xx = funcs
    kappa = case.kernel.kappa
    if case.dim == 1:
        Au = -u_xx[0](*x, t)
        B = [u_xx[0], u_xx[0]]
    else:
        Au = -u_xx[0](*x, t) - u_xx[1](*x, t)
        B = [u_xx[0], u_xx[1]]
    mem = sum(
        memory_term(lambda *args, d=d: -d(*args), x, t, a, kappa)
        for d, a in zip(B, case.kernel.alphas)
    )
    lhs = u_t(*x, t) + Au + mem
    return lhs - case.f(tuple(np.atleast_1d(xi) for xi in x), t)


def pde_residual_worst(case, rng, points=50):
    """Largest |residual| over random points in (0, L)^d x (0.01, 1)."""
    t, xs, u = symbolic_solution(case)
    args = (*xs, t)
    funcs = (
        sp.lambdify(args, sp.diff(u, t), "math"),
        [sp.lambdify(args, sp.diff(u, x, 2), "math") for x in xs],
    )
    worst = 0.0
    for _ in range(points):
        x = tuple(rng.uniform(0, case.L, size=case.dim))
        tt = float(rng.uniform(0.01, 1.0))
        worst = max(worst, abs(float(np.squeeze(residual(case, x, tt, funcs)))))
    return worst
