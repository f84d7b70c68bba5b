"""Classical Jacobi polynomials, their orthonormal versions and Gauss-Jacobi rules."""

from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal

from .polycore import Polynomial

log = logging.getLogger(__name__)


class ZeroDerivative(ValueError):
    """Raised when the derivative of a degree-0 polynomial is requested."""


class NumericalError(RuntimeError):
    """A computation failed an internal accuracy or convergence check."""


class QuadratureError(NumericalError):
    pass


@dataclass(frozen=True)
class JacobiParams:
    alpha: float
    beta: float

    def __post_init__(self):
        if not (self.alpha > -1 and self.beta > -1):
            raise ValueError(f"Jacobi parameters must exceed -1, got ({self.alpha}, {self.beta})")

    def shifted(self, da: float = 1.0, db: float = 1.0) -> "JacobiParams":
        return JacobiParams(self.alpha + da, self.beta + db)


def pochhammer(a: float, k: int) -> float:
    out = 1.0
    for j in range(k):
        out *= a + j
    return out


def jacobi_poly(n: int, a: float, b: float) -> Polynomial:
    """P_n^{(a,b)} in the monomial basis from the terminating 2F1 sum.

    Valid for any real a, b, including the negative parameters that appear
    in seed functions. The result may have degree < n; see
    :func:`jacobi_degenerate`.
    """
    # P_n(x) = sum_k (a+k+1)_{n-k} (-n)_k (n+a+b+1)_k / (n! k!) ((1-x)/2)^k
    half = Polynomial([0.5, -0.5])
    out = Polynomial([0.0])
    t = Polynomial([1.0])
    nfact = math.factorial(n)
    for k in range(n + 1):
        coef = pochhammer(a + k + 1, n - k) * pochhammer(-n, k) * pochhammer(n + a + b + 1, k)
        coef /= nfact * math.factorial(k)
        out = out + t * coef
        t = t * half
    return out


def jacobi_leading_coeff(n: int, a: float, b: float) -> float:
    return pochhammer(n + a + b + 1, n) / (2.0**n * math.factorial(n))


def jacobi_degenerate(n: int, a: float, b: float) -> bool:
    """True when P_n^{(a,b)} has degree below n (non-orthogonal regime)."""
    return abs(jacobi_leading_coeff(n, a, b)) < 1e-14 * max(1.0, abs(jacobi_poly(n, a, b)(1.0)))


def jacobi_eval(n: int, params: JacobiParams | tuple[float, float], x):
    """P_n^{(alpha,beta)}(x) by the three-term recurrence in n.

    ``params`` may be a plain ``(a, b)`` tuple to reach parameters outside
    the orthogonal range; when the recurrence hits a zero divisor there the
    explicit sum is used instead.
    """
    a, b = (params.alpha, params.beta) if isinstance(params, JacobiParams) else params
    x = np.asarray(x, dtype=np.result_type(x, float))
    if n == 0:
        return np.ones_like(x)[()] if x.ndim == 0 else np.ones_like(x)
    apb = a + b
    p_prev = np.ones_like(x)
    p = 0.5 * (a - b + (apb + 2.0) * x)
    for k in range(2, n + 1):
        a1 = 2.0 * k * (k + apb) * (2.0 * k + apb - 2.0)
        if a1 == 0.0:
            log.info("jacobi_eval: recurrence breakdown at k=%d for (%g, %g); using explicit sum", k, a, b)
            return jacobi_poly(n, a, b)(x)
        a2 = (2.0 * k + apb - 1.0) * (a * a - b * b)
        a3 = (2.0 * k + apb - 2.0) * (2.0 * k + apb - 1.0) * (2.0 * k + apb)
        a4 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * (2.0 * k + apb)
        p_prev, p = p, ((a2 + a3 * x) * p - a4 * p_prev) / a1
    return p[()] if p.ndim == 0 else p


def log_jacobi_norm(k: int, params: JacobiParams) -> float:
    a, b = params.alpha, params.beta
    if k == 0:
        return 0.5 * (
            (a + b + 1) * math.log(2.0)
            + math.lgamma(a + 1)
            + math.lgamma(b + 1)
            - math.lgamma(a + b + 2)
        )
    return 0.5 * (
        (a + b + 1) * math.log(2.0)
        + math.lgamma(k + a + 1)
        + math.lgamma(k + b + 1)
        - math.log(2 * k + a + b + 1)
        - math.lgamma(k + 1)
        - math.lgamma(k + a + b + 1)
    )


def jacobi_norm(k: int, params: JacobiParams) -> float:
    """rho_k = ||P_k^{(alpha,beta)}|| in L^2 of (1-x)^alpha (1+x)^beta."""
    return math.exp(log_jacobi_norm(k, params))


def jacobi_orthonormal_eval(n: int, params: JacobiParams, x):
    return orthonormal_table(n, params, x)[0, n]


def orthonormal_recurrence(N: int, params: JacobiParams) -> tuple[np.ndarray, np.ndarray]:
    """Coefficients of x p_n = a_{n+1} p_{n+1} + b_n p_n + a_n p_{n-1}.

    Returns ``(a, b)`` with ``a[n]`` for n = 0..N (a[0] = 0) and ``b[n]``
    for n = 0..N.
    """
    al, be = params.alpha, params.beta
    n = np.arange(N + 1, dtype=float)
    s = 2 * n + al + be
    with np.errstate(divide="ignore", invalid="ignore"):
        b = (be**2 - al**2) / (s * (s + 2))
        a2 = 4 * n * (n + al) * (n + be) * (n + al + be) / (s**2 * (s + 1) * (s - 1))
    b[0] = (be - al) / (al + be + 2)
    a2[0] = 0.0
    if N >= 1:
        a2[1] = 4 * (1 + al) * (1 + be) / ((2 + al + be) ** 2 * (3 + al + be))
    return np.sqrt(a2), b


def orthonormal_table(N: int, params: JacobiParams, x, derivs: int = 0) -> np.ndarray:
    """Values of p_k^{(j)}(x) for k = 0..N and j = 0..derivs.

    Output shape is ``(derivs + 1, N + 1) + x.shape``. The recurrence is
    differentiated term by term, so derivatives are exact up to rounding.
    """
    x = np.asarray(x)
    dtype = np.result_type(x, float)
    a, b = orthonormal_recurrence(N + 1, params)
    out = np.zeros((derivs + 1, N + 1) + x.shape, dtype=dtype)
    out[0, 0] = math.exp(-log_jacobi_norm(0, params))
    for k in range(N):
        for j in range(derivs + 1):
            v = (x - b[k]) * out[j, k]
            if j:
                v = v + j * out[j - 1, k]
            if k:
                v = v - a[k] * out[j, k - 1]
            out[j, k + 1] = v / a[k + 1]
    return out


def orthonormal_scaled(n: int, params: JacobiParams, z: complex, derivs: int = 1) -> tuple[np.ndarray, float]:
    """p_{n-1}, p_n and derivatives at a single point, with a common scale.

    Returns ``(vals, log_scale)`` where ``vals[j, i]`` times
    ``exp(log_scale)`` is the j-th derivative of p_{n-1+i}(z). Renormalizes
    on the fly, so large degrees far from [-1, 1] do not overflow.
    """
    a, b = orthonormal_recurrence(n + 1, params)
    z = complex(z)
    cur = np.zeros(derivs + 1, dtype=complex)
    prev = np.zeros(derivs + 1, dtype=complex)
    cur[0] = math.exp(-log_jacobi_norm(0, params))
    log_scale = 0.0
    for k in range(n):
        nxt = np.empty_like(cur)
        for j in range(derivs + 1):
            v = (z - b[k]) * cur[j]
            if j:
                v += j * cur[j - 1]
            if k:
                v -= a[k] * prev[j]
            nxt[j] = v / a[k + 1]
        prev, cur = cur, nxt
        big = np.max(np.abs(cur))
        if big > 1e100 or (0 < big < 1e-100):
            prev = prev / big
            cur = cur / big
            log_scale += math.log(big)
    return np.stack([prev, cur], axis=1), log_scale


def jacobi_derivative_as_jacobi(n: int, params: JacobiParams) -> tuple[float, JacobiParams]:
    """Factor f with p_n' = f * p_{n-1}^{(alpha+1, beta+1)}."""
    if n == 0:
        raise ZeroDerivative("p_0 is constant; its derivative is the zero polynomial")
    shifted = params.shifted()
    al, be = params.alpha, params.beta
    log_f = math.log((n + al + be + 1) / 2) + log_jacobi_norm(n - 1, shifted) - log_jacobi_norm(n, params)
    return math.exp(log_f), shifted


@dataclass(frozen=True)
class QuadratureRule:
    nodes: np.ndarray
    weights: np.ndarray
    params: JacobiParams

    def __len__(self) -> int:
        return len(self.nodes)

    def integrate(self, values) -> np.ndarray:
        """Sum over the last axis of ``values`` against the weights."""
        return np.asarray(values) @ self.weights


def _last_and_sumsq(n: int, params: JacobiParams, x: np.ndarray):
    """p_n(x), p_n'(x) and sum_{k<n} p_k(x)^2, streaming over k."""
    a, b = orthonormal_recurrence(n, params)
    p_prev = np.zeros_like(x)
    d_prev = np.zeros_like(x)
    p = np.full_like(x, math.exp(-log_jacobi_norm(0, params)))
    d = np.zeros_like(x)
    sumsq = np.zeros_like(x)
    for k in range(n):
        sumsq += p**2
        p_new = ((x - b[k]) * p - a[k] * p_prev) / a[k + 1]
        d_new = ((x - b[k]) * d + p - a[k] * d_prev) / a[k + 1]
        p_prev, p, d_prev, d = p, p_new, d, d_new
    return p, d, sumsq


@functools.lru_cache(maxsize=64)
def gauss_jacobi_rule(n_nodes: int, params: JacobiParams) -> QuadratureRule:
    """Golub-Welsch nodes, Newton-polished, with Christoffel-number weights."""
    if n_nodes < 1:
        raise ValueError("need at least one node")
    a, b = orthonormal_recurrence(n_nodes, params)
    if n_nodes == 1:
        x = np.array([b[0]])
    else:
        x = eigvalsh_tridiagonal(b[:n_nodes], a[1:n_nodes])
    for _ in range(2):
        p, d, _ = _last_and_sumsq(n_nodes, params, x)
        x = x - p / d
    _, _, sumsq = _last_and_sumsq(n_nodes, params, x)
    return QuadratureRule(nodes=x, weights=1.0 / sumsq, params=params)


def integrate_adaptive(
    integrand: Callable[[np.ndarray], np.ndarray],
    params: JacobiParams,
    n_start: int,
    rtol: float = 1e-12,
    max_nodes: int = 8192,
) -> tuple[np.ndarray, int]:
    """Integrate ``integrand(x)`` (last axis = nodes) against w^{(alpha,beta)}.

    Doubles the node count until two successive results agree to ``rtol``
    relative to the largest entry. Returns the result and the node count.
    """
    n = max(int(n_start), 2)
    rule = gauss_jacobi_rule(n, params)
    prev = rule.integrate(integrand(rule.nodes))
    while True:
        n *= 2
        if n > max_nodes:
            raise QuadratureError(f"adaptive quadrature did not settle below {max_nodes} nodes")
        rule = gauss_jacobi_rule(n, params)
        cur = rule.integrate(integrand(rule.nodes))
        scale = max(float(np.max(np.abs(cur))), 1e-300)
        if float(np.max(np.abs(cur - prev))) <= rtol * scale:
            return cur, n
        prev = cur
