"""Eigenvalues of truncated operator matrices and the measures built from them."""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .darboux import ExceptionalFamily, orthonormal_exceptional_table
from .jacobi import NumericalError, gauss_jacobi_rule, integrate_adaptive
from .opmatrix import (
    BandedSymMatrix,
    ConstantMode,
    apply_poly_to_banded,
    build_Me,
    q_primitive,
    standard_recurrence,
)
from .polycore import Polynomial

log = logging.getLogger(__name__)

QL_CAP_FACTOR = 30
ORACLE_NODES = 64


# ---------------------------------------------------------------- eigensolver


def householder_tridiagonal(A: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Reduce a symmetric matrix to tridiagonal form; returns (diag, offdiag)."""
    A = np.array(A, dtype=float)
    n = A.shape[0]
    for k in range(n - 2):
        x = A[k + 1 :, k].copy()
        norm = np.linalg.norm(x)
        if norm == 0.0:
            continue
        alpha = -math.copysign(norm, x[0])
        v = x
        v[0] -= alpha
        vn = np.linalg.norm(v)
        if vn == 0.0:
            continue
        v /= vn
        S = A[k + 1 :, k + 1 :]
        p = S @ v
        q = p - (v @ p) * v
        S -= 2.0 * (np.outer(v, q) + np.outer(q, v))
        A[k + 1, k] = A[k, k + 1] = alpha
        A[k + 2 :, k] = 0.0
        A[k, k + 2 :] = 0.0
    return np.diagonal(A).copy(), np.diagonal(A, 1).copy()


def tridiagonal_ql(diag: np.ndarray, off: np.ndarray) -> np.ndarray:
    """Eigenvalues of a symmetric tridiagonal matrix by implicit QL with
    Wilkinson shifts. Raises NumericalError after 30 n sweeps in total."""
    d = np.array(diag, dtype=float)
    n = len(d)
    e = np.zeros(n)
    e[: n - 1] = off
    eps = np.finfo(float).eps
    cap = QL_CAP_FACTOR * max(n, 1)
    total = 0
    for l in range(n):
        while True:
            m = l
            while m < n - 1:
                dd = abs(d[m]) + abs(d[m + 1])
                if abs(e[m]) <= eps * dd:
                    break
                m += 1
            if m == l:
                break
            total += 1
            if total > cap:
                raise NumericalError(f"QL iteration did not converge within {cap} sweeps")
            g = (d[l + 1] - d[l]) / (2.0 * e[l])
            r = math.hypot(g, 1.0)
            g = d[m] - d[l] + e[l] / (g + math.copysign(r, g))
            s = c = 1.0
            p = 0.0
            underflow = False
            for i in range(m - 1, l - 1, -1):
                f = s * e[i]
                b = c * e[i]
                r = math.hypot(f, g)
                e[i + 1] = r
                if r == 0.0:
                    d[i + 1] -= p
                    e[m] = 0.0
                    underflow = True
                    break
                s = f / r
                c = g / r
                g = d[i + 1] - p
                r = (d[i] - g) * s + 2.0 * c * b
                p = s * r
                d[i + 1] = g + p
                g = c * r - b
            if underflow:
                continue
            d[l] -= p
            e[l] = g
            e[m] = 0.0
    return np.sort(d)


def sym_eigenvalues(mat: BandedSymMatrix, n: int | None = None) -> np.ndarray:
    """All eigenvalues of the leading n x n block, ascending."""
    n = mat.size if n is None else n
    if n > mat.size:
        raise ValueError(f"n = {n} exceeds realized size {mat.size}")
    if n == 0:
        return np.zeros(0)
    if mat.L <= 1:
        off = mat.bands[1, : n - 1] if mat.L == 1 else np.zeros(n - 1)
        return tridiagonal_ql(mat.bands[0, :n], off)
    d, e = householder_tridiagonal(mat.dense(n))
    return tridiagonal_ql(d, e)


def eigen_residuals(mat: BandedSymMatrix, n: int, values: np.ndarray, k: int = 5, seed: int = 0) -> np.ndarray:
    """||M v - lam v|| / ||M|| for k sampled eigenvalues, v from inverse iteration."""
    A = mat.dense(n)
    norm = max(np.linalg.norm(A, 2), 1e-300)
    rng = np.random.default_rng(seed)
    idx = rng.choice(len(values), size=min(k, len(values)), replace=False)
    out = []
    for i in idx:
        lam = values[i]
        shift = lam + 1e-10 * norm
        v = rng.standard_normal(n)
        lu = scipy.linalg.lu_factor(A - shift * np.eye(n))
        for _ in range(3):
            v = scipy.linalg.lu_solve(lu, v)
            v /= np.linalg.norm(v)
        out.append(np.linalg.norm(A @ v - lam * v) / norm)
    return np.array(out)


# ---------------------------------------------------------------- measures


@dataclass(frozen=True)
class EmpiricalMeasure:
    """Uniform weights 1/n on sorted support points."""

    points: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "points", np.sort(np.asarray(self.points, dtype=float)))

    @property
    def n(self) -> int:
        return len(self.points)

    def moment(self, f) -> float:
        """Integral of a callable (e.g. a Polynomial)."""
        return float(np.mean(f(self.points)))

    def moments(self, P: Polynomial, l_max: int) -> np.ndarray:
        v = P(self.points)
        return np.array([np.mean(v**l) for l in range(l_max + 1)])

    def angles(self) -> np.ndarray:
        """arccos of the points, ascending in [0, pi]."""
        if np.any(np.abs(self.points) > 1):
            raise ValueError("angles need points in [-1, 1]")
        return np.sort(np.arccos(self.points))


def interval_discrepancy(measure: EmpiricalMeasure, gamma: float, delta: float) -> float:
    """|#{eta_i in [gamma, delta]} - n (delta - gamma)/pi| / n."""
    th = measure.angles()
    count = np.sum((th >= gamma) & (th <= delta))
    return abs(count - measure.n * (delta - gamma) / np.pi) / measure.n


def sup_discrepancy(measure: EmpiricalMeasure) -> float:
    """Supremum of the interval discrepancy over all [gamma, delta] in [0, pi].

    Overcounts are maximal on closed intervals spanning data angles; undercounts
    on gaps between data angles (or the ends of [0, pi]). Both are scanned in
    linear time with running minima.
    """
    th = measure.angles()
    n = len(th)
    if n == 0:
        return 0.0
    idx = np.arange(1, n + 1)
    t = n * th / np.pi
    # over: max_{i<=j} (j - t_j) - (i - 1 - t_i)
    over = np.max(idx - t - np.minimum.accumulate(idx - 1 - t))
    # under: gaps between consecutive extended points 0, th, pi
    te = np.concatenate(([0.0], t, [float(n)]))
    ie = np.arange(n + 2)
    g = te - ie
    under = np.max(g[1:] - np.minimum.accumulate(g[:-1])) - 1.0
    return max(over, under, 0.0) / n


def erdos_turan_bound(n: int, A: float) -> float:
    """8/log 3 * sqrt(log A / n)."""
    return 8.0 / math.log(3.0) * math.sqrt(math.log(A) / n)


def legendre_monic_ratio(n: int) -> float:
    """||P_n||_inf / (monic leading factor) for Legendre: 4^n / C(2n, n)."""
    return math.exp(n * math.log(4.0) - (math.lgamma(2 * n + 1) - 2 * math.lgamma(n + 1)))


# ---------------------------------------------------------------- Q inverse and char. polynomial zeros


def q_inverse(Q: Polynomial, z) -> np.ndarray:
    """Preimages in [-1, 1] of an increasing Q; NaN where z is outside Q([-1, 1])."""
    z = np.atleast_1d(np.asarray(z, dtype=float))
    lo_v, hi_v = Q(-1.0), Q(1.0)
    inside = (z >= lo_v) & (z <= hi_v)
    lo = np.full(z.shape, -1.0)
    hi = np.full(z.shape, 1.0)
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        up = Q(mid) < z
        lo = np.where(up, mid, lo)
        hi = np.where(up, hi, mid)
    y = 0.5 * (lo + hi)
    dQ = Q.deriv()
    for _ in range(5):
        step = (Q(y) - z) / dQ(y)
        y = np.clip(y - step, -1.0, 1.0)
    return np.where(inside, y, np.nan)


@dataclass(frozen=True)
class CharZeros:
    z: EmpiricalMeasure
    y: np.ndarray
    in_range: np.ndarray

    @property
    def out_of_range_fraction(self) -> float:
        return float(np.mean(~self.in_range))

    def preimage_measure(self) -> EmpiricalMeasure:
        return EmpiricalMeasure(self.y[self.in_range])


def avg_char_poly_zeros(fam: ExceptionalFamily, n: int, constant_mode: ConstantMode = "zero") -> CharZeros:
    """Zeros of det(zI - M_e,nxn) and their preimages under Q."""
    Me = build_Me(fam, n, constant_mode)
    z = sym_eigenvalues(Me, n)
    Q = q_primitive(fam, constant_mode)
    y = q_inverse(Q, z)
    return CharZeros(z=EmpiricalMeasure(z), y=y, in_range=~np.isnan(y))


def _oracle_grid(fam: ExceptionalFamily, N: int, nodes: int):
    rule = gauss_jacobi_rule(nodes, fam.weight_params)
    x = rule.nodes
    w = rule.weights / fam.b_tilde(x) ** 2
    V = orthonormal_exceptional_table(fam, N - 1, x)[0]  # (N, nodes)
    grid = np.array(list(itertools.product(range(nodes), repeat=N)))  # (nodes^N, N)
    Phi = V[:, grid].transpose(1, 2, 0)  # Phi[g, i, k] = P^_k(x_{grid[g, i]})
    dens = np.linalg.det(Phi) ** 2 * np.prod(w[grid], axis=1)
    return x[grid], dens


def determinantal_normalization(fam: ExceptionalFamily, N: int, nodes: int = ORACLE_NODES) -> float:
    """N! * c(N), where c(N) makes c(N) det[K_N(x_i, x_j)] prod W(x_i) a probability density."""
    _, dens = _oracle_grid(fam, N, nodes)
    return math.factorial(N) / float(np.sum(dens))


def determinantal_oracle(fam: ExceptionalFamily, N: int, z: complex, nodes: int = ORACLE_NODES,
                         constant_mode: ConstantMode = "zero") -> complex:
    """E prod (z - Q(x_i)) under the N-point determinantal density, by tensor quadrature."""
    if N < 1 or N > 3:
        raise ValueError("tensor quadrature oracle supports 1 <= N <= 3")
    X, dens = _oracle_grid(fam, N, nodes)
    Q = q_primitive(fam, constant_mode)
    vals = np.prod(complex(z) - Q(X), axis=1)
    return complex(np.sum(dens * vals) / np.sum(dens))


# ---------------------------------------------------------------- moments


def christoffel_moments(fam: ExceptionalFamily, n: int, l_max: int, P: Polynomial | None = None) -> np.ndarray:
    """int P^l d mu_n for l = 0..l_max, with d mu_n = K_n(x, x) W(x) dx / n.

    P defaults to Q. Entry 0 is the total mass.
    """
    if fam.alpha + fam.eps1 < -0.5 or fam.beta + fam.eps2 < -0.5:
        log.warning("weight exponents below -1/2: the Christoffel measures need not converge")
    P = q_primitive(fam) if P is None else P

    def integrand(x):
        V = orthonormal_exceptional_table(fam, n - 1, x)[0]
        k = np.sum(V**2, axis=0) / n / fam.b_tilde(x) ** 2
        px = P(x)
        return np.stack([k * px**l for l in range(l_max + 1)])

    start = n + fam.b.degree + (P.degree * l_max) // 2 + 8
    val, _ = integrate_adaptive(integrand, fam.weight_params, start)
    return val


def equilibrium_moments(P: Polynomial, l_max: int) -> np.ndarray:
    """int P^l d mu_e for the arcsine measure, exact by Chebyshev-Gauss quadrature."""
    K = P.degree * l_max // 2 + 2
    x = np.cos((2 * np.arange(1, K + 1) - 1) * np.pi / (2 * K))
    v = P(x)
    return np.array([np.mean(v**l) for l in range(l_max + 1)])


def trace_gap_experiment(fam: ExceptionalFamily, l: int, n: int, constant_mode: ConstantMode = "zero") -> float:
    """(1/n) |Tr (Q(A_nxn))^l - Tr (M_e,nxn)^l|."""
    Q = q_primitive(fam, constant_mode)
    A = standard_recurrence(fam, n).jacobi_matrix(n)
    QA = apply_poly_to_banded(A, Q).dense()
    Me = build_Me(fam, n, constant_mode).dense()
    t1 = np.trace(np.linalg.matrix_power(QA, l))
    t2 = np.trace(np.linalg.matrix_power(Me, l))
    return abs(t1 - t2) / n
