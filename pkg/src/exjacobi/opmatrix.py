"""Multiplication by Q in the exceptional basis, the standard recurrence for W,
banded matrix utilities and the change of basis between the two systems."""

from __future__ import annotations

import csv
import functools
import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .darboux import ExceptionalFamily, orthonormal_exceptional_table
from .jacobi import NumericalError, gauss_jacobi_rule
from .polycore import Polynomial

ConstantMode = Literal["zero", "minus_u0"]
CONSTANT_MODES = ("zero", "minus_u0")

QUAD_RTOL = 1e-12
MAX_NODES = 16384


class RecurrenceFailure(NumericalError):
    """Q P^_n is not a finite combination of neighbouring P^_k."""


class StieltjesBreakdown(NumericalError):
    pass


# ---------------------------------------------------------------- banded storage


@dataclass(frozen=True)
class BandedSymMatrix:
    """Symmetric matrix stored by its upper diagonals.

    ``bands[d, i]`` is entry (i, i+d); slots past the end are zero.
    ``exact_rows`` counts the leading rows that agree with the infinite
    matrix this one is a section of (the tail is polluted by truncation).
    """

    bands: np.ndarray
    exact_rows: int

    @property
    def L(self) -> int:
        return self.bands.shape[0] - 1

    @property
    def size(self) -> int:
        return self.bands.shape[1]

    @classmethod
    def from_dense(cls, A: np.ndarray, L: int, exact_rows: int | None = None, tol: float = 1e-10):
        A = np.asarray(A, dtype=float)
        n = A.shape[0]
        if np.max(np.abs(A - A.T), initial=0.0) > tol * max(1.0, np.max(np.abs(A), initial=0.0)):
            raise ValueError("matrix is not symmetric")
        bands = np.zeros((L + 1, n))
        for d in range(min(L, n - 1) + 1):
            bands[d, : n - d] = np.diagonal(A, d)
        return cls(bands, n if exact_rows is None else exact_rows)

    def entry(self, i: int, j: int) -> float:
        i, j = min(i, j), max(i, j)
        if j - i > self.L or j >= self.size:
            return 0.0
        return float(self.bands[j - i, i])

    def dense(self, n: int | None = None) -> np.ndarray:
        n = self.size if n is None else n
        if n > self.size:
            raise ValueError(f"requested {n} rows of a {self.size}-row matrix")
        A = np.zeros((n, n))
        for d in range(min(self.L, n - 1) + 1):
            v = self.bands[d, : n - d]
            A += np.diag(v, d)
            if d:
                A += np.diag(v, -d)
        return A

    def truncate(self, n: int) -> "BandedSymMatrix":
        if n > self.size:
            raise ValueError(f"cannot truncate a {self.size}-row matrix to {n}")
        b = self.bands[:, :n].copy()
        for d in range(1, self.L + 1):
            b[d, max(n - d, 0):] = 0.0
        return BandedSymMatrix(b, min(n, self.exact_rows))

    def shifted(self, c: float) -> "BandedSymMatrix":
        b = self.bands.copy()
        b[0] -= c
        return BandedSymMatrix(b, self.exact_rows)


def apply_poly_to_banded(mat: BandedSymMatrix, P: Polynomial) -> BandedSymMatrix:
    """P(mat) with half-bandwidth L*deg P.

    The last L*(deg P - 1) exact rows are lost to truncation effects.
    """
    M = P.degree
    lost = mat.L * max(M - 1, 0)
    if mat.exact_rows - lost <= 0:
        raise ValueError(f"realized size {mat.size} too small for a degree-{M} polynomial")
    D = mat.dense()
    acc = np.eye(mat.size) * P.coeffs[-1]
    for c in reversed(P.coeffs[:-1]):
        acc = acc @ D + c * np.eye(mat.size)
    acc = 0.5 * (acc + acc.T)
    return BandedSymMatrix.from_dense(acc, mat.L * max(M, 0), mat.exact_rows - lost)


def diagonal_agreement(C: BandedSymMatrix, l: int, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Diagonals of (C_{nxn})^l and (C^l)_{nxn}.

    They coincide except in the last L*(l-1) positions.
    """
    if C.exact_rows < n + C.L * l:
        raise ValueError("realized size too small for the requested truncation")
    Cn = C.dense(n)
    full = C.dense()
    return (np.diagonal(np.linalg.matrix_power(Cn, l)).copy(),
            np.diagonal(np.linalg.matrix_power(full, l))[:n].copy())


def truncation_trace_gap(C: BandedSymMatrix, P: Polynomial, n: int) -> float:
    """(1/n) |Tr P(C_{nxn}) - Tr (P(C))_{nxn}|."""
    if C.exact_rows < n + P.degree * C.L:
        raise ValueError(
            f"need {n + P.degree * C.L} exact rows, matrix has {C.exact_rows}"
        )
    small = apply_poly_to_banded(C.truncate(n), P)
    big = apply_poly_to_banded(C, P)
    return abs(np.sum(small.bands[0]) - np.sum(big.bands[0, :n])) / n


# ---------------------------------------------------------------- Q and U


def q_primitive(fam: ExceptionalFamily, constant_mode: ConstantMode = "zero") -> Polynomial:
    """Primitive of b_tilde; either with zero constant or shifted by -U_0."""
    Q0 = fam.b_tilde.antideriv(0.0)
    if constant_mode == "zero":
        return Q0
    if constant_mode == "minus_u0":
        return Q0 - limit_coeffs(fam)[0]
    raise ValueError(f"unknown constant mode {constant_mode!r}")


def limit_coeffs(fam_or_btilde) -> np.ndarray:
    """U_0..U_L, the limits of the recurrence coefficients, in closed form.

    With d_k the coefficients of b_tilde, the even and odd powers of the
    primitive are expanded in cosines separately.
    """
    bt = fam_or_btilde if isinstance(fam_or_btilde, Polynomial) else fam_or_btilde.b_tilde
    d = bt.c
    L = bt.degree + 1
    U = np.zeros(L + 1)
    for j in range(L + 1):
        l, odd = divmod(j, 2)
        if odd:
            for p in range(l, (L - 1) // 2 + 1):
                U[j] += d[2 * p] / (2 * p + 1) * math.comb(2 * p + 1, p - l) / 2.0 ** (2 * p + 1)
        else:
            for p in range(max(l, 1), L // 2 + 1):
                U[j] += d[2 * p - 1] / (2 * p) * math.comb(2 * p, p - l) / 2.0 ** (2 * p)
    return U


# ---------------------------------------------------------------- exceptional Gram matrices


@functools.lru_cache(maxsize=8)
def _exceptional_nodes(fam: ExceptionalFamily, N: int, n_nodes: int):
    rule = gauss_jacobi_rule(n_nodes, fam.weight_params)
    x = rule.nodes
    V = orthonormal_exceptional_table(fam, N, x)[0]
    w = rule.weights / fam.b_tilde(x) ** 2
    return x, w, V


def exceptional_gram(fam: ExceptionalFamily, N: int, f: Polynomial | None = None) -> np.ndarray:
    """G[i, j] = <f P^_i, P^_j>_W for i, j <= N, by adaptive quadrature."""
    f = Polynomial([1.0]) if f is None else f
    K = N + fam.b.degree + f.degree + 16
    prev = None
    while K <= MAX_NODES:
        x, w, V = _exceptional_nodes(fam, N, K)
        G = (V * (w * f(x))) @ V.T
        if prev is not None:
            scale = max(1.0, float(np.max(np.abs(G))))
            if np.max(np.abs(G - prev)) <= QUAD_RTOL * scale:
                return 0.5 * (G + G.T)
        prev = G
        K *= 2
    raise NumericalError(f"exceptional Gram matrix did not settle below {MAX_NODES} nodes")


@dataclass(frozen=True)
class RecurrenceTable:
    """u[n, k + L] = u_{n,k} = <Q P^_n, P^_{n+k}>_W for n < N, |k| <= L."""

    u: np.ndarray
    L: int
    Q: Polynomial
    limits: np.ndarray

    @property
    def N(self) -> int:
        return self.u.shape[0]

    def coeff(self, n: int, k: int) -> float:
        return float(self.u[n, k + self.L])

    def limit_gap(self, n: int) -> float:
        """max_k |u_{n,k} - U_|k||."""
        ks = np.arange(-self.L, self.L + 1)
        return float(np.max(np.abs(self.u[n] - self.limits[np.abs(ks)])))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            wr.writerow(["n", "k", "u_nk", "U_limit", "abs_gap"])
            for n in range(self.N):
                for k in range(-self.L, self.L + 1):
                    if n + k < 0:
                        continue
                    u = self.coeff(n, k)
                    U = self.limits[abs(k)]
                    wr.writerow([n, k, f"{u:.17g}", f"{U:.17g}", f"{abs(u - U):.17g}"])


def recurrence_coeffs(fam: ExceptionalFamily, N: int, constant_mode: ConstantMode = "zero") -> RecurrenceTable:
    if N < 1:
        raise ValueError("N must be at least 1")
    L = fam.L
    Q = q_primitive(fam, constant_mode)
    G = exceptional_gram(fam, N - 1 + L, Q)
    scale = max(1.0, float(np.max(np.abs(G))))
    i, j = np.indices(G.shape)
    off = np.max(np.abs(G[np.abs(i - j) > L]), initial=0.0)
    if off > 1e-9 * scale:
        raise RecurrenceFailure(
            f"<Q P^_i, P^_j> reaches {off:.3g} outside the band |i-j| <= {L}; "
            "the exceptional system does not span the polynomials times Q"
        )
    u = np.zeros((N, 2 * L + 1))
    for n in range(N):
        for k in range(-L, L + 1):
            if n + k >= 0:
                u[n, k + L] = G[n, n + k]
    limits = limit_coeffs(fam)
    if constant_mode == "minus_u0":
        limits[0] = 0.0
    tab = RecurrenceTable(u=u, L=L, Q=Q, limits=limits)
    # a banded Gram matrix is not enough: Q P^_n must lie in the span
    probe = np.cos(np.pi * (np.arange(10) + 0.5) / 10) * 0.95
    res = float(np.max(recurrence_residual(fam, tab, probe)))
    if res > 1e-8:
        raise RecurrenceFailure(
            f"recurrence residual {res:.3g} at sample points; the system is not complete"
        )
    return tab


def recurrence_residual(fam: ExceptionalFamily, table: RecurrenceTable, x) -> np.ndarray:
    """|Q P^_n - sum_k u_{n,k} P^_{n+k}| at x, rows n = 0..N-1, scaled by max(1, |Q P^_n|)."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    L = table.L
    V = orthonormal_exceptional_table(fam, table.N - 1 + L, x)[0]
    lhs = table.Q(x) * V[: table.N]
    rhs = np.zeros_like(lhs)
    for n in range(table.N):
        for k in range(-L, L + 1):
            if n + k >= 0:
                rhs[n] += table.u[n, k + L] * V[n + k]
    return np.abs(lhs - rhs) / np.maximum(1.0, np.abs(lhs))


def build_Me(fam: ExceptionalFamily, N: int, constant_mode: ConstantMode = "zero") -> BandedSymMatrix:
    tab = recurrence_coeffs(fam, N, constant_mode)
    L = tab.L
    bands = np.zeros((L + 1, N))
    for d in range(L + 1):
        bands[d, : N - d] = tab.u[: N - d, L + d]
    return BandedSymMatrix(bands, N)


# ---------------------------------------------------------------- standard recurrence for W


@dataclass(frozen=True)
class StandardRecurrence:
    """x q_n = a_{n+1} q_{n+1} + b_n q_n + a_n q_{n-1}; a[0] = 0, len(a) = N+1, len(b) = N."""

    a: np.ndarray
    b: np.ndarray
    mass: float

    @property
    def N(self) -> int:
        return len(self.b)

    def jacobi_matrix(self, n: int | None = None) -> BandedSymMatrix:
        n = self.N if n is None else n
        if n > self.N:
            raise ValueError(f"recurrence only known to {self.N}")
        bands = np.zeros((2, n))
        bands[0] = self.b[:n]
        bands[1, : n - 1] = self.a[1:n]
        return BandedSymMatrix(bands, n)

    def values(self, x, n: int | None = None) -> np.ndarray:
        """q_0..q_n at x, shape (n+1,) + x.shape."""
        n = self.N if n is None else n
        x = np.asarray(x, dtype=float)
        out = np.zeros((n + 1,) + x.shape)
        out[0] = 1.0 / math.sqrt(self.mass)
        for k in range(n):
            v = (x - self.b[k]) * out[k]
            if k:
                v -= self.a[k] * out[k - 1]
            out[k + 1] = v / self.a[k + 1]
        return out


def _stieltjes(x: np.ndarray, w: np.ndarray, N: int):
    a = np.zeros(N + 1)
    b = np.zeros(N)
    mass = float(np.sum(w))
    q_prev = np.zeros_like(x)
    q = np.full_like(x, 1.0 / math.sqrt(mass))
    for n in range(N):
        b[n] = np.sum(w * x * q * q)
        r = (x - b[n]) * q - a[n] * q_prev
        a2 = np.sum(w * r * r)
        if not a2 > 0:
            raise StieltjesBreakdown(f"a_{n + 1}^2 = {a2:g}: discretization too coarse")
        a[n + 1] = math.sqrt(a2)
        q_prev, q = q, r / a[n + 1]
    return a, b, mass


@functools.lru_cache(maxsize=16)
def standard_recurrence(fam: ExceptionalFamily, N: int) -> StandardRecurrence:
    """Discretized Stieltjes procedure on Gauss-Jacobi nodes, doubled until stable."""
    if N < 1:
        raise ValueError("N must be at least 1")
    K = N + 32
    prev = None
    while K <= MAX_NODES:
        rule = gauss_jacobi_rule(K, fam.weight_params)
        w = rule.weights / fam.b_tilde(rule.nodes) ** 2
        a, b, mass = _stieltjes(rule.nodes, w, N)
        if prev is not None:
            diff = max(np.max(np.abs(a - prev[0])), np.max(np.abs(b - prev[1])))
            if diff <= QUAD_RTOL * max(1.0, np.max(np.abs(a))) and abs(mass - prev[2]) <= QUAD_RTOL * mass:
                return StandardRecurrence(a=a, b=b, mass=mass)
        prev = (a, b, mass)
        K *= 2
    raise NumericalError(f"Stieltjes procedure did not settle below {MAX_NODES} nodes")


def basis_change(fam: ExceptionalFamily, N: int) -> np.ndarray:
    """O[i, j] = <P^_j, q_i>_W for j < N and i < N + deg(b) - 1.

    Column j holds the coordinates of P^_j in the standard basis.
    """
    shift = fam.b.degree - 1
    rows = N + shift
    rec = standard_recurrence(fam, rows)
    K = rows + fam.b.degree + 16
    prev = None
    while K <= MAX_NODES:
        x, w, V = _exceptional_nodes(fam, N - 1, K)
        Qv = rec.values(x, rows - 1)
        O = (Qv * w) @ V.T
        if prev is not None and np.max(np.abs(O - prev)) <= QUAD_RTOL * max(1.0, np.max(np.abs(O))):
            return O
        prev = O
        K *= 2
    raise NumericalError("basis change did not settle")
