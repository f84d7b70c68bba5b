"""Self-inversive polynomials built from the limits U_k, and the banded
Toeplitz operator with symbol Q(cos theta)."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .darboux import ExceptionalFamily
from .jacobi import NumericalError
from .opmatrix import BandedSymMatrix, limit_coeffs, q_primitive
from .polycore import Polynomial, poly_roots
from .spectra import sym_eigenvalues

CIRCLE_TOL = 1e-8
BOUNDARY_BAND = 1e-9


@dataclass(frozen=True)
class SelfInversivePoly:
    """sum_k U_k (z^(L+k) + z^(L-k)) - lambda z^L."""

    U: np.ndarray  # U_1..U_L
    lam: float
    poly: Polynomial

    @property
    def L(self) -> int:
        return len(self.U)

    @property
    def coeffs(self) -> np.ndarray:
        c = np.zeros(2 * self.L + 1)
        c[: len(self.poly.coeffs)] = self.poly.c
        return c


def self_inversive_from_U(U, lam: float) -> SelfInversivePoly:
    U = np.asarray(U, dtype=float)
    L = len(U)
    c = np.zeros(2 * L + 1)
    for k in range(1, L + 1):
        c[L + k] += U[k - 1]
        c[L - k] += U[k - 1]
    c[L] -= lam
    return SelfInversivePoly(U=U, lam=float(lam), poly=Polynomial(c))


def build_self_inversive(fam: ExceptionalFamily, lam: float) -> SelfInversivePoly:
    return self_inversive_from_U(limit_coeffs(fam)[1:], lam)


def circle_roots(p: SelfInversivePoly) -> np.ndarray:
    if p.poly.degree < 1:
        raise NumericalError("degenerate self-inversive polynomial")
    return poly_roots(p.poly).roots


def circle_zero_test(p: SelfInversivePoly, tol: float = CIRCLE_TOL) -> bool:
    """True iff some root lies within tol of the unit circle."""
    r = np.abs(circle_roots(p))
    return bool(np.any(np.abs(r - 1.0) <= tol))


def roots_inside_disk(p: SelfInversivePoly, tol: float = CIRCLE_TOL) -> int:
    return int(np.sum(np.abs(circle_roots(p)) < 1.0 - tol))


def dominant_middle_coefficient(p: SelfInversivePoly) -> bool:
    """Quick sufficient test for no circle zeros: |a_L| > sum_{k != L} |a_k|."""
    c = p.coeffs
    return bool(abs(c[p.L]) > np.sum(np.abs(c)) - abs(c[p.L]))


def circle_zero_interval(fam: ExceptionalFamily) -> tuple[float, float]:
    """[2 sum (-1)^k U_k, 2 sum U_k], checked against Q(-1), Q(1) for Q = int b_tilde - U_0."""
    U = limit_coeffs(fam)
    k = np.arange(len(U))
    lo = 2 * float(np.sum(((-1.0) ** k * U)[1:]))
    hi = 2 * float(np.sum(U[1:]))
    Q = q_primitive(fam, "minus_u0")
    if abs(lo - Q(-1.0)) > 1e-12 * max(1.0, abs(lo)) or abs(hi - Q(1.0)) > 1e-12 * max(1.0, abs(hi)):
        raise NumericalError(
            f"interval from U ({lo}, {hi}) disagrees with Q(-1), Q(1) = ({Q(-1.0)}, {Q(1.0)})"
        )
    return lo, hi


def toeplitz_matrix(U, n: int) -> BandedSymMatrix:
    """n x n section of the banded Toeplitz matrix with symbol 2 sum_k U_k cos k theta."""
    U = np.asarray(U, dtype=float)
    L = len(U)
    bands = np.zeros((L + 1, n))
    for k in range(1, L + 1):
        bands[k, : max(n - k, 0)] = U[k - 1]
    return BandedSymMatrix(bands, n)


def toeplitz_section_spectrum(fam: ExceptionalFamily, n: int) -> np.ndarray:
    L = fam.L
    if n < 2 * L + 1:
        raise ValueError(f"section size must be at least {2 * L + 1}")
    return sym_eigenvalues(toeplitz_matrix(limit_coeffs(fam)[1:], n), n)


def symbol_image(fam: ExceptionalFamily, m: int) -> np.ndarray:
    """Q(cos theta_j) on m equispaced angles in [0, pi], Q shifted by -U_0."""
    Q = q_primitive(fam, "minus_u0")
    return np.sort(Q(np.cos(np.linspace(0.0, np.pi, m))))


@dataclass(frozen=True)
class SweepRow:
    lam: float
    lo: float
    hi: float
    inside: bool
    has_circle_zero: bool
    n_inside_disk: int
    quick_test: bool
    L: int

    @property
    def consistent(self) -> bool:
        """Circle zeros exactly inside the interval, L roots in the disk outside it."""
        if self.has_circle_zero != self.inside:
            return False
        if not self.inside and self.n_inside_disk != self.L:
            return False
        return not (self.quick_test and self.has_circle_zero)


def sweep(fam: ExceptionalFamily, n_lambda: int = 100, seed: int = 0, pad: float = 1.0) -> list[SweepRow]:
    """Sample lambda uniformly in [lo - pad, hi + pad] away from the endpoints."""
    lo, hi = circle_zero_interval(fam)
    rng = np.random.default_rng(seed)
    rows: list[SweepRow] = []
    while len(rows) < n_lambda:
        lam = float(rng.uniform(lo - pad, hi + pad))
        if min(abs(lam - lo), abs(lam - hi)) <= BOUNDARY_BAND:
            continue
        p = build_self_inversive(fam, lam)
        row = SweepRow(
            lam=lam, lo=lo, hi=hi, inside=lo <= lam <= hi,
            has_circle_zero=circle_zero_test(p), n_inside_disk=roots_inside_disk(p),
            quick_test=dominant_middle_coefficient(p), L=p.L,
        )
        rows.append(row)
    return rows
