"""Large-degree behaviour of exceptional Jacobi polynomials: zeros, ratios,
Mehler-Heine limits and zero discrepancy."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as C

from .darboux import ONE_MINUS_X, ExceptionalFamily, FamilyError, exceptional_table
from .jacobi import jacobi_norm, orthonormal_scaled
from .polycore import bessel_j_small, poly_roots
from .spectra import EmpiricalMeasure, sup_discrepancy

IMAG_TOL = 1e-8
EDGE_TOL = 1e-10


def exceptional_scaled(fam: ExceptionalFamily, n: int, z: complex):
    """P_n^[1](z), its derivative and P_{n-1}^[1](z), all divided by exp(log_scale).

    Returns ``(P, dP, P_prev, log_scale)``. Uses the rescaled recurrence, so
    |z| well outside [-1, 1] at large n does not overflow.
    """
    vals, ls = orthonormal_scaled(n, fam.params, z, derivs=2)
    z = complex(z)
    b, bw = complex(fam.b(z)), complex(fam.bw(z))
    db, dbw = complex(fam.b.deriv()(z)), complex(fam.bw.deriv()(z))
    p, dp, ddp = vals[0, 1], vals[1, 1], vals[2, 1]
    P = b * dp - bw * p
    dP = db * dp + b * ddp - dbw * p - bw * dp
    Pm1 = b * vals[1, 0] - bw * vals[0, 0]
    return P, dP, Pm1, ls


# ---------------------------------------------------------------- zeros


@dataclass(frozen=True)
class ZeroSplit:
    n: int
    regular: np.ndarray
    exceptional: np.ndarray

    @property
    def clean(self) -> bool:
        """Regular zeros are n in number and simple."""
        r = self.regular
        gaps_ok = len(r) < 2 or float(np.min(np.diff(r))) > 1e-9
        return len(r) == self.n and gaps_ok


def _chebyshev_coeffs(fam: ExceptionalFamily, n: int) -> np.ndarray:
    deg = fam.degree(n)
    k = np.arange(deg + 1)
    x = np.cos(np.pi * (k + 0.5) / (deg + 1))
    v = exceptional_table(fam, n, x)[0, n]
    # discrete cosine transform at first-kind Chebyshev points
    T = np.cos(np.outer(k, np.pi * (k + 0.5) / (deg + 1)))
    c = 2.0 / (deg + 1) * (T @ v)
    c[0] /= 2
    return c


def exceptional_zeros(fam: ExceptionalFamily, n: int) -> np.ndarray:
    """All zeros of P_n^[1].

    Colleague-matrix eigenvalues from the Chebyshev expansion (the monomial
    companion matrix is hopeless at these degrees), then Newton on the
    rescaled recurrence.
    """
    c = _chebyshev_coeffs(fam, n)
    c = c[: np.max(np.nonzero(np.abs(c) > 1e-14 * np.max(np.abs(c)))[0]) + 1]
    raw = C.chebroots(c) if len(c) > 2 else np.array([-c[0] / c[1]])
    raw = np.asarray(raw, dtype=complex)
    out = raw.copy()
    # zeros on (-1, 1): vectorized Newton on real values, no scaling needed
    real = (np.abs(raw.imag) <= 1e-6) & (np.abs(raw.real) < 1)
    x = raw[real].real
    for _ in range(4):
        if x.size == 0:
            break
        t = exceptional_table(fam, n, x, derivs=1)[:, n]
        x = np.clip(x - t[0] / t[1], -1.0, 1.0)
    out[real] = x
    for i in np.nonzero(~real)[0]:
        z = complex(raw[i])
        P, dP, _, _ = exceptional_scaled(fam, n, z)
        for _ in range(8):
            if dP == 0:
                break
            step = P / dP
            z -= step
            if abs(step) <= 4e-16 * max(1.0, abs(z)):
                break
            P, dP, _, _ = exceptional_scaled(fam, n, z)
        out[i] = z
    return out


def zero_split(fam: ExceptionalFamily, n: int) -> ZeroSplit:
    zs = exceptional_zeros(fam, n)
    real_like = np.abs(zs.imag) <= IMAG_TOL
    inside = real_like & (np.abs(zs.real) < 1 - EDGE_TOL)
    regular = np.sort(zs[inside].real)
    exc = zs[~inside]
    exc = np.where(np.abs(exc.imag) <= IMAG_TOL, exc.real, exc)
    return ZeroSplit(n=n, regular=regular, exceptional=exc[np.lexsort((exc.imag, exc.real))])


def hausdorff(a, b) -> float:
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if len(a) == 0 and len(b) == 0:
        return 0.0
    if len(a) == 0 or len(b) == 0:
        return math.inf
    d = np.abs(a[:, None] - b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


def exceptional_zero_gap(fam: ExceptionalFamily, n: int) -> float:
    """Hausdorff distance between the exceptional zeros and the roots of b_tilde."""
    target = poly_roots(fam.b_tilde).roots if fam.b_tilde.degree >= 1 else np.zeros(0)
    return hausdorff(zero_split(fam, n).exceptional, target)


# ---------------------------------------------------------------- ratio asymptotics


def ratio_limit(z: complex) -> complex:
    """z - sqrt(z^2 - 1) on the branch with modulus below one."""
    z = complex(z)
    return z - cmath.sqrt(z - 1) * cmath.sqrt(z + 1)


def ratio_asymptotics(fam: ExceptionalFamily, z: complex, n: int) -> complex:
    """P_{n-1}^[1](z) / P_n^[1](z)."""
    z = complex(z)
    if z.imag == 0 and -1 <= z.real <= 1:
        raise ValueError("z must lie off [-1, 1]")
    if fam.b_tilde.degree >= 1:
        dist = np.min(np.abs(poly_roots(fam.b_tilde).roots - z))
        if dist <= 0.05:
            raise ValueError(f"z is within {dist:.3g} of a zero of b_tilde")
    P, _, Pm1, _ = exceptional_scaled(fam, n, z)
    return complex(Pm1 / P)


# ---------------------------------------------------------------- Mehler-Heine


def mehler_heine(fam: ExceptionalFamily, z: complex, n: int) -> tuple[complex, complex]:
    """Scaled P_n^[1](cos(z/n)) and its Bessel-type limit.

    eps1 = -1: rho_n n^-alpha P_n^[1] -> -b1(1) j_{alpha-1}(z) / Gamma(alpha), b = (1-x) b1.
    eps1 = +1: rho_n n^-(alpha+2) P_n^[1] -> b(1) j_{alpha+1}(z) / (2 Gamma(alpha+2)).
    """
    al = fam.alpha
    if al < -fam.eps1 / 2:
        raise FamilyError(f"Mehler-Heine limit needs alpha >= {-fam.eps1 / 2:g}")
    x = np.cos(complex(z) / n)
    x = x.real if abs(x.imag) == 0 else x
    val = complex(exceptional_table(fam, n, np.array([x]))[0, n, 0])
    rho = jacobi_norm(n, fam.params)
    if fam.eps1 == -1:
        b1, rem = fam.b.divmod(ONE_MINUS_X)
        if np.max(np.abs(rem.c)) > 1e-12 * np.max(np.abs(fam.b.c)):
            raise FamilyError("b does not vanish at x = 1")
        scaled = rho / n**al * val
        limit = -b1(1.0) * bessel_j_small(al - 1, z) / math.gamma(al)
    else:
        scaled = rho / n ** (al + 2) * val
        limit = fam.b(1.0) * bessel_j_small(al + 1, z) / (2 * math.gamma(al + 2))
    return complex(scaled), complex(limit)


# ---------------------------------------------------------------- discrepancy


def regular_zero_measure(fam: ExceptionalFamily, n: int) -> EmpiricalMeasure:
    return EmpiricalMeasure(zero_split(fam, n).regular)


def fit_discrepancy_constant(fam: ExceptionalFamily, n0: int = 50) -> float:
    """C with discrepancy(n0) = C sqrt(log n0 / n0)."""
    return sup_discrepancy(regular_zero_measure(fam, n0)) / math.sqrt(math.log(n0) / n0)


def regular_zero_discrepancy(fam: ExceptionalFamily, n: int, C_fit: float) -> tuple[float, float]:
    """(sup discrepancy of the regular-zero angles, C_fit sqrt(log n / n))."""
    if fam.alpha < -0.5 or fam.beta < -0.5:
        raise FamilyError("discrepancy bound needs alpha, beta >= -1/2")
    value = sup_discrepancy(regular_zero_measure(fam, n))
    return value, C_fit * math.sqrt(math.log(n) / n)

