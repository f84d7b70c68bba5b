"""Dense real polynomials in the monomial basis, root finding and j_alpha."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.linalg import matrix_balance

log = logging.getLogger(__name__)

CLUSTER_TOL = 1e-7
NEWTON_STEPS = 50


def _trim(coeffs: Iterable[float]) -> tuple[float, ...]:
    c = [float(v) for v in coeffs]
    while len(c) > 1 and c[-1] == 0.0:
        c.pop()
    if not c:
        c = [0.0]
    return tuple(c)


@dataclass(frozen=True)
class Polynomial:
    """Real polynomial; ``coeffs[k]`` multiplies ``x**k``.

    Instances are immutable and hashable, so they can key caches.
    """

    coeffs: tuple[float, ...]

    def __init__(self, coeffs: Iterable[float]):
        object.__setattr__(self, "coeffs", _trim(coeffs))

    @classmethod
    def from_roots(cls, roots: Sequence[float], lead: float = 1.0) -> "Polynomial":
        p = cls([lead])
        for r in roots:
            p = p * cls([-r, 1.0])
        return p

    @property
    def c(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=float)

    @property
    def degree(self) -> int:
        # the zero polynomial reports degree 0, like numpy.polynomial
        return len(self.coeffs) - 1

    @property
    def lead(self) -> float:
        return self.coeffs[-1]

    def is_zero(self) -> bool:
        return self.coeffs == (0.0,)

    def __call__(self, x):
        return poly_eval(self, x)

    def __add__(self, other):
        other = _as_poly(other)
        n = max(len(self.coeffs), len(other.coeffs))
        a = np.zeros(n)
        a[: len(self.coeffs)] += self.c
        a[: len(other.coeffs)] += other.c
        return Polynomial(a)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(-self.c)

    def __sub__(self, other):
        return self + (-_as_poly(other))

    def __rsub__(self, other):
        return _as_poly(other) - self

    def __mul__(self, other):
        other = _as_poly(other)
        return Polynomial(np.convolve(self.c, other.c))

    __rmul__ = __mul__

    def __truediv__(self, scalar: float):
        return Polynomial(self.c / float(scalar))

    def __pow__(self, k: int):
        out = Polynomial([1.0])
        for _ in range(k):
            out = out * self
        return out

    def deriv(self, order: int = 1) -> "Polynomial":
        c = self.c
        for _ in range(order):
            if len(c) == 1:
                return Polynomial([0.0])
            c = c[1:] * np.arange(1, len(c))
        return Polynomial(c)

    def antideriv(self, constant: float = 0.0) -> "Polynomial":
        c = self.c / np.arange(1, len(self.coeffs) + 1)
        return Polynomial(np.concatenate(([constant], c)))

    def divmod(self, divisor: "Polynomial") -> tuple["Polynomial", "Polynomial"]:
        if divisor.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        q, r = np.polynomial.polynomial.polydiv(self.c, divisor.c)
        return Polynomial(q), Polynomial(r)

    def compose(self, inner: "Polynomial") -> "Polynomial":
        out = Polynomial([0.0])
        for a in reversed(self.coeffs):
            out = out * inner + a
        return out

    def __repr__(self) -> str:
        return f"Polynomial({list(self.coeffs)})"


def _as_poly(v) -> Polynomial:
    if isinstance(v, Polynomial):
        return v
    return Polynomial([float(v)])


def poly_eval(p: Polynomial, x):
    """Horner evaluation; ``x`` may be a scalar or an array, real or complex."""
    x = np.asarray(x)
    acc = np.zeros_like(x, dtype=np.result_type(x, float))
    for a in reversed(p.coeffs):
        acc = acc * x + a
    if acc.ndim == 0:
        return acc[()]
    return acc


@dataclass(frozen=True)
class ComplexRootSet:
    """Roots of a polynomial, one entry per root counted with multiplicity."""

    roots: np.ndarray
    residuals: np.ndarray = field(repr=False)
    refined: np.ndarray = field(repr=False)

    def __len__(self) -> int:
        return len(self.roots)

    def clusters(self, tol: float = CLUSTER_TOL) -> list[tuple[complex, int]]:
        """Group roots closer than ``tol``; returns (mean, multiplicity)."""
        remaining = list(self.roots)
        out = []
        while remaining:
            r0 = remaining.pop(0)
            group = [r0]
            rest = []
            for r in remaining:
                (group if abs(r - r0) <= tol else rest).append(r)
            remaining = rest
            out.append((complex(np.mean(group)), len(group)))
        return out

    def real(self, imag_tol: float = 1e-8) -> np.ndarray:
        mask = np.abs(self.roots.imag) <= imag_tol
        return np.sort(self.roots[mask].real)


def _newton(p: Polynomial, dp: Polynomial, z0: complex) -> tuple[complex, bool]:
    z = z0
    f = complex(poly_eval(p, z))
    start = abs(f)
    for _ in range(NEWTON_STEPS):
        d = complex(poly_eval(dp, z))
        if d == 0:
            break
        step = f / d
        z_new = z - step
        f_new = complex(poly_eval(p, z_new))
        if abs(f_new) >= abs(f):
            break
        z, f = z_new, f_new
        if abs(step) <= 4e-16 * max(1.0, abs(z)):
            break
    return z, abs(f) <= start


def poly_roots(p: Polynomial) -> ComplexRootSet:
    """All complex roots via the balanced companion matrix, Newton-polished.

    Raises ValueError for constant input.
    """
    if p.degree < 1:
        raise ValueError("constant polynomial")
    c = p.c
    n = p.degree
    monic = c[:-1] / c[-1]
    comp = np.zeros((n, n))
    comp[1:, :-1] = np.eye(n - 1)
    comp[:, -1] = -monic
    balanced, _ = matrix_balance(comp, permute=False)
    raw = np.linalg.eigvals(balanced)

    dp = p.deriv()
    roots = np.empty(n, dtype=complex)
    refined = np.zeros(n, dtype=bool)
    for i, z0 in enumerate(raw):
        z, ok = _newton(p, dp, complex(z0))
        roots[i] = z if ok else z0
        refined[i] = ok
    # keep conjugate pairs exact for real input
    roots = np.where(np.abs(roots.imag) <= 1e-14 * np.maximum(1.0, np.abs(roots)), roots.real, roots)
    order = np.lexsort((roots.imag, roots.real))
    roots = roots[order]
    refined = refined[order]
    residuals = np.abs(poly_eval(p, roots))
    bound = 1e-10 * np.max(np.abs(c)) * np.maximum(1.0, np.abs(roots)) ** n
    if np.any(residuals > bound):
        log.warning("poly_roots: %d roots exceed the residual bound", int(np.sum(residuals > bound)))
    return ComplexRootSet(roots=roots, residuals=residuals, refined=refined)


def bessel_j_small(alpha: float, z) -> complex:
    """Normalized Bessel function ``Gamma(alpha+1) (2/z)^alpha J_alpha(z)``.

    Summed from its power series, so j_alpha(0) = 1. Cancellation in the
    series costs roughly ``exp(|z|)`` in relative accuracy; intended for
    ``|z| <= 20``.
    """
    if alpha <= -1:
        raise ValueError("alpha must exceed -1")
    z = complex(z)
    u = -(z / 2) ** 2
    term = 1.0 + 0j
    total = term
    peak = 1.0
    k = 0
    while k < 500:
        term = term * u / ((k + 1) * (k + alpha + 1))
        k += 1
        total += term
        peak = max(peak, abs(term))
        # past the peak, stop once the tail is negligible (near a zero of
        # j_alpha the sum itself is tiny, hence the peak-relative test)
        if k > abs(u) and (abs(term) <= 1e-14 * abs(total) or abs(term) <= 1e-18 * peak):
            break
    return total
