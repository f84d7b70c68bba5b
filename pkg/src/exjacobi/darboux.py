"""One-step Darboux transformation of the Jacobi operator.

A family is fixed by the classical parameters, the type of quasi-rational
seed eigenfunction phi and its degree m:

    I    phi = (1-x)^-alpha            P_m^(-alpha, beta)     b0 = (1-x)   P_m
    II   phi = (1+x)^-beta             P_m^(alpha, -beta)     b0 = (1+x)   P_m
    III  phi = (1-x)^-alpha (1+x)^-beta P_m^(-alpha, -beta)  b0 = (1-x^2) P_m

With w = phi'/phi and b = s*b0 the exceptional polynomials are
P_n^[1] = b p_n' - (bw) p_n, orthogonal against
W = (1-x)^(alpha+eps1) (1+x)^(beta+eps2) / b_tilde^2.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .jacobi import (
    JacobiParams,
    integrate_adaptive,
    jacobi_degenerate,
    jacobi_norm,
    jacobi_poly,
    orthonormal_table,
)
from .polycore import Polynomial, poly_roots

log = logging.getLogger(__name__)

P_COEF = Polynomial([1.0, 0.0, -1.0])  # p = 1 - x^2
ONE_MINUS_X = Polynomial([1.0, -1.0])
ONE_PLUS_X = Polynomial([1.0, 1.0])


class FamilyError(ValueError):
    """A seed/parameter choice that does not produce a valid family."""


@dataclass(frozen=True)
class SeedChoice:
    kind: str
    m: int
    s: Polynomial = field(default_factory=lambda: Polynomial([1.0]))

    def __post_init__(self):
        if self.kind not in ("I", "II", "III"):
            raise FamilyError(f"unknown seed type {self.kind!r}")
        if self.m < 0:
            raise FamilyError("seed degree must be non-negative")


@dataclass(frozen=True)
class Rational:
    num: Polynomial
    den: Polynomial

    def __call__(self, x):
        return self.num(x) / self.den(x)


@dataclass(frozen=True)
class PartnerCoefficients:
    q_hat: Rational
    r_hat: Rational


@dataclass(frozen=True)
class ExceptionalFamily:
    params: JacobiParams
    seed: SeedChoice
    b: Polynomial
    bw: Polynomial
    b_tilde: Polynomial
    eps1: int
    eps2: int
    lambda_tilde: float
    seed_poly: Polynomial = field(repr=False)

    @property
    def alpha(self) -> float:
        return self.params.alpha

    @property
    def beta(self) -> float:
        return self.params.beta

    @property
    def codim(self) -> int:
        return self.b_tilde.degree

    @property
    def L(self) -> int:
        return self.b_tilde.degree + 1

    @property
    def weight_params(self) -> JacobiParams:
        return JacobiParams(self.alpha + self.eps1, self.beta + self.eps2)

    def degree(self, n: int) -> int:
        """Generic degree of P_n^[1]."""
        return n + self.b.degree - 1

    def describe(self) -> dict[str, Any]:
        return {
            "seed_type": self.seed.kind,
            "alpha": self.alpha,
            "beta": self.beta,
            "m": self.seed.m,
            "b": list(self.b.coeffs),
            "bw": list(self.bw.coeffs),
            "b_tilde": list(self.b_tilde.coeffs),
            "eps1": self.eps1,
            "eps2": self.eps2,
            "lambda_tilde": self.lambda_tilde,
            "L": self.L,
            "codim": self.codim,
        }


def _seed_parts(params: JacobiParams, seed: SeedChoice):
    al, be, m = params.alpha, params.beta, seed.m
    if seed.kind == "I":
        P = jacobi_poly(m, -al, be)
        shift = (-al, be)
        b0 = ONE_MINUS_X * P
        bw0 = al * P + ONE_MINUS_X * P.deriv()
        eps = (-1, 1)

        def w(x):
            return al / (1 - x) + P.deriv()(x) / P(x)

    elif seed.kind == "II":
        P = jacobi_poly(m, al, -be)
        shift = (al, -be)
        b0 = ONE_PLUS_X * P
        bw0 = -be * P + ONE_PLUS_X * P.deriv()
        eps = (1, -1)

        def w(x):
            return -be / (1 + x) + P.deriv()(x) / P(x)

    else:
        P = jacobi_poly(m, -al, -be)
        shift = (-al, -be)
        b0 = P_COEF * P
        bw0 = al * ONE_PLUS_X * P - be * ONE_MINUS_X * P + P_COEF * P.deriv()
        eps = (-1, -1)

        def w(x):
            return al / (1 - x) - be / (1 + x) + P.deriv()(x) / P(x)

    return P, shift, b0, bw0, eps, w


def closed_form_lambda(params: JacobiParams, seed: SeedChoice) -> float:
    """Eigenvalue of the seed function under T, from its type."""
    al, be, m = params.alpha, params.beta, seed.m
    shift = {"I": -al, "II": -be, "III": -al - be}[seed.kind]
    return -(m + shift) * (m + shift + al + be + 1)


def _interior_points(k: int = 50) -> np.ndarray:
    return np.cos(np.pi * (np.arange(k) + 0.5) / k) * 0.98


def _real_roots_in(p: Polynomial, lo: float, hi: float) -> list[float]:
    if p.degree < 1:
        return []
    rs = poly_roots(p).roots
    return [r.real for r in rs if abs(r.imag) <= 1e-9 and lo <= r.real <= hi]


def riccati_residual(fam: ExceptionalFamily, x) -> np.ndarray:
    """p(w' + w^2) + q w - lambda_tilde with w = bw/b."""
    x = np.asarray(x, dtype=float)
    al, be = fam.alpha, fam.beta
    b, bw = fam.b(x), fam.bw(x)
    w = bw / b
    dw = (fam.bw.deriv()(x) * b - bw * fam.b.deriv()(x)) / b**2
    q = be - al - (al + be + 2) * x
    return (1 - x**2) * (dw + w**2) + q * w - fam.lambda_tilde


def build_family(params: JacobiParams, seed: SeedChoice, sign_normalize: bool = True) -> ExceptionalFamily:
    """Construct and validate a one-step exceptional Jacobi family."""
    P, shift, b0, bw0, (eps1, eps2), w = _seed_parts(params, seed)
    if seed.m > 0 and jacobi_degenerate(seed.m, *shift):
        log.warning("seed P_%d^(%g,%g) has degenerate degree %d", seed.m, *shift, P.degree)
    if P.is_zero():
        raise FamilyError("seed polynomial vanishes identically")
    if _real_roots_in(P, -1.0, 1.0):
        raise FamilyError("seed has zero in [-1,1]")
    s = seed.s
    if s.is_zero() or _real_roots_in(s, -1.001, 1.001):
        raise FamilyError("extra factor s has a zero in [-1.001, 1.001]")

    b = s * b0
    bw = s * bw0
    xs = _interior_points()
    resid = np.abs(b(xs) * w(xs) - bw(xs))
    if np.max(resid) > 1e-10 * max(1.0, float(np.max(np.abs(bw(xs))))):
        raise FamilyError("bw not polynomial")

    divisor = Polynomial([1.0])
    if eps1 == -1:
        divisor = divisor * ONE_MINUS_X
    if eps2 == -1:
        divisor = divisor * ONE_PLUS_X
    b_tilde, rem = b.divmod(divisor)
    if np.max(np.abs(rem.c)) > 1e-12 * np.max(np.abs(b.c)):
        raise FamilyError("b does not factor as expected")
    if sign_normalize and b_tilde(0.0) < 0:
        b, bw, b_tilde = -b, -bw, -b_tilde
    grid = np.linspace(-1, 1, 2001)
    if np.min(np.abs(b_tilde(grid))) == 0 or _real_roots_in(b_tilde, -1.0, 1.0):
        raise FamilyError("b_tilde vanishes on [-1,1]")
    if not sign_normalize and b_tilde(0.0) < 0:
        log.warning("b_tilde < 0 on [-1,1]; Q will be decreasing")

    fam = ExceptionalFamily(
        params=params, seed=seed, b=b, bw=bw, b_tilde=b_tilde,
        eps1=eps1, eps2=eps2, lambda_tilde=0.0, seed_poly=P,
    )
    # lambda_tilde: median of the Riccati left-hand side, then confirm it is constant
    lam = float(np.median(riccati_residual(fam, xs)))
    fam = ExceptionalFamily(
        params=params, seed=seed, b=b, bw=bw, b_tilde=b_tilde,
        eps1=eps1, eps2=eps2, lambda_tilde=lam, seed_poly=P,
    )
    if np.max(np.abs(riccati_residual(fam, xs))) > 1e-8 * (1 + abs(lam)):
        raise FamilyError("Riccati residual not constant")
    expected = closed_form_lambda(params, seed)
    if abs(expected - lam) > 1e-8 * (1 + abs(lam)):
        log.warning("lambda_tilde %.15g differs from the closed form %.15g", lam, expected)

    wa, wb = params.alpha + eps1, params.beta + eps2
    if wa <= -1 or wb <= -1:
        raise FamilyError("weight moments diverge")
    try:
        integrate_adaptive(lambda x: np.stack([1 / b_tilde(x) ** 2, x**2 / b_tilde(x) ** 2]),
                           JacobiParams(wa, wb), 16)
    except Exception as exc:  # pragma: no cover - defensive
        raise FamilyError("weight moments diverge") from exc
    return fam


def family_from_spec(spec: Mapping[str, Any]) -> ExceptionalFamily:
    """Build from the JSON family description used by the CLI."""
    try:
        kind = str(spec["seed_type"]).upper()
        params = JacobiParams(float(spec["alpha"]), float(spec["beta"]))
        m = int(spec["m"])
    except KeyError as exc:
        raise FamilyError(f"family spec missing field {exc.args[0]!r}") from exc
    except (TypeError, ValueError) as exc:
        raise FamilyError(str(exc)) from exc
    s = Polynomial(spec.get("s_coeffs", [1.0]))
    return build_family(params, SeedChoice(kind, m, s), bool(spec.get("sign_normalize", True)))


REFERENCE_FAMILIES: dict[str, dict[str, Any]] = {
    # codimension one, eps1 = -1; the worked example throughout the tests
    "F1": {"seed_type": "I", "alpha": 3, "beta": 0, "m": 1},
    # eps1 = +1
    "F2": {"seed_type": "II", "alpha": 0, "beta": 1.5, "m": 1},
    "F3": {"seed_type": "III", "alpha": 3, "beta": 0.5, "m": 1},
    # codimension two, complex pair of b_tilde roots
    "F4": {"seed_type": "I", "alpha": 3.5, "beta": 1.5, "m": 2},
    # b_tilde = 1: the exceptional system is the classical one for (0, 1)
    "trivial": {"seed_type": "I", "alpha": 1, "beta": 0, "m": 0},
    # b_tilde = 1 with W = 1 (Legendre weight)
    "legendre": {"seed_type": "III", "alpha": 1, "beta": 1, "m": 0},
}


def reference_family(name: str) -> ExceptionalFamily:
    return _reference_cache(name)


_cache: dict[str, ExceptionalFamily] = {}


def _reference_cache(name: str) -> ExceptionalFamily:
    if name not in _cache:
        _cache[name] = family_from_spec(REFERENCE_FAMILIES[name])
    return _cache[name]


def weight_eval(fam: ExceptionalFamily, x):
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) >= 1):
        raise ValueError("weight is defined on the open interval (-1, 1)")
    wa, wb = fam.alpha + fam.eps1, fam.beta + fam.eps2
    out = (1 - x) ** wa * (1 + x) ** wb / fam.b_tilde(x) ** 2
    return out[()] if out.ndim == 0 else out


def sigma(fam: ExceptionalFamily, k: int) -> float:
    """Norm of P_k^[1] in L^2_W: sqrt(k(k+alpha+beta+1) + lambda_tilde)."""
    al, be = fam.alpha, fam.beta
    if not (al + fam.eps1 / 2 > -0.5 and be + fam.eps2 / 2 > -0.5):
        raise FamilyError(
            f"norm formula needs alpha+eps1/2 > -1/2 and beta+eps2/2 > -1/2 "
            f"(have {al + fam.eps1 / 2:g}, {be + fam.eps2 / 2:g})"
        )
    s2 = k * (k + al + be + 1) + fam.lambda_tilde
    if s2 <= 0:
        raise FamilyError(f"sigma_{k}^2 = {s2:g} is not positive")
    return math.sqrt(s2)


def sigmas(fam: ExceptionalFamily, N: int) -> np.ndarray:
    return np.array([sigma(fam, k) for k in range(N + 1)])


def exceptional_table(fam: ExceptionalFamily, N: int, x, derivs: int = 0) -> np.ndarray:
    """Values of d^j/dx^j P_k^[1](x) for k = 0..N, j = 0..derivs.

    Built from the recurrence for p_k and its derivatives; no expanded
    coefficients are involved.
    """
    x = np.asarray(x)
    p = orthonormal_table(N, fam.params, x, derivs=derivs + 1)
    bd = [fam.b.deriv(j)(x) for j in range(derivs + 1)]
    cd = [fam.bw.deriv(j)(x) for j in range(derivs + 1)]
    out = np.zeros((derivs + 1, N + 1) + x.shape, dtype=p.dtype)
    for j in range(derivs + 1):
        for i in range(j + 1):
            c = math.comb(j, i)
            out[j] += c * (bd[i] * p[j - i + 1] - cd[i] * p[j - i])
    return out


def exceptional_eval(fam: ExceptionalFamily, n: int, x):
    return exceptional_table(fam, n, x)[0, n]


def orthonormal_exceptional_table(fam: ExceptionalFamily, N: int, x, derivs: int = 0) -> np.ndarray:
    tab = exceptional_table(fam, N, x, derivs)
    shape = (1, N + 1) + (1,) * np.ndim(x)
    return tab / sigmas(fam, N).reshape(shape)


def orthonormal_exceptional_eval(fam: ExceptionalFamily, n: int, x):
    return exceptional_eval(fam, n, x) / sigma(fam, n)


def exceptional_polynomial(fam: ExceptionalFamily, n: int) -> Polynomial:
    """P_n^[1] expanded in the monomial basis. Only sensible for small n."""
    if n > 50:
        raise ValueError("monomial expansion is ill-conditioned beyond n = 50")
    Pn = jacobi_poly(n, fam.alpha, fam.beta) / jacobi_norm(n, fam.params)
    return fam.b * Pn.deriv() - fam.bw * Pn


def partner_coefficients(fam: ExceptionalFamily) -> PartnerCoefficients:
    """q_hat, r_hat of the partner operator p y'' + q_hat y' + r_hat y."""
    al, be = fam.alpha, fam.beta
    p = P_COEF
    q = Polynomial([be - al, -(al + be + 2)])
    b, bw = fam.b, fam.bw
    db, ddb = b.deriv(), b.deriv(2)
    q_hat = Rational(q * b + p.deriv() * b - 2 * db * p, b)
    # r_hat over the common denominator b^2 (r = 0 for the Jacobi operator)
    num = (
        q.deriv() * b * b
        + bw * b * p.deriv()
        - db * b * (q + p.deriv())
        + (2 * db * db - ddb * b) * p
        + 2 * (bw.deriv() * b - bw * db) * p
    )
    return PartnerCoefficients(q_hat=q_hat, r_hat=Rational(num, b * b))


def eigenvalue(fam: ExceptionalFamily, n: int) -> float:
    """lambda_n = -n(n+alpha+beta+1), the eigenvalue of T on p_n."""
    return -n * (n + fam.alpha + fam.beta + 1)


def partner_ode_residual(fam: ExceptionalFamily, n: int, x) -> np.ndarray:
    """Scaled residual of p y'' + q_hat y' + r_hat y - lambda_n y for y = P_n^[1]."""
    x = np.asarray(x, dtype=float)
    pc = partner_coefficients(fam)
    y = exceptional_table(fam, n, x, derivs=2)[:, n]
    terms = [(1 - x**2) * y[2], pc.q_hat(x) * y[1], pc.r_hat(x) * y[0], eigenvalue(fam, n) * y[0]]
    scale = np.maximum(1.0, np.max(np.abs(terms), axis=0))
    return np.abs(terms[0] + terms[1] + terms[2] - terms[3]) / scale


def intertwining_check(fam: ExceptionalFamily, n: int, x=None) -> float:
    """Max scaled residual of p y' + (pw + q - p b'/b) y = (lambda_n - lambda~) b p_n."""
    if x is None:
        x = np.linspace(-0.95, 0.95, 20)
    x = np.asarray(x, dtype=float)
    al, be = fam.alpha, fam.beta
    p = 1 - x**2
    q = be - al - (al + be + 2) * x
    b = fam.b(x)
    y = exceptional_table(fam, n, x, derivs=1)[:, n]
    pn = orthonormal_table(n, fam.params, x)[0, n]
    lhs1 = p * y[1]
    lhs2 = (p * fam.bw(x) / b + q - p * fam.b.deriv()(x) / b) * y[0]
    rhs = (eigenvalue(fam, n) - fam.lambda_tilde) * b * pn
    scale = np.maximum(1.0, np.maximum(np.abs(lhs1), np.maximum(np.abs(lhs2), np.abs(rhs))))
    return float(np.max(np.abs(lhs1 + lhs2 - rhs) / scale))
