import dataclasses

import numpy as np
import pytest

from exjacobi.asympt import zero_split
from exjacobi.darboux import (
    FamilyError,
    SeedChoice,
    build_family,
    closed_form_lambda,
    exceptional_eval,
    exceptional_polynomial,
    exceptional_table,
    family_from_spec,
    intertwining_check,
    orthonormal_exceptional_eval,
    orthonormal_exceptional_table,
    partner_coefficients,
    partner_ode_residual,
    riccati_residual,
    sigma,
    weight_eval,
)
from exjacobi.jacobi import JacobiParams, gauss_jacobi_rule, orthonormal_table
from exjacobi.opmatrix import exceptional_gram
from exjacobi.polycore import Polynomial, poly_roots


def test_worked_family_polynomials(F1):
    np.testing.assert_allclose(F1.b.c, [1.5, -1.0, -0.5], atol=1e-14)  # (1-x)(3+x)/2
    np.testing.assert_allclose(F1.b_tilde.c, [1.5, 0.5], atol=1e-14)
    np.testing.assert_allclose(F1.bw.c, [5.0, 1.0], atol=1e-14)
    assert (F1.eps1, F1.eps2) == (-1, 1)
    assert F1.lambda_tilde == pytest.approx(4.0, abs=1e-10)
    assert (F1.L, F1.codim) == (2, 1)


def test_lambda_matches_closed_form_for_all_types(F1, F2, F3, F4):
    for fam in (F1, F2, F3, F4):
        assert fam.lambda_tilde == pytest.approx(closed_form_lambda(fam.params, fam.seed), abs=1e-8)


def test_log_derivative_is_bw_over_b(F1):
    x = np.array([-0.5, 0.0, 0.5])
    np.testing.assert_allclose(F1.bw(x) / F1.b(x), 2 * (5 + x) / ((1 - x) * (3 + x)), rtol=1e-14)


def test_riccati_residual(F1, F2, F3, F4):
    x = np.cos(np.pi * (np.arange(50) + 0.5) / 50) * 0.98
    for fam in (F1, F2, F3, F4):
        assert np.max(np.abs(riccati_residual(fam, x))) <= 1e-8 * (1 + abs(fam.lambda_tilde))


def test_weight_examples(F1, trivial):
    assert weight_eval(F1, 0.0) == pytest.approx(4 / 9)
    xs = 1 - np.array([1e-2, 1e-3])
    ratios = weight_eval(F1, xs) / (1 - xs) ** 2
    assert ratios[1] == pytest.approx(ratios[0], rel=1e-2)
    x = np.linspace(-0.9, 0.9, 5)
    np.testing.assert_allclose(weight_eval(trivial, x), (1 + x), rtol=1e-14)
    with pytest.raises(ValueError):
        weight_eval(F1, 1.0)


def test_exceptional_values(F1):
    x = np.array([-0.4, 0.2, 1.0])
    np.testing.assert_allclose(exceptional_eval(F1, 0, x), -(5 + x) / 2, rtol=1e-14)
    assert exceptional_eval(F1, 0, 1.0) == pytest.approx(-3.0)
    assert orthonormal_exceptional_eval(F1, 0, 1.0) == pytest.approx(-1.5)


def test_table_matches_expanded_polynomial(F1, F4):
    x = np.linspace(-1, 1, 9)
    for fam in (F1, F4):
        for n in (0, 3, 12):
            np.testing.assert_allclose(exceptional_eval(fam, n, x), exceptional_polynomial(fam, n)(x),
                                       rtol=1e-10, atol=1e-10)


def test_derivative_table_against_finite_differences(F1):
    x = np.linspace(-0.9, 0.9, 7)
    h = 1e-5
    t = exceptional_table(F1, 8, x, derivs=2)[:, 8]
    f = lambda s: exceptional_eval(F1, 8, s)  # noqa: E731
    np.testing.assert_allclose(t[1], (f(x + h) - f(x - h)) / (2 * h), rtol=1e-6, atol=1e-5)
    np.testing.assert_allclose(t[2], (f(x + h) - 2 * f(x) + f(x - h)) / h**2, rtol=1e-3, atol=1e-2)


def test_sigma_examples(F1):
    assert sigma(F1, 0) == pytest.approx(2.0)
    assert sigma(F1, 1) == pytest.approx(3.0)
    assert sigma(F1, 7) == pytest.approx(9.0)


@pytest.mark.parametrize("name", ["F1", "F2", "F4"])
def test_sigma_formula_against_quadrature(name, request):
    fam = request.getfixturevalue(name)
    G = exceptional_gram(fam, 40)
    # G is the Gram matrix of P^ = P/sigma, so sigma * sqrt(diag) is the quadrature norm
    quad = np.sqrt(np.diag(G)) * np.array([sigma(fam, k) for k in range(41)])
    np.testing.assert_allclose(quad, [sigma(fam, k) for k in range(41)], rtol=1e-8)


@pytest.mark.parametrize("name", ["F1", "F2", "F3", "F4"])
def test_orthonormality(name, request):
    fam = request.getfixturevalue(name)
    G = exceptional_gram(fam, 25)
    assert np.max(np.abs(G - np.eye(26))) <= 1e-9


def test_sigma_hypothesis_violation(F1):
    # finite weight moments already imply the hypothesis, so alter a family by hand
    fam = dataclasses.replace(F1, params=JacobiParams(-0.2, 0.0))
    with pytest.raises(FamilyError, match="alpha\\+eps1/2"):
        sigma(fam, 0)


def test_partner_ode(F1, F2, F4):
    x = np.linspace(-0.95, 0.95, 20)
    for fam in (F1, F2, F4):
        for n in range(21):
            assert np.max(partner_ode_residual(fam, n, x)) <= 1e-7


def test_partner_ode_with_finite_difference_derivatives(F1):
    x = np.linspace(-0.9, 0.9, 20)
    pc = partner_coefficients(F1)
    h = 1e-4
    for n in (3, 10):
        f = lambda s: exceptional_eval(F1, n, s)  # noqa: E731
        y, y1, y2 = f(x), (f(x + h) - f(x - h)) / (2 * h), (f(x + h) - 2 * f(x) + f(x - h)) / h**2
        lam = -n * (n + F1.alpha + F1.beta + 1)
        res = (1 - x**2) * y2 + pc.q_hat(x) * y1 + pc.r_hat(x) * y - lam * y
        assert np.max(np.abs(res)) <= 1e-4 * max(1.0, np.max(np.abs(lam * y)))


def test_partner_coefficients_bounded(F1):
    pc = partner_coefficients(F1)
    grid = np.linspace(-0.999, 0.999, 4001)
    assert np.all(np.isfinite(pc.q_hat(grid))) and np.max(np.abs(pc.q_hat(grid))) < 1e3
    near = np.array([1 - 1e-4, -1 + 1e-4])
    assert np.max(np.abs(pc.r_hat(near))) < 1e3


def test_intertwining(F1, F2, F4):
    assert intertwining_check(F1, 0) <= 1e-7
    assert intertwining_check(F1, 5) <= 1e-7
    for fam in (F2, F4):
        for n in range(15):
            assert intertwining_check(fam, n) <= 1e-7


def test_degree_bookkeeping(F1, F4):
    for fam in (F1, F4):
        degrees = {exceptional_polynomial(fam, n).degree for n in range(30)}
        missing = set(range(max(degrees) + 1)) - degrees
        assert len(missing) == fam.codim


def test_regular_zeros_simple(F1):
    for n in range(2, 61, 6):
        r = zero_split(F1, n).regular
        assert len(r) == n and np.min(np.diff(r)) > 1e-9


def test_low_degree_zeros_agree_with_monomial_roots(F1):
    r = np.sort(poly_roots(exceptional_polynomial(F1, 8)).real())
    np.testing.assert_allclose(r[r > -1], zero_split(F1, 8).regular, atol=1e-9)


def test_endpoint_values_nonzero(F1, F2):
    for fam in (F1, F2):
        vals = exceptional_table(fam, 100, np.array([-1.0, 1.0]))[0]
        assert np.all(np.abs(vals) > 0)


@pytest.mark.parametrize("name", ["F1", "F2", "F4"])
def test_sup_norm_growth(name, request):
    fam = request.getfixturevalue(name)
    x = np.linspace(-1, 1, 2002)[1:-1]
    V = orthonormal_exceptional_table(fam, 60, x)[0]
    sup = np.max(np.abs(V * np.sqrt(weight_eval(fam, x)) * (1 - x**2) ** 0.25), axis=1)
    k = np.arange(1, 61)
    ratio = sup[1:] / k ** (max(-fam.eps1, -fam.eps2) - 1 + 0.1)
    assert np.max(ratio[10:]) <= np.max(ratio[:10])


def test_seed_with_interior_zero_rejected():
    with pytest.raises(FamilyError, match="seed has zero"):
        build_family(JacobiParams(0.5, 0.0), SeedChoice("I", 2))


def test_extra_factor_checked():
    with pytest.raises(FamilyError, match="extra factor"):
        build_family(JacobiParams(3, 0), SeedChoice("I", 1, Polynomial([0.5, 1.0])))
    fam = build_family(JacobiParams(3, 0), SeedChoice("I", 1, Polynomial([2.0, 1.0])))
    assert fam.codim == 2
    G = exceptional_gram(fam, 10)
    assert np.max(np.abs(G - np.eye(11))) <= 1e-9


def test_invalid_seed_type():
    with pytest.raises(FamilyError):
        SeedChoice("IV", 1)


def test_family_from_spec(F1):
    fam = family_from_spec({"seed_type": "I", "alpha": 3, "beta": 0, "m": 1, "s_coeffs": [1]})
    assert fam.b == F1.b
    with pytest.raises(FamilyError):
        family_from_spec({"seed_type": "I", "alpha": 3})
    with pytest.raises(FamilyError):
        family_from_spec({"seed_type": "I", "alpha": -2, "beta": 0, "m": 1})


def test_without_sign_normalization():
    fam = build_family(JacobiParams(3, 0), SeedChoice("I", 1), sign_normalize=False)
    assert fam.b_tilde(0.0) < 0


def test_orthonormality_by_independent_rule(F1):
    # same check with a fixed oversized rule instead of the adaptive one
    rule = gauss_jacobi_rule(200, F1.weight_params)
    V = orthonormal_exceptional_table(F1, 25, rule.nodes)[0]
    w = rule.weights / F1.b_tilde(rule.nodes) ** 2
    G = (V * w) @ V.T
    assert np.max(np.abs(G - np.eye(26))) <= 1e-9
    # and the classical part is what it should be
    assert orthonormal_table(0, F1.params, 0.0)[0, 0] == pytest.approx(0.5)
