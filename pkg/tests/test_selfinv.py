import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from exjacobi.opmatrix import limit_coeffs
from exjacobi.selfinv import (
    build_self_inversive,
    circle_roots,
    circle_zero_test,
    dominant_middle_coefficient,
    roots_inside_disk,
    self_inversive_from_U,
    circle_zero_interval,
    sweep,
    symbol_image,
    toeplitz_matrix,
    toeplitz_section_spectrum,
)
from exjacobi.spectra import sym_eigenvalues


def test_worked_family_coefficients(F1):
    p = build_self_inversive(F1, 0.5)
    np.testing.assert_allclose(p.coeffs, [1 / 16, 3 / 4, -0.5, 3 / 4, 1 / 16])
    assert p.L == 2


def test_coefficients_palindromic(F4):
    c = build_self_inversive(F4, 0.3).coeffs
    np.testing.assert_allclose(c, c[::-1])


def test_roots_come_in_inverse_pairs(F4):
    r = circle_roots(build_self_inversive(F4, 10.0))
    inv = 1 / np.conj(r)
    for z in inv:
        assert np.min(np.abs(r - z)) < 1e-8


def test_circle_zero_interval_worked(F1):
    lo, hi = circle_zero_interval(F1)
    assert lo == pytest.approx(-11 / 8) and hi == pytest.approx(13 / 8)


def test_interval_membership_examples(F1):
    assert circle_zero_test(build_self_inversive(F1, 0.0))
    assert not circle_zero_test(build_self_inversive(F1, 2.0))
    assert roots_inside_disk(build_self_inversive(F1, 2.0)) == 2
    assert not circle_zero_test(build_self_inversive(F1, -2.0))
    # endpoint: double root on the circle
    assert circle_zero_test(build_self_inversive(F1, 13 / 8), tol=1e-6)


def test_quick_test_counterexample_to_partial_sum():
    # |a_L| > sum over k < L of |a_k| holds, yet a root lies on the circle
    p = self_inversive_from_U([0.5], 0.75)
    c = p.coeffs
    assert abs(c[1]) > abs(c[0])
    assert circle_zero_test(p)
    assert not dominant_middle_coefficient(p)


@settings(max_examples=40)
@given(st.lists(st.floats(-2, 2, allow_nan=False), min_size=1, max_size=4), st.floats(-12, 12, allow_nan=False))
def test_quick_test_is_sufficient(U, lam):
    U = np.asarray(U)
    if abs(U[-1]) < 1e-3:
        U[-1] = 1e-3
    p = self_inversive_from_U(U, lam)
    if dominant_middle_coefficient(p):
        assert not circle_zero_test(p)
        assert roots_inside_disk(p) == p.L


@settings(max_examples=40)
@given(st.lists(st.floats(-2, 2, allow_nan=False), min_size=1, max_size=4), st.floats(0, np.pi))
def test_symbol_values_give_circle_zero(U, theta):
    U = np.asarray(U)
    if abs(U[-1]) < 1e-3:
        U[-1] = 1e-3
    k = np.arange(1, len(U) + 1)
    lam = 2 * np.sum(U * np.cos(k * theta))
    p = self_inversive_from_U(U, lam)
    r = circle_roots(p)
    assert np.min(np.abs(r - np.exp(1j * theta))) < 1e-4


@pytest.mark.parametrize("name", ["F1", "F2", "F4", "trivial"])
def test_sweep_consistent(name, request):
    rows = sweep(request.getfixturevalue(name), n_lambda=60, seed=3)
    assert len(rows) == 60
    assert all(r.consistent for r in rows)
    assert any(r.inside for r in rows) and any(not r.inside for r in rows)


def test_sweep_deterministic(F1):
    assert sweep(F1, 10, seed=7) == sweep(F1, 10, seed=7)


def test_toeplitz_matrix_layout():
    T = toeplitz_matrix([1.0, 2.0], 4).dense()
    want = np.array([[0, 1, 2, 0], [1, 0, 1, 2], [2, 1, 0, 1], [0, 2, 1, 0]], dtype=float)
    np.testing.assert_allclose(T, want)


def test_toeplitz_tridiagonal_closed_form():
    n = 30
    ev = sym_eigenvalues(toeplitz_matrix([0.5], n), n)
    j = np.arange(1, n + 1)
    np.testing.assert_allclose(ev, np.sort(np.cos(j * np.pi / (n + 1))), atol=1e-13)


@pytest.mark.parametrize("name", ["F1", "F4"])
def test_toeplitz_spectrum_in_symbol_range(name, request):
    fam = request.getfixturevalue(name)
    ev = toeplitz_section_spectrum(fam, 120)
    lo, hi = circle_zero_interval(fam)
    assert ev.min() >= lo - 1e-10 and ev.max() <= hi + 1e-10
    img = symbol_image(fam, 2000)
    assert img[0] == pytest.approx(lo, abs=1e-6) and img[-1] == pytest.approx(hi, abs=1e-6)


def test_toeplitz_size_guard(F1):
    with pytest.raises(ValueError):
        toeplitz_section_spectrum(F1, 4)


def test_limit_coeff_consistency(F4):
    U = limit_coeffs(F4)
    lo, hi = circle_zero_interval(F4)
    assert hi == pytest.approx(2 * np.sum(U[1:]))
