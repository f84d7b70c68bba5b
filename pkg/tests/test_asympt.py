import math

import numpy as np
import pytest
import scipy.special

from exjacobi.asympt import (
    exceptional_scaled,
    exceptional_zero_gap,
    exceptional_zeros,
    fit_discrepancy_constant,
    hausdorff,
    mehler_heine,
    ratio_asymptotics,
    ratio_limit,
    regular_zero_discrepancy,
    regular_zero_measure,
    zero_split,
)
from exjacobi.darboux import FamilyError, exceptional_table, family_from_spec
from exjacobi.polycore import bessel_j_small


def test_scaled_matches_direct(F1):
    for z in [1.7, -2.0 + 0.5j, 0.3]:
        P, dP, Pm1, ls = exceptional_scaled(F1, 12, z)
        t = exceptional_table(F1, 12, np.array([z]), derivs=1)
        s = math.exp(ls)
        assert P * s == pytest.approx(complex(t[0, 12, 0]), rel=1e-10)
        assert dP * s == pytest.approx(complex(t[1, 12, 0]), rel=1e-10)
        assert Pm1 * s == pytest.approx(complex(t[0, 11, 0]), rel=1e-10)


def test_scaled_no_overflow(F1):
    P, dP, Pm1, ls = exceptional_scaled(F1, 3000, 5.0)
    assert np.isfinite(P) and np.isfinite(Pm1) and ls > 700


@pytest.mark.parametrize("name", ["F1", "F2", "F4"])
def test_zero_split_counts(name, request):
    fam = request.getfixturevalue(name)
    for n in (5, 30, 120):
        s = zero_split(fam, n)
        assert s.clean
        assert len(s.regular) + len(s.exceptional) == fam.degree(n)
        assert len(s.exceptional) == fam.b_tilde.degree


def test_zeros_are_zeros(F1):
    z = exceptional_zeros(F1, 40)
    P = np.array([exceptional_scaled(F1, 40, zi)[:2] for zi in z])
    assert np.max(np.abs(P[:, 0] / P[:, 1])) <= 1e-10


def test_worked_family_exceptional_zero(F1):
    s = zero_split(F1, 40)
    assert s.exceptional.shape == (1,)
    assert s.exceptional[0].real < -3 and abs(s.exceptional[0].imag) == 0


def test_exceptional_gap_decreases(F1):
    g = [exceptional_zero_gap(F1, n) for n in (20, 80, 320)]
    assert g[0] > g[1] > g[2]
    # rate roughly 1/n
    assert 2.0 < g[1] / g[2] < 6.0


def test_exceptional_gap_complex_roots(F4):
    g = [exceptional_zero_gap(F4, n) for n in (40, 160)]
    assert g[1] < g[0] < 0.5


def test_hausdorff():
    assert hausdorff([0, 1], [0, 1.5]) == pytest.approx(0.5)
    assert hausdorff([], []) == 0.0
    assert hausdorff([1], []) == math.inf


def test_ratio_limit_branch():
    for z in [2.0, -2.0, 0.5j, 1 + 1j, -3 - 0.1j]:
        r = ratio_limit(z)
        assert abs(r) < 1
        assert (r + 1 / r) / 2 == pytest.approx(z)


@pytest.mark.parametrize("name", ["F1", "F2", "F4"])
def test_ratio_converges(name, request):
    fam = request.getfixturevalue(name)
    for z in [2.0, 0.5j, -1.5 - 0.5j]:
        e = [abs(ratio_asymptotics(fam, z, n) - ratio_limit(z)) for n in (50, 200)]
        assert e[1] < e[0]
        assert e[1] < 0.02


def test_ratio_guards(F1):
    with pytest.raises(ValueError):
        ratio_asymptotics(F1, 0.5, 10)
    with pytest.raises(ValueError):
        ratio_asymptotics(F1, -3.01, 10)


def test_bessel_normalized_vs_scipy():
    for nu in (0.5, 1.0, 2.5):
        for z in (0.3, 1.0, 4.0):
            ref = scipy.special.jv(nu, z) * math.gamma(nu + 1) * (2 / z) ** nu
            assert bessel_j_small(nu, z) == pytest.approx(ref, rel=1e-9)


@pytest.mark.parametrize("name", ["F1", "F2"])
def test_mehler_heine_rate(name, request):
    fam = request.getfixturevalue(name)
    for z in (0.5, 1.0, 2.0):
        errs = []
        for n in (100, 400):
            s, lim = mehler_heine(fam, z, n)
            errs.append(abs(s - lim) / abs(lim))
        assert errs[1] < errs[0]
        # error decays like 1/n
        assert 2.5 < errs[0] / errs[1] < 6


def test_mehler_heine_worked_constant(F1):
    _, lim = mehler_heine(F1, 1e-8, 10)
    assert lim == pytest.approx(-1.0, abs=1e-12)


def test_mehler_heine_guard():
    fam = family_from_spec({"seed_type": "II", "alpha": -0.9, "beta": 2.5, "m": 1})
    with pytest.raises(FamilyError):
        mehler_heine(fam, 1.0, 10)


def test_regular_zeros_measure(F1):
    m = regular_zero_measure(F1, 400)
    assert m.n == 400
    assert m.moment(lambda x: x**2) == pytest.approx(0.5, abs=5e-3)


def test_discrepancy_fit_and_bound(F1):
    C = fit_discrepancy_constant(F1, 50)
    assert C > 0
    d, bound = regular_zero_discrepancy(F1, 200, C)
    assert d <= bound
