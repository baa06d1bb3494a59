import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from continuants import spectral as sp
from continuants.errors import NotApplicableError, OutOfRangeError

LAMBDA_6 = 6.981727230722064
MU = 518.4727500327034


@pytest.mark.parametrize("s, coeffs, case", [
    (6, (1, -6, -8, 8), 4),
    (4, (1, -4, -4), 5),
    (7, (1, -8), 7),
    (2, (1, -2), 6),
    (8, (1, -8, -8, -8), 1),
    (10, (1, -12, 12, -8), 2),
    (12, (1, -14, 12, 16), 3),
    (3, (1, -4), 7),
])
def test_polynomial_cases(s, coeffs, case):
    p = sp.polynomial_Ps(s)
    assert p.coefficients == coeffs and p.case_id == case


def test_polynomial_text():
    assert str(sp.polynomial_Ps(6)) == "λ^3 - 6λ^2 - 8λ + 8"
    assert sp.polynomial_Ps(4)(Fraction(0)) == -4


def test_polynomial_range():
    with pytest.raises(OutOfRangeError):
        sp.polynomial_Ps(1)


@pytest.mark.parametrize("s, entries", [
    (4, ((1, 2), (1, 1))),
    (6, ((2, 1, 1), (2, 0, 1), (1, 1, 1))),
    (8, ((1, 2, 2), (1, 1, 3), (1, 1, 2))),
    (10, ((3, 1, 2), (3, 1, 1), (2, 1, 2))),
    (12, ((2, 2, 3), (1, 2, 4), (1, 2, 3))),
    (14, ((4, 2, 2), (4, 1, 2), (3, 2, 2))),
    (16, ((2, 3, 4), (2, 2, 5), (2, 2, 4))),
])
def test_case_matrix_goldens(s, entries):
    assert sp.case_matrix(s).entries == entries


def test_case_matrix_odd_rejected():
    with pytest.raises((NotApplicableError, OutOfRangeError)):
        sp.case_matrix(7)


@pytest.mark.parametrize("s", [4, 6, 10] + list(range(8, 101, 2)))
def test_char_poly_check(s):
    assert sp.char_poly_check(s)


def test_charpoly_against_numpy():
    for s in range(4, 41, 2):
        m = 2 * np.array(sp.case_matrix(s).entries, dtype=float)
        assert np.allclose(np.poly(m), sp.charpoly(sp.mat_scale(2, sp.case_matrix(s).entries)))


def test_largest_root_examples():
    assert sp.largest_root(sp.polynomial_Ps(2)).lam == 2.0
    assert sp.largest_root(sp.polynomial_Ps(7)).lam == 8.0
    assert abs(sp.largest_root(sp.polynomial_Ps(4)).lam - (2 + 2 * math.sqrt(2))) < 1e-12
    r = sp.largest_root(sp.polynomial_Ps(6))
    assert 6.9 < r.lam < 7.0 and abs(r.lam - LAMBDA_6) < 1e-12
    assert r.hi - r.lo <= sp.DEFAULT_TOL and r.lo <= r.mid <= r.hi
    p = sp.polynomial_Ps(6)
    assert p(Fraction(69, 10)) < 0 < p(Fraction(7))


def test_root_against_mpmath():
    for s in (6, 8, 10, 12, 30, 52):
        roots = mpmath.polyroots(sp.polynomial_Ps(s).coefficients, maxsteps=200, extraprec=200)
        best = max(float(mpmath.re(x)) for x in roots if abs(mpmath.im(x)) < 1e-20)
        assert abs(best - sp.largest_root(sp.polynomial_Ps(s)).lam) < 1e-12


def test_sturm_counts():
    coeffs = (1, -6, 11, -6)  # roots 1, 2, 3
    assert sp.count_roots_above(coeffs, Fraction(0)) == 3
    assert sp.count_roots_above(coeffs, Fraction(5, 2)) == 1
    assert sp.largest_real_root(coeffs).lam == pytest.approx(3.0, abs=1e-12)
    assert sp.cauchy_bound(coeffs) > 3


def test_matrix_B():
    A = np.array(sp.SIX_MATRIX, dtype=np.int64)
    want = np.linalg.matrix_power(A, 5) + np.array([[0, 1, -1]] * 3)
    assert sp.matrix_B() == tuple(tuple(int(x) for x in row) for row in want)
    assert sp.matrix_B() == ((293, 134, 170), (228, 104, 132), (209, 96, 121))


def test_mu():
    m = sp.mu()
    assert abs(m.lam - MU) < 1e-9
    eig = max(v.real for v in np.linalg.eigvals(np.array(sp.matrix_B(), dtype=float)))
    assert abs(eig - m.lam) < 1e-8
    assert m.lam > LAMBDA_6**5 / 32


def test_gap():
    g = sp.gap_check()
    assert g.exceeds("0.0000756")
    assert g.below("0.01")
    assert abs(g.value - 0.00019782529525559642) < 1e-15
    assert g.lam.lam == sp.largest_root(sp.polynomial_Ps(6)).lam
    with mpmath.workdps(50):
        lam = mpmath.findroot(lambda x: x**3 - 6 * x**2 - 8 * x + 8, 6.98)
        assert abs(float(2 * mpmath.root(MU, 5) - lam) - g.value) < 1e-9


def test_eigen_lambda_consistency():
    for s in range(4, 101, 2):
        assert abs(sp.eigen_lambda(s) - sp.largest_root(sp.polynomial_Ps(s)).lam) < 1e-9


def test_remark1_examples():
    r = sp.remark1_expansion(6)
    assert r.case_id == 4 and r.interval == (-1, 0) and r.within and r.in_bracket
    r = sp.remark1_expansion(12)
    assert r.case_id == 3 and r.within and -7 < r.theta < -6
    r = sp.remark1_expansion(10)
    assert r.case_id == 2 and 10.97 < r.lam < 10.98 and r.in_bracket
    # the s^-4 term of the case (2) root vanishes: lambda = s+1-3/s^2+3/s^3-21/s^5+...
    assert not r.within and r.theta < 0
    with pytest.raises(OutOfRangeError):
        sp.remark1_expansion(7)


def test_case2_theta_decays_like_minus_21_over_s():
    for s in (202, 402, 802):
        assert sp.remark1_expansion(s).theta * s == pytest.approx(-21, rel=0.05)


def test_remark6_residual():
    # the printed six-term expansion leaves a residual growing like 45 s once scaled by s^7
    for s in (204, 404):
        assert sp.remark1_expansion(s).remark6_residual / s == pytest.approx(45, rel=0.05)


def test_find_s0():
    s0, rows = sp.find_s0(200)
    assert s0 == 12
    assert all(r.smallest for r in rows) and rows[0].s == 12
    with pytest.raises(OutOfRangeError):
        sp.find_s0(10)


@settings(max_examples=30, deadline=None)
@given(st.integers(3, 400).map(lambda k: 2 * k))
def test_root_bracket(s):
    r = sp.largest_root(sp.polynomial_Ps(s))
    assert s < r.lo and r.hi < s + 1
    assert abs(r.residual) <= 1e-9 * s**3


@settings(max_examples=20, deadline=None)
@given(st.integers(2, 60).map(lambda k: 2 * k))
def test_matrix_power_exact(s):
    A = sp.case_matrix(s).entries
    assert sp.mat_pow(A, 7) == sp.mat_mul(sp.mat_pow(A, 3), sp.mat_pow(A, 4))
