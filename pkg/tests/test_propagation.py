import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from krein.errors import DivergentTail, DomainError
from krein.propagation import f_principal, green, phi, phi_series, phi_values, psi
from krein.strings import StieltjesString, mass_integral_M

from conftest import atomic_strings


def test_phi_single_atom():
    st_ = phi(StieltjesString([0.0], [1.0]), -1.0, 2.0)
    assert st_.value == pytest.approx(3.0)
    assert st_.right_derivative == pytest.approx(1.0)


def test_phi_two_atoms_by_hand():
    s = StieltjesString([0.0, 1.0], [1.0, 1.0])
    # phi(1) = 2, slope jumps to 1 + 2 = 3, so phi(2) = 5
    st_ = phi(s, -1.0, 2.0)
    assert st_.value == pytest.approx(5.0)
    assert st_.right_derivative == pytest.approx(3.0)
    total, tail = phi_series(s, -1.0, 2.0, 12)
    assert abs(total - 5.0) <= tail + 1e-12


@given(atomic_strings(), st.floats(-5, 5))
def test_lambda_zero_is_constant(s, x):
    x = min(x, s.l)
    st_ = phi(s, 0.0, x)
    assert st_.value == 1.0 and st_.right_derivative == 0.0


@given(atomic_strings(max_atoms=6), st.floats(-3.0, 3.0), st.floats(-12, 2))
def test_first_series_term_is_M(s, lam, x):
    x = min(x, s.l)
    total1, _ = phi_series(s, -1.0, x, 2)
    assert total1 - 1.0 == pytest.approx(mass_integral_M(s, x), rel=1e-12, abs=1e-12)
    total, tail = phi_series(s, lam, x, 40)
    v = phi(s, lam, x).value
    assert abs(total - v) <= tail + 1e-9 * max(1.0, abs(v))
    assert abs(v) <= math.exp(abs(lam) * mass_integral_M(s, x)) * (1 + 1e-12)


def test_f_principal_closed_form():
    s = StieltjesString([0.0], [1.0], 1.0)
    assert f_principal(s, -1.0, 0.5) == pytest.approx(0.25, rel=1e-12)


def test_f_left_of_support_is_affine():
    s = StieltjesString([0.0, 0.7], [1.0, 0.4], 2.0)
    lam = -0.8
    f0 = f_principal(s, lam, s.l_minus)
    xs = np.array([-3.0, -1.0, -0.25])
    # phi = 1 left of the atoms, so f is affine there
    vals = f_principal(s, lam, xs)
    slopes = np.diff(vals) / np.diff(xs)
    assert np.allclose(slopes, slopes[0], rtol=1e-10)
    assert vals[-1] > f0


def test_f_degenerates_to_interval_length():
    # vanishing mass: f tends to l - x
    s = StieltjesString([0.0], [1e-9], 3.0)
    assert f_principal(s, -1e-6, -1.0) == pytest.approx(4.0, rel=1e-6)


def test_f_needs_negative_lambda():
    with pytest.raises(DivergentTail):
        f_principal(StieltjesString([0.0], [1.0], 1.0), 0.5, 0.0)


@given(atomic_strings(), st.floats(-50, -0.01), st.floats(0, 1), st.floats(0, 1))
def test_green_symmetric(s, lam, u, v):
    lo = s.l_minus - 2.0
    x, y = lo + u * (s.l - lo) * 0.999, lo + v * (s.l - lo) * 0.999
    assert green(s, lam, x, y) == pytest.approx(green(s, lam, y, x), rel=1e-14)


def test_green_single_atom_closed_form():
    s = StieltjesString([0.0], [2.0], 1.0)
    lam = -1.0
    # phi = 1 + 2 (x)_+ ; f(y) = phi(y) int_y^1 phi^-2
    phi_ = lambda z: 1 + 2 * max(z, 0.0)
    f = lambda y: phi_(y) * (1 / (2 * phi_(y)) - 1 / 6) if y >= 0 else 1 / 3 + (-y)
    for x, y in [(-1.0, 0.5), (0.2, 0.7), (-0.5, -0.2)]:
        lo, hi = min(x, y), max(x, y)
        assert green(s, lam, x, y) == pytest.approx(f(hi) * phi_(lo), rel=1e-12)


def test_green_domain():
    with pytest.raises(DomainError):
        green(StieltjesString([0.0], [1.0], 1.0), -1.0, 0.0, 1.0)


def test_psi_starts_linearly():
    s = StieltjesString([1.0, 2.0], [1.0, 1.0])
    assert psi(s, -1.0, 0.5) == pytest.approx(0.5)
    with pytest.raises(DomainError):
        psi(StieltjesString([-1.0], [1.0]), -1.0, 0.5)


def test_phi_values_vectorised():
    s = StieltjesString([0.0, 1.0], [1.0, 1.0])
    vals, ders = phi_values(s, -1.0, np.array([-1.0, 0.5, 2.0]))
    assert np.allclose(vals, [1.0, 1.5, 5.0])
    assert np.allclose(ders, [0.0, 1.0, 3.0])
