import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from krein.errors import InvalidString, NormalizationImpossible
from krein.strings import (MassFunction, StieltjesString, compactified_distance, mass_integral_M, mass_m,
                           normalize_to_Ec, nu_scaling, scale, shift)

from conftest import atomic_strings


def test_mass_m_single_atom():
    s = StieltjesString([0.0], [2.0])
    assert mass_m(s, -1.0) == 0.0
    assert mass_m(s, 0.0) == 2.0
    assert mass_m(StieltjesString([0.0], [2.0], 1.0), 1.5) == math.inf


def test_mass_integral_examples():
    assert mass_integral_M(StieltjesString([0.0], [2.0]), 1.0) == 2.0
    two = StieltjesString([-1.0, 0.0], [1.0, 3.0])
    # 1 * 3 + 3 * 2 from the two atoms
    assert mass_integral_M(two, 2.0) == pytest.approx(9.0, abs=1e-14)
    assert mass_integral_M(two, -5.0) == 0.0


@given(atomic_strings(), st.floats(-20.0, 20.0))
def test_mass_integral_matches_direct_sum(s, x):
    x = min(x, s.l)
    direct = sum(w * (x - p) for p, w in zip(s.positions, s.masses) if p <= x)
    assert mass_integral_M(s, x) == pytest.approx(direct, rel=1e-12, abs=1e-12)


def test_invalid_strings():
    with pytest.raises(InvalidString):
        StieltjesString([], [])
    with pytest.raises(InvalidString):
        StieltjesString([0.0, 0.0], [1.0, 1.0])
    with pytest.raises(InvalidString):
        StieltjesString([0.0], [-1.0])
    with pytest.raises(InvalidString):
        StieltjesString([1.0], [1.0], 0.5)


def test_normalize_single_atom():
    out = normalize_to_Ec(StieltjesString([0.0], [2.0]), 2.0)
    assert out.positions[0] == pytest.approx(-1.0)
    assert mass_integral_M(out, 0.0) == pytest.approx(2.0)


def test_normalize_idempotent_and_impossible():
    s = normalize_to_Ec(StieltjesString([-3.0, -1.0], [1.0, 2.0], 4.0), 1.5)
    assert normalize_to_Ec(s, 1.5).allclose(s)
    with pytest.raises(NormalizationImpossible):
        normalize_to_Ec(StieltjesString([0.0], [0.5], 1.0), 1.0)


@given(atomic_strings(), st.floats(0.01, 50.0))
def test_normalize_hits_level(s, c):
    if MassFunction(s).at_l < c:
        return
    out = normalize_to_Ec(s, c)
    assert mass_integral_M(out, 0.0) == pytest.approx(c, rel=1e-10)


@given(atomic_strings(), st.floats(-10, 10))
def test_shift_round_trip(s, a):
    assert shift(shift(s, a), -a).allclose(s, atol=1e-12)


@given(atomic_strings(), st.floats(0.1, 10), st.floats(0.1, 10), st.floats(0.1, 10), st.floats(0.1, 10))
def test_scale_group_action(s, a, b, a2, b2):
    left = scale(scale(s, a, b), a2, b2)
    right = scale(s, a * a2, b * b2)
    assert np.allclose(left.positions, right.positions, rtol=1e-14, atol=1e-14)
    assert np.allclose(left.masses, right.masses, rtol=1e-14)
    assert scale(s, 1.0, 1.0).allclose(s, atol=0)


@given(atomic_strings(), st.floats(0.05, 20), st.floats(0.05, 20))
def test_nu_scaling_mass_integral(s, nu, b):
    scaled = nu_scaling(s, nu, b)
    xs = np.linspace(scaled.l_minus - 1, scaled.l, 50)[:-1]  # nu * (l / nu) can round past l
    assert np.allclose(mass_integral_M(scaled, xs), b * mass_integral_M(s, nu * xs), rtol=1e-12, atol=1e-12)


def test_scale_postcondition():
    s = StieltjesString([-2.0, -0.5], [1.0, 3.0], 1.0)
    a, b = 2.0, 3.0
    xs = np.array([-1.1, -0.5, -0.2, 0.1])
    assert np.allclose(mass_m(scale(s, a, b), xs), a * b * mass_m(s, a * xs))


def test_compactified_distance():
    s = StieltjesString([0.0], [1.0])
    assert compactified_distance(s, s) == 0.0
    a, b = StieltjesString([0.0], [1.0], 1.0), StieltjesString([0.0], [1.0], 2.0)
    assert compactified_distance(a, b, np.linspace(-3, 0.99, 40)) == 0.0
    d = compactified_distance(s, StieltjesString([0.0], [3.0]), [1.0])
    assert d == pytest.approx(2 / math.pi * (math.atan(3) - math.atan(1)), abs=1e-15)
    assert d == pytest.approx(0.2952, abs=1e-4)
