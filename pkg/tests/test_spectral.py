import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from krein.errors import DomainError, InvalidSpectrum, TruncationRequired
from krein.propagation import green, phi
from krein.spectral import (SpectralMeasure, char_roots, dirichlet_eigs, green_spectral, heat_trace, herglotz_h,
                            parseval_defect, reconstruct_from_spectrum, spectral_measure, transition_density)
from krein.strings import StieltjesString, mass_integral_M, shift

from conftest import atomic_strings


def test_single_atom_eigenvalue(one_atom):
    es = dirichlet_eigs(one_atom, 1.0)
    assert es.eigenvalues.tolist() == [0.5]
    # root of phi_lam(1) = 1 - 2 lam
    assert char_roots(one_atom, 1.0)[0] == pytest.approx(0.5, rel=1e-15)


def test_single_atom_measure(one_atom):
    sig = spectral_measure(one_atom)
    assert sig.xi[0] == pytest.approx(0.5)
    assert sig.weights[0] == pytest.approx(0.5)


@given(atomic_strings(max_atoms=12))
def test_trace_identity(s):
    mu = dirichlet_eigs(s, s.l).eigenvalues
    assert (1 / mu).sum() == pytest.approx(mass_integral_M(s, s.l), rel=1e-10)


@given(atomic_strings(max_atoms=12), st.sampled_from([-0.1, -1.0, -10.0]))
def test_product_formula(s, lam):
    mu = dirichlet_eigs(s, s.l).eigenvalues
    assert phi(s, lam, s.l).value == pytest.approx(np.prod(1 - lam / mu), rel=1e-8)


@given(atomic_strings(max_atoms=10))
def test_methods_agree(s):
    a = dirichlet_eigs(s, s.l, "kernel").eigenvalues
    b = dirichlet_eigs(s, s.l, "tridiagonal").eigenvalues
    c = char_roots(s, s.l)
    assert np.allclose(a, c, rtol=1e-9) and np.allclose(b, c, rtol=1e-9)


def test_roots_alternate(three_atoms):
    roots = char_roots(three_atoms, three_atoms.l)
    mids = np.sqrt(roots[:-1] * roots[1:])
    signs = np.sign([phi(three_atoms, m, three_atoms.l).value for m in np.concatenate(([0.0], mids))])
    assert np.all(signs[:-1] * signs[1:] < 0)


@given(atomic_strings(max_atoms=12), st.integers(0, 2 ** 32 - 1))
def test_parseval(s, seed):
    f = np.random.default_rng(seed).normal(size=s.n_atoms)
    assert parseval_defect(s, f, spectral_measure(s)) <= 1e-9


@given(atomic_strings(max_atoms=12), st.floats(-20, 20))
def test_shift_invariance(s, c):
    a, b = spectral_measure(s), spectral_measure(shift(s, c))
    assert np.allclose(a.xi, b.xi, rtol=1e-10, atol=0)
    assert np.max(np.abs(a.weights - b.weights)) <= 1e-10 * a.weights.sum()


def test_heat_trace_examples(one_atom):
    assert heat_trace(SpectralMeasure.alpha(2.0), 1.0) == pytest.approx(8.0, rel=1e-14)
    assert heat_trace(spectral_measure(one_atom), 2.0) == pytest.approx(0.5 * math.exp(-1), rel=1e-14)
    sig = spectral_measure(StieltjesString([-3.0, -1.0, -0.2], [0.5, 1.5, 0.7], 0.5))
    assert np.all(np.diff(heat_trace(sig, np.geomspace(1e-2, 1e2, 30))) < 0)


def test_transition_density(three_atoms):
    s, sig = three_atoms, spectral_measure(three_atoms)
    x, y = -2.0, -0.5
    assert transition_density(s, sig, 0.7, x, y) == pytest.approx(transition_density(s, sig, 0.7, y, x), rel=1e-14)
    # semigroup on the atoms
    t1, t2 = 0.4, 0.9
    mid = sum(transition_density(s, sig, t1, x, xi) * transition_density(s, sig, t2, xi, y) * wi
              for xi, wi in zip(s.positions, s.masses))
    assert mid == pytest.approx(transition_density(s, sig, t1 + t2, x, y), rel=1e-8)


def test_transition_density_diagonal_bound(three_atoms):
    s, sig = three_atoms, spectral_measure(three_atoms)
    for x in (-3.5, -1.0, 0.0):
        M = mass_integral_M(s, x)
        for t in (2 * M + 0.5, 2 * M + 3.0):
            assert transition_density(s, sig, t, x, x) <= heat_trace(sig, t - 2 * M) * (1 + 1e-12)


def test_green_expansion_different_gaps(three_atoms):
    s, sig = three_atoms, spectral_measure(three_atoms)
    for lam in (-0.1, -1.0, -5.0):
        for x, y in [(-4.0, -2.0), (-2.0, 0.3), (-0.5, 0.1)]:
            assert green_spectral(s, sig, lam, x, y) == pytest.approx(green(s, lam, x, y), rel=1e-8)


def test_green_expansion_same_gap_misses_kink(three_atoms):
    """Every expansion term is affine between atoms, so the expansion cannot follow the kink at x = y."""
    s, sig = three_atoms, spectral_measure(three_atoms)
    x, y = -2.5, -1.5
    assert abs(green_spectral(s, sig, -1.0, x, y) - green(s, -1.0, x, y)) > 1e-6


def test_herglotz():
    assert herglotz_h(SpectralMeasure([], []), -1.0, 2.5).value == 2.5
    s = StieltjesString([0.5, 1.0, 2.0], [1.0, 0.3, 2.0], 3.0)
    sig = spectral_measure(s)
    lams = -np.geomspace(10, 1e-3, 12)
    vals = [herglotz_h(sig, lam).value for lam in lams]
    assert np.all(np.diff(vals) > 0)


def test_herglotz_against_x_integral():
    from scipy.integrate import quad
    from krein.propagation import phi_values

    s = StieltjesString([0.5, 1.0, 2.0], [1.0, 0.3, 2.0], 3.0)
    sig = spectral_measure(s)
    pts = [0.0, 0.5, 1.0, 2.0, 3.0]
    for lam in (-0.01, -0.7, -10.0):
        exact = sum(quad(lambda x: float(phi_values(s, lam, x)[0]) ** -2, a, b, epsrel=1e-13)[0]
                    for a, b in zip(pts[:-1], pts[1:]))
        # the atom-free stretch [0, l_-] contributes the constant term
        assert herglotz_h(sig, lam, s.l_minus).value == pytest.approx(exact, rel=1e-8)


def test_round_trip_single_atom(one_atom):
    rec = reconstruct_from_spectrum(spectral_measure(one_atom), 1.0)
    assert rec.masses[0] == pytest.approx(2.0, rel=1e-10)
    assert rec.positions[0] == pytest.approx(0.0, abs=1e-10)


@settings(max_examples=30)
@given(atomic_strings(max_atoms=5))
def test_round_trip_random(s):
    sig = spectral_measure(s)
    rec = reconstruct_from_spectrum(sig, 0.0)
    off = float(np.mean(rec.positions - s.positions))
    assert np.allclose(rec.positions - off, s.positions, atol=1e-6, rtol=0)
    assert np.allclose(rec.masses, s.masses, rtol=1e-6)


def test_shifted_copies_reconstruct_to_same(three_atoms):
    a, b = spectral_measure(three_atoms), spectral_measure(shift(three_atoms, 4.0))
    ra, rb = reconstruct_from_spectrum(a, 0.0), reconstruct_from_spectrum(b, 0.0)
    assert np.allclose(ra.positions, rb.positions, atol=1e-9)
    assert np.allclose(ra.masses, rb.masses, rtol=1e-9)


def test_errors():
    with pytest.raises(TruncationRequired):
        spectral_measure(StieltjesString([0.0], [1.0]))
    with pytest.raises(InvalidSpectrum):
        SpectralMeasure([1.0, 0.5], [1.0, 1.0])
    with pytest.raises(DomainError):
        heat_trace(SpectralMeasure([1.0], [1.0]), 0.0)
