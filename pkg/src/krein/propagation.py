"""Exact solutions of ``phi = 1 - lam * int (x - y) phi dm`` for atomic strings.

Between atoms every solution is affine; at an atom ``(x_i, w_i)`` the right
derivative jumps by ``-lam * w_i * phi(x_i)``.  Propagation is therefore exact up
to floating point, with no step-size error.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import gammainc

from .errors import DivergentTail, DomainError
from .strings import StieltjesString, mass_integral_M

__all__ = [
    "SolutionState",
    "propagate",
    "phi",
    "phi_values",
    "phi_series",
    "f_principal",
    "f_right_derivative",
    "green",
    "psi",
]


@dataclass(frozen=True)
class SolutionState:
    x: float
    value: float
    right_derivative: float
    lam: float


def propagate(s: StieltjesString, lam, start_value: float = 1.0, start_slope: float = 0.0):
    """Values and right derivatives of a solution at every atom.

    ``lam`` may be a scalar or a 1-d array; the result has shape
    ``lam.shape + (n_atoms,)``.  The solution enters the first atom with the
    given value and slope (``1, 0`` gives ``phi_lam``).
    """
    lam = np.asarray(lam, dtype=float)
    x, w = s.positions, s.masses
    n = x.size
    vals = np.empty(lam.shape + (n,))
    ders = np.empty(lam.shape + (n,))
    v = np.full(lam.shape, float(start_value))
    d = np.full(lam.shape, float(start_slope))
    for i in range(n):
        if i:
            v = v + d * (x[i] - x[i - 1])
        d = d - lam * w[i] * v
        vals[..., i] = v
        ders[..., i] = d
    return vals, ders


def _check_x(s: StieltjesString, x: np.ndarray):
    if np.any(x > s.l):
        raise DomainError(f"x must not exceed l = {s.l}")


def _interp(s: StieltjesString, vals, ders, x):
    """Evaluate an affine-between-atoms solution from its atom data."""
    pos = s.positions
    k = np.searchsorted(pos, x, side="right") - 1
    kk = np.maximum(k, 0)
    before = k < 0
    value = np.where(before, 1.0, vals[..., kk] + ders[..., kk] * (x - pos[kk]))
    deriv = np.where(before, 0.0, ders[..., kk])
    return value, deriv


def phi_values(s: StieltjesString, lam: float, x):
    """Vectorised ``(phi_lam(x), phi_lam^+(x))`` for an array of points ``x <= l``."""
    x = np.asarray(x, dtype=float)
    _check_x(s, x)
    vals, ders = propagate(s, float(lam))
    return _interp(s, vals, ders, x)


def phi(s: StieltjesString, lam: float, x: float) -> SolutionState:
    """``phi_lam(x)`` and its right derivative."""
    value, deriv = phi_values(s, lam, float(x))
    return SolutionState(float(x), float(value), float(deriv), float(lam))


def phi_series(s: StieltjesString, lam: float, x: float, n_terms: int):
    """Partial sum of ``sum_k (-lam)^k phi_k(x)`` and a bound on the remainder.

    ``phi_0 = 1`` and ``phi_k(x) = sum_{x_i <= x} w_i (x - x_i) phi_{k-1}(x_i)``.
    The bound is ``sum_{k >= n_terms} |lam|^k M(x)^k / k!``.
    """
    if n_terms < 1:
        raise ValueError("n_terms must be >= 1")
    x = float(x)
    if x > s.l:
        raise DomainError(f"x must not exceed l = {s.l}")
    pos, w = s.positions, s.masses
    left = pos <= x
    p, wl = pos[left], w[left]
    # T[j, i] = w_i (x_j - x_i) for i < j; maps phi_{k-1} at atoms to phi_k at atoms
    T = np.tril(wl[None, :] * (p[:, None] - p[None, :]), k=-1)
    to_x = wl * (x - p)
    at_atoms = np.ones(p.size)
    total = 1.0
    coeff = 1.0
    for k in range(1, n_terms):
        coeff *= -lam
        total += coeff * float(to_x @ at_atoms)
        at_atoms = T @ at_atoms
    z = abs(lam) * float(mass_integral_M(s, x))
    tail = math.exp(z) * float(gammainc(n_terms, z)) if z > 0 else 0.0
    return total, tail


def _tail_data(s: StieltjesString, lam: float):
    """Atom data plus ``R_j = phi_j * int_{x_j}^l phi^{-2}`` in overflow-safe form."""
    if not lam < 0:
        raise DivergentTail("the principal solution exists only for lam < 0")
    vals, ders = propagate(s, lam)
    x = s.positions
    n = x.size
    R = np.empty(n)
    if math.isinf(s.l):
        R[-1] = 1.0 / ders[-1]
        phi_l = math.inf
    else:
        phi_l = vals[-1] + ders[-1] * (s.l - x[-1])
        R[-1] = (s.l - x[-1]) / phi_l
    for j in range(n - 2, -1, -1):
        R[j] = (x[j + 1] - x[j]) / vals[j + 1] + (vals[j] / vals[j + 1]) * R[j + 1]
    return vals, ders, R, phi_l


def _f_from_tail(s, vals, ders, R, phi_l, x):
    pos = s.positions
    n = pos.size
    k = np.searchsorted(pos, x, side="right") - 1
    value, _ = _interp(s, vals, ders, x)
    nxt = np.minimum(k + 1, n - 1)
    inner = (pos[nxt] - x) / vals[nxt] + (value / vals[nxt]) * R[nxt]
    if math.isinf(s.l):
        last = 1.0 / ders[-1] * np.ones_like(x)
    else:
        last = (s.l - x) / phi_l
    return np.where(k >= n - 1, last, inner)


def f_principal(s: StieltjesString, lam: float, x):
    """Principal solution ``f_lam(x) = phi_lam(x) int_x^l phi_lam(y)^{-2} dy``.

    Each piece of the tail integral is done in closed form,
    ``int_{y0}^{y1} phi^{-2} = (y1 - y0) / (phi(y0) phi(y1))`` for affine ``phi``.
    Requires ``lam < 0`` and ``x < l``.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x >= s.l):
        raise DomainError("f_lam is evaluated only at x < l")
    out = _f_from_tail(s, *_tail_data(s, float(lam)), x)
    return out if out.ndim else float(out)


def f_right_derivative(s: StieltjesString, lam: float, x):
    """``f_lam^+(x) = phi^+(x) f(x) / phi(x) - 1 / phi(x)``."""
    x = np.asarray(x, dtype=float)
    if np.any(x >= s.l):
        raise DomainError("f_lam is evaluated only at x < l")
    vals, ders, R, phi_l = _tail_data(s, float(lam))
    f = _f_from_tail(s, vals, ders, R, phi_l, x)
    value, deriv = _interp(s, vals, ders, x)
    out = deriv * f / value - 1.0 / value
    return out if out.ndim else float(out)


def green(s: StieltjesString, lam: float, x, y):
    """Green function ``g_lam(x, y) = f_lam(x v y) phi_lam(x ^ y)``; broadcasts."""
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    hi, lo = np.maximum(x, y), np.minimum(x, y)
    if np.any(hi >= s.l):
        raise DomainError("the Green function is evaluated only at x, y < l")
    vals, ders, R, phi_l = _tail_data(s, float(lam))
    out = _f_from_tail(s, vals, ders, R, phi_l, hi) * _interp(s, vals, ders, lo)[0]
    return out if out.ndim else float(out)


def psi(s: StieltjesString, lam: float, x):
    """Solution with ``psi(0) = 0, psi'(0) = 1`` for strings supported on ``[0, inf)``."""
    if s.l_minus < 0:
        raise DomainError("psi is defined only for strings supported on [0, inf)")
    x = np.asarray(x, dtype=float)
    _check_x(s, x)
    if np.any(x < 0):
        raise DomainError("psi is evaluated on x >= 0")
    v0 = s.l_minus  # psi(x) = x until the first atom
    vals, ders = propagate(s, float(lam), start_value=v0, start_slope=1.0)
    pos = s.positions
    k = np.searchsorted(pos, x, side="right") - 1
    kk = np.maximum(k, 0)
    out = np.where(k < 0, x, vals[kk] + ders[kk] * (x - pos[kk]))
    return out if out.ndim else float(out)
