"""Forward and inverse spectral maps for atomic strings.

Dirichlet eigenvalues at ``a`` come from the kernel ``a - max(x, y)`` restricted
to the atoms left of ``a``; for long strings the equivalent three-term (Jacobi)
form is used instead.  The inverse map runs the Stieltjes procedure on the
discrete measure and reads masses and gaps off the resulting Jacobi matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh, eigh_tridiagonal
from scipy.optimize import brentq

from .errors import (
    DomainError,
    EmptySpectrum,
    IllConditioned,
    InvalidSpectrum,
    RootBracketFailure,
    TruncationRequired,
)
from .families import AlphaFamily
from .propagation import propagate, _interp
from .strings import StieltjesString

__all__ = [
    "EigenSystem",
    "SpectralMeasure",
    "HerglotzValue",
    "dirichlet_eigs",
    "char_roots",
    "spectral_measure",
    "fourier_transform",
    "parseval_defect",
    "heat_trace",
    "transition_density",
    "green_spectral",
    "green_expansion_terms",
    "herglotz_h",
    "reconstruct_from_spectrum",
    "jacobi_matrix",
]

POSITIVITY_RTOL = 1e-12


@dataclass(frozen=True)
class EigenSystem:
    """``modes[k, i]`` is ``phi_{mu_k}`` at the ``i``-th atom left of ``a``."""

    a: float
    eigenvalues: np.ndarray
    eigennorms: np.ndarray
    modes: np.ndarray | None = None


@dataclass(frozen=True, eq=False)
class SpectralMeasure:
    """Discrete measure ``sum_k weights[k] * delta_{xi[k]}`` on ``[0, inf)``.

    ``closed_form`` tags the exact ``alpha`` family, e.g. ``{"family": "alpha",
    "alpha": 2.0}``; heat traces and cumulative values then use closed forms.
    ``boundary`` records the Dirichlet point the measure was computed at.
    """

    xi: np.ndarray = field(default_factory=lambda: np.empty(0))
    weights: np.ndarray = field(default_factory=lambda: np.empty(0))
    closed_form: dict | None = None
    boundary: float | None = None

    def __post_init__(self):
        xi = np.array(self.xi, dtype=float).reshape(-1)
        w = np.array(self.weights, dtype=float).reshape(-1)
        if xi.shape != w.shape:
            raise InvalidSpectrum("xi and weights differ in length")
        if np.any(~np.isfinite(xi)) or np.any(xi < 0):
            raise InvalidSpectrum("atoms must be finite and non-negative")
        if np.any(np.diff(xi) <= 0):
            raise InvalidSpectrum("atoms must be strictly increasing")
        if np.any(~np.isfinite(w)) or np.any(w <= 0):
            raise InvalidSpectrum("weights must be positive and finite")
        if self.closed_form is not None and self.closed_form.get("family") != "alpha":
            raise InvalidSpectrum(f"unknown closed form {self.closed_form!r}")
        xi.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "xi", xi)
        object.__setattr__(self, "weights", w)

    @classmethod
    def alpha(cls, alpha: float) -> "SpectralMeasure":
        return cls(closed_form={"family": "alpha", "alpha": float(alpha)})

    @property
    def n_atoms(self) -> int:
        return int(self.xi.size)

    @property
    def total_mass(self) -> float:
        if self.closed_form:
            return math.inf
        return float(self.weights.sum())

    def cumulative(self, xi):
        """``sigma([0, xi])``."""
        xi = np.asarray(xi, dtype=float)
        if self.closed_form:
            out = AlphaFamily(self.closed_form["alpha"]).sigma_cumulative(xi)
        else:
            cum = np.concatenate(([0.0], np.cumsum(self.weights)))
            out = cum[np.searchsorted(self.xi, xi, side="right")]
        return out if np.ndim(out) else float(out)

    def truncate(self, k: int) -> "SpectralMeasure":
        """The leading ``k`` atoms."""
        return SpectralMeasure(self.xi[:k], self.weights[:k], None, self.boundary)

    def transform(self, a: float, b: float) -> "SpectralMeasure":
        """Measure of ``scale(s, a, b)``: atoms ``xi / b`` and weights ``w / (a b)``."""
        return SpectralMeasure(self.xi / b, self.weights / (a * b), None,
                               None if self.boundary is None else self.boundary / a)


@dataclass(frozen=True)
class HerglotzValue:
    lam: float
    value: float


def _left_of(s: StieltjesString, a: float):
    if a > s.l:
        raise DomainError(f"boundary a = {a} exceeds l = {s.l}")
    keep = s.positions < a
    if not keep.any():
        raise EmptySpectrum(f"no atom lies left of a = {a}")
    return s.positions[keep], s.masses[keep]


def jacobi_matrix(x, w, a):
    """Diagonal and off-diagonal of ``W^{-1/2} K W^{-1/2}`` for atoms left of ``a``."""
    h = np.diff(np.append(x, a))
    inv = 1.0 / h
    k_diag = inv.copy()
    k_diag[1:] += inv[:-1]
    diag = k_diag / w
    off = -inv[:-1] / np.sqrt(w[:-1] * w[1:])
    return diag, off


def dirichlet_eigs(s: StieltjesString, a: float, method: str = "kernel") -> EigenSystem:
    """Dirichlet eigenvalues of ``-L`` on ``(-inf, a]`` and their eigennorms.

    ``method="kernel"`` diagonalises ``sqrt(w_i w_j) (a - max(x_i, x_j))``.  ``method="tridiagonal"``
    uses the sparse Jacobi form; it is the one to use for thousands of atoms.
    Either way the norms are read off the first eigenvector components.
    """
    x, w = _left_of(s, float(a))
    if method == "kernel":
        A = np.sqrt(np.outer(w, w)) * (a - np.maximum.outer(x, x))
        theta, vecs = eigh(A)
        theta, vecs = theta[::-1], vecs[:, ::-1]
        mu = 1.0 / theta
    elif method == "tridiagonal":
        diag, off = jacobi_matrix(x, w, float(a))
        mu, vecs = eigh_tridiagonal(diag, off)
    else:
        raise ValueError(f"unknown method {method!r}")
    # eigenvectors are sqrt(w) phi up to scale, and phi = 1 at the first atom;
    # LAPACK deflation can zero a first component, i.e. a weight below roundoff
    with np.errstate(divide="ignore", invalid="ignore"):
        norms = w[0] / vecs[0] ** 2
        modes = (vecs / np.sqrt(w)[:, None] * (np.sqrt(w[0]) / vecs[0])).T
    modes[vecs[0] == 0] = np.nan
    return EigenSystem(float(a), mu, norms, modes)


def _char_value(lam: float, s: StieltjesString, a: float) -> float:
    v, d = propagate(s, lam)
    return float(v[-1] + d[-1] * (a - s.positions[-1]))


def char_roots(s: StieltjesString, a: float) -> np.ndarray:
    """Zeros of ``lam -> phi_lam(a)`` by bracketed root finding.

    Brackets sit at geometric midpoints between the kernel eigenvalues and the
    sign of ``phi_lam(a)`` must alternate across them.
    """
    x, w = _left_of(s, float(a))
    sub = StieltjesString(x, w)
    guess = dirichlet_eigs(sub, a).eigenvalues
    edges = np.concatenate(([0.0], np.sqrt(guess[:-1] * guess[1:]), [2.0 * guess[-1]]))
    vals = [_char_value(e, sub, a) for e in edges]
    roots = []
    for k in range(guess.size):
        lo, hi = edges[k], edges[k + 1]
        if not vals[k] * vals[k + 1] < 0:
            raise RootBracketFailure(f"no sign change around eigenvalue {k}")
        roots.append(brentq(_char_value, lo, hi, args=(sub, a), xtol=1e-300, rtol=4 * np.finfo(float).eps))
    return np.array(roots)


def spectral_measure(s: StieltjesString, boundary: float | None = None, method: str = "kernel") -> SpectralMeasure:
    """Spectral measure with the Dirichlet condition at ``l`` (or at ``boundary``).

    Strings with ``l = inf`` have no finite spectral measure; pass a truncation
    point.  The weights are ``1 / ||phi_xi||^2`` in ``L^2(dm)``.
    """
    if boundary is None:
        if math.isinf(s.l):
            raise TruncationRequired("l = inf; supply a Dirichlet boundary")
        boundary = s.l
    es = dirichlet_eigs(s, float(boundary), method)
    return SpectralMeasure(es.eigenvalues, 1.0 / es.eigennorms, None, float(boundary))


def _eigen_modes(s: StieltjesString, sigma: SpectralMeasure):
    """Eigen-system of ``s`` at ``sigma.boundary`` when ``sigma`` is its Dirichlet measure there.

    Forward propagation of ``phi`` at an eigenvalue amplifies the eigenvalue's
    rounding error enormously for modes living near the left end; the
    eigenvectors carry the same values stably.
    """
    if sigma is None or sigma.boundary is None or sigma.closed_form or sigma.n_atoms == 0:
        return None
    try:
        x, _ = _left_of(s, sigma.boundary)
    except (DomainError, EmptySpectrum):
        return None
    method = "kernel" if x.size <= 400 else "tridiagonal"
    es = dirichlet_eigs(s, sigma.boundary, method)
    if es.eigenvalues.size != sigma.n_atoms or not np.allclose(es.eigenvalues, sigma.xi, rtol=1e-9, atol=0):
        return None
    if not np.all(np.isfinite(es.modes)):
        return None
    return x, es


def _modes_at(x_atoms, a, modes, x):
    """Piecewise-affine interpolation of ``modes`` (K, n): 1 left of the first atom, 0 at ``a``."""
    x = np.asarray(x, dtype=float)
    if np.any(x > a):
        raise DomainError("eigenfunctions are evaluated left of the boundary")
    nodes = np.append(x_atoms, a)
    V = np.hstack((modes, np.zeros((modes.shape[0], 1))))
    j = np.clip(np.searchsorted(nodes, x, side="right") - 1, 0, nodes.size - 2)
    t = np.clip((x - nodes[j]) / (nodes[j + 1] - nodes[j]), 0.0, 1.0)
    out = V[:, j] * (1 - t) + V[:, j + 1] * t
    return np.where(x < nodes[0], 1.0, out)


def _phi_at(s: StieltjesString, xi, x, sigma: SpectralMeasure | None = None):
    """``phi_xi(x)`` for arrays ``xi`` (K,) and ``x`` (P,), shape (K, P)."""
    found = _eigen_modes(s, sigma)
    if found is not None:
        x_atoms, es = found
        return _modes_at(x_atoms, es.a, es.modes, np.asarray(x, dtype=float).ravel())
    vals, ders = propagate(s, np.asarray(xi, dtype=float))
    value, _ = _interp(s, vals, ders, np.asarray(x, dtype=float))
    return np.broadcast_to(value, (vals.shape[0], np.size(x)))


def fourier_transform(s: StieltjesString, f_values, xi) -> np.ndarray:
    """``f_hat(xi) = sum_i f(x_i) phi_xi(x_i) w_i`` for ``f`` given at the atoms."""
    vals, _ = propagate(s, np.asarray(xi, dtype=float))
    return vals @ (np.asarray(f_values, dtype=float) * s.masses)


def parseval_defect(s: StieltjesString, f_values, sigma: SpectralMeasure) -> float:
    """Relative gap between ``sum |f|^2 w`` and ``sum |f_hat(xi_k)|^2 sigma_k``."""
    f = np.asarray(f_values, dtype=float)
    lhs = float((f ** 2 * s.masses).sum())
    found = _eigen_modes(s, sigma)
    if found is not None and found[0].size == s.n_atoms:
        f_hat = found[1].modes @ (f * s.masses)
    else:
        f_hat = fourier_transform(s, f, sigma.xi)
    rhs = float((f_hat ** 2 * sigma.weights).sum())
    return abs(lhs - rhs) / lhs


def heat_trace(sigma: SpectralMeasure, t):
    """``p(t) = int e^{-t xi} sigma(d xi)``; closed form for the tagged alpha family."""
    t = np.asarray(t, dtype=float)
    if np.any(t <= 0):
        raise DomainError("t must be positive")
    if sigma.closed_form:
        out = AlphaFamily(sigma.closed_form["alpha"]).p(t)
    else:
        out = np.exp(-np.multiply.outer(t, sigma.xi)) @ sigma.weights
    return out if np.ndim(out) else float(out)


def transition_density(s: StieltjesString, sigma: SpectralMeasure, t: float, x, y):
    """``p(t, x, y) = sum_k e^{-t xi_k} phi_{xi_k}(x) phi_{xi_k}(y) sigma_k``."""
    if t <= 0:
        raise DomainError("t must be positive")
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    px = _phi_at(s, sigma.xi, x.ravel(), sigma)
    py = _phi_at(s, sigma.xi, y.ravel(), sigma)
    c = np.exp(-t * sigma.xi) * sigma.weights
    out = (c[:, None] * px * py).sum(axis=0).reshape(x.shape)
    return out if out.ndim else float(out)


def green_expansion_terms(s: StieltjesString, sigma: SpectralMeasure, lam: float, x, y) -> np.ndarray:
    """Terms ``phi_k(x) phi_k(y) sigma_k / (xi_k - lam)``, shape (K,) + broadcast shape."""
    x, y = np.broadcast_arrays(np.asarray(x, dtype=float), np.asarray(y, dtype=float))
    px = _phi_at(s, sigma.xi, x.ravel(), sigma)
    py = _phi_at(s, sigma.xi, y.ravel(), sigma)
    c = sigma.weights / (sigma.xi - lam)
    return (c[:, None] * px * py).reshape((-1,) + x.shape)


def green_spectral(s: StieltjesString, sigma: SpectralMeasure, lam: float, x, y):
    """Eigen-expansion ``sum_k phi_k(x) phi_k(y) sigma_k / (xi_k - lam)``."""
    out = green_expansion_terms(s, sigma, lam, x, y).sum(axis=0)
    return out if out.ndim else float(out)


def herglotz_h(sigma: SpectralMeasure, lam: float, a: float = 0.0) -> HerglotzValue:
    """``h(lam) = a + sum_k sigma_k / (xi_k - lam)`` for ``lam < 0``."""
    if not lam < 0:
        raise DomainError("h is evaluated at lam < 0")
    if sigma.closed_form:
        raise DomainError("h diverges for the alpha family; use a discretisation")
    return HerglotzValue(float(lam), float(a + (sigma.weights / (sigma.xi - lam)).sum()))


def _lanczos(xi: np.ndarray, start: np.ndarray):
    """Jacobi coefficients of the measure ``sum start_k^2 delta_{xi_k}``.

    Lanczos on ``diag(xi)`` with full reorthogonalisation.
    """
    n = xi.size
    Q = np.zeros((n, n))
    q = start / np.linalg.norm(start)
    alpha = np.zeros(n)
    beta = np.zeros(max(n - 1, 0))
    for j in range(n):
        Q[:, j] = q
        v = xi * q
        alpha[j] = q @ v
        v -= Q[:, : j + 1] @ (Q[:, : j + 1].T @ v)
        v -= Q[:, : j + 1] @ (Q[:, : j + 1].T @ v)
        if j == n - 1:
            break
        b = np.linalg.norm(v)
        if not b > POSITIVITY_RTOL * max(abs(alpha[j]), 1.0):
            raise IllConditioned(f"Lanczos breakdown at step {j}")
        beta[j] = b
        q = v / b
    return alpha, beta


def reconstruct_from_spectrum(sigma: SpectralMeasure, a: float = 0.0) -> StieltjesString:
    """The atomic string with ``l = a`` whose Dirichlet spectral measure is ``sigma``.

    The Jacobi matrix of ``sigma`` is ``W^{-1/2} K W^{-1/2}`` with ``K`` the
    stiffness matrix of the gaps, so masses and gaps follow one at a time:
    ``w_1 = 1 / sigma([0, inf))``, ``h_1 = 1 / (J_11 w_1)``, then
    ``w_{i+1} = 1 / (h_i^2 b_i^2 w_i)`` and ``h_{i+1} = 1 / (J_{i+1,i+1} w_{i+1} - 1/h_i)``.
    """
    if sigma.closed_form or sigma.n_atoms == 0:
        raise InvalidSpectrum("reconstruction needs a non-empty discrete measure")
    if sigma.xi[0] <= 0:
        raise InvalidSpectrum("Dirichlet spectra are strictly positive")
    alpha, beta = _lanczos(sigma.xi, np.sqrt(sigma.weights))
    n = sigma.n_atoms
    w = np.empty(n)
    h = np.empty(n)
    w[0] = 1.0 / sigma.weights.sum()
    h[0] = 1.0 / (alpha[0] * w[0])
    for i in range(n - 1):
        w[i + 1] = 1.0 / (h[i] ** 2 * beta[i] ** 2 * w[i])
        denom = alpha[i + 1] * w[i + 1] - 1.0 / h[i]
        if not denom > POSITIVITY_RTOL * alpha[i + 1] * w[i + 1]:
            raise IllConditioned(f"gap {i + 2} lost positivity")
        h[i + 1] = 1.0 / denom
    if np.any(h <= 0) or np.any(~np.isfinite(h)) or np.any(~np.isfinite(w)):
        raise IllConditioned("reconstruction produced non-positive gaps")
    # x_n = a - h_n, x_i = x_{i+1} - h_i
    x = a - np.cumsum(h[::-1])[::-1]
    return StieltjesString(x, w, float(a))
