"""Power-law strings, regular variation, and ratio-ladder checks of the asymptotics.

Every asymptotic statement is tested the same way: evaluate the ratio that
should tend to a constant along a declared ladder, report the deviations, and
pass when the last rung is inside the tolerance and the trend is right.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, optimize

from .errors import DomainError, PreconditionError
from .families import AlphaFamily
from .reports import Report
from .scales import partial_laplace
from .spectral import SpectralMeasure, heat_trace, spectral_measure
from .strings import MassFunction, StieltjesString, mass_integral_M, nu_scaling

__all__ = [
    "AlphaFamily",
    "RegVarying",
    "SubexponentialWeight",
    "discretize_alpha_string",
    "closed_form_sigma",
    "closed_form_p",
    "check_scaling_covariance",
    "verify_heat_trace_asymptotics",
    "verify_small_spectrum_constant",
    "verify_inverse_mass_quotient",
    "verify_mass_asymptotics",
    "uniform_scaled_heat_bound",
    "check_growth_condition",
]


@dataclass(frozen=True)
class RegVarying:
    """``phi(u) = c u^rho (-log u)^q`` near ``u = 0``.

    ``t^{-1} phi(1/t) = t^{-(rho+1)} l(t)`` with ``l(t) = c (log t)^q``, whose
    representation ``l(t) = c(t) exp(int_a^t eps(u)/u du)`` has
    ``eps(t) = q / log t`` and constant ``c(t)``.
    """

    rho: float
    c: float = 1.0
    q: float = 0.0

    def __post_init__(self):
        if not self.c > 0:
            raise DomainError("c must be positive")

    def __call__(self, u):
        u = np.asarray(u, dtype=float)
        out = self.c * u ** self.rho
        if self.q:
            out = out * (-np.log(u)) ** self.q
        return out if out.ndim else float(out)

    def inverse(self, v: float) -> float:
        """``u`` with ``phi(u) = v``, for small ``v`` (``u < 1/e`` when ``q != 0``)."""
        v = float(v)
        if not self.q:
            return (v / self.c) ** (1.0 / self.rho)
        g = lambda s: math.log(self.c) + self.rho * s + self.q * math.log(-s) - math.log(v)
        return math.exp(optimize.brentq(g, -1e4, -1.0, xtol=1e-15, rtol=1e-15))

    def slowly_varying(self, t):
        t = np.asarray(t, dtype=float)
        return self.c * np.log(t) ** self.q

    def epsilon(self, t):
        t = np.asarray(t, dtype=float)
        return self.q / np.log(t)

    def epsilon_threshold(self, delta: float) -> float:
        """Smallest ``N`` (at least ``e``) with ``|eps(t)| < delta`` for ``t >= N``."""
        if not self.q:
            return math.e
        return max(math.e, math.exp(abs(self.q) / delta))


@dataclass(frozen=True)
class SubexponentialWeight:
    """``exp(-c (-log t)^p)`` on ``(0, 1]``, ``p > 1``."""

    c: float
    p: float

    def __post_init__(self):
        if not (self.c > 0 and self.p > 1):
            raise DomainError("need c > 0 and p > 1")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore"):
            out = np.where(t > 0, np.exp(-self.c * (-np.log(np.where(t > 0, t, 1.0))) ** self.p), 0.0)
        return out if out.ndim else float(out)


def discretize_alpha_string(fam: AlphaFamily, x_min: float, x_max: float, n_atoms: int,
                            placement: str = "midpoint", tail: str = "lump") -> StieltjesString:
    """Atomic approximation of ``m_alpha`` on ``[x_min, x_max]``.

    Cells are geometric in distance from the origin.  Each cell's exact mass
    ``m(right) - m(left)`` sits at its midpoint (or an end).  With
    ``tail="lump"`` one more atom of mass ``m(x_min)`` sits at
    ``x_min - M(x_min)/m(x_min)``, which reproduces ``M`` exactly from ``x_min``
    on as far as the mass left of ``x_min`` is concerned.
    """
    if n_atoms < 2:
        raise DomainError("need at least two cells")
    if fam.alpha > 1:
        if not x_min < x_max < 0:
            raise DomainError("for alpha > 1 need x_min < x_max < 0")
        edges = -np.geomspace(-x_min, -x_max, n_atoms + 1)
        l = 0.0
    else:
        if not 0 < x_min < x_max:
            raise DomainError("for alpha < 1 need 0 < x_min < x_max")
        edges = np.geomspace(x_min, x_max, n_atoms + 1)
        l = math.inf
    mvals = np.asarray(fam.m(edges), dtype=float)
    masses = np.diff(mvals)
    if placement == "midpoint":
        pos = 0.5 * (edges[:-1] + edges[1:])
    elif placement == "right":
        pos = edges[1:]
    elif placement == "left":
        pos = edges[:-1]
    else:
        raise ValueError(f"unknown placement {placement!r}")
    if tail == "lump":
        m0 = float(fam.m(x_min))
        if m0 > 0:
            pos = np.concatenate(([x_min - float(fam.M(x_min)) / m0], pos))
            masses = np.concatenate(([m0], masses))
    elif tail != "none":
        raise ValueError(f"unknown tail {tail!r}")
    return StieltjesString(pos, masses, l, f"alpha={fam.alpha:g} n={n_atoms}")


def closed_form_sigma(fam: AlphaFamily, xi):
    return fam.sigma_cumulative(xi)


def closed_form_p(fam: AlphaFamily, t):
    return fam.p(t)


def check_scaling_covariance(s: StieltjesString, nu: float, phi_inv_nu: float, t_grid,
                             boundary: float | None = None, tol: float = 1e-10) -> Report:
    """Spectral data of ``nu_scaling(s, nu, b)`` against the transformed originals.

    Atoms map as ``xi -> xi / b`` with weights divided by ``nu b``, and
    ``p_nu(t) = (nu b)^{-1} p(t / b)``.  Atom locations and heat-trace values
    are compared relatively.  Weights are compared as ``max |dw| / sum w``:
    the eigen-solve gives small weights only to absolute accuracy, and they
    can fall to 1e-20 of the total on spread-out strings.
    """
    b = float(phi_inv_nu)
    sig = spectral_measure(s, boundary)
    scaled = nu_scaling(s, nu, b)
    sig_nu = spectral_measure(scaled, None if boundary is None else boundary / nu)
    expect = sig.transform(nu, b)
    dev_xi = float(np.max(np.abs(sig_nu.xi / expect.xi - 1)))
    dev_w = float(np.max(np.abs(sig_nu.weights - expect.weights)) / expect.weights.sum())
    t = np.asarray(t_grid, dtype=float)
    p_nu = heat_trace(sig_nu, t)
    p_expect = heat_trace(sig, t / b) / (nu * b)
    dev_p = float(np.max(np.abs(p_nu - p_expect) / np.maximum(p_expect, np.finfo(float).tiny)))
    pos = scaled.positions
    xs = np.concatenate((pos, 0.5 * (pos[:-1] + pos[1:]), [pos[-1] + 1.0 / nu]))
    xs = xs[xs <= scaled.l]
    M_scaled = mass_integral_M(scaled, xs)
    M_dev = float(np.max(np.abs(M_scaled - b * mass_integral_M(s, nu * xs)) / np.maximum(M_scaled, 1e-300)))
    margins = {"sigma": tol - max(dev_xi, dev_w), "heat_trace": tol - dev_p, "mass": tol - M_dev}
    details = {"xi_dev": dev_xi, "weight_dev": dev_w, "heat_dev": dev_p, "M_dev": M_dev}
    return Report("scaling_covariance", min(margins.values()) >= 0, margins, details)


def _trend_ok(devs: Sequence[float]) -> bool:
    return all(b <= a for a, b in zip(devs[:-1], devs[1:]))


def verify_heat_trace_asymptotics(fam: AlphaFamily, k: float | None = None, x_min: float = -50.0,
                                  x_max: float = -1e-3, ladder: Sequence[int] = (250, 500, 1000, 2000),
                                  t_window: tuple = (5.0, 50.0), n_t: int = 10, tol: float = 0.1,
                                  method: str = "tridiagonal") -> Report:
    """``p(t) / p_alpha(t)`` on ``t_window`` for a refinement ladder of discretisations.

    Passes when the finest rung is within ``tol`` and the worst deviation
    shrinks monotonically along the ladder.  ``k`` (default ``alpha``) is the
    power in the finiteness precondition ``int_{-inf}^{-1} M^k dx``.
    """
    if fam.alpha <= 1:
        raise DomainError("the heat-trace ladder is set up for alpha > 1")
    k = fam.alpha if k is None else float(k)
    if not k > fam.alpha - 1:
        raise PreconditionError("need k > alpha - 1")
    t = np.geomspace(t_window[0], t_window[1], n_t)
    target = fam.p(t)
    rows, devs = [], []
    precondition = None
    for n in ladder:
        s = discretize_alpha_string(fam, x_min, x_max, n)
        if precondition is None:
            precondition = _power_mass_integral(s, k, -1.0)
        sig = spectral_measure(s, method=method)
        ratio = heat_trace(sig, t) / target
        dev = float(np.max(np.abs(ratio - 1)))
        rows.append({"n_atoms": n, "ratio_min": float(ratio.min()), "ratio_max": float(ratio.max()),
                     "max_dev": dev})
        devs.append(dev)
    margins = {"finest": tol - devs[-1], "monotone": 0.0 if _trend_ok(devs) else -1.0}
    details = {"ladder": rows, "t": t, "M_power_integral": precondition, "k": k}
    return Report("heat_trace_asymptotics", min(margins.values()) >= 0, margins, details)


def _power_mass_integral(s: StieltjesString, k: float, upper: float) -> float:
    """``int_{-inf}^{upper} M(x)^k dx``, exact piece by piece."""
    mf = MassFunction(s)
    pos = s.positions[s.positions < upper]
    if pos.size == 0:
        return 0.0
    nodes = np.append(pos, upper)
    M = mf(nodes)
    slopes = mf.slopes[: pos.size]
    return float(((M[1:] ** (k + 1) - M[:-1] ** (k + 1)) / ((k + 1) * slopes)).sum())


def verify_small_spectrum_constant(fam: AlphaFamily, xi_ladder: Sequence[float], x_min: float = -50.0,
                                   x_max: float = -1e-7, n_atoms: int = 4000, tol: float = 0.05,
                                   method: str = "tridiagonal") -> Report:
    """``sigma(xi) / xi^alpha`` against ``alpha^{2 alpha} / Gamma(1+alpha)^2`` as ``xi`` decreases."""
    s = discretize_alpha_string(fam, x_min, x_max, n_atoms)
    sig = spectral_measure(s, method=method)
    xi = np.asarray(xi_ladder, dtype=float)
    ratios = np.asarray(sig.cumulative(xi)) / xi ** fam.alpha / fam.sigma_constant
    devs = np.abs(ratios - 1)
    margins = {"last": tol - float(devs[-1])}
    details = {"xi": xi, "ratio": ratios, "constant": fam.sigma_constant, "n_atoms": n_atoms,
               "window": [x_min, x_max]}
    return Report("small_spectrum_constant", min(margins.values()) >= 0, margins, details)


def _inverse_M(obj, v):
    if isinstance(obj, AlphaFamily):
        return obj.M_inverse(v)
    return MassFunction(obj).inverse(v)


def _density_at(obj, x):
    """``m`` at ``x`` (the slope of ``M`` to the right of ``x`` for atomic strings)."""
    if isinstance(obj, AlphaFamily):
        return obj.m(x)
    mf = MassFunction(obj)
    k = np.searchsorted(obj.positions, x, side="right") - 1
    return mf.slopes[np.maximum(k, 0)]


def verify_inverse_mass_quotient(obj, rv: RegVarying, x_grid: Sequence[float], lam_ladder: Sequence[float],
                                 tol: float = 0.05) -> Report:
    """``(M^{-1}(lam x) - M^{-1}(lam)) / phi(1/lam)`` against ``alpha^alpha (1 - x^{1-alpha}) / (alpha - 1)``.

    ``alpha = rho + 1``.  Also reports the derivative quotient
    ``lam / (phi(1/lam) m(M^{-1}(lam x)))`` against ``alpha^alpha x^{-alpha}``.
    """
    alpha = rv.rho + 1.0
    if alpha <= 1:
        raise DomainError("need exponent rho > 0")
    x = np.asarray(x_grid, dtype=float)
    limit = alpha ** alpha / (alpha - 1) * (1 - x ** (-(alpha - 1)))
    dlimit = alpha ** alpha * x ** (-alpha)
    rows, devs = [], []
    for lam in lam_ladder:
        scale = rv(1.0 / lam)
        q = (_inverse_M(obj, lam * x) - _inverse_M(obj, lam)) / scale
        dq = lam / (scale * _density_at(obj, _inverse_M(obj, lam * x)))
        dev = float(np.max(np.abs(q - limit) / np.maximum(np.abs(limit), 1.0)))
        ddev = float(np.max(np.abs(dq / dlimit - 1)))
        rows.append({"lam": lam, "quotient": q, "quotient_dev": dev, "density_dev": ddev})
        devs.append(max(dev, ddev))
    margins = {"last": tol - devs[-1]}
    details = {"x": x, "limit": limit, "density_limit": dlimit, "ladder": rows}
    return Report("inverse_mass_quotient", min(margins.values()) >= 0, margins, details)


def verify_mass_asymptotics(obj, rv: RegVarying, x_ladder: Sequence[float], tol: float = 0.05) -> Report:
    """``m(x) (-x) phi^{-1}(-x) / beta^beta`` and ``M(x) (beta-1) phi^{-1}(-x) / beta^beta`` tend to 1 as ``x`` rises to 0."""
    alpha = rv.rho + 1.0
    beta = alpha / (alpha - 1)
    bb = beta ** beta
    xs = np.asarray(x_ladder, dtype=float)
    inv = np.array([rv.inverse(-x) for x in xs])
    if isinstance(obj, AlphaFamily):
        Mx = obj.M(xs)
    else:
        Mx = mass_integral_M(obj, xs)
    m_ratio = _density_at(obj, xs) * (-xs) * inv / bb
    M_ratio = Mx * (beta - 1) * inv / bb
    devs = np.maximum(np.abs(m_ratio - 1), np.abs(M_ratio - 1))
    margins = {"last": tol - float(devs[-1])}
    details = {"x": xs, "m_ratio": m_ratio, "M_ratio": M_ratio}
    return Report("mass_asymptotics", min(margins.values()) >= 0, margins, details)


def check_growth_condition(weight: Callable, k: float, t_min: float = 1e-12, growth: float = 1.5) -> float:
    """Empirical constant ``C`` in ``weight(s t) <= C t^k weight(s)`` for ``s, t`` in ``(0, 1]``.

    The sup is taken over ``t >= 10^-j`` for growing ``j``; if it keeps rising
    by more than ``growth`` per decade over the last decades, no ``C`` exists
    and :class:`PreconditionError` is raised.
    """
    s = np.geomspace(t_min, 1.0, 121)
    decades = int(round(-math.log10(t_min)))
    sups = []
    for j in range(1, decades + 1):
        t = np.geomspace(10.0 ** -j, 1.0, 16 * j + 1)
        S, T = np.meshgrid(s, t)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            r = np.asarray(weight(S * T), dtype=float) / (T ** k * np.asarray(weight(S), dtype=float))
        r = r[np.isfinite(r)]
        sups.append(float(r.max()) if r.size else 0.0)
    tail = sups[-4:]
    if all(b > growth * a for a, b in zip(tail[:-1], tail[1:])):
        raise PreconditionError(f"weight(st) <= C t^{k} weight(s) fails: sup grows without bound")
    return max(sups)


def uniform_scaled_heat_bound(sigma: SpectralMeasure, fam: AlphaFamily, rv: RegVarying, weight: Callable,
                              nu_ladder: Sequence[float] = (1.0, 0.5, 0.1, 0.01), k: float | None = None,
                              max_ratio: float = 10.0) -> Report:
    """``int_0^1 p_nu(t) weight(t) dt`` along ``nu_ladder``, with ``p_nu(t) = (nu b)^{-1} p(t / b)``.

    ``b = rv.inverse(nu)``.  The growth condition on ``weight`` is checked
    first with exponent ``k`` (the weight's own power by default), which must
    exceed ``alpha - 1``.
    """
    if k is None:
        k = getattr(weight, "alpha", None)
        if k is None:
            k = fam.alpha
    if not k > fam.alpha - 1:
        raise PreconditionError(f"need k > alpha - 1 = {fam.alpha - 1:g}, got {k:g}")
    C = check_growth_condition(weight, k)
    values = []
    for nu in nu_ladder:
        b = rv.inverse(nu)
        if sigma.closed_form:
            g = lambda t: float(heat_trace(sigma, t / b)) * float(weight(t))
            val = integrate.quad(g, 0.0, 1.0, epsabs=0, epsrel=1e-10, limit=400)[0] / (nu * b)
        else:
            # int_0^1 p(t/b) w(t) dt = sum_k sigma_k int_0^1 e^{-xi_k t / b} w(t) dt
            val = sum(w * partial_laplace(weight, x / b) for x, w in zip(sigma.xi, sigma.weights)) / (nu * b)
        values.append(val)
    v = np.array(values)
    ratio = float(v.max() / v.min())
    margins = {"ratio": max_ratio - ratio}
    details = {"nu": list(nu_ladder), "integrals": v, "max_over_min": ratio, "growth_constant": C, "k": k}
    return Report("uniform_scaled_heat_bound", min(margins.values()) >= 0, margins, details)
