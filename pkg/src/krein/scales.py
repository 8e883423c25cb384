"""Convex scale functions on ``[0, 1]`` and the inequalities built on them.

Every scale function is extended linearly past 1 with its left derivative
there.  That extension changes ``sup_y phi(xy)/phi(y)``, so ``C_+`` and ``C_-``
are always computed numerically; closed forms are kept only as cross-checks.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, optimize
from scipy.special import gammainc, gamma as gamma_fn

from .errors import DomainError, NonFiniteSup, PreconditionError
from .families import AlphaFamily
from .propagation import propagate
from .reports import Report
from .spectral import SpectralMeasure, dirichlet_eigs, spectral_measure
from .strings import MassFunction, StieltjesString

__all__ = [
    "ScaleFunction",
    "Power",
    "PowerLog",
    "Tabulated",
    "ScaleConstants",
    "c_plus",
    "c_minus",
    "alpha_plus",
    "c_phi",
    "scale_constants",
    "phi_tilde",
    "partial_laplace",
    "membership_E_phi",
    "membership_S_phi",
    "green_trace",
    "check_trace_sandwich",
    "check_heat_moment_bounds",
    "check_jensen_bounds",
]

Y_MAX = 1e4
SUP_RTOL = 1e-6


class ScaleFunction:
    """Base class: subclasses supply ``base`` on ``[0, 1]`` and ``slope_at_one``."""

    def base(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    @property
    def slope_at_one(self) -> float:
        raise NotImplementedError

    def ratio_limit_at_zero(self, x: float) -> float:
        """``lim_{y -> 0} phi(x y) / phi(y)``."""
        raise NotImplementedError

    def base_antiderivative(self, v):
        """``int_0^v phi`` for ``0 <= v <= 1``; quadrature unless overridden."""
        v = np.atleast_1d(np.asarray(v, dtype=float))
        out = np.array([integrate.quad(lambda t: float(self.base(t)), 0.0, b, epsabs=0, epsrel=1e-12)[0]
                        if b > 0 else 0.0 for b in v])
        return out

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if np.any(x < 0):
            raise DomainError("scale functions live on [0, inf)")
        inside = np.minimum(x, 1.0)
        out = np.where(x <= 1.0, self.base(inside), self.value_at_one + self.slope_at_one * (x - 1.0))
        return out if out.ndim else float(out)

    @functools.cached_property
    def value_at_one(self) -> float:
        return float(self.base(np.array(1.0)))

    def scalar(self, x: float) -> float:
        """``phi(x)`` for one non-negative float, without array overhead."""
        if x <= 1.0:
            return float(self.base(x))
        return self.value_at_one + self.slope_at_one * (x - 1.0)

    def antiderivative(self, v):
        """``int_0^v phi`` including the linear extension."""
        v = np.asarray(v, dtype=float)
        inside = self.base_antiderivative(np.minimum(v, 1.0)).reshape(v.shape)
        e = np.maximum(v - 1.0, 0.0)
        out = inside + self.value_at_one * e + 0.5 * self.slope_at_one * e ** 2
        return out if out.ndim else float(out)

    def check_convexity(self, n: int = 2001) -> None:
        x = np.linspace(0.0, 1.0, n)
        y = self(x)
        if abs(float(y[0])) > 0:
            raise DomainError("phi(0) must be 0")
        d = np.diff(y)
        if np.any(d <= 0):
            raise DomainError("phi must be strictly increasing")
        if np.any(np.diff(d) < -1e-12 * max(1.0, float(np.abs(d).max()))):
            raise DomainError("phi must be convex on [0, 1]")


@dataclass(frozen=True)
class Power(ScaleFunction):
    """``phi(x) = x^alpha`` on ``[0, 1]``; convexity needs ``alpha >= 1``."""

    alpha: float

    def __post_init__(self):
        if not self.alpha >= 1:
            raise DomainError("Power scale needs alpha >= 1")

    def base(self, x):
        return np.asarray(x, dtype=float) ** self.alpha

    @property
    def slope_at_one(self):
        return float(self.alpha)

    def ratio_limit_at_zero(self, x):
        return float(x) ** self.alpha

    def base_antiderivative(self, v):
        return np.asarray(v, dtype=float) ** (self.alpha + 1) / (self.alpha + 1)


@dataclass(frozen=True)
class PowerLog(ScaleFunction):
    """``phi(x) = x^alpha (c - log x)``.

    Convex on ``(0, 1]`` iff ``alpha (alpha - 1) c >= 2 alpha - 1``, which
    forces ``alpha > 1``.
    """

    alpha: float
    c: float

    def __post_init__(self):
        a, c = self.alpha, self.c
        if not a > 1 or a * (a - 1) * c < 2 * a - 1:
            raise DomainError(f"x^{a} (c - log x) is not convex on (0, 1] for c = {c}")

    def base(self, x):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(x > 0, x ** self.alpha * (self.c - np.log(np.where(x > 0, x, 1.0))), 0.0)
        return out

    @property
    def slope_at_one(self):
        return self.alpha * self.c - 1.0

    def ratio_limit_at_zero(self, x):
        return float(x) ** self.alpha

    def base_antiderivative(self, v):
        v = np.asarray(v, dtype=float)
        a1 = self.alpha + 1
        with np.errstate(divide="ignore", invalid="ignore"):
            logv = np.log(np.where(v > 0, v, 1.0))
            out = np.where(v > 0, v ** a1 / a1 * (self.c - logv + 1.0 / a1), 0.0)
        return out


@dataclass(frozen=True)
class Tabulated(ScaleFunction):
    """Piecewise-linear interpolant through ``(xs, ys)`` with ``xs`` from 0 to 1."""

    xs: tuple
    ys: tuple

    def __post_init__(self):
        xs = tuple(float(v) for v in self.xs)
        ys = tuple(float(v) for v in self.ys)
        object.__setattr__(self, "xs", xs)
        object.__setattr__(self, "ys", ys)
        x, y = np.array(xs), np.array(ys)
        if x.size < 2 or x.size != y.size:
            raise DomainError("need matching samples, at least two")
        if x[0] != 0.0 or x[-1] != 1.0 or np.any(np.diff(x) <= 0):
            raise DomainError("samples must increase from 0 to 1")
        if y[0] != 0.0 or np.any(np.diff(y) <= 0):
            raise DomainError("phi must start at 0 and increase strictly")
        slopes = np.diff(y) / np.diff(x)
        if np.any(np.diff(slopes) < -1e-12 * slopes.max()):
            raise DomainError("tabulated phi is not convex")

    def base(self, x):
        return np.interp(np.asarray(x, dtype=float), self.xs, self.ys)

    @property
    def slope_at_one(self):
        return (self.ys[-1] - self.ys[-2]) / (self.xs[-1] - self.xs[-2])

    def ratio_limit_at_zero(self, x):
        # linear near 0, so the ratio tends to x
        return float(x)

    def base_antiderivative(self, v):
        x, y = np.array(self.xs), np.array(self.ys)
        cum = np.concatenate(([0.0], np.cumsum(0.5 * (y[1:] + y[:-1]) * np.diff(x))))
        v = np.asarray(v, dtype=float)
        k = np.clip(np.searchsorted(x, v, side="right") - 1, 0, x.size - 2)
        yv = np.interp(v, x, y)
        return cum[k] + 0.5 * (y[k] + yv) * (v - x[k])


def _sup_ratio(phi: ScaleFunction, x: float, lo: float, hi: float, n: int, sign: float) -> float:
    """``sign * max sign * phi(x y)/phi(y)`` over ``log y`` in ``[lo, hi]``."""
    u = np.linspace(lo, hi, n)
    y = np.exp(u)
    r = sign * phi(x * y) / phi(y)
    j = int(np.argmax(r))
    a, b = u[max(j - 1, 0)], u[min(j + 1, n - 1)]
    best = r[j]
    if b > a:
        res = optimize.minimize_scalar(
            lambda v: -sign * phi.scalar(x * math.exp(v)) / phi.scalar(math.exp(v)),
            bounds=(a, b), method="bounded", options={"xatol": 1e-12 * max(1.0, abs(a))})
        best = max(best, -res.fun)
    return sign * best


def _refined(phi, x, lo, hi, sign, rtol):
    prev = None
    for level in range(7):
        val = _sup_ratio(phi, x, lo, hi, 256 * 2 ** level, sign)
        if not math.isfinite(val):
            break
        if prev is not None and abs(val - prev) <= rtol * abs(val):
            return val
        prev = val
    raise NonFiniteSup(f"ratio extremum at x = {x} did not settle")


def c_plus(phi: ScaleFunction, x: float, y_max: float = Y_MAX, rtol: float = SUP_RTOL) -> float:
    """``C_+(x) = sup_{y > 0} phi(x y) / phi(y)``.

    The grid covers ``log y`` from well below ``1/x`` up to ``log y_max``; the
    two ends are closed off with the exact limits (``lim_{y->0}`` from the
    family, ``x`` as ``y -> inf`` from the linear extension).
    """
    x = float(x)
    if not x > 0:
        raise DomainError("C_+ is evaluated at x > 0")
    lo = math.log(1e-8 / max(x, 1.0))
    hi = math.log(y_max * max(1.0, 1.0 / x))
    val = max(_refined(phi, x, lo, hi, 1.0, rtol), phi.ratio_limit_at_zero(x), x)
    if not math.isfinite(val):
        raise NonFiniteSup(f"C_+({x}) is not finite")
    return val


def c_minus(phi: ScaleFunction, x: float, rtol: float = SUP_RTOL) -> float:
    """``C_-(x) = inf_{y in (0, 1]} phi(x y) / phi(y)``."""
    x = float(x)
    if not x > 0:
        raise DomainError("C_- is evaluated at x > 0")
    lo = math.log(1e-8 / max(x, 1.0))
    return min(_refined(phi, x, lo, 0.0, -1.0, rtol), phi.ratio_limit_at_zero(x))


def alpha_plus(phi: ScaleFunction, x_max: float = 40.0, n: int = 80) -> float:
    """``sup_{x > 1} log C_+(e^x) / x`` over a grid in ``(1, x_max]``."""
    xs = np.linspace(1.0, x_max, n)[1:]
    return max(math.log(c_plus(phi, math.exp(v))) / v for v in xs)


@functools.lru_cache(maxsize=256)
def c_phi(phi: ScaleFunction, rtol: float = 1e-8) -> float:
    """``C_phi = int_0^inf t e^{-t} C_+(t/2) dt``, the constant of the upper bounds."""
    f = lambda t: t * math.exp(-t) * c_plus(phi, t / 2.0) if t > 0 else 0.0
    upper = 40.0
    while f(upper) > 1e-16:
        upper *= 1.5
    pieces = [(0.0, 2.0), (2.0, 10.0), (10.0, upper)]
    return sum(integrate.quad(f, a, b, epsabs=0, epsrel=rtol, limit=200)[0] for a, b in pieces)


@dataclass(frozen=True)
class ScaleConstants:
    C_plus: Callable[[float], float]
    C_minus: Callable[[float], float]
    alpha_plus: float
    C_phi: float


def scale_constants(phi: ScaleFunction) -> ScaleConstants:
    return ScaleConstants(
        functools.partial(c_plus, phi),
        functools.partial(c_minus, phi),
        alpha_plus(phi),
        c_phi(phi),
    )


def _quad(f, a, b, **kw) -> float:
    """``quad`` at near-machine tolerance; a roundoff warning there means the value is already as good as it gets."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        return integrate.quad(f, a, b, **kw)[0]


def phi_tilde(phi: ScaleFunction, xi: float, rtol: float = 1e-10) -> float:
    """``int_0^inf e^{-t xi} phi(t) dt``.

    The linear extension contributes ``e^{-xi} (phi(1)/xi + phi'(1-)/xi^2)``;
    the part on ``[0, 1]`` is integrated in ``u = xi t``.
    """
    xi = float(xi)
    if not xi > 0:
        raise DomainError("phi_tilde needs xi > 0")
    tail = math.exp(-xi) * (phi.value_at_one / xi + phi.slope_at_one / xi ** 2)
    if isinstance(phi, Power):
        a = phi.alpha
        head = float(gammainc(a + 1, xi)) * float(gamma_fn(a + 1)) / xi ** (a + 1)
        return head + tail
    top = min(xi, 800.0)
    g = lambda u: float(phi.base(u / xi)) * math.exp(-u)
    pts = [p for p in (1.0, 10.0, 100.0) if p < top]
    head = _quad(g, 0.0, top, epsabs=0, epsrel=rtol, limit=400, points=pts or None) / xi
    return head + tail


def partial_laplace(weight: Callable, c: float, upper: float = 1.0) -> float:
    """``int_0^upper weight(t) e^{-c t} dt`` for ``upper <= 1``; closed form for powers."""
    c, upper = float(c), float(upper)
    if not 0 < upper <= 1:
        raise DomainError("upper must lie in (0, 1]")
    if isinstance(weight, Power):
        a = weight.alpha
        if c == 0:
            return upper ** (a + 1) / (a + 1)
        return float(gammainc(a + 1, c * upper)) * float(gamma_fn(a + 1)) / c ** (a + 1)
    pts = [p for p in (1.0 / c, 10.0 / c) if 0 < p < upper] if c > 0 else []
    return integrate.quad(lambda t: float(weight(t)) * math.exp(-c * t), 0.0, upper, epsabs=0,
                          epsrel=1e-10, limit=400, points=pts or None)[0]


def _decade_ladder(integrand, start: float, n_decades: int = 10, ratio_cut: float = 0.999):
    """Integral of ``integrand`` over ``[start, inf)`` by decades, with a ratio test.

    Returns ``(finite, value)``; the geometric tail estimate is added when the
    last two decade increments shrink.
    """
    edges = start * 10.0 ** np.arange(n_decades + 1)
    inc = np.array([integrate.quad(integrand, a, b, epsabs=0, epsrel=1e-10, limit=200)[0]
                    for a, b in zip(edges[:-1], edges[1:])])
    if inc[-2] <= 0:
        return True, float(inc.sum())
    r = inc[-1] / inc[-2]
    if r < ratio_cut:
        return True, float(inc.sum() + inc[-1] * r / (1 - r))
    return False, math.inf


def membership_E_phi(obj, phi: ScaleFunction, a: float | None = None):
    """``(finite, int_{-inf}^a phi(M(x)) dx)`` for a string or the alpha family.

    For atomic strings ``M`` is piecewise linear, so each piece is exact via
    the antiderivative of ``phi``.
    """
    if isinstance(obj, StieltjesString):
        if a is None:
            a = obj.l if math.isfinite(obj.l) else obj.l_plus
        if a > obj.l:
            raise DomainError("a must not exceed l")
        mf = MassFunction(obj)
        nodes = np.append(obj.positions[obj.positions < a], a)
        if nodes.size < 2:
            return True, 0.0
        M = mf(nodes)
        slopes = mf.slopes[: nodes.size - 1]
        P = phi.antiderivative(M)
        return True, float((np.diff(P) / slopes).sum())
    if isinstance(obj, AlphaFamily):
        if obj.alpha < 1:
            a = 1.0 if a is None else a
            val = integrate.quad(lambda x: float(phi(obj.M(x))), 0.0, a, epsrel=1e-10)[0] if a > 0 else 0.0
            return True, val
        a = -1.0 if a is None else a
        if not a < 0:
            raise DomainError("for alpha > 1 the integral runs below l = 0")
        finite, far = _decade_ladder(lambda u: float(phi(obj.M(-u))), -a)
        return finite, far if finite else math.inf
    raise TypeError(f"cannot test membership of {type(obj).__name__}")


def membership_S_phi(sigma: SpectralMeasure | AlphaFamily, phi: ScaleFunction):
    """``(finite, int_{[1, inf)} phi_tilde(xi) sigma(d xi))``."""
    if isinstance(sigma, SpectralMeasure) and sigma.closed_form:
        sigma = AlphaFamily(sigma.closed_form["alpha"])
    if isinstance(sigma, AlphaFamily):
        fam = sigma
        return _decade_ladder(lambda xi: phi_tilde(phi, xi) * float(fam.sigma_density(xi)), 1.0)
    keep = sigma.xi >= 1.0
    val = sum(phi_tilde(phi, x) * w for x, w in zip(sigma.xi[keep], sigma.weights[keep]))
    return True, float(val)


def _pieces(s: StieltjesString, lam: float, end: float):
    """Per-piece data ``(x0, x1, phi0, dphi, M0, m)`` of ``phi_lam`` and ``M`` up to ``end``."""
    vals, ders = propagate(s, lam)
    mf = MassFunction(s)
    pos = s.positions
    keep = pos < end
    nodes = np.append(pos[keep], end)
    k = int(keep.sum())
    return [(nodes[i], nodes[i + 1], vals[i], ders[i], mf.values[i], mf.slopes[i]) for i in range(k)]


def _piece_integral(g, pieces):
    """``sum_pieces int g(phi(x), M(x)) dx`` with ``phi``, ``M`` affine per piece."""
    total = 0.0
    for x0, x1, v0, d, M0, m in pieces:
        f = lambda x: g(v0 + d * (x - x0), M0 + m * (x - x0))
        total += _quad(f, x0, x1, epsabs=0, epsrel=1e-13, limit=200)
    return total


def green_trace(s: StieltjesString, lam: float, a: float) -> float:
    """``int_{-inf}^a phi^2 dm int_x^a phi^{-2} dy``, the trace of the Dirichlet resolvent."""
    vals, ders = propagate(s, lam)
    pos, w = s.positions, s.masses
    keep = pos < a
    x, v, d = pos[keep], vals[keep], ders[keep]
    # int_{x_i}^a phi^{-2} by exact affine pieces
    nodes = np.append(x, a)
    phi_nodes = np.append(v, v[-1] + d[-1] * (a - x[-1]))
    piece = np.diff(nodes) / (phi_nodes[:-1] * phi_nodes[1:])
    tail = np.cumsum(piece[::-1])[::-1]
    return float((v ** 2 * w[keep] * tail).sum())


def check_trace_sandwich(s: StieltjesString, a: float, lam: float) -> Report:
    """``M(a) phi_lam(a)^{-2} <= T <= min(M(a), log phi_lam(a) / -lam)``.

    ``T = sum_k 1 / (mu_k - lam)`` over the Dirichlet eigenvalues at ``a``.
    Margins are relative to ``T``.
    """
    if not lam < 0:
        raise DomainError("lam must be negative")
    mu = dirichlet_eigs(s, a).eigenvalues
    T = float((1.0 / (mu - lam)).sum())
    Ma = float(MassFunction(s)(a))
    vals, ders = propagate(s, lam)
    keep = s.positions < a
    k = int(keep.sum()) - 1
    phi_a = float(vals[k] + ders[k] * (a - s.positions[k]))
    lower = Ma / phi_a ** 2
    upper = min(Ma, math.log(phi_a) / -lam)
    margins = {"lower": (T - lower) / T, "upper": (upper - T) / T}
    details = {"T": T, "green_trace": green_trace(s, lam, a), "lower": lower, "upper": upper,
               "M(a)": Ma, "phi(a)": phi_a}
    return Report("trace_sandwich", min(margins.values()) >= -1e-12, margins, details)


def _heat_moment_sides(s, phi, lam, end, split, c, pieces, head, dphi_split, cphi):
    upper = cphi * _piece_integral(
        lambda v, M: float(phi(c * min(M, math.log(v) / -lam))) / v ** 2, pieces)
    upper_split = cphi * _piece_integral(lambda v, M: float(phi(c * M)) / v ** 2, head) \
        + cphi * (-lam) / (c * dphi_split) * phi_tilde(phi, -lam / c)
    return upper, upper_split


def check_heat_moment_bounds(s: StieltjesString, phi: ScaleFunction, lam: float,
                             split: float | None = None, boundary: float | None = None,
                             y_mean: float = 2.0) -> Report:
    """Two-sided estimate of ``int p(t) phi(t) e^{lam t} dt`` by ``x``-integrals.

    Lower: ``int phi(M phi_lam^{-2}) phi_lam^{-2} dx``.  Upper:
    ``C_phi int phi(c min(M, log phi_lam / -lam)) phi_lam^{-2} dx``, itself below
    ``C_phi int_{-inf}^{split} phi(c M) phi_lam^{-2} dx
    + C_phi (-lam) / (c phi_lam'(split)) phi_tilde(-lam / c)``.

    ``c = y_mean`` is the mean of the Gamma variables in the series for ``X``,
    so ``E Z = c * sum 1/(mu_n - lam)``.  With Gamma(2) variables ``c = 2``;
    the margins for ``c = 1`` are reported under ``details["unit_mean"]``.
    """
    if not lam < 0:
        raise DomainError("lam must be negative")
    end = s.l if boundary is None else float(boundary)
    if math.isinf(end):
        raise DomainError("heat-moment bounds need a finite l or a boundary")
    sigma = spectral_measure(s, None if boundary is None else end)
    lhs = sum(w * phi_tilde(phi, x - lam) for x, w in zip(sigma.xi, sigma.weights))
    pieces = _pieces(s, lam, end)
    cphi = c_phi(phi)
    lower = _piece_integral(lambda v, M: float(phi(M / v ** 2)) / v ** 2, pieces)
    split = s.l_plus if split is None else float(split)
    if not s.l_minus <= split <= end:
        raise DomainError("split point must lie in [l_-, l]")
    head = _pieces(s, lam, split)
    _, ders = propagate(s, lam)
    dphi_split = ders[int(np.searchsorted(s.positions, split, side="right")) - 1]
    args = (s, phi, lam, end, split)
    upper, upper_split = _heat_moment_sides(*args, y_mean, pieces, head, dphi_split, cphi)
    margins = {
        "lower": (lhs - lower) / lhs,
        "upper": (upper - lhs) / lhs,
        "upper_split": (upper_split - upper) / lhs,
    }
    u1, u2 = _heat_moment_sides(*args, 1.0, pieces, head, dphi_split, cphi)
    details = {"heat_moment": lhs, "lower": lower, "upper": upper, "upper_split": upper_split,
               "C_phi": cphi, "y_mean": y_mean,
               "unit_mean": {"upper": (u1 - lhs) / lhs, "upper_split": (u2 - u1) / lhs}}
    return Report("heat_moment_bounds", min(margins.values()) >= -1e-12, margins, details)


def check_jensen_bounds(weights, phi: ScaleFunction, n_samples: int = 200_000, seed: int = 0,
                        n_se: float = 3.0) -> Report:
    """Monte Carlo check of ``phi(EX) <= E phi(X) <= C_phi phi(EX)``.

    ``X = sum_n weights[n] Y_n`` with ``Y_n`` Gamma(2) (mean 2).  Margins are
    the gaps plus ``n_se`` standard errors.
    """
    from .stochastic import RandomFunctional, sample

    weights = np.asarray(weights, dtype=float)
    if np.any(weights <= 0):
        raise PreconditionError("weights must be positive")
    fn = RandomFunctional(1.0 / weights, 0.0)
    st = sample(fn, n_samples, seed, functionals=("phi",), phi=phi)["phi"]
    EX = 2.0 * float(weights.sum())
    jensen_low = float(phi(EX))
    cphi = c_phi(phi)
    margins = {
        "jensen": st.mean - jensen_low + n_se * st.se,
        "upper": cphi * jensen_low - st.mean + n_se * st.se,
    }
    details = {"E_phi_X": st.mean, "se": st.se, "phi_EX": jensen_low, "C_phi": cphi, "EX": EX}
    return Report("jensen_bounds", min(margins.values()) >= 0, margins, details)
