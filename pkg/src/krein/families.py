"""The power-law strings ``m_alpha`` and their exact spectral data."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

__all__ = ["AlphaFamily"]


@dataclass(frozen=True)
class AlphaFamily:
    """``m(x) = C (-x)^{-beta}`` on ``x < 0`` for ``alpha > 1``.

    For ``0 < alpha < 1`` the string is ``C x^{-beta}`` on ``x > 0`` (``beta < 0``,
    ``m = 0`` left of the origin, ``l = inf``).  ``alpha = 1`` is the exponential
    string and has no ``beta``; it is rejected.
    """

    alpha: float

    def __post_init__(self):
        a = float(self.alpha)
        if not a > 0 or a == 1.0 or not math.isfinite(a):
            raise DomainError("alpha must be positive, finite and different from 1")
        object.__setattr__(self, "alpha", a)

    @property
    def beta(self) -> float:
        return self.alpha / (self.alpha - 1.0)

    @property
    def C(self) -> float:
        a = self.alpha
        if a < 1:
            return ((1 - a) / a) ** (a / (1 - a))
        return ((a - 1) / a) ** (-a / (a - 1))

    @property
    def l(self) -> float:
        return 0.0 if self.alpha > 1 else math.inf

    @property
    def sigma_constant(self) -> float:
        """``alpha^{2 alpha} / Gamma(1 + alpha)^2``."""
        a = self.alpha
        return math.exp(2 * a * math.log(a) - 2 * math.lgamma(1 + a))

    @property
    def p_constant(self) -> float:
        """``alpha^{2 alpha} / Gamma(1 + alpha)``."""
        a = self.alpha
        return math.exp(2 * a * math.log(a) - math.lgamma(1 + a))

    def _out(self, x, fn, outside):
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.alpha > 1:
                out = np.where(x < 0, fn(np.abs(x)), outside)
            else:
                out = np.where(x > 0, fn(np.abs(x)), outside)
        return out if out.ndim else float(out)

    def m(self, x):
        """Distribution function; ``+inf`` on ``[0, inf)`` when ``alpha > 1``."""
        return self._out(x, lambda u: self.C * u ** (-self.beta),
                         math.inf if self.alpha > 1 else 0.0)

    def M(self, x):
        """``int_{-inf}^x m``: ``C (-x)^{1-beta} / (beta - 1)`` for ``alpha > 1``."""
        b = self.beta
        if self.alpha > 1:
            return self._out(x, lambda u: self.C * u ** (1 - b) / (b - 1), math.inf)
        return self._out(x, lambda u: self.C * u ** (1 - b) / (1 - b), 0.0)

    def M_inverse(self, v):
        """Point where ``M`` equals ``v > 0``."""
        v = np.asarray(v, dtype=float)
        b = self.beta
        if self.alpha > 1:
            out = -((v * (b - 1) / self.C) ** (1 / (1 - b)))
        else:
            out = (v * (1 - b) / self.C) ** (1 / (1 - b))
        return out if out.ndim else float(out)

    def sigma_cumulative(self, xi):
        """``sigma([0, xi]) = alpha^{2 alpha} / Gamma(1+alpha)^2 * xi^alpha``."""
        xi = np.asarray(xi, dtype=float)
        out = self.sigma_constant * np.maximum(xi, 0.0) ** self.alpha
        return out if out.ndim else float(out)

    def sigma_density(self, xi):
        xi = np.asarray(xi, dtype=float)
        out = self.sigma_constant * self.alpha * xi ** (self.alpha - 1)
        return out if out.ndim else float(out)

    def p(self, t):
        """Heat trace ``alpha^{2 alpha} / Gamma(1+alpha) * t^{-alpha}``."""
        t = np.asarray(t, dtype=float)
        out = self.p_constant * t ** (-self.alpha)
        return out if out.ndim else float(out)
