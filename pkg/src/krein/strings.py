"""Atomic strings of entrance type and their mass functions.

A string is stored as a finite sorted atomic measure ``dm = sum_i w_i delta_{x_i}``
together with the right end ``l`` of its domain (``m = +inf`` on ``[l, inf)``).
All objects are immutable; every function here is pure.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import InvalidString, NormalizationImpossible

__all__ = [
    "Atom",
    "StieltjesString",
    "MassFunction",
    "mass_m",
    "mass_integral_M",
    "normalize_to_Ec",
    "shift",
    "scale",
    "nu_scaling",
    "compactify",
    "compactified_distance",
    "default_grid",
    "nudge_off",
]

GRID_NUDGE = 1e-9


@dataclass(frozen=True)
class Atom:
    position: float
    mass: float


def _frozen(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class StieltjesString:
    """Finite atomic string with right end ``l`` (possibly ``+inf``).

    Parameters
    ----------
    positions : sequence of float
        Strictly increasing atom positions, all ``< l``.
    masses : sequence of float
        Positive weights of ``dm`` at each position.
    l : float
        Right end of the domain; ``m(x) = +inf`` for ``x >= l``.
    label : str
        Free-form name carried into reports and files.
    """

    positions: np.ndarray
    masses: np.ndarray
    l: float = math.inf
    label: str = ""

    def __post_init__(self):
        x = _frozen(self.positions).reshape(-1)
        w = _frozen(self.masses).reshape(-1)
        l = float(self.l)
        if x.size == 0:
            raise InvalidString("a string needs at least one atom")
        if x.shape != w.shape:
            raise InvalidString("positions and masses differ in length")
        if not np.all(np.isfinite(x)):
            raise InvalidString("atom positions must be finite")
        if np.any(np.diff(x) <= 0):
            raise InvalidString("atom positions must be strictly increasing")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise InvalidString("atom masses must be positive and finite")
        if math.isnan(l) or l == -math.inf or not x[-1] < l:
            raise InvalidString("all atoms must lie strictly left of l")
        object.__setattr__(self, "positions", x)
        object.__setattr__(self, "masses", w)
        object.__setattr__(self, "l", l)

    @classmethod
    def from_atoms(cls, atoms: Iterable[Atom | tuple], l: float = math.inf, label: str = ""):
        pairs = [(a.position, a.mass) if isinstance(a, Atom) else tuple(a) for a in atoms]
        if not pairs:
            raise InvalidString("a string needs at least one atom")
        x, w = zip(*pairs)
        return cls(x, w, l, label)

    @property
    def atoms(self) -> list[Atom]:
        return [Atom(float(x), float(w)) for x, w in zip(self.positions, self.masses)]

    @property
    def n_atoms(self) -> int:
        return int(self.positions.size)

    @property
    def l_minus(self) -> float:
        return float(self.positions[0])

    @property
    def l_plus(self) -> float:
        return float(self.positions[-1])

    @property
    def total_mass(self) -> float:
        return float(self.masses.sum())

    def with_label(self, label: str) -> "StieltjesString":
        return StieltjesString(self.positions, self.masses, self.l, label)

    def allclose(self, other: "StieltjesString", atol: float = 1e-12) -> bool:
        if self.n_atoms != other.n_atoms:
            return False
        same_l = (math.isinf(self.l) and math.isinf(other.l)) or abs(self.l - other.l) <= atol
        return (
            same_l
            and bool(np.allclose(self.positions, other.positions, rtol=0, atol=atol))
            and bool(np.allclose(self.masses, other.masses, rtol=0, atol=atol))
        )

    def __repr__(self):
        return (
            f"StieltjesString(n_atoms={self.n_atoms}, l={self.l!r}, "
            f"l_minus={self.l_minus:.6g}, label={self.label!r})"
        )


@dataclass(frozen=True, eq=False)
class MassFunction:
    """Piecewise-linear ``M(x) = int_{-inf}^x m(y) dy`` with cached breakpoints.

    ``values[k]`` is ``M`` at ``positions[k]`` and ``slopes[k]`` the slope of the
    piece to the right of that atom (the cumulative mass ``m(x_k)``).
    """

    string: StieltjesString
    values: np.ndarray = field(init=False)
    slopes: np.ndarray = field(init=False)

    def __post_init__(self):
        x = self.string.positions
        slopes = np.cumsum(self.string.masses)
        values = np.zeros_like(x)
        if x.size > 1:
            values[1:] = np.cumsum(slopes[:-1] * np.diff(x))
        object.__setattr__(self, "values", _frozen(values))
        object.__setattr__(self, "slopes", _frozen(slopes))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        pos = self.string.positions
        k = np.searchsorted(pos, x, side="right") - 1
        kk = np.maximum(k, 0)
        out = np.where(k < 0, 0.0, self.values[kk] + self.slopes[kk] * (x - pos[kk]))
        out = np.where(x > self.string.l, np.inf, out)
        return out if out.ndim else float(out)

    @property
    def at_l(self) -> float:
        """``M(l)``; infinite when ``l`` is."""
        if math.isinf(self.string.l):
            return math.inf
        return float(self(self.string.l))

    def inverse(self, v):
        """Smallest ``x`` with ``M(x) = v`` for ``0 <= v <= M(l)``."""
        v = np.asarray(v, dtype=float)
        pos = self.string.positions
        k = np.searchsorted(self.values, v, side="left") - 1
        kk = np.clip(k, 0, pos.size - 1)
        out = np.where(v <= 0, pos[0], pos[kk] + (v - self.values[kk]) / self.slopes[kk])
        out = np.where(v > self.at_l, np.nan, out)
        return out if out.ndim else float(out)


def mass_m(s: StieltjesString, x):
    """Right-continuous distribution function ``m(x)``; ``+inf`` for ``x >= l``."""
    x = np.asarray(x, dtype=float)
    cum = np.concatenate(([0.0], np.cumsum(s.masses)))
    k = np.searchsorted(s.positions, x, side="right")
    out = np.where(x >= s.l, np.inf, cum[k])
    return out if out.ndim else float(out)


def mass_integral_M(s: StieltjesString, x):
    """``M(x) = sum_{x_i <= x} w_i (x - x_i)``; ``+inf`` for ``x > l``."""
    return MassFunction(s)(x)


def shift(s: StieltjesString, a: float) -> StieltjesString:
    """String ``m_a(x) = m(x + a)``."""
    return StieltjesString(s.positions - a, s.masses, s.l - a, s.label)


def scale(s: StieltjesString, a: float, b: float) -> StieltjesString:
    """String ``x -> a*b*m(a*x)``: positions ``x_i/a``, masses ``a*b*w_i``."""
    if a <= 0 or b <= 0:
        raise ValueError("scale factors must be positive")
    return StieltjesString(s.positions / a, s.masses * (a * b), s.l / a, s.label)


def nu_scaling(s: StieltjesString, nu: float, phi_inv_at_nu: float) -> StieltjesString:
    """``m_nu(x) = nu * phi^{-1}(nu) * m(nu x)``, so that ``M_nu(x) = phi^{-1}(nu) M(nu x)``."""
    return scale(s, nu, phi_inv_at_nu)


def normalize_to_Ec(s: StieltjesString, c: float) -> StieltjesString:
    """Shift ``s`` so that ``M(0) = c``.

    The root of ``M(a) = c`` is found in closed form on the active linear piece
    of ``M``.  Raises :class:`NormalizationImpossible` when ``M(l) < c``.
    """
    if c <= 0:
        raise ValueError("normalization level c must be positive")
    mf = MassFunction(s)
    if mf.at_l < c:
        raise NormalizationImpossible(f"M(l) = {mf.at_l:.6g} < c = {c:.6g}")
    if 0.0 <= s.l and abs(mf(0.0) - c) <= 4 * np.finfo(float).eps * c:
        return s
    return shift(s, mf.inverse(c))


MassLike = StieltjesString | Callable[[np.ndarray], np.ndarray]


def _mass_values(obj: MassLike, x: np.ndarray) -> np.ndarray:
    if isinstance(obj, StieltjesString):
        return np.asarray(mass_m(obj, x), dtype=float)
    return np.asarray(obj(x), dtype=float) * np.ones_like(x)


def compactify(values):
    """``(2/pi) arctan(m)`` with ``arctan(+inf) = pi/2``."""
    return 2.0 / math.pi * np.arctan(values)


def compactified_distance(s1: MassLike, s2: MassLike, grid: Sequence[float] | None = None) -> float:
    """Max over ``grid`` of ``|m1_hat(x) - m2_hat(x)|``.

    Grid points are assumed to be continuity points of both functions; when
    ``grid`` is omitted :func:`default_grid` builds one from the strings given.
    """
    if grid is None:
        grid = default_grid(*[o for o in (s1, s2) if isinstance(o, StieltjesString)])
    x = np.asarray(grid, dtype=float)
    d = np.abs(compactify(_mass_values(s1, x)) - compactify(_mass_values(s2, x)))
    return float(d.max()) if d.size else 0.0


def _discontinuities(strings: Iterable[StieltjesString]) -> np.ndarray:
    pts = []
    for s in strings:
        pts.append(s.positions)
        if math.isfinite(s.l):
            pts.append([s.l])
    return np.unique(np.concatenate(pts)) if pts else np.empty(0)


def nudge_off(points, discontinuities, eps: float = GRID_NUDGE) -> np.ndarray:
    """Move every point lying within ``eps`` of a discontinuity to ``d - eps``."""
    p = np.array(points, dtype=float)
    d = np.unique(np.asarray(discontinuities, dtype=float))
    if d.size == 0:
        return p
    j = np.searchsorted(d, p)
    below = d[np.clip(j - 1, 0, d.size - 1)]
    above = d[np.clip(j, 0, d.size - 1)]
    nearest = np.where(np.abs(p - below) <= np.abs(p - above), below, above)
    bad = np.abs(p - nearest) < eps
    p[bad] = nearest[bad] - eps
    return p


def default_grid(*strings: StieltjesString, n: int = 256) -> np.ndarray:
    """``n`` geometrically spaced points covering the supports, nudged off atoms.

    Spacing is geometric in the distance to the right end of the window, so it
    is finest where mass piles up towards ``l``.
    """
    if not strings:
        return np.linspace(-1.0, 1.0, n)
    lo = min(s.l_minus for s in strings)
    hi = max(s.l if math.isfinite(s.l) else s.l_plus for s in strings)
    span = max(hi - lo, 1.0)
    left = lo - 0.5 * span
    right = max(s.l_plus for s in strings) + 0.5 * span
    right = max(right, hi + 0.1 * span)
    dist = np.geomspace(1e-3 * span, right - left, n)
    grid = np.sort(right - dist)
    return nudge_off(grid, _discontinuities(strings))
