"""Convergence conditions for sequences of strings and spectra, and continuity harnesses.

Every condition involves a limit (``n -> inf``, ``x -> -inf``, ``N -> inf`` or
``eps -> 0``).  Each is replaced by a finite surrogate: a quantity is evaluated
along a ladder and its limit is estimated from the last three rungs by Aitken
extrapolation.  A condition passes when that estimate is at most ``tol``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np
from scipy import integrate
from scipy.optimize import brentq

from .errors import DegenerateLimit, InsufficientData, NormalizationImpossible, PreconditionError
from .families import AlphaFamily
from .propagation import green
from .reports import SCHEMA_VERSION, Report, _plain
from .scales import ScaleFunction, membership_E_phi, membership_S_phi, partial_laplace, phi_tilde
from .spectral import SpectralMeasure, heat_trace, reconstruct_from_spectrum, spectral_measure
from .strings import (
    MassLike,
    StieltjesString,
    _discontinuities,
    compactify,
    default_grid,
    mass_integral_M,
    mass_m,
    normalize_to_Ec,
    nudge_off,
)

__all__ = [
    "StringSequence",
    "SpectrumSequence",
    "ConditionResult",
    "ConvergenceReport",
    "extrapolated_limit",
    "check_conditions",
    "forward_continuity_harness",
    "inverse_continuity_harness",
    "phi_space_equivalence_check",
    "STRING_CONDITIONS",
    "SPECTRUM_CONDITIONS",
]

STRING_CONDITIONS = frozenset({"A", "B", "C", "D"})
SPECTRUM_CONDITIONS = frozenset({"A'", "C'", "D'", "A''", "C''", "D''"})
NEEDS_PHI = frozenset({"C", "D", "C'", "D'", "C''", "D''"})
DEFAULT_TOL = 1e-3
NONTRIVIAL_MASS = 1e-12


@dataclass(frozen=True)
class StringSequence:
    """``items`` in order of ``n``; ``limit`` may be a string or any mass function ``x -> m(x)``.

    ``boundary`` is the Dirichlet point used when spectra are needed for
    strings with ``l = inf``; ``method`` is passed to :func:`spectral_measure`.
    """

    items: tuple
    limit: MassLike | None = None
    boundary: float | None = None
    method: str = "kernel"

    def __post_init__(self):
        items = tuple(self.items)
        if not items:
            raise ValueError("a sequence needs at least one item")
        object.__setattr__(self, "items", items)

    def spectra(self) -> "SpectrumSequence":
        sig = [spectral_measure(s, self.boundary, self.method) for s in self.items]
        lim = spectral_measure(self.limit, self.boundary, self.method) if isinstance(self.limit, StieltjesString) else None
        return SpectrumSequence(tuple(sig), lim)


@dataclass(frozen=True)
class SpectrumSequence:
    items: tuple
    limit: SpectralMeasure | None = None

    def __post_init__(self):
        items = tuple(self.items)
        if not items:
            raise ValueError("a sequence needs at least one item")
        object.__setattr__(self, "items", items)


@dataclass(frozen=True)
class ConditionResult:
    passed: bool
    margin: float
    witness: str


@dataclass
class ConvergenceReport:
    conditions: dict = field(default_factory=dict)
    tol: float = DEFAULT_TOL

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.conditions.values())

    def __getitem__(self, key) -> ConditionResult:
        return self.conditions[key]

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "tol": self.tol,
            "passed": self.passed,
            "conditions": {k: {"pass": r.passed, "margin": _plain(r.margin), "witness": r.witness}
                           for k, r in sorted(self.conditions.items())},
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def extrapolated_limit(values: Sequence[float]) -> float:
    """Aitken estimate of the limit of the last three values of a non-negative quantity.

    Falls back to the last value when the differences do not contract
    geometrically with a fixed sign; an overshoot below zero counts as zero.
    """
    v = np.asarray(values, dtype=float)
    if v.size < 3:
        raise InsufficientData("need at least three rungs to extrapolate")
    v0, v1, v2 = v[-3:]
    if not np.all(np.isfinite(v[-3:])):
        return math.inf
    d0, d1 = v1 - v0, v2 - v1
    if d0 * d1 <= 0 or abs(d1) >= abs(d0):
        return float(v2)
    return max(0.0, float(v2 - d1 * d1 / (d1 - d0)))


def _verdict(values, tol, witness) -> ConditionResult:
    lim = extrapolated_limit(values)
    return ConditionResult(bool(lim <= tol), lim, witness)


def _deviations(items, limit, measure: Callable[[object, object], float]):
    """Distance of each item to the limit, or Cauchy gaps between neighbours when there is none."""
    if limit is not None:
        return [measure(it, limit) for it in items]
    return [measure(a, b) for a, b in zip(items[:-1], items[1:])]


def _x_ladder(seq: StringSequence, n: int = 6) -> np.ndarray:
    """Points heading left from the reference string's first atom.

    When items carry mass further left, the ladder closes in on their
    leftmost atom instead: beyond it every ``M_n`` vanishes and the sup over
    finitely many items would say nothing.
    """
    ref = seq.limit if isinstance(seq.limit, StieltjesString) else seq.items[0]
    lo = min(s.l_minus for s in seq.items)
    if lo < ref.l_minus:
        return lo + (ref.l_minus - lo) * 2.0 ** -np.arange(n)
    span = max(1.0, ref.l_plus - ref.l_minus)
    return ref.l_minus - span * 2.0 ** np.arange(n)


def _string_grid(seq: StringSequence, n: int = 256) -> np.ndarray:
    """Continuity points: midpoints between the limit's atoms when it is a string.

    The generic grid clusters where cells are tiny and then mostly samples
    the jump noise of the coarse items.  Without a limit string the window is
    the first item's: pointwise convergence is judged on a fixed window, not
    one that follows drifting items.
    """
    strings = [s for s in (*seq.items, seq.limit) if isinstance(s, StieltjesString)]
    lim = seq.limit
    if isinstance(lim, StieltjesString) and lim.n_atoms >= 3:
        mid = 0.5 * (lim.positions[:-1] + lim.positions[1:])
        pts = mid[np.unique(np.linspace(0, mid.size - 1, min(n, mid.size)).astype(int))]
        return nudge_off(pts, _discontinuities(strings))
    return nudge_off(default_grid(seq.items[0], n=n), _discontinuities(strings))


def _phi_M_integral(s, phi, x: float) -> float:
    if isinstance(s, StieltjesString):
        if x > s.l:
            return math.inf
        if x <= s.l_minus:
            return 0.0
    return membership_E_phi(s, phi, x)[1]


def _level_point(F: Callable[[float], float], s: StieltjesString, level: float) -> float:
    """Leftmost ``x`` with ``F(x) >= level`` for a non-decreasing ``F`` vanishing left of ``s``."""
    hi = s.l if math.isfinite(s.l) else s.l_plus + 1.0
    while F(hi) < level:
        if math.isfinite(s.l):
            return s.l
        hi = s.l_plus + 2.0 * (hi - s.l_plus)
    return float(brentq(lambda x: F(x) - level, s.l_minus, hi, xtol=1e-12))


def _uniform_tail_verdict(xs, sups, levels, tol, label) -> ConditionResult:
    """Extrapolated sup along the ladder, plus a drift test along ``n``.

    Any finite family of atomic strings has vanishing tails far enough left,
    so the ladder alone cannot fail.  Mass escaping to ``-inf`` shows up as the
    level point ``F_n(x) = tol`` running off to the left without contracting.
    """
    lim = extrapolated_limit(sups)
    lv = np.asarray(levels, dtype=float)
    d0, d1 = lv[-2] - lv[-3], lv[-1] - lv[-2]
    drifting = bool(d1 < 0 and abs(d1) >= abs(d0) * (1 - 1e-6) and abs(d1) > tol * max(1.0, abs(lv[-1])))
    passed = lim <= tol and not drifting
    witness = (f"sup_n {label}(x) along x = {_fmt(xs)}: {_fmt(sups)}; "
               f"level-{tol:g} points per item {_fmt(lv)}" + ("; drifting to -inf" if drifting else ""))
    return ConditionResult(passed, math.inf if drifting else lim, witness)


def _string_conditions(seq: StringSequence, which, phi, tol, grid, x_ladder) -> dict:
    out = {}
    items, lim = seq.items, seq.limit
    if "A" in which:
        x = _string_grid(seq) if grid is None else np.asarray(grid, dtype=float)
        f = lambda a, b: float(np.max(np.abs(compactify(_mass(a, x)) - compactify(_mass(b, x)))))
        devs = _deviations(items, lim, f)
        out["A"] = _verdict(devs, tol, f"compactified sup-distance per item {_fmt(devs)}")
    xs = _x_ladder(seq) if x_ladder is None else np.asarray(x_ladder, dtype=float)
    if "B" in which:
        sups = [max(float(mass_integral_M(s, x)) if x <= s.l else math.inf for s in items) for x in xs]
        levels = [_level_point(lambda x, s=s: float(mass_integral_M(s, x)), s, tol) for s in items]
        out["B"] = _uniform_tail_verdict(xs, sups, levels, tol, "M_n")
    if "C" in which:
        sups = [max(_phi_M_integral(s, phi, x) for s in items) for x in xs]
        levels = [_level_point(lambda x, s=s: _phi_M_integral(s, phi, x), s, tol) for s in items]
        out["C"] = _uniform_tail_verdict(xs, sups, levels, tol, "int^x phi(M_n)")
    if "D" in which:
        if lim is not None and not isinstance(lim, StieltjesString):
            raise PreconditionError("condition D needs a string limit or none")
        x = _string_grid(seq) if grid is None else np.asarray(grid, dtype=float)
        x = x[x < max(s.l for s in (*items, lim) if s is not None)]
        x = x[np.linspace(0, x.size - 1, min(12, x.size)).astype(int)]

        def f(a, b):
            ia = np.array([_phi_M_integral(a, phi, t) for t in x])
            ib = np.array([_phi_M_integral(b, phi, t) for t in x])
            both = np.isinf(ia) & np.isinf(ib)
            with np.errstate(invalid="ignore"):
                gap = np.abs(ia - ib) / np.maximum(1.0, np.abs(ib))
            # past both ends counts as agreement, past one end as infinite
            gap = np.where(both, 0.0, np.where(np.isinf(ia) | np.isinf(ib), np.inf, gap))
            return float(np.max(gap)) if gap.size else 0.0

        devs = _deviations(items, lim, f)
        out["D"] = _verdict(devs, tol, f"relative gap of int^x phi(M_n) per item {_fmt(devs)}")
    return out


def _mass(obj, x):
    if isinstance(obj, StieltjesString):
        return np.asarray(mass_m(obj, x), dtype=float)
    return np.asarray(obj(x), dtype=float) * np.ones_like(x)


def _fmt(v) -> str:
    return "[" + ", ".join(f"{float(a):.3g}" for a in v) + "]"


def _phi_tilde_integral(sig: SpectralMeasure, phi, lam: float) -> float:
    """``int phi_tilde(xi - lam) sigma(d xi)``."""
    if sig.closed_form:
        fam = AlphaFamily(sig.closed_form["alpha"])
        g = lambda xi: phi_tilde(phi, xi - lam) * fam.sigma_density(xi)
        val, _ = integrate.quad(g, 0.0, math.inf, limit=400)
        return val
    return float(sum(w * phi_tilde(phi, x - lam) for x, w in zip(sig.xi, sig.weights)))


def _tail_phi_tilde(sig: SpectralMeasure, phi, N: float) -> float:
    if sig.closed_form:
        fam = AlphaFamily(sig.closed_form["alpha"])
        val, _ = integrate.quad(lambda xi: phi_tilde(phi, xi) * fam.sigma_density(xi), N, math.inf, limit=400)
        return val
    keep = sig.xi >= N
    return float(sum(w * phi_tilde(phi, x) for x, w in zip(sig.xi[keep], sig.weights[keep])))


def _small_time_moment(sig: SpectralMeasure, phi, eps: float) -> float:
    """``int_0^eps p(t) phi(t) dt``."""
    if sig.closed_form:
        val, _ = integrate.quad(lambda t: heat_trace(sig, t) * float(phi(t)), 0.0, eps, limit=400)
        return val
    return float(sum(w * partial_laplace(phi, x, eps) for x, w in zip(sig.xi, sig.weights)))


def _laplace_moment(sig: SpectralMeasure, phi, lam: float) -> float:
    """``int_0^inf p(t) phi(t) e^{lam t} dt`` by quadrature in ``t``."""
    g = lambda t: heat_trace(sig, t) * float(phi(t)) * math.exp(lam * t)
    head, _ = integrate.quad(g, 0.0, 1.0, limit=400, epsabs=0, epsrel=1e-10)
    tail, _ = integrate.quad(g, 1.0, math.inf, limit=400, epsabs=0, epsrel=1e-10)
    return head + tail


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(1.0, abs(b))


def _xi_grid(items, lim) -> np.ndarray:
    """Geometric midpoints between the limit's atoms, so item atoms converging
    onto a limit atom do not sit on either side of a probe for long."""
    if lim is not None and not lim.closed_form and lim.n_atoms:
        xi = lim.xi[lim.xi > 0] if np.any(lim.xi > 0) else lim.xi
        if xi.size and xi[0] > 0:
            mids = np.sqrt(xi[:-1] * xi[1:])
            return np.concatenate([[xi[0] / 2], mids, [xi[-1] * 2]])
    atoms = np.concatenate([s.xi for s in (*items, lim) if s is not None and s.n_atoms])
    lo, hi = (atoms.min(), atoms.max()) if atoms.size else (1e-3, 1e3)
    return nudge_off(np.geomspace(max(lo, 1e-12) / 10, hi * 10, 200), atoms)


def _spectrum_conditions(seq: SpectrumSequence, which, phi, tol, xi_grid, t_grid, lam_grid,
                         N_ladder, eps_ladder) -> dict:
    out = {}
    items, lim = seq.items, seq.limit
    if "A'" in which:
        if xi_grid is None:
            xi_grid = _xi_grid(items, lim)
        g = np.asarray(xi_grid, dtype=float)
        f = lambda a, b: float(np.max(np.abs(compactify(a.cumulative(g)) - compactify(b.cumulative(g)))))
        devs = _deviations(items, lim, f)
        out["A'"] = _verdict(devs, tol, f"compactified sup-distance of sigma_n per item {_fmt(devs)}")
    if "C'" in which:
        Ns = 4.0 ** np.arange(6) if N_ladder is None else np.asarray(N_ladder, dtype=float)
        sups = [max(_tail_phi_tilde(s, phi, N) for s in items) for N in Ns]
        out["C'"] = _verdict(sups, tol, f"sup_n tail of phi_tilde along N = {_fmt(Ns)}: {_fmt(sups)}")
    lams = (-0.1, -1.0, -10.0) if lam_grid is None else tuple(lam_grid)
    if "D'" in which:
        f = lambda a, b: max(_rel(_phi_tilde_integral(a, phi, l), _phi_tilde_integral(b, phi, l)) for l in lams)
        devs = _deviations(items, lim, f)
        out["D'"] = _verdict(devs, tol, f"relative gap of int phi_tilde(xi - lam) per item {_fmt(devs)}")
    if "A''" in which:
        t = np.geomspace(1e-2, 1e2, 25) if t_grid is None else np.asarray(t_grid, dtype=float)
        f = lambda a, b: float(np.max(np.abs(heat_trace(a, t) - heat_trace(b, t))
                                      / np.maximum(1.0, heat_trace(b, t))))
        devs = _deviations(items, lim, f)
        out["A''"] = _verdict(devs, tol, f"relative gap of p_n per item {_fmt(devs)}")
    if "C''" in which:
        eps = 10.0 ** -np.arange(1, 7) if eps_ladder is None else np.asarray(eps_ladder, dtype=float)
        sups = [max(_small_time_moment(s, phi, e) for s in items) for e in eps]
        out["C''"] = _verdict(sups, tol, f"sup_n int_0^eps p_n phi along eps = {_fmt(eps)}: {_fmt(sups)}")
    if "D''" in which:
        f = lambda a, b: max(_rel(_laplace_moment(a, phi, l), _laplace_moment(b, phi, l)) for l in lams)
        devs = _deviations(items, lim, f)
        out["D''"] = _verdict(devs, tol, f"relative gap of int p_n phi e^(lam t) per item {_fmt(devs)}")
    return out


def check_conditions(seq: StringSequence | SpectrumSequence, which: Iterable[str], phi: ScaleFunction | None = None,
                     tol: float = DEFAULT_TOL, grid=None, x_ladder=None, xi_grid=None, t_grid=None,
                     lam_grid=None, N_ladder=None, eps_ladder=None) -> ConvergenceReport:
    """Evaluate the requested conditions; primed ones on a string sequence use its spectra."""
    which = set(which)
    unknown = which - STRING_CONDITIONS - SPECTRUM_CONDITIONS
    if unknown:
        raise ValueError(f"unknown conditions {sorted(unknown)}")
    if which & NEEDS_PHI and phi is None:
        raise PreconditionError(f"conditions {sorted(which & NEEDS_PHI)} need a scale function")
    if len(seq.items) < 3:
        raise InsufficientData("need at least three sequence items")
    report = ConvergenceReport(tol=tol)
    if isinstance(seq, StringSequence):
        if which & STRING_CONDITIONS:
            report.conditions.update(_string_conditions(seq, which, phi, tol, grid, x_ladder))
        if which & SPECTRUM_CONDITIONS:
            report.conditions.update(_spectrum_conditions(seq.spectra(), which, phi, tol, xi_grid, t_grid,
                                                          lam_grid, N_ladder, eps_ladder))
    else:
        if which & STRING_CONDITIONS:
            raise ValueError("string conditions need a StringSequence")
        report.conditions.update(_spectrum_conditions(seq, which, phi, tol, xi_grid, t_grid, lam_grid,
                                                      N_ladder, eps_ladder))
    return report


def forward_continuity_harness(seq: StringSequence, lam_grid: Sequence[float], xy_grid: Sequence[float],
                               xi_grid=None, tol: float = DEFAULT_TOL) -> Report:
    """Green functions and spectral functions of ``seq.items`` against those of ``seq.limit``.

    Passes when (A) and (B) hold, the worst Green deviation decreases along the
    sequence, ``min`` of the last three ``l_n`` is at least ``l`` up to ``tol``,
    and the last spectral deviation is at most the first.
    """
    lim = seq.limit
    if not isinstance(lim, StieltjesString):
        raise PreconditionError("the forward harness needs a limit string")
    pre = check_conditions(seq, {"A", "B"}, tol=tol)
    x = np.asarray(xy_grid, dtype=float)
    end = min(s.l for s in (*seq.items, lim))
    x = x[x < end]
    X, Y = np.meshgrid(x, x, indexing="ij")
    green_devs = []
    for s in seq.items:
        dev = 0.0
        for lam in lam_grid:
            g_lim = green(lim, lam, X, Y)
            dev = max(dev, float(np.max(np.abs(green(s, lam, X, Y) - g_lim)) / np.max(np.abs(g_lim))))
        green_devs.append(dev)
    sig_lim = spectral_measure(lim, seq.boundary, seq.method)
    if xi_grid is None:
        # continuity points well away from the limit's atoms
        mids = np.sqrt(sig_lim.xi[:-1] * sig_lim.xi[1:])
        xi_grid = np.concatenate(([sig_lim.xi[0] / 2], mids[np.linspace(0, mids.size - 1, min(60, mids.size)).astype(int)]))
    g = np.asarray(xi_grid, dtype=float)
    sig_devs = [float(np.max(np.abs(spectral_measure(s, seq.boundary, seq.method).cumulative(g) - sig_lim.cumulative(g))
                             / np.maximum(1.0, sig_lim.cumulative(g)))) for s in seq.items]
    ls = [s.l for s in seq.items]
    liminf = min(ls[-3:])
    margins = {
        "conditions": 0.0 if pre.passed else -1.0,
        "green_monotone": 0.0 if all(b <= a * (1 + 1e-9) + 1e-15 for a, b in
                                     zip(green_devs[:-1], green_devs[1:])) else -1.0,
        "l_liminf": liminf - lim.l + tol * max(1.0, abs(lim.l)) if math.isfinite(lim.l) else 0.0,
        "sigma": sig_devs[0] - sig_devs[-1],
    }
    ratios = [a / b if b > 0 else math.inf for a, b in zip(green_devs[:-1], green_devs[1:])]
    details = {"green_dev": green_devs, "green_ratio": ratios, "sigma_dev": sig_devs, "l_n": ls,
               "conditions": pre.to_dict()["conditions"]}
    return Report("forward_continuity", min(margins.values()) >= 0, margins, details)


def inverse_continuity_harness(seq: SpectrumSequence, phi: ScaleFunction, c: float, grid=None, t_grid=None,
                               xi_window: float | None = None, tol: float = DEFAULT_TOL) -> Report:
    """Reconstruct ``m_n`` from ``sigma_n``, normalise to ``M_n(0) = c`` and compare with the limit.

    Each reconstructed string ends at 0; the normalising shift is recorded.
    When the limit is trivial (mass on ``[0, xi_window]`` below ``1e-12``) the
    harness checks ``sigma_n -> 0`` instead and raises :class:`DegenerateLimit`
    carrying that report.
    """
    if len(seq.items) < 3:
        raise InsufficientData("need at least three spectra")
    moments = [sum(w * partial_laplace(phi, x) for x, w in zip(s.xi, s.weights)) for s in seq.items]
    if not all(math.isfinite(v) for v in moments):
        raise PreconditionError("sup_n int_0^1 p_n phi dt is not finite")
    lim = seq.limit
    window = xi_window
    if window is None:
        atoms = np.concatenate([s.xi for s in seq.items])
        window = float(atoms.max()) if atoms.size else 1.0
    if lim is None or float(lim.cumulative(window)) <= NONTRIVIAL_MASS:
        g = np.geomspace(window * 1e-3, window, 40) if grid is None else np.asarray(grid, dtype=float)
        devs = [float(np.max(s.cumulative(g))) for s in seq.items]
        lim_est = extrapolated_limit(devs)
        rep = Report("inverse_continuity", lim_est <= tol, {"sigma_to_zero": tol - lim_est},
                     {"sigma_sup": devs, "degenerate": True})
        err = DegenerateLimit("limit spectral measure is trivial; checked sigma_n -> 0 instead")
        err.report = rep
        raise err
    try:
        strings = [normalize_to_Ec(reconstruct_from_spectrum(s, 0.0), c) for s in seq.items]
        target = normalize_to_Ec(reconstruct_from_spectrum(lim, 0.0), c)
    except NormalizationImpossible as e:
        raise PreconditionError(f"cannot normalise to M(0) = {c}: {e}") from e
    shifts = [-s.l for s in strings]
    x = default_grid(*strings, target) if grid is None else np.asarray(grid, dtype=float)
    x = nudge_off(x, _discontinuities([*strings, target]))
    devs = [float(np.max(np.abs(compactify(mass_m(s, x)) - compactify(mass_m(target, x))))) for s in strings]
    t = np.geomspace(1e-2, 1e2, 25) if t_grid is None else np.asarray(t_grid, dtype=float)
    p_lim = heat_trace(lim, t)
    p_devs = [float(np.max(np.abs(heat_trace(s, t) - p_lim) / p_lim)) for s in seq.items]
    margins = {"strings": tol - extrapolated_limit(devs), "heat_trace": tol - extrapolated_limit(p_devs)}
    details = {"string_dev": devs, "heat_dev": p_devs, "shifts": shifts, "phi_moments": moments}
    return Report("inverse_continuity", min(margins.values()) >= 0, margins, details)


def phi_space_equivalence_check(obj, phi: ScaleFunction, boundary: float | None = None) -> Report:
    """Finiteness of ``int phi(M)`` against finiteness of ``int phi_tilde d sigma``.

    ``obj`` is an atomic string (both sides finite) or an :class:`AlphaFamily`,
    whose closed-form measure can make either side diverge.
    """
    if isinstance(obj, AlphaFamily):
        e_fin, e_val = membership_E_phi(obj, phi)
        s_fin, s_val = membership_S_phi(obj, phi)
    else:
        a = obj.l if boundary is None else boundary
        e_fin, e_val = membership_E_phi(obj, phi, a)
        s_fin, s_val = membership_S_phi(spectral_measure(obj, boundary), phi)
    agree = bool(e_fin) == bool(s_fin)
    return Report("phi_space_equivalence", agree, {"agreement": 0.0 if agree else -1.0},
                  {"string_side": {"finite": e_fin, "value": e_val},
                   "spectral_side": {"finite": s_fin, "value": s_val}})
