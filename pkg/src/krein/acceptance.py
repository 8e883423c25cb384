"""The fourteen acceptance criteria as plain functions.

Each returns a :class:`CriterionResult`; ``tests/test_acceptance.py`` and the
``selftest`` subcommand both call :func:`run`.  Random corpora come from
``Generator(Philox(seed))`` with fixed seeds, so every run sees the same cases.
"""

from __future__ import annotations

import math
import sys
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .asymptotics import (
    AlphaFamily,
    RegVarying,
    check_scaling_covariance,
    closed_form_p,
    discretize_alpha_string,
    uniform_scaled_heat_bound,
    verify_heat_trace_asymptotics,
    verify_small_spectrum_constant,
)
from .correspondence import SpectrumSequence, StringSequence, forward_continuity_harness, inverse_continuity_harness
from .propagation import green, phi
from .scales import Power, PowerLog, Tabulated, check_heat_moment_bounds, check_trace_sandwich
from .spectral import (dirichlet_eigs, parseval_defect, reconstruct_from_spectrum, spectral_measure,
                       green_expansion_terms)
from .stochastic import verify_mgf_identity, verify_occupation_identity, verify_tilted_identity
from .strings import MassFunction, StieltjesString, shift

__all__ = ["CriterionResult", "CRITERIA", "run", "random_string", "rng"]

SEED = 20240611


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    summary: str
    seconds: float = 0.0
    details: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"criterion {self.number:2d} {status}  {self.title}: {self.summary} ({self.seconds:.2f} s)"


def rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed)))


def random_string(r: np.random.Generator, n_max: int = 12, n_min: int = 1, finite_l: bool = True,
                  span: float = 10.0) -> StieltjesString:
    """Atoms spread over ``[-span, 0]`` with gaps at least ``1e-2``, masses log-uniform in ``[0.05, 5]``."""
    n = int(r.integers(n_min, n_max + 1))
    while True:
        x = np.sort(r.uniform(-span, 0.0, n))
        if n == 1 or np.diff(x).min() > 1e-2:
            break
    w = np.exp(r.uniform(math.log(0.05), math.log(5.0), n))
    l = float(x[-1] + r.uniform(0.1, 3.0)) if finite_l else math.inf
    return StieltjesString(x, w, l)


def _rel(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b)) / np.abs(np.asarray(b))))


def criterion_1() -> CriterionResult:
    r = rng(SEED + 1)
    worst = 0.0
    for _ in range(100):
        s = random_string(r, finite_l=False)
        a = float(r.uniform(s.positions[0] + 1e-3, s.positions[-1] + 3.0))
        mu = dirichlet_eigs(s, a).eigenvalues
        Ma = float(MassFunction(s)(a))
        worst = max(worst, abs((1.0 / mu).sum() - Ma) / Ma)
    return CriterionResult(1, "trace identity", worst <= 1e-10, f"worst relative error {worst:.2e}",
                           details={"worst": worst})


def criterion_2() -> CriterionResult:
    r = rng(SEED + 1)
    worst = 0.0
    lams = (-0.1, -1.0, -10.0, -100.0)
    for _ in range(100):
        s = random_string(r, finite_l=False)
        a = float(r.uniform(s.positions[0] + 1e-3, s.positions[-1] + 3.0))
        mu = dirichlet_eigs(s, a).eigenvalues
        for lam in lams:
            prod = float(np.prod(1.0 - lam / mu))
            worst = max(worst, abs(phi(s, lam, a).value - prod) / prod)
    return CriterionResult(2, "product formula", worst <= 1e-8, f"worst relative error {worst:.2e}",
                           details={"worst": worst})


def criterion_3() -> CriterionResult:
    r = rng(SEED + 3)
    worst = 0.0
    for _ in range(100):
        s = random_string(r)
        f = r.normal(size=s.n_atoms)
        worst = max(worst, parseval_defect(s, f, spectral_measure(s)))
    return CriterionResult(3, "Parseval identity", worst <= 1e-9, f"worst relative defect {worst:.2e}",
                           details={"worst": worst})


def _gap_index(s: StieltjesString, x: float) -> int:
    return int(np.searchsorted(s.positions, x, side="right"))


def criterion_4() -> CriterionResult:
    """x and y are drawn from different open gaps between atoms.

    Inside one gap the Green function has a kink at ``x = y`` while every term
    of the eigen-expansion is affine, so the expansion only represents it
    away from that case.  The summary also gives the condition number
    ``sum |terms| / |g|`` at the worst sample: the eigen-sum cannot be more
    accurate than about ``1e-16`` times that in double precision.
    """
    r = rng(SEED + 4)
    worst, cond_at_worst, scaled = 0.0, 1.0, 0.0
    done = 0
    while done < 50:
        s = random_string(r, n_min=2)
        lam = -float(10 ** r.uniform(-2, 2))
        x, y = r.uniform(s.positions[0] - 2.0, s.l, 2)
        if _gap_index(s, x) == _gap_index(s, y):
            continue
        sig = spectral_measure(s)
        direct = float(green(s, lam, x, y))
        terms = green_expansion_terms(s, sig, lam, x, y)
        err = abs(float(terms.sum()) - direct)
        if err / direct > worst:
            worst, cond_at_worst = err / direct, float(np.abs(terms).sum()) / direct
        scaled = max(scaled, err / float(np.abs(terms).sum()))
        done += 1
    return CriterionResult(4, "Green spectral expansion", worst <= 1e-8,
                           f"worst relative error {worst:.2e} (condition {cond_at_worst:.1e}; "
                           f"error over sum of |terms| {scaled:.1e})",
                           details={"worst": worst, "condition_at_worst": cond_at_worst, "scaled": scaled})


def criterion_5() -> CriterionResult:
    r = rng(SEED + 5)
    worst_sig = worst_str = 0.0
    for _ in range(50):
        s = random_string(r, n_min=5, n_max=5)
        sig = spectral_measure(s)
        rec = reconstruct_from_spectrum(sig, 0.0)
        sig2 = spectral_measure(rec)
        worst_sig = max(worst_sig, _rel(sig2.xi, sig.xi), _rel(sig2.weights, sig.weights))
        offset = float(np.mean(rec.positions - s.positions))
        worst_str = max(worst_str, float(np.max(np.abs(rec.positions - offset - s.positions))),
                        _rel(rec.masses, s.masses))
    ok = worst_sig <= 1e-6 and worst_str <= 1e-6
    return CriterionResult(5, "spectrum round trip", ok,
                           f"spectrum deviation {worst_sig:.2e}, aligned string deviation {worst_str:.2e}",
                           details={"spectrum": worst_sig, "string": worst_str})


def criterion_6() -> CriterionResult:
    """Atoms are compared relatively, weights as ``max |dw| / sum w``."""
    r = rng(SEED + 6)
    worst = 0.0
    for _ in range(100):
        s = random_string(r)
        c = float(r.uniform(-20, 20))
        a, b = spectral_measure(s), spectral_measure(shift(s, c))
        worst = max(worst, _rel(b.xi, a.xi), float(np.max(np.abs(b.weights - a.weights)) / a.weights.sum()))
    return CriterionResult(6, "shift invariance", worst <= 1e-10, f"worst deviation {worst:.2e}",
                           details={"worst": worst})


def criterion_7() -> CriterionResult:
    r = rng(SEED + 7)
    worst_sig = worst_p = 0.0
    for _ in range(50):
        s = random_string(r)
        nu = float(10 ** r.uniform(-2, 2))
        b = float(10 ** r.uniform(-2, 2))
        rep = check_scaling_covariance(s, nu, b, np.geomspace(1e-2, 1e2, 9))
        worst_sig = max(worst_sig, rep.details["xi_dev"], rep.details["weight_dev"])
        worst_p = max(worst_p, rep.details["heat_dev"])
    ok = worst_sig <= 1e-10 and worst_p <= 1e-10
    return CriterionResult(7, "scaling covariance", ok,
                           f"sigma transform {worst_sig:.2e}, heat trace {worst_p:.2e}",
                           details={"sigma": worst_sig, "heat": worst_p})


def _random_scale(r: np.random.Generator):
    kind = int(r.integers(0, 3))
    if kind == 0:
        return Power(float(r.uniform(1.0, 3.5)))
    if kind == 1:
        a = float(r.uniform(1.5, 3.0))
        return PowerLog(a, (2 * a - 1) / (a * (a - 1)) * float(r.uniform(1.0, 3.0)))
    # convex piecewise-linear: increasing slopes, scaled so phi(1) = 1
    slopes = np.sort(r.uniform(0.1, 3.0, 4))
    ys = np.concatenate(([0.0], np.cumsum(slopes) / 4))
    return Tabulated(tuple(np.linspace(0, 1, 5)), tuple(ys / ys[-1]))


def criterion_8() -> CriterionResult:
    """Both estimates use ``E Z = 2 sum 1/(mu - lam)``; unit-mean margins are reported alongside."""
    r = rng(SEED + 8)
    worst = math.inf
    worst_literal = math.inf
    for _ in range(100):
        s = random_string(r, n_max=8, finite_l=False, span=6.0)
        a = float(r.uniform(s.positions[0] + 1e-2, s.positions[-1] + 2.0))
        lam = -float(10 ** r.uniform(-2, 2))
        ph = _random_scale(r)
        sand = check_trace_sandwich(s, a, lam)
        heat = check_heat_moment_bounds(s, ph, lam, boundary=a, split=min(a, s.l_plus))
        worst = min(worst, *sand.margins.values(), *heat.margins.values())
        worst_literal = min(worst_literal, *heat.details["unit_mean"].values())
    return CriterionResult(8, "trace sandwich and heat-moment bounds", worst >= -1e-12,
                           f"worst margin {worst:.3g} (unit-mean convention: {worst_literal:.3g})",
                           details={"worst": worst, "unit_mean_worst": worst_literal})


def criterion_9() -> CriterionResult:
    reports = [verify_mgf_identity(StieltjesString([0.0], [2.0], 1.0), 1.0, -1.0, 200_000, seed=SEED)]
    single = reports[0].details
    r = rng(SEED + 9)
    for i in range(5):
        s = random_string(r, n_max=6)
        lam = -float(10 ** r.uniform(-1, 0.5))
        reports.append(verify_mgf_identity(s, s.l, lam, 200_000, seed=SEED + 100 + i))
    s = random_string(r, n_max=5)
    reports.append(verify_tilted_identity(s, s.l, -1.0, Power(2.0), 200_000, seed=SEED + 200))
    f = lambda t: t * np.exp(-t)
    reports.append(verify_occupation_identity(StieltjesString([0.0], [2.0], 1.0), f, 50_000, seed=SEED + 300))
    reports.append(verify_occupation_identity(random_string(r, n_max=4), f, 50_000, seed=SEED + 301))
    ok = all(rep.passed for rep in reports) and abs(single["exact"] - 1 / 9) < 1e-14
    zs = [rep.details.get("z", 0.0) for rep in reports if "z" in rep.details]
    gaps = [rep.details["relative_gap"] for rep in reports if "relative_gap" in rep.details]
    return CriterionResult(9, "Monte Carlo identities", ok,
                           f"single atom {single['mc']:.5f} vs 1/9 (SE {single['se']:.1e}); "
                           f"max |z| {max(abs(z) for z in zs):.2f}; occupation gaps {', '.join(f'{g:.2%}' for g in gaps)}",
                           details={"reports": [rep.to_dict() for rep in reports]})


def criterion_10() -> CriterionResult:
    p2, p3 = closed_form_p(AlphaFamily(2.0), 1.0), closed_form_p(AlphaFamily(3.0), 1.0)
    closed = abs(p2 - 8.0) < 1e-12 and abs(p3 - 121.5) < 1e-10
    rep = verify_heat_trace_asymptotics(AlphaFamily(2.0))
    rows = rep.details["ladder"]
    finest = rows[-1]
    inside = 0.9 <= finest["ratio_min"] and finest["ratio_max"] <= 1.1
    ok = closed and inside and rep.passed
    devs = ", ".join(f"{x['max_dev']:.2e}" for x in rows)
    return CriterionResult(10, "power-law heat trace", ok,
                           f"p_2(1)={p2:.12g}, p_3(1)={p3:.12g}; ratio in [{finest['ratio_min']:.4f}, "
                           f"{finest['ratio_max']:.4f}], deviations {devs}",
                           details=rep.to_dict())


def criterion_11() -> CriterionResult:
    rep = verify_small_spectrum_constant(AlphaFamily(2.0), [1e-1, 1e-2, 1e-3])
    ratio = float(rep.details["ratio"][-1]) * AlphaFamily(2.0).sigma_constant
    return CriterionResult(11, "small-spectrum constant", rep.passed,
                           f"sigma(1e-3)/1e-6 = {ratio:.4f} (target 4)", details=rep.to_dict())


def criterion_12() -> CriterionResult:
    fam = AlphaFamily(2.0)
    items = [discretize_alpha_string(fam, -20.0, -1e-2, n) for n in (50, 100, 200, 400)]
    limit = discretize_alpha_string(fam, -20.0, -1e-2, 3200)
    rep = forward_continuity_harness(StringSequence(items, limit, method="tridiagonal"),
                                     [-0.1, -1.0, -10.0], np.linspace(-5.0, -0.05, 12))
    ratios = rep.details["green_ratio"]
    ok = rep.passed and min(ratios) >= 1.8
    return CriterionResult(12, "forward continuity", ok,
                           f"Green deviation ratios per refinement {', '.join(f'{x:.2f}' for x in ratios)}",
                           details=rep.to_dict())


def criterion_13() -> CriterionResult:
    s = StieltjesString([-7.0, -5.5, -4.0, -3.0, -2.2, -1.4, -0.7, -0.3],
                        [0.3, 0.5, 0.8, 0.6, 1.1, 0.9, 0.4, 0.7], 0.0)
    sig = spectral_measure(s)
    seq = SpectrumSequence([sig.truncate(k) for k in range(3, 9)], sig)
    rep = inverse_continuity_harness(seq, Power(2.0), c=1.0)
    last = rep.details["string_dev"][-1]
    return CriterionResult(13, "inverse continuity", rep.passed and last <= 1e-6,
                           f"compactified deviation at full spectrum {last:.2e}; "
                           f"ladder {', '.join(f'{x:.2e}' for x in rep.details['string_dev'])}",
                           details=rep.to_dict())


def criterion_14() -> CriterionResult:
    fam = AlphaFamily(2.0)
    sig = spectral_measure(discretize_alpha_string(fam, -50.0, -1e-3, 2000), method="tridiagonal")
    rep = uniform_scaled_heat_bound(sig, fam, RegVarying(1.0), Power(2.0))
    v = rep.details["integrals"]
    return CriterionResult(14, "uniform scaled heat bound", rep.passed,
                           f"integrals {', '.join(f'{x:.4f}' for x in v)}; max/min {rep.details['max_over_min']:.3f}",
                           details=rep.to_dict())


CRITERIA: dict[int, Callable[[], CriterionResult]] = {
    1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
    6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9, 10: criterion_10,
    11: criterion_11, 12: criterion_12, 13: criterion_13, 14: criterion_14,
}


def run(numbers=None, stream=sys.stdout) -> list[CriterionResult]:
    """Run the selected criteria (all by default), printing one line each."""
    out = []
    for k in numbers or sorted(CRITERIA):
        t0 = time.perf_counter()
        res = CRITERIA[k]()
        res.seconds = time.perf_counter() - t0
        if stream is not None:
            print(res.line(), file=stream, flush=True)
        out.append(res)
    return out
