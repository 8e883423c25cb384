import json
import math

import numpy as np
import pytest

from krein import AlphaFamily
from krein.correspondence import (
    ConvergenceReport,
    SpectrumSequence,
    StringSequence,
    check_conditions,
    extrapolated_limit,
    forward_continuity_harness,
    inverse_continuity_harness,
    phi_space_equivalence_check,
)
from krein.asymptotics import discretize_alpha_string
from krein.errors import DegenerateLimit, InsufficientData, PreconditionError
from krein.scales import Power
from krein.spectral import SpectralMeasure, spectral_measure
from krein.strings import StieltjesString, shift

BASE = StieltjesString([-2.0, -1.0, -0.4], [1.0, 0.5, 2.0], 0.5)
PHI = Power(2.0)
STRING_CONDS = ["A", "B", "C", "D"]
SPEC_CONDS = ["A'", "C'", "D'", "A''", "C''", "D''"]


def _verdicts(rep):
    return {k: r.passed for k, r in rep.conditions.items()}


def test_extrapolated_limit_geometric():
    v = [1.0 + 0.5 ** k for k in range(1, 8)]
    assert extrapolated_limit(v) == pytest.approx(1.0, abs=1e-12)


def test_extrapolated_limit_needs_three():
    with pytest.raises(InsufficientData):
        extrapolated_limit([1.0, 0.5])


def test_constant_sequence_passes_with_zero_margin():
    seq = StringSequence([BASE] * 4, BASE)
    rep = check_conditions(seq, STRING_CONDS + SPEC_CONDS, PHI)
    assert rep.passed
    assert all(r.margin == 0.0 for r in rep.conditions.values())


def test_mass_drifting_right_converges_to_zero():
    # m(x - n): the atoms leave through the right end, m_n -> 0 pointwise
    seq = StringSequence([shift(BASE, -n) for n in range(1, 7)], lambda x: 0.0 * np.asarray(x))
    rep = check_conditions(seq, ["A"])
    assert rep["A"].passed


def test_mass_drifting_left_fails_uniform_tails():
    # m(x + n): all mass escapes to -inf
    seq = StringSequence([shift(BASE, n) for n in range(1, 6)])
    rep = check_conditions(seq, ["B", "C"], PHI)
    assert not rep["B"].passed
    assert not rep["C"].passed
    assert "drifting" in rep["B"].witness


def test_drift_against_fixed_limit_fails_a_and_d():
    seq = StringSequence([shift(BASE, n) for n in range(1, 6)], shift(BASE, 1))
    rep = check_conditions(seq, STRING_CONDS, PHI)
    assert not rep["A"].passed and not rep["D"].passed


def test_condition_d_needs_string_limit():
    seq = StringSequence([BASE] * 3, lambda x: 0.0 * np.asarray(x))
    with pytest.raises(PreconditionError):
        check_conditions(seq, ["D"], PHI)


def test_missing_scale_function():
    with pytest.raises(PreconditionError):
        check_conditions(StringSequence([BASE] * 3, BASE), ["C"])


def test_too_few_items():
    with pytest.raises(InsufficientData):
        check_conditions(StringSequence([BASE, BASE], BASE), ["A"])


def test_unknown_condition():
    with pytest.raises(ValueError):
        check_conditions(StringSequence([BASE] * 3, BASE), ["Z"])


def test_truncated_spectra_converge():
    sig = spectral_measure(StieltjesString([-7.0, -5.5, -4.0, -3.0, -2.2, -1.4, -0.7, -0.3],
                                           [0.3, 0.5, 0.8, 0.6, 1.1, 0.9, 0.4, 0.7], 0.0))
    seq = SpectrumSequence([sig.truncate(k) for k in range(3, 9)], sig)
    rep = check_conditions(seq, ["A'", "C'"], PHI)
    assert rep.passed


def _mass_perturb():
    return StringSequence([StieltjesString([-2.0, -1.0, -0.4], [1.0 + 1.0 / n, 0.5, 2.0], 0.5)
                           for n in (1, 2, 4, 8, 16, 32)], BASE)


def _far_light_atom():
    return StringSequence([StieltjesString([-2.0 * n, -2.0, -1.0, -0.4], [1.0 / n ** 3, 1.0, 0.5, 2.0], 0.5)
                           for n in (2, 4, 8, 16, 32)], BASE)


def _far_heavy_atom():
    return StringSequence([StieltjesString([-2.0 * n, -2.0, -1.0, -0.4], [1.0 / n, 1.0, 0.5, 2.0], 0.5)
                           for n in (2, 4, 8, 16, 32)], BASE)


@pytest.mark.parametrize("make", [_mass_perturb, _far_light_atom, _far_heavy_atom,
                                  lambda: StringSequence([BASE] * 3, BASE)])
def test_a_and_c_iff_d(make):
    rep = check_conditions(make(), STRING_CONDS, PHI)
    v = _verdicts(rep)
    assert (v["A"] and v["C"]) == v["D"]


@pytest.mark.parametrize("make", [_mass_perturb, _far_light_atom, _far_heavy_atom])
def test_string_and_spectral_sides_agree(make):
    seq = make()
    s = _verdicts(check_conditions(seq, ["A", "C"], PHI))
    p = _verdicts(check_conditions(seq.spectra(), ["A'", "C'", "D'"], PHI))
    assert (s["A"] and s["C"]) == (p["A'"] and p["C'"])
    assert (p["A'"] and p["C'"]) == p["D'"]


def test_heavy_far_atom_fails_tails():
    rep = check_conditions(_far_heavy_atom(), ["B", "C"], PHI)
    assert not rep["B"].passed and not rep["C"].passed


def test_report_json_round_trip():
    rep = check_conditions(StringSequence([BASE] * 3, BASE), ["A", "C"], PHI)
    assert isinstance(rep, ConvergenceReport)
    doc = json.loads(rep.to_json())
    assert doc["schema_version"] == "1"
    assert set(doc["conditions"]) == {"A", "C"}
    assert doc["conditions"]["A"]["pass"] is True


def test_forward_harness_refinement():
    fam = AlphaFamily(2.0)
    items = [discretize_alpha_string(fam, -20.0, -1e-2, n) for n in (50, 100, 200, 400)]
    limit = discretize_alpha_string(fam, -20.0, -1e-2, 3200)
    rep = forward_continuity_harness(StringSequence(items, limit, method="tridiagonal"),
                                     [-0.1, -1.0, -10.0], np.linspace(-5.0, -0.05, 12))
    assert rep.passed
    assert min(rep.details["green_ratio"]) >= 1.8
    assert rep.margins["l_liminf"] >= 0


def test_forward_harness_needs_limit_string():
    with pytest.raises(PreconditionError):
        forward_continuity_harness(StringSequence([BASE] * 3), [-1.0], [-1.5])


def test_inverse_harness_recovers_string():
    s = StieltjesString([-7.0, -5.5, -4.0, -3.0, -2.2, -1.4, -0.7, -0.3],
                        [0.3, 0.5, 0.8, 0.6, 1.1, 0.9, 0.4, 0.7], 0.0)
    sig = spectral_measure(s)
    rep = inverse_continuity_harness(SpectrumSequence([sig.truncate(k) for k in range(3, 9)], sig), PHI, c=1.0)
    assert rep.passed
    assert rep.details["string_dev"][-1] <= 1e-6


def test_inverse_harness_shrinking_family():
    sig = spectral_measure(BASE)
    items = [SpectralMeasure(sig.xi, sig.weights / 4.0 ** n) for n in range(1, 8)]
    with pytest.raises(DegenerateLimit) as info:
        inverse_continuity_harness(SpectrumSequence(items), PHI, c=1.0)
    assert info.value.report.passed
    assert info.value.report.details["degenerate"]


def test_inverse_harness_too_few():
    sig = spectral_measure(BASE)
    with pytest.raises(InsufficientData):
        inverse_continuity_harness(SpectrumSequence([sig, sig], sig), PHI, c=1.0)


def test_phi_space_equivalence_finite():
    rep = phi_space_equivalence_check(AlphaFamily(2.0), Power(3.0))
    assert rep.passed
    assert rep.details["string_side"]["finite"] and rep.details["spectral_side"]["finite"]


def test_phi_space_equivalence_infinite():
    rep = phi_space_equivalence_check(AlphaFamily(3.0), Power(1.5))
    assert rep.passed
    assert not rep.details["string_side"]["finite"] and not rep.details["spectral_side"]["finite"]


def test_phi_space_equivalence_atomic():
    rep = phi_space_equivalence_check(BASE, PHI)
    assert rep.passed
    assert math.isfinite(rep.details["string_side"]["value"])
