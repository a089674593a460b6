import dataclasses
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from ratdyn.cases import (
    Case166Branch,
    ConjectureCase,
    ConjectureProbeReport,
    GASVerdict,
    Growth,
    Horn,
    InequalityTag,
    ProbeOrbit,
    audit_830_inequalities,
    case_params,
    classify_166,
    growth_rate,
    probe_conjecture,
    simulate_case,
    verify_bounded_830,
    verify_gas_166,
)
from ratdyn.intervals import MMVerdict
from ratdyn.recurrence import DomainError, ForbiddenSetError, Params166, Params830, simulate_reduced_830

SEEDS = [(0, 0), (5, 0.1), (0.3, 7)]


# -- classification -------------------------------------------------------------

@pytest.mark.parametrize("a, b, A, branch", [
    (2, 1, 1, Case166Branch.A_LE_ALPHA),
    (1, 1, 2, Case166Branch.MIDDLE_SPECIAL),
    (1, 1, 3, Case166Branch.A_GT_ALPHA_PLUS_BETA),
    (1, 1, 1.5, Case166Branch.MIDDLE),
    (1, 1, 1, Case166Branch.A_LE_ALPHA),
])
def test_classify_examples(a, b, A, branch):
    assert classify_166(Params166(a, b, A)) is branch


def test_classify_is_exact_at_rounding_boundary():
    # 0.1 + 0.2 rounds to 0.30000000000000004 in floating point
    assert classify_166(Params166(0.1, 0.2, 0.3)) is Case166Branch.MIDDLE
    assert classify_166(Params166(0.5, 0.25, 0.75)) is Case166Branch.MIDDLE_SPECIAL


@given(st.floats(1e-3, 1e3), st.floats(1e-3, 1e3), st.floats(1e-3, 1e3))
def test_classify_exhaustive(a, b, A):
    tag = classify_166(Params166(a, b, A))
    from fractions import Fraction as F
    fa, fb, fA = F(a), F(b), F(A)
    expected = [fA <= fa, fa < fA < fa + fb, fA == fa + fb, fA > fa + fb]
    assert sum(expected) == 1
    order = [Case166Branch.A_LE_ALPHA, Case166Branch.MIDDLE,
             Case166Branch.MIDDLE_SPECIAL, Case166Branch.A_GT_ALPHA_PLUS_BETA]
    assert tag is order[expected.index(True)]


# -- verify_gas_166 ---------------------------------------------------------------

def test_verify_special_subcase():
    r = verify_gas_166(Params166(1, 1, 2), SEEDS, tol=1e-6, max_steps=10**5)
    assert r.verdict is GASVerdict.ALL_CONVERGED
    assert r.branch is Case166Branch.MIDDLE_SPECIAL
    assert r.equilibrium.value == 1.0
    for o in r.orbits:
        assert o.terminal_deviation < 1e-6
        if o.horn is Horn.ENTERED_INVARIANT_INTERVAL:
            assert o.reduced_terminal is not None and o.reduced_terminal < 1e-6


def test_verify_A_le_alpha():
    r = verify_gas_166(Params166(2, 1, 1), SEEDS, tol=1e-6, max_steps=10**5)
    assert r.verdict is GASVerdict.ALL_CONVERGED
    xbar = oracles.equilibrium_166(2, 1, 1)
    assert xbar == pytest.approx(2.0, abs=1e-12)   # root of x^2 - x - 2
    assert r.equilibrium.value == pytest.approx(xbar, abs=1e-12)
    assert all(abs(o.terminal_value - xbar) < 1e-6 for o in r.orbits)


def test_verify_attaches_mm_certificate():
    r = verify_gas_166(Params166(1, 1, 3), SEEDS)
    assert r.verdict is GASVerdict.ALL_CONVERGED
    assert r.mm_verdict is MMVerdict.GAS_CERTIFIED
    assert r.mm_envelopes.gap < 1e-9


def test_equilibrium_seed_settles_at_zero():
    p = Params166(1, 1, 1)
    x = oracles.equilibrium_166(1, 1, 1)
    r = verify_gas_166(p, [(x, x)], max_steps=10)
    assert r.orbits[0].terminal_deviation <= 1e-6
    assert r.orbits[0].steps_used == 0


def test_verify_inconclusive_on_short_horizon():
    r = verify_gas_166(Params166(1, 1, 1), [(10, 0)], max_steps=3)
    assert r.verdict is GASVerdict.INCONCLUSIVE
    assert "tol" in r.cause


def test_verify_rejects_bad_input():
    with pytest.raises(ValueError):
        verify_gas_166(Params166(1, 1, 1), [], tol=1e-6)
    with pytest.raises(ValueError):
        verify_gas_166(Params166(1, 1, 1), SEEDS, tol=0)


def test_gas_report_json():
    d = verify_gas_166(Params166(1, 1, 2), SEEDS).to_dict()
    assert d["branch"] == "MiddleSpecial_AeqAlphaPlusBeta"
    assert d["verdict"] == "AllConverged"
    assert len(d["orbits"]) == 3


@pytest.mark.parametrize("branch_params", [(0.5, 1, 0.25), (1, 2, 2), (0.25, 0.25, 4)])
def test_verify_each_branch_default_seeds(branch_params):
    r = verify_gas_166(Params166(*branch_params))
    assert r.verdict is GASVerdict.ALL_CONVERGED
    assert len(r.orbits) == 9


# -- #(8,30) ---------------------------------------------------------------------------

def test_bounded_fixed_point():
    a = verify_bounded_830(Params830(1, 1), [(1, 1)], max_steps=10**6)
    assert a.sup_x == 1.0 and a.sup_y == 1.0
    assert a.passed and a.violation_count == 0


def test_bounded_generic_seed():
    a = verify_bounded_830(Params830(1, 1), [(2, 3)], max_steps=10**6)
    assert a.passed
    assert math.isfinite(a.sup_x) and math.isfinite(a.sup_y)
    assert a.min_slack_3 > 0 and a.min_slack_4 > 0
    assert a.steps_audited > 0


def test_bounded_stress_case():
    a = verify_bounded_830(Params830(0.01, 10), [(100, 0.01)], max_steps=10**6)
    assert a.passed and not a.overflow
    assert a.max_rel_deviation <= 1e-9


def test_bounded_rejects_nonpositive_seed():
    with pytest.raises(DomainError):
        verify_bounded_830(Params830(1, 1), [(0, 1)])


def test_bounded_overflow_is_flagged_not_disproof():
    from ratdyn.recurrence import GuardConfig
    a = verify_bounded_830(Params830(1, 1), [(100, 0.01)], max_steps=1000, guards=GuardConfig(overflow=50))
    assert a.overflow and not a.passed
    assert any("OverflowSuspect" in f for f in a.flags)


def test_audit_detects_planted_violation():
    p = Params830(1, 1)
    t = simulate_reduced_830(p, 2.0, 1.5, 20)
    x = np.array(t.values)
    x[10] *= 1e6
    m3, *_ , m4, _, _ = audit_830_inequalities(p, x)
    assert m3[10 - 3]
    a = verify_bounded_830(p, [(2, 3)], max_steps=20)
    assert a.violation_count == 0


def test_subsequence_note_present():
    a = verify_bounded_830(Params830(0.5, 2), [(3, 0.2)], max_steps=1000)
    assert a.subsequence_note is None or a.subsequence_note["x"] >= a.subsequence_note["x_minus_3"]
    assert a.to_dict()["passed"] is True


@given(st.floats(0.01, 100), st.floats(0.01, 100), st.floats(0.01, 100), st.floats(0.01, 100))
@settings(max_examples=25)
def test_bounded_property(a, g, x0, y0):
    audit = verify_bounded_830(Params830(a, g), [(x0, y0)], max_steps=10**4)
    assert audit.passed, audit.flags or audit.inequality_violations[:3]


# -- probes --------------------------------------------------------------------------

def test_probe_6_25_reports_x_only():
    t = simulate_case("6,25", {"eps": 1.0}, (1, 1), 50)
    assert t.y[0] == 1 and t.y[1] == 2
    # x decays geometrically, so y saturates in floating point; strict early on
    assert np.all(np.diff(t.y) >= 0) and np.all(np.diff(t.y[:15]) > 0)
    r = probe_conjecture("6,25", {"eps": 1.0}, [(1, 1)], max_steps=10**4)
    assert r.orbits[0].max_value == pytest.approx(float(np.max(simulate_case("6,25", {"eps": 1.0}, (1, 1), 10**4).values)))
    assert r.disclaimer


def test_probe_68_bounded():
    r = probe_conjecture("68", {"alpha": 1, "A": 1, "C": 1}, [(0, 0), (3, 0.2)], max_steps=10**5)
    assert all(o.growth is Growth.APPARENTLY_BOUNDED for o in r.orbits)


def test_probe_70_fixed_point():
    t = simulate_case("70", {"alpha": 1, "C": 1}, (1, 1, 1), 100)
    assert np.all(t.values == 1.0)
    r = probe_conjecture("70", {"alpha": 1, "C": 1}, [(1, 1, 1)], max_steps=1000)
    assert r.orbits[0].growth is Growth.APPARENTLY_BOUNDED


def test_probe_141_allows_A_zero():
    r = probe_conjecture("141", {"alpha": 1, "A": 0, "C": 1}, [(1, 2)], max_steps=10**4)
    assert r.case_id is ConjectureCase.C141
    with pytest.raises(DomainError):
        case_params("68", {"alpha": 1, "A": 0, "C": 1})


def test_probe_seed_arity():
    with pytest.raises(ValueError):
        probe_conjecture("70", {"alpha": 1, "C": 1}, [(1, 1)])


def test_probe_forbidden_propagates():
    with pytest.raises(ForbiddenSetError):
        probe_conjecture("141", {"alpha": 1, "A": 0, "C": 1}, [(0, 0)], max_steps=10)


def test_growth_rate_signals():
    n = 10**5
    assert growth_rate(np.ones(n)) == pytest.approx(0.0, abs=1e-12)
    assert growth_rate(np.exp(np.arange(n) * 1e-4)) == pytest.approx(0.1, rel=1e-6)


def test_probe_honesty_type_level():
    names = {m.name.lower() for m in Growth} | {m.value.lower() for m in Growth}
    assert not any("proved" in n or "proof" in n for n in names)
    types = {f.type for f in dataclasses.fields(ProbeOrbit)} | {f.type for f in dataclasses.fields(ConjectureProbeReport)}
    assert not any("Verdict" in str(t) for t in types)
    r = probe_conjecture("68", {"alpha": 1, "A": 1, "C": 1}, [(1, 1)], max_steps=100)
    with pytest.raises(AttributeError):
        r.disclaimer = False
    d = r.to_dict()
    assert d["disclaimer"] is True and "not a proof" in d["disclaimer_text"]


def test_inequality_tags():
    assert {t.value for t in InequalityTag} == {"Ineq_8_30_3", "Ineq_8_30_4"}
