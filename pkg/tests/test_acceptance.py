"""Acceptance criteria 1-8, each at its stated scale and tolerance.

Every test prints one ``[ACCEPTANCE n] PASS|FAIL ...`` line to the terminal
(pytest capture is bypassed for that line).  Run just this file with::

    pytest tests/test_acceptance.py -v
"""

import dataclasses
import enum
import inspect
import json
import math
import typing
from fractions import Fraction

import numpy as np
import pytest

import oracles
from ratdyn.cases import (
    ConjectureCase,
    ConjectureProbeReport,
    GASVerdict,
    Growth,
    ProbeOrbit,
    probe_conjecture,
    verify_bounded_830,
    verify_gas_166,
)
from ratdyn.intervals import BoundKind, CertificationFailed, MMVerdict, envelope_limit, mm_certify_166
from ratdyn.recurrence import (
    Params166,
    Params830,
    shift_identity_deviation,
    shift_identity_exact,
    step_second_order,
)
from ratdyn.stability import equilibria_166, local_stability_166
from ratdyn.sweep import ParamRange, SeedStrategy, SweepSpec, Target, emit_report, run_sweep

pytestmark = pytest.mark.slow


@pytest.fixture
def report(capsys):
    def emit(n: int, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\n[ACCEPTANCE {n}] {'PASS' if ok else 'FAIL'}  {detail}")
    return emit


def log_uniform(rng, low, high, size=None):
    return np.exp(rng.uniform(math.log(low), math.log(high), size))


# -- 1 -------------------------------------------------------------------------------

def test_criterion_1_gas_grid(report):
    grid = (0.25, 1.0, 4.0)
    triples = [(a, b, A) for a in grid for b in grid for A in grid] + [(1, 1, 2), (2, 1, 2)]
    seeds = [(a, b) for a in (0.0, 5.0, 10.0) for b in (0.0, 5.0, 10.0)]
    failures = []
    worst = 0.0
    for t in triples:
        p = Params166(*t)
        r = verify_gas_166(p, seeds, tol=1e-6, max_steps=10**5)
        xbar = equilibria_166(p).value
        dev = max(abs(o.terminal_value - xbar) for o in r.orbits)
        worst = max(worst, dev)
        if r.verdict is not GASVerdict.ALL_CONVERGED or not dev < 1e-6:
            failures.append((t, r.verdict.value, dev, r.cause))
    ok = not failures
    report(1, ok, f"{len(triples) - len(failures)}/{len(triples)} points AllConverged, "
                  f"worst |x_N - xbar| = {worst:.2e} (tol 1e-6)")
    assert ok, failures


# -- 2 -------------------------------------------------------------------------------

def test_criterion_2_mm_certification(report):
    rng = np.random.default_rng(20261016)
    triples = []
    while len(triples) < 50:
        a, b, A = log_uniform(rng, 1e-2, 1e2, 3)
        if A > a + b:
            triples.append((float(a), float(b), float(A)))
    failures = []
    worst_gap = worst_dev = 0.0
    max_it = 0
    for t in triples:
        pair, verdict = mm_certify_166(Params166(*t), tol=1e-9, max_iter=10**6)
        xbar = oracles.equilibrium_166(*t)
        dev = max(abs(pair.m_seq_terminal - xbar), abs(pair.M_seq_terminal - xbar))
        worst_gap, worst_dev = max(worst_gap, pair.gap), max(worst_dev, dev)
        max_it = max(max_it, pair.iterations)
        if verdict is not MMVerdict.GAS_CERTIFIED or not pair.gap < 1e-9 or not dev < 1e-9 \
                or not pair.iterations < 10**6:
            failures.append((t, verdict, pair.gap, dev))
    ok = not failures
    report(2, ok, f"{50 - len(failures)}/50 GAS-certified; max gap {worst_gap:.1e}, "
                  f"max |env - xbar| {worst_dev:.1e}, max iterations {max_it}")
    assert ok, failures


# -- 3 -------------------------------------------------------------------------------

def test_criterion_3_envelope_bound(report):
    rng = np.random.default_rng(3)
    checked = 0
    worst = 0.0
    failures = []
    while checked < 100:
        a, b, A = (float(v) for v in log_uniform(rng, 1e-2, 1e2, 3))
        if not A > b:
            continue
        checked += 1
        e = envelope_limit(a, b, A, epsilon=1e-10)
        closed = a / (A - b)
        err = abs(e.iterated_value - closed) / max(1.0, closed)
        worst = max(worst, err)
        if e.direction is not BoundKind.LOWER_EVENTUAL or not err <= 1e-9:
            failures.append((a, b, A, e.iterated_value, closed))
    unbounded = 0
    while unbounded < 100:
        a, b, A = (float(v) for v in log_uniform(rng, 1e-2, 1e2, 3))
        if A > b:
            continue
        unbounded += 1
        if envelope_limit(a, b, A).direction is not BoundKind.UNBOUNDED_BELOW_ENVELOPE:
            failures.append((a, b, A, "expected UnboundedBelowEnvelope"))
    # exact branch check at the boundary A == beta and one ulp above it
    if envelope_limit(1.0, 0.3, 0.3).direction is not BoundKind.UNBOUNDED_BELOW_ENVELOPE:
        failures.append("A == beta")
    # one ulp above: the bounded branch is taken, though the envelope (ratio
    # 1 - 1e-16) cannot settle in any practical budget
    try:
        envelope_limit(1.0, 0.3, math.nextafter(0.3, 1), max_iter=1000)
        failures.append("A one ulp above beta settled unexpectedly")
    except CertificationFailed:
        pass
    ok = not failures
    report(3, ok, f"100 triples A>beta: worst relative error {worst:.1e} (tol 1e-9); "
                  f"100 triples A<=beta + boundary all UnboundedBelowEnvelope")
    assert ok, failures


# -- 4 -------------------------------------------------------------------------------

EXACT_TRIPLES = 100


def test_criterion_4_shift_identity(report):
    rng = np.random.default_rng(4)
    worst = 0.0
    failures = []
    n = 0
    while n < 100:
        a, b = (float(v) for v in log_uniform(rng, 1e-2, 1e2, 2))
        A = float(rng.uniform(0, a + b))
        if not A > 0 or Fraction(a) + Fraction(b) < Fraction(A):
            continue
        n += 1
        x0, x1 = (float(v) for v in 1 + log_uniform(rng, 1e-3, 1e2, 2))
        d = shift_identity_deviation(Params166(a, b, A), x0, x1, 100)
        worst = max(worst, d)
        if not d <= 1e-12:
            failures.append((a, b, A, x0, x1, d))

    # Exact mode on random small-integer triples: float triples carry 53-bit
    # numerators and make 50 exact steps infeasible (see README).
    exact_ok = 0
    rng = np.random.default_rng(44)
    triples = []
    while len(triples) < EXACT_TRIPLES:
        a, b, A = (int(v) for v in rng.integers(1, 10, 3))
        if a + b >= A:
            triples.append((a, b, A, *(int(v) for v in rng.integers(1, 10, 2))))
    for a, b, A, x0, x1 in triples:
        if shift_identity_exact((a, b, A), x0, x1, 50):
            exact_ok += 1
        else:
            failures.append(("exact", a, b, A, x0, x1))
    ok = not failures
    report(4, ok, f"float: 100 triples, max |x - (1+z)| = {worst:.1e} (tol 1e-12); "
                  f"exact: {exact_ok}/{EXACT_TRIPLES} integer triples identical over 50 steps")
    assert ok, failures


# -- 5 -------------------------------------------------------------------------------

def test_criterion_5_boundedness(report):
    rng = np.random.default_rng(5)
    failures = []
    sup = 0.0
    dev = 0.0
    audited = 0
    for _ in range(100):
        a, g = (float(v) for v in log_uniform(rng, 1e-2, 1e2, 2))
        seeds = [tuple(float(v) for v in log_uniform(rng, 1e-2, 1e2, 2)) for _ in range(5)]
        audit = verify_bounded_830(Params830(a, g), seeds, max_steps=10**6, deviation_steps=1000)
        sup = max(sup, audit.sup_x, audit.sup_y)
        dev = max(dev, audit.max_rel_deviation, audit.max_product_deviation)
        audited += audit.steps_audited
        if audit.overflow or audit.violation_count or audit.max_rel_deviation > 1e-9:
            failures.append((a, g, audit.violation_count, audit.flags[:3]))
    ok = not failures
    report(5, ok, f"500 orbits x 1e6 steps: no OverflowSuspect, 0 violations over {audited} audited "
                  f"steps, max reduction deviation {dev:.1e} (tol 1e-9), largest sup {sup:.4g}")
    assert ok, failures


# -- 6 -------------------------------------------------------------------------------

def test_criterion_6_stability_reports(report):
    rng = np.random.default_rng(6)
    worst_mod = worst_fd = 0.0
    failures = []
    for _ in range(200):
        a, b, A = (float(v) for v in log_uniform(rng, 1e-2, 1e2, 3))
        p = Params166(a, b, A)
        r = local_stability_166(p)
        x = r.equilibrium.value
        g = p.as_general()
        # pole-scaled step keeps the central-difference truncation error small
        h = 1e-5 * max(1.0, x)
        fd_p = oracles.central_difference(lambda u: step_second_order(g, u, x), x, h)
        fd_q = oracles.central_difference(lambda u: step_second_order(g, x, u), x, h)
        err = max(abs(fd_p - r.p_coef), abs(fd_q - r.q_coef))
        worst_mod, worst_fd = max(worst_mod, max(r.root_moduli)), max(worst_fd, err)
        if not max(r.root_moduli) < 1 or not err <= 1e-6:
            failures.append((a, b, A, r.root_moduli, err))
    ok = not failures
    report(6, ok, f"200 triples: max root modulus {worst_mod:.6f} (< 1), "
                  f"max finite-difference mismatch {worst_fd:.1e} (tol 1e-6)")
    assert ok, failures


# -- 7 -------------------------------------------------------------------------------

def _determinism_specs():
    yield SweepSpec(Target.VERIFY_830,
                    {"alpha": ParamRange(1e-2, 1e2), "gamma": ParamRange(1e-2, 1e2)},
                    SeedStrategy(low=0.01, high=10, count=3), rng_seed=42, max_steps=10**4,
                    mode="random", samples=40)
    yield SweepSpec(Target.VERIFY_166,
                    {"alpha": ParamRange(0.1, 10), "beta": ParamRange(0.1, 10), "A": ParamRange(0.1, 10)},
                    SeedStrategy(low=0, high=10, count=4), rng_seed=2**63 + 11, max_steps=10**4,
                    mode="random", samples=40)
    yield SweepSpec(Target.PROBE, {"alpha": ParamRange(0.5, 2, 2), "C": ParamRange(0.5, 2, 2)},
                    SeedStrategy(low=0.1, high=3, count=2), rng_seed=7, max_steps=5000,
                    case=ConjectureCase.C70)


def test_criterion_7_determinism(report, tmp_path):
    mismatches = []
    n = 0
    for i, spec in enumerate(_determinism_specs()):
        blobs = []
        for run, jobs in enumerate((1, 8, 1, 8)):
            path = tmp_path / f"{i}_{run}.json"
            emit_report(run_sweep(spec, jobs), "json", path)
            blobs.append(path.read_bytes())
        n += 1
        if len(set(blobs)) != 1:
            mismatches.append(spec.target.value)
        json.loads(blobs[0])
    ok = not mismatches
    report(7, ok, f"{n} sweeps x 4 runs (parallelism 1, 8, 1, 8): byte-identical JSON")
    assert ok, mismatches


# -- 8 -------------------------------------------------------------------------------

def test_criterion_8_probe_honesty(report):
    problems = []
    labels = [m.name for m in Growth] + [m.value for m in Growth]
    if any("prov" in s.lower() or "proof" in s.lower() for s in labels):
        problems.append(f"Growth carries a proof-like member: {labels}")
    # no field of a probe report can hold any other verdict type
    for cls in (ConjectureProbeReport, ProbeOrbit):
        hints = typing.get_type_hints(cls)
        for f in dataclasses.fields(cls):
            t = hints[f.name]
            if inspect.isclass(t) and issubclass(t, enum.Enum) and t not in (Growth, ConjectureCase):
                problems.append(f"{cls.__name__}.{f.name} has enum type {t}")
    prop = inspect.getattr_static(ConjectureProbeReport, "disclaimer")
    if not isinstance(prop, property) or prop.fset is not None:
        problems.append("disclaimer must be a read-only property")
    cases = {
        "68": ({"alpha": 1, "A": 1, "C": 1}, [(0, 0), (3, 0.2)]),
        "141": ({"alpha": 1, "A": 0, "C": 1}, [(1, 2)]),
        "70": ({"alpha": 1, "C": 1}, [(1, 1, 1), (0.5, 2, 3)]),
        "6,25": ({"eps": 1.0}, [(1, 1)]),
    }
    for cid, (params, seeds) in cases.items():
        r = probe_conjecture(cid, params, seeds, max_steps=10**4)
        d = r.to_dict()
        if r.disclaimer is not True or d["disclaimer"] is not True:
            problems.append(f"{cid}: disclaimer flag missing")
        if any(not isinstance(o.growth, Growth) for o in r.orbits):
            problems.append(f"{cid}: non-Growth classification")
        if "prove" in json.dumps(d).lower().replace("not a proof", ""):
            problems.append(f"{cid}: report text claims a proof")
    ok = not problems
    report(8, ok, "4 open cases: disclaimer always set; Growth has no proof member; "
                  "report fields admit no other verdict type")
    assert ok, problems
