"""
End-to-end checks for #166 (global asymptotic stability), #(8,30)
(boundedness) and exploratory probes of the open cases #68, #141, #70 and
#(6,25).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from . import _json
from .intervals import (
    CertificationFailed,
    EnvelopePair,
    IntervalCertificate,
    MMVerdict,
    check_invariant_lower_166,
    check_invariant_upper_166,
    mm_certify_166,
)
from .recurrence import (
    DEFAULT_GUARDS,
    DomainError,
    ForbiddenSetError,
    GuardConfig,
    Params2R,
    Params70,
    Params166,
    Params830,
    PlaneSystemParams,
    Status,
    Trajectory,
    shift_substitution_166,
    simulate_plane_system,
    simulate_reduced_830,
    simulate_second_order,
    simulate_third_order_70,
)
from .stability import Equilibrium, equilibria_166

CONVERGENCE_WINDOW = 100
DEFAULT_SEEDS_166 = tuple((a, b) for a in (0.0, 5.0, 10.0) for b in (0.0, 5.0, 10.0))


# ---------------------------------------------------------------------------
# #166
# ---------------------------------------------------------------------------


class Case166Branch(enum.Enum):
    A_LE_ALPHA = "A_le_alpha"
    MIDDLE = "Middle"
    MIDDLE_SPECIAL = "MiddleSpecial_AeqAlphaPlusBeta"
    A_GT_ALPHA_PLUS_BETA = "A_gt_alphaPlusBeta"


def classify_166(p: Params166) -> Case166Branch:
    """Parameter branch of #166; comparisons are exact on the given floats."""
    a, b, A = Fraction(p.alpha), Fraction(p.beta), Fraction(p.A)
    if A <= a:
        return Case166Branch.A_LE_ALPHA
    if A == a + b:
        return Case166Branch.MIDDLE_SPECIAL
    if A < a + b:
        return Case166Branch.MIDDLE
    return Case166Branch.A_GT_ALPHA_PLUS_BETA


class Horn(enum.Enum):
    CONVERGED_OUTSIDE = "ConvergedOutside"
    ENTERED_INVARIANT_INTERVAL = "EnteredInvariantInterval"


class GASVerdict(enum.Enum):
    ALL_CONVERGED = "AllConverged"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class OrbitRecord:
    """One simulated seed.

    ``terminal_deviation`` is max |x[n] - xbar| over the final window;
    ``steps_used`` is the first index after which the orbit stays within
    ``tol`` of xbar (the full length when it never does).
    """

    seed: tuple[float, float]
    terminal_value: float
    terminal_deviation: float
    steps_used: int
    horn: Horn
    entry_index: int | None
    status: str
    reduced_terminal: float | None = None


@dataclass(frozen=True)
class GASReport:
    params: Params166
    branch: Case166Branch
    equilibrium: Equilibrium
    orbits: list[OrbitRecord]
    verdict: GASVerdict
    worst_deviation: float
    tol: float
    cause: str | None = None
    invariant_interval: IntervalCertificate | None = None
    mm_envelopes: EnvelopePair | None = None
    mm_verdict: MMVerdict | None = None

    def to_dict(self) -> dict:
        d = _json.jsonable({k: getattr(self, k) for k in (
            "params", "branch", "equilibrium", "orbits", "verdict", "worst_deviation", "tol", "cause",
            "invariant_interval", "mm_envelopes", "mm_verdict")})
        return d


def _interval_for(p: Params166, branch: Case166Branch, seed: int) -> IntervalCertificate:
    if branch is Case166Branch.A_GT_ALPHA_PLUS_BETA:
        return check_invariant_upper_166(p, seed=seed)
    return check_invariant_lower_166(p, seed=seed)


def _settle_index(dev: np.ndarray, tol: float) -> int:
    bad = np.nonzero(dev >= tol)[0]
    return 0 if len(bad) == 0 else int(bad[-1]) + 1


def verify_gas_166(p: Params166, seeds: Iterable[Sequence[float]] = DEFAULT_SEEDS_166,
                   tol: float = 1e-6, max_steps: int = 10**5,
                   guards: GuardConfig = DEFAULT_GUARDS, window: int = CONVERGENCE_WINDOW,
                   rng_seed: int = 0, keep_orbits: bool = False) -> GASReport | tuple[GASReport, list[Trajectory]]:
    """Simulate every seed and check convergence to the positive equilibrium.

    Records which horn of the attractivity dichotomy each orbit took: it
    either entered the branch's invariant interval or converged while
    staying outside.  Branch A > alpha + beta also carries the m-M
    certificate; in the boundary case A = alpha + beta the shifted orbit
    z = x - 1 is re-simulated from the entry point and must decay to 0.
    """
    if not tol > 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    seeds = [tuple(float(v) for v in s) for s in seeds]
    if not seeds:
        raise ValueError("at least one seed pair is required")
    branch = classify_166(p)
    eq = equilibria_166(p)
    xbar = eq.value
    cert = _interval_for(p, branch, rng_seed)
    causes: list[str] = []

    mm_pair = mm_verdict = None
    if branch is Case166Branch.A_GT_ALPHA_PLUS_BETA:
        try:
            mm_pair, mm_verdict = mm_certify_166(p)
            if mm_verdict is not MMVerdict.GAS_CERTIFIED:
                causes.append("m-M envelopes closed away from the equilibrium")
        except (CertificationFailed, DomainError) as exc:
            causes.append(f"m-M certificate failed: {exc}")
    if not cert.accepted:
        causes.append(f"invariant interval sampled margin {cert.worst_margin:.3e} < 0")

    shifted = shift_substitution_166(p) if branch is Case166Branch.MIDDLE_SPECIAL else None
    records: list[OrbitRecord] = []
    trajs: list[Trajectory] = []
    worst = 0.0
    for s in seeds:
        t = simulate_second_order(p, s[0], s[1], max_steps, guards)
        if keep_orbits:
            trajs.append(t)
        x = t.values
        dev = np.abs(x - xbar)
        term = float(np.max(dev[-window:]))
        # x[1] is a free seed, so invariance only propagates from index 1 on
        inside = (x[1:] >= cert.lower) & (x[1:] <= cert.upper)
        hit = np.nonzero(inside)[0]
        entry = int(hit[0]) + 1 if len(hit) else None
        horn = Horn.ENTERED_INVARIANT_INTERVAL if entry is not None else Horn.CONVERGED_OUTSIDE
        z_term = None
        if shifted is not None and entry is not None and entry + 1 < len(x):
            z = simulate_second_order(shifted, x[entry] - 1.0, x[entry + 1] - 1.0,
                                      max(len(x) - entry - 2, 0), guards)
            z_term = float(np.max(np.abs(z.values[-window:])))
            if not z_term < tol:
                causes.append(f"shifted orbit from seed {s} ends at |z| = {z_term:.3e}")
        if not t.ok:
            causes.append(f"seed {s}: {t.status_label()}")
            term = math.inf
        worst = max(worst, term)
        records.append(OrbitRecord(s, float(x[-1]), term, _settle_index(dev, tol), horn, entry,
                                   t.status_label(), z_term))

    if worst >= tol:
        causes.append(f"worst terminal deviation {worst:.3e} >= tol {tol:g}")
    verdict = GASVerdict.ALL_CONVERGED if not causes else GASVerdict.INCONCLUSIVE
    report = GASReport(p, branch, eq, records, verdict, worst, tol,
                       "; ".join(causes) or None, cert, mm_pair, mm_verdict)
    return (report, trajs) if keep_orbits else report


# ---------------------------------------------------------------------------
# #(8,30)
# ---------------------------------------------------------------------------


class InequalityTag(enum.Enum):
    INEQ_3 = "Ineq_8_30_3"
    INEQ_4 = "Ineq_8_30_4"


@dataclass(frozen=True)
class Violation:
    seed: tuple[float, float]
    step: int
    which: InequalityTag
    lhs: float
    rhs: float


MAX_RECORDED_VIOLATIONS = 100


@dataclass(frozen=True)
class BoundednessAudit:
    """Outcome of auditing #(8,30) orbits against the boundedness argument.

    Inequality checks run on the reduced scalar orbit: the coarse bound
    x[n] < (x[n-3]/alpha + 1/gamma) R[n] from n = 3, and the sharper bound
    x[n] < x[n-3] (1/(alpha + gamma^2 x[n-3]/(1 + x[n-3])) + 1/(gamma x[n-3])) R[n]
    from n = 4, with R[n] = (alpha + gamma x[n-1] x[n-2]) / (1 + x[n-1]).
    Only the first ``MAX_RECORDED_VIOLATIONS`` violations are stored;
    ``violation_count`` holds the total.
    """

    params: Params830
    sup_x: float
    sup_y: float
    inequality_violations: list[Violation]
    violation_count: int
    overflow: bool
    max_rel_deviation: float
    max_product_deviation: float
    steps_audited: int
    subsequence_note: dict | None = None
    min_slack_3: float = math.inf
    min_slack_4: float = math.inf
    flags: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.violation_count == 0 and not self.overflow and not self.flags

    def to_dict(self) -> dict:
        d = _json.jsonable({f: getattr(self, f) for f in (
            "params", "sup_x", "sup_y", "inequality_violations", "violation_count", "overflow",
            "max_rel_deviation", "max_product_deviation", "steps_audited", "subsequence_note",
            "min_slack_3", "min_slack_4", "flags")})
        d["passed"] = self.passed
        return d


def audit_830_inequalities(p: Params830, x: np.ndarray):
    """Vectorized check of both inequalities along a reduced orbit.

    Returns (mask3, lhs3, rhs3, mask4, lhs4, rhs4); masks flag violations,
    index i in the arrays corresponds to orbit index n = i + 3 (mask3) and
    n = i + 4 (mask4).
    """
    a, g = p.alpha, p.gamma
    if len(x) < 4:
        e = np.empty(0)
        return e.astype(bool), e, e, e.astype(bool), e, e
    xn, x1, x2, x3 = x[3:], x[2:-1], x[1:-2], x[:-3]
    R = (a + g * x1 * x2) / (1.0 + x1)
    rhs3 = (x3 / a + 1.0 / g) * R
    rhs4 = (x3 * (1.0 / (a + g * g * x3 / (1.0 + x3)) + 1.0 / (g * x3)) * R)[1:]
    lhs4 = xn[1:]
    return ~(xn < rhs3), xn, rhs3, ~(lhs4 < rhs4), lhs4, rhs4


def verify_bounded_830(p: Params830, seeds: Iterable[Sequence[float]], max_steps: int = 10**6,
                       guards: GuardConfig = DEFAULT_GUARDS, deviation_steps: int = 1000,
                       keep_orbits: bool = False):
    """Simulate the system and its reduction; audit sups and inequalities.

    An OverflowSuspect orbit fails the audit and is flagged for inspection;
    it is never read as evidence of unboundedness.
    """
    seeds = [tuple(float(v) for v in s) for s in seeds]
    if not seeds:
        raise ValueError("at least one seed pair is required")
    sp = p.as_system()
    sup_x = sup_y = 0.0
    violations: list[Violation] = []
    count = 0
    overflow = False
    dev = pdev = 0.0
    audited = 0
    slack3 = slack4 = math.inf
    flags: list[str] = []
    note = None
    best_big = -math.inf
    trajs = []
    for s in seeds:
        if not (s[0] > 0 and s[1] > 0):
            raise DomainError(f"#(8,30) seeds must be > 0, got {s}")
        st = simulate_plane_system(sp, s[0], s[1], max_steps, guards)
        rt = simulate_reduced_830(p, s[0], s[1] / s[0], max_steps, guards)
        if keep_orbits:
            trajs.append((st, rt))
        for t in (st, rt):
            if t.status is Status.FORBIDDEN_SET:
                raise ForbiddenSetError(f"seed {s}: forbidden set at step {t.stop_index}",
                                        step=t.stop_index, component=t.component or "x")
            if t.status is Status.OVERFLOW_SUSPECT:
                overflow = True
                flags.append(f"seed {s}: OverflowSuspect at step {t.stop_index}")
        sup_x = max(sup_x, float(np.max(st.values)), float(np.max(rt.values)))
        sup_y = max(sup_y, float(np.max(st.y)))

        m = min(len(st), len(rt), deviation_steps + 1)
        sx, rx = st.values[:m], rt.values[:m]
        dev = max(dev, float(np.max(np.abs(sx - rx) / rx)))
        k = min(len(st), len(rt) - 1, deviation_steps)
        if k > 0:
            prod = rt.values[1:k + 1] * rt.values[:k]
            pdev = max(pdev, float(np.max(np.abs(st.y[:k] - prod) / prod)))

        x = rt.values
        m3, l3, r3, m4, l4, r4 = audit_830_inequalities(p, x)
        audited += len(l3)
        if len(l3):
            slack3 = min(slack3, float(np.min((r3 - l3) / r3)))
        if len(l4):
            slack4 = min(slack4, float(np.min((r4 - l4) / r4)))
        for mask, lhs, rhs, off, tag in ((m3, l3, r3, 3, InequalityTag.INEQ_3),
                                         (m4, l4, r4, 4, InequalityTag.INEQ_4)):
            idx = np.nonzero(mask)[0]
            count += len(idx)
            for i in idx[:max(0, MAX_RECORDED_VIOLATIONS - len(violations))]:
                violations.append(Violation(s, int(i) + off, tag, float(lhs[i]), float(rhs[i])))

        if len(x) > 3:
            grow = np.nonzero(x[3:] >= x[:-3])[0]
            if len(grow):
                j = grow[np.argmax(x[3:][grow])]
                if x[j + 3] > best_big:
                    best_big = float(x[j + 3])
                    note = {"seed": list(s), "index": int(j) + 3, "x": best_big,
                            "x_minus_3": float(x[j])}

    if dev > 1e-9:
        flags.append(f"reduced orbit deviates from system x-component by {dev:.3e}")
    if pdev > 1e-9:
        flags.append(f"y[n] differs from x[n+1]*x[n] by {pdev:.3e}")
    audit = BoundednessAudit(p, sup_x, sup_y, violations, count, overflow, dev, pdev, audited,
                             note, slack3, slack4, flags)
    return (audit, trajs) if keep_orbits else audit


# ---------------------------------------------------------------------------
# Conjecture probes
# ---------------------------------------------------------------------------


class ConjectureCase(enum.Enum):
    C68 = "68"
    C141 = "141"
    C70 = "70"
    C6_25 = "6,25"


class Growth(enum.Enum):
    # deliberately no "proved" member
    APPARENTLY_BOUNDED = "ApparentlyBounded"
    GROWTH_SUSPECT = "GrowthSuspect"


GROWTH_BLOCK = 1000
GROWTH_SLOPE_THRESHOLD = 1e-3
DISCLAIMER = "Finite-horizon numerical probe; not a proof of boundedness or unboundedness."


@dataclass(frozen=True)
class ProbeOrbit:
    seed: tuple[float, ...]
    max_value: float
    growth: Growth
    rate: float
    status: str
    length: int


@dataclass(frozen=True)
class ConjectureProbeReport:
    case_id: ConjectureCase
    params: dict
    orbits: list[ProbeOrbit]

    @property
    def disclaimer(self) -> bool:
        return True

    def to_dict(self) -> dict:
        d = _json.jsonable({"case_id": self.case_id, "params": self.params, "orbits": self.orbits})
        d["disclaimer"] = self.disclaimer
        d["disclaimer_text"] = DISCLAIMER
        return d


def case_params(case: ConjectureCase | str, params: dict):
    """Build the parameter object for a probe case from a plain mapping.

    #68 / #141 take alpha, A, C (A > 0 for #68, A >= 0 for #141); #70 takes
    alpha, C; #(6,25) takes eps.
    """
    case = ConjectureCase(case)
    if case in (ConjectureCase.C68, ConjectureCase.C141):
        alpha, A, C = (float(params[k]) for k in ("alpha", "A", "C"))
        if not (alpha > 0 and C > 0):
            raise DomainError("alpha and C must be > 0")
        if case is ConjectureCase.C68 and not A > 0:
            raise DomainError(f"#68 needs A > 0, got {A}")
        if case is ConjectureCase.C141 and not A >= 0:
            raise DomainError(f"#141 needs A >= 0, got {A}")
        return Params2R(alpha=alpha, beta=1.0, gamma=0.0, A=A, B=1.0, C=C)
    if case is ConjectureCase.C70:
        return Params70(float(params["alpha"]), float(params["C"]))
    return PlaneSystemParams.case_6_25(float(params["eps"]))


def simulate_case(case: ConjectureCase | str, params: dict, seed: Sequence[float], max_steps: int,
                  guards: GuardConfig = DEFAULT_GUARDS) -> Trajectory:
    case = ConjectureCase(case)
    obj = case_params(case, params)
    if case is ConjectureCase.C70:
        if len(seed) != 3:
            raise ValueError("#70 is third order and needs three seeds")
        return simulate_third_order_70(obj, *seed, max_steps, guards)
    if len(seed) != 2:
        raise ValueError(f"case {case.value} needs two seeds")
    if case is ConjectureCase.C6_25:
        return simulate_plane_system(obj, seed[0], seed[1], max_steps, guards)
    return simulate_second_order(obj, seed[0], seed[1], max_steps, guards)


def growth_rate(values: np.ndarray, block: int = GROWTH_BLOCK) -> float:
    """Least-squares slope of log(block maximum) against block index,
    fitted over the final tenth of the orbit (at least two blocks)."""
    n = len(values)
    block = min(block, max(1, n // 20))
    nblocks = n // block
    if nblocks < 2:
        return 0.0
    maxima = values[n - nblocks * block:].reshape(nblocks, block).max(axis=1)
    tail = max(2, nblocks // 10)
    logs = np.log(np.maximum(maxima[-tail:], np.finfo(float).tiny))
    return float(np.polyfit(np.arange(tail, dtype=float), logs, 1)[0])


def probe_conjecture(case_id: ConjectureCase | str, params: dict, seeds: Iterable[Sequence[float]],
                     max_steps: int = 10**5, guards: GuardConfig = DEFAULT_GUARDS,
                     keep_orbits: bool = False):
    """Simulate an open case and classify each orbit's apparent growth.

    For #(6,25) only the x-component is classified.  The report always
    carries the disclaimer flag.
    """
    case = ConjectureCase(case_id)
    case_params(case, params)
    out = []
    trajs = []
    for s in seeds:
        s = tuple(float(v) for v in s)
        t = simulate_case(case, params, s, max_steps, guards)
        if keep_orbits:
            trajs.append(t)
        if t.status is Status.FORBIDDEN_SET:
            raise ForbiddenSetError(f"seed {s}: forbidden set at step {t.stop_index}",
                                    step=t.stop_index, component=t.component or "x")
        x = t.values
        rate = growth_rate(x)
        x_blew = t.status is Status.OVERFLOW_SUSPECT and _component_overflowed(t, guards)
        growth = (Growth.GROWTH_SUSPECT if x_blew or rate > GROWTH_SLOPE_THRESHOLD
                  else Growth.APPARENTLY_BOUNDED)
        out.append(ProbeOrbit(s, float(np.max(x)), growth, rate, t.status_label(), len(x)))
    report = ConjectureProbeReport(case, dict(params), out)
    return (report, trajs) if keep_orbits else report


def _component_overflowed(t: Trajectory, guards: GuardConfig) -> bool:
    """Whether the reported x-component caused the overflow stop."""
    if t.y is None:
        return True
    # the kernel stops before storing the offending pair; rebuild the next x
    x, y = float(t.values[-1]), float(t.y[-1])
    return y > 0 and x / y > guards.overflow
