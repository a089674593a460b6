"""
Invariant intervals, envelope bounds and the m-M certificate for #166.

Every sampled check draws from ``numpy.random.default_rng(seed)`` with a
seed supplied by the caller, and the seed is stored in the certificate.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .recurrence import DomainError, Params166
from .stability import equilibria_166, partial_prev_166

SAMPLE_COUNT = 10_000
ROUNDING_SLACK = 1e-12
MM_TOL = 1e-9
MM_MAX_ITER = 10**6


class CertificationFailed(RuntimeError):
    """An iterative certificate did not close within its budget."""

    def __init__(self, message: str, gap: float = math.nan, iterations: int = 0):
        super().__init__(message)
        self.gap = gap
        self.iterations = iterations


class IntervalKind(enum.Enum):
    INVARIANT = "Invariant"
    INVARIANT_AND_ATTRACTING = "InvariantAndAttracting"


@dataclass(frozen=True)
class IntervalCertificate:
    """Claim that orbits of #166 stay in [lower, upper] once there.

    ``analytic_case`` names the parameter branch whose argument gives the
    claim; the sampled check confirms the one-step implication on
    ``sample_count`` points.  ``worst_margin`` is measured against the
    rounding-tolerant threshold (1 -/+ 1e-12), so it is >= 0 exactly when
    every sample passed.
    """

    lower: float
    upper: float
    kind: IntervalKind
    analytic_case: str
    sample_count: int
    worst_margin: float
    rng_seed: int

    @property
    def accepted(self) -> bool:
        return self.worst_margin >= 0

    def contains(self, x: float) -> bool:
        return self.lower <= x <= self.upper

    def to_dict(self) -> dict:
        return {
            "interval": [self.lower, "+inf" if math.isinf(self.upper) else self.upper],
            "kind": self.kind.value,
            "evidence": {
                "analytic_branch": self.analytic_case,
                "sampled_check": {"samples": self.sample_count, "worst_margin": self.worst_margin},
            },
            "rng_seed": self.rng_seed,
            "accepted": self.accepted,
        }


def _loguniform(rng: np.random.Generator, lo: float, hi: float, n: int) -> np.ndarray:
    return np.exp(rng.uniform(math.log(lo), math.log(hi), n))


def _step166(p: Params166, x_curr, x_prev):
    return (p.alpha + p.beta * x_curr + x_prev) / (p.A + x_prev)


def _exact_sum_ge(p: Params166) -> bool:
    return Fraction(p.alpha) + Fraction(p.beta) >= Fraction(p.A)


def check_invariant_lower_166(p: Params166, seed: int = 0, samples: int = SAMPLE_COUNT) -> IntervalCertificate:
    """[1, inf) is invariant when A <= alpha + beta.

    If x[n] >= 1 then x[n+1] >= (alpha + beta + x[n-1]) / (A + x[n-1]) >= 1.
    """
    if not _exact_sum_ge(p):
        raise DomainError(f"[1, inf) certificate needs A <= alpha + beta; got A={p.A}, "
                          f"alpha+beta={p.alpha + p.beta}")
    rng = np.random.default_rng(seed)
    n_rand = max(samples - 4, 0)
    x_curr = np.concatenate([[1.0, 1.0, 1.0, 1e6], 1.0 + _loguniform(rng, 1e-9, 1e6, n_rand)])
    x_prev = np.concatenate([[0.0, 1.0, 1e6, 0.0], _loguniform(rng, 1e-9, 1e6, n_rand)])
    x_prev[4::20] = 0.0
    out = _step166(p, x_curr, x_prev)
    worst = float(np.min(out - (1.0 - ROUNDING_SLACK)))
    return IntervalCertificate(1.0, math.inf, IntervalKind.INVARIANT_AND_ATTRACTING,
                               "A_le_alphaPlusBeta", len(out), worst, seed)


def check_invariant_upper_166(p: Params166, seed: int = 0, samples: int = SAMPLE_COUNT) -> IntervalCertificate:
    """[0, (A - alpha)/beta] is invariant when A > alpha + beta.

    If x[n] <= (A - alpha)/beta then x[n+1] <= 1 < (A - alpha)/beta.
    """
    if _exact_sum_ge(p):
        raise DomainError(f"[0, (A-alpha)/beta] certificate needs A > alpha + beta; got A={p.A}, "
                          f"alpha+beta={p.alpha + p.beta}")
    upper = (p.A - p.alpha) / p.beta
    rng = np.random.default_rng(seed)
    n_rand = max(samples - 4, 0)
    x_curr = np.concatenate([[upper, upper, 0.0, 0.0], rng.uniform(0.0, upper, n_rand)])
    x_prev = np.concatenate([[0.0, 1e6, 0.0, 1e6], _loguniform(rng, 1e-9, 1e6, n_rand)])
    x_prev[4::20] = 0.0
    out = _step166(p, x_curr, x_prev)
    worst = float(np.min((1.0 + ROUNDING_SLACK) - out))
    if not 1.0 < upper:
        worst = min(worst, upper - 1.0)
    return IntervalCertificate(0.0, upper, IntervalKind.INVARIANT_AND_ATTRACTING,
                               "A_gt_alphaPlusBeta", len(out), worst, seed)


# ---------------------------------------------------------------------------
# Linear envelope u -> (alpha + beta*u) / A
# ---------------------------------------------------------------------------


class EnvelopeDirection(enum.Enum):
    LOWER = "lower"
    UPPER = "upper"


class BoundKind(enum.Enum):
    LOWER_EVENTUAL = "LowerEventual"
    UPPER_EVENTUAL = "UpperEventual"
    UNBOUNDED_BELOW_ENVELOPE = "UnboundedBelowEnvelope"


@dataclass(frozen=True)
class EventualBound:
    """Limit of the linear envelope and the index from which it binds.

    For the lower direction an orbit obeying x[n+1] >= (alpha + beta*x[n])/A
    dominates the envelope started at 0 one index later, so
    x[n] >= bound_value - epsilon for n >= settle_index.
    """

    bound_value: float
    direction: BoundKind
    epsilon: float
    settle_index: int | None
    iterated_value: float = math.nan
    iterations: int = 0


def envelope_limit(alpha: float, beta: float, A: float,
                   direction: EnvelopeDirection | str = EnvelopeDirection.LOWER,
                   epsilon: float = 1e-6, max_iter: int = 10**7) -> EventualBound:
    """Eventual bound alpha/(A - beta) from the linear envelope.

    When A <= beta the envelope grows without bound and no eventual bound
    exists.  Otherwise the envelope is a contraction with ratio r = beta/A
    and is iterated until the a-posteriori error |du| * r/(1-r) (and |du|
    itself) drops below epsilon/10.
    """
    direction = EnvelopeDirection(direction)
    if not (alpha > 0 and beta > 0 and A > 0):
        raise DomainError("envelope needs positive alpha, beta, A")
    if not epsilon > 0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")
    if A <= beta:
        return EventualBound(math.inf, BoundKind.UNBOUNDED_BELOW_ENVELOPE, epsilon, None)

    limit = alpha / (A - beta)
    r = beta / A
    factor = max(1.0, r / (1.0 - r))
    u = 0.0 if direction is EnvelopeDirection.LOWER else 10.0 * limit
    settle = 0 if abs(u - limit) < epsilon else None
    k = 0
    while True:
        nu = (alpha + beta * u) / A
        k += 1
        if settle is None and abs(nu - limit) < epsilon:
            settle = k
        du = abs(nu - u)
        u = nu
        if du * factor < epsilon / 10 or du == 0.0:
            break
        if k >= max_iter:
            raise CertificationFailed(f"envelope did not settle in {max_iter} iterations", du, k)
    if settle is None:
        settle = k
    kind = BoundKind.LOWER_EVENTUAL if direction is EnvelopeDirection.LOWER else BoundKind.UPPER_EVENTUAL
    # x[1] >= u[0], so envelope index k bounds orbit index k + 1
    return EventualBound(limit, kind, epsilon, settle + 1, u, k)


# ---------------------------------------------------------------------------
# m-M envelopes
# ---------------------------------------------------------------------------


class MMVerdict(enum.Enum):
    GAS_CERTIFIED = "GAS-certified"
    EQUILIBRIUM_MISMATCH = "EquilibriumMismatch"


@dataclass(frozen=True)
class EnvelopePair:
    m_seq_terminal: float
    M_seq_terminal: float
    iterations: int
    m_history: np.ndarray | None = field(default=None, repr=False, metadata={"json": False})
    M_history: np.ndarray | None = field(default=None, repr=False, metadata={"json": False})

    @property
    def gap(self) -> float:
        return self.M_seq_terminal - self.m_seq_terminal


def _monotone_upper_end(p: Params166) -> float:
    """(A - alpha)/beta rounded down until beta*y <= A - alpha holds exactly."""
    y = (p.A - p.alpha) / p.beta
    bound = Fraction(p.A) - Fraction(p.alpha)
    while Fraction(p.beta) * Fraction(y) > bound:
        y = math.nextafter(y, 0.0)
    return y


def mm_certify_166(p: Params166, interval: tuple[float, float] | None = None,
                   tol: float = MM_TOL, max_iter: int = MM_MAX_ITER,
                   keep_history: bool = False) -> tuple[EnvelopePair, MMVerdict]:
    """Collapse the m and M envelopes of the diagonal map u -> f(u, u).

    On [0, (A - alpha)/beta] the #166 map is nondecreasing in both
    arguments, so every orbit entering the interval is squeezed between
    m[k] and M[k].  Raises ``CertificationFailed`` if the gap is still
    >= ``tol`` after ``max_iter`` iterations or monotonicity breaks.
    """
    if _exact_sum_ge(p):
        raise DomainError("m-M certificate needs A > alpha + beta")
    top = _monotone_upper_end(p)
    lo, hi = (0.0, top) if interval is None else (float(interval[0]), float(interval[1]))
    if not (0.0 <= lo <= hi <= top):
        raise DomainError(f"interval [{lo}, {hi}] is not inside [0, {top}]")
    # monotone in x[n-1] needs beta*x[n] <= A - alpha, worst at the top end
    if partial_prev_166(p, Fraction(hi), Fraction(hi)) < 0:
        raise DomainError("map is not nondecreasing on the interval")

    xbar = equilibria_166(p).value
    if not lo - tol <= xbar <= hi + tol:
        raise DomainError(f"equilibrium {xbar} lies outside [{lo}, {hi}]")

    a, b, A = p.alpha, p.beta, p.A
    m, M = lo, hi
    hist_m, hist_M = ([m], [M]) if keep_history else (None, None)
    k = 0
    while M - m >= tol:
        if k >= max_iter:
            raise CertificationFailed(f"m-M gap {M - m:.3e} after {k} iterations", M - m, k)
        nm = (a + (b + 1.0) * m) / (A + m)
        nM = (a + (b + 1.0) * M) / (A + M)
        if nm < m or nM > M:
            raise CertificationFailed(f"envelope monotonicity broken at iteration {k}", M - m, k)
        m, M = nm, nM
        k += 1
        if keep_history:
            hist_m.append(m)
            hist_M.append(M)
    pair = EnvelopePair(m, M, k,
                        np.array(hist_m) if keep_history else None,
                        np.array(hist_M) if keep_history else None)
    ok = abs(m - xbar) < tol and abs(M - xbar) < tol
    return pair, MMVerdict.GAS_CERTIFIED if ok else MMVerdict.EQUILIBRIUM_MISMATCH
