"""Equilibria and linearized stability for #166 and #(8,30)."""

from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from fractions import Fraction

from .recurrence import Params166, Params830, step_plane_system

STABILITY_MARGIN = 1e-9


class Multiplicity(enum.Enum):
    SIMPLE_ROOT = "SimpleRoot"
    DOUBLE_ROOT = "DoubleRoot"


class Verdict(enum.Enum):
    LOCALLY_ASYMPTOTICALLY_STABLE = "LocallyAsymptoticallyStable"
    NON_HYPERBOLIC = "NonHyperbolic"
    UNSTABLE = "Unstable"


@dataclass(frozen=True)
class Equilibrium:
    value: float
    multiplicity: Multiplicity
    residual: float


@dataclass(frozen=True)
class StabilityReport:
    equilibrium: Equilibrium
    p_coef: float
    q_coef: float
    root_moduli: tuple[float, float]
    verdict: Verdict

    def to_dict(self) -> dict:
        return {
            "equilibrium": self.equilibrium.value,
            "multiplicity": self.equilibrium.multiplicity.value,
            "residual": self.equilibrium.residual,
            "p_coef": self.p_coef,
            "q_coef": self.q_coef,
            "root_moduli": list(self.root_moduli),
            "verdict": self.verdict.value,
        }


def _map_166(p: Params166, x_curr, x_prev):
    return (p.alpha + p.beta * x_curr + x_prev) / (p.A + x_prev)


def equilibria_166(p: Params166) -> Equilibrium:
    """Positive root of x^2 + (A - beta - 1) x - alpha = 0.

    The constant term is negative, so exactly one root is positive.
    """
    b = p.A - p.beta - 1.0
    disc = b * b + 4.0 * p.alpha
    s = math.sqrt(disc)
    # avoid cancellation when b > 0
    x = (s - b) / 2.0 if b <= 0 else 2.0 * p.alpha / (b + s)
    return Equilibrium(x, Multiplicity.SIMPLE_ROOT, abs(_map_166(p, x, x) - x))


def partial_prev_166(p: Params166, x, y):
    """Derivative of the #166 map in its x[n-1] slot (``x``), with x[n] = ``y``.

    Returns (A - alpha - beta*y) / (A + x)^2.  With Fraction inputs the
    parameters are converted exactly too, so the sign is exact.
    """
    if isinstance(x, Fraction) or isinstance(y, Fraction):
        a, b, A = Fraction(p.alpha), Fraction(p.beta), Fraction(p.A)
        return (A - a - b * y) / ((A + x) ** 2)
    return (p.A - p.alpha - p.beta * y) / ((p.A + x) ** 2)


def partial_curr_166(p: Params166, x, y):
    """Derivative of the #166 map in its x[n] slot: beta / (A + x[n-1])."""
    return p.beta / (p.A + x)


def characteristic_root_moduli(p_coef: float, q_coef: float) -> tuple[float, float]:
    """Moduli of the roots of lambda^2 - p*lambda - q, larger first."""
    s = cmath.sqrt(p_coef * p_coef + 4.0 * q_coef)
    r1 = abs((p_coef + s) / 2.0)
    r2 = abs((p_coef - s) / 2.0)
    return (max(r1, r2), min(r1, r2))


def classify_roots(moduli: tuple[float, float], margin: float = STABILITY_MARGIN) -> Verdict:
    if any(abs(m - 1.0) <= margin for m in moduli):
        return Verdict.NON_HYPERBOLIC
    if all(m < 1.0 - margin for m in moduli):
        return Verdict.LOCALLY_ASYMPTOTICALLY_STABLE
    return Verdict.UNSTABLE


def local_stability_166(p: Params166) -> StabilityReport:
    eq = equilibria_166(p)
    x = eq.value
    pc = partial_curr_166(p, x, x)
    qc = partial_prev_166(p, x, x)
    moduli = characteristic_root_moduli(pc, qc)
    return StabilityReport(eq, pc, qc, moduli, classify_roots(moduli))


def _quartic_830(x: float, alpha: float, gamma: float) -> float:
    return ((x + 1.0) * x - gamma) * x * x - alpha


def equilibrium_830(p: Params830, tol: float = 0.0) -> tuple[float, float]:
    """Positive fixed point (x, y) of #(8,30): y = x^2 and x^4 + x^3 - gamma x^2 - alpha = 0.

    The quartic has a single sign change in its coefficients, hence one
    positive root; it is bracketed on [1e-9, max(1, alpha + gamma) + 1] and
    bisected until the bracket is narrower than ``tol`` (by default, until
    it cannot shrink further in floating point).
    """
    lo, hi = 1e-9, max(1.0, p.alpha + p.gamma) + 1.0
    flo = _quartic_830(lo, p.alpha, p.gamma)
    if flo >= 0:
        # root below 1e-9: only possible for absurdly small alpha
        lo = 0.0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid in (lo, hi):
            break
        if _quartic_830(mid, p.alpha, p.gamma) < 0:
            lo = mid
        else:
            hi = mid
    x = 0.5 * (lo + hi)
    return x, x * x


def fixed_point_residual_830(p: Params830) -> float:
    x, y = equilibrium_830(p)
    nx, ny = step_plane_system(p.as_system(), x, y)
    return max(abs(nx - x), abs(ny - y))
