"""
Rational recurrences: parameter types, guarded stepping and orbit simulation.

Covers the general second-order rational equation

    x[n+1] = (alpha + beta*x[n] + gamma*x[n-1]) / (A + B*x[n] + C*x[n-1]),

its special case #166, the general planar rational system, the #(8,30)
system together with its scalar reduction, the third-order case #70, and the
shift x = 1 + z that carries #166 onto a reduced equation.

Orbits are computed in binary64 by small numba kernels.  An exact mode built
on gmpy2 rationals exists for identity checks only; the bit length of exact
iterates grows geometrically, so it is capped at ``EXACT_STEP_CAP`` steps.
"""

from __future__ import annotations

import csv
import enum
import io
import math
import os
from dataclasses import dataclass, fields
from fractions import Fraction
from pathlib import Path
from typing import IO, Sequence

import gmpy2
import numba
import numpy as np

EXACT_STEP_CAP = 200


class ForbiddenSetError(ArithmeticError):
    """A denominator fell below the guard threshold."""

    def __init__(self, message: str, step: int = 0, component: str = "x"):
        super().__init__(message)
        self.step = step
        self.component = component


class DomainError(ValueError):
    """Parameters fall outside the region where an operation applies."""


# ---------------------------------------------------------------------------
# Guards
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class GuardConfig:
    """Runtime thresholds applied while iterating.

    ``denominator``: a step whose denominator is below this ends the orbit
    with ``Status.FORBIDDEN_SET``.  ``overflow``: any value above this ends it
    with ``Status.OVERFLOW_SUSPECT``.  ``converge_tol``: when set, the orbit
    stops with ``Status.CONVERGED`` once two consecutive increments are both
    at most this size.
    """

    denominator: float = 1e-300
    overflow: float = 1e12
    converge_tol: float | None = None

    def __post_init__(self):
        if not self.denominator >= 0:
            raise ValueError(f"denominator guard must be >= 0, got {self.denominator}")
        if not self.overflow > 0:
            raise ValueError(f"overflow guard must be > 0, got {self.overflow}")
        if self.converge_tol is not None and not self.converge_tol >= 0:
            raise ValueError(f"converge_tol must be >= 0, got {self.converge_tol}")

    @classmethod
    def from_string(cls, text: str, base: GuardConfig | None = None) -> GuardConfig:
        """Parse ``den=<v>,overflow=<v>`` (either key may be omitted)."""
        base = base or cls()
        values = {"denominator": base.denominator, "overflow": base.overflow}
        for item in filter(None, (s.strip() for s in text.split(","))):
            key, sep, raw = item.partition("=")
            if not sep:
                raise ValueError(f"malformed guard entry {item!r}; expected key=value")
            key = key.strip()
            if key == "den":
                values["denominator"] = float(raw)
            elif key == "overflow":
                values["overflow"] = float(raw)
            else:
                raise ValueError(f"unknown guard key {key!r}; expected 'den' or 'overflow'")
        return cls(converge_tol=base.converge_tol, **values)

    @classmethod
    def from_env(cls, var: str = "RATDYN_GUARDS") -> GuardConfig:
        text = os.environ.get(var, "")
        return cls.from_string(text) if text.strip() else cls()

    def _kernel_args(self) -> tuple[float, float, float]:
        tol = -1.0 if self.converge_tol is None else float(self.converge_tol)
        return float(self.denominator), float(self.overflow), tol


DEFAULT_GUARDS = GuardConfig()


# ---------------------------------------------------------------------------
# Parameter types
# ---------------------------------------------------------------------------


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise DomainError(message)


def _coerced(obj):
    # store plain floats so reports serialize the same whatever the caller passed
    for f in fields(obj):
        v = float(getattr(obj, f.name))
        object.__setattr__(obj, f.name, v)
        yield f.name, v


def _finite_nonneg(obj) -> None:
    for name, v in _coerced(obj):
        _require(math.isfinite(v) and v >= 0, f"{name} must be finite and >= 0, got {v!r}")


def _finite_pos(obj) -> None:
    for name, v in _coerced(obj):
        _require(math.isfinite(v) and v > 0, f"{name} must be finite and > 0, got {v!r}")


@dataclass(frozen=True)
class Params2R:
    """Coefficients of the general second-order rational equation."""

    alpha: float
    beta: float
    gamma: float
    A: float
    B: float
    C: float

    def __post_init__(self):
        _finite_nonneg(self)
        _require(self.A + self.B + self.C > 0, "A + B + C must be > 0")

    def as_tuple(self) -> tuple[float, ...]:
        return (self.alpha, self.beta, self.gamma, self.A, self.B, self.C)

    def scaled(self, factor: float) -> Params2R:
        return Params2R(*(factor * v for v in self.as_tuple()))


@dataclass(frozen=True)
class Params166:
    """Case #166: x[n+1] = (alpha + beta*x[n] + x[n-1]) / (A + x[n-1])."""

    alpha: float
    beta: float
    A: float

    def __post_init__(self):
        _finite_pos(self)

    def as_general(self) -> Params2R:
        return Params2R(self.alpha, self.beta, 1.0, self.A, 0.0, 1.0)


@dataclass(frozen=True)
class Params830:
    """Case #(8,30): x' = y/x, y' = (alpha + gamma*y)/(x + y)."""

    alpha: float
    gamma: float

    def __post_init__(self):
        _finite_pos(self)

    def as_system(self) -> PlaneSystemParams:
        return PlaneSystemParams(
            alpha=0.0, beta=0.0, gamma=1.0, A=0.0, B=1.0, C=0.0,
            p=self.alpha, delta=0.0, eps=self.gamma, q=0.0, D=1.0, E=1.0,
        )


@dataclass(frozen=True)
class PlaneSystemParams:
    """Coefficients of the general planar rational system

        x' = (alpha + beta*x + gamma*y) / (A + B*x + C*y)
        y' = (p + delta*x + eps*y) / (q + D*x + E*y)
    """

    alpha: float
    beta: float
    gamma: float
    A: float
    B: float
    C: float
    p: float
    delta: float
    eps: float
    q: float
    D: float
    E: float

    def __post_init__(self):
        _finite_nonneg(self)
        _require(self.A + self.B + self.C > 0, "x-denominator coefficients A, B, C are all zero")
        _require(self.q + self.D + self.E > 0, "y-denominator coefficients q, D, E are all zero")

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(getattr(self, f.name) for f in fields(self))

    @classmethod
    def case_8_30(cls, alpha: float, gamma: float) -> PlaneSystemParams:
        return Params830(alpha, gamma).as_system()

    @classmethod
    def case_6_25(cls, eps: float) -> PlaneSystemParams:
        _require(math.isfinite(eps) and eps > 0, f"eps must be > 0, got {eps!r}")
        return cls(
            alpha=0.0, beta=1.0, gamma=0.0, A=0.0, B=0.0, C=1.0,
            p=0.0, delta=1.0, eps=eps, q=1.0, D=0.0, E=0.0,
        )


@dataclass(frozen=True)
class Params70:
    """Case #70: x[n+1] = (alpha + x[n]) / (C*x[n-1] + x[n-2])."""

    alpha: float
    C: float

    def __post_init__(self):
        _finite_pos(self)


# ---------------------------------------------------------------------------
# Trajectories
# ---------------------------------------------------------------------------


class Status(enum.Enum):
    COMPLETED = "Completed"
    CONVERGED = "Converged"
    FORBIDDEN_SET = "ForbiddenSet"
    OVERFLOW_SUSPECT = "OverflowSuspect"


_STATUS_CODES = {
    0: Status.COMPLETED,
    1: Status.CONVERGED,
    2: Status.FORBIDDEN_SET,
    3: Status.OVERFLOW_SUSPECT,
}


@dataclass(frozen=True, eq=False)
class Trajectory:
    """A finite orbit and the reason it stopped.

    ``values`` holds x[0], x[1], ...; ``y`` holds the second component for
    planar systems and is None otherwise.  ``stop_index`` is the 0-based map
    application that failed (ForbiddenSet / OverflowSuspect) or the last
    index reached when converged.  Arrays are read-only.
    """

    values: np.ndarray
    status: Status
    seed: tuple
    stop_index: int | None = None
    y: np.ndarray | None = None
    component: str | None = None

    def __post_init__(self):
        if len(self.values) == 0:
            raise ValueError("trajectory must hold at least one value")
        self.values.setflags(write=False)
        if self.y is not None:
            self.y.setflags(write=False)

    def __len__(self) -> int:
        return len(self.values)

    @property
    def exact(self) -> bool:
        return self.values.dtype == object

    @property
    def terminal(self):
        return self.values[-1]

    @property
    def ok(self) -> bool:
        return self.status in (Status.COMPLETED, Status.CONVERGED)

    def status_label(self) -> str:
        if self.status in (Status.FORBIDDEN_SET, Status.OVERFLOW_SUSPECT):
            return f"{self.status.value}({self.stop_index})"
        return self.status.value

    def to_csv(self, dest: str | Path | IO[str] | None = None) -> str:
        """Write ``step,x[,y],status``; status appears on the final row only.

        Exact trajectories write each value as a ``numerator/denominator``
        string.  Returns the CSV text.
        """
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "x", "y", "status"] if self.y is not None else ["step", "x", "status"])
        n = len(self.values)
        for i in range(n):
            row = [i, _fmt(self.values[i])]
            if self.y is not None:
                row.append(_fmt(self.y[i]))
            row.append(self.status_label() if i == n - 1 else "")
            w.writerow(row)
        text = buf.getvalue()
        if dest is None:
            return text
        if isinstance(dest, (str, Path)):
            try:
                Path(dest).write_text(text)
            except OSError as exc:
                raise OSError(f"cannot write trajectory CSV to {dest}: {exc}") from exc
        else:
            dest.write(text)
        return text


def _fmt(v) -> str:
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if hasattr(v, "numerator") and hasattr(v, "denominator"):
        return f"{v.numerator}/{v.denominator}"
    return str(v)


def _build(values, code, idx, seed) -> Trajectory:
    status = _STATUS_CODES[int(code)]
    stop = None if status is Status.COMPLETED else int(idx)
    return Trajectory(values=values, status=status, seed=seed, stop_index=stop)


# ---------------------------------------------------------------------------
# Scalar steps
# ---------------------------------------------------------------------------


def step_second_order(p: Params2R, x_curr: float, x_prev: float,
                      guards: GuardConfig = DEFAULT_GUARDS) -> float:
    den = p.A + p.B * x_curr + p.C * x_prev
    if not den >= guards.denominator or den == 0:
        raise ForbiddenSetError(f"denominator {den!r} below guard {guards.denominator!r}")
    return (p.alpha + p.beta * x_curr + p.gamma * x_prev) / den


def step_plane_system(sp: PlaneSystemParams, x: float, y: float,
                      guards: GuardConfig = DEFAULT_GUARDS) -> tuple[float, float]:
    dx = sp.A + sp.B * x + sp.C * y
    dy = sp.q + sp.D * x + sp.E * y
    if not dx >= guards.denominator or dx == 0:
        raise ForbiddenSetError(f"x-component denominator {dx!r} below guard", component="x")
    if not dy >= guards.denominator or dy == 0:
        raise ForbiddenSetError(f"y-component denominator {dy!r} below guard", component="y")
    return ((sp.alpha + sp.beta * x + sp.gamma * y) / dx,
            (sp.p + sp.delta * x + sp.eps * y) / dy)


def step_reduced_830(p: Params830, x_prev1: float, x_prev2: float,
                     guards: GuardConfig = DEFAULT_GUARDS) -> float:
    """x[n] from x[n-1] (``x_prev1``) and x[n-2] (``x_prev2``)."""
    g = max(guards.denominator, 0.0)
    if not (x_prev1 > g and x_prev2 > g):
        raise ForbiddenSetError(f"inputs ({x_prev1!r}, {x_prev2!r}) must exceed guard {g!r}")
    prod = x_prev1 * x_prev2
    return (p.alpha + p.gamma * prod) / (prod * (1.0 + x_prev1))


def step_third_order_70(p: Params70, x_curr: float, x_prev: float, x_prev2: float,
                        guards: GuardConfig = DEFAULT_GUARDS) -> float:
    den = p.C * x_prev + x_prev2
    if not den >= guards.denominator or den == 0:
        raise ForbiddenSetError(f"denominator {den!r} below guard {guards.denominator!r}")
    return (p.alpha + x_curr) / den


# ---------------------------------------------------------------------------
# Kernels.  Status codes: 0 completed, 1 converged, 2 forbidden, 3 overflow.
# ---------------------------------------------------------------------------


@numba.njit(cache=True)
def _kernel_second_order(a, b, g, A, B, C, x0, x1, n, den_guard, overflow, ctol):
    out = np.empty(n + 2)
    out[0] = x0
    out[1] = x1
    if x0 > overflow or x1 > overflow:
        return out[:2], 3, 0
    for k in range(n):
        xc = out[k + 1]
        xp = out[k]
        den = A + B * xc + C * xp
        if not den >= den_guard or den == 0.0:
            return out[:k + 2], 2, k
        v = (a + b * xc + g * xp) / den
        if not v <= overflow:
            return out[:k + 2], 3, k
        out[k + 2] = v
        if ctol >= 0.0 and abs(v - xc) <= ctol and abs(xc - xp) <= ctol:
            return out[:k + 3], 1, k + 2
    return out, 0, n


@numba.njit(cache=True)
def _kernel_plane(a, b, g, A, B, C, p, d, e, q, D, E, x0, y0, n, den_guard, overflow, ctol):
    xs = np.empty(n + 1)
    ys = np.empty(n + 1)
    xs[0] = x0
    ys[0] = y0
    # last field: 0 when the x denominator failed, 1 for y
    if x0 > overflow or y0 > overflow:
        return xs[:1], ys[:1], 3, 0, 0
    for k in range(n):
        x = xs[k]
        y = ys[k]
        dx = A + B * x + C * y
        if not dx >= den_guard or dx == 0.0:
            return xs[:k + 1], ys[:k + 1], 2, k, 0
        dy = q + D * x + E * y
        if not dy >= den_guard or dy == 0.0:
            return xs[:k + 1], ys[:k + 1], 2, k, 1
        nx = (a + b * x + g * y) / dx
        ny = (p + d * x + e * y) / dy
        if not (nx <= overflow and ny <= overflow):
            return xs[:k + 1], ys[:k + 1], 3, k, 0
        xs[k + 1] = nx
        ys[k + 1] = ny
        if ctol >= 0.0 and abs(nx - x) <= ctol and abs(ny - y) <= ctol:
            return xs[:k + 2], ys[:k + 2], 1, k + 1, 0
    return xs, ys, 0, n, 0


@numba.njit(cache=True)
def _kernel_reduced_830(a, g, x0, x1, n, den_guard, overflow, ctol):
    out = np.empty(n + 2)
    out[0] = x0
    out[1] = x1
    if x0 > overflow or x1 > overflow:
        return out[:2], 3, 0
    for k in range(n):
        u = out[k + 1]
        w = out[k]
        if not (u > den_guard and w > den_guard):
            return out[:k + 2], 2, k
        prod = u * w
        v = (a + g * prod) / (prod * (1.0 + u))
        if not v <= overflow:
            return out[:k + 2], 3, k
        out[k + 2] = v
        if ctol >= 0.0 and abs(v - u) <= ctol and abs(u - w) <= ctol:
            return out[:k + 3], 1, k + 2
    return out, 0, n


@numba.njit(cache=True)
def _kernel_70(a, C, x0, x1, x2, n, den_guard, overflow, ctol):
    out = np.empty(n + 3)
    out[0] = x0
    out[1] = x1
    out[2] = x2
    if x0 > overflow or x1 > overflow or x2 > overflow:
        return out[:3], 3, 0
    for k in range(n):
        den = C * out[k + 1] + out[k]
        if not den >= den_guard or den == 0.0:
            return out[:k + 3], 2, k
        v = (a + out[k + 2]) / den
        if not v <= overflow:
            return out[:k + 3], 3, k
        out[k + 3] = v
        if ctol >= 0.0 and abs(v - out[k + 2]) <= ctol and abs(out[k + 2] - out[k + 1]) <= ctol:
            return out[:k + 4], 1, k + 3
    return out, 0, n


def _check_seeds(*seeds: float) -> None:
    for s in seeds:
        _require(math.isfinite(s) and s >= 0, f"initial conditions must be finite and >= 0, got {s!r}")


def _check_steps(max_steps: int) -> int:
    max_steps = int(max_steps)
    _require(max_steps >= 0, f"max_steps must be >= 0, got {max_steps}")
    return max_steps


# ---------------------------------------------------------------------------
# Simulation
# ---------------------------------------------------------------------------


def simulate_second_order(p: Params2R | Params166, x0: float, x1: float, max_steps: int,
                          guards: GuardConfig = DEFAULT_GUARDS) -> Trajectory:
    """Iterate the second-order equation from seeds (x0, x1).

    The result starts with [x0, x1] and holds at most ``max_steps + 2`` values.
    """
    if isinstance(p, Params166):
        p = p.as_general()
    _check_seeds(x0, x1)
    n = _check_steps(max_steps)
    vals, code, idx = _kernel_second_order(*map(float, p.as_tuple()), float(x0), float(x1), n,
                                           *guards._kernel_args())
    return _build(vals, code, idx, (x0, x1))


def simulate_plane_system(sp: PlaneSystemParams, x0: float, y0: float, max_steps: int,
                          guards: GuardConfig = DEFAULT_GUARDS) -> Trajectory:
    """Iterate a planar system with simultaneous updates."""
    _check_seeds(x0, y0)
    n = _check_steps(max_steps)
    xs, ys, code, idx, which = _kernel_plane(*map(float, sp.as_tuple()), float(x0), float(y0), n,
                                             *guards._kernel_args())
    status = _STATUS_CODES[int(code)]
    return Trajectory(
        values=xs, y=ys, status=status, seed=(x0, y0),
        stop_index=None if status is Status.COMPLETED else int(idx),
        component=("x", "y")[int(which)] if status is Status.FORBIDDEN_SET else None,
    )


def simulate_reduced_830(p: Params830, x0: float, x1: float, max_steps: int,
                         guards: GuardConfig = DEFAULT_GUARDS) -> Trajectory:
    _check_seeds(x0, x1)
    n = _check_steps(max_steps)
    vals, code, idx = _kernel_reduced_830(float(p.alpha), float(p.gamma), float(x0), float(x1), n,
                                          *guards._kernel_args())
    return _build(vals, code, idx, (x0, x1))


def simulate_third_order_70(p: Params70, x0: float, x1: float, x2: float, max_steps: int,
                            guards: GuardConfig = DEFAULT_GUARDS) -> Trajectory:
    _check_seeds(x0, x1, x2)
    n = _check_steps(max_steps)
    vals, code, idx = _kernel_70(float(p.alpha), float(p.C), float(x0), float(x1), float(x2), n,
                                 *guards._kernel_args())
    return _build(vals, code, idx, (x0, x1, x2))


# ---------------------------------------------------------------------------
# Exact mode
# ---------------------------------------------------------------------------


def to_rational(v) -> gmpy2.mpq:
    """Exact rational for ints, Fractions, decimal strings or floats (exact binary value)."""
    return gmpy2.mpq(v)


def _exact_steps(max_steps: int) -> int:
    n = _check_steps(max_steps)
    if n > EXACT_STEP_CAP:
        raise ValueError(f"exact mode is capped at {EXACT_STEP_CAP} steps, got {n}")
    return n


def simulate_second_order_exact(p: Params2R | Params166 | Sequence, x0, x1, max_steps: int) -> Trajectory:
    """Exact-rational orbit of the second-order equation.

    ``p`` may be a parameter object (floats converted exactly) or a sequence
    of six rationals (alpha, beta, gamma, A, B, C) given as ints, strings or
    Fractions.
    """
    if isinstance(p, Params166):
        p = p.as_general()
    coeffs = p.as_tuple() if isinstance(p, Params2R) else tuple(p)
    a, b, g, A, B, C = map(to_rational, coeffs)
    n = _exact_steps(max_steps)
    xs = [to_rational(x0), to_rational(x1)]
    for x in xs:
        _require(x >= 0, f"initial conditions must be >= 0, got {x}")
    status, idx = Status.COMPLETED, None
    for k in range(n):
        den = A + B * xs[-1] + C * xs[-2]
        if den == 0:
            status, idx = Status.FORBIDDEN_SET, k
            break
        xs.append((a + b * xs[-1] + g * xs[-2]) / den)
    return Trajectory(values=np.array(xs, dtype=object), status=status, seed=(x0, x1), stop_index=idx)


def simulate_plane_system_exact(sp: PlaneSystemParams, x0, y0, max_steps: int) -> Trajectory:
    a, b, g, A, B, C, p, d, e, q, D, E = map(to_rational, sp.as_tuple())
    n = _exact_steps(max_steps)
    xs, ys = [to_rational(x0)], [to_rational(y0)]
    status, idx, comp = Status.COMPLETED, None, None
    for k in range(n):
        x, y = xs[-1], ys[-1]
        dx, dy = A + B * x + C * y, q + D * x + E * y
        if dx == 0 or dy == 0:
            status, idx, comp = Status.FORBIDDEN_SET, k, "x" if dx == 0 else "y"
            break
        xs.append((a + b * x + g * y) / dx)
        ys.append((p + d * x + e * y) / dy)
    return Trajectory(values=np.array(xs, dtype=object), y=np.array(ys, dtype=object),
                      status=status, seed=(x0, y0), stop_index=idx, component=comp)


def simulate_reduced_830_exact(p: Params830, x0, x1, max_steps: int) -> Trajectory:
    a, g = to_rational(p.alpha), to_rational(p.gamma)
    n = _exact_steps(max_steps)
    xs = [to_rational(x0), to_rational(x1)]
    status, idx = Status.COMPLETED, None
    for k in range(n):
        u, w = xs[-1], xs[-2]
        if u <= 0 or w <= 0:
            status, idx = Status.FORBIDDEN_SET, k
            break
        prod = u * w
        xs.append((a + g * prod) / (prod * (1 + u)))
    return Trajectory(values=np.array(xs, dtype=object), status=status, seed=(x0, x1), stop_index=idx)


# ---------------------------------------------------------------------------
# Reductions
# ---------------------------------------------------------------------------


def shift_substitution_166(p: Params166) -> Params2R:
    """Coefficients of the equation satisfied by z = x - 1.

    With x[n] = 1 + z[n], #166 becomes
    z[n+1] = (alpha - A + beta + beta*z[n]) / (A + 1 + z[n-1]),
    which has nonnegative coefficients only when alpha + beta >= A.
    """
    const = Fraction(p.alpha) + Fraction(p.beta) - Fraction(p.A)
    if const < 0:
        raise DomainError(f"shift needs alpha + beta >= A; got alpha+beta={p.alpha + p.beta!r}, A={p.A!r}")
    # exact difference, then one rounding: stays >= 0
    return Params2R(alpha=float(const), beta=p.beta, gamma=0.0, A=p.A + 1.0, B=0.0, C=1.0)


def shift_identity_deviation(p: Params166, x0: float, x1: float, n_steps: int = 100) -> float:
    """max |x[n] - (1 + z[n])| for the #166 orbit and its shifted counterpart."""
    _require(x0 >= 1 and x1 >= 1, "shift identity needs seeds >= 1")
    q = shift_substitution_166(p)
    xt = simulate_second_order(p, x0, x1, n_steps)
    zt = simulate_second_order(q, x0 - 1.0, x1 - 1.0, n_steps)
    m = min(len(xt), len(zt))
    return float(np.max(np.abs(xt.values[:m] - (1.0 + zt.values[:m]))))


def shift_identity_exact(p166, x0, x1, n_steps: int = 50) -> bool:
    """True when x[n] == 1 + z[n] holds in exact rationals for every step.

    ``p166`` is a ``Params166`` or an (alpha, beta, A) triple of rationals.
    """
    if isinstance(p166, Params166):
        alpha, beta, A = map(to_rational, (p166.alpha, p166.beta, p166.A))
    else:
        alpha, beta, A = map(to_rational, p166)
    _require(alpha + beta >= A, "shift needs alpha + beta >= A")
    x0, x1 = to_rational(x0), to_rational(x1)
    _require(x0 >= 1 and x1 >= 1, "shift identity needs seeds >= 1")
    xt = simulate_second_order_exact((alpha, beta, 1, A, 0, 1), x0, x1, n_steps)
    zt = simulate_second_order_exact((alpha - A + beta, beta, 0, A + 1, 0, 1), x0 - 1, x1 - 1, n_steps)
    if len(xt) != len(zt):
        return False
    return all(x == 1 + z for x, z in zip(xt.values, zt.values))


@dataclass(frozen=True)
class ReductionCheck:
    """Agreement between the #(8,30) system and its scalar reduction."""

    max_rel_deviation: float
    max_product_deviation: float
    steps_compared: int
    system: Trajectory
    reduced: Trajectory


def _rel(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return np.abs(a - b) / np.maximum(np.abs(b), np.finfo(float).tiny)


def reduce_830_check(p: Params830, x0: float, y0: float, n_steps: int,
                     guards: GuardConfig = DEFAULT_GUARDS, exact: bool = False) -> ReductionCheck:
    """Compare the system's x-component with the reduced scalar orbit.

    The reduced orbit is seeded with (x0, y0/x0).  Also audits the identity
    y[n] = x[n+1]*x[n].  Deviations are relative and exactly 0.0 in exact mode
    when the identity holds.
    """
    _require(x0 > 0 and y0 > 0, f"#(8,30) seeds must be > 0, got ({x0!r}, {y0!r})")
    if exact:
        sysT = simulate_plane_system_exact(p.as_system(), x0, y0, n_steps)
        redT = simulate_reduced_830_exact(p, to_rational(x0), to_rational(y0) / to_rational(x0), n_steps)
    else:
        sysT = simulate_plane_system(p.as_system(), x0, y0, n_steps, guards)
        redT = simulate_reduced_830(p, x0, y0 / x0, n_steps, guards)
    for t in (sysT, redT):
        if t.status is Status.FORBIDDEN_SET:
            raise ForbiddenSetError(f"orbit hit the forbidden set at step {t.stop_index}",
                                    step=t.stop_index, component=t.component or "x")
    m = min(len(sysT), len(redT))
    if exact:
        dev = max((abs(a - b) / b for a, b in zip(sysT.values[:m], redT.values[:m])), default=0)
        k = min(len(sysT), m - 1)
        pdev = max((abs(sysT.y[i] - redT.values[i + 1] * redT.values[i]) / sysT.y[i]
                    for i in range(k)), default=0)
        return ReductionCheck(float(dev), float(pdev), m, sysT, redT)
    sx = sysT.values[:m]
    rx = redT.values[:m]
    dev = float(np.max(_rel(sx, rx))) if m else 0.0
    k = min(len(sysT), m - 1)
    prod = rx[1:k + 1] * rx[:k]
    pdev = float(np.max(_rel(sysT.y[:k], prod))) if k > 0 else 0.0
    return ReductionCheck(dev, pdev, m, sysT, redT)
