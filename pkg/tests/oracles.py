"""Independent reference computations used to freeze expected values.

Nothing here imports ratdyn; each oracle recomputes its quantity from the
defining equation by brute force.
"""

from __future__ import annotations

import cmath


def bisect_root(f, lo: float, hi: float, iters: int = 200) -> float:
    flo = f(lo)
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def equilibrium_166(alpha: float, beta: float, A: float) -> float:
    """Root of x(A + x) - alpha - (beta + 1) x on [0, 10] (bracket widened if needed)."""
    hi = 10.0
    while hi * (A + hi) - alpha - (beta + 1) * hi <= 0:
        hi *= 2
    return bisect_root(lambda x: x * (A + x) - alpha - (beta + 1) * x, 0.0, hi)


def equilibrium_830(alpha: float, gamma: float) -> float:
    hi = 10.0
    while hi**4 + hi**3 - gamma * hi**2 - alpha <= 0:
        hi *= 2
    return bisect_root(lambda x: x**4 + x**3 - gamma * x * x - alpha, 1e-12, hi)


def central_difference(f, x: float, h: float = 1e-5) -> float:
    return (f(x + h) - f(x - h)) / (2 * h)


def quadratic_root_moduli(p: float, q: float) -> tuple[float, float]:
    """|roots| of lambda^2 - p lambda - q via the textbook formula."""
    d = cmath.sqrt(p * p + 4 * q)
    r = sorted([abs((p + d) / 2), abs((p - d) / 2)], reverse=True)
    return r[0], r[1]


def naive_166_orbit(alpha, beta, A, x0, x1, n):
    xs = [x0, x1]
    for _ in range(n):
        xs.append((alpha + beta * xs[-1] + xs[-2]) / (A + xs[-2]))
    return xs
