"""
Simulating orbits
=================

Iterate the second-order equation x[n+1] = (alpha + beta x[n] + x[n-1]) / (A + x[n-1])
and the #(8,30) planar system, in floating point and in exact rationals.
"""

import numpy as np

from ratdyn import Params166, Params830, simulate_plane_system, simulate_second_order
from ratdyn.recurrence import simulate_second_order_exact

# alpha = beta = A = 1: orbits settle on the golden ratio
p = Params166(1.0, 1.0, 1.0)
t = simulate_second_order(p, 1.0, 2.0, 60)
print("status:", t.status_label(), " last value:", t.terminal)
print("golden ratio:", (1 + np.sqrt(5)) / 2)

# the first few steps in exact arithmetic
exact = simulate_second_order_exact(p, 1, 2, 5)
print("exact:", [str(v) for v in exact.values])

# the planar system x' = y/x, y' = (alpha + gamma y)/(x + y)
s = simulate_plane_system(Params830(2.0, 1.0).as_system(), 2.0, 3.0, 10_000)
print("#(8,30) max x:", s.values.max(), " max y:", s.y.max())

# trajectories write plot-ready CSV
print(t.to_csv().splitlines()[:3])
