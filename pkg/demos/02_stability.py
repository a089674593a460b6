"""
Equilibria and local stability
==============================

The positive equilibrium of #166 solves x^2 + (A - beta - 1) x - alpha = 0.
Linearizing there gives lambda^2 - p lambda - q; both roots lie inside the
unit circle for every positive parameter triple.
"""

import numpy as np

from ratdyn import Params166, Params830, equilibrium_830, local_stability_166

rng = np.random.default_rng(0)
worst = 0.0
for _ in range(1000):
    a, b, A = np.exp(rng.uniform(np.log(1e-2), np.log(1e2), 3))
    r = local_stability_166(Params166(a, b, A))
    worst = max(worst, max(r.root_moduli))
print("largest root modulus over 1000 random triples:", worst)

r = local_stability_166(Params166(1, 1, 2))
print(r.to_dict())

# the #(8,30) equilibrium has y = x^2 with x the positive root of
# x^4 + x^3 - gamma x^2 - alpha, found by bisection
print("#(8,30) equilibrium for alpha=2, gamma=1:", equilibrium_830(Params830(2, 1)))
