"""
Checking global convergence of #166
===================================

Simulate a grid of seeds for one triple in each branch and report which horn
of the convergence argument every orbit followed.
"""

from ratdyn import Params166, verify_gas_166

for triple in [(2, 1, 1), (1, 1, 1.5), (1, 1, 2), (1, 1, 3)]:
    r = verify_gas_166(Params166(*triple), tol=1e-6, max_steps=10**5)
    horns = sorted({o.horn.value for o in r.orbits})
    print(f"{triple}: {r.branch.value:32s} xbar={r.equilibrium.value:.10f} "
          f"{r.verdict.value} worst={r.worst_deviation:.1e} horns={horns}")
