"""
Auditing boundedness of #(8,30)
===============================

Run long orbits of the planar system and its scalar reduction, then check the
two pointwise inequalities that drive the boundedness argument at every step.
"""

import numpy as np

from ratdyn import Params830, verify_bounded_830

rng = np.random.default_rng(1)
for _ in range(5):
    a, g = np.exp(rng.uniform(np.log(1e-2), np.log(1e2), 2))
    seeds = np.exp(rng.uniform(np.log(1e-2), np.log(1e2), (3, 2)))
    audit = verify_bounded_830(Params830(a, g), seeds, max_steps=10**6)
    print(f"alpha={a:8.4f} gamma={g:8.4f} sup x={audit.sup_x:10.4g} violations={audit.violation_count} "
          f"slack3={audit.min_slack_3:.3g} slack4={audit.min_slack_4:.3g} passed={audit.passed}")
