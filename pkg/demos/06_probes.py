"""
Probing open cases
==================

Finite-horizon growth probes for cases whose boundedness is conjectured.
The reports carry a disclaimer: a probe is evidence, never a proof.
"""

from ratdyn import probe_conjecture

runs = [
    ("68", {"alpha": 1, "A": 1, "C": 1}, [(0, 0), (3, 0.2)]),
    ("141", {"alpha": 1, "A": 0, "C": 1}, [(1, 2)]),
    ("70", {"alpha": 0.5, "C": 2}, [(1, 1, 1), (0.1, 3, 0.2)]),
    ("6,25", {"eps": 1.0}, [(1, 1)]),
]
for case, params, seeds in runs:
    r = probe_conjecture(case, params, seeds, max_steps=10**5)
    for o in r.orbits:
        print(f"#{case} seed={o.seed} max={o.max_value:.4g} {o.growth.value} rate={o.rate:.2e}")
print("disclaimer:", r.to_dict()["disclaimer_text"])
