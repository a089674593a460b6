"""
Invariant intervals, envelopes and m-M certificates
===================================================

Three ways the toolkit turns a parameter triple into attractivity evidence:
a sampled invariance certificate, the linear envelope's eventual bound, and
the coupled m-M envelope iteration for A > alpha + beta.
"""

from ratdyn import (
    Params166,
    check_invariant_lower_166,
    check_invariant_upper_166,
    envelope_limit,
    mm_certify_166,
)

# [1, inf) is invariant when A <= alpha + beta
print(check_invariant_lower_166(Params166(1, 1, 1.5), seed=7).to_dict())

# [0, alpha/(A - alpha - beta)] is invariant when A > alpha + beta
print(check_invariant_upper_166(Params166(1, 1, 3), seed=7).to_dict())

# linear envelope u' = (alpha + beta u)/A
e = envelope_limit(1, 1, 3, epsilon=1e-8)
print("eventual lower bound", e.bound_value, "from orbit index", e.settle_index)
print("A <= beta:", envelope_limit(1, 2, 2).direction.value)

# coupled envelopes squeeze onto the equilibrium
pair, verdict = mm_certify_166(Params166(1, 1, 3))
print(verdict.value, "after", pair.iterations, "iterations, gap", pair.gap)
