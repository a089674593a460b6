"""Simulation and numerical certification of rational difference equations."""

from .recurrence import (
    DEFAULT_GUARDS,
    DomainError,
    ForbiddenSetError,
    GuardConfig,
    Params2R,
    Params70,
    Params166,
    Params830,
    PlaneSystemParams,
    Status,
    Trajectory,
    reduce_830_check,
    shift_identity_deviation,
    shift_identity_exact,
    shift_substitution_166,
    simulate_plane_system,
    simulate_reduced_830,
    simulate_second_order,
    simulate_second_order_exact,
    simulate_third_order_70,
    step_plane_system,
    step_reduced_830,
    step_second_order,
)
from .stability import (
    Equilibrium,
    StabilityReport,
    Verdict,
    equilibria_166,
    equilibrium_830,
    local_stability_166,
    partial_prev_166,
)
from .intervals import (
    BoundKind,
    CertificationFailed,
    EnvelopeDirection,
    EnvelopePair,
    EventualBound,
    IntervalCertificate,
    MMVerdict,
    check_invariant_lower_166,
    check_invariant_upper_166,
    envelope_limit,
    mm_certify_166,
)
from .cases import (
    BoundednessAudit,
    Case166Branch,
    ConjectureCase,
    ConjectureProbeReport,
    GASReport,
    GASVerdict,
    Growth,
    classify_166,
    probe_conjecture,
    verify_bounded_830,
    verify_gas_166,
)
from .sweep import SweepResult, SweepSpec, emit_report, load_sweep_spec, run_sweep

__version__ = "0.1.0"
