"""Command-line entry point: ratdyn <subcommand> [options].

Exit codes: 0 success, 1 inconclusive verification or failed audit, 2 usage
error.  Machine-readable reports go to ``--out``; a short summary goes to
standard output.  ``RATDYN_GUARDS=den=<v>,overflow=<v>`` overrides guards.
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

from . import _json
from .cases import (
    DEFAULT_SEEDS_166,
    Case166Branch,
    ConjectureCase,
    GASVerdict,
    case_params,
    classify_166,
    probe_conjecture,
    simulate_case,
    verify_bounded_830,
    verify_gas_166,
)
from .intervals import (
    CertificationFailed,
    EnvelopeDirection,
    check_invariant_lower_166,
    check_invariant_upper_166,
    envelope_limit,
    mm_certify_166,
)
from .recurrence import (
    DomainError,
    ForbiddenSetError,
    GuardConfig,
    Params166,
    Params830,
    simulate_plane_system,
    simulate_second_order,
    simulate_second_order_exact,
)
from .stability import equilibrium_830, fixed_point_residual_830, local_stability_166
from .sweep import SweepSpecError, emit_report, load_sweep_spec, run_sweep

EQUATIONS = ("166", "8,30", "68", "141", "70", "6,25")


class UsageError(Exception):
    def __init__(self, flag: str, message: str):
        super().__init__(f"argument {flag}: {message}")
        self.flag = flag


def _seed_list(text: str) -> list[tuple[float, ...]]:
    """Parse ``"x,y;x,y"`` into tuples."""
    try:
        return [tuple(float(v) for v in chunk.split(",")) for chunk in text.split(";") if chunk.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad seed list {text!r}: {exc}") from exc


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--out", type=Path, help="write the machine-readable report here")
    p.add_argument("--format", choices=("csv", "json"), default="json")
    p.add_argument("--dump-orbits", type=Path, metavar="DIR", help="write trajectory CSVs into DIR")
    p.add_argument("--seed", type=int, default=0, help="sampling seed (u64)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ratdyn", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    s = sub.add_parser("simulate", help="iterate one equation or system")
    s.add_argument("--eq", required=True, choices=EQUATIONS)
    for name in ("alpha", "beta", "gamma", "A", "C", "eps"):
        s.add_argument(f"--{name}", type=float)
    for name in ("x0", "x1", "x2", "y0"):
        s.add_argument(f"--{name}", type=float)
    s.add_argument("--steps", type=int, default=100)
    s.add_argument("--exact", action="store_true", help="exact rationals (166 only, <= 200 steps)")
    _common(s)
    s.set_defaults(format="csv")

    a = sub.add_parser("analyze", help="equilibrium, stability and interval certificates")
    a.add_argument("--eq", required=True, choices=("166", "8,30"))
    for name in ("alpha", "beta", "A", "gamma"):
        a.add_argument(f"--{name}", type=float)
    a.add_argument("--epsilon", type=float, default=1e-6)
    _common(a)

    v = sub.add_parser("verify-166", help="check global convergence for #166")
    v.add_argument("--alpha", type=float, required=True)
    v.add_argument("--beta", type=float, required=True)
    v.add_argument("--A", type=float, required=True)
    v.add_argument("--tol", type=float, default=1e-6)
    v.add_argument("--steps", type=int, default=10**5)
    v.add_argument("--seeds", type=_seed_list, help='seed pairs "x0,x1;x0,x1"')
    _common(v)

    w = sub.add_parser("verify-830", help="boundedness audit for #(8,30)")
    w.add_argument("--alpha", type=float, required=True)
    w.add_argument("--gamma", type=float, required=True)
    w.add_argument("--steps", type=int, default=10**6)
    w.add_argument("--seeds", type=_seed_list, default=[(1.0, 1.0), (2.0, 3.0)],
                   help='positive seed pairs "x0,y0;x0,y0"')
    _common(w)

    pr = sub.add_parser("probe", help="exploratory probe of an open case")
    pr.add_argument("--case", required=True, choices=[c.value for c in ConjectureCase])
    for name in ("alpha", "A", "C", "eps"):
        pr.add_argument(f"--{name}", type=float)
    pr.add_argument("--steps", type=int, default=10**5)
    pr.add_argument("--seeds", type=_seed_list, required=True)
    _common(pr)

    sw = sub.add_parser("sweep", help="run a sweep from a TOML config")
    sw.add_argument("--config", type=Path, required=True)
    sw.add_argument("--jobs", type=int, default=1)
    sw.add_argument("--timing", action="store_true", help="include wall times in JSON")
    _common(sw)
    return parser


def _need(args, *names, positive=True, allow_zero=()):
    for n in names:
        v = getattr(args, n)
        flag = f"--{n}"
        if v is None:
            raise UsageError(flag, "is required here")
        if not math.isfinite(v):
            raise UsageError(flag, f"must be finite, got {v}")
        if n in allow_zero:
            if v < 0:
                raise UsageError(flag, f"must be >= 0, got {v}")
        elif positive and not v > 0:
            raise UsageError(flag, f"must be > 0, got {v}")
        elif not positive and v < 0:
            raise UsageError(flag, f"must be >= 0, got {v}")


def _write(args, obj) -> str:
    text = _json.dumps(obj)
    if args.out:
        args.out.write_text(text)
    return text


def _dump(args, trajectories, stem: str) -> None:
    if not args.dump_orbits:
        return
    args.dump_orbits.mkdir(parents=True, exist_ok=True)
    for i, t in enumerate(trajectories):
        if isinstance(t, tuple):
            t[0].to_csv(args.dump_orbits / f"{stem}_{i:03d}_system.csv")
            t[1].to_csv(args.dump_orbits / f"{stem}_{i:03d}_reduced.csv")
        else:
            t.to_csv(args.dump_orbits / f"{stem}_{i:03d}.csv")


def _cmd_simulate(args, guards) -> int:
    if args.steps < 0:
        raise UsageError("--steps", "must be >= 0")
    eq = args.eq
    if args.exact and eq != "166":
        raise UsageError("--exact", "is only available for --eq 166")
    if eq == "166":
        _need(args, "alpha", "beta", "A")
        _need(args, "x0", "x1", positive=False)
        p = Params166(args.alpha, args.beta, args.A)
        t = (simulate_second_order_exact(p, args.x0, args.x1, args.steps) if args.exact
             else simulate_second_order(p, args.x0, args.x1, args.steps, guards))
    elif eq == "8,30":
        _need(args, "alpha", "gamma")
        _need(args, "x0", "y0", positive=False)
        t = simulate_plane_system(Params830(args.alpha, args.gamma).as_system(),
                                  args.x0, args.y0, args.steps, guards)
    else:
        params = {k: getattr(args, k) for k in ("alpha", "A", "C", "eps") if getattr(args, k) is not None}
        try:
            case_params(eq, params)
        except KeyError as exc:
            raise UsageError(f"--{exc.args[0]}", "is required here") from exc
        if eq == "70":
            _need(args, "x0", "x1", "x2", positive=False)
            seed = (args.x0, args.x1, args.x2)
        elif eq == "6,25":
            _need(args, "x0", "y0", positive=False)
            seed = (args.x0, args.y0)
        else:
            _need(args, "x0", "x1", positive=False)
            seed = (args.x0, args.x1)
        t = simulate_case(eq, params, seed, args.steps, guards)
    if args.format == "csv":
        text = t.to_csv()
    else:
        body = {"x": t.values, "status": t.status.value, "stop_index": t.stop_index}
        if t.y is not None:
            body["y"] = t.y
        if t.exact:
            body["x"] = [f"{v.numerator}/{v.denominator}" for v in t.values]
        text = _json.dumps(body)
    if args.out:
        args.out.write_text(text)
    else:
        sys.stdout.write(text)
    _dump(args, [t], f"eq{eq.replace(',', '_')}")
    return 0 if t.ok else 1


def _cmd_analyze(args, guards) -> int:
    if args.eq == "8,30":
        _need(args, "alpha", "gamma")
        p = Params830(args.alpha, args.gamma)
        x, y = equilibrium_830(p)
        report = {"equation": "8,30", "x_bar": x, "y_bar": y, "residual": fixed_point_residual_830(p)}
        _write(args, report)
        print(f"#(8,30) equilibrium: x = {x:.12g}, y = {y:.12g}")
        return 0
    _need(args, "alpha", "beta", "A")
    p = Params166(args.alpha, args.beta, args.A)
    branch = classify_166(p)
    report = {"equation": "166", "branch": branch, "stability": local_stability_166(p)}
    if branch is Case166Branch.A_GT_ALPHA_PLUS_BETA:
        report["invariant_interval"] = check_invariant_upper_166(p, seed=args.seed)
        try:
            pair, verdict = mm_certify_166(p)
            report["mm"] = {"envelopes": pair, "verdict": verdict}
        except CertificationFailed as exc:
            report["mm"] = {"error": str(exc), "gap": exc.gap}
        report["envelope"] = envelope_limit(p.alpha, p.beta, p.A, EnvelopeDirection.UPPER, args.epsilon)
    else:
        report["invariant_interval"] = check_invariant_lower_166(p, seed=args.seed)
        report["envelope"] = envelope_limit(p.alpha, p.beta, p.A, EnvelopeDirection.LOWER, args.epsilon)
    _write(args, report)
    st = report["stability"]
    print(f"branch: {branch.value}")
    print(f"equilibrium: {st.equilibrium.value:.12g}")
    print(f"verdict: {st.verdict.value}")
    return 0


def _cmd_verify_166(args, guards) -> int:
    _need(args, "alpha", "beta", "A", "tol")
    if args.steps < 1:
        raise UsageError("--steps", "must be >= 1")
    seeds = args.seeds or DEFAULT_SEEDS_166
    for s in seeds:
        if len(s) != 2 or min(s) < 0:
            raise UsageError("--seeds", "needs nonnegative pairs")
    r, trajs = verify_gas_166(Params166(args.alpha, args.beta, args.A), seeds, args.tol, args.steps,
                              guards, rng_seed=args.seed, keep_orbits=True)
    _write(args, r)
    _dump(args, trajs, "eq166")
    print(f"branch: {r.branch.value}")
    print(f"equilibrium: {r.equilibrium.value:.12g}")
    print(f"verdict: {r.verdict.value}")
    print(f"worst terminal deviation: {r.worst_deviation:.3e}")
    if r.cause:
        print(f"cause: {r.cause}")
    return 0 if r.verdict is GASVerdict.ALL_CONVERGED else 1


def _cmd_verify_830(args, guards) -> int:
    _need(args, "alpha", "gamma")
    if args.steps < 1:
        raise UsageError("--steps", "must be >= 1")
    for s in args.seeds:
        if len(s) != 2 or not min(s) > 0:
            raise UsageError("--seeds", "needs strictly positive pairs")
    audit, trajs = verify_bounded_830(Params830(args.alpha, args.gamma), args.seeds, args.steps,
                                      guards, keep_orbits=True)
    _write(args, audit)
    _dump(args, trajs, "eq8_30")
    print(f"sup x = {audit.sup_x:.6g}, sup y = {audit.sup_y:.6g}")
    print(f"inequality violations: {audit.violation_count}")
    print(f"audit: {'passed' if audit.passed else 'FLAGGED'}")
    for f in audit.flags:
        print(f"flag: {f}")
    return 0 if audit.passed else 1


def _cmd_probe(args, guards) -> int:
    params = {k: getattr(args, k) for k in ("alpha", "A", "C", "eps") if getattr(args, k) is not None}
    zero_ok = ("A",) if args.case == "141" else ()
    needed = {"68": ("alpha", "A", "C"), "141": ("alpha", "A", "C"), "70": ("alpha", "C"),
              "6,25": ("eps",)}[args.case]
    _need(args, *needed, allow_zero=zero_ok)
    dim = 3 if args.case == "70" else 2
    for s in args.seeds:
        if len(s) != dim or min(s) < 0:
            raise UsageError("--seeds", f"needs nonnegative {dim}-tuples")
    r, trajs = probe_conjecture(args.case, params, args.seeds, args.steps, guards, keep_orbits=True)
    _write(args, r)
    _dump(args, trajs, f"probe{args.case.replace(',', '_')}")
    for o in r.orbits:
        print(f"seed {o.seed}: max {o.max_value:.6g}, {o.growth.value} (rate {o.rate:.3g}), {o.status}")
    print("note: numerical probe only, no proof claimed")
    return 0


def _cmd_sweep(args, guards) -> int:
    if args.jobs < 1:
        raise UsageError("--jobs", "must be >= 1")
    try:
        spec = load_sweep_spec(args.config)
    except OSError as exc:
        raise UsageError("--config", f"cannot read {args.config}: {exc.strerror or exc}") from exc
    except (SweepSpecError, ValueError, KeyError) as exc:
        raise UsageError("--config", str(exc)) from exc
    result = run_sweep(spec, args.jobs)
    if args.out:
        emit_report(result, args.format, args.out, include_timing=args.timing)
    t = result.totals
    print(f"points: {len(result.rows)}  pass: {t['pass']}  fail: {t['fail']}  inconclusive: {t['inconclusive']}")
    return 0 if t["fail"] == 0 and t["inconclusive"] == 0 else 1


COMMANDS = {
    "simulate": _cmd_simulate,
    "analyze": _cmd_analyze,
    "verify-166": _cmd_verify_166,
    "verify-830": _cmd_verify_830,
    "probe": _cmd_probe,
    "sweep": _cmd_sweep,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    sub = parser._subparsers._group_actions[0].choices[args.command]
    try:
        guards = GuardConfig.from_env()
    except ValueError as exc:
        print(f"ratdyn: RATDYN_GUARDS: {exc}", file=sys.stderr)
        return 2
    try:
        return COMMANDS[args.command](args, guards)
    except UsageError as exc:
        sub.print_help(sys.stderr)
        print(f"{sub.prog}: error: {exc}", file=sys.stderr)
        return 2
    except DomainError as exc:
        sub.print_help(sys.stderr)
        print(f"{sub.prog}: error: {exc}", file=sys.stderr)
        return 2
    except ForbiddenSetError as exc:
        print(f"forbidden set: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"ratdyn: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
