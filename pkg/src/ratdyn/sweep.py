"""
Batch execution of the case-study checks over parameter grids or random
samples.

Every task draws its randomness from ``numpy.random.default_rng([rng_seed,
stream, index])``, so a sweep gives the same rows whatever the worker count.

Config files are TOML::

    target = "verify-166"        # verify-166 | verify-830 | probe
    case = "70"                  # probe only: 68 | 141 | 70 | 6,25
    mode = "grid"                # grid | random
    samples = 100                # random mode: number of parameter points
    rng_seed = 42
    max_steps = 100000
    tol = 1e-6

    [parameters.alpha]           # one table per coefficient, in order
    values = [0.25, 1, 4]        # explicit list, or
    # low = 0.25, high = 4, count = 3, spacing = "log" | "linear"

    [seeds]
    strategy = "fixed"           # fixed | box
    points = [[0, 0], [5, 5]]
    # strategy = "box": low = 0, high = 10, count = 9

    [[extra_points]]             # appended after the grid / samples
    alpha = 1
    beta = 1
    A = 2
"""

from __future__ import annotations

import csv
import enum
import io
import itertools
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import _json
from .cases import (
    ConjectureCase,
    GASVerdict,
    Growth,
    probe_conjecture,
    verify_bounded_830,
    verify_gas_166,
)
from .recurrence import Params166, Params830

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib


class SweepSpecError(ValueError):
    """A sweep specification is malformed."""


class Target(enum.Enum):
    VERIFY_166 = "verify-166"
    VERIFY_830 = "verify-830"
    PROBE = "probe"


PARAM_NAMES = {
    Target.VERIFY_166: ("alpha", "beta", "A"),
    Target.VERIFY_830: ("alpha", "gamma"),
    ConjectureCase.C68: ("alpha", "A", "C"),
    ConjectureCase.C141: ("alpha", "A", "C"),
    ConjectureCase.C70: ("alpha", "C"),
    ConjectureCase.C6_25: ("eps",),
}


@dataclass(frozen=True)
class ParamRange:
    low: float = 0.0
    high: float = 0.0
    count: int = 1
    spacing: str = "log"
    values: tuple[float, ...] | None = None

    def grid(self) -> list[float]:
        if self.values is not None:
            return [float(v) for v in self.values]
        if self.count == 1:
            return [float(self.low)]
        if self.spacing == "log":
            return np.geomspace(self.low, self.high, self.count).tolist()
        return np.linspace(self.low, self.high, self.count).tolist()

    def sample(self, rng: np.random.Generator) -> float:
        if self.values is not None:
            return float(self.values[rng.integers(len(self.values))])
        if self.low == self.high:
            return float(self.low)
        if self.spacing == "log" and self.low > 0:
            return float(math.exp(rng.uniform(math.log(self.low), math.log(self.high))))
        return float(rng.uniform(self.low, self.high))

    @property
    def minimum(self) -> float:
        return min(self.values) if self.values is not None else self.low


@dataclass(frozen=True)
class SeedStrategy:
    """Either a fixed list of seed tuples or ``count`` uniform draws from a box."""

    points: tuple[tuple[float, ...], ...] | None = None
    low: float = 0.0
    high: float = 10.0
    count: int = 0

    def seeds_for(self, rng: np.random.Generator, dim: int) -> list[tuple[float, ...]]:
        if self.points is not None:
            return [tuple(float(v) for v in s) for s in self.points]
        return [tuple(float(v) for v in rng.uniform(self.low, self.high, dim)) for _ in range(self.count)]


@dataclass(frozen=True)
class SweepSpec:
    target: Target
    parameters: dict[str, ParamRange]
    seeds: SeedStrategy
    rng_seed: int = 0
    max_steps: int = 10**5
    tol: float = 1e-6
    mode: str = "grid"
    samples: int = 0
    case: ConjectureCase | None = None
    extra_points: tuple[dict, ...] = ()

    def __post_init__(self):
        self.validate()

    @property
    def param_names(self) -> tuple[str, ...]:
        return PARAM_NAMES[self.case if self.target is Target.PROBE else self.target]

    @property
    def seed_dim(self) -> int:
        return 3 if self.case is ConjectureCase.C70 else 2

    def validate(self) -> None:
        if self.target is Target.PROBE and self.case is None:
            raise SweepSpecError("probe sweeps need a case")
        if self.mode not in ("grid", "random"):
            raise SweepSpecError(f"mode must be 'grid' or 'random', got {self.mode!r}")
        names = self.param_names
        missing = set(names) - set(self.parameters)
        extra = set(self.parameters) - set(names)
        if missing or extra:
            raise SweepSpecError(f"parameters must be exactly {names}; missing {sorted(missing)}, "
                                 f"unexpected {sorted(extra)}")
        for name, r in self.parameters.items():
            if r.values is None:
                if r.count < 1:
                    raise SweepSpecError(f"{name}: grid count must be >= 1, got {r.count}")
                if r.low > r.high:
                    raise SweepSpecError(f"{name}: low {r.low} exceeds high {r.high}")
                if r.spacing not in ("log", "linear"):
                    raise SweepSpecError(f"{name}: spacing must be 'log' or 'linear'")
            elif len(r.values) == 0:
                raise SweepSpecError(f"{name}: empty value list")
            zero_ok = self.case is ConjectureCase.C141 and name == "A"
            if not (r.minimum >= 0 if zero_ok else r.minimum > 0):
                raise SweepSpecError(f"{name}: range must be {'>= 0' if zero_ok else '> 0'}")
        if self.mode == "random" and self.samples < 1 and not self.extra_points:
            raise SweepSpecError("random mode needs samples >= 1")
        s = self.seeds
        if s.points is not None:
            if len(s.points) == 0:
                raise SweepSpecError("fixed seed list is empty")
            if any(len(p) != self.seed_dim for p in s.points):
                raise SweepSpecError(f"every seed needs {self.seed_dim} coordinates")
        elif s.count < 1 or s.low > s.high or s.low < 0:
            raise SweepSpecError("seed box needs count >= 1 and 0 <= low <= high")
        if self.max_steps < 0 or not self.tol > 0:
            raise SweepSpecError("max_steps must be >= 0 and tol > 0")

    def points(self) -> list[dict[str, float]]:
        names = self.param_names
        if self.mode == "grid":
            grids = [self.parameters[n].grid() for n in names]
            pts = [dict(zip(names, combo)) for combo in itertools.product(*grids)]
        else:
            pts = []
            for i in range(self.samples):
                rng = np.random.default_rng([self.rng_seed, 0, i])
                pts.append({n: self.parameters[n].sample(rng) for n in names})
        pts.extend({n: float(pt[n]) for n in names} for pt in self.extra_points)
        return pts

    def to_dict(self) -> dict:
        return {
            "target": self.target.value,
            "case": self.case.value if self.case else None,
            "mode": self.mode,
            "samples": self.samples,
            "rng_seed": self.rng_seed,
            "max_steps": self.max_steps,
            "tol": self.tol,
            "parameters": {k: _json.jsonable(v) for k, v in self.parameters.items()},
            "seeds": _json.jsonable(self.seeds),
            "extra_points": list(self.extra_points),
        }


@dataclass(frozen=True)
class SweepRow:
    params: dict[str, float]
    verdict: str
    summary: str
    worst_metric: float
    wall_ms: float = field(default=0.0, compare=False)


@dataclass(frozen=True)
class SweepResult:
    param_names: tuple[str, ...]
    rows: list[SweepRow]
    totals: dict[str, int]

    def to_dict(self, include_timing: bool = False) -> dict:
        rows = []
        for r in self.rows:
            d = {"params": r.params, "verdict": r.verdict, "summary": r.summary,
                 "worst_metric": r.worst_metric}
            if include_timing:
                d["wall_ms"] = r.wall_ms
            rows.append(d)
        return _json.jsonable({"param_names": list(self.param_names), "rows": rows, "totals": self.totals})

    @classmethod
    def from_dict(cls, d: dict) -> SweepResult:
        def num(v):
            return float(v) if not isinstance(v, str) else float(v.replace("+inf", "inf"))
        rows = [SweepRow(r["params"], r["verdict"], r["summary"], num(r["worst_metric"]),
                         r.get("wall_ms", 0.0)) for r in d["rows"]]
        return cls(tuple(d["param_names"]), rows, dict(d["totals"]))


VERDICTS = ("pass", "fail", "inconclusive")


def _run_task(spec: SweepSpec, index: int, params: dict[str, float]) -> SweepRow:
    t0 = time.perf_counter()
    rng = np.random.default_rng([spec.rng_seed, 1, index])
    seeds = spec.seeds.seeds_for(rng, spec.seed_dim)
    try:
        verdict, summary, metric = _evaluate(spec, params, seeds, index)
    except (ArithmeticError, ValueError) as exc:
        verdict, summary, metric = "inconclusive", f"{type(exc).__name__}: {exc}", math.nan
    return SweepRow(params, verdict, summary, metric, (time.perf_counter() - t0) * 1e3)


def _evaluate(spec: SweepSpec, params, seeds, index):
    if spec.target is Target.VERIFY_166:
        r = verify_gas_166(Params166(**params), seeds, spec.tol, spec.max_steps, rng_seed=index)
        if r.verdict is GASVerdict.ALL_CONVERGED:
            return "pass", f"{r.branch.value}: AllConverged", r.worst_deviation
        finite = all(o.status == "Completed" for o in r.orbits)
        return ("fail" if finite else "inconclusive"), f"{r.branch.value}: {r.cause}", r.worst_deviation
    if spec.target is Target.VERIFY_830:
        a = verify_bounded_830(Params830(**params), seeds, spec.max_steps)
        sup = max(a.sup_x, a.sup_y)
        if a.passed:
            return "pass", "bounded audit passed", sup
        if a.overflow:
            return "inconclusive", "; ".join(a.flags), sup
        return "fail", f"{a.violation_count} violations; " + "; ".join(a.flags), sup
    r = probe_conjecture(spec.case, params, seeds, spec.max_steps)
    suspects = sum(o.growth is Growth.GROWTH_SUSPECT for o in r.orbits)
    top = max(o.max_value for o in r.orbits)
    if suspects:
        return "fail", f"{suspects} GrowthSuspect orbit(s)", top
    return "pass", "ApparentlyBounded", top


def _run_packed(args):
    return _run_task(*args)


def run_sweep(spec: SweepSpec, parallelism: int = 1) -> SweepResult:
    """Run every parameter point; row order and content do not depend on
    ``parallelism``.  Per-row failures become 'inconclusive' rows."""
    if parallelism < 1:
        raise ValueError(f"parallelism must be >= 1, got {parallelism}")
    tasks = [(spec, i, pt) for i, pt in enumerate(spec.points())]
    if parallelism == 1 or len(tasks) <= 1:
        rows = [_run_packed(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=parallelism) as ex:
            rows = list(ex.map(_run_packed, tasks, chunksize=max(1, len(tasks) // (4 * parallelism))))
    totals = {v: 0 for v in VERDICTS}
    for r in rows:
        totals[r.verdict] += 1
    return SweepResult(spec.param_names, rows, totals)


def emit_report(result: SweepResult, fmt: str, destination: str | Path,
                include_timing: bool = False) -> None:
    """Write CSV (``<params>,verdict,worst_metric,wall_ms``) or JSON.

    JSON omits wall-clock times unless ``include_timing`` is set, which keeps
    it byte-identical across reruns.
    """
    fmt = fmt.lower()
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow([*result.param_names, "verdict", "worst_metric", "wall_ms"])
        for r in result.rows:
            w.writerow([*(repr(r.params[n]) for n in result.param_names), r.verdict,
                        repr(r.worst_metric), f"{r.wall_ms:.3f}"])
        text = buf.getvalue()
    elif fmt == "json":
        text = json.dumps(result.to_dict(include_timing), indent=2, sort_keys=True) + "\n"
    else:
        raise ValueError(f"format must be 'csv' or 'json', got {fmt!r}")
    try:
        Path(destination).write_text(text)
    except OSError as exc:
        raise OSError(f"cannot write sweep report to {destination}: {exc.strerror or exc}") from exc


def load_report(path: str | Path) -> SweepResult:
    return SweepResult.from_dict(json.loads(Path(path).read_text()))


def spec_from_dict(cfg: dict) -> SweepSpec:
    try:
        target = Target(cfg["target"])
    except (KeyError, ValueError) as exc:
        raise SweepSpecError(f"target must be one of {[t.value for t in Target]}") from exc
    case = ConjectureCase(str(cfg["case"])) if cfg.get("case") is not None else None
    params = {}
    for name, raw in cfg.get("parameters", {}).items():
        if isinstance(raw, (list, tuple)):
            raw = {"values": raw}
        vals = raw.get("values")
        params[name] = ParamRange(
            low=float(raw.get("low", 0.0)), high=float(raw.get("high", raw.get("low", 0.0))),
            count=int(raw.get("count", 1)), spacing=raw.get("spacing", "log"),
            values=tuple(float(v) for v in vals) if vals is not None else None,
        )
    sc = cfg.get("seeds", {})
    strategy = sc.get("strategy", "fixed")
    if strategy == "fixed":
        seeds = SeedStrategy(points=tuple(tuple(float(v) for v in p) for p in sc.get("points", [])))
    elif strategy == "box":
        seeds = SeedStrategy(low=float(sc.get("low", 0.0)), high=float(sc.get("high", 10.0)),
                             count=int(sc.get("count", 0)))
    else:
        raise SweepSpecError(f"seed strategy must be 'fixed' or 'box', got {strategy!r}")
    return SweepSpec(
        target=target, parameters=params, seeds=seeds,
        rng_seed=int(cfg.get("rng_seed", 0)), max_steps=int(cfg.get("max_steps", 10**5)),
        tol=float(cfg.get("tol", 1e-6)), mode=cfg.get("mode", "grid"),
        samples=int(cfg.get("samples", 0)), case=case,
        extra_points=tuple(dict(p) for p in cfg.get("extra_points", [])),
    )


def load_sweep_spec(path: str | Path) -> SweepSpec:
    with open(path, "rb") as fh:
        return spec_from_dict(tomllib.load(fh))
