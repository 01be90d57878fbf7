"""Spacecraft mission lab: task contracts, scenario composition, and
schedulability sweeps.

Tasks (DSN downlink, SBO observation, TCM heating / delta-v, CHRG charging)
are modeled per viewpoint (power, science & communication, navigation) as
step contracts over chained state variables:

* ``soc_k``  battery state of charge (%) after step k (``soc_0`` initial)
* ``d_k``    onboard science data storage (%)
* ``c_k``    cumulative science data acquired
* ``u_k``    trajectory estimation uncertainty (%)
* ``r_k``    relative trajectory progress (%)
* ``dt_k``   duration of step k (s), an input shared by the step's viewpoints

Exit variables of step k are the entry variables of step k+1, so composing
the per-step contracts with every junction kept produces one contract whose
outputs expose the whole state history.

The charging task assumes a valid (non-negative) entry charge; the purely
consuming tasks assume only a non-negative duration.  Composition then
derives the entry-charge requirement of a consumer chain from the upstream
guarantees, surfacing schedule preconditions such as "the initial charge
covers the worst-case first-step consumption".
"""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

from .contracts import PolyhedralContract, IncompatibilityError, get_variable_bounds, merge, optimize
from .contracts import compose
from .errors import ConfigError
from .lp import Direction
from .polyhedra import is_satisfiable
from .sampling import latin_hypercube_sample
from .terms import LinearTerm, Relation, TermList


class TaskKind(Enum):
    DSN = "DSN"
    SBO = "SBO"
    TCM_H = "TCM_H"
    TCM_DV = "TCM_DV"
    CHRG = "CHRG"


class Viewpoint(Enum):
    POWER = "power"
    SCIENCE = "science"
    NAV = "nav"


CANONICAL_SEQUENCE = (TaskKind.DSN, TaskKind.CHRG, TaskKind.SBO, TaskKind.TCM_H, TaskKind.TCM_DV)

# The long-scenario convention: the canonical 5-step sequence repeated.
TWENTY_STEP_SEQUENCE = CANONICAL_SEQUENCE * 4

Range = tuple[float, float]

_NONNEGATIVE_FIELDS = (
    "cons_dsn", "cons_sbo", "cons_tcm_h", "cons_tcm_dv",
    "gen_chrg", "rate_dsn", "sgen_sbo",
    "noise_dsn", "noise_chrg", "noise_tcm_dv",
)
_SIGNED_FIELDS = ("imp_sbo", "imp_tcm_dv")
CAPABILITY_FIELDS = _NONNEGATIVE_FIELDS + _SIGNED_FIELDS


@dataclass(frozen=True)
class TaskHyperparameters:
    """The 12 capability ranges of the task templates.

    Power rates and the DSN/SBO data rates are % per second; DSN/CHRG
    navigation noise is per task instance, TCM delta-v noise per second.
    The improvement ranges may have a negative lower bound (a navigation
    deterioration).
    """

    cons_dsn: Range = (0.05, 0.15)
    cons_sbo: Range = (0.05, 0.15)
    cons_tcm_h: Range = (0.05, 0.15)
    cons_tcm_dv: Range = (0.1, 0.3)
    gen_chrg: Range = (0.2, 0.5)
    rate_dsn: Range = (0.3, 0.8)
    sgen_sbo: Range = (0.1, 0.4)
    noise_dsn: Range = (1.0, 3.0)
    noise_chrg: Range = (1.0, 3.0)
    noise_tcm_dv: Range = (0.05, 0.2)
    imp_sbo: Range = (0.05, 0.4)
    imp_tcm_dv: Range = (0.1, 0.5)

    def __post_init__(self):
        for f in fields(self):
            lo, hi = getattr(self, f.name)
            if lo > hi:
                raise ConfigError(f"{f.name}: min {lo} exceeds max {hi}")
            if f.name in _NONNEGATIVE_FIELDS and lo < 0:
                raise ConfigError(f"{f.name}: negative rates are not meaningful")

    def range_for(self, name: str) -> Range:
        return getattr(self, name)


@dataclass(frozen=True)
class OperationalRequirements:
    min_soc: float = 70.0
    min_step_duration: float = 20.0
    initial_data_volume: float = 80.0
    initial_uncertainty: float = 60.0


def _leq(coeffs: dict[str, float], k: float) -> LinearTerm:
    return LinearTerm.make(coeffs, k, Relation.LEQ)


def _eq(coeffs: dict[str, float], k: float) -> LinearTerm:
    return LinearTerm.make(coeffs, k, Relation.EQ)


def _rate_band(delta: dict[str, float], rate: Range, dt: str) -> list[LinearTerm]:
    """rate_lo * dt <= delta <= rate_hi * dt as two inequality terms."""
    lo, hi = rate
    upper = dict(delta)
    upper[dt] = upper.get(dt, 0.0) - hi
    lower = {v: -c for v, c in delta.items()}
    lower[dt] = lower.get(dt, 0.0) + lo
    return [_leq(upper, 0.0), _leq(lower, 0.0)]


def _interval_band(delta: dict[str, float], rng: Range) -> list[LinearTerm]:
    """rng_lo <= delta <= rng_hi (per-event effect, not duration-scaled)."""
    lo, hi = rng
    return [_leq(dict(delta), hi), _leq({v: -c for v, c in delta.items()}, -lo)]


def task_viewpoint_contract(
    kind: TaskKind, viewpoint: Viewpoint, hyper: TaskHyperparameters, step: int
) -> PolyhedralContract:
    """The template contract of one task under one viewpoint at step index
    ``step`` (1-based).  Entry variables carry suffix ``step-1``, exit
    variables ``step``."""
    if step < 1:
        raise ConfigError("step indices start at 1")
    k, p = step, step - 1
    dt = f"dt_{k}"
    soc_in, soc_out = f"soc_{p}", f"soc_{k}"
    d_in, d_out = f"d_{p}", f"d_{k}"
    c_in, c_out = f"c_{p}", f"c_{k}"
    u_in, u_out = f"u_{p}", f"u_{k}"
    r_in, r_out = f"r_{p}", f"r_{k}"
    dt_nonneg = _leq({dt: -1.0}, 0.0)

    if viewpoint is Viewpoint.POWER:
        if kind is TaskKind.CHRG:
            gen = hyper.gen_chrg
            a = [dt_nonneg, _leq({soc_in: -1.0}, 0.0)]
            g = _rate_band({soc_out: 1.0, soc_in: -1.0}, gen, dt)
        else:
            cons = hyper.range_for(f"cons_{kind.value.lower()}")
            a = [dt_nonneg]
            g = _rate_band({soc_in: 1.0, soc_out: -1.0}, cons, dt)
        g += [_leq({soc_out: 1.0}, 100.0), _leq({soc_out: -1.0}, 0.0)]
        return PolyhedralContract([soc_in, dt], [soc_out], TermList(a), TermList(g))

    if viewpoint is Viewpoint.SCIENCE:
        if kind is TaskKind.DSN:
            a = [dt_nonneg, _leq({d_in: -1.0}, 0.0), _leq({d_in: 1.0}, 100.0)]
            g = _rate_band({d_in: 1.0, d_out: -1.0}, hyper.rate_dsn, dt)
            g.append(_eq({c_out: 1.0, c_in: -1.0}, 0.0))
            return PolyhedralContract([d_in, c_in, dt], [d_out, c_out], TermList(a), TermList(g))
        if kind is TaskKind.SBO:
            sg = hyper.sgen_sbo
            a = [
                dt_nonneg,
                _leq({c_in: -1.0}, 0.0),
                _leq({d_in: -1.0}, 0.0),
                _leq({d_in: 1.0, dt: sg[1]}, 100.0),
            ]
            g = [_leq({d_out: 1.0}, 100.0)]
            g += _rate_band({d_out: 1.0, d_in: -1.0}, sg, dt)
            g += _rate_band({c_out: 1.0, c_in: -1.0}, sg, dt)
            return PolyhedralContract([d_in, c_in, dt], [d_out, c_out], TermList(a), TermList(g))
        g = [_eq({d_out: 1.0, d_in: -1.0}, 0.0), _eq({c_out: 1.0, c_in: -1.0}, 0.0)]
        return PolyhedralContract([d_in, c_in], [d_out, c_out], TermList(()), TermList(g))

    # navigation viewpoint
    if kind in (TaskKind.DSN, TaskKind.CHRG):
        noise = hyper.range_for(f"noise_{kind.value.lower()}")
        a = [
            _leq({u_in: -1.0}, 0.0), _leq({u_in: 1.0}, 100.0),
            _leq({r_in: -1.0}, 0.0), _leq({r_in: 1.0}, 100.0),
        ]
        g = [_eq({r_out: 1.0, r_in: -1.0}, 0.0), _leq({u_out: 1.0}, 100.0)]
        g += _interval_band({u_out: 1.0, u_in: -1.0}, noise)
        return PolyhedralContract([u_in, r_in], [u_out, r_out], TermList(a), TermList(g))
    if kind is TaskKind.SBO:
        a = [dt_nonneg, _leq({u_in: 1.0}, 100.0)]
        g = [_eq({r_out: 1.0, r_in: -1.0}, 0.0), _leq({u_out: -1.0}, 0.0), _leq({u_out: 1.0}, 100.0)]
        g += _rate_band({u_in: 1.0, u_out: -1.0}, hyper.imp_sbo, dt)
        return PolyhedralContract([u_in, r_in, dt], [u_out, r_out], TermList(a), TermList(g))
    if kind is TaskKind.TCM_H:
        g = [_eq({u_out: 1.0, u_in: -1.0}, 0.0), _eq({r_out: 1.0, r_in: -1.0}, 0.0)]
        return PolyhedralContract([u_in, r_in], [u_out, r_out], TermList(()), TermList(g))
    # TCM_DV
    a = [dt_nonneg, _leq({u_in: -1.0}, 0.0), _leq({u_in: 1.0}, 100.0), _leq({r_in: 1.0}, 100.0)]
    g = [_leq({r_out: -1.0}, 0.0), _leq({u_out: -1.0}, 0.0), _leq({u_out: 1.0}, 100.0)]
    g += _rate_band({r_out: 1.0, r_in: -1.0}, hyper.imp_tcm_dv, dt)
    g += _rate_band({u_out: 1.0, u_in: -1.0}, hyper.noise_tcm_dv, dt)
    return PolyhedralContract([u_in, r_in, dt], [u_out, r_out], TermList(a), TermList(g))


def viewpoint_chain(
    sequence: Sequence[TaskKind], viewpoint: Viewpoint, hyper: TaskHyperparameters
) -> PolyhedralContract:
    """Left-fold composition of the per-step contracts, keeping every
    junction variable visible as a system output."""
    chain = task_viewpoint_contract(sequence[0], viewpoint, hyper, 1)
    for k, kind in enumerate(sequence[1:], start=2):
        step = task_viewpoint_contract(kind, viewpoint, hyper, k)
        keep = set(chain.outputs) & set(step.inputs)
        try:
            chain = compose(chain, step, keep=keep)
        except IncompatibilityError as exc:
            raise IncompatibilityError(
                exc.diagnostic,
                f"step {k} ({kind.value}, {viewpoint.value} viewpoint): {exc}",
            ) from exc
    return chain


def build_scenario(sequence: Sequence[TaskKind], hyper: TaskHyperparameters) -> PolyhedralContract:
    """The full scenario contract: three viewpoint chains merged into one."""
    if not sequence:
        raise ConfigError("scenario sequence must not be empty")
    power = viewpoint_chain(sequence, Viewpoint.POWER, hyper)
    science = viewpoint_chain(sequence, Viewpoint.SCIENCE, hyper)
    nav = viewpoint_chain(sequence, Viewpoint.NAV, hyper)
    return merge(merge(power, science), nav)


def requirements_contract(req: OperationalRequirements, sequence: Sequence[TaskKind]) -> PolyhedralContract:
    """Operational requirements as an input-only contract.

    Exit charge floors, per-step duration floors, and pinned initial data
    volume and uncertainty.  The initial charge is additionally capped at
    100% (it is a percentage; no task contract bounds the scenario entry).
    Merging with a scenario contract conjoins these constraints with it.
    """
    n = len(sequence)
    terms = [_leq({"soc_0": 1.0}, 100.0)]
    terms += [_leq({f"soc_{k}": -1.0}, -req.min_soc) for k in range(1, n + 1)]
    terms += [_leq({f"dt_{k}": -1.0}, -req.min_step_duration) for k in range(1, n + 1)]
    terms.append(_eq({"d_0": 1.0}, req.initial_data_volume))
    terms.append(_eq({"u_0": 1.0}, req.initial_uncertainty))
    names = ["soc_0"] + [f"soc_{k}" for k in range(1, n + 1)]
    names += [f"dt_{k}" for k in range(1, n + 1)] + ["d_0", "u_0"]
    return PolyhedralContract(names, [], TermList(terms), TermList(()))


@dataclass(frozen=True)
class ScheduleResult:
    admissible: bool
    contract: PolyhedralContract
    scenario_score: float
    requirement_score: float
    soc_bounds: tuple[tuple[float, float], ...] | None = None
    avg_soc_min: float | None = None
    avg_soc_max: float | None = None


def score(hyper: TaskHyperparameters, req: OperationalRequirements) -> tuple[float, float]:
    """Scenario score: mean of signed capability midpoints (generation,
    downlink, improvements positive; consumption, observation fill, noise
    negative).  Requirement score: mean of the four requirement values."""
    def mid(rng: Range) -> float:
        return 0.5 * (rng[0] + rng[1])

    positive = [hyper.gen_chrg, hyper.rate_dsn, hyper.imp_sbo, hyper.imp_tcm_dv]
    negative = [
        hyper.cons_dsn, hyper.cons_sbo, hyper.cons_tcm_h, hyper.cons_tcm_dv,
        hyper.sgen_sbo, hyper.noise_dsn, hyper.noise_chrg, hyper.noise_tcm_dv,
    ]
    scenario = (sum(mid(r) for r in positive) - sum(mid(r) for r in negative)) / 12.0
    requirement = (req.min_soc + req.min_step_duration + req.initial_data_volume + req.initial_uncertainty) / 4.0
    return scenario, requirement


def check_schedulable(
    scenario: PolyhedralContract,
    requirements: PolyhedralContract,
    *,
    hyper: TaskHyperparameters | None = None,
    req: OperationalRequirements | None = None,
    steps: int | None = None,
    light: bool = False,
) -> ScheduleResult:
    """Admissibility of a scenario against operational requirements.

    Admissible iff the merge succeeds, its assumptions are satisfiable, and
    assumptions plus guarantees are satisfiable.  Bounds and the average-soc
    objective are filled only for admissible combinations.  Inadmissibility
    is data, not an error.

    ``light=True`` (the sweep path) returns the merged conjunction without
    the redundancy sweeps; bounds and objectives are unchanged by reduction,
    so the reported numbers are identical either way.
    """
    out_set = set(scenario.outputs) | set(requirements.outputs)
    a_all = list(scenario.assumptions) + list(requirements.assumptions)
    a_terms = [t for t in a_all if not (t.vars & out_set)]
    g_terms = [t for t in a_all if t.vars & out_set] + list(scenario.guarantees) + list(requirements.guarantees)
    compatible = is_satisfiable(TermList(a_terms))
    consistent = compatible and is_satisfiable(TermList(a_terms + g_terms))
    admissible = compatible and consistent

    s_score, r_score = (math.nan, math.nan)
    if hyper is not None and req is not None:
        s_score, r_score = score(hyper, req)

    flat = PolyhedralContract(
        [v for v in dict.fromkeys(scenario.inputs + requirements.inputs) if v not in out_set],
        list(dict.fromkeys(scenario.outputs + requirements.outputs)),
        TermList(a_terms), TermList(g_terms),
    )
    if not admissible:
        return ScheduleResult(False, flat, s_score, r_score)

    merged = flat if light else merge(scenario, requirements)
    if steps is None:
        steps = sum(1 for v in merged.vars if v.startswith("soc_")) - 1
    bounds = tuple(get_variable_bounds(merged, f"soc_{k}") for k in range(1, steps + 1))
    avg = {f"soc_{k}": 1.0 / steps for k in range(1, steps + 1)}
    lo = optimize(merged, avg, Direction.MIN)
    hi = optimize(merged, avg, Direction.MAX)
    return ScheduleResult(True, merged, s_score, r_score, bounds, lo, hi)


# --- sweep driver -----------------------------------------------------------

DEFAULT_CAPABILITY_RANGES: dict[str, tuple[Range, Range]] = {
    # name: ((mean_lo, mean_hi), (dev_lo, dev_hi)); tuned so admissibility
    # is scarce under the default requirement ranges, as in the study.
    "cons_dsn": ((0.20, 0.90), (0.02, 0.10)),
    "cons_sbo": ((0.20, 0.90), (0.02, 0.10)),
    "cons_tcm_h": ((0.20, 0.90), (0.02, 0.10)),
    "cons_tcm_dv": ((0.20, 1.00), (0.02, 0.10)),
    "gen_chrg": ((0.10, 0.70), (0.02, 0.15)),
    "rate_dsn": ((0.60, 2.40), (0.10, 0.40)),
    "sgen_sbo": ((0.20, 1.20), (0.05, 0.20)),
    "noise_dsn": ((3.0, 12.0), (0.5, 2.0)),
    "noise_chrg": ((3.0, 12.0), (0.5, 2.0)),
    "noise_tcm_dv": ((0.05, 0.50), (0.01, 0.10)),
    "imp_sbo": ((0.10, 1.20), (0.05, 0.30)),
    "imp_tcm_dv": ((0.10, 1.20), (0.05, 0.30)),
}

DEFAULT_REQUIREMENT_RANGES: dict[str, Range] = {
    "min_soc": (60.0, 90.0),
    "min_step_duration": (10.0, 50.0),
    "initial_data_volume": (60.0, 100.0),
    "initial_uncertainty": (40.0, 90.0),
}

_REQUIREMENT_FIELDS = ("min_soc", "min_step_duration", "initial_data_volume", "initial_uncertainty")


@dataclass
class SweepConfig:
    sequence: tuple[TaskKind, ...] = CANONICAL_SEQUENCE
    n_scenarios: int = 20
    n_requirements: int = 20
    seed: int = 0
    capability_ranges: dict[str, tuple[Range, Range]] = field(
        default_factory=lambda: dict(DEFAULT_CAPABILITY_RANGES))
    requirement_ranges: dict[str, Range] = field(
        default_factory=lambda: dict(DEFAULT_REQUIREMENT_RANGES))
    jobs: int = 1
    svg: bool = False

    @staticmethod
    def from_dict(data: dict) -> "SweepConfig":
        cfg = SweepConfig()
        if "sequence" in data:
            try:
                cfg.sequence = tuple(TaskKind[name] for name in data["sequence"])
            except KeyError as exc:
                raise ConfigError(f"unknown task kind {exc}") from exc
        for key in ("n_scenarios", "n_requirements", "seed", "jobs"):
            if key in data:
                setattr(cfg, key, int(data[key]))
        if "svg" in data:
            cfg.svg = bool(data["svg"])
        caps = data.get("capabilities", {})
        for name, spec in caps.items():
            if name not in CAPABILITY_FIELDS:
                raise ConfigError(f"unknown capability {name!r}")
            cfg.capability_ranges[name] = (tuple(spec["mean"]), tuple(spec["dev"]))
        reqs = data.get("requirements", {})
        for name, spec in reqs.items():
            if name not in _REQUIREMENT_FIELDS:
                raise ConfigError(f"unknown requirement {name!r}")
            cfg.requirement_ranges[name] = tuple(spec)
        return cfg

    @staticmethod
    def load(path: str | Path) -> "SweepConfig":
        with open(path) as fh:
            return SweepConfig.from_dict(json.load(fh))


def sample_hyperparameters(config: SweepConfig) -> list[TaskHyperparameters]:
    """Latin-hypercube samples over (mean, deviation) per capability,
    mapped to [mean - dev, mean + dev] ranges (rates floored at zero)."""
    dims: list[Range] = []
    for name in CAPABILITY_FIELDS:
        mean_rng, dev_rng = config.capability_ranges[name]
        dims.append(mean_rng)
        dims.append(dev_rng)
    points = latin_hypercube_sample(config.n_scenarios, dims, config.seed)
    out = []
    for row in points:
        kwargs = {}
        for i, name in enumerate(CAPABILITY_FIELDS):
            mean, dev = row[2 * i], row[2 * i + 1]
            lo, hi = mean - dev, mean + dev
            if name in _NONNEGATIVE_FIELDS:
                lo = max(0.0, lo)
            kwargs[name] = (lo, hi)
        out.append(TaskHyperparameters(**kwargs))
    return out


def sample_requirements(config: SweepConfig) -> list[OperationalRequirements]:
    dims = [config.requirement_ranges[name] for name in _REQUIREMENT_FIELDS]
    points = latin_hypercube_sample(config.n_requirements, dims, config.seed + 1)
    return [OperationalRequirements(*map(float, row)) for row in points]


def _sweep_one_scenario(args) -> list[tuple]:
    si, hyper, reqs, sequence = args
    rows = []
    try:
        scenario = build_scenario(sequence, hyper)
    except IncompatibilityError:
        for ri, req in enumerate(reqs):
            s_score, r_score = score(hyper, req)
            rows.append((si, ri, s_score, r_score, False, None, None, None))
        return rows
    for ri, req in enumerate(reqs):
        req_contract = requirements_contract(req, sequence)
        result = check_schedulable(
            scenario, req_contract, hyper=hyper, req=req, steps=len(sequence), light=True)
        rows.append((
            si, ri, result.scenario_score, result.requirement_score,
            result.admissible, result.avg_soc_min, result.avg_soc_max,
            result.soc_bounds,
        ))
    return rows


def run_sweep(config: SweepConfig, out_dir: str | Path) -> dict:
    """The schedulability sweep: scenarios x requirement sets.

    Writes ``results.csv`` (one row per combination), ``bounds.json`` (per
    admissible combination), and optional per-schedule SVG ribbon charts.
    Deterministic for a fixed seed; parallel over scenarios when jobs > 1.
    """
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    hypers = sample_hyperparameters(config)
    reqs = sample_requirements(config)
    tasks = [(si, hyper, reqs, config.sequence) for si, hyper in enumerate(hypers)]
    if config.jobs > 1:
        with ProcessPoolExecutor(max_workers=config.jobs) as pool:
            blocks = list(pool.map(_sweep_one_scenario, tasks))
    else:
        blocks = [_sweep_one_scenario(t) for t in tasks]

    rows = [r for block in blocks for r in block]
    admissible_rows = [r for r in rows if r[4]]

    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([
        "scenario", "requirement", "scenario_score", "requirement_score",
        "admissible", "avg_soc_min", "avg_soc_max",
    ])
    for si, ri, ss, rs, adm, lo, hi, _ in rows:
        writer.writerow([
            si, ri, repr(ss), repr(rs), int(adm),
            "" if lo is None else repr(lo), "" if hi is None else repr(hi),
        ])
    (out_dir / "results.csv").write_text(buf.getvalue())

    bounds_payload = [
        {
            "scenario": si,
            "requirement": ri,
            "soc_bounds": [[lo, hi] for lo, hi in bounds],
        }
        for si, ri, _, _, adm, _, _, bounds in admissible_rows
    ]
    (out_dir / "bounds.json").write_text(json.dumps(bounds_payload, indent=2) + "\n")

    if config.svg:
        from .svg import ribbon_chart, scatter_chart

        for entry in bounds_payload:
            name = f"bounds_s{entry['scenario']:03d}_r{entry['requirement']:03d}.svg"
            (out_dir / name).write_text(ribbon_chart(entry["soc_bounds"], title="soc bounds per step"))
        pts = [
            (ss, lo, hi)
            for _, _, ss, _, adm, lo, hi, _ in rows
            if adm
        ]
        if pts:
            series = [
                ("min", [(x, lo) for x, lo, _ in pts]),
                ("max", [(x, hi) for x, _, hi in pts]),
            ]
            (out_dir / "score_scatter.svg").write_text(
                scatter_chart(series, x_label="scenario score", y_label="avg soc"))

    return {
        "combinations": len(rows),
        "admissible": len(admissible_rows),
        "results_csv": str(out_dir / "results.csv"),
        "bounds_json": str(out_dir / "bounds.json"),
    }
