"""Aircraft fuel/thermal management lab.

Component contracts for the fuel loop (pump, electric load, generator,
engine, heat load, splitter, fuel-air heat exchanger), their composition
into the system under design, refinement against the system specification,
temperature-bound extraction, grid exploration over flight regimes and flow
rates, and tolerance optimization.

Fuel and air flow rates are instance parameters; temperatures and
electrical/heat powers are contract variables, which keeps every constraint
linear.  Variables (SI units): T_in, T_a, w_nom (inputs); T_ep, w_ep, w_l,
h_l, h_g, h_e, T_hl, T_s internal; T_e, T_out outputs.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .contracts import (
    IncompatibilityError,
    PolyhedralContract,
    RefinementResult,
    compose,
    get_variable_bounds,
    refines,
)
from .errors import ConfigError, ConstructionError, RangeError
from .neldermead import nelder_mead_minimize
from .terms import EMPTY, LinearTerm, Relation, TermList


@dataclass(frozen=True)
class PhysicalConstants:
    """Fuel-loop constants.  Efficiencies of the generator and the electric
    load have no published values; the defaults here were chosen so the
    selected flight regimes admit valid instances (see the lab README)."""

    c_f: float = 200.0        # fuel specific heat, J/(kg K)
    c_a: float = 1000.0       # air specific heat, J/(kg K)
    rho_f: float = 800.0      # fuel density, kg/m^3
    dp_ep: float = 6.9e6      # pump pressure rise, Pa
    eta_ep: float = 0.6       # pump efficiency
    eta_x: float = 0.6        # heat exchanger efficiency
    k_e: float = 5000.0       # engine heat per kg of fuel, J/kg
    eta_g: float = 0.99       # generator efficiency (documented default)
    eta_l: float = 0.98       # electric load efficiency (documented default)
    t_ref_split: float = 300.0  # splitter tolerance scaling, K

    def __post_init__(self):
        for name, value in self.__dict__.items():
            if not value > 0:
                raise ConfigError(f"constant {name} must be positive, got {value}")

    @property
    def pump_dt(self) -> float:
        """Nominal fuel temperature rise through the pump, K."""
        return (1.0 - self.eta_ep) * self.dp_ep / (self.c_f * self.rho_f * self.eta_ep)

    def pump_power(self, mdot_in: float) -> float:
        return mdot_in * self.dp_ep / (self.rho_f * self.eta_ep)


T_IN_NOMINAL = 288.0      # K
W_NOM_NOMINAL = 140_000.0  # W


def isa_air_temperature(alt_km: float) -> float:
    """Two-layer ISA: linear lapse to 11 km, isothermal 11-20 km."""
    if not 0.0 <= alt_km <= 20.0:
        raise RangeError(f"altitude {alt_km} km outside the supported 0-20 km band")
    if alt_km <= 11.0:
        return 288.15 - 6.5 * alt_km
    return 216.65


@dataclass(frozen=True)
class OperatingPoint:
    alt_km: float
    thrust_kg: float
    mdot_in: float
    mdot_a: float
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)

    def __post_init__(self):
        if self.mdot_a < 0:
            raise ConstructionError("air flow must be non-negative")
        if not self.mdot_in > self.mdot_e > 0:
            raise ConstructionError(
                f"need mdot_in > mdot_e > 0; got mdot_in={self.mdot_in}, mdot_e={self.mdot_e:.4f}")

    @property
    def mdot_e(self) -> float:
        return 0.7 * self.thrust_kg / 3600.0

    @property
    def mdot_s(self) -> float:
        """Return-line fuel flow."""
        return self.mdot_in - self.mdot_e

    @property
    def t_a_nominal(self) -> float:
        return isa_air_temperature(self.alt_km)

    @property
    def engine_heat(self) -> float:
        return self.constants.k_e * self.mdot_e


class ComponentKind(Enum):
    PUMP = "pump"
    GENERATOR = "generator"
    LOAD = "load"
    HEAT_LOAD = "heat_load"
    SPLITTER = "splitter"
    HX_FIXED = "hx_fixed"
    HX_CONTROLLED = "hx_controlled"
    ENGINE = "engine"


class HxKind(Enum):
    FIXED = "fixed"
    CONTROLLED = "controlled"


@dataclass(frozen=True)
class ToleranceVector:
    """Multiplicative uncertainty bands on the component guarantees."""

    eps_ep_w: float = 0.0
    eps_ep_t: float = 0.0
    eps_g: float = 0.0
    eps_l_w: float = 0.0
    eps_l_h: float = 0.0
    eps_hl: float = 0.0
    eps_s: float = 0.0

    FIELDS = ("eps_ep_w", "eps_ep_t", "eps_g", "eps_l_w", "eps_l_h", "eps_hl", "eps_s")

    @staticmethod
    def uniform(value: float) -> "ToleranceVector":
        return ToleranceVector(*([value] * 7))

    @staticmethod
    def from_array(values: Iterable[float]) -> "ToleranceVector":
        vals = list(values)
        if len(vals) != 7:
            raise ConfigError("tolerance vector needs 7 entries")
        return ToleranceVector(*map(float, vals))

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, f) for f in self.FIELDS])


def _band(expr: dict[str, float], lo: float, hi: float) -> list[LinearTerm]:
    """lo <= expr <= hi; a degenerate band becomes one equality term."""
    if lo == hi:
        return [LinearTerm.make(expr, lo, Relation.EQ)]
    neg = {v: -c for v, c in expr.items()}
    return [LinearTerm.make(expr, hi, Relation.LEQ), LinearTerm.make(neg, -lo, Relation.LEQ)]


def _scaled_band(expr: dict[str, float], center: dict[str, float], center_const: float, eps: float) -> list[LinearTerm]:
    """(1-eps)*center <= expr <= (1+eps)*center for a linear center term."""
    out = []
    hi = {v: c for v, c in expr.items()}
    for v, c in center.items():
        hi[v] = hi.get(v, 0.0) - (1.0 + eps) * c
    lo = {v: -c for v, c in expr.items()}
    for v, c in center.items():
        lo[v] = lo.get(v, 0.0) + (1.0 - eps) * c
    if eps == 0.0 and not center:
        return [LinearTerm.make(expr, center_const, Relation.EQ)]
    if eps == 0.0:
        eq = dict(expr)
        for v, c in center.items():
            eq[v] = eq.get(v, 0.0) - c
        return [LinearTerm.make(eq, center_const, Relation.EQ)]
    out.append(LinearTerm.make(hi, (1.0 + eps) * center_const, Relation.LEQ))
    out.append(LinearTerm.make(lo, -(1.0 - eps) * center_const, Relation.LEQ))
    return out


def make_component(kind: ComponentKind, op: OperatingPoint, eps: ToleranceVector) -> PolyhedralContract:
    """The contract of one fuel-loop component at an operating point."""
    k = op.constants
    if kind is ComponentKind.PUMP:
        w_hat = k.pump_power(op.mdot_in)
        g = _scaled_band({"w_ep": 1.0}, {}, w_hat, eps.eps_ep_w)
        g += _scaled_band({"T_ep": 1.0, "T_in": -1.0}, {}, k.pump_dt, eps.eps_ep_t)
        return PolyhedralContract(["T_in"], ["T_ep", "w_ep"], EMPTY, TermList(g))
    if kind is ComponentKind.LOAD:
        g = _scaled_band({"w_l": 1.0}, {"w_nom": 1.0}, 0.0, eps.eps_l_w)
        g += _scaled_band({"h_l": 1.0}, {"w_l": 1.0 - k.eta_l}, 0.0, eps.eps_l_h)
        return PolyhedralContract(["w_nom"], ["w_l", "h_l"], EMPTY, TermList(g))
    if kind is ComponentKind.GENERATOR:
        ratio = 1.0 / k.eta_g - 1.0
        g = _scaled_band({"h_g": 1.0}, {"w_ep": ratio, "w_l": ratio}, 0.0, eps.eps_g)
        return PolyhedralContract(["w_ep", "w_l"], ["h_g"], EMPTY, TermList(g))
    if kind is ComponentKind.ENGINE:
        g = [LinearTerm.make({"h_e": 1.0}, op.engine_heat, Relation.EQ)]
        return PolyhedralContract([], ["h_e"], EMPTY, TermList(g))
    if kind is ComponentKind.HEAT_LOAD:
        scale = 1.0 / (op.mdot_in * k.c_f)
        center = {"h_g": scale, "h_l": scale, "h_e": scale}
        g = _scaled_band({"T_hl": 1.0, "T_ep": -1.0}, center, 0.0, eps.eps_hl)
        return PolyhedralContract(["T_ep", "h_g", "h_l", "h_e"], ["T_hl"], EMPTY, TermList(g))
    if kind is ComponentKind.SPLITTER:
        slack = eps.eps_s * k.t_ref_split
        g = _band({"T_e": 1.0, "T_hl": -1.0}, -slack, slack)
        g += _band({"T_s": 1.0, "T_hl": -1.0}, -slack, slack)
        return PolyhedralContract(["T_hl"], ["T_e", "T_s"], EMPTY, TermList(g))
    if kind is ComponentKind.HX_FIXED:
        if op.mdot_s <= 0:
            raise ConstructionError("fixed heat exchanger needs return flow: mdot_in > mdot_e")
        r = k.eta_x * op.mdot_a * k.c_a / (op.mdot_s * k.c_f)
        # T_s - T_out = r (T_s - T_a)  =>  (1 - r) T_s + r T_a - T_out = 0
        g = [LinearTerm.make({"T_s": 1.0 - r, "T_a": r, "T_out": -1.0}, 0.0, Relation.EQ)]
        return PolyhedralContract(["T_s", "T_a"], ["T_out"], EMPTY, TermList(g))
    if kind is ComponentKind.HX_CONTROLLED:
        a = [LinearTerm.make({"T_a": 1.0, "T_s": -1.0}, -10.0, Relation.LEQ)]
        g = _band({"T_out": 1.0, "T_in": -1.0}, -5.0, 5.0)
        return PolyhedralContract(["T_s", "T_a", "T_in"], ["T_out"], TermList(a), TermList(g))
    raise ConfigError(f"unknown component kind {kind!r}")


_SUD_ORDER = (
    ComponentKind.PUMP,
    ComponentKind.LOAD,
    ComponentKind.GENERATOR,
    ComponentKind.ENGINE,
    ComponentKind.HEAT_LOAD,
    ComponentKind.SPLITTER,
)


def build_sud(op: OperatingPoint, eps: ToleranceVector, hx_kind: HxKind, *, full_reduce: bool = True) -> PolyhedralContract:
    """Compose the fuel loop (with its engine model) in topological order.

    Inputs of the result are {T_in, T_a, w_nom}; outputs {T_e, T_out}.
    Raises :class:`IncompatibilityError` when a component assumption cannot
    be discharged at this operating point.
    """
    hx = ComponentKind.HX_FIXED if hx_kind is HxKind.FIXED else ComponentKind.HX_CONTROLLED
    system = make_component(_SUD_ORDER[0], op, eps)
    for kind in _SUD_ORDER[1:] + (hx,):
        system = compose(system, make_component(kind, op, eps), full_reduce=full_reduce)
    return system


def make_spec(op: OperatingPoint) -> PolyhedralContract:
    """The system specification: banded inputs, boxed engine temperature,
    and tank-return temperature within 10 K of the tank temperature."""
    t_a = op.t_a_nominal
    a = _band({"T_in": 1.0}, 0.98 * T_IN_NOMINAL, 1.02 * T_IN_NOMINAL)
    a += _band({"T_a": 1.0}, 0.98 * t_a, 1.02 * t_a)
    a += _band({"w_nom": 1.0}, 0.95 * W_NOM_NOMINAL, 1.05 * W_NOM_NOMINAL)
    g = _band({"T_e": 1.0}, 300.0, 330.0)
    g += _band({"T_out": 1.0, "T_in": -1.0}, -10.0, 10.0)
    return PolyhedralContract(["T_in", "T_a", "w_nom"], ["T_e", "T_out"], TermList(a), TermList(g))


def assumption_only(c: PolyhedralContract) -> PolyhedralContract:
    """The contract (A, true) over the same inputs."""
    return PolyhedralContract(c.inputs, [], c.assumptions, EMPTY)


@dataclass(frozen=True)
class InstanceResult:
    op: OperatingPoint
    eps: ToleranceVector
    hx_kind: HxKind
    refines_spec: bool
    te_bounds: tuple[float, float] | None = None
    tout_bounds: tuple[float, float] | None = None
    failure: str | None = None

    @property
    def valid(self) -> bool:
        return self.refines_spec


def evaluate_instance(
    op: OperatingPoint, eps: ToleranceVector, hx_kind: HxKind, *, fast: bool = False
) -> InstanceResult:
    """Refinement check plus temperature bounds over SUD constrained by the
    specification's assumptions.  Composition failures are recorded, not
    raised.

    Bounds are extracted from the un-eliminated constraint union (the same
    polytope as the composed system restricted by the specification
    assumptions); that keeps the engine-temperature queries literally
    independent of the downstream exchanger row, so they are bit-identical
    across air-flow settings.
    """
    try:
        sud = build_sud(op, eps, hx_kind, full_reduce=not fast)
    except IncompatibilityError as exc:
        return InstanceResult(op, eps, hx_kind, False, failure=str(exc))
    spec = make_spec(op)
    if fast:
        ref_ok = _fast_refines(sud, spec)
    else:
        ref_ok = refines(sud, spec).ok
    from .polyhedra import is_satisfiable, var_bounds as _var_bounds

    soup = _constraint_soup(op, eps, hx_kind)
    if soup is None or not is_satisfiable(soup):
        return InstanceResult(op, eps, hx_kind, False, failure="assumptions infeasible")
    te = _var_bounds(soup, "T_e")
    tout = _var_bounds(soup, "T_out")
    return InstanceResult(op, eps, hx_kind, ref_ok, te, tout)


def _fast_refines(sud: PolyhedralContract, spec: PolyhedralContract) -> bool:
    from .polyhedra import is_implied

    if not all(is_implied(t, spec.assumptions) for t in sud.assumptions):
        return False
    context = spec.assumptions + sud.guarantees
    return all(is_implied(t, context) for t in spec.guarantees)


# --- exploration ------------------------------------------------------------

DEFAULT_ALTITUDES = (5.0, 10.0, 15.0)
DEFAULT_THRUSTS = (5000.0, 10000.0, 15000.0, 20000.0)
DEFAULT_MDOT_IN = (4.0, 8.0, 16.0, 32.0, 48.0)
DEFAULT_MDOT_A = (0.2, 0.4, 0.8, 1.6, 3.2)


@dataclass
class ExploreConfig:
    altitudes: tuple[float, ...] = DEFAULT_ALTITUDES
    thrusts: tuple[float, ...] = DEFAULT_THRUSTS
    mdot_in: tuple[float, ...] = DEFAULT_MDOT_IN
    mdot_a: tuple[float, ...] = DEFAULT_MDOT_A
    hx_kinds: tuple[HxKind, ...] = (HxKind.FIXED, HxKind.CONTROLLED)
    eps: ToleranceVector = field(default_factory=lambda: ToleranceVector.uniform(0.01))
    constants: PhysicalConstants = field(default_factory=PhysicalConstants)
    svg: bool = False

    def __post_init__(self):
        for name in ("altitudes", "thrusts", "mdot_in", "mdot_a", "hx_kinds"):
            if not getattr(self, name):
                raise ConfigError(f"explore grid dimension {name!r} is empty")

    @staticmethod
    def from_dict(data: dict) -> "ExploreConfig":
        kwargs = {}
        for key, attr in (("altitudes", "altitudes"), ("thrusts", "thrusts"),
                          ("mdot_in", "mdot_in"), ("mdot_a", "mdot_a")):
            if key in data:
                kwargs[attr] = tuple(map(float, data[key]))
        if "hx" in data:
            raw = data["hx"]
            if raw == "both":
                kwargs["hx_kinds"] = (HxKind.FIXED, HxKind.CONTROLLED)
            else:
                kwargs["hx_kinds"] = (HxKind(raw),)
        const_kwargs = {}
        for name in ("eta_g", "eta_l", "c_f", "c_a", "rho_f", "dp_ep", "eta_ep", "eta_x", "k_e"):
            if name in data:
                const_kwargs[name] = float(data[name])
        if const_kwargs:
            kwargs["constants"] = replace(PhysicalConstants(), **const_kwargs)
        if "eps" in data:
            raw = data["eps"]
            if isinstance(raw, dict):
                kwargs["eps"] = ToleranceVector(**{k: float(v) for k, v in raw.items()})
            else:
                kwargs["eps"] = ToleranceVector.from_array(raw)
        if "svg" in data:
            kwargs["svg"] = bool(data["svg"])
        return ExploreConfig(**kwargs)

    @staticmethod
    def load(path: str | Path) -> "ExploreConfig":
        with open(path) as fh:
            return ExploreConfig.from_dict(json.load(fh))


def explore_grid(config: ExploreConfig, out_dir: str | Path | None = None) -> list[InstanceResult]:
    """Cartesian sweep over altitude x thrust x mdot_in x mdot_a x HX kind.

    Per-instance failures (non-composable or flow-infeasible points) are
    recorded as invalid results.  Optionally writes ``explore.csv`` and a
    validity scatter per altitude."""
    results: list[InstanceResult] = []
    for hx in config.hx_kinds:
        for alt in config.altitudes:
            for thrust in config.thrusts:
                for mdot_in in config.mdot_in:
                    for mdot_a in config.mdot_a:
                        try:
                            op = OperatingPoint(alt, thrust, mdot_in, mdot_a, config.constants)
                        except ConstructionError as exc:
                            dummy = OperatingPoint(alt, thrust, max(mdot_in, 0.7 * thrust / 3600.0 + 1e-6) + 1.0, mdot_a, config.constants)
                            results.append(InstanceResult(dummy, config.eps, hx, False, failure=str(exc)))
                            continue
                        results.append(evaluate_instance(op, config.eps, hx, fast=True))
    if out_dir is not None:
        write_explore_outputs(results, out_dir, svg=config.svg)
    return results


def write_explore_outputs(results: Sequence[InstanceResult], out_dir: str | Path, svg: bool = False) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["hx", "alt_km", "thrust_kg", "mdot_in", "mdot_a", "valid",
                     "te_lo", "te_hi", "tout_lo", "tout_hi", "failure"])
    for r in results:
        writer.writerow([
            r.hx_kind.value, repr(r.op.alt_km), repr(r.op.thrust_kg), repr(r.op.mdot_in), repr(r.op.mdot_a),
            int(r.refines_spec),
            *(("", "") if r.te_bounds is None else (repr(r.te_bounds[0]), repr(r.te_bounds[1]))),
            *(("", "") if r.tout_bounds is None else (repr(r.tout_bounds[0]), repr(r.tout_bounds[1]))),
            r.failure or "",
        ])
    (out_dir / "explore.csv").write_text(buf.getvalue())
    if svg:
        from .svg import scatter_chart

        for hx in {r.hx_kind for r in results}:
            for alt in sorted({r.op.alt_km for r in results}):
                pts_valid = [(r.op.mdot_in, r.op.mdot_a) for r in results
                             if r.hx_kind is hx and r.op.alt_km == alt and r.valid]
                pts_invalid = [(r.op.mdot_in, r.op.mdot_a) for r in results
                               if r.hx_kind is hx and r.op.alt_km == alt and not r.valid]
                chart = scatter_chart(
                    [("valid", pts_valid), ("invalid", pts_invalid)],
                    x_label="mdot_in (kg/s)", y_label="mdot_a (kg/s)")
                (out_dir / f"validity_{hx.value}_alt{alt:g}.svg").write_text(chart)


# --- tolerance optimization -------------------------------------------------

PENALTY = 1e6
EPS_BOX = (0.01, 0.10)


@dataclass(frozen=True)
class SpecBounds:
    """The specification boxes used by the cost function, with the return
    temperature box evaluated at the nominal tank temperature."""

    te_lo: float = 300.0
    te_hi: float = 330.0
    tout_lo: float = T_IN_NOMINAL - 10.0
    tout_hi: float = T_IN_NOMINAL + 10.0


def tolerance_cost(
    eps: ToleranceVector,
    bounds: tuple[tuple[float, float], tuple[float, float]] | None,
    spec_bounds: SpecBounds = SpecBounds(),
    violates: bool | None = None,
) -> float:
    """||1 - eps||_2 plus the bound-violation term.

    ``bounds`` is the ((T_e lo, hi), (T_out lo, hi)) pair from a successful
    instance evaluation (None means the instance failed outright).  The
    violation term is the penalty constant when a bound leaves its box,
    otherwise the summed squared slack to the box edges, so minimizing
    drives the bounds to fill the allowed boxes (the weakest guarantees).

    The penalty trigger defaults to the literal box check against
    ``spec_bounds``; callers that can evaluate the return-temperature
    constraint in its exact relative form (T_out within 10 K of the
    variable T_in, not of the nominal) pass the verdict via ``violates``.
    """
    c_term = float(np.linalg.norm(1.0 - eps.as_array()))
    if bounds is None:
        return c_term + PENALTY
    (te_lo, te_hi), (tout_lo, tout_hi) = bounds
    sb = spec_bounds
    tol = 1e-9
    if violates is None:
        violates = (te_lo < sb.te_lo - tol or te_hi > sb.te_hi + tol
                    or tout_lo < sb.tout_lo - tol or tout_hi > sb.tout_hi + tol)
    if violates:
        return c_term + PENALTY
    v = ((te_lo - sb.te_lo) ** 2 + (tout_lo - sb.tout_lo) ** 2
         + (sb.te_hi - te_hi) ** 2 + (sb.tout_hi - tout_hi) ** 2)
    return c_term + v


@dataclass
class OptimizeConfig:
    op: OperatingPoint = field(default_factory=lambda: OperatingPoint(15.0, 20000.0, 9.316, 0.429))
    hx_kind: HxKind = HxKind.CONTROLLED
    max_iter: int = 2000
    start: float = 0.01
    box: tuple[float, float] = EPS_BOX

    @staticmethod
    def from_dict(data: dict) -> "OptimizeConfig":
        cfg = OptimizeConfig()
        inst = data.get("instance", {})
        const_kwargs = {k: float(v) for k, v in data.items()
                        if k in ("eta_g", "eta_l", "c_f", "c_a", "rho_f", "dp_ep", "eta_ep", "eta_x", "k_e")}
        constants = replace(PhysicalConstants(), **const_kwargs) if const_kwargs else PhysicalConstants()
        if inst:
            cfg.op = OperatingPoint(
                float(inst.get("alt", 15.0)), float(inst.get("thrust", 20000.0)),
                float(inst.get("mdot_in", 9.316)), float(inst.get("mdot_a", 0.429)), constants)
            if "hx" in inst:
                cfg.hx_kind = HxKind(inst["hx"])
        elif const_kwargs:
            cfg.op = OperatingPoint(cfg.op.alt_km, cfg.op.thrust_kg, cfg.op.mdot_in, cfg.op.mdot_a, constants)
        if "max_iter" in data:
            cfg.max_iter = int(data["max_iter"])
        if "start" in data:
            cfg.start = float(data["start"])
        if "bounds" in data:
            cfg.box = (float(data["bounds"][0]), float(data["bounds"][1]))
        return cfg

    @staticmethod
    def load(path: str | Path) -> "OptimizeConfig":
        with open(path) as fh:
            return OptimizeConfig.from_dict(json.load(fh))


def _constraint_soup(op: OperatingPoint, eps: ToleranceVector, hx_kind: HxKind) -> TermList | None:
    """All component guarantees plus discharged assumptions plus the
    specification assumptions, without eliminating internal variables.

    Projection preserves coordinate ranges, so bound queries on this soup
    equal the ones extracted from the composed contract, without paying for
    Fourier-Motzkin elimination in the optimizer's inner loop.
    """
    from .errors import DischargeFailure
    from .polyhedra import transform_sufficient

    hx = ComponentKind.HX_FIXED if hx_kind is HxKind.FIXED else ComponentKind.HX_CONTROLLED
    try:
        parts = [make_component(kind, op, eps) for kind in _SUD_ORDER + (hx,)]
    except ConstructionError:
        return None
    g_all: list = []
    for part in parts:
        g_all.extend(part.guarantees)
    soup = TermList(g_all)
    inputs = {"T_in", "T_a", "w_nom"}
    discharged: list = []
    for part in parts:
        for term in part.assumptions:
            off_input = term.vars - inputs
            if not off_input:
                discharged.append(term)
                continue
            try:
                discharged.extend(transform_sufficient(term, off_input, soup))
            except DischargeFailure:
                return None
    return soup + TermList(discharged) + make_spec(op).assumptions


def instance_bounds(op: OperatingPoint, eps: ToleranceVector, hx_kind: HxKind):
    """((T_e lo, hi), (T_out lo, hi)) or None if the instance fails."""
    from .polyhedra import is_satisfiable, var_bounds as _var_bounds

    full = _constraint_soup(op, eps, hx_kind)
    if full is None or not is_satisfiable(full):
        return None
    return _var_bounds(full, "T_e"), _var_bounds(full, "T_out")


def _instance_cost_info(op: OperatingPoint, eps: ToleranceVector, hx_kind: HxKind):
    """Bounds plus the exact (relative-form) return-temperature verdict."""
    from .polyhedra import is_implied, is_satisfiable, var_bounds as _var_bounds

    full = _constraint_soup(op, eps, hx_kind)
    if full is None or not is_satisfiable(full):
        return None, True
    bounds = (_var_bounds(full, "T_e"), _var_bounds(full, "T_out"))
    (te_lo, te_hi), _ = bounds
    tol = 1e-9
    tout_ok = all(
        is_implied(term, full)
        for term in (
            LinearTerm.make({"T_out": 1.0, "T_in": -1.0}, 10.0, Relation.LEQ),
            LinearTerm.make({"T_in": 1.0, "T_out": -1.0}, 10.0, Relation.LEQ),
        )
    )
    violates = (not tout_ok) or te_lo < 300.0 - tol or te_hi > 330.0 + tol
    return bounds, violates


def optimize_tolerances(config: OptimizeConfig, out_path: str | Path | None = None) -> dict:
    """Nelder-Mead search for the loosest tolerance vector whose bounds stay
    inside the specification boxes.  The start is clamped into the box.
    Returns the trajectory summary (also written to ``optimize.json``)."""
    lo, hi = config.box
    start = min(max(config.start, lo), hi)
    x0 = np.full(7, start)
    spec_bounds = SpecBounds()
    trajectory: list[dict] = []

    memo: dict[tuple, float] = {}

    def cost_of(x: np.ndarray) -> float:
        eps = ToleranceVector.from_array(np.clip(x, lo, hi))
        key = tuple(eps.as_array())
        if key in memo:
            return memo[key]
        bounds, violates = _instance_cost_info(config.op, eps, config.hx_kind)
        value = tolerance_cost(eps, bounds, spec_bounds, violates=violates)
        trajectory.append({"eps": list(map(float, eps.as_array())), "cost": value})
        memo[key] = value
        return value

    start_cost = cost_of(x0)
    best_x, best_cost = nelder_mead_minimize(
        cost_of, x0, [(lo, hi)] * 7, max_iter=config.max_iter)
    eps_final = ToleranceVector.from_array(best_x)
    final_bounds, final_violates = _instance_cost_info(config.op, eps_final, config.hx_kind)
    payload = {
        "start_eps": [start] * 7,
        "start_cost": start_cost,
        "final_eps": list(map(float, best_x)),
        "final_cost": best_cost,
        "final_bounds": None if final_bounds is None else [list(final_bounds[0]), list(final_bounds[1])],
        "violates_spec": bool(final_violates),
        "evaluations": len(trajectory),
        "trajectory_best": _running_best(trajectory),
    }
    if out_path is not None:
        Path(out_path).write_text(json.dumps(payload, indent=2) + "\n")
    return payload


def _running_best(trajectory: list[dict]) -> list[dict]:
    best = math.inf
    out = []
    for i, entry in enumerate(trajectory):
        if entry["cost"] < best:
            best = entry["cost"]
            out.append({"evaluation": i, "cost": best, "eps": entry["eps"]})
    return out
