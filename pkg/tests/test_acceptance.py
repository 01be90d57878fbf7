"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Criterion 9 contains a clause that is unattainable under the pinned physical
constants (see notes in the repository README and the failure message); the
test states it faithfully and is expected to stay red until the constants
or the specification boxes change.
"""

import itertools
import json
import time
from collections import defaultdict

import numpy as np
import pytest

from contractforge import (
    Direction,
    IncompatibilityError,
    compose,
    contracts_equivalent,
    equivalent,
    merge,
    new_contract,
    parse_constraints,
    quotient,
    refines,
    render,
)
from contractforge.aircraft import (
    ExploreConfig,
    HxKind,
    OperatingPoint,
    OptimizeConfig,
    ToleranceVector,
    evaluate_instance,
    explore_grid,
    optimize_tolerances,
)
from contractforge.mission import (
    CANONICAL_SEQUENCE,
    OperationalRequirements,
    SweepConfig,
    TaskHyperparameters,
    Viewpoint,
    build_scenario,
    check_schedulable,
    requirements_contract,
    run_sweep,
    viewpoint_chain,
)
from contractforge.terms import LinearTerm, Relation, TermList

TOL = 1e-6


class _Criterion:
    def __init__(self, number: int, description: str):
        self.number = number
        self.description = description

    def __enter__(self):
        return self

    def __exit__(self, exc_type, exc, tb):
        verdict = "PASS" if exc_type is None else "FAIL"
        line = f"ACCEPTANCE {self.number}: {verdict} - {self.description}"
        print("\n" + line)
        import conftest

        conftest.ACCEPTANCE_LINES.append(line)
        return False


def test_criterion_1_composition_golden(upstream_pair):
    with _Criterion(1, "2-subsystem composition golden result within 1e-6, under 50 ms"):
        compose(*upstream_pair)  # warm-up
        started = time.perf_counter()
        sys_contract = compose(*upstream_pair)
        elapsed_ms = (time.perf_counter() - started) * 1000.0
        assert equivalent(sys_contract.assumptions, parse_constraints(["i <= 0.2", "-0.5 i <= 0"]))
        assert equivalent(sys_contract.guarantees, parse_constraints(["-i + o_p <= 0"]))
        assert elapsed_ms < 50.0, f"composition took {elapsed_ms:.1f} ms"


def test_criterion_2_diagnostic_golden(loose_upstream):
    with _Criterion(2, "incompatibility diagnostic names variables, failed terms, context"):
        with pytest.raises(IncompatibilityError) as err:
            compose(*loose_upstream)
        diag = err.value.diagnostic
        assert diag.variables == {"o"}
        assert equivalent(diag.failed_terms, parse_constraints(["o <= 0.2", "-o <= 1"]))
        assert equivalent(diag.context_terms, parse_constraints(["|o| <= 3"]))


def test_criterion_3_quotient_golden(quotient_pair):
    with _Criterion(3, "quotient golden result; recomposition refines the top contract"):
        c_top, c_partial = quotient_pair
        missing = quotient(c_top, c_partial)
        assert equivalent(missing.assumptions, parse_constraints(["|o| <= 2"]))
        assert equivalent(missing.guarantees, parse_constraints(["o_p - o = 1"]))
        assert refines(compose(c_partial, missing), c_top).ok


def test_criterion_4_merge_golden(viewpoint_pair):
    with _Criterion(4, "viewpoint merge golden result up to term equivalence"):
        merged = merge(*viewpoint_pair)
        assert equivalent(merged.assumptions, parse_constraints(["|i| <= 2", "temp <= 90"]))
        assert equivalent(merged.guarantees, parse_constraints(["-2i + o = 1", "P <= 2.1"]))


def test_criterion_5_power_chain_structure():
    with _Criterion(5, "5-step power chain assumptions match the derived set; "
                       "storage cap survives only on the charging step"):
        instances = (
            TaskHyperparameters(),
            TaskHyperparameters(cons_dsn=(0.3, 0.9), gen_chrg=(0.0, 2.0), cons_tcm_dv=(0.0, 0.4)),
            TaskHyperparameters(cons_dsn=(0.05, 0.05), cons_sbo=(1.0, 1.5), gen_chrg=(0.5, 0.5)),
        )
        for hyper in instances:
            chain = viewpoint_chain(CANONICAL_SEQUENCE, Viewpoint.POWER, hyper)
            target = TermList(
                [LinearTerm.make({f"dt_{k}": -1.0}, 0.0) for k in range(1, 6)]
                + [LinearTerm.make({"soc_0": -1.0, "dt_1": hyper.cons_dsn[1]}, 0.0)]
            )
            assert equivalent(chain.assumptions, target), render(chain.assumptions)
            caps = [
                next(iter(t.coefficients))
                for t in chain.guarantees
                if t.relation is Relation.LEQ and len(t.coefficients) == 1
                and t.constant == 100.0 and next(iter(t.coefficients.values())) > 0
            ]
            assert caps == ["soc_2"], caps


def test_criterion_6_mission_sweep_desk_scale(tmp_path):
    with _Criterion(6, "20x20 schedulability sweep: under 60 s, scarce admissibility, "
                       "deterministic per seed"):
        config = SweepConfig()  # 20 scenarios x 20 requirement sets, seed 0
        started = time.perf_counter()
        summary = run_sweep(config, tmp_path / "run1")
        elapsed = time.perf_counter() - started
        assert elapsed < 60.0, f"sweep took {elapsed:.1f} s"
        rate = summary["admissible"] / summary["combinations"]
        assert 0.0 < rate < 0.5, f"admissibility rate {rate:.3f}"
        run_sweep(config, tmp_path / "run2")
        assert ((tmp_path / "run1" / "results.csv").read_bytes()
                == (tmp_path / "run2" / "results.csv").read_bytes())
        print(f"\n  criterion 6 detail: rate={rate:.3f}, elapsed={elapsed:.1f}s")


@pytest.fixture(scope="module")
def default_grid_results():
    return explore_grid(ExploreConfig())


def test_criterion_7_engine_bound_properties(default_grid_results):
    with _Criterion(7, "engine-temperature bounds invariant in air flow, monotone in fuel "
                       "flow; return-temperature bound monotone in air flow (fixed HX)"):
        by_key = defaultdict(dict)
        for r in default_grid_results:
            if r.te_bounds is not None:
                by_key[(r.hx_kind, r.op.alt_km, r.op.thrust_kg, r.op.mdot_in)][r.op.mdot_a] = r
        checked_invariance = 0
        for group in by_key.values():
            te_values = {r.te_bounds for r in group.values()}
            assert len(te_values) == 1, "engine bounds must be identical across air flows"
            checked_invariance += 1
        assert checked_invariance > 20

        # T_e upper bound non-increasing in mdot_in (per hx, alt, thrust)
        by_regime = defaultdict(dict)
        for (hx, alt, thrust, mdot_in), group in by_key.items():
            any_r = next(iter(group.values()))
            by_regime[(hx, alt, thrust)][mdot_in] = any_r.te_bounds[1]
        for uppers in by_regime.values():
            flows = sorted(uppers)
            for a, b in itertools.pairwise(flows):
                assert uppers[b] <= uppers[a] + TOL

        # T_out upper bound non-increasing in mdot_a for the fixed exchanger
        for (hx, alt, thrust, mdot_in), group in by_key.items():
            if hx is not HxKind.FIXED:
                continue
            flows = sorted(group)
            for a, b in itertools.pairwise(flows):
                assert group[b].tout_bounds[1] <= group[a].tout_bounds[1] + TOL


def test_criterion_8_heat_exchanger_comparison(default_grid_results):
    with _Criterion(8, "fixed HX has no universal flow pair; controlled HX covered by a "
                       "two-level fuel-flow policy (documented defaults)"):
        regimes = sorted({(r.op.alt_km, r.op.thrust_kg) for r in default_grid_results})
        assert len(regimes) == 12
        valid = defaultdict(set)
        for r in default_grid_results:
            if r.valid:
                valid[(r.hx_kind, r.op.alt_km, r.op.thrust_kg)].add((r.op.mdot_in, r.op.mdot_a))

        fixed_pairs = {p for key, pairs in valid.items() if key[0] is HxKind.FIXED for p in pairs}
        universal = [p for p in fixed_pairs
                     if all(p in valid.get((HxKind.FIXED, *reg), set()) for reg in regimes)]
        assert not universal, f"fixed HX unexpectedly universal at {universal}"
        assert fixed_pairs, "fixed HX should admit at least some valid instances"

        levels = sorted({r.op.mdot_in for r in default_grid_results})
        cover = None
        for pair in itertools.combinations(levels, 2):
            if all(
                any(m in pair for m, _ in valid.get((HxKind.CONTROLLED, *reg), set()))
                for reg in regimes
            ):
                cover = pair
                break
        assert cover is not None, "no two-level fuel-flow policy covers all regimes"
        print(f"\n  criterion 8 detail: two-level policy {cover}")


def test_criterion_9_tolerance_optimizer():
    with _Criterion(9, "2000-iteration tolerance search: box respected, cost reduced, "
                       "no specification violation at the returned point"):
        config = OptimizeConfig()  # paper instance, controlled HX, 2000 iterations
        payload = optimize_tolerances(config)
        for entry in payload["trajectory_best"]:
            assert all(0.01 - 1e-12 <= e <= 0.10 + 1e-12 for e in entry["eps"])
        assert payload["final_cost"] < payload["start_cost"], "no improvement over the start"
        te_hi = None if payload["final_bounds"] is None else payload["final_bounds"][0][1]
        assert not payload["violates_spec"], (
            "the returned point violates the engine-temperature box: "
            f"T_e upper bound {te_hi} > 330. Unattainable under the pinned constants: "
            "at (alt 15, thrust 20000, mdot_in 9.316) the input band top (293.76 K) plus "
            "the pump rise (>= 28.75 K) plus engine heat alone (>= 10.44 K) exceeds 330 K "
            "for every tolerance vector in [0.01, 0.10]^7; see notes/decisions.md."
        )


def test_criterion_10_interactivity_budget():
    with _Criterion(10, "single instance evaluation and single 5-step schedulability "
                        "check complete in under 3 s"):
        op = OperatingPoint(15.0, 20000.0, 9.316, 0.429)
        started = time.perf_counter()
        evaluate_instance(op, ToleranceVector.uniform(0.01), HxKind.CONTROLLED)
        aircraft_s = time.perf_counter() - started
        assert aircraft_s < 3.0, f"instance evaluation took {aircraft_s:.2f} s"

        hyper = TaskHyperparameters()
        req = OperationalRequirements(min_soc=55.0)
        started = time.perf_counter()
        scenario = build_scenario(CANONICAL_SEQUENCE, hyper)
        check_schedulable(scenario, requirements_contract(req, CANONICAL_SEQUENCE),
                          hyper=hyper, req=req, steps=5)
        mission_s = time.perf_counter() - started
        assert mission_s < 3.0, f"schedulability check took {mission_s:.2f} s"
        print(f"\n  criterion 10 detail: aircraft {aircraft_s * 1000:.0f} ms, "
              f"mission {mission_s * 1000:.0f} ms")


def test_criterion_11_property_suites():
    with _Criterion(11, "projection grid oracle (500), parser round-trip (500), "
                        "composition soundness sampling (100) at 1e-6"):
        from test_contracts import composition_soundness_cases
        from test_parser import random_round_trip_cases
        from test_polyhedra import projection_grid_oracle_cases

        points = projection_grid_oracle_cases(500, seed=2024)
        assert points > 4000
        assert random_round_trip_cases(500, seed=99) == 500
        assert composition_soundness_cases(100, seed=7) == 100
