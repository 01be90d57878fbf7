import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from contractforge import (
    DischargeFailure,
    ExplosionError,
    InfeasibleRegion,
    eliminate,
    equivalent,
    is_implied,
    is_satisfiable,
    parse_constraints,
    reduce_terms,
    render,
    transform_sufficient,
    var_bounds,
)
from contractforge import polyhedra
from contractforge.terms import LinearTerm, Relation, TermList

TOL = 1e-6


class TestIsImplied:
    def test_bounded_interval_implies_loose_bound(self):
        ctx = parse_constraints(["i <= 0.2", "-0.5 i <= 0"])
        assert is_implied(parse_constraints(["-i <= 2"])[0], ctx)

    def test_loose_band_does_not_imply_tight_bound(self):
        ctx = parse_constraints(["|o| <= 3"])
        assert not is_implied(parse_constraints(["o <= 0.2"])[0], ctx)

    def test_infeasible_context_implies_everything(self):
        ctx = parse_constraints(["0 <= -1"])
        assert is_implied(parse_constraints(["x <= -1000"])[0], ctx)

    def test_equality_needs_both_directions(self):
        ctx = parse_constraints(["x <= 3", "-x <= -3"])
        assert is_implied(parse_constraints(["x = 3"])[0], ctx)
        assert not is_implied(parse_constraints(["x = 3"])[0], parse_constraints(["x <= 3"]))

    @given(st.integers(-4, 4), st.integers(-4, 4), st.integers(-4, 4))
    @settings(max_examples=40, deadline=None)
    def test_monotone_in_context(self, a, b, k):
        term = LinearTerm.make({"x": 1.0, "y": float(a)}, float(k))
        ctx = parse_constraints(["x <= 1", "y <= 2", "-x <= 1", "-y <= 2"])
        extended = TermList(list(ctx) + [LinearTerm.make({"x": float(b or 1), "y": 1.0}, 1.0)])
        # adding constraints never flips implied -> not implied
        if is_implied(term, ctx):
            assert is_implied(term, extended)


class TestIsSatisfiable:
    def test_contradiction(self):
        assert not is_satisfiable(parse_constraints(["x <= 1", "-x <= -2"]))

    def test_empty_conjunction(self):
        assert is_satisfiable(TermList(()))

    def test_mixed_with_equality(self):
        tl = parse_constraints(["o - i <= 0", "i - 2o <= 2", "i = 1"])
        assert is_satisfiable(tl)


class TestReduce:
    def test_dominated_bound_dropped(self):
        out = reduce_terms(parse_constraints(["x <= 1", "x <= 2"]))
        assert render(out) == ["x <= 1"]

    def test_transitive_sum_dropped(self):
        tl = parse_constraints(["o_p - o <= 0", "o - i <= 0", "o_p - i <= 0"])
        out = reduce_terms(tl)
        assert render(out) == ["-o + o_p <= 0", "-i + o <= 0"]

    def test_nested_abs_bands(self):
        out = reduce_terms(parse_constraints(["|o| <= 4", "|o| <= 2"]))
        assert render(out) == ["|o| <= 2"]

    def test_idempotent(self):
        rng = np.random.default_rng(11)
        for _ in range(25):
            terms = [
                LinearTerm.make(
                    {v: float(rng.integers(-5, 6)) for v in "xyz"},
                    float(rng.integers(-5, 6)),
                )
                for _ in range(rng.integers(2, 7))
            ]
            tl = TermList(terms)
            once = reduce_terms(tl)
            twice = reduce_terms(once)
            assert [t.signature() for t in once] == [t.signature() for t in twice]
            assert equivalent(tl, once)

    def test_trivially_true_terms_dropped(self):
        out = reduce_terms(parse_constraints(["0 <= 0", "x <= 1"]))
        assert render(out) == ["x <= 1"]

    def test_infeasible_core_kept(self):
        out = reduce_terms(parse_constraints(["x <= 1", "-x <= -2"]))
        assert len(out) == 2


class TestEliminate:
    def test_fm_pairing(self):
        tl = parse_constraints(["o_p - o <= 0", "o - i <= 0", "i - 2o <= 2"])
        out = eliminate(tl, {"o"})
        assert render(out) == ["-i + o_p <= 0", "-i <= 2"]

    def test_equality_substitution(self):
        tl = parse_constraints(["o = 2i", "o_p - 2i = 1", "|i| <= 2"])
        out = eliminate(tl, {"i"})
        target = parse_constraints(["-o + o_p = 1", "|o| <= 4"])
        assert equivalent(out, target)

    def test_absent_variable_is_noop(self):
        tl = parse_constraints(["x <= 5"])
        assert render(eliminate(tl, {"y"})) == ["x <= 5"]

    def test_projection_preserves_feasibility_direction(self):
        tl = parse_constraints(["x - y <= 0", "y <= 3", "-x <= 0"])
        out = eliminate(tl, {"y"})
        assert is_satisfiable(out)
        assert is_implied(parse_constraints(["x <= 3"])[0], out)

    def test_blowup_guard(self, monkeypatch):
        monkeypatch.setattr(polyhedra, "FM_TERM_CAP", 3)
        lines = [f"x - {i} y{i} <= 1" for i in range(1, 4)] + [f"{i} y{i} - x <= 1" for i in range(1, 4)]
        tl = parse_constraints(lines)
        with pytest.raises(ExplosionError):
            eliminate(tl, {"x"})

    def test_eq_pivot_determinism_largest_coefficient(self):
        # both equalities mention x; the pivot is the larger |coefficient|
        tl = parse_constraints(["x + y = 1", "2x - z = 0", "x <= 5"])
        out = eliminate(tl, {"x"})
        # pivot 2x - z = 0 -> x = z/2; y = 1 - z/2; z <= 10
        target = parse_constraints(["y + 0.5 z = 1", "0.5 z <= 5"])
        assert equivalent(out, target)


class TestVarBounds:
    def test_composed_assumption_range(self):
        lo, hi = var_bounds(parse_constraints(["i <= 0.2", "-0.5 i <= 0"]), "i")
        assert (lo, hi) == pytest.approx((0.0, 0.2), abs=TOL)

    def test_pinned_variable(self):
        assert var_bounds(parse_constraints(["x = 3"]), "x") == pytest.approx((3.0, 3.0))

    def test_two_sided_solve(self):
        lo, hi = var_bounds(parse_constraints(["o <= i", "i - 2o <= 2", "i = 1"]), "o")
        assert (lo, hi) == pytest.approx((-0.5, 1.0), abs=TOL)

    def test_unbounded_sides_are_infinite(self):
        lo, hi = var_bounds(parse_constraints(["x <= 5"]), "x")
        assert lo == float("-inf") and hi == pytest.approx(5.0)

    def test_infeasible_region_raises(self):
        with pytest.raises(InfeasibleRegion):
            var_bounds(parse_constraints(["x <= 1", "-x <= -2"]), "x")

    def test_lower_never_exceeds_upper_and_narrowing(self):
        rng = np.random.default_rng(5)
        for _ in range(20):
            base = [
                LinearTerm.make({"x": 1.0, "y": float(rng.integers(-3, 4))}, float(rng.integers(0, 6))),
                LinearTerm.make({"x": -1.0}, float(rng.integers(0, 6))),
                LinearTerm.make({"y": 1.0}, 4.0),
                LinearTerm.make({"y": -1.0}, 4.0),
            ]
            tl = TermList(base)
            if not is_satisfiable(tl):
                continue
            lo, hi = var_bounds(tl, "x")
            assert lo <= hi + TOL
            extra = TermList(base + [LinearTerm.make({"x": 1.0}, float(rng.integers(0, 4)))])
            if is_satisfiable(extra):
                lo2, hi2 = var_bounds(extra, "x")
                assert lo2 >= lo - TOL and hi2 <= hi + TOL


class TestTransformSufficient:
    def test_upper_bound_substitution(self):
        ctx = parse_constraints(["o - i <= 0", "i - 2o <= 2"])
        out = transform_sufficient(parse_constraints(["o <= 0.2"])[0], {"o"}, ctx)
        assert render(out) == ["i <= 0.2"]

    def test_lower_bound_substitution(self):
        ctx = parse_constraints(["o - i <= 0", "i - 2o <= 2"])
        out = transform_sufficient(parse_constraints(["-o <= 1"])[0], {"o"}, ctx)
        assert render(out) == ["-0.5 i <= 0"]

    def test_trivially_false_candidates_fail(self):
        ctx = parse_constraints(["o <= 3", "-o <= 3"])
        with pytest.raises(DischargeFailure):
            transform_sufficient(parse_constraints(["o <= 0.2"])[0], {"o"}, ctx)

    def test_sufficiency_contract(self):
        # every returned candidate, with the context, implies the original
        ctx = parse_constraints(["o - i <= 0", "i - 2o <= 2", "-o <= 0"])
        term = parse_constraints(["o <= 4"])[0]
        out = transform_sufficient(term, {"o"}, ctx)
        for cand in out:
            assert is_implied(term, TermList([cand]) + ctx)

    def test_free_discharge_returns_empty(self):
        ctx = parse_constraints(["o <= 3"])
        out = transform_sufficient(parse_constraints(["o <= 5"])[0], {"o"}, ctx)
        assert len(out) == 0

    def test_weakest_candidates_kept(self):
        # two upper bounds on o: o <= x and o <= 0.5x; candidates x <= 10 and
        # 0.5 x <= 10; the stronger one (x <= 10) strictly implies the weaker
        # (x <= 20), so only the weakest survives.
        ctx = parse_constraints(["o - x <= 0", "o - 0.5 x <= 0"])
        out = transform_sufficient(parse_constraints(["o <= 10"])[0], {"o"}, ctx)
        assert render(out) == ["0.5 x <= 10"]


def _interval_feasible(terms, point, var):
    """Independent 1-D oracle: does some real value of ``var`` satisfy all
    terms at the given kept-variable assignment?"""
    lo, hi = -np.inf, np.inf
    for t in terms:
        a = t.coefficient(var)
        rest = sum(c * point[v] for v, c in t.coefficients.items() if v != var)
        if a == 0:
            if t.relation is Relation.EQ:
                if abs(rest - t.constant) > TOL:
                    return False
            elif rest > t.constant + TOL:
                return False
            continue
        bound = (t.constant - rest) / a
        if t.relation is Relation.EQ:
            lo, hi = max(lo, bound), min(hi, bound)
        elif a > 0:
            hi = min(hi, bound)
        else:
            lo = max(lo, bound)
    return lo <= hi + TOL


def _random_termlist(rng, names):
    terms = []
    for _ in range(rng.integers(2, 6)):
        coeffs = {v: float(rng.integers(-5, 6)) for v in names}
        rel = Relation.EQ if rng.random() < 0.15 else Relation.LEQ
        terms.append(LinearTerm.make(coeffs, float(rng.integers(-5, 6)), rel))
    return TermList(terms)


def projection_grid_oracle_cases(n_cases: int, seed: int = 2024):
    """Shared by the unit test (small count) and acceptance criterion 11."""
    rng = np.random.default_rng(seed)
    checked_points = 0
    for _ in range(n_cases):
        nvars = int(rng.integers(2, 4))
        names = ["x", "y", "z"][:nvars]
        tl = _random_termlist(rng, names)
        drop = names[int(rng.integers(0, nvars))]
        kept = [v for v in names if v != drop]
        projected = eliminate(tl, {drop})
        assert not projected.vars & {drop}
        grid = np.arange(-6.0, 6.5, 1.5)
        if len(kept) == 1:
            points = [{kept[0]: float(g)} for g in grid]
        else:
            points = [{kept[0]: float(g1), kept[1]: float(g2)} for g1 in grid for g2 in grid]
        for point in points:
            in_projection = projected.satisfied_by(point)
            oracle = _interval_feasible(tl, point, drop)
            assert in_projection == oracle, (render(tl), drop, point)
            checked_points += 1
    return checked_points


def test_projection_matches_grid_oracle_small():
    assert projection_grid_oracle_cases(60) > 500


def test_equalities_interchangeable_with_leq_pairs():
    # every query agrees on the expanded and unexpanded forms
    rng = np.random.default_rng(23)
    for _ in range(25):
        tl = _random_termlist(rng, ["x", "y"])
        expanded = tl.expanded()
        assert is_satisfiable(tl) == is_satisfiable(expanded)
        probe = LinearTerm.make({"x": float(rng.integers(-3, 4)), "y": 1.0},
                                float(rng.integers(-4, 5)))
        assert is_implied(probe, tl) == is_implied(probe, expanded)
        if is_satisfiable(tl):
            assert var_bounds(tl, "x") == pytest.approx(var_bounds(expanded, "x"))
