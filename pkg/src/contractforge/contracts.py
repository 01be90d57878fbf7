"""Assume-guarantee contracts over polyhedral constraints and their algebra.

A :class:`PolyhedralContract` is (inputs, outputs, assumptions, guarantees)
where assumptions constrain inputs only and guarantees constrain inputs and
outputs.  The algebra provides composition, quotient, merging, refinement,
variable bounds, and linear optimization, with structured diagnostics when
composition fails.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .errors import (
    DischargeFailure,
    IncompatibilityError,
    InfeasibleRegion,
    InterfaceError,
    QuotientUnsound,
)
from .lp import Direction, LPStatus, lp_optimize
from .parser import parse_constraints, parse_expression, render
from .polyhedra import (
    eliminate,
    is_implied,
    is_satisfiable,
    reduce_terms,
    transform_sufficient,
    var_bounds,
)
from .terms import EMPTY, LinearTerm, TermList, check_var_name


@dataclass(frozen=True)
class IncompatibilityDiagnostic:
    """Structured report of a failed composition.

    ``failed_terms`` are the downstream assumption terms that could not be
    discharged, ``context_terms`` the guarantees used in the attempt, and
    ``variables`` the variables that could not be eliminated.
    """

    failed_terms: TermList
    context_terms: TermList
    variables: frozenset[str]

    def describe(self) -> str:
        lines = [f"Could not eliminate variables {sorted(self.variables)!r} by refining the assumptions", "["]
        lines += [f"  {s}" for s in render(self.failed_terms, precision=6)]
        lines += ["]", "using guarantees", "["]
        lines += [f"  {s}" for s in render(self.context_terms, precision=6)]
        lines.append("]")
        return "\n".join(lines)

    def to_json(self) -> dict:
        return {
            "failed_terms": render(self.failed_terms),
            "context_terms": render(self.context_terms),
            "variables": sorted(self.variables),
        }


def _dedup_preserve(names: Iterable[str]) -> tuple[str, ...]:
    seen = set()
    out = []
    for n in names:
        if n not in seen:
            seen.add(n)
            out.append(n)
    return tuple(out)


@dataclass(frozen=True)
class PolyhedralContract:
    """An assume-guarantee pair over declared input and output variables."""

    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    assumptions: TermList
    guarantees: TermList

    def __init__(self, inputs: Iterable[str], outputs: Iterable[str],
                 assumptions: TermList, guarantees: TermList):
        inputs = _dedup_preserve(check_var_name(v) for v in inputs)
        outputs = _dedup_preserve(check_var_name(v) for v in outputs)
        overlap = set(inputs) & set(outputs)
        if overlap:
            raise InterfaceError(f"variables declared both input and output: {sorted(overlap)}")
        stray_a = assumptions.vars - set(inputs)
        if stray_a:
            raise InterfaceError(f"assumptions mention non-input variables: {sorted(stray_a)}")
        stray_g = guarantees.vars - set(inputs) - set(outputs)
        if stray_g:
            raise InterfaceError(f"guarantees mention undeclared variables: {sorted(stray_g)}")
        object.__setattr__(self, "inputs", inputs)
        object.__setattr__(self, "outputs", outputs)
        object.__setattr__(self, "assumptions", assumptions)
        object.__setattr__(self, "guarantees", guarantees)

    @cached_property
    def compatible(self) -> bool:
        """Assumptions are satisfiable."""
        return is_satisfiable(self.assumptions)

    @cached_property
    def consistent(self) -> bool:
        """Assumptions together with guarantees are satisfiable."""
        return is_satisfiable(self.assumptions + self.guarantees)

    @property
    def vars(self) -> tuple[str, ...]:
        return self.inputs + self.outputs

    def renamed(self, mapping: Mapping[str, str]) -> "PolyhedralContract":
        """Rename variables; mapping values must not collide."""
        targets = [mapping.get(v, v) for v in self.vars]
        if len(set(targets)) != len(targets):
            raise InterfaceError("renaming collapses distinct variables")
        return PolyhedralContract(
            (mapping.get(v, v) for v in self.inputs),
            (mapping.get(v, v) for v in self.outputs),
            self.assumptions.renamed(mapping),
            self.guarantees.renamed(mapping),
        )

    def with_suffix(self, suffix: str) -> "PolyhedralContract":
        return self.renamed({v: v + suffix for v in self.vars})

    # Convenience method forms of the algebra.
    def compose(self, other: "PolyhedralContract", keep: Iterable[str] | None = None):
        return compose(self, other, keep)

    def quotient(self, part: "PolyhedralContract"):
        return quotient(self, part)

    def merge(self, other: "PolyhedralContract"):
        return merge(self, other)

    def refines(self, other: "PolyhedralContract") -> bool:
        return refines(self, other).ok

    def __str__(self) -> str:
        from .contract_io import format_block

        return format_block(self)


def new_contract(
    inputs: Sequence[str],
    outputs: Sequence[str],
    assumption_lines: Sequence[str] = (),
    guarantee_lines: Sequence[str] = (),
) -> PolyhedralContract:
    """Build a contract from constraint strings (the JSON-file constructor)."""
    return PolyhedralContract(
        inputs, outputs, parse_constraints(list(assumption_lines)), parse_constraints(list(guarantee_lines))
    )


@dataclass(frozen=True)
class RefinementResult:
    ok: bool
    violated_assumptions: tuple[LinearTerm, ...] = ()
    violated_guarantees: tuple[LinearTerm, ...] = ()

    @property
    def violations(self) -> tuple[LinearTerm, ...]:
        return self.violated_assumptions + self.violated_guarantees

    def __bool__(self) -> bool:
        return self.ok


def _discharge_assumptions(
    downstream: TermList, forbidden: frozenset[str], context: TermList
) -> tuple[list[LinearTerm], IncompatibilityDiagnostic | None]:
    """Transform downstream assumption terms so they mention no forbidden
    variable; collect every failure into one diagnostic."""
    new_terms: list[LinearTerm] = []
    failed: list[LinearTerm] = []
    for term in downstream:
        if not (term.vars & forbidden):
            new_terms.append(term)
            continue
        try:
            new_terms.extend(transform_sufficient(term, forbidden, context))
        except DischargeFailure:
            failed.append(term)
    if failed:
        failed_list = TermList(failed)
        diag = IncompatibilityDiagnostic(
            failed_terms=failed_list,
            context_terms=context,
            variables=frozenset(failed_list.vars & forbidden),
        )
        return new_terms, diag
    return new_terms, None


def compose(
    c1: PolyhedralContract,
    c2: PolyhedralContract,
    keep: Iterable[str] | None = None,
    *,
    full_reduce: bool = True,
) -> PolyhedralContract:
    """Contract of the system made of ``c1`` and ``c2`` connected by name.

    Shared output-to-input variables become internal and are eliminated from
    the guarantees unless listed in ``keep``.  Downstream assumptions are
    replaced by sufficient conditions over system inputs, derived from the
    upstream guarantees; failure raises :class:`IncompatibilityError` with a
    diagnostic.  Feedback loops (both directions connected) are rejected.

    ``full_reduce=False`` skips the final redundancy sweeps; the result is
    LP-equivalent and cheaper to build, for tight analysis loops.
    """
    o1, o2 = set(c1.outputs), set(c2.outputs)
    i1, i2 = set(c1.inputs), set(c2.inputs)
    clash = o1 & o2
    if clash:
        raise InterfaceError(f"both contracts drive the same outputs: {sorted(clash)}")
    if (o1 & i2) and (o2 & i1):
        raise InterfaceError("cyclic connection; composition supports acyclic wiring only")
    if o2 & i1:  # make c1 the upstream side
        c1, c2 = c2, c1
        o1, o2, i1, i2 = o2, o1, i2, i1

    keep = set(keep or ())
    connected = o1 & i2
    unknown_keep = keep - connected
    if unknown_keep:
        raise InterfaceError(f"keep variables are not internal: {sorted(unknown_keep)}")
    internal = connected - keep
    sys_inputs = _dedup_preserve(v for v in c1.inputs + c2.inputs if v not in o1 and v not in o2)
    sys_outputs = _dedup_preserve(v for v in c1.outputs + c2.outputs if v not in internal)

    forbidden = frozenset(internal | o1)
    transformed, diag = _discharge_assumptions(c2.assumptions, forbidden, c1.guarantees)
    if diag is not None:
        raise IncompatibilityError(diag)

    assumptions = TermList(list(c1.assumptions) + transformed)
    assumptions = reduce_terms(assumptions) if full_reduce else assumptions
    # The intermediate reduce inside eliminate() is kept even when callers
    # skip the final sweeps: it is what keeps FM pairing from snowballing
    # across a fold chain.
    guarantees = eliminate(c1.guarantees + c2.guarantees, internal)
    if full_reduce:
        guarantees = reduce_terms(guarantees, context=assumptions)
    return PolyhedralContract(sys_inputs, sys_outputs, assumptions, guarantees)


def quotient(c_top: PolyhedralContract, c1: PolyhedralContract) -> PolyhedralContract:
    """Specification of the missing downstream part so that
    ``compose(c1, result)`` refines ``c_top``; verified before returning."""
    i_top, o_top = set(c_top.inputs), set(c_top.outputs)
    i1, o1 = set(c1.inputs), set(c1.outputs)
    if not i1 <= (i_top | o_top):
        raise InterfaceError(f"partial implementation reads variables outside the top contract: {sorted(i1 - i_top - o_top)}")
    q_inputs = _dedup_preserve(list(c1.outputs) + [v for v in c_top.inputs if v not in i1])
    q_outputs = [v for v in c_top.outputs if v not in o1]

    in_set = set(q_inputs)
    a_source = c_top.assumptions + c1.guarantees
    a_q = reduce_terms(eliminate(a_source, a_source.vars - in_set))
    g_source = c_top.guarantees + c1.guarantees + c1.assumptions
    g_q = eliminate(g_source, g_source.vars - in_set - set(q_outputs))
    g_q = reduce_terms(g_q, context=a_q)
    result = PolyhedralContract(q_inputs, q_outputs, a_q, g_q)

    try:
        recomposed = compose(c1, result)
    except IncompatibilityError as exc:
        raise QuotientUnsound(f"quotient cannot be composed back: {exc}") from exc
    check = refines(recomposed, c_top)
    if not check.ok:
        raise QuotientUnsound(
            "compose(part, quotient) does not refine the top contract; violated: "
            + ", ".join(str(t) for t in check.violations)
        )
    return result


def merge(c1: PolyhedralContract, c2: PolyhedralContract) -> PolyhedralContract:
    """Fuse two viewpoints of the same component.

    Outputs win variable roles; viewpoints of one component may constrain
    the same outputs.  Assumption terms that end up mentioning an output
    variable move to the guarantees so the conjunction of both contracts is
    preserved.  An unsatisfiable assumption set is not an error: the
    returned contract is simply flagged incompatible.
    """
    outputs = _dedup_preserve(c1.outputs + c2.outputs)
    inputs = [v for v in _dedup_preserve(c1.inputs + c2.inputs) if v not in set(outputs)]

    a_all = list(c1.assumptions) + list(c2.assumptions)
    out_set = set(outputs)
    a_terms = [t for t in a_all if not (t.vars & out_set)]
    displaced = [t for t in a_all if t.vars & out_set]
    g_all = displaced + list(c1.guarantees) + list(c2.guarantees)

    assumptions = reduce_terms(TermList(a_terms))
    guarantees = reduce_terms(TermList(g_all), context=assumptions)
    return PolyhedralContract(inputs, outputs, assumptions, guarantees)


def refines(c1: PolyhedralContract, c2: PolyhedralContract) -> RefinementResult:
    """Does ``c1`` refine ``c2`` (accept more environments, promise no less)?

    Every variable of ``c2`` must appear in ``c1`` with the same role.
    Checks: each assumption of ``c1`` is implied by ``c2``'s assumptions, and
    each guarantee of ``c2`` is implied by ``c2``'s assumptions plus ``c1``'s
    guarantees.  Violating terms are reported.
    """
    for v in c2.inputs:
        if v not in c1.inputs:
            raise InterfaceError(f"refinement: {v!r} is an input of the abstract contract but not of the concrete one")
    for v in c2.outputs:
        if v not in c1.outputs:
            raise InterfaceError(f"refinement: {v!r} is an output of the abstract contract but not of the concrete one")

    bad_a = tuple(t for t in c1.assumptions if not is_implied(t, c2.assumptions))
    context = c2.assumptions + c1.guarantees
    bad_g = tuple(t for t in c2.guarantees if not is_implied(t, context))
    return RefinementResult(not bad_a and not bad_g, bad_a, bad_g)


def contracts_equivalent(c1: PolyhedralContract, c2: PolyhedralContract) -> bool:
    return refines(c1, c2).ok and refines(c2, c1).ok


def get_variable_bounds(c: PolyhedralContract, var: str) -> tuple[float, float]:
    """Range of ``var`` over assumptions plus guarantees."""
    if var not in c.vars:
        raise InterfaceError(f"{var!r} is not a variable of the contract")
    if not c.consistent:
        raise InfeasibleRegion("contract is inconsistent: infeasible region")
    return var_bounds(c.assumptions + c.guarantees, var)


def optimize(c: PolyhedralContract, objective, direction: Direction) -> float:
    """Optimal value of a linear expression over assumptions plus guarantees.

    ``objective`` may be a mapping var->coefficient, a string expression, or
    a (mapping, constant) pair.  Returns +/-inf when unbounded.
    """
    offset = 0.0
    if isinstance(objective, str):
        coeffs, offset = parse_expression(objective)
    elif isinstance(objective, tuple):
        coeffs, offset = objective
    else:
        coeffs = dict(objective)
    stray = set(coeffs) - set(c.vars)
    if stray:
        raise InterfaceError(f"objective mentions unknown variables: {sorted(stray)}")
    if not c.consistent:
        raise InfeasibleRegion("contract is inconsistent: infeasible region")
    outcome = lp_optimize(coeffs, c.assumptions + c.guarantees, direction, offset=offset)
    if outcome.status is LPStatus.UNBOUNDED:
        return float("inf") if direction is Direction.MAX else float("-inf")
    if outcome.status is LPStatus.INFEASIBLE:  # pragma: no cover - consistency checked above
        raise InfeasibleRegion("infeasible region")
    return outcome.value
