"""Polyhedral queries and transformations built on the LP core.

Operations here are pure functions over :class:`TermList` values:

* :func:`is_satisfiable` / :func:`is_implied` -- LP-backed queries;
* :func:`reduce_terms` -- drop redundant terms, deterministically;
* :func:`eliminate` -- exact projection by Fourier-Motzkin elimination,
  substituting equalities first;
* :func:`var_bounds` -- variable range extraction;
* :func:`transform_sufficient` -- replace a term that mentions forbidden
  variables by sufficient conditions derived from a context, the engine
  behind assumption discharge during composition.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable

from . import config
from .errors import DischargeFailure, ExplosionError, InfeasibleRegion
from .lp import Direction, LPStatus, lp_optimize
from .terms import EMPTY, LinearTerm, Relation, TermList

FM_TERM_CAP = 50_000
_CHAIN_CAP = 100_000


def is_satisfiable(constraints: TermList) -> bool:
    """True iff the conjunction has at least one solution."""
    outcome = lp_optimize({}, constraints, Direction.MIN)
    return outcome.status is LPStatus.OPTIMAL


def _max_of(coeffs: dict[str, float], context: TermList):
    return lp_optimize(coeffs, context, Direction.MAX)


def is_implied(term: LinearTerm, context: TermList) -> bool:
    """True iff every point of ``context`` satisfies ``term``.

    Implemented by maximizing the term's left side over the context; an
    infeasible context implies everything.
    """
    if term.trivially_true():
        return True
    hi = _max_of(term.coefficients, context)
    if hi.status is LPStatus.INFEASIBLE:
        return True
    if hi.status is LPStatus.UNBOUNDED:
        return False
    if not config.leq_tol(hi.value, term.constant):
        return False
    if term.relation is Relation.LEQ:
        return True
    lo = lp_optimize(term.coefficients, context, Direction.MIN)
    if lo.status is not LPStatus.OPTIMAL:
        return False
    return config.leq_tol(term.constant, lo.value)


def _quick_keep(term: LinearTerm, context_vars: frozenset[str]) -> bool:
    """Cheap pre-check: a term with a variable free in the context can only
    be implied if the context is infeasible (handled by the caller)."""
    return any(v not in context_vars for v in term.coefficients)


def reduce_terms(constraints: TermList, context: TermList = EMPTY) -> TermList:
    """Drop every term implied by the rest (plus ``context``).

    Deterministic: terms are scanned in order and a term is dropped iff it
    is implied by the context plus the already-kept and still-unscanned
    terms.  The output is equivalent to the input within the context.
    """
    terms = list(constraints)
    kept: list[LinearTerm] = []
    feasible = is_satisfiable(constraints + context) if terms else True
    for i, t in enumerate(terms):
        rest = TermList(kept + terms[i + 1 :]) + context
        if feasible and not t.trivially_true() and _quick_keep(t, rest.vars):
            kept.append(t)
            continue
        if not is_implied(t, rest):
            kept.append(t)
    return TermList(kept)


def reduce_in_context(constraints: TermList, context: TermList) -> TermList:
    return reduce_terms(constraints, context)


def equivalent(a: TermList, b: TermList) -> bool:
    """Mutual implication of two conjunctions."""
    return all(is_implied(t, b) for t in a) and all(is_implied(t, a) for t in b)


def _substitute_equality(terms: list[LinearTerm], var: str) -> list[LinearTerm]:
    """Gaussian-eliminate ``var`` using the EQ pivot with the largest
    |coefficient| on it (ties broken by term order)."""
    pivot_idx = -1
    best = 0.0
    for i, t in enumerate(terms):
        if t.relation is Relation.EQ and t.mentions(var):
            mag = abs(t.coefficient(var))
            if mag > best:
                best = mag
                pivot_idx = i
    if pivot_idx < 0:
        return terms
    pivot = terms[pivot_idx]
    out = []
    for i, t in enumerate(terms):
        if i == pivot_idx:
            continue
        out.append(t.substituted(var, pivot) if t.mentions(var) else t)
    return out


def _fm_step(terms: list[LinearTerm], var: str) -> list[LinearTerm]:
    """One Fourier-Motzkin elimination step: pair rows of opposite sign."""
    pos, neg, rest = [], [], []
    for t in terms:
        c = t.coefficient(var)
        if c > 0:
            pos.append(t)
        elif c < 0:
            neg.append(t)
        else:
            rest.append(t)
    combined = []
    for p in pos:
        a_p = p.coefficient(var)
        for q in neg:
            a_q = -q.coefficient(var)
            new = p.combined(q, a_q, a_p)
            new = LinearTerm.make({v: c for v, c in new.coefficients.items() if v != var}, new.constant, Relation.LEQ)
            if not new.trivially_true():
                combined.append(new)
    return rest + combined


def eliminate(constraints: TermList, drop: Iterable[str], *, reduce_output: bool = True) -> TermList:
    """Exact projection of the polyhedron onto the variables not in ``drop``.

    Equalities are used as substitutions first; remaining occurrences are
    removed by Fourier-Motzkin pairing.  Raises :class:`ExplosionError` if
    an intermediate list exceeds the safety cap.  The result is reduced
    (``reduce_output=False`` skips that final sweep; the projection itself
    is exact either way).
    """
    drop = set(drop) & constraints.vars
    if not drop:
        return constraints
    terms = list(constraints)
    for var in sorted(drop):
        if any(t.relation is Relation.EQ and t.mentions(var) for t in terms):
            terms = _substitute_equality(terms, var)
        if any(t.mentions(var) for t in terms):
            expanded = []
            for t in terms:
                expanded.extend(t.as_leq_pair() if t.mentions(var) else (t,))
            terms = _fm_step(expanded, var)
        if len(terms) > FM_TERM_CAP:
            raise ExplosionError(f"elimination produced {len(terms)} terms (cap {FM_TERM_CAP})")
        seen = set()
        deduped = []
        for t in terms:
            sig = t.signature()
            if sig not in seen:
                seen.add(sig)
                deduped.append(t)
        terms = deduped
    result = TermList(terms)
    return reduce_terms(result) if reduce_output else result


def var_bounds(constraints: TermList, var: str) -> tuple[float, float]:
    """(lower, upper) of ``var`` over the polyhedron; infinities where
    unbounded.  Raises :class:`InfeasibleRegion` on an empty polyhedron.

    The two bound LPs run on the terms connected to ``var`` through shared
    variables; disconnected terms cannot affect the bound once global
    feasibility is established, and pruning them keeps repeated queries
    byte-stable when unrelated constraints change.
    """
    if not is_satisfiable(constraints):
        raise InfeasibleRegion(f"no feasible point; bounds of {var!r} undefined")
    reach = {var}
    frontier = {var}
    terms = list(constraints)
    while frontier:
        nxt = set()
        for t in terms:
            tv = t.vars
            if tv & frontier:
                nxt |= tv - reach
        reach |= nxt
        frontier = nxt
    relevant = [t for t in terms if t.vars & reach]

    # Dangling elimination: a constraint containing a variable that occurs in
    # no other constraint can always be satisfied by that variable alone, so
    # it cannot affect the bound of ``var``.  Exact, and it keeps the LP
    # input independent of downstream-only constraints.
    while True:
        counts: dict[str, int] = {}
        for t in relevant:
            for v in t.vars:
                counts[v] = counts.get(v, 0) + 1
        removable = [t for t in relevant
                     if any(v != var and counts[v] == 1 for v in t.vars)]
        if not removable:
            break
        drop_set = {id(t) for t in removable}
        relevant = [t for t in relevant if id(t) not in drop_set]

    relevant = TermList(relevant)
    lo = lp_optimize({var: 1.0}, relevant, Direction.MIN)
    hi = lp_optimize({var: 1.0}, relevant, Direction.MAX)
    lower = lo.value if lo.status is LPStatus.OPTIMAL else float("-inf")
    upper = hi.value if hi.status is LPStatus.OPTIMAL else float("inf")
    return lower, upper


def _implies_term(a: LinearTerm, b: LinearTerm) -> bool:
    return is_implied(b, TermList((a,)))


def transform_sufficient(term: LinearTerm, drop: Iterable[str], context: TermList) -> TermList:
    """Sufficient conditions for ``term`` over variables outside ``drop``.

    Every substitution chain through single context rows is explored: a
    variable with a positive coefficient needs an upper-bound row (positive
    coefficient in the row), one with a negative coefficient a lower-bound
    row; equality rows serve both.  Fully eliminated candidates that are not
    trivially false are collected; among them, any candidate strictly
    implying another is discarded so only the weakest survive.  A trivially
    true candidate discharges the term for free but never suppresses the
    substantive candidates (each returned term, with the context, implies
    the original).

    Raises :class:`DischargeFailure` when no candidate survives.
    """
    forbidden = frozenset(drop)
    if term.relation is Relation.EQ and term.vars & forbidden:
        halves = term.as_leq_pair()
        gathered: list[LinearTerm] = []
        for half in halves:
            gathered.extend(transform_sufficient(half, forbidden, context))
        return TermList(gathered)

    depth_cap = max(1, len(forbidden))
    candidates: list[LinearTerm] = []
    seen: set = set()
    found_free_discharge = False
    queue: deque[tuple[LinearTerm, int, frozenset[str]]] = deque([(term, 0, frozenset())])
    explored = 0
    while queue:
        current, depth, eliminated = queue.popleft()
        explored += 1
        if explored > _CHAIN_CAP:
            raise ExplosionError("substitution chain explosion in transform_sufficient")
        dirty = sorted(v for v in current.coefficients if v in forbidden)
        if not dirty:
            if current.trivially_false():
                continue
            if current.trivially_true():
                found_free_discharge = True
                continue
            sig = current.signature()
            if sig not in seen:
                seen.add(sig)
                candidates.append(current)
            continue
        if depth >= depth_cap:
            continue
        v = dirty[0]
        c = current.coefficient(v)
        gone = eliminated | {v}
        for row in context:
            a = row.coefficient(v)
            if a == 0:
                continue
            if row.relation is Relation.LEQ and (a > 0) != (c > 0):
                continue
            if (row.vars - {v}) & gone:
                continue  # the row would reintroduce an eliminated variable
            queue.append((current.substituted(v, row), depth + 1, gone))

    if not candidates:
        if found_free_discharge:
            return EMPTY
        raise DischargeFailure(term, context, term.vars & forbidden)

    keep = []
    for i, cand in enumerate(candidates):
        dominated = False
        for j, other in enumerate(candidates):
            if i == j:
                continue
            if _implies_term(cand, other) and not (_implies_term(other, cand) and j > i):
                dominated = True
                break
        if not dominated:
            keep.append(cand)
    return TermList(keep)
