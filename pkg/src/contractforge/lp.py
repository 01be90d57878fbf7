"""Linear programming over term lists.

The solver is a dense two-phase primal simplex with Bland's rule, written
here so the library has no solver dependency; problems in this codebase stay
small (a few hundred rows).  It sits behind :func:`lp_optimize` so a
different backend could be swapped in without touching callers.

Free variables are split ``x = x+ - x-``; every row receives an artificial
variable for phase 1.  Rows are max-norm equilibrated for numerical sanity.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Mapping

import numpy as np

from . import config
from .terms import Relation, TermList

PIVOT_EPS = 1e-9
_MAX_ITER_FLOOR = 500


class LPStatus(Enum):
    OPTIMAL = "optimal"
    UNBOUNDED = "unbounded"
    INFEASIBLE = "infeasible"


class Direction(Enum):
    MIN = "min"
    MAX = "max"


@dataclass(frozen=True)
class LPOutcome:
    status: LPStatus
    value: float | None = None
    witness: dict[str, float] | None = None

    @property
    def optimal(self) -> bool:
        return self.status is LPStatus.OPTIMAL


def _pivot(T: np.ndarray, red: np.ndarray, basis: np.ndarray, leave: int, entering: int) -> None:
    T[leave, :] /= T[leave, entering]
    factors = T[:, entering].copy()
    factors[leave] = 0.0
    T -= np.outer(factors, T[leave, :])
    red -= red[entering] * T[leave, :]
    basis[leave] = entering


def _run(T: np.ndarray, basis: np.ndarray, cost: np.ndarray, *, phase_one: bool = False) -> str:
    """Iterate to optimality on tableau T (rhs in last column).  Bland's rule.

    In phase 1 an "unbounded" verdict can only be roundoff (the objective is
    bounded below by zero), so the offending column is retired instead.
    """
    m, width = T.shape
    ncols = width - 1
    red = np.concatenate([cost, [0.0]]) - cost[basis] @ T
    banned = np.zeros(ncols, dtype=bool)
    max_iter = max(_MAX_ITER_FLOOR, 60 * (m + ncols))
    for _ in range(max_iter):
        eligible_cols = (red[:ncols] < -PIVOT_EPS) & ~banned
        candidates = np.flatnonzero(eligible_cols)
        if candidates.size == 0:
            return "optimal"
        entering = int(candidates[0])
        col = T[:, entering]
        eligible = np.flatnonzero(col > PIVOT_EPS)
        if eligible.size == 0:
            if phase_one:
                banned[entering] = True
                continue
            return "unbounded"
        ratios = T[eligible, -1] / col[eligible]
        best = ratios.min()
        near = eligible[ratios <= best + PIVOT_EPS]
        leave = int(near[np.argmin(basis[near])])
        _pivot(T, red, basis, leave, entering)
    raise RuntimeError("simplex iteration cap exceeded")


def _simplex_min(A: np.ndarray, b: np.ndarray, c: np.ndarray) -> tuple[str, float, np.ndarray]:
    """min c@z  s.t.  A@z = b, z >= 0 (requires b >= 0).  (status, value, z)."""
    m, n = A.shape
    if m == 0:
        if np.any(c < -PIVOT_EPS):
            return "unbounded", 0.0, np.zeros(n)
        return "optimal", 0.0, np.zeros(n)

    # Column equilibration: solve in y = s*x, undo on exit.
    col_scale = np.abs(A).max(axis=0)
    col_scale[col_scale == 0] = 1.0
    A = A / col_scale
    c = c / col_scale

    T = np.zeros((m, n + m + 1))
    T[:, :n] = A
    T[:, n : n + m] = np.eye(m)
    T[:, -1] = b
    basis = np.arange(n, n + m)

    phase1 = np.zeros(n + m)
    phase1[n:] = 1.0
    if _run(T, basis, phase1, phase_one=True) != "optimal":  # pragma: no cover
        raise RuntimeError("phase 1 cannot be unbounded")
    feas_tol = config.get_tolerance() * max(1.0, float(np.max(np.abs(b))))
    if float(T[basis >= n, -1].sum()) > feas_tol:
        return "infeasible", 0.0, np.zeros(n)

    # Drive remaining artificials out of the basis; drop redundant rows.
    keep = np.ones(m, dtype=bool)
    for i in range(m):
        if basis[i] >= n:
            js = np.flatnonzero(np.abs(T[i, :n]) > PIVOT_EPS)
            if js.size == 0:
                keep[i] = False
                continue
            red_dummy = np.zeros(T.shape[1])
            _pivot(T, red_dummy, basis, i, int(js[0]))
    if not keep.all():
        T = T[keep]
        basis = basis[keep]
        m = T.shape[0]

    T = np.hstack([T[:, :n], T[:, -1:]])
    status = _run(T, basis, c)
    if status == "unbounded":
        return "unbounded", 0.0, np.zeros(n)
    z = np.zeros(n)
    z[basis] = T[:, -1]
    return "optimal", float(c @ z), z / col_scale


def _build_rows(constraints: TermList, var_index: dict[str, int]):
    """Dense (A, b, relations, infeasible_flag) for the nontrivial rows."""
    rows, rhs, rels = [], [], []
    for t in constraints:
        if t.is_constant:
            if t.trivially_false():
                return None, None, None, True
            continue
        row = np.zeros(len(var_index))
        for v, cf in t.coefficients.items():
            row[var_index[v]] = cf
        scale = np.max(np.abs(row))
        rows.append(row / scale)
        rhs.append(t.constant / scale)
        rels.append(t.relation)
    if rows:
        return np.vstack(rows), np.array(rhs), rels, False
    return np.zeros((0, len(var_index))), np.zeros(0), rels, False


def lp_optimize(
    objective: Mapping[str, float],
    constraints: TermList,
    direction: Direction = Direction.MAX,
    *,
    offset: float = 0.0,
) -> LPOutcome:
    """Optimize a linear expression over the polyhedron of ``constraints``.

    All outcomes are encoded in the returned :class:`LPOutcome`; an empty
    constraint set with a nonconstant objective is UNBOUNDED.  ``offset`` is
    a constant added to the objective value.
    """
    objective = {v: float(cf) for v, cf in objective.items() if abs(cf) > 0}
    names = sorted(set(constraints.vars) | set(objective))
    var_index = {v: i for i, v in enumerate(names)}
    A0, b0, rels, infeasible = _build_rows(constraints, var_index)
    if infeasible:
        return LPOutcome(LPStatus.INFEASIBLE)
    if not names:
        return LPOutcome(LPStatus.OPTIMAL, offset, {})

    n = len(names)
    m = A0.shape[0]
    obj = np.zeros(n)
    for v, cf in objective.items():
        obj[var_index[v]] = cf

    # minimize sign*obj; for MAX we minimize the negation.
    sign = -1.0 if direction is Direction.MAX else 1.0
    n_slack = sum(1 for r in rels if r is Relation.LEQ)
    A = np.zeros((m, 2 * n + n_slack))
    b = b0.copy()
    si = 0
    for i in range(m):
        A[i, :n] = A0[i]
        A[i, n : 2 * n] = -A0[i]
        if rels[i] is Relation.LEQ:
            A[i, 2 * n + si] = 1.0
            si += 1
        if b[i] < 0:
            A[i, :] = -A[i, :]
            b[i] = -b[i]
    cost = np.zeros(2 * n + n_slack)
    cost[:n] = sign * obj
    cost[n : 2 * n] = -sign * obj

    status, value, z = _simplex_min(A, b, cost)
    if status == "infeasible":
        return LPOutcome(LPStatus.INFEASIBLE)
    if status == "unbounded":
        return LPOutcome(LPStatus.UNBOUNDED)
    x = z[:n] - z[n : 2 * n]
    witness = {v: float(x[var_index[v]]) for v in names}
    return LPOutcome(LPStatus.OPTIMAL, sign * value + offset, witness)
