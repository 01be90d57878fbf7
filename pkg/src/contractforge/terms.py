"""Canonical linear terms and conjunctions of them (convex polyhedra).

A :class:`LinearTerm` is one constraint ``sum(c_v * v) <= k`` or
``sum(c_v * v) = k`` over named real variables.  A :class:`TermList` is an
ordered conjunction of terms.  Both are immutable; all algebra returns new
values.

Canonical form rules:

* coefficient entries with magnitude below ``ZERO_COEF`` are not stored;
* a term with no coefficients is classified as trivially true or false
  relative to the global tolerance;
* equality terms are sign-normalized so the constant is positive (or, at
  zero, so the alphabetically first variable has a positive coefficient).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Iterator, Mapping

from . import config

ZERO_COEF = 1e-12

_VARNAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def check_var_name(name: str) -> str:
    """Validate an identifier: letters/digits/underscores, no leading digit."""
    if not isinstance(name, str) or not _VARNAME_RE.match(name):
        raise ValueError(f"invalid variable name: {name!r}")
    return name


class Relation(Enum):
    LEQ = "<="
    EQ = "="


def _clean_coeffs(coefficients: Mapping[str, float]) -> dict[str, float]:
    return {v: float(c) for v, c in coefficients.items() if abs(c) > ZERO_COEF}


@dataclass(frozen=True)
class LinearTerm:
    """One linear constraint in canonical form.

    Use :meth:`make` rather than the raw constructor so canonicalization
    (zero stripping, equality sign normalization) is applied.
    """

    coefficients: dict[str, float]
    constant: float
    relation: Relation

    @staticmethod
    def make(coefficients: Mapping[str, float], constant: float, relation: Relation = Relation.LEQ) -> "LinearTerm":
        coeffs = _clean_coeffs(coefficients)
        constant = float(constant)
        if relation is Relation.EQ and coeffs:
            flip = constant < 0 or (constant == 0 and coeffs[min(coeffs)] < 0)
            if flip:
                coeffs = {v: -c for v, c in coeffs.items()}
                constant = -constant
        return LinearTerm(coeffs, constant, relation)

    @staticmethod
    def leq(coefficients: Mapping[str, float], constant: float) -> "LinearTerm":
        return LinearTerm.make(coefficients, constant, Relation.LEQ)

    @staticmethod
    def eq(coefficients: Mapping[str, float], constant: float) -> "LinearTerm":
        return LinearTerm.make(coefficients, constant, Relation.EQ)

    @property
    def vars(self) -> frozenset[str]:
        return frozenset(self.coefficients)

    def coefficient(self, var: str) -> float:
        return self.coefficients.get(var, 0.0)

    def mentions(self, var: str) -> bool:
        return var in self.coefficients

    @property
    def is_constant(self) -> bool:
        return not self.coefficients

    def trivially_true(self) -> bool:
        if self.coefficients:
            return False
        if self.relation is Relation.EQ:
            return config.eq_tol(self.constant, 0.0)
        return config.leq_tol(0.0, self.constant)

    def trivially_false(self) -> bool:
        return self.is_constant and not self.trivially_true()

    def scaled(self, factor: float) -> "LinearTerm":
        """Multiply by a positive factor (an inequality keeps its direction)."""
        if factor <= 0 and self.relation is Relation.LEQ:
            raise ValueError("cannot scale a <= term by a non-positive factor")
        return LinearTerm.make(
            {v: c * factor for v, c in self.coefficients.items()},
            self.constant * factor,
            self.relation,
        )

    def combined(self, other: "LinearTerm", a: float, b: float) -> "LinearTerm":
        """a*self + b*other with a, b >= 0; both terms must have relation <=."""
        coeffs = {v: c * a for v, c in self.coefficients.items()}
        for v, c in other.coefficients.items():
            coeffs[v] = coeffs.get(v, 0.0) + c * b
        return LinearTerm.make(coeffs, a * self.constant + b * other.constant, Relation.LEQ)

    def substituted(self, var: str, row: "LinearTerm") -> "LinearTerm":
        """Replace ``var`` using ``row`` (which must mention it): self - (c/a)*row.

        With ``c = self.coefficient(var)`` and ``a = row.coefficient(var)``,
        the result drops ``var``.  When ``row`` is an inequality, ``a`` must
        have the same sign as ``c`` so the substitution yields a sufficient
        condition; for an equality row the substitution is exact.
        """
        a = row.coefficient(var)
        c = self.coefficient(var)
        if a == 0 or c == 0:
            raise ValueError(f"substitution requires {var} in both terms")
        lam = c / a
        if row.relation is Relation.LEQ and lam <= 0:
            raise ValueError("inequality substitution needs same-sign coefficients")
        coeffs = dict(self.coefficients)
        for v, rc in row.coefficients.items():
            coeffs[v] = coeffs.get(v, 0.0) - lam * rc
        coeffs.pop(var, None)
        return LinearTerm.make(coeffs, self.constant - lam * row.constant, self.relation)

    def renamed(self, mapping: Mapping[str, str]) -> "LinearTerm":
        return LinearTerm.make(
            {mapping.get(v, v): c for v, c in self.coefficients.items()},
            self.constant,
            self.relation,
        )

    def as_leq_pair(self) -> tuple["LinearTerm", ...]:
        """An EQ term as its two <= halves; a <= term unchanged."""
        if self.relation is Relation.LEQ:
            return (self,)
        return (
            LinearTerm(dict(self.coefficients), self.constant, Relation.LEQ),
            LinearTerm({v: -c for v, c in self.coefficients.items()}, -self.constant, Relation.LEQ),
        )

    def evaluate(self, point: Mapping[str, float]) -> float:
        return sum(c * point.get(v, 0.0) for v, c in self.coefficients.items())

    def satisfied_by(self, point: Mapping[str, float]) -> bool:
        lhs = self.evaluate(point)
        if self.relation is Relation.EQ:
            return config.eq_tol(lhs, self.constant)
        return config.leq_tol(lhs, self.constant)

    def signature(self) -> tuple:
        return (self.relation, tuple(sorted(self.coefficients.items())), self.constant)

    def __eq__(self, other) -> bool:
        return isinstance(other, LinearTerm) and self.signature() == other.signature()

    def __hash__(self) -> int:
        return hash(self.signature())

    def __repr__(self) -> str:
        from .parser import render_term

        return f"LinearTerm({render_term(self)!r})"


@dataclass(frozen=True)
class TermList:
    """An ordered conjunction of linear terms."""

    terms: tuple[LinearTerm, ...] = field(default_factory=tuple)

    def __init__(self, terms: Iterable[LinearTerm] = ()):
        object.__setattr__(self, "terms", tuple(terms))

    @property
    def vars(self) -> frozenset[str]:
        out: set[str] = set()
        for t in self.terms:
            out.update(t.coefficients)
        return frozenset(out)

    def __iter__(self) -> Iterator[LinearTerm]:
        return iter(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __getitem__(self, idx):
        return self.terms[idx]

    def __add__(self, other: "TermList") -> "TermList":
        return TermList(self.terms + tuple(other))

    def expanded(self) -> "TermList":
        """Every EQ term replaced by its pair of <= halves."""
        out: list[LinearTerm] = []
        for t in self.terms:
            out.extend(t.as_leq_pair())
        return TermList(out)

    def renamed(self, mapping: Mapping[str, str]) -> "TermList":
        return TermList(t.renamed(mapping) for t in self.terms)

    def satisfied_by(self, point: Mapping[str, float]) -> bool:
        return all(t.satisfied_by(point) for t in self.terms)

    def __repr__(self) -> str:
        from .parser import render

        return "TermList(" + ", ".join(repr(s) for s in render(self)) + ")"


EMPTY = TermList(())
