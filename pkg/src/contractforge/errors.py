"""Exception hierarchy for the contract algebra and the two labs."""

from __future__ import annotations


class ContractForgeError(Exception):
    """Base class for all library errors."""


class ParseError(ContractForgeError):
    """Constraint text that does not match the grammar.

    Carries the 1-based line number, 1-based column, and the set of token
    descriptions that would have been accepted at that position.
    """

    def __init__(self, message: str, line: int, column: int, expected: frozenset[str] = frozenset()):
        self.line = line
        self.column = column
        self.expected = frozenset(expected)
        detail = f"line {line}, column {column}: {message}"
        if self.expected:
            detail += " (expected " + ", ".join(sorted(self.expected)) + ")"
        super().__init__(detail)


class InterfaceError(ContractForgeError):
    """Variable roles clash: overlapping inputs/outputs, unknown vars, cycles."""


class InfeasibleRegion(ContractForgeError):
    """A bounds or optimization query over an empty polyhedron."""


class ExplosionError(ContractForgeError):
    """Fourier-Motzkin intermediate term count exceeded the safety cap."""


class DischargeFailure(ContractForgeError):
    """No sufficient condition exists for an assumption term in a context."""

    def __init__(self, term, context, variables):
        self.term = term
        self.context = context
        self.variables = frozenset(variables)
        super().__init__(f"cannot discharge {term} using the given context")


class IncompatibilityError(ContractForgeError):
    """Composition failed: some assumptions cannot be met by upstream guarantees.

    Wraps an IncompatibilityDiagnostic (``.diagnostic``) naming the
    un-dischargeable terms, the guarantees used in the attempt, and the
    variables that could not be eliminated.
    """

    def __init__(self, diagnostic, message: str | None = None):
        self.diagnostic = diagnostic
        super().__init__(message or diagnostic.describe())


class QuotientUnsound(ContractForgeError):
    """Post-verification of a quotient failed (compose(part, result) !<= top)."""


class ConstructionError(ContractForgeError):
    """A component model cannot be built at the given operating point."""


class ConfigError(ContractForgeError):
    """A lab configuration file is malformed or inconsistent."""


class RangeError(ContractForgeError):
    """An input fell outside a model's validity range (e.g. the ISA layers)."""
