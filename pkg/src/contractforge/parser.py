"""Parse and render human-readable linear constraints.

Grammar (one constraint per line)::

    constraint := expr ('<=' | '>=' | '=') expr
                | '|' expr '|' '<=' expr
    expr       := ['+'|'-'] product (('+'|'-') product)*
    product    := factor (['*'] factor)*
    factor     := NUMBER | IDENT

Multiplication may be implicit ("2o", "-0.5 i", "2 i") or explicit ("2*o").
Numbers are decimals with optional scientific notation.  A product with two
or more variables is rejected as nonlinear.  ">=" is normalized to "<=" by
negation; "|e| <= k" expands to the pair (e <= k, -e <= k).  The right-hand
side of the absolute-value form must be constant.

Rendering is the inverse: variables appear alphabetically, the constant on
the right, and (e <= k, -e <= k) pairs are re-sugared to "|e| <= k".
Numbers render at full precision by default so round-trips are lossless;
pass ``precision`` for display-rounded output.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from .errors import ParseError
from .terms import LinearTerm, Relation, TermList

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<op><=|>=|=|\+|-|\*|\|))"
)


@dataclass(frozen=True)
class _Token:
    kind: str  # number | ident | op | end
    text: str
    column: int


def _tokenize(line: str, lineno: int) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(line):
        m = _TOKEN_RE.match(line, pos)
        if not m:
            stripped = line[pos:].lstrip()
            if not stripped:
                break
            col = len(line) - len(stripped) + 1
            raise ParseError(f"unrecognized character {stripped[0]!r}", lineno, col,
                             frozenset({"number", "variable", "operator"}))
        for kind in ("number", "ident", "op"):
            text = m.group(kind)
            if text is not None:
                tokens.append(_Token(kind, text, m.start(kind) + 1))
                break
        pos = m.end()
    tokens.append(_Token("end", "", len(line) + 1))
    return tokens


class _LineParser:
    def __init__(self, line: str, lineno: int):
        self.lineno = lineno
        self.tokens = _tokenize(line, lineno)
        self.idx = 0

    def peek(self) -> _Token:
        return self.tokens[self.idx]

    def advance(self) -> _Token:
        tok = self.tokens[self.idx]
        self.idx += 1
        return tok

    def error(self, message: str, expected: set[str]) -> ParseError:
        tok = self.peek()
        return ParseError(message, self.lineno, tok.column, frozenset(expected))

    def parse_constraint(self) -> list[LinearTerm]:
        if self.peek().text == "|":
            return self._parse_abs()
        lhs = self._parse_expr()
        rel = self.advance()
        if rel.kind != "op" or rel.text not in ("<=", ">=", "="):
            raise ParseError("expected a relation", self.lineno, rel.column,
                             frozenset({"<=", ">=", "="}))
        rhs = self._parse_expr()
        end = self.peek()
        if end.kind != "end":
            raise self.error(f"unexpected {end.text!r} after constraint", {"end of line"})
        coeffs = dict(lhs[0])
        for v, c in rhs[0].items():
            coeffs[v] = coeffs.get(v, 0.0) - c
        constant = rhs[1] - lhs[1]
        if rel.text == ">=":
            coeffs = {v: -c for v, c in coeffs.items()}
            constant = -constant
        relation = Relation.EQ if rel.text == "=" else Relation.LEQ
        return [LinearTerm.make(coeffs, constant, relation)]

    def _parse_abs(self) -> list[LinearTerm]:
        self.advance()  # opening bar
        inner = self._parse_expr()
        bar = self.advance()
        if bar.text != "|":
            raise ParseError("expected closing '|'", self.lineno, bar.column, frozenset({"|"}))
        rel = self.advance()
        if rel.text != "<=":
            raise ParseError("absolute-value form needs '<='", self.lineno, rel.column, frozenset({"<="}))
        bound = self._parse_expr()
        end = self.peek()
        if end.kind != "end":
            raise self.error(f"unexpected {end.text!r} after constraint", {"end of line"})
        if bound[0]:
            raise ParseError("absolute-value bound must be constant", self.lineno, end.column, frozenset({"number"}))
        coeffs, const = inner
        k = bound[1]
        upper = LinearTerm.make(coeffs, k - const, Relation.LEQ)
        lower = LinearTerm.make({v: -c for v, c in coeffs.items()}, k + const, Relation.LEQ)
        return [upper, lower]

    def _parse_expr(self) -> tuple[dict[str, float], float]:
        coeffs: dict[str, float] = {}
        constant = 0.0
        sign = 1.0
        tok = self.peek()
        if tok.kind == "op" and tok.text in "+-":
            self.advance()
            sign = -1.0 if tok.text == "-" else 1.0
        while True:
            c, v = self._parse_product()
            if v is None:
                constant += sign * c
            else:
                coeffs[v] = coeffs.get(v, 0.0) + sign * c
            tok = self.peek()
            if tok.kind == "op" and tok.text in "+-":
                self.advance()
                sign = -1.0 if tok.text == "-" else 1.0
                continue
            return coeffs, constant

    def _parse_product(self) -> tuple[float, str | None]:
        value = 1.0
        var: str | None = None
        saw_factor = False
        while True:
            tok = self.peek()
            if tok.kind == "number":
                self.advance()
                value *= float(tok.text)
                saw_factor = True
            elif tok.kind == "ident":
                self.advance()
                if var is not None:
                    raise ParseError(
                        f"nonlinear product: {var!r} * {tok.text!r}", self.lineno, tok.column,
                        frozenset({"number", "+", "-", "relation", "end of line"}))
                var = tok.text
                saw_factor = True
            elif tok.kind == "op" and tok.text == "*":
                if not saw_factor:
                    raise self.error("'*' needs a left operand", {"number", "variable"})
                self.advance()
                continue
            else:
                if not saw_factor:
                    raise self.error("expected a number or variable", {"number", "variable"})
                return value, var
            # implicit multiplication: loop again only if next token is a factor or '*'
            nxt = self.peek()
            if nxt.kind in ("number", "ident") or (nxt.kind == "op" and nxt.text == "*"):
                continue
            return value, var


def parse_constraints(lines: list[str] | tuple[str, ...]) -> TermList:
    """Parse constraint lines into a canonical :class:`TermList`."""
    terms: list[LinearTerm] = []
    for i, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        terms.extend(_LineParser(line, i).parse_constraint())
    return TermList(terms)


def parse_expression(text: str) -> tuple[dict[str, float], float]:
    """Parse a bare linear expression (used by the optimize APIs)."""
    parser = _LineParser(text, 1)
    coeffs, constant = parser._parse_expr()
    end = parser.peek()
    if end.kind != "end":
        raise ParseError(f"unexpected {end.text!r} in expression", 1, end.column,
                         frozenset({"+", "-", "end of line"}))
    return coeffs, constant


def format_number(x: float, precision: int | None = None) -> str:
    if precision is not None:
        x = float(f"{x:.{precision}g}")
    if x == int(x) and abs(x) < 1e15:
        return str(int(x))
    return repr(x)


def _format_linear(coeffs: dict[str, float], precision: int | None = None) -> str:
    if not coeffs:
        return "0"
    parts = []
    for i, v in enumerate(sorted(coeffs)):
        c = coeffs[v]
        mag = abs(c)
        mono = v if mag == 1.0 else f"{format_number(mag, precision)} {v}"
        if i == 0:
            parts.append(f"-{mono}" if c < 0 else mono)
        else:
            parts.append(("- " if c < 0 else "+ ") + mono)
    return " ".join(parts)


def render_term(term: LinearTerm, precision: int | None = None) -> str:
    lhs = _format_linear(term.coefficients, precision)
    return f"{lhs} {term.relation.value} {format_number(term.constant, precision)}"


def _abs_partner(a: LinearTerm, b: LinearTerm) -> bool:
    if a.relation is not Relation.LEQ or b.relation is not Relation.LEQ:
        return False
    if a.constant != b.constant or not a.coefficients or a.vars != b.vars:
        return False
    return all(b.coefficients[v] == -c for v, c in a.coefficients.items())


def render(terms: TermList, precision: int | None = None) -> list[str]:
    """Render a term list; (e <= k, -e <= k) pairs re-sugar to "|e| <= k"."""
    out: list[str] = []
    used = [False] * len(terms)
    items = list(terms)
    for i, t in enumerate(items):
        if used[i]:
            continue
        partner = -1
        for j in range(i + 1, len(items)):
            if not used[j] and _abs_partner(t, items[j]):
                partner = j
                break
        if partner >= 0:
            used[i] = used[partner] = True
            pick = t if t.coefficients[min(t.coefficients)] > 0 else items[partner]
            lead = abs(pick.coefficients[min(pick.coefficients)])
            scaled = {v: c / lead for v, c in pick.coefficients.items()}
            out.append(f"|{_format_linear(scaled, precision)}| <= {format_number(t.constant / lead, precision)}")
        else:
            used[i] = True
            out.append(render_term(t, precision))
    return out
