// Client-side mirror of the constraint grammar, used for instant editor
// validation only. Results are never trusted for algebra: every number the
// UI renders comes from a service response.
//
// Grammar: expr (<=|>=|=) expr | '|' expr '|' <= const-expr, where expr is
// a +/- chain of products of numbers and at most one variable (implicit or
// explicit '*'), numbers are decimals with optional exponent.

export interface ConstraintIssue {
  line: number; // 1-based index into the lines array
  column: number; // 1-based
  message: string;
}

export interface LineCheck {
  ok: boolean;
  issue?: ConstraintIssue;
  variables: string[];
}

interface Token {
  kind: "number" | "ident" | "op" | "end";
  text: string;
  column: number;
}

const TOKEN = /\s*(?:(\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)|([A-Za-z_][A-Za-z0-9_]*)|(<=|>=|=|\+|-|\*|\|))/y;

function tokenize(line: string, lineNo: number): Token[] | ConstraintIssue {
  const tokens: Token[] = [];
  let pos = 0;
  while (pos < line.length) {
    TOKEN.lastIndex = pos;
    const m = TOKEN.exec(line);
    if (!m) {
      const rest = line.slice(pos);
      const trimmed = rest.trimStart();
      if (!trimmed) break;
      return {
        line: lineNo,
        column: pos + (rest.length - trimmed.length) + 1,
        message: `unrecognized character '${trimmed[0]}'`,
      };
    }
    const column = m.index + (m[0].length - m[0].trimStart().length) + 1;
    if (m[1] !== undefined) tokens.push({ kind: "number", text: m[1], column });
    else if (m[2] !== undefined) tokens.push({ kind: "ident", text: m[2], column });
    else tokens.push({ kind: "op", text: m[3], column });
    pos = TOKEN.lastIndex;
  }
  tokens.push({ kind: "end", text: "", column: line.length + 1 });
  return tokens;
}

class LineParser {
  idx = 0;
  constructor(readonly tokens: Token[], readonly lineNo: number, readonly vars: Set<string>) {}

  peek(): Token {
    return this.tokens[this.idx];
  }
  advance(): Token {
    return this.tokens[this.idx++];
  }
  fail(message: string): ConstraintIssue {
    return { line: this.lineNo, column: this.peek().column, message };
  }

  expr(): ConstraintIssue | null {
    const first = this.peek();
    if (first.kind === "op" && (first.text === "+" || first.text === "-")) this.advance();
    for (;;) {
      const issue = this.product();
      if (issue) return issue;
      const tok = this.peek();
      if (tok.kind === "op" && (tok.text === "+" || tok.text === "-")) {
        this.advance();
        continue;
      }
      return null;
    }
  }

  product(): ConstraintIssue | null {
    let sawFactor = false;
    let sawVar = false;
    for (;;) {
      const tok = this.peek();
      if (tok.kind === "number") {
        this.advance();
        sawFactor = true;
      } else if (tok.kind === "ident") {
        if (sawVar) return this.fail(`nonlinear product at '${tok.text}'`);
        this.advance();
        this.vars.add(tok.text);
        sawVar = true;
        sawFactor = true;
      } else if (tok.kind === "op" && tok.text === "*") {
        if (!sawFactor) return this.fail("'*' needs a left operand");
        this.advance();
        continue;
      } else {
        if (!sawFactor) return this.fail("expected a number or variable");
        return null;
      }
      const next = this.peek();
      if (next.kind === "number" || next.kind === "ident" || (next.kind === "op" && next.text === "*")) continue;
      return null;
    }
  }
}

export function checkConstraint(line: string, lineNo = 1): LineCheck {
  const vars = new Set<string>();
  const toks = tokenize(line, lineNo);
  if (!Array.isArray(toks)) return { ok: false, issue: toks, variables: [] };
  const p = new LineParser(toks, lineNo, vars);

  if (p.peek().text === "|") {
    p.advance();
    const inner = p.expr();
    if (inner) return { ok: false, issue: inner, variables: [...vars] };
    if (p.peek().text !== "|") return { ok: false, issue: p.fail("expected closing '|'"), variables: [...vars] };
    p.advance();
    if (p.peek().text !== "<=") return { ok: false, issue: p.fail("absolute value form needs '<='"), variables: [...vars] };
    p.advance();
    const before = vars.size;
    const bound = p.expr();
    if (bound) return { ok: false, issue: bound, variables: [...vars] };
    if (vars.size !== before) return { ok: false, issue: p.fail("absolute-value bound must be constant"), variables: [...vars] };
  } else {
    const lhs = p.expr();
    if (lhs) return { ok: false, issue: lhs, variables: [...vars] };
    const rel = p.advance();
    if (rel.kind !== "op" || !["<=", ">=", "="].includes(rel.text)) {
      return { ok: false, issue: { line: lineNo, column: rel.column, message: "expected <=, >= or =" }, variables: [...vars] };
    }
    const rhs = p.expr();
    if (rhs) return { ok: false, issue: rhs, variables: [...vars] };
  }
  if (p.peek().kind !== "end") {
    return { ok: false, issue: p.fail(`unexpected '${p.peek().text}'`), variables: [...vars] };
  }
  return { ok: true, variables: [...vars] };
}

export interface ContractDraft {
  input_vars: string[];
  output_vars: string[];
  assumptions: string[];
  guarantees: string[];
}

export interface DraftCheck {
  ok: boolean;
  issues: string[];
  contract?: ContractDraft;
}

export function checkDraft(draft: ContractDraft): DraftCheck {
  const issues: string[] = [];
  const declared = new Set([...draft.input_vars, ...draft.output_vars]);
  const inputs = new Set(draft.input_vars);
  for (const name of declared) {
    if (!/^[A-Za-z_][A-Za-z0-9_]*$/.test(name)) issues.push(`invalid variable name '${name}'`);
  }
  for (const v of draft.output_vars) {
    if (inputs.has(v)) issues.push(`'${v}' is declared both input and output`);
  }
  draft.assumptions.forEach((line, i) => {
    if (!line.trim()) return;
    const check = checkConstraint(line, i + 1);
    if (!check.ok && check.issue) issues.push(`assumption ${i + 1}: ${check.issue.message}`);
    else {
      for (const v of check.variables) {
        if (!inputs.has(v)) issues.push(`assumption ${i + 1}: '${v}' is not an input variable`);
      }
    }
  });
  draft.guarantees.forEach((line, i) => {
    if (!line.trim()) return;
    const check = checkConstraint(line, i + 1);
    if (!check.ok && check.issue) issues.push(`guarantee ${i + 1}: ${check.issue.message}`);
    else {
      for (const v of check.variables) {
        if (!declared.has(v)) issues.push(`guarantee ${i + 1}: '${v}' is not declared`);
      }
    }
  });
  return issues.length ? { ok: false, issues } : { ok: true, issues: [], contract: draft };
}
