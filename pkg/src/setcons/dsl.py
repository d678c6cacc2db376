"""Parser and printer for the textual system description format.

A system file declares a universe, optional named constant sets, state
variables with their initial sets, one update rule per variable, and
optional numeric settings::

    # comments run to end of line
    universe [0,200]
    const C = [40,60] | [100,120]
    state X1 = [0,30]
    rule X1 = X1 | (C & X2) \\ ~X2
    option max_rounds = 40

Rule expressions use ``|`` union, ``&`` intersection, ``~`` complement,
``\\`` difference, ``^`` symmetric difference, with ``~`` binding tightest,
then ``&``, then ``\\``/``^``, then ``|``.  ``X`` denotes the universe and
``empty`` the empty set.  Numbers are decimal rationals (``7``, ``3.5``,
``1/3``); ``inf``/``-inf`` mark unbounded endpoints.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from fractions import Fraction

from .expr import (
    Complement,
    ConstRef,
    Difference,
    EmptyLit,
    Intersect,
    SetExpr,
    SetMap,
    SymDiff,
    Union,
    UniverseLit,
    Var,
    expr_to_text,
)
from .intervals import Interval, IntervalSet, Universe, as_value

KEYWORDS = {"universe", "const", "state", "rule", "option", "empty", "X", "inf"}
OPTION_KEYS = {"max_rounds", "generators", "enumeration", "listing"}


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" or "warning"
    line: int      # 1-based
    column: int    # 1-based, points inside the offending token
    message: str
    hint: str | None = None

    def render(self) -> str:
        text = f"{self.line}:{self.column}: {self.severity}: {self.message}"
        if self.hint:
            text += f" ({self.hint})"
        return text


class DslError(Exception):
    def __init__(self, diagnostics: list[Diagnostic]):
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(d.render() for d in self.diagnostics))


@dataclass(frozen=True)
class SystemSpec:
    """Parsed system description; structurally comparable."""

    universe: Universe
    constants: tuple[tuple[str, IntervalSet], ...]
    variables: tuple[str, ...]
    initials: tuple[IntervalSet, ...]
    rules: tuple[SetExpr, ...]
    options: tuple[tuple[str, int], ...] = ()

    @property
    def constants_map(self) -> dict[str, IntervalSet]:
        return dict(self.constants)

    @property
    def options_map(self) -> dict[str, int]:
        return dict(self.options)

    def set_map(self) -> SetMap:
        return SetMap(self.rules, self.universe, self.constants)

    def initial_state(self) -> tuple[IntervalSet, ...]:
        return self.initials


@dataclass(frozen=True)
class _Token:
    kind: str  # IDENT NUMBER PUNCT NEWLINE EOF
    text: str
    line: int
    column: int


_TOKEN_RE = re.compile(
    r"(?P<ws>[ \t]+)"
    r"|(?P<comment>#[^\n]*)"
    r"|(?P<newline>\n)"
    r"|(?P<number>\d+(?:\.\d+)?(?:/\d+)?)"
    r"|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<punct>[\[\]\(\),=|&^~\\\-])"
)


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise DslError([Diagnostic("error", line, col, f"unexpected character {text[pos]!r}")])
        kind = m.lastgroup
        lexeme = m.group()
        if kind == "newline":
            tokens.append(_Token("NEWLINE", "\n", line, col))
            line += 1
            col = 1
        else:
            if kind == "number":
                tokens.append(_Token("NUMBER", lexeme, line, col))
            elif kind == "ident":
                tokens.append(_Token("IDENT", lexeme, line, col))
            elif kind == "punct":
                tokens.append(_Token("PUNCT", lexeme, line, col))
            col += len(lexeme)
        pos = m.end()
    tokens.append(_Token("EOF", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.diagnostics: list[Diagnostic] = []

    # -- token plumbing ----------------------------------------------------

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        if tok.kind != "EOF":
            self.pos += 1
        return tok

    def at_punct(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind == "PUNCT" and tok.text == text

    def fail(self, tok: _Token, message: str, hint: str | None = None):
        raise DslError(self.diagnostics + [Diagnostic("error", tok.line, tok.column, message, hint)])

    def note(self, tok: _Token, message: str, hint: str | None = None):
        self.diagnostics.append(Diagnostic("error", tok.line, tok.column, message, hint))

    def expect_punct(self, text: str) -> _Token:
        tok = self.peek()
        if not self.at_punct(text):
            self.fail(tok, f"expected {text!r}, found {tok.text!r}" if tok.text else f"expected {text!r}")
        return self.advance()

    def skip_newlines(self):
        while self.peek().kind == "NEWLINE":
            self.advance()

    def end_statement(self):
        tok = self.peek()
        if tok.kind == "NEWLINE":
            self.advance()
        elif tok.kind != "EOF":
            self.fail(tok, f"unexpected {tok.text!r} after statement", "one declaration per line")

    # -- literal values ------------------------------------------------------

    def parse_endpoint_value(self):
        tok = self.peek()
        negative = False
        if self.at_punct("-"):
            self.advance()
            negative = True
            tok = self.peek()
        if tok.kind == "NUMBER":
            self.advance()
            value = as_value(tok.text)
            return -value if negative else value
        if tok.kind == "IDENT" and tok.text == "inf":
            self.advance()
            return as_value("-inf" if negative else "inf")
        self.fail(tok, f"expected a number or 'inf', found {tok.text!r}")

    def parse_interval(self) -> Interval:
        opener = self.advance()  # '[' or '('
        lo = self.parse_endpoint_value()
        self.expect_punct(",")
        hi = self.parse_endpoint_value()
        closer = self.peek()
        if not (self.at_punct("]") or self.at_punct(")")):
            self.fail(closer, f"expected ']' or ')', found {closer.text!r}")
        self.advance()
        lo_closed = opener.text == "["
        hi_closed = closer.text == "]"
        if lo_closed and isinstance(lo, float):
            self.fail(opener, "an infinite endpoint cannot be closed", "use '(' before -inf/inf")
        if hi_closed and isinstance(hi, float):
            self.fail(closer, "an infinite endpoint cannot be closed", "use ')' after -inf/inf")
        try:
            return Interval.make(lo, hi, lo_closed, hi_closed)
        except ValueError:
            self.fail(opener, f"empty interval: lower endpoint does not precede upper")

    def parse_interval_set(self, universe: Universe | None) -> IntervalSet:
        tok = self.peek()
        if tok.kind == "IDENT" and tok.text == "empty":
            self.advance()
            return IntervalSet.empty()
        if tok.kind == "IDENT" and tok.text == "X":
            if universe is None:
                self.fail(tok, "the universe literal X cannot be used here")
            self.advance()
            return universe.carrier
        spans = [self.parse_interval()]
        while self.at_punct("|"):
            self.advance()
            spans.append(self.parse_interval())
        return IntervalSet.from_intervals(spans)

    # -- expressions ---------------------------------------------------------

    def parse_expr(self, names: dict[str, SetExpr]) -> SetExpr:
        return self.parse_union(names)

    def parse_union(self, names) -> SetExpr:
        left = self.parse_diff(names)
        while self.at_punct("|"):
            self.advance()
            left = Union(left, self.parse_diff(names))
        return left

    def parse_diff(self, names) -> SetExpr:
        left = self.parse_intersect(names)
        while self.at_punct("\\") or self.at_punct("^"):
            op = self.advance().text
            right = self.parse_intersect(names)
            left = Difference(left, right) if op == "\\" else SymDiff(left, right)
        return left

    def parse_intersect(self, names) -> SetExpr:
        left = self.parse_atom(names)
        while self.at_punct("&"):
            self.advance()
            left = Intersect(left, self.parse_atom(names))
        return left

    def parse_atom(self, names) -> SetExpr:
        tok = self.peek()
        if self.at_punct("~"):
            self.advance()
            return Complement(self.parse_atom(names))
        if self.at_punct("("):
            self.advance()
            inner = self.parse_expr(names)
            self.expect_punct(")")
            return inner
        if tok.kind == "IDENT":
            self.advance()
            if tok.text == "X":
                return UniverseLit()
            if tok.text == "empty":
                return EmptyLit()
            ref = names.get(tok.text)
            if ref is None:
                self.fail(tok, f"undefined identifier {tok.text}", "declare it with 'state' or 'const'")
            return ref
        self.fail(tok, f"expected an expression, found {tok.text!r}" if tok.text else "unexpected end of input")

    # -- declarations ----------------------------------------------------------

    def parse_system(self) -> SystemSpec:
        self.skip_newlines()
        tok = self.peek()
        if not (tok.kind == "IDENT" and tok.text == "universe"):
            self.fail(tok, "a system must start with a universe declaration", "universe [a,b] | ...")
        self.advance()
        universe_set = self.parse_interval_set(None)
        if universe_set.is_empty():
            self.fail(tok, "the universe must be nonempty")
        universe = Universe(universe_set)
        self.end_statement()

        constants: list[tuple[str, IntervalSet]] = []
        variables: list[str] = []
        initials: list[IntervalSet] = []
        decl_tokens: dict[str, _Token] = {}
        rules: dict[str, SetExpr] = {}
        rule_tokens: dict[str, _Token] = {}
        options: list[tuple[str, int]] = []
        seen_rule = False

        while True:
            self.skip_newlines()
            tok = self.peek()
            if tok.kind == "EOF":
                break
            if tok.kind != "IDENT":
                self.fail(tok, f"expected a declaration keyword, found {tok.text!r}")
            keyword = tok.text
            if keyword in ("const", "state"):
                if seen_rule:
                    self.fail(tok, f"'{keyword}' declarations must precede the rules")
                self.advance()
                name_tok = self.peek()
                if name_tok.kind != "IDENT" or name_tok.text in KEYWORDS:
                    self.fail(name_tok, f"expected a fresh identifier, found {name_tok.text!r}")
                if name_tok.text in decl_tokens:
                    self.fail(name_tok, f"duplicate declaration of {name_tok.text}")
                self.advance()
                self.expect_punct("=")
                value = self.parse_interval_set(universe)
                if not universe.contains_set(value):
                    self.note(
                        name_tok,
                        f"the set for {name_tok.text} escapes the universe",
                        f"clip it to {universe}",
                    )
                decl_tokens[name_tok.text] = name_tok
                if keyword == "const":
                    constants.append((name_tok.text, value))
                else:
                    variables.append(name_tok.text)
                    initials.append(value)
                self.end_statement()
            elif keyword == "rule":
                seen_rule = True
                self.advance()
                name_tok = self.peek()
                if name_tok.kind != "IDENT":
                    self.fail(name_tok, "expected a variable name after 'rule'")
                self.advance()
                self.expect_punct("=")
                names: dict[str, SetExpr] = {v: Var(i) for i, v in enumerate(variables)}
                names.update({c: ConstRef(c) for c, _ in constants})
                expr = self.parse_expr(names)
                if name_tok.text not in variables:
                    self.note(name_tok, f"rule for undeclared variable {name_tok.text}",
                              "declare it with 'state' first")
                elif name_tok.text in rules:
                    self.note(name_tok, f"duplicate rule for {name_tok.text}")
                else:
                    rules[name_tok.text] = expr
                    rule_tokens[name_tok.text] = name_tok
                self.end_statement()
            elif keyword == "option":
                self.advance()
                key_tok = self.peek()
                if key_tok.kind != "IDENT" or key_tok.text not in OPTION_KEYS:
                    self.fail(key_tok, f"unknown option {key_tok.text!r}",
                              "known options: " + ", ".join(sorted(OPTION_KEYS)))
                self.advance()
                self.expect_punct("=")
                value_tok = self.peek()
                if value_tok.kind != "NUMBER" or not value_tok.text.isdigit():
                    self.fail(value_tok, "option values must be positive integers")
                self.advance()
                options.append((key_tok.text, int(value_tok.text)))
                self.end_statement()
            elif keyword == "universe":
                self.fail(tok, "duplicate universe declaration")
            else:
                self.fail(tok, f"unknown declaration {keyword!r}",
                          "expected const, state, rule, or option")

        if not variables:
            self.note(self.peek(), "a system needs at least one state variable")
        for v in variables:
            if v not in rules:
                tok = decl_tokens[v]
                self.diagnostics.append(
                    Diagnostic("error", tok.line, tok.column, f"variable {v} has no rule")
                )
        if self.diagnostics:
            raise DslError(self.diagnostics)
        return SystemSpec(
            universe=universe,
            constants=tuple(constants),
            variables=tuple(variables),
            initials=tuple(initials),
            rules=tuple(rules[v] for v in variables),
            options=tuple(options),
        )


def parse(text: str) -> SystemSpec:
    """Parse a system description; raises :class:`DslError` with positioned
    diagnostics on any problem."""
    return _Parser(text).parse_system()


def pretty_print(spec: SystemSpec) -> str:
    """Canonical text form; parsing it back yields a structurally equal spec."""
    lines = [f"universe {spec.universe.carrier}"]
    if spec.constants:
        lines.append("")
        for name, value in spec.constants:
            lines.append(f"const {name} = {value}")
    lines.append("")
    for name, init in zip(spec.variables, spec.initials):
        lines.append(f"state {name} = {init}")
    lines.append("")
    for name, rule in zip(spec.variables, spec.rules):
        lines.append(f"rule {name} = {expr_to_text(rule, spec.variables)}")
    if spec.options:
        lines.append("")
        for key, value in spec.options:
            lines.append(f"option {key} = {value}")
    return "\n".join(lines) + "\n"


def _jsonify(obj):
    if hasattr(obj, "to_json_dict"):
        return _jsonify(obj.to_json_dict())
    if isinstance(obj, dict):
        return {str(k): _jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonify(v) for v in obj]
    if isinstance(obj, IntervalSet):
        return str(obj)
    if isinstance(obj, Fraction):
        return str(obj)
    return obj


def to_json(report) -> str:
    """Stable JSON rendering for analysis and trajectory reports."""
    return json.dumps(_jsonify(report), indent=2)
