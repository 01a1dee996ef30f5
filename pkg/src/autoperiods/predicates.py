"""Predicate language: AST, parser, and the compilation-preparing rewrites.

Concrete syntax (see the README for examples)::

    formula     := QUANT formula | implication
    implication := disjunction [ "=>" formula ]          (right associative)
    disjunction := conjunction { "|" conjunction }
    conjunction := negation { "&" negation }
    negation    := "~" negation | "(" formula ")" | atom
    atom        := operand CMP operand
    operand     := NAME "[" term "]" | term
    term        := factor { ("+" | "-") factor }
    factor      := NAME | NUMBER
    CMP         := "=" | "!=" | "<" | "<=" | ">" | ">="
    QUANT       := "A" or "E" glued to a variable name, e.g. "At", "En"

Quantifiers scope as far right as possible.  Variables range over the
naturals.  Names starting with an underscore are reserved for internally
generated variables.  A bound variable may not shadow an enclosing binding
and may not also occur free elsewhere in the formula.

Sequence-indexed operands may be compared only with "=" or "!=", and only
against another sequence operand or a numeric constant.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterator, Union

CMP_OPS = ("=", "!=", "<", "<=", ">", ">=")
SEQ_OPS = ("=", "!=")


# ---------------------------------------------------------------------------
# AST


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: int


@dataclass(frozen=True)
class Sum:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Diff:
    left: "Term"
    right: "Term"


Term = Union[Var, Const, Sum, Diff]


@dataclass(frozen=True)
class Cmp:
    left: Term
    op: str
    right: Term


@dataclass(frozen=True)
class SeqCmp:
    seq_left: str
    idx_left: Term
    op: str
    seq_right: str
    idx_right: Term


@dataclass(frozen=True)
class SeqConst:
    seq: str
    idx: Term
    value: int


@dataclass(frozen=True)
class Not:
    body: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    body: "Formula"


Formula = Union[Cmp, SeqCmp, SeqConst, Not, And, Or, Implies, Exists, Forall]

_CONNECTIVES = {And: And, Or: Or, Implies: Implies}


def term_vars(t: Term) -> set[str]:
    if isinstance(t, Var):
        return {t.name}
    if isinstance(t, Const):
        return set()
    return term_vars(t.left) | term_vars(t.right)


def free_vars(f: Formula) -> set[str]:
    if isinstance(f, Cmp):
        return term_vars(f.left) | term_vars(f.right)
    if isinstance(f, SeqCmp):
        return term_vars(f.idx_left) | term_vars(f.idx_right)
    if isinstance(f, SeqConst):
        return term_vars(f.idx)
    if isinstance(f, Not):
        return free_vars(f.body)
    if isinstance(f, (And, Or, Implies)):
        return free_vars(f.left) | free_vars(f.right)
    if isinstance(f, (Exists, Forall)):
        return free_vars(f.body) - {f.var}
    raise TypeError(f"not a formula: {f!r}")


def bound_vars(f: Formula) -> set[str]:
    if isinstance(f, (Cmp, SeqCmp, SeqConst)):
        return set()
    if isinstance(f, Not):
        return bound_vars(f.body)
    if isinstance(f, (And, Or, Implies)):
        return bound_vars(f.left) | bound_vars(f.right)
    if isinstance(f, (Exists, Forall)):
        return {f.var} | bound_vars(f.body)
    raise TypeError(f"not a formula: {f!r}")


def sequence_names(f: Formula) -> set[str]:
    if isinstance(f, Cmp):
        return set()
    if isinstance(f, SeqCmp):
        return {f.seq_left, f.seq_right}
    if isinstance(f, SeqConst):
        return {f.seq}
    if isinstance(f, Not):
        return sequence_names(f.body)
    if isinstance(f, (And, Or, Implies)):
        return sequence_names(f.left) | sequence_names(f.right)
    if isinstance(f, (Exists, Forall)):
        return sequence_names(f.body)
    raise TypeError(f"not a formula: {f!r}")


def all_names(f: Formula) -> set[str]:
    return free_vars(f) | bound_vars(f) | sequence_names(f)


def fresh_namer(used: set[str], stem: str) -> Iterator[str]:
    """Yields variable names ``_<stem>0, _<stem>1, ...`` avoiding `used`."""
    i = 0
    while True:
        name = f"_{stem}{i}"
        i += 1
        if name not in used:
            used.add(name)
            yield name


def rename_free(f: Formula, mapping: dict[str, str]) -> Formula:
    """Rename free variables; raises on capture by a binder."""
    if not mapping:
        return f
    if isinstance(f, Cmp):
        return Cmp(_rename_term(f.left, mapping), f.op, _rename_term(f.right, mapping))
    if isinstance(f, SeqCmp):
        return SeqCmp(f.seq_left, _rename_term(f.idx_left, mapping), f.op,
                      f.seq_right, _rename_term(f.idx_right, mapping))
    if isinstance(f, SeqConst):
        return SeqConst(f.seq, _rename_term(f.idx, mapping), f.value)
    if isinstance(f, Not):
        return Not(rename_free(f.body, mapping))
    if isinstance(f, (And, Or, Implies)):
        return type(f)(rename_free(f.left, mapping), rename_free(f.right, mapping))
    if isinstance(f, (Exists, Forall)):
        if f.var in mapping.values():
            raise ValueError(f"renaming would be captured by binder of {f.var!r}")
        inner = {k: v for k, v in mapping.items() if k != f.var}
        return type(f)(f.var, rename_free(f.body, inner))
    raise TypeError(f"not a formula: {f!r}")


def _rename_term(t: Term, mapping: dict[str, str]) -> Term:
    if isinstance(t, Var):
        return Var(mapping.get(t.name, t.name))
    if isinstance(t, Const):
        return t
    return type(t)(_rename_term(t.left, mapping), _rename_term(t.right, mapping))


def forall_as_not_exists(f: Formula) -> Formula:
    """Rewrite every universal quantifier to ~E~ (for equivalence checks)."""
    if isinstance(f, (Cmp, SeqCmp, SeqConst)):
        return f
    if isinstance(f, Not):
        return Not(forall_as_not_exists(f.body))
    if isinstance(f, (And, Or, Implies)):
        return type(f)(forall_as_not_exists(f.left), forall_as_not_exists(f.right))
    if isinstance(f, Exists):
        return Exists(f.var, forall_as_not_exists(f.body))
    if isinstance(f, Forall):
        return Not(Exists(f.var, Not(forall_as_not_exists(f.body))))
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# parser


class PredicateSyntaxError(ValueError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


@dataclass(frozen=True)
class _Token:
    kind: str  # NAME NUMBER OP END
    text: str
    line: int
    column: int


_TOKEN_RE = re.compile(
    r"(?P<ws>\s+)"
    r"|(?P<name>[A-Za-z_][A-Za-z0-9_]*)"
    r"|(?P<number>\d+)"
    r"|(?P<op>=>|<=|>=|!=|[=<>&|~+\-()\[\]])"
)

_QUANT_RE = re.compile(r"[AE][a-z][A-Za-z0-9_]*")


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise PredicateSyntaxError(f"unexpected character {text[pos]!r}", line, col)
        value = m.group()
        if m.lastgroup != "ws":
            kind = {"name": "NAME", "number": "NUMBER", "op": "OP"}[m.lastgroup]
            tokens.append(_Token(kind, value, line, col))
        newlines = value.count("\n")
        if newlines:
            line += newlines
            col = len(value) - value.rfind("\n")
        else:
            col += len(value)
        pos = m.end()
    tokens.append(_Token("END", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, tok: _Token, message: str):
        raise PredicateSyntaxError(message, tok.line, tok.column)

    def eat_op(self, text: str) -> _Token:
        tok = self.peek()
        if tok.kind != "OP" or tok.text != text:
            self.error(tok, f"expected {text!r}")
        return self.advance()

    # formula := QUANT formula | implication
    def formula(self, bound: frozenset[str]) -> Formula:
        tok = self.peek()
        if tok.kind == "NAME" and _QUANT_RE.fullmatch(tok.text):
            self.advance()
            var = tok.text[1:]
            if var in bound:
                self.error(tok, f"variable {var!r} is already bound (shadowing rejected)")
            body = self.formula(bound | {var})
            return (Forall if tok.text[0] == "A" else Exists)(var, body)
        return self.implication(bound)

    def implication(self, bound: frozenset[str]) -> Formula:
        left = self.disjunction(bound)
        if self.peek().kind == "OP" and self.peek().text == "=>":
            self.advance()
            return Implies(left, self.formula(bound))
        return left

    def disjunction(self, bound: frozenset[str]) -> Formula:
        left = self.conjunction(bound)
        while self.peek().kind == "OP" and self.peek().text == "|":
            self.advance()
            left = Or(left, self.conjunction(bound))
        return left

    def conjunction(self, bound: frozenset[str]) -> Formula:
        left = self.negation(bound)
        while self.peek().kind == "OP" and self.peek().text == "&":
            self.advance()
            left = And(left, self.negation(bound))
        return left

    def negation(self, bound: frozenset[str]) -> Formula:
        tok = self.peek()
        if tok.kind == "OP" and tok.text == "~":
            self.advance()
            return Not(self.negation(bound))
        if tok.kind == "OP" and tok.text == "(":
            self.advance()
            inner = self.formula(bound)
            self.eat_op(")")
            return inner
        return self.atom(bound)

    # operand: either (seq_name, index_term) or (None, term)
    def operand(self) -> tuple[str | None, Term]:
        tok = self.peek()
        if tok.kind == "NAME" and self.tokens[self.pos + 1].text == "[":
            self.advance()
            self.eat_op("[")
            idx = self.term()
            self.eat_op("]")
            return tok.text, idx
        return None, self.term()

    def atom(self, bound: frozenset[str]) -> Formula:
        seq_l, term_l = self.operand()
        tok = self.peek()
        if tok.kind != "OP" or tok.text not in CMP_OPS:
            self.error(tok, "expected a comparison operator")
        op = self.advance().text
        seq_r, term_r = self.operand()
        if seq_l is None and seq_r is None:
            return Cmp(term_l, op, term_r)
        if op not in SEQ_OPS:
            self.error(tok, f"sequence values support only = and !=, not {op!r}")
        if seq_l is not None and seq_r is not None:
            return SeqCmp(seq_l, term_l, op, seq_r, term_r)
        # one side is a sequence value, the other must be a constant symbol
        seq, idx = (seq_l, term_l) if seq_l is not None else (seq_r, term_r)
        other = term_r if seq_l is not None else term_l
        if not isinstance(other, Const):
            self.error(tok, "a sequence value can only be compared with a sequence "
                            "value or a numeric constant")
        atom = SeqConst(seq, idx, other.value)
        return atom if op == "=" else Not(atom)

    def term(self) -> Term:
        left = self.factor()
        while self.peek().kind == "OP" and self.peek().text in ("+", "-"):
            op = self.advance().text
            right = self.factor()
            left = Sum(left, right) if op == "+" else Diff(left, right)
        return left

    def factor(self) -> Term:
        tok = self.advance()
        if tok.kind == "NUMBER":
            return Const(int(tok.text))
        if tok.kind == "NAME":
            if tok.text.startswith("_"):
                self.error(tok, "names starting with '_' are reserved")
            return Var(tok.text)
        self.error(tok, f"expected a variable or number, got {tok.text!r}")


def parse(text: str) -> Formula:
    """Parse the predicate syntax; errors carry line and column."""
    parser = _Parser(text)
    result = parser.formula(frozenset())
    tok = parser.peek()
    if tok.kind != "END":
        parser.error(tok, f"unexpected trailing input {tok.text!r}")
    free = free_vars(result)
    bound = bound_vars(result)
    overlap = free & bound
    if overlap:
        raise PredicateSyntaxError(
            f"variables {sorted(overlap)} occur both free and bound", 1, 1
        )
    seqs = sequence_names(result)
    clash = seqs & (free | bound)
    if clash:
        raise PredicateSyntaxError(
            f"names {sorted(clash)} are used both as sequence and as variable", 1, 1
        )
    return result


# ---------------------------------------------------------------------------
# rewriting: subtraction elimination


def _pos_neg(t: Term) -> tuple[list[Term], list[Term]]:
    if isinstance(t, (Var, Const)):
        return [t], []
    if isinstance(t, Sum):
        lp, ln = _pos_neg(t.left)
        rp, rn = _pos_neg(t.right)
        return lp + rp, ln + rn
    if isinstance(t, Diff):
        lp, ln = _pos_neg(t.left)
        rp, rn = _pos_neg(t.right)
        return lp + rn, ln + rp
    raise TypeError(f"not a term: {t!r}")


def _rebuild_sum(parts: list[Term]) -> Term:
    if not parts:
        return Const(0)
    acc = parts[0]
    for p in parts[1:]:
        acc = Sum(acc, p)
    return acc


def eliminate_difference(f: Formula) -> Formula:
    """Remove subtraction while preserving the semantics over naturals.

    In comparisons, subtracted terms move to the other side (``t <= j - n``
    becomes ``t + n <= j``).  A subtraction inside a sequence index becomes
    a guarded existential (``x[j-n]`` turns into ``Eu (u + n = j & x[u])``),
    which makes the atom false whenever the index would be negative.
    """
    used = all_names(f)
    fresh = fresh_namer(used, "d")

    def fix_index(idx: Term, rebuild) -> Formula:
        pos, neg = _pos_neg(idx)
        if not neg:
            return rebuild(idx)
        u = next(fresh)
        guard = Cmp(_rebuild_sum([Var(u)] + neg), "=", _rebuild_sum(pos))
        return Exists(u, And(guard, rebuild(Var(u))))

    def walk(node: Formula) -> Formula:
        if isinstance(node, Cmp):
            lp, ln = _pos_neg(node.left)
            rp, rn = _pos_neg(node.right)
            if not ln and not rn:
                return node
            return Cmp(_rebuild_sum(lp + rn), node.op, _rebuild_sum(rp + ln))
        if isinstance(node, SeqConst):
            return fix_index(node.idx, lambda i: SeqConst(node.seq, i, node.value))
        if isinstance(node, SeqCmp):
            def inner(left_idx: Term) -> Formula:
                return fix_index(
                    node.idx_right,
                    lambda right_idx: SeqCmp(node.seq_left, left_idx, node.op,
                                             node.seq_right, right_idx),
                )
            return fix_index(node.idx_left, inner)
        if isinstance(node, Not):
            return Not(walk(node.body))
        if isinstance(node, (And, Or, Implies)):
            return type(node)(walk(node.left), walk(node.right))
        if isinstance(node, (Exists, Forall)):
            return type(node)(node.var, walk(node.body))
        raise TypeError(f"not a formula: {node!r}")

    return walk(f)


# ---------------------------------------------------------------------------
# rewriting: three-address flattening


def _is_simple(t: Term) -> bool:
    return isinstance(t, (Var, Const))


def _fold(t: Term) -> Term:
    """Constant-fold sums and drop + 0 (no reassociation otherwise)."""
    if isinstance(t, (Var, Const)):
        return t
    if isinstance(t, Sum):
        left, right = _fold(t.left), _fold(t.right)
        if isinstance(left, Const) and isinstance(right, Const):
            return Const(left.value + right.value)
        if isinstance(left, Const) and left.value == 0:
            return right
        if isinstance(right, Const) and right.value == 0:
            return left
        return Sum(left, right)
    raise TypeError(f"unexpected term in difference-free formula: {t!r}")


def flatten_terms(f: Formula) -> Formula:
    """Rewrite to three-address form.

    After flattening, every comparison operand is a variable, a constant,
    or a sum of two of those, and every sequence index is a plain variable;
    nested terms are  named by fresh existentials.
    """
    used = all_names(f)
    fresh = fresh_namer(used, "f")

    def to_simple(t: Term, guards: list[tuple[Term, str]]) -> Term:
        t = _fold(t)
        if _is_simple(t):
            return t
        left = to_simple(t.left, guards)
        right = to_simple(t.right, guards)
        u = next(fresh)
        guards.append((Sum(left, right), u))
        return Var(u)

    def shallow(t: Term, guards: list[tuple[Term, str]]) -> Term:
        t = _fold(t)
        if _is_simple(t):
            return t
        return Sum(to_simple(t.left, guards), to_simple(t.right, guards))

    def wrap(guards: list[tuple[Term, str]], core: Formula) -> Formula:
        for sum_term, u in reversed(guards):
            core = Exists(u, And(Cmp(sum_term, "=", Var(u)), core))
        return core

    def index_var(t: Term, guards: list[tuple[Term, str]]) -> Term:
        t = _fold(t)
        if isinstance(t, Var):
            return t
        simple = shallow(t, guards)
        u = next(fresh)
        guards.append((simple, u))
        return Var(u)

    def walk(node: Formula) -> Formula:
        if isinstance(node, Cmp):
            guards: list[tuple[Term, str]] = []
            left = shallow(node.left, guards)
            right = shallow(node.right, guards)
            return wrap(guards, Cmp(left, node.op, right))
        if isinstance(node, SeqConst):
            guards = []
            idx = index_var(node.idx, guards)
            return wrap(guards, SeqConst(node.seq, idx, node.value))
        if isinstance(node, SeqCmp):
            guards = []
            left = index_var(node.idx_left, guards)
            right = index_var(node.idx_right, guards)
            return wrap(guards, SeqCmp(node.seq_left, left, node.op,
                                       node.seq_right, right))
        if isinstance(node, Not):
            return Not(walk(node.body))
        if isinstance(node, (And, Or, Implies)):
            return type(node)(walk(node.left), walk(node.right))
        if isinstance(node, (Exists, Forall)):
            return type(node)(node.var, walk(node.body))
        raise TypeError(f"not a formula: {node!r}")

    return walk(f)
