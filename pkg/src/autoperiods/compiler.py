"""Compilation of predicates into multi-track automata.

Atoms map to the primitive relation automata from `numeration` (equality,
order, addition, constants) and to lockstep products of sequence DFAOs;
connectives map to boolean products, negation to complementation, and
existential quantifiers to track projection followed by determinization.
Universals go through the dual of projection.

Every step re-establishes the package invariants: pad-normalized, tracks
in sorted order, and (by default) minimized.  The result for a formula
with free variables v1 < ... < vr is a Dfa over exactly those tracks
accepting its satisfying assignments; a sentence compiles to an arity-0
automaton whose start-state acceptance is its truth value.
"""

from __future__ import annotations

import operator
from dataclasses import dataclass, field
from typing import Mapping

from .automata import (
    Dfa,
    Dfao,
    complement,
    determinize,
    empty_automaton,
    minimize,
    pad_normalize,
    product,
    project,
    retrack,
    sort_tracks,
    truth_automaton,
    universal_automaton,
)
from .numeration import add_automaton, const_automaton, eq_automaton, leq_automaton, lt_automaton
from .predicates import (
    And,
    Cmp,
    Const,
    Exists,
    Forall,
    Formula,
    Implies,
    Not,
    Or,
    SeqCmp,
    SeqConst,
    Sum,
    Var,
    all_names,
    eliminate_difference,
    flatten_terms,
    fresh_namer,
    parse,
)

_CMP_PY = {
    "=": operator.eq,
    "!=": operator.ne,
    "<": operator.lt,
    "<=": operator.le,
    ">": operator.gt,
    ">=": operator.ge,
}


class CompileError(ValueError):
    """Unbound names, base mismatches, or malformed input formulas."""


@dataclass(frozen=True)
class CompileEnv:
    """Binding of sequence names to DFAOs, all over one numeration base."""

    sequences: Mapping[str, Dfao] = field(default_factory=dict)
    base: int | None = None

    def __post_init__(self) -> None:
        bases = {d.base for d in self.sequences.values()}
        if self.base is not None:
            bases.add(self.base)
        if len(bases) > 1:
            raise CompileError(f"incompatible numeration base: {sorted(bases)}")

    @property
    def resolved_base(self) -> int:
        if self.base is not None:
            return self.base
        for d in self.sequences.values():
            return d.base
        raise CompileError("a numeration base is required (no sequences bound)")

    def dfao(self, name: str) -> Dfao:
        try:
            return self.sequences[name]
        except KeyError:
            raise CompileError(f"unbound sequence name {name!r}") from None


@dataclass
class CompileStats:
    """Size bookkeeping across compiler steps (intermediate automata)."""

    max_intermediate: int = 0
    max_minimized: int = 0
    steps: int = 0

    def observe(self, raw: int, minimized: int | None) -> None:
        self.steps += 1
        self.max_intermediate = max(self.max_intermediate, raw)
        if minimized is not None:
            self.max_minimized = max(self.max_minimized, minimized)


def seq_atom_automaton(s1: Dfao, var1: str, op: str, s2: Dfao, var2: str) -> Dfa:
    """Automaton for ``s1[var1] op s2[var2]`` with op in {=, !=}.

    Both DFAOs run in lockstep, each on its own track (or on a single
    shared track when ``var1 == var2``); acceptance compares the two
    current outputs.  Zero-stability of the DFAOs makes the result closed
    under padding.
    """
    if op not in ("=", "!="):
        raise CompileError(f"sequence comparison must be = or !=, got {op!r}")
    if s1.base != s2.base:
        raise CompileError("incompatible numeration base")
    base = s1.base
    want_equal = op == "="
    if var1 == var2:
        if s1 == s2:
            make = universal_automaton if want_equal else empty_automaton
            return make(base, (var1,))
        letter_pairs = [(d, d) for d in range(base)]
        tracks = (var1,)
    else:
        letter_pairs = [(d1, d2) for d1 in range(base) for d2 in range(base)]
        tracks = (var1, var2)
    index = {(s1.start, s2.start): 0}
    pairs = [(s1.start, s2.start)]
    delta = []
    for q1, q2 in pairs:
        row = []
        for d1, d2 in letter_pairs:
            t = (s1.delta[q1][d1], s2.delta[q2][d2])
            i = index.get(t)
            if i is None:
                i = index[t] = len(pairs)
                pairs.append(t)
            row.append(i)
        delta.append(tuple(row))
    accept = frozenset(
        i
        for i, (q1, q2) in enumerate(pairs)
        if (s1.outputs[q1] == s2.outputs[q2]) == want_equal
    )
    return pad_normalize(Dfa(base, tracks, 0, accept, tuple(delta)))


class _Compiler:
    def __init__(self, env: CompileEnv, minimize_eagerly: bool, stats: CompileStats | None):
        self.env = env
        self.base = env.resolved_base
        self.eager = minimize_eagerly
        self.stats = stats
        self.fresh = None  # set once the formula's names are known

    def norm(self, a: Dfa) -> Dfa:
        a = sort_tracks(pad_normalize(a))
        raw = a.n_states
        if self.eager:
            a = minimize(a)
        if self.stats is not None:
            self.stats.observe(raw, a.n_states if self.eager else None)
        return a

    def exists(self, a: Dfa, var: str) -> Dfa:
        if var not in a.track_names:
            return a
        return self.norm(determinize(project(a, var)))

    def compile(self, f: Formula) -> Dfa:
        return self.norm(self.dispatch(f))

    def dispatch(self, f: Formula) -> Dfa:
        if isinstance(f, Cmp):
            return self.compile_cmp(f)
        if isinstance(f, SeqCmp):
            if not isinstance(f.idx_left, Var) or not isinstance(f.idx_right, Var):
                raise CompileError("sequence index is not a plain variable; "
                                   "run flatten_terms first")
            return seq_atom_automaton(
                self.env.dfao(f.seq_left), f.idx_left.name, f.op,
                self.env.dfao(f.seq_right), f.idx_right.name,
            )
        if isinstance(f, SeqConst):
            if not isinstance(f.idx, Var):
                raise CompileError("sequence index is not a plain variable; "
                                   "run flatten_terms first")
            d = self.env.dfao(f.seq)
            accept = frozenset(q for q in range(d.n_states) if d.outputs[q] == f.value)
            return pad_normalize(Dfa(d.base, (f.idx.name,), d.start, accept, d.delta))
        if isinstance(f, Not):
            return complement(self.compile(f.body))
        if isinstance(f, (And, Or, Implies)):
            op = {And: "and", Or: "or", Implies: "implies"}[type(f)]
            return product(self.compile(f.left), self.compile(f.right), op)
        if isinstance(f, Exists):
            return self.exists(self.compile(f.body), f.var)
        if isinstance(f, Forall):
            # dual of projection: ~ E var ~ body
            negated = complement(self.compile(f.body))
            return complement(self.exists(self.norm(negated), f.var))
        raise CompileError(f"cannot compile node {type(f).__name__}")

    # -- comparison atoms ---------------------------------------------------

    def compile_cmp(self, f: Cmp) -> Dfa:
        left, op, right = f.left, f.op, f.right
        if isinstance(left, Sum) or isinstance(right, Sum):
            if op == "=" and isinstance(left, Sum) and not isinstance(right, Sum):
                return self.compile_sum_eq(left, right)
            if op == "=" and isinstance(right, Sum) and not isinstance(left, Sum):
                return self.compile_sum_eq(right, left)
            u = next(self.fresh)
            if isinstance(left, Sum):
                rewritten = Exists(u, And(Cmp(left, "=", Var(u)), Cmp(Var(u), op, right)))
            else:
                rewritten = Exists(u, And(Cmp(right, "=", Var(u)), Cmp(left, op, Var(u))))
            return self.compile(rewritten)
        if isinstance(left, Const) and isinstance(right, Const):
            return truth_automaton(_CMP_PY[op](left.value, right.value), self.base)
        if isinstance(left, Var) and isinstance(right, Var):
            if left.name == right.name:
                make = universal_automaton if op in ("=", "<=", ">=") else empty_automaton
                return make(self.base, (left.name,))
            return self.var_var(left.name, op, right.name)
        # one variable, one constant
        if isinstance(left, Var):
            var, const, flipped = left.name, right.value, False
        else:
            var, const, flipped = right.name, left.value, True
        if op == "=":
            return retrack(const_automaton(const, self.base), (var,))
        if op == "!=":
            return complement(retrack(const_automaton(const, self.base), (var,)))
        if flipped:
            op = {"<": ">", "<=": ">=", ">": "<", ">=": "<="}[op]
        u = next(self.fresh)
        rewritten = Exists(u, And(Cmp(Var(u), "=", Const(const)),
                                  Cmp(Var(var), op, Var(u))))
        return self.compile(rewritten)

    def var_var(self, a: str, op: str, b: str) -> Dfa:
        if op == "=":
            return retrack(eq_automaton(self.base), (a, b))
        if op == "!=":
            return complement(retrack(eq_automaton(self.base), (a, b)))
        if op == "<":
            return retrack(lt_automaton(self.base), (a, b))
        if op == "<=":
            return retrack(leq_automaton(self.base), (a, b))
        if op == ">":
            return retrack(lt_automaton(self.base), (b, a))
        if op == ">=":
            return retrack(leq_automaton(self.base), (b, a))
        raise CompileError(f"unknown comparison {op!r}")

    def compile_sum_eq(self, s: Sum, rhs) -> Dfa:
        """x + y = z with constant or repeated operands normalized away."""
        terms = [s.left, s.right, rhs]
        names: list[str] = []
        introduced: list[str] = []
        guards: list[Formula] = []
        seen: set[str] = set()
        for t in terms:
            if isinstance(t, Const):
                u = next(self.fresh)
                guards.append(Cmp(Var(u), "=", t))
                names.append(u)
                introduced.append(u)
            elif isinstance(t, Var):
                if t.name in seen:
                    u = next(self.fresh)
                    guards.append(Cmp(Var(u), "=", Var(t.name)))
                    names.append(u)
                    introduced.append(u)
                else:
                    seen.add(t.name)
                    names.append(t.name)
            else:
                raise CompileError("sum operands must be variables or constants; "
                                   "run flatten_terms first")
        result = self.norm(retrack(add_automaton(self.base), tuple(names)))
        for g in guards:
            result = self.norm(product(result, self.compile(g), "and"))
        for u in introduced:
            result = self.exists(result, u)
        return result


def compile_formula(
    f: Formula | str,
    env: CompileEnv | None = None,
    *,
    base: int | None = None,
    minimize_eagerly: bool = True,
    stats: CompileStats | None = None,
) -> Dfa:
    """Compile a formula (or predicate text) into a minimal, pad-normalized Dfa.

    Difference elimination and term flattening are applied first, so any
    parsed formula is accepted.  With ``minimize_eagerly=False`` only the
    final result is minimized, which lets callers observe intermediate
    automaton growth.
    """
    if isinstance(f, str):
        f = parse(f)
    if env is None:
        env = CompileEnv(base=base)
    elif base is not None and env.base is not None and base != env.base:
        raise CompileError("incompatible numeration base")
    elif base is not None and env.base is None:
        env = CompileEnv(env.sequences, base)
    f = flatten_terms(eliminate_difference(f))
    c = _Compiler(env, minimize_eagerly, stats)
    c.fresh = fresh_namer(all_names(f), "c")
    result = c.compile(f)
    if not minimize_eagerly:
        result = minimize(result)
        if stats is not None:
            stats.observe(result.n_states, result.n_states)
    return result
