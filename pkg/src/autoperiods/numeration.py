"""Base-k encoding and the primitive arithmetic relation automata.

Digit words are LSD-first columns over tuples of naturals; zero encodes as
the empty word.  The relation builders below (equality, order, addition,
constants) are the atoms from which the predicate compiler assembles
everything else.  They come out pad-normalized but not minimized.
"""

from __future__ import annotations

from dataclasses import dataclass

from .automata import (
    AutomatonError,
    Dfa,
    Nfa,
    determinize,
    minimize,
    pad_normalize,
)


@dataclass(frozen=True)
class DigitWord:
    """A column word: ``columns[j]`` holds digit j of every component."""

    base: int
    columns: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "columns", tuple(tuple(c) for c in self.columns))
        if self.base < 2:
            raise AutomatonError("base must be >= 2")
        arity = self.arity
        for col in self.columns:
            if len(col) != arity:
                raise AutomatonError("ragged column word")
            if not all(0 <= d < self.base for d in col):
                raise AutomatonError(f"digit out of range for base {self.base}")

    @property
    def arity(self) -> int:
        return len(self.columns[0]) if self.columns else 0

    def __len__(self) -> int:
        return len(self.columns)


def _digit_length(value: int, base: int) -> int:
    n = 0
    while value:
        value //= base
        n += 1
    return n


def encode(values, base: int, pad_to: int | None = None) -> DigitWord:
    """LSD-first column encoding of a tuple of naturals.

    ``pad_to`` extends the word with all-zero columns; it must be at least
    the minimal digit length of the largest component.
    """
    if isinstance(values, int):
        values = (values,)
    values = tuple(values)
    if any(v < 0 for v in values):
        raise AutomatonError("values must be natural numbers")
    minimal = max((_digit_length(v, base) for v in values), default=0)
    length = minimal if pad_to is None else pad_to
    if length < minimal:
        raise AutomatonError(f"pad_to={pad_to} is shorter than minimal length {minimal}")
    columns = tuple(
        tuple((v // base**j) % base for v in values) for j in range(length)
    )
    return DigitWord(base, columns)


def decode(word: DigitWord) -> tuple[int, ...]:
    """Inverse of `encode` for any padding length."""
    values = [0] * word.arity
    for j, col in enumerate(word.columns):
        p = word.base**j
        for i, d in enumerate(col):
            values[i] += d * p
    return tuple(values)


def eq_automaton(base: int) -> Dfa:
    """x = y, tracks ("x", "y")."""
    alpha_size = base * base
    ok, dead = 0, 1
    rows = [[dead] * alpha_size for _ in (ok, dead)]
    for a in range(base):
        rows[ok][a * base + a] = ok
    return pad_normalize(Dfa(base, ("x", "y"), ok, frozenset({ok}), tuple(map(tuple, rows))))


def _cmp_automaton(base: int, accept_states: frozenset[int]) -> Dfa:
    # state = relation of the values read so far; a later (more significant)
    # differing column overrides
    eq, lt, gt = 0, 1, 2
    rows = []
    for state in (eq, lt, gt):
        row = []
        for a in range(base):
            for b in range(base):
                row.append(state if a == b else (lt if a < b else gt))
        rows.append(tuple(row))
    return pad_normalize(Dfa(base, ("x", "y"), eq, accept_states, tuple(rows)))


def lt_automaton(base: int) -> Dfa:
    """x < y, tracks ("x", "y"); 3 states before minimization."""
    return _cmp_automaton(base, frozenset({1}))


def leq_automaton(base: int) -> Dfa:
    """x <= y, tracks ("x", "y")."""
    return _cmp_automaton(base, frozenset({0, 1}))


def add_automaton(base: int) -> Dfa:
    """x + y = z, tracks ("x", "y", "z"); states are the carry plus a sink."""
    carry0, carry1, dead = 0, 1, 2
    alpha_size = base**3
    rows = [[dead] * alpha_size for _ in range(3)]
    for carry in (0, 1):
        for a in range(base):
            for b in range(base):
                total = a + b + carry
                c = total % base
                idx = (a * base + b) * base + c
                rows[carry][idx] = total // base
    return pad_normalize(
        Dfa(base, ("x", "y", "z"), carry0, frozenset({carry0}), tuple(map(tuple, rows)))
    )


def const_automaton(value: int, base: int) -> Dfa:
    """Accepts exactly the (padded) encodings of one natural, track ("x",)."""
    if value < 0:
        raise AutomatonError("constant must be a natural number")
    digits = []
    v = value
    while v:
        v, d = divmod(v, base)
        digits.append(d)
    m = len(digits)
    dead = m + 1
    rows = []
    for i in range(m):
        row = [dead] * base
        row[digits[i]] = i + 1
        rows.append(tuple(row))
    final = [dead] * base
    final[0] = m
    rows.append(tuple(final))
    rows.append((dead,) * base)
    return pad_normalize(Dfa(base, ("x",), 0, frozenset({m}), tuple(rows)))


def reverse_to_msd(a: Dfa) -> Dfa:
    """Digit-reversed (MSD-first) minimal automaton for the same integer set.

    The input is zero-closed first, so the reversal is invariant under
    leading zeros; the output is the canonical minimal complete DFA.
    """
    if a.arity != 1:
        raise AutomatonError("reverse_to_msd requires an arity-1 automaton")
    a = pad_normalize(a)
    size = a.alphabet.size
    rev: list[list[set[int]]] = [[set() for _ in range(size)] for _ in range(a.n_states)]
    for q in range(a.n_states):
        for x in range(size):
            rev[a.delta[q][x]][x].add(q)
    nfa = Nfa(
        a.base,
        a.track_names,
        starts=a.accept,
        accept=frozenset({a.start}),
        delta=tuple(tuple(frozenset(s) for s in row) for row in rev),
    )
    return minimize(determinize(nfa))
