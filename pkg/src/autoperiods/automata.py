"""Multi-track automata over base-k digit tuples.

Every automaton in this package reads digit words least-significant digit
first (LSD-first).  A tuple of naturals is encoded column-wise: letter j of
the word carries digit j of every component, and words may be extended at
the tail (the most significant end) with all-zero columns.  `pad_normalize`
closes acceptance under such padding, so tuple membership does not depend
on the encoding length.

`Dfa` transition tables are complete by construction: ``delta[q][i]`` is a
state id for every state ``q`` and letter index ``i``.  Letters are ordered
lexicographically, hence index 0 is always the all-zero column.

All types are immutable; the operations below are pure functions and safe
to call from multiple threads.
"""

from __future__ import annotations

import itertools
from collections import deque
from dataclasses import dataclass, replace


class AutomatonError(ValueError):
    """Invalid automaton structure or incompatible operands."""


_BOOL_OPS = {
    "and": lambda x, y: x and y,
    "or": lambda x, y: x or y,
    "xor": lambda x, y: x != y,
    "implies": lambda x, y: (not x) or y,
}


@dataclass(frozen=True)
class TrackAlphabet:
    """Alphabet of ``arity``-tuples of digits in ``[0, base)``."""

    base: int
    arity: int

    def __post_init__(self) -> None:
        if self.base < 2:
            raise AutomatonError(f"base must be >= 2, got {self.base}")
        if self.arity < 0:
            raise AutomatonError(f"arity must be >= 0, got {self.arity}")

    @property
    def size(self) -> int:
        return self.base**self.arity

    def letters(self) -> list[tuple[int, ...]]:
        """All letters in lexicographic order (index order)."""
        return list(itertools.product(range(self.base), repeat=self.arity))

    def index(self, letter: tuple[int, ...]) -> int:
        if len(letter) != self.arity:
            raise AutomatonError(f"letter {letter} has wrong arity, expected {self.arity}")
        i = 0
        for d in letter:
            if not 0 <= d < self.base:
                raise AutomatonError(f"digit {d} out of range for base {self.base}")
            i = i * self.base + d
        return i

    def letter(self, index: int) -> tuple[int, ...]:
        digits = []
        for _ in range(self.arity):
            index, d = divmod(index, self.base)
            digits.append(d)
        return tuple(reversed(digits))


def _check_tracks(track_names: tuple[str, ...]) -> None:
    if len(set(track_names)) != len(track_names):
        raise AutomatonError(f"duplicate track names: {track_names}")


@dataclass(frozen=True)
class Dfa:
    """Complete deterministic automaton over multi-track digit letters."""

    base: int
    track_names: tuple[str, ...]
    start: int
    accept: frozenset[int]
    delta: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "track_names", tuple(self.track_names))
        object.__setattr__(self, "accept", frozenset(self.accept))
        object.__setattr__(self, "delta", tuple(tuple(row) for row in self.delta))
        _check_tracks(self.track_names)
        n = len(self.delta)
        if n == 0:
            raise AutomatonError("automaton must have at least one state")
        if not 0 <= self.start < n:
            raise AutomatonError(f"start state {self.start} out of range")
        if not all(0 <= q < n for q in self.accept):
            raise AutomatonError("accepting state out of range")
        size = self.alphabet.size
        for q, row in enumerate(self.delta):
            if len(row) != size:
                raise AutomatonError(f"state {q}: expected {size} transitions, got {len(row)}")
            if not all(0 <= t < n for t in row):
                raise AutomatonError(f"state {q}: transition target out of range")

    @property
    def arity(self) -> int:
        return len(self.track_names)

    @property
    def alphabet(self) -> TrackAlphabet:
        return TrackAlphabet(self.base, len(self.track_names))

    @property
    def n_states(self) -> int:
        return len(self.delta)

    def step_word(self, columns: list[tuple[int, ...]] | tuple[tuple[int, ...], ...]) -> int:
        """State reached from the start state on a column word."""
        alphabet = self.alphabet
        q = self.start
        for col in columns:
            q = self.delta[q][alphabet.index(col)]
        return q

    def accepts_word(self, columns) -> bool:
        return self.step_word(columns) in self.accept

    def run(self, values) -> bool:
        return run(self, values)


@dataclass(frozen=True)
class Nfa:
    """Nondeterministic counterpart of `Dfa`; produced by projection/reversal."""

    base: int
    track_names: tuple[str, ...]
    starts: frozenset[int]
    accept: frozenset[int]
    delta: tuple[tuple[frozenset[int], ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "track_names", tuple(self.track_names))
        object.__setattr__(self, "starts", frozenset(self.starts))
        object.__setattr__(self, "accept", frozenset(self.accept))
        object.__setattr__(
            self, "delta", tuple(tuple(frozenset(s) for s in row) for row in self.delta)
        )
        _check_tracks(self.track_names)
        n = len(self.delta)
        if n == 0:
            raise AutomatonError("automaton must have at least one state")
        size = self.alphabet.size
        refs = set(self.starts) | set(self.accept)
        for row in self.delta:
            if len(row) != size:
                raise AutomatonError("transition row has wrong width")
            for s in row:
                refs |= s
        if refs and not all(0 <= q < n for q in refs):
            raise AutomatonError("referenced state out of range")

    @property
    def arity(self) -> int:
        return len(self.track_names)

    @property
    def alphabet(self) -> TrackAlphabet:
        return TrackAlphabet(self.base, len(self.track_names))

    @property
    def n_states(self) -> int:
        return len(self.delta)


@dataclass(frozen=True)
class Dfao:
    """Deterministic automaton with one output symbol per state (arity-1 input).

    Represents an automatic sequence: the value at n is the output of the
    state reached on n's LSD-first digits.  Zero-stability (reading extra
    padding zeros never changes the output) is required; use
    `check_zero_stable` after external construction.
    """

    base: int
    start: int
    outputs: tuple[int, ...]
    delta: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "outputs", tuple(self.outputs))
        object.__setattr__(self, "delta", tuple(tuple(row) for row in self.delta))
        n = len(self.delta)
        if n == 0 or len(self.outputs) != n:
            raise AutomatonError("outputs must match state count")
        if not 0 <= self.start < n:
            raise AutomatonError("start state out of range")
        if self.base < 2:
            raise AutomatonError("base must be >= 2")
        for q, row in enumerate(self.delta):
            if len(row) != self.base or not all(0 <= t < n for t in row):
                raise AutomatonError(f"state {q}: invalid transition row")

    @property
    def n_states(self) -> int:
        return len(self.delta)

    @property
    def output_alphabet(self) -> tuple[int, ...]:
        return tuple(sorted(set(self.outputs)))

    def evaluate(self, n: int) -> int:
        if n < 0:
            raise AutomatonError("sequence index must be a natural number")
        q = self.start
        while n:
            n, d = divmod(n, self.base)
            q = self.delta[q][d]
        return self.outputs[q]

    def reachable_states(self) -> list[int]:
        seen = {self.start}
        order = [self.start]
        for q in order:
            for t in self.delta[q]:
                if t not in seen:
                    seen.add(t)
                    order.append(t)
        return order


def check_zero_stable(d: Dfao) -> None:
    """Raise unless every reachable state keeps its output on digit 0."""
    for q in d.reachable_states():
        if d.outputs[d.delta[q][0]] != d.outputs[q]:
            raise AutomatonError(
                f"zero-stability violated at state {q}: "
                f"output {d.outputs[q]} changes to {d.outputs[d.delta[q][0]]} on digit 0"
            )


# ---------------------------------------------------------------------------
# encoding helpers (the public encode/decode API lives in `numeration`)


def _digit_length(value: int, base: int) -> int:
    n = 0
    while value:
        value //= base
        n += 1
    return n


def _columns(values: tuple[int, ...], base: int, length: int) -> list[tuple[int, ...]]:
    cols = []
    for j in range(length):
        p = base**j
        cols.append(tuple((v // p) % base for v in values))
    return cols


def run(a: Dfa, values) -> bool:
    """Membership of a tuple of naturals (minimal-length LSD encoding)."""
    if isinstance(values, int):
        values = (values,)
    values = tuple(values)
    if len(values) != a.arity:
        raise AutomatonError(f"expected {a.arity} values, got {len(values)}")
    if any(v < 0 for v in values):
        raise AutomatonError("values must be natural numbers")
    length = max((_digit_length(v, a.base) for v in values), default=0)
    return a.accepts_word(_columns(values, a.base, length))


# ---------------------------------------------------------------------------
# core operations


def pad_normalize(a):
    """Close acceptance under trailing all-zero columns (zero-closure).

    A state becomes accepting iff an accepting state is reachable from it
    by reading only all-zero columns.  Works for both `Dfa` and `Nfa`.
    """
    if isinstance(a, Dfa):
        succ = [{a.delta[q][0]} for q in range(a.n_states)]
    elif isinstance(a, Nfa):
        succ = [set(a.delta[q][0]) for q in range(a.n_states)]
    else:
        raise AutomatonError(f"cannot pad-normalize {type(a).__name__}")
    rev: list[set[int]] = [set() for _ in range(a.n_states)]
    for q, targets in enumerate(succ):
        for t in targets:
            rev[t].add(q)
    closed = set(a.accept)
    queue = deque(closed)
    while queue:
        t = queue.popleft()
        for q in rev[t]:
            if q not in closed:
                closed.add(q)
                queue.append(q)
    return replace(a, accept=frozenset(closed))


def complement(a: Dfa) -> Dfa:
    """Flip acceptance, then pad-normalize."""
    flipped = replace(a, accept=frozenset(range(a.n_states)) - a.accept)
    return pad_normalize(flipped)


def cylindrify(a: Dfa, new_tracks) -> Dfa:
    """Extend `a` to a superset of tracks; the new tracks are ignored."""
    new_tracks = tuple(new_tracks)
    _check_tracks(new_tracks)
    if not set(a.track_names) <= set(new_tracks):
        missing = set(a.track_names) - set(new_tracks)
        raise AutomatonError(f"unknown track ordering: {sorted(missing)} not in {new_tracks}")
    if new_tracks == a.track_names:
        return a
    positions = [new_tracks.index(t) for t in a.track_names]
    old_alpha = a.alphabet
    new_alpha = TrackAlphabet(a.base, len(new_tracks))
    proj = [
        old_alpha.index(tuple(letter[p] for p in positions))
        for letter in new_alpha.letters()
    ]
    delta = tuple(tuple(row[i] for i in proj) for row in a.delta)
    return Dfa(a.base, new_tracks, a.start, a.accept, delta)


def product(a: Dfa, b: Dfa, op: str) -> Dfa:
    """Boolean combination of two automata; tracks are aligned by name.

    The result ranges over the union of both track sets in sorted order and
    accepts a word iff ``op`` holds of the operands' verdicts on it.
    """
    if op not in _BOOL_OPS:
        raise AutomatonError(f"unknown boolean connective {op!r}")
    if a.base != b.base:
        raise AutomatonError("incompatible numeration base")
    fn = _BOOL_OPS[op]
    tracks = tuple(sorted(set(a.track_names) | set(b.track_names)))
    a = cylindrify(a, tracks)
    b = cylindrify(b, tracks)
    size = a.alphabet.size
    index = {(a.start, b.start): 0}
    pairs = [(a.start, b.start)]
    delta = []
    for qa, qb in pairs:
        row = []
        for x in range(size):
            t = (a.delta[qa][x], b.delta[qb][x])
            i = index.get(t)
            if i is None:
                i = index[t] = len(pairs)
                pairs.append(t)
            row.append(i)
        delta.append(tuple(row))
    accept = frozenset(
        i for i, (qa, qb) in enumerate(pairs) if fn(qa in a.accept, qb in b.accept)
    )
    return Dfa(a.base, tracks, 0, accept, tuple(delta))


def determinize(n: Nfa) -> Dfa:
    """Subset construction; the result is complete (empty subset = sink)."""
    size = n.alphabet.size
    start = frozenset(n.starts)
    index: dict[frozenset[int], int] = {start: 0}
    subsets = [start]
    delta = []
    for subset in subsets:
        row = []
        for x in range(size):
            target = frozenset(t for q in subset for t in n.delta[q][x])
            i = index.get(target)
            if i is None:
                i = index[target] = len(subsets)
                subsets.append(target)
            row.append(i)
        delta.append(tuple(row))
    accept = frozenset(i for i, s in enumerate(subsets) if s & n.accept)
    return Dfa(n.base, n.track_names, 0, accept, tuple(delta))


def minimize(a: Dfa) -> Dfa:
    """Minimal complete DFA for the same word language.

    States of the result are renumbered canonically: breadth-first from the
    start state with letters in lexicographic order, so equal languages give
    structurally identical automata.
    """
    size = a.alphabet.size
    # restrict to reachable states
    order = [a.start]
    seen = {a.start}
    for q in order:
        for t in a.delta[q]:
            if t not in seen:
                seen.add(t)
                order.append(t)
    remap = {q: i for i, q in enumerate(order)}
    delta = [tuple(remap[a.delta[q][x]] for x in range(size)) for q in order]
    accepting = [q in a.accept for q in order]
    n = len(order)
    # Moore partition refinement
    cls = [1 if acc else 0 for acc in accepting]
    n_classes = len(set(cls))
    while True:
        sigs: dict[tuple, int] = {}
        new = [0] * n
        for q in range(n):
            sig = (cls[q], tuple(cls[t] for t in delta[q]))
            i = sigs.get(sig)
            if i is None:
                i = sigs[sig] = len(sigs)
            new[q] = i
        if len(sigs) == n_classes:
            break
        cls = new
        n_classes = len(sigs)
    # quotient, then canonical BFS numbering
    rep: dict[int, int] = {}
    for q in range(n):
        rep.setdefault(cls[q], q)
    bfs = [cls[0]]
    pos = {cls[0]: 0}
    rows = []
    for c in bfs:
        q = rep[c]
        row = []
        for x in range(size):
            tc = cls[delta[q][x]]
            i = pos.get(tc)
            if i is None:
                i = pos[tc] = len(bfs)
                bfs.append(tc)
            row.append(i)
        rows.append(tuple(row))
    accept = frozenset(pos[cls[q]] for q in range(n) if accepting[q])
    return Dfa(a.base, a.track_names, 0, accept, tuple(rows))


def retrack(a: Dfa, new_names) -> Dfa:
    """Rename tracks positionally (same arity, same transition structure)."""
    new_names = tuple(new_names)
    if len(new_names) != a.arity:
        raise AutomatonError(f"expected {a.arity} track names, got {len(new_names)}")
    return replace(a, track_names=new_names)


def sort_tracks(a: Dfa) -> Dfa:
    """Permute tracks into sorted name order (language on tuples unchanged)."""
    target = tuple(sorted(a.track_names))
    return a if target == a.track_names else cylindrify(a, target)


def project(a: Dfa, track: str) -> Nfa:
    """Erase one track (existential quantification); returns an NFA.

    Acceptance is widened by zero-closure on the remaining tracks: a state
    accepts if an accepting state is reachable via columns that are zero on
    every remaining track (the erased digits are unconstrained), which
    covers witnesses needing more digits than the surviving tuple.  Callers
    pipe the result through `determinize`, `pad_normalize`, `minimize`.
    """
    if track not in a.track_names:
        raise AutomatonError(f"unknown track {track!r}")
    pos = a.track_names.index(track)
    rem = tuple(t for t in a.track_names if t != track)
    k = a.base
    old_alpha = a.alphabet
    rem_alpha = TrackAlphabet(k, len(rem))
    # letter indices of full columns grouped by their restriction to `rem`
    groups: list[list[int]] = []
    for rem_letter in rem_alpha.letters():
        full = []
        for d in range(k):
            col = rem_letter[:pos] + (d,) + rem_letter[pos:]
            full.append(old_alpha.index(col))
        groups.append(full)
    delta = tuple(
        tuple(frozenset(a.delta[q][x] for x in group) for group in groups)
        for q in range(a.n_states)
    )
    # zero-closure: columns zero on remaining tracks, any digit on `track`
    zero_group = groups[0]
    rev: list[set[int]] = [set() for _ in range(a.n_states)]
    for q in range(a.n_states):
        for x in zero_group:
            rev[a.delta[q][x]].add(q)
    closed = set(a.accept)
    queue = deque(closed)
    while queue:
        t = queue.popleft()
        for q in rev[t]:
            if q not in closed:
                closed.add(q)
                queue.append(q)
    return Nfa(k, rem, frozenset({a.start}), frozenset(closed), delta)


def equivalent(a: Dfa, b: Dfa) -> bool:
    """Word-language equality, via canonical minimized forms."""
    if a.base != b.base:
        raise AutomatonError("incompatible numeration base")
    if a.track_names != b.track_names:
        raise AutomatonError(f"track mismatch: {a.track_names} vs {b.track_names}")
    return minimize(a) == minimize(b)


def is_empty(a: Dfa) -> bool:
    """True iff no accepting state is reachable."""
    seen = {a.start}
    queue = deque([a.start])
    while queue:
        q = queue.popleft()
        if q in a.accept:
            return False
        for t in a.delta[q]:
            if t not in seen:
                seen.add(t)
                queue.append(t)
    return True


def is_universal(a: Dfa) -> bool:
    return is_empty(complement(a))


def is_infinite(a: Dfa) -> bool:
    """True iff an arity-1, pad-normalized automaton accepts infinitely many integers.

    Decided on the language of words ending in a nonzero digit: pair each
    state with a flag for "last digit read was nonzero", trim to reachable
    and co-accessible nodes, and look for any cycle.
    """
    if a.arity != 1:
        raise AutomatonError("is_infinite requires an arity-1 automaton")
    k = a.base
    nodes = [(q, f) for q in range(a.n_states) for f in (False, True)]
    succ = {
        (q, f): [((a.delta[q][d], d != 0)) for d in range(k)]
        for q, f in nodes
    }
    start = (a.start, False)
    reach = {start}
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in succ[u]:
            if v not in reach:
                reach.add(v)
                queue.append(v)
    goal = {(q, True) for q in a.accept}
    pred: dict[tuple[int, bool], set[tuple[int, bool]]] = {u: set() for u in nodes}
    for u in nodes:
        for v in succ[u]:
            pred[v].add(u)
    co = set(goal)
    queue = deque(goal)
    while queue:
        u = queue.popleft()
        for v in pred[u]:
            if v not in co:
                co.add(v)
                queue.append(v)
    trimmed = reach & co
    # Kahn's algorithm: leftover nodes participate in a cycle
    indeg = {u: 0 for u in trimmed}
    for u in trimmed:
        for v in succ[u]:
            if v in trimmed:
                indeg[v] += 1
    queue = deque(u for u in trimmed if indeg[u] == 0)
    removed = 0
    while queue:
        u = queue.popleft()
        removed += 1
        for v in succ[u]:
            if v in trimmed:
                indeg[v] -= 1
                if indeg[v] == 0:
                    queue.append(v)
    return removed < len(trimmed)


def universal_automaton(base: int, track_names) -> Dfa:
    """Accepts every word (hence every tuple)."""
    alpha = TrackAlphabet(base, len(tuple(track_names)))
    return Dfa(base, tuple(track_names), 0, frozenset({0}), ((0,) * alpha.size,))


def empty_automaton(base: int, track_names) -> Dfa:
    """Accepts nothing."""
    alpha = TrackAlphabet(base, len(tuple(track_names)))
    return Dfa(base, tuple(track_names), 0, frozenset(), ((0,) * alpha.size,))


def truth_automaton(value: bool, base: int) -> Dfa:
    """Arity-0 sentence automaton whose start-state acceptance is `value`."""
    return universal_automaton(base, ()) if value else empty_automaton(base, ())
