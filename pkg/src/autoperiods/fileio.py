"""Text serialization for automata, and DOT export.

All three formats share the same shape: a versioned header line, ``key
value`` header fields, then one line per state (or per edge for NFAs).
Lines may be blank or start with ``#``.  States are referenced by their
integer ids; transition targets appear in lexicographic letter order.

DFAO files::

    dfao 1
    base 2
    start 0
    states 2
    0 0 0 1          # <state> <output> <target per digit 0..k-1>
    1 1 1 0

DFA files::

    dfa 1
    base 2
    tracks n i j     # bare "tracks" for arity 0
    start 0
    accept 0 2       # bare "accept" for none
    states 3
    0 0 1 ...        # <state> <target per letter 0..k^r-1>

NFA files use the same header with a ``start`` list, followed by edge
lines ``<state> <letter-index> <target>``.
"""

from __future__ import annotations

from collections import defaultdict

from .automata import Dfa, Dfao, Nfa, check_zero_stable

FORMAT_VERSION = 1


class FormatError(ValueError):
    """Malformed automaton file."""


def _content_lines(text: str) -> list[tuple[int, str]]:
    out = []
    for i, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            out.append((i, line))
    return out


class _Reader:
    def __init__(self, text: str, kind: str):
        self.lines = _content_lines(text)
        self.pos = 0
        self.kind = kind

    def error(self, lineno: int, msg: str):
        raise FormatError(f"line {lineno}: {msg}")

    def next(self) -> tuple[int, str]:
        if self.pos >= len(self.lines):
            raise FormatError(f"unexpected end of {self.kind} file")
        item = self.lines[self.pos]
        self.pos += 1
        return item

    def expect_key(self, key: str) -> list[str]:
        lineno, line = self.next()
        parts = line.split()
        if parts[0] != key:
            self.error(lineno, f"expected {key!r}, got {parts[0]!r}")
        return parts[1:]

    def ints(self, key: str) -> list[int]:
        parts = self.expect_key(key)
        try:
            return [int(p) for p in parts]
        except ValueError:
            raise FormatError(f"non-integer value in {key!r} line")

    def int1(self, key: str) -> int:
        vals = self.ints(key)
        if len(vals) != 1:
            raise FormatError(f"{key!r} line must carry exactly one integer")
        return vals[0]


def _check_header(reader: _Reader, kind: str) -> None:
    lineno, line = reader.next()
    parts = line.split()
    if parts[0] != kind:
        reader.error(lineno, f"expected {kind!r} header, got {parts[0]!r}")
    if len(parts) != 2 or parts[1] != str(FORMAT_VERSION):
        reader.error(lineno, f"unsupported {kind} format version")


# ---------------------------------------------------------------------------
# DFAO


def save_dfao(d: Dfao) -> str:
    lines = [f"dfao {FORMAT_VERSION}", f"base {d.base}", f"start {d.start}",
             f"states {d.n_states}"]
    for q in range(d.n_states):
        targets = " ".join(str(t) for t in d.delta[q])
        lines.append(f"{q} {d.outputs[q]} {targets}")
    return "\n".join(lines) + "\n"


def load_dfao(text: str) -> Dfao:
    reader = _Reader(text, "dfao")
    _check_header(reader, "dfao")
    base = reader.int1("base")
    start = reader.int1("start")
    n = reader.int1("states")
    outputs = [0] * n
    delta: list[tuple[int, ...] | None] = [None] * n
    for _ in range(n):
        lineno, line = reader.next()
        try:
            vals = [int(p) for p in line.split()]
        except ValueError:
            reader.error(lineno, "non-integer field in state line")
        if len(vals) != 2 + base:
            reader.error(lineno, f"state line needs {2 + base} fields, got {len(vals)}")
        q = vals[0]
        if not 0 <= q < n or delta[q] is not None:
            reader.error(lineno, f"bad or duplicate state id {q}")
        outputs[q] = vals[1]
        delta[q] = tuple(vals[2:])
    try:
        d = Dfao(base, start, tuple(outputs), tuple(delta))  # type: ignore[arg-type]
    except ValueError as exc:
        raise FormatError(str(exc))
    check_zero_stable(d)
    return d


# ---------------------------------------------------------------------------
# DFA


def save_dfa(a: Dfa) -> str:
    lines = [
        f"dfa {FORMAT_VERSION}",
        f"base {a.base}",
        ("tracks " + " ".join(a.track_names)).rstrip(),
        f"start {a.start}",
        ("accept " + " ".join(str(q) for q in sorted(a.accept))).rstrip(),
        f"states {a.n_states}",
    ]
    for q in range(a.n_states):
        lines.append(f"{q} " + " ".join(str(t) for t in a.delta[q]))
    return "\n".join(lines) + "\n"


def load_dfa(text: str) -> Dfa:
    reader = _Reader(text, "dfa")
    _check_header(reader, "dfa")
    base = reader.int1("base")
    tracks = tuple(reader.expect_key("tracks"))
    start = reader.int1("start")
    accept = frozenset(reader.ints("accept"))
    n = reader.int1("states")
    width = base ** len(tracks)
    delta: list[tuple[int, ...] | None] = [None] * n
    for _ in range(n):
        lineno, line = reader.next()
        try:
            vals = [int(p) for p in line.split()]
        except ValueError:
            reader.error(lineno, "non-integer field in state line")
        if len(vals) != 1 + width:
            reader.error(lineno, f"state line needs {1 + width} fields, got {len(vals)}")
        q = vals[0]
        if not 0 <= q < n or delta[q] is not None:
            reader.error(lineno, f"bad or duplicate state id {q}")
        delta[q] = tuple(vals[1:])
    try:
        return Dfa(base, tracks, start, accept, tuple(delta))  # type: ignore[arg-type]
    except ValueError as exc:
        raise FormatError(str(exc))


# ---------------------------------------------------------------------------
# NFA


def save_nfa(a: Nfa) -> str:
    lines = [
        f"nfa {FORMAT_VERSION}",
        f"base {a.base}",
        ("tracks " + " ".join(a.track_names)).rstrip(),
        ("start " + " ".join(str(q) for q in sorted(a.starts))).rstrip(),
        ("accept " + " ".join(str(q) for q in sorted(a.accept))).rstrip(),
        f"states {a.n_states}",
    ]
    for q in range(a.n_states):
        for x, targets in enumerate(a.delta[q]):
            for t in sorted(targets):
                lines.append(f"{q} {x} {t}")
    return "\n".join(lines) + "\n"


def load_nfa(text: str) -> Nfa:
    reader = _Reader(text, "nfa")
    _check_header(reader, "nfa")
    base = reader.int1("base")
    tracks = tuple(reader.expect_key("tracks"))
    starts = frozenset(reader.ints("start"))
    accept = frozenset(reader.ints("accept"))
    n = reader.int1("states")
    width = base ** len(tracks)
    delta = [[set() for _ in range(width)] for _ in range(n)]
    while reader.pos < len(reader.lines):
        lineno, line = reader.next()
        parts = line.split()
        if len(parts) != 3:
            reader.error(lineno, "edge line needs 3 fields: state letter-index target")
        try:
            q, x, t = (int(p) for p in parts)
        except ValueError:
            reader.error(lineno, "non-integer field in edge line")
        if not (0 <= q < n and 0 <= x < width and 0 <= t < n):
            reader.error(lineno, "edge field out of range")
        delta[q][x].add(t)
    try:
        return Nfa(base, tracks, starts, accept,
                   tuple(tuple(frozenset(s) for s in row) for row in delta))
    except ValueError as exc:
        raise FormatError(str(exc))


# ---------------------------------------------------------------------------
# DOT export


def _fmt_letter(letter: tuple[int, ...]) -> str:
    if not letter:
        return "()"
    if len(letter) == 1:
        return str(letter[0])
    return "(" + ",".join(str(d) for d in letter) + ")"


def _dot_edges(base: int, arity: int, delta, lines: list[str]) -> None:
    from .automata import TrackAlphabet

    letters = TrackAlphabet(base, arity).letters()
    for q, row in enumerate(delta):
        grouped: dict[int, list[str]] = defaultdict(list)
        for x, t in enumerate(row):
            grouped[t].append(_fmt_letter(letters[x]))
        for t in sorted(grouped):
            label = ",".join(grouped[t])
            lines.append(f'  {q} -> {t} [label="{label}"];')


def dfa_to_dot(a: Dfa, name: str = "dfa") -> str:
    lines = [f"digraph {name} {{", "  rankdir=LR;", '  __start [shape=none, label=""];']
    for q in range(a.n_states):
        shape = "doublecircle" if q in a.accept else "circle"
        lines.append(f'  {q} [shape={shape}, label="{q}"];')
    lines.append(f"  __start -> {a.start};")
    _dot_edges(a.base, a.arity, a.delta, lines)
    lines.append("}")
    return "\n".join(lines) + "\n"


def dfao_to_dot(d: Dfao, name: str = "dfao") -> str:
    lines = [f"digraph {name} {{", "  rankdir=LR;", '  __start [shape=none, label=""];']
    for q in range(d.n_states):
        lines.append(f'  {q} [shape=circle, label="{q}/{d.outputs[q]}"];')
    lines.append(f"  __start -> {d.start};")
    _dot_edges(d.base, 1, d.delta, lines)
    lines.append("}")
    return "\n".join(lines) + "\n"
