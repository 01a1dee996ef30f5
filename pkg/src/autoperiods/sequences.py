"""Built-in automatic sequences, DFAO synthesis, and the factor oracle.

A sequence is described by a `SequenceOracle` (a pure index-to-symbol
function with a documented definition).  `synthesize_dfao` turns an oracle
into a DFAO by discovering the subsequences n -> x(base**e * n + r)
breadth-first, merging those that agree on a long probe, and verifying the
result against the oracle afterwards.

`factor_least_periods` is the independent ground truth used to validate
the automaton pipeline: it computes, by direct comparison of a long
prefix, which integers occur as the least period of some factor.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cache
from typing import Callable

import numpy as np

from .automata import AutomatonError, Dfa, Dfao, check_zero_stable
from .fileio import load_dfao, save_dfao  # re-exported: shared text format

__all__ = [
    "SequenceOracle",
    "thue_morse_oracle",
    "rudin_shapiro_oracle",
    "period_doubling_oracle",
    "paperfolding_oracle",
    "thue_morse",
    "rudin_shapiro",
    "period_doubling",
    "paperfolding",
    "synthesize_dfao",
    "factor_least_periods",
    "evaluate_range",
    "accepts_range",
    "builtin_names",
    "get_builtin_oracle",
    "get_builtin_dfao",
    "load_dfao",
    "save_dfao",
]


@dataclass(frozen=True)
class SequenceOracle:
    """A pure function from naturals to output symbols, with its definition.

    ``fn_range``, when given, must return ``numpy.ndarray`` of the first
    ``count`` values; it only exists to make verification sweeps fast.
    """

    name: str
    base: int
    fn: Callable[[int], int]
    definition: str
    fn_range: Callable[[int], np.ndarray] | None = None

    def __call__(self, n: int) -> int:
        return self.fn(n)

    def values(self, count: int) -> np.ndarray:
        if self.fn_range is not None:
            return np.asarray(self.fn_range(count), dtype=np.int64)
        return np.fromiter((self.fn(n) for n in range(count)), dtype=np.int64, count=count)


# ---------------------------------------------------------------------------
# built-in oracles


def _parity_of_popcount(v: np.ndarray) -> np.ndarray:
    v = v.astype(np.uint64)
    for shift in (32, 16, 8, 4, 2, 1):
        v = v ^ (v >> np.uint64(shift))
    return (v & np.uint64(1)).astype(np.int64)


def _tm(n: int) -> int:
    return bin(n).count("1") & 1


def _rs(n: int) -> int:
    return (n & (n >> 1)).bit_count() & 1


def _pd(n: int) -> int:
    return _tm(n) ^ _tm(n + 1)


_PF_PREFIX = ["0"]


def _pf_prefix(length: int) -> str:
    # unfold w -> w 0 reverse(complement(w)); doubles the length each step
    w = _PF_PREFIX[0]
    while len(w) < length:
        w = w + "0" + "".join("1" if c == "0" else "0" for c in reversed(w))
        _PF_PREFIX[0] = w
    return w


def _pf(n: int) -> int:
    return int(_pf_prefix(n + 1)[n])


def _tm_range(count: int) -> np.ndarray:
    return _parity_of_popcount(np.arange(count, dtype=np.uint64))


def _rs_range(count: int) -> np.ndarray:
    n = np.arange(count, dtype=np.uint64)
    return _parity_of_popcount(n & (n >> np.uint64(1)))


def _pd_range(count: int) -> np.ndarray:
    t = _tm_range(count + 1)
    return t[:-1] ^ t[1:]


def _pf_range(count: int) -> np.ndarray:
    w = _pf_prefix(count)
    return np.frombuffer(w[:count].encode(), dtype=np.uint8).astype(np.int64) - ord("0")


thue_morse_oracle = SequenceOracle(
    "thue-morse", 2, _tm,
    "t[n] = sum of the binary digits of n, mod 2", _tm_range,
)
rudin_shapiro_oracle = SequenceOracle(
    "rudin-shapiro", 2, _rs,
    "r[n] = number of (possibly overlapping) 11 blocks in binary n, mod 2", _rs_range,
)
period_doubling_oracle = SequenceOracle(
    "period-doubling", 2, _pd,
    "d[n] = 1 if t[n] != t[n+1] else 0, with t the bit-count parity sequence", _pd_range,
)
paperfolding_oracle = SequenceOracle(
    "paperfolding", 2, _pf,
    "limit of w -> w 0 reverse(complement(w)) starting from 0", _pf_range,
)


# ---------------------------------------------------------------------------
# built-in DFAOs


@cache
def thue_morse() -> Dfao:
    """2-state DFAO; bit-count parity is reading-order invariant."""
    d = Dfao(base=2, start=0, outputs=(0, 1), delta=((0, 1), (1, 0)))
    check_zero_stable(d)
    return d


@cache
def rudin_shapiro() -> Dfao:
    """4-state DFAO tracking (pair parity, previous digit).

    The number of adjacent 1-1 digit pairs does not depend on reading
    order, so the LSD automaton matches the usual MSD definition.
    """
    # state 2*parity + prev_digit
    delta = []
    outputs = []
    for parity in (0, 1):
        for prev in (0, 1):
            row = tuple(2 * (parity ^ (prev & d)) + d for d in (0, 1))
            delta.append(row)
            outputs.append(parity)
    d = Dfao(base=2, start=0, outputs=tuple(outputs), delta=tuple(delta))
    check_zero_stable(d)
    return d


@cache
def period_doubling() -> Dfao:
    return synthesize_dfao(period_doubling_oracle)


@cache
def paperfolding() -> Dfao:
    return synthesize_dfao(paperfolding_oracle)


_BUILTINS: dict[str, tuple[SequenceOracle, Callable[[], Dfao]]] = {
    "thue-morse": (thue_morse_oracle, thue_morse),
    "rudin-shapiro": (rudin_shapiro_oracle, rudin_shapiro),
    "period-doubling": (period_doubling_oracle, period_doubling),
    "paperfolding": (paperfolding_oracle, paperfolding),
}


def _normalize_name(name: str) -> str:
    return name.strip().lower().replace("_", "-")


def builtin_names() -> list[str]:
    return list(_BUILTINS)


def get_builtin_oracle(name: str) -> SequenceOracle:
    key = _normalize_name(name)
    if key not in _BUILTINS:
        raise KeyError(f"unknown built-in sequence {name!r}; choose from {builtin_names()}")
    return _BUILTINS[key][0]


def get_builtin_dfao(name: str) -> Dfao:
    key = _normalize_name(name)
    if key not in _BUILTINS:
        raise KeyError(f"unknown built-in sequence {name!r}; choose from {builtin_names()}")
    return _BUILTINS[key][1]()


# ---------------------------------------------------------------------------
# vectorized sweeps


def evaluate_range(d: Dfao, count: int) -> np.ndarray:
    """Outputs d[0..count-1] as an array (vectorized state walk)."""
    if count <= 0:
        return np.zeros(0, dtype=np.int64)
    delta = np.asarray(d.delta, dtype=np.int64)
    outputs = np.asarray(d.outputs, dtype=np.int64)
    states = np.full(count, d.start, dtype=np.int64)
    remaining = np.arange(count, dtype=np.int64)
    while remaining.max() > 0:
        digits = remaining % d.base
        states = delta[states, digits]
        remaining //= d.base
    return outputs[states]


def accepts_range(a: Dfa, count: int) -> np.ndarray:
    """Membership of 0..count-1 in an arity-1, pad-normalized automaton."""
    if a.arity != 1:
        raise AutomatonError("accepts_range requires an arity-1 automaton")
    if count <= 0:
        return np.zeros(0, dtype=bool)
    delta = np.asarray(a.delta, dtype=np.int64)
    accept = np.zeros(a.n_states, dtype=bool)
    accept[list(a.accept)] = True
    states = np.full(count, a.start, dtype=np.int64)
    remaining = np.arange(count, dtype=np.int64)
    while remaining.max() > 0:
        digits = remaining % a.base
        states = delta[states, digits]
        remaining //= a.base
    return accept[states]


# ---------------------------------------------------------------------------
# DFAO synthesis from the kernel of subsequences


def synthesize_dfao(
    oracle: SequenceOracle,
    base: int | None = None,
    probe_len: int = 2**14,
    verify_len: int = 2**20,
    max_states: int = 1024,
) -> Dfao:
    """Build a DFAO for an oracle via its kernel of subsequences.

    States are the subsequences n -> x(base**e * n + r), discovered
    breadth-first; two are merged iff their first ``probe_len`` terms
    agree.  The transition on digit d maps (e, r) to (e+1, r + d*base**e),
    so reading digit 0 keeps the output fixed (zero-stability holds by
    construction).  The result is verified against the oracle on
    ``[0, verify_len)``; a mismatch raises, signalling that ``probe_len``
    merged two genuinely distinct subsequences.
    """
    if base is None:
        base = oracle.base
    if base != oracle.base:
        raise AutomatonError(f"oracle is base-{oracle.base}, requested base-{base}")
    if probe_len < 2**14:
        raise AutomatonError("probe_len must be at least 2**14")
    if verify_len < 4 * probe_len:
        raise AutomatonError("verify_len must be at least 4 * probe_len")

    values = oracle.values(verify_len)

    def probe(e: int, r: int) -> tuple[int, ...]:
        stride = base**e
        top = stride * (probe_len - 1) + r + 1
        if top > 1 << 28:
            raise AutomatonError(
                "kernel exploration exceeded its index budget; "
                f"the sequence may not be base-{base} automatic"
            )
        nonlocal values
        if top > len(values):
            values = oracle.values(top)
        return tuple(values[r:top:stride])

    sig_to_id: dict[tuple[int, ...], int] = {}
    outputs: list[int] = []
    rows: list[list[int]] = []
    pending: list[tuple[int, int]] = []

    def intern(e: int, r: int) -> int:
        sig = probe(e, r)
        sid = sig_to_id.get(sig)
        if sid is None:
            sid = sig_to_id[sig] = len(outputs)
            outputs.append(int(sig[0]))
            rows.append([])
            pending.append((e, r))
            if len(outputs) > max_states:
                raise AutomatonError(
                    f"kernel did not close within {max_states} states; "
                    f"the sequence may not be base-{base} automatic"
                )
        return sid

    intern(0, 0)
    i = 0
    while i < len(pending):
        e, r = pending[i]
        sid = i
        i += 1
        for d in range(base):
            rows[sid].append(intern(e + 1, r + d * base**e))

    dfao = Dfao(base, 0, tuple(outputs), tuple(tuple(row) for row in rows))
    check_zero_stable(dfao)

    got = evaluate_range(dfao, verify_len)
    expected = values[:verify_len]
    bad = np.nonzero(got != expected)[0]
    if bad.size:
        n = int(bad[0])
        raise AutomatonError(
            f"kernel probe length insufficient: synthesized automaton disagrees with "
            f"the sequence at n={n}; retry with a larger probe_len"
        )
    return dfao


# ---------------------------------------------------------------------------
# least periods of factors, by direct prefix scan


def factor_least_periods(
    oracle: SequenceOracle,
    prefix_len: int,
    max_n: int,
    min_extra: int = 0,
) -> set[int]:
    """Least periods realized by factors of the length-``prefix_len`` prefix.

    Returns the set of p <= max_n such that some factor w with
    ``len(w) >= p + min_extra`` has least period exactly p.  With
    min_extra=0 (no length requirement beyond nonemptiness) this is the
    plain least-period set; positive values demand witnesses strictly
    longer than their period by that margin.

    For each start i, ``ext[i]`` below is the longest m such that the
    window starting at i of length m has period p (runs of a[t] == a[t+p]
    plus the trivial p positions).  A window of length m has least period
    exactly p iff m <= ext_p and m exceeds every smaller period's extent,
    so p is realized iff some i has ext_p(i) >= max(best_smaller(i) + 1,
    p + min_extra).
    """
    if min_extra < 0:
        raise AutomatonError("min_extra must be >= 0")
    if prefix_len <= max_n + min_extra:
        raise AutomatonError("prefix_len must exceed max_n + min_extra")
    a = oracle.values(prefix_len)
    n = prefix_len
    cap = n - np.arange(n, dtype=np.int64)
    best_smaller = np.zeros(n, dtype=np.int64)
    realized: set[int] = set()
    for p in range(1, max_n + 1):
        eq = a[:-p] == a[p:]
        m = eq.shape[0]
        false_at = np.where(eq, m, np.arange(m, dtype=np.int64))
        next_false = np.minimum.accumulate(false_at[::-1])[::-1]
        run = next_false - np.arange(m, dtype=np.int64)
        ext = np.minimum(p + np.concatenate([run, np.zeros(p, dtype=np.int64)]), cap)
        need = np.maximum(best_smaller + 1, p + min_extra)
        if bool(np.any(ext >= need)):
            realized.add(p)
        np.maximum(best_smaller, ext, out=best_smaller)
    return realized
