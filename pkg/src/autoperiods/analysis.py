"""Exact density analytics for arity-1 automata.

The letter-count matrix M of a complete automaton (row sums = base) is
turned into the row-stochastic S = M/base, and the Cesaro limit
C = lim (1/N) sum S^n is computed exactly over rationals: stationary
distributions of the terminal strongly connected classes plus absorption
probabilities from the transient states.  On a pad-normalized automaton
the accepting mass of the start row is then exactly the density of the
accepted integer set.

No floating point is used anywhere in this module.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import gcd

from .automata import AutomatonError, Dfa, complement, is_infinite
from .sequences import accepts_range


def count_matrix(a: Dfa) -> list[list[int]]:
    """M[i][j] = number of letters moving state i to state j."""
    if a.arity != 1:
        raise AutomatonError("count_matrix requires an arity-1 automaton")
    n = a.n_states
    m = [[0] * n for _ in range(n)]
    for q in range(n):
        for t in a.delta[q]:
            m[q][t] += 1
    return m


def _solve(a: list[list[Fraction]], b: list[Fraction]) -> list[Fraction]:
    """Exact Gaussian elimination; raises on a singular system."""
    n = len(a)
    m = [row[:] + [b[i]] for i, row in enumerate(a)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if m[r][col] != 0), None)
        if pivot is None:
            raise AutomatonError("singular linear system in density computation")
        m[col], m[pivot] = m[pivot], m[col]
        inv = m[col][col]
        m[col] = [v / inv for v in m[col]]
        for r in range(n):
            if r != col and m[r][col] != 0:
                factor = m[r][col]
                m[r] = [v - factor * w for v, w in zip(m[r], m[col])]
    return [m[i][n] for i in range(n)]


def _sccs(succ: list[set[int]]) -> list[list[int]]:
    """Strongly connected components (Kosaraju, iterative)."""
    n = len(succ)
    order: list[int] = []
    seen = [False] * n
    for root in range(n):
        if seen[root]:
            continue
        stack = [(root, iter(succ[root]))]
        seen[root] = True
        while stack:
            node, it = stack[-1]
            advanced = False
            for t in it:
                if not seen[t]:
                    seen[t] = True
                    stack.append((t, iter(succ[t])))
                    advanced = True
                    break
            if not advanced:
                order.append(node)
                stack.pop()
    pred: list[set[int]] = [set() for _ in range(n)]
    for q, targets in enumerate(succ):
        for t in targets:
            pred[t].add(q)
    comp = [-1] * n
    comps: list[list[int]] = []
    for node in reversed(order):
        if comp[node] != -1:
            continue
        cid = len(comps)
        members = [node]
        comp[node] = cid
        queue = [node]
        while queue:
            u = queue.pop()
            for v in pred[u]:
                if comp[v] == -1:
                    comp[v] = cid
                    members.append(v)
                    queue.append(v)
        comps.append(sorted(members))
    return comps


def _class_period(members: list[int], succ: list[set[int]]) -> int:
    inside = set(members)
    level = {members[0]: 0}
    queue = [members[0]]
    while queue:
        u = queue.pop(0)
        for v in succ[u]:
            if v in inside and v not in level:
                level[v] = level[u] + 1
                queue.append(v)
    g = 0
    for u in members:
        for v in succ[u]:
            if v in inside:
                g = gcd(g, abs(level[u] + 1 - level[v]))
    return g


@dataclass(frozen=True)
class LimitResult:
    """Exact Cesaro limit of S^n with structural side information."""

    cesaro: tuple[tuple[Fraction, ...], ...]
    recurrent_classes: tuple[tuple[int, ...], ...]
    aperiodic: tuple[bool, ...]
    rank_one: bool

    @property
    def all_aperiodic(self) -> bool:
        return all(self.aperiodic)


def limit_matrix(m: list[list[int]], base: int) -> LimitResult:
    """Cesaro limit of (M/base)^n, exactly.

    Terminal strongly connected classes get their unique stationary
    distribution (pi S = pi, sum pi = 1); transient states contribute via
    absorption probabilities.  When every recurrent class is aperiodic the
    plain limit of S^n exists and equals the Cesaro limit.
    """
    n = len(m)
    for row in m:
        if len(row) != n or sum(row) != base:
            raise AutomatonError(f"count matrix rows must sum to the base ({base})")
    s = [[Fraction(v, base) for v in row] for row in m]
    succ = [{j for j, v in enumerate(row) if v} for row in m]
    comps = _sccs(succ)
    terminal = [
        members
        for members in comps
        if all(t in set(members) for q in members for t in succ[q])
    ]
    stationary: list[dict[int, Fraction]] = []
    for members in terminal:
        k = len(members)
        # pi S = pi and sum pi = 1; the last balance equation is redundant
        a = [[s[members[i]][members[j]] - (1 if i == j else 0) for i in range(k)]
             for j in range(k)]
        b = [Fraction(0)] * k
        a[k - 1] = [Fraction(1)] * k
        b[k - 1] = Fraction(1)
        pi = _solve(a, b)
        stationary.append({members[i]: pi[i] for i in range(k)})
    recurrent = {q for members in terminal for q in members}
    transient = [q for q in range(n) if q not in recurrent]
    # absorption probabilities from each transient state into each class
    absorb: dict[int, list[Fraction]] = {}
    if transient:
        t_index = {q: i for i, q in enumerate(transient)}
        k = len(transient)
        a = [[(1 if i == j else 0) - s[transient[i]][transient[j]] for j in range(k)]
             for i in range(k)]
        a = [[Fraction(v) for v in row] for row in a]
        for ci, members in enumerate(terminal):
            inside = set(members)
            b = [sum((s[q][t] for t in succ[q] if t in inside), Fraction(0))
                 for q in transient]
            x = _solve([row[:] for row in a], b)
            for q in transient:
                absorb.setdefault(q, [Fraction(0)] * len(terminal))
                absorb[q][ci] = x[t_index[q]]
    cesaro = [[Fraction(0)] * n for _ in range(n)]
    for ci, members in enumerate(terminal):
        for q in members:
            for j, mass in stationary[ci].items():
                cesaro[q][j] = mass
    for q in transient:
        for ci in range(len(terminal)):
            weight = absorb[q][ci]
            if weight:
                for j, mass in stationary[ci].items():
                    cesaro[q][j] += weight * mass
    aperiodic = tuple(_class_period(members, succ) == 1 for members in terminal)
    rows = {tuple(row) for row in cesaro}
    return LimitResult(
        cesaro=tuple(tuple(row) for row in cesaro),
        recurrent_classes=tuple(tuple(members) for members in terminal),
        aperiodic=aperiodic,
        rank_one=len(rows) == 1,
    )


def _format_fraction(f: Fraction) -> str:
    return f"{f.numerator}/{f.denominator}"


@dataclass(frozen=True)
class DensityReport:
    """Exact density facts about the accepted integer set."""

    cesaro_density: Fraction
    natural_density_exists: bool
    stationary_row: tuple[Fraction, ...]
    least_omitted: int | None
    complement_infinite: bool
    rank_one: bool

    def to_text(self) -> str:
        lines = [
            f"cesaro_density: {_format_fraction(self.cesaro_density)}",
            f"natural_density_exists: {str(self.natural_density_exists).lower()}",
            f"rank_one_limit: {str(self.rank_one).lower()}",
            f"least_omitted: {self.least_omitted if self.least_omitted is not None else 'none'}",
            f"complement_infinite: {str(self.complement_infinite).lower()}",
            "stationary_row: " + " ".join(_format_fraction(f) for f in self.stationary_row),
        ]
        return "\n".join(lines) + "\n"

    def to_json_dict(self) -> dict:
        return {
            "cesaro_density": [self.cesaro_density.numerator, self.cesaro_density.denominator],
            "natural_density_exists": self.natural_density_exists,
            "rank_one_limit": self.rank_one,
            "least_omitted": self.least_omitted,
            "complement_infinite": self.complement_infinite,
            "stationary_row": [[f.numerator, f.denominator] for f in self.stationary_row],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n"


def least_omitted(a: Dfa, bound: int) -> int | None:
    """Smallest integer in [1, bound] the automaton rejects, else None."""
    if a.arity != 1:
        raise AutomatonError("least_omitted requires an arity-1 automaton")
    accepted = accepts_range(a, bound + 1)
    for n in range(1, bound + 1):
        if not accepted[n]:
            return n
    return None


def density(a: Dfa, omitted_bound: int = 2**16) -> DensityReport:
    """Full density report for a pad-normalized arity-1 automaton.

    Pad-normalization matters: it makes the fraction of accepted length-n
    words equal to the fraction of accepted integers below base**n, which
    is what ties the matrix limit to the natural density.
    """
    if a.arity != 1:
        raise AutomatonError("density requires an arity-1 automaton")
    limit = limit_matrix(count_matrix(a), a.base)
    row = limit.cesaro[a.start]
    cesaro = sum((row[q] for q in a.accept), Fraction(0))
    # natural density exists when every class reachable from start is aperiodic
    reach = {a.start}
    queue = [a.start]
    while queue:
        q = queue.pop()
        for t in a.delta[q]:
            if t not in reach:
                reach.add(t)
                queue.append(t)
    natural = all(
        ap
        for members, ap in zip(limit.recurrent_classes, limit.aperiodic)
        if reach & set(members)
    )
    return DensityReport(
        cesaro_density=cesaro,
        natural_density_exists=natural,
        stationary_row=row,
        least_omitted=least_omitted(a, omitted_bound),
        complement_infinite=is_infinite(complement(a)),
        rank_one=limit.rank_one,
    )


def accepting_mass_split(a: Dfa) -> tuple[tuple[Fraction, ...], tuple[Fraction, ...]]:
    """Start-row limit masses grouped by acceptance (sorted multisets)."""
    if a.arity != 1:
        raise AutomatonError("accepting_mass_split requires an arity-1 automaton")
    limit = limit_matrix(count_matrix(a), a.base)
    row = limit.cesaro[a.start]
    accepting = sorted(row[q] for q in range(a.n_states) if q in a.accept)
    rejecting = sorted(row[q] for q in range(a.n_states) if q not in a.accept)
    return tuple(accepting), tuple(rejecting)
