"""Least-period pipeline: factor periodicity, least periods, and the
automaton of all realized least periods.

Three predicates are compiled in sequence for a sequence DFAO bound to the
name ``x``:

* ``period_predicate``: n is a period of the factor x[i..j];
* ``least_period_predicate``: n is the *least* period of x[i..j], i.e. the
  period predicate holds and fails for every m with 1 <= m < n;
* ``least_period_automaton``: some factor of length >= n + slack has least
  period exactly n (track ``n`` only).

With ``length_slack=0`` (the default) the witness only needs length n, so
the result is the unrestricted set of least periods of nonempty factors:
any factor realizes its least period, and an unbordered factor of length n
realizes n itself.  Slack 1 and 2 demand strictly longer witnesses, which
thins the sets (a slack-2 witness for least period 1 is a cube, for
instance).

The smaller-period bound starts at 1 because periods are at least 1 by
definition; including 0 would make the trivial 0-shift kill every n >= 1.
Results are cross-validated against `sequences.factor_least_periods`.
"""

from __future__ import annotations

import hashlib
import json
import time
from dataclasses import dataclass
from pathlib import Path

from .automata import Dfa, Dfao, complement, equivalent, product, retrack, run
from .compiler import CompileEnv, CompileStats, compile_formula
from .fileio import load_dfa, save_dfa
from .numeration import const_automaton, reverse_to_msd
from .predicates import (
    And,
    Cmp,
    Const,
    Exists,
    Forall,
    Implies,
    Not,
    Sum,
    Var,
    parse,
    rename_free,
)
from .sequences import (
    SequenceOracle,
    accepts_range,
    factor_least_periods,
    get_builtin_dfao,
    get_builtin_oracle,
    save_dfao,
)

PERIOD_PREDICATE_TEXT = "At (i <= t & t + n <= j) => x[t] = x[t + n]"

_STAGES = ("period_relation", "least_period_relation", "least_period_set")


def _env(seq: Dfao) -> CompileEnv:
    return CompileEnv({"x": seq})


def period_predicate(seq: Dfao, *, minimize_eagerly: bool = True,
                     stats: CompileStats | None = None) -> Dfa:
    """Dfa over (i, j, n): n is a period of the factor x[i..j].

    Vacuously true when the factor is empty or shorter than n + 1.
    """
    return compile_formula(parse(PERIOD_PREDICATE_TEXT), _env(seq),
                           minimize_eagerly=minimize_eagerly, stats=stats)


def _least_period_formula(lp_style: str):
    p = parse(PERIOD_PREDICATE_TEXT)
    p_smaller = rename_free(p, {"n": "m"})
    bounds = And(Cmp(Const(1), "<=", Var("m")), Cmp(Var("m"), "<", Var("n")))
    if lp_style == "forall":
        no_smaller = Forall("m", Implies(bounds, Not(p_smaller)))
    elif lp_style == "not-exists":
        no_smaller = Not(Exists("m", And(bounds, p_smaller)))
    else:
        raise ValueError(f"lp_style must be 'forall' or 'not-exists', got {lp_style!r}")
    return And(p, no_smaller)


def least_period_predicate(seq: Dfao, *, lp_style: str = "forall",
                           minimize_eagerly: bool = True,
                           stats: CompileStats | None = None) -> Dfa:
    """Dfa over (i, j, n): n is the least period of the factor x[i..j]."""
    return compile_formula(_least_period_formula(lp_style), _env(seq),
                           minimize_eagerly=minimize_eagerly, stats=stats)


@dataclass(frozen=True)
class LeastPeriodAutomata:
    """The least-period set in both reading conventions (each minimal)."""

    lsd: Dfa
    msd: Dfa


def least_period_automaton(seq: Dfao, length_slack: int = 0, *,
                           lp_style: str = "forall",
                           minimize_eagerly: bool = True,
                           stats: CompileStats | None = None) -> LeastPeriodAutomata:
    """Dfa over (n): some factor of length >= n + slack has least period n.

    ``length_slack=0`` (default) poses no extra witness-length requirement
    beyond nonemptiness and yields the plain least-period set;  slack 1 and
    2 require witnesses strictly longer than the period by that margin.
    """
    if length_slack not in (0, 1, 2):
        raise ValueError(f"length_slack must be 0, 1 or 2, got {length_slack}")
    lp = _least_period_formula(lp_style)
    # factor x[i..j] has length >= n + slack  iff  i + n + slack <= j + 1
    length_bound = Cmp(Sum(Sum(Var("i"), Var("n")), Const(length_slack)),
                       "<=", Sum(Var("j"), Const(1)))
    formula = Exists("i", Exists("j", And(length_bound, lp)))
    lsd = compile_formula(formula, _env(seq),
                          minimize_eagerly=minimize_eagerly, stats=stats)
    return LeastPeriodAutomata(lsd=lsd, msd=reverse_to_msd(lsd))


@dataclass(frozen=True)
class OracleComparison:
    """Automaton set vs. the direct factor scan on [1, max_n]."""

    prefix_len: int
    max_n: int
    min_extra: int
    converged: bool
    missing: tuple[int, ...]  # in the oracle set but rejected by the automaton
    extra: tuple[int, ...]  # accepted by the automaton but not in the oracle set

    @property
    def matches(self) -> bool:
        return not self.missing and not self.extra


def compare_with_oracle(lsd: Dfa, oracle: SequenceOracle, *, prefix_len: int = 2**16,
                        max_n: int = 512, min_extra: int = 0) -> OracleComparison:
    """Check the automaton against the brute-force least-period scan.

    The scan is rerun at half the prefix length; if the two disagree the
    scan has not converged and the comparison is inconclusive.
    """
    full = factor_least_periods(oracle, prefix_len, max_n, min_extra)
    half = factor_least_periods(oracle, prefix_len // 2, max_n, min_extra)
    accepted = accepts_range(lsd, max_n + 1)
    automaton_set = {n for n in range(1, max_n + 1) if accepted[n]}
    return OracleComparison(
        prefix_len=prefix_len,
        max_n=max_n,
        min_extra=min_extra,
        converged=full == half,
        missing=tuple(sorted(full - automaton_set)),
        extra=tuple(sorted(automaton_set - full)),
    )


@dataclass(frozen=True)
class PipelineReport:
    """Sizes, timings, and headline facts for one pipeline run."""

    sequence: str
    base: int
    length_slack: int
    minimize_eagerly: bool
    stage_states: dict[str, int]
    stage_seconds: dict[str, float]
    largest_intermediate: int
    convention_states: dict[str, int]
    accepts_all_positive: bool
    accepts_zero: bool
    least_omitted: int | None
    cached: bool
    lsd: Dfa
    msd: Dfa
    period_relation: Dfa
    least_period_relation: Dfa
    oracle: OracleComparison | None = None

    def to_json_dict(self) -> dict:
        # wall times are intentionally excluded: the JSON report is part of
        # the deterministic output contract
        data = {
            "sequence": self.sequence,
            "base": self.base,
            "length_slack": self.length_slack,
            "minimize_eagerly": self.minimize_eagerly,
            "stage_states": dict(self.stage_states),
            "largest_intermediate": self.largest_intermediate,
            "convention_states": dict(self.convention_states),
            "accepts_all_positive": self.accepts_all_positive,
            "accepts_zero": self.accepts_zero,
            "least_omitted": self.least_omitted,
        }
        if self.oracle is not None:
            data["oracle_comparison"] = {
                "prefix_len": self.oracle.prefix_len,
                "max_n": self.oracle.max_n,
                "min_extra": self.oracle.min_extra,
                "converged": self.oracle.converged,
                "matches": self.oracle.matches,
                "missing": list(self.oracle.missing),
                "extra": list(self.oracle.extra),
            }
        return data

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), indent=2, sort_keys=True) + "\n"

    def to_text(self) -> str:
        lines = [
            f"sequence: {self.sequence} (base {self.base})",
            f"length_slack: {self.length_slack}",
            "stages:",
        ]
        for stage in _STAGES:
            states = self.stage_states.get(stage)
            seconds = self.stage_seconds.get(stage, 0.0)
            lines.append(f"  {stage}: {states} states ({seconds:.3f}s)")
        lines += [
            f"largest intermediate automaton: {self.largest_intermediate} states",
            f"states (LSD convention): {self.convention_states['lsd']}",
            f"states (MSD convention): {self.convention_states['msd']}",
            f"accepts every n >= 1: {str(self.accepts_all_positive).lower()}",
            f"accepts n = 0: {str(self.accepts_zero).lower()}",
            f"least omitted (scan): "
            f"{self.least_omitted if self.least_omitted is not None else 'none'}",
            f"from cache: {str(self.cached).lower()}",
        ]
        if self.oracle is not None:
            o = self.oracle
            status = ("not-converged" if not o.converged
                      else "match" if o.matches else "MISMATCH")
            lines.append(
                f"oracle comparison (prefix {o.prefix_len}, max_n {o.max_n}): {status}"
            )
            if o.missing:
                lines.append(f"  missing from automaton: {list(o.missing)}")
            if o.extra:
                lines.append(f"  extra in automaton: {list(o.extra)}")
        return "\n".join(lines) + "\n"


def _positive_track(base: int, track: str) -> Dfa:
    return retrack(complement(const_automaton(0, base)), (track,))


def resolve_sequence(seq) -> tuple[str, Dfao, SequenceOracle | None]:
    """Accepts a builtin name or a Dfao; returns (name, dfao, oracle?)."""
    if isinstance(seq, Dfao):
        return "custom", seq, None
    name = str(seq)
    dfao = get_builtin_dfao(name)
    return name.strip().lower().replace("_", "-"), dfao, get_builtin_oracle(name)


def _cache_key(seq: Dfao, length_slack: int, minimize_eagerly: bool, lp_style: str) -> str:
    payload = save_dfao(seq) + f"|slack={length_slack}|eager={minimize_eagerly}|lp={lp_style}"
    return hashlib.sha256(payload.encode()).hexdigest()[:24]


def run_pipeline(
    seq,
    length_slack: int = 0,
    *,
    lp_style: str = "forall",
    minimize_eagerly: bool = True,
    oracle: SequenceOracle | None = None,
    oracle_check: bool = False,
    oracle_prefix_len: int = 2**16,
    oracle_max_n: int = 512,
    cache_dir: str | Path | None = None,
    omitted_scan_bound: int = 4096,
) -> PipelineReport:
    """Full chain: period relation, least-period relation, least-period set.

    ``seq`` is a builtin sequence name or a `Dfao`.  With ``oracle_check``
    the result is compared against the brute-force factor scan (requires a
    builtin sequence or an explicit ``oracle``).
    """
    name, dfao, builtin_oracle = resolve_sequence(seq)
    oracle = oracle or builtin_oracle
    if oracle_check and oracle is None:
        raise ValueError("oracle_check requires a builtin sequence or an explicit oracle")

    key = _cache_key(dfao, length_slack, minimize_eagerly, lp_style)
    cache_path = Path(cache_dir) / key if cache_dir is not None else None
    cached = _load_cached(cache_path) if cache_path is not None else None
    if cached is not None:
        p_rel, lp_rel, lsd, msd, meta = cached
        stage_seconds = meta["stage_seconds"]
        largest = meta["largest_intermediate"]
        from_cache = True
    else:
        stats = CompileStats()
        stage_seconds = {}
        t0 = time.perf_counter()
        p_rel = period_predicate(dfao, minimize_eagerly=minimize_eagerly, stats=stats)
        stage_seconds["period_relation"] = time.perf_counter() - t0
        t0 = time.perf_counter()
        lp_rel = least_period_predicate(dfao, lp_style=lp_style,
                                        minimize_eagerly=minimize_eagerly, stats=stats)
        stage_seconds["least_period_relation"] = time.perf_counter() - t0
        t0 = time.perf_counter()
        pair = least_period_automaton(dfao, length_slack, lp_style=lp_style,
                                      minimize_eagerly=minimize_eagerly, stats=stats)
        stage_seconds["least_period_set"] = time.perf_counter() - t0
        lsd, msd = pair.lsd, pair.msd
        largest = stats.max_intermediate
        from_cache = False
        if cache_path is not None:
            _store_cache(cache_path, p_rel, lp_rel, lsd, msd,
                         {"stage_seconds": stage_seconds, "largest_intermediate": largest})

    positive = _positive_track(dfao.base, "n")
    restricted = product(lsd, positive, "and")
    report = PipelineReport(
        sequence=name,
        base=dfao.base,
        length_slack=length_slack,
        minimize_eagerly=minimize_eagerly,
        stage_states={
            "period_relation": p_rel.n_states,
            "least_period_relation": lp_rel.n_states,
            "least_period_set": lsd.n_states,
        },
        stage_seconds=stage_seconds,
        largest_intermediate=largest,
        convention_states={"lsd": lsd.n_states, "msd": msd.n_states},
        accepts_all_positive=equivalent(restricted, positive),
        accepts_zero=run(lsd, 0),
        least_omitted=_scan_least_omitted(lsd, omitted_scan_bound),
        cached=from_cache,
        lsd=lsd,
        msd=msd,
        period_relation=p_rel,
        least_period_relation=lp_rel,
        oracle=(
            compare_with_oracle(lsd, oracle, prefix_len=oracle_prefix_len,
                                max_n=oracle_max_n, min_extra=length_slack)
            if oracle_check
            else None
        ),
    )
    return report


def _scan_least_omitted(lsd: Dfa, bound: int) -> int | None:
    accepted = accepts_range(lsd, bound + 1)
    for n in range(1, bound + 1):
        if not accepted[n]:
            return n
    return None


_CACHE_FILES = {
    "period_relation": "period_relation.dfa",
    "least_period_relation": "least_period_relation.dfa",
    "least_period_set": "least_periods.dfa",
    "least_period_set_msd": "least_periods_msd.dfa",
}


def _load_cached(path: Path):
    meta_file = path / "meta.json"
    if not meta_file.is_file():
        return None
    try:
        meta = json.loads(meta_file.read_text())
        automata = [
            load_dfa((path / fname).read_text()) for fname in _CACHE_FILES.values()
        ]
    except (OSError, ValueError):
        return None
    return (*automata, meta)


def _store_cache(path: Path, p_rel: Dfa, lp_rel: Dfa, lsd: Dfa, msd: Dfa, meta: dict) -> None:
    path.mkdir(parents=True, exist_ok=True)
    for automaton, fname in zip((p_rel, lp_rel, lsd, msd), _CACHE_FILES.values()):
        (path / fname).write_text(save_dfa(automaton))
    (path / "meta.json").write_text(json.dumps(meta, sort_keys=True))
