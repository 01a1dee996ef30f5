"""Command-line interface.

Exit codes are a stable contract: 0 for success (including "accept"),
1 for a semantic negative (reject, mismatch, false sentence), 2 for usage
or internal errors.  All outputs are deterministic except the wall times
in the plain-text build report; the JSON report and every automaton file
are byte-identical across runs.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .analysis import density
from .automata import AutomatonError, Dfa, run
from .compiler import CompileEnv, CompileError, compile_formula
from .fileio import FormatError, dfa_to_dot, dfao_to_dot, load_dfa, load_dfao, save_dfa
from .pipeline import run_pipeline
from .predicates import PredicateSyntaxError, parse
from .sequences import accepts_range, builtin_names, get_builtin_dfao

CACHE_ENV_VAR = "AUTOPERIODS_CACHE_DIR"

_ERRORS = (AutomatonError, CompileError, FormatError, PredicateSyntaxError,
           ValueError, KeyError, OSError)


def _parse_count(text: str) -> int:
    """Accepts plain integers and 2^k style powers."""
    if "^" in text:
        base, _, exp = text.partition("^")
        return int(base) ** int(exp)
    return int(text)


def _load_arity1(path: str) -> Dfa:
    a = load_dfa(Path(path).read_text())
    if a.arity != 1:
        raise AutomatonError(f"{path}: expected an arity-1 automaton, got arity {a.arity}")
    return a


def _resolve_dfao(spec: str):
    """Builtin name, or a path to a .dfao file."""
    normalized = spec.strip().lower().replace("_", "-")
    if normalized in builtin_names():
        return normalized, get_builtin_dfao(normalized)
    path = Path(spec)
    if path.is_file():
        return path.stem, load_dfao(path.read_text())
    raise KeyError(f"{spec!r} is neither a builtin sequence {builtin_names()} "
                   f"nor an existing DFAO file")


def _cache_dir(args) -> str | None:
    if getattr(args, "no_cache", False):
        return None
    if getattr(args, "cache_dir", None):
        return args.cache_dir
    return os.environ.get(CACHE_ENV_VAR)


def _cmd_build(args) -> int:
    name, dfao = _resolve_dfao(args.sequence)
    out = Path(args.out or f"autoperiods_out/{name}")
    out.mkdir(parents=True, exist_ok=True)
    cache = _cache_dir(args)
    if cache is None and not args.no_cache:
        cache = str(out / ".cache")
    report = run_pipeline(
        dfao if name not in builtin_names() else name,
        length_slack=args.slack,
        minimize_eagerly=not args.no_minimize,
        oracle_check=args.check_oracle,
        oracle_prefix_len=args.prefix,
        oracle_max_n=args.max_n,
        cache_dir=cache,
    )
    (out / "least_periods.dfa").write_text(save_dfa(report.lsd))
    (out / "period_relation.dfa").write_text(save_dfa(report.period_relation))
    (out / "least_period_relation.dfa").write_text(save_dfa(report.least_period_relation))
    if args.msd:
        (out / "least_periods_msd.dfa").write_text(save_dfa(report.msd))
    if args.dot:
        (out / "least_periods.dot").write_text(dfa_to_dot(report.lsd, "least_periods"))
        (out / "sequence.dot").write_text(dfao_to_dot(dfao, "sequence"))
        if args.msd:
            (out / "least_periods_msd.dot").write_text(
                dfa_to_dot(report.msd, "least_periods_msd"))
    (out / "report.json").write_text(report.to_json())
    (out / "report.txt").write_text(report.to_text())
    sys.stdout.write(report.to_text())
    sys.stdout.write(f"artifacts written to {out}\n")
    if report.oracle is not None and not (report.oracle.converged and report.oracle.matches):
        return 1
    return 0


def _cmd_query(args) -> int:
    a = _load_arity1(args.automaton)
    if args.n < 0:
        raise AutomatonError("n must be a natural number")
    accepted = run(a, args.n)
    print("accept" if accepted else "reject")
    return 0 if accepted else 1


def _cmd_enumerate(args) -> int:
    a = _load_arity1(args.automaton)
    accepted = accepts_range(a, args.max + 1)
    for n in range(args.max + 1):
        if bool(accepted[n]) != args.complement:
            print(n)
    return 0


def _cmd_density(args) -> int:
    a = _load_arity1(args.automaton)
    report = density(a, omitted_bound=args.bound)
    sys.stdout.write(f"states: {a.n_states}\n")
    sys.stdout.write(report.to_text())
    return 0


def _cmd_verify(args) -> int:
    name = args.sequence.strip().lower().replace("_", "-")
    if name not in builtin_names():
        raise KeyError(f"verify needs a builtin sequence (an oracle), one of {builtin_names()}")
    report = run_pipeline(
        name,
        length_slack=args.slack,
        oracle_check=True,
        oracle_prefix_len=args.prefix,
        oracle_max_n=args.max_n,
        cache_dir=_cache_dir(args),
    )
    comparison = report.oracle
    assert comparison is not None
    omitted = [n for n in range(1, args.max_n + 1)
               if not bool(accepts_range(report.lsd, args.max_n + 1)[n])]
    if not comparison.converged:
        print("status: not-converged (the factor scan still changes with the "
              "prefix length; increase --prefix)")
        return 0
    if comparison.matches:
        print(f"status: pass (automaton set equals the factor scan on [1, {args.max_n}])")
        print(f"omitted least periods up to {args.max_n}: "
              f"{omitted if omitted else 'none'}")
        return 0
    print("status: FAIL")
    if comparison.missing:
        print(f"missing from automaton: {list(comparison.missing)}")
    if comparison.extra:
        print(f"extra in automaton: {list(comparison.extra)}")
    return 1


def _cmd_eval(args) -> int:
    sequences = {}
    for binding in args.seq or []:
        if "=" not in binding:
            raise ValueError(f"--seq takes name=builtin-or-path, got {binding!r}")
        name, _, spec = binding.partition("=")
        sequences[name] = _resolve_dfao(spec)[1]
    env = CompileEnv(sequences, base=args.base)
    formula = parse(args.predicate)
    result = compile_formula(formula, env, minimize_eagerly=not args.no_minimize)
    if result.arity == 0:
        truth = result.start in result.accept
        print("true" if truth else "false")
        if args.out:
            Path(args.out).write_text(save_dfa(result))
        return 0 if truth else 1
    print(f"states: {result.n_states}")
    print(f"tracks: {' '.join(result.track_names)}")
    if args.out:
        Path(args.out).write_text(save_dfa(result))
        print(f"written to {args.out}")
    return 0


def _add_cache_flags(sub) -> None:
    sub.add_argument("--cache-dir", help=f"stage cache directory (default ${CACHE_ENV_VAR})")
    sub.add_argument("--no-cache", action="store_true", help="disable the stage cache")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="autoperiods",
        description="Least periods of automatic sequences, by compiling "
                    "predicates into automata.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("build", help="build the least-period automaton of a sequence")
    p.add_argument("sequence", help=f"builtin ({', '.join(builtin_names())}) or DFAO file")
    p.add_argument("--out", help="output directory (default autoperiods_out/<name>)")
    p.add_argument("--slack", type=int, choices=(0, 1, 2), default=0,
                   help="witness factors must be at least n + slack long (default 0)")
    p.add_argument("--msd", action="store_true", help="also export the MSD-first form")
    p.add_argument("--dot", action="store_true", help="also export DOT graphs")
    p.add_argument("--no-minimize", action="store_true",
                   help="minimize only the final automaton (reports raw growth)")
    p.add_argument("--check-oracle", action="store_true",
                   help="cross-check against the factor scan (builtin sequences only)")
    p.add_argument("--prefix", type=_parse_count, default=2**16,
                   help="factor-scan prefix length, e.g. 65536 or 2^16")
    p.add_argument("--max-n", type=int, default=512, help="factor-scan period bound")
    _add_cache_flags(p)
    p.set_defaults(fn=_cmd_build)

    p = sub.add_parser("query", help="test one integer against an automaton file")
    p.add_argument("automaton")
    p.add_argument("n", type=int)
    p.set_defaults(fn=_cmd_query)

    p = sub.add_parser("enumerate", help="list accepted (or rejected) integers")
    p.add_argument("automaton")
    p.add_argument("--max", type=int, required=True)
    p.add_argument("--complement", action="store_true", help="list rejected integers")
    p.set_defaults(fn=_cmd_enumerate)

    p = sub.add_parser("density", help="exact density report for an automaton file")
    p.add_argument("automaton")
    p.add_argument("--bound", type=_parse_count, default=2**16,
                   help="scan bound for the least omitted value")
    p.set_defaults(fn=_cmd_density)

    p = sub.add_parser("verify", help="compare a builtin pipeline against the factor scan")
    p.add_argument("sequence")
    p.add_argument("--max-n", type=int, default=256)
    p.add_argument("--prefix", type=_parse_count, default=2**16,
                   help="prefix length, e.g. 65536 or 2^16")
    p.add_argument("--slack", type=int, choices=(0, 1, 2), default=0)
    _add_cache_flags(p)
    p.set_defaults(fn=_cmd_verify)

    p = sub.add_parser("eval", help="compile a predicate into an automaton")
    p.add_argument("predicate")
    p.add_argument("--seq", action="append", metavar="NAME=SPEC",
                   help="bind a sequence name to a builtin or DFAO file (repeatable)")
    p.add_argument("--base", type=int, help="numeration base when no sequence is bound")
    p.add_argument("--out", help="write the compiled automaton here")
    p.add_argument("--no-minimize", action="store_true")
    p.set_defaults(fn=_cmd_eval)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except _ERRORS as exc:
        message = exc.args[0] if exc.args else str(exc)
        print(f"error: {message}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
