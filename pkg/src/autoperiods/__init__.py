"""Least periods of automatic sequences via predicate-to-automaton compilation.

The package builds, for a k-automatic sequence given as a DFAO, the finite
automaton accepting exactly the integers that occur as least periods of
its factors, and analyzes that automaton (membership, enumeration, exact
natural density).
"""

from .analysis import (
    DensityReport,
    accepting_mass_split,
    count_matrix,
    density,
    least_omitted,
    limit_matrix,
)
from .automata import (
    AutomatonError,
    Dfa,
    Dfao,
    Nfa,
    TrackAlphabet,
    complement,
    cylindrify,
    determinize,
    equivalent,
    is_empty,
    is_infinite,
    is_universal,
    minimize,
    pad_normalize,
    product,
    project,
    run,
)
from .compiler import CompileEnv, CompileError, CompileStats, compile_formula, seq_atom_automaton
from .fileio import (
    FormatError,
    dfa_to_dot,
    dfao_to_dot,
    load_dfa,
    load_dfao,
    load_nfa,
    save_dfa,
    save_dfao,
    save_nfa,
)
from .numeration import (
    DigitWord,
    add_automaton,
    const_automaton,
    decode,
    encode,
    eq_automaton,
    leq_automaton,
    lt_automaton,
    reverse_to_msd,
)
from .pipeline import (
    LeastPeriodAutomata,
    OracleComparison,
    PipelineReport,
    compare_with_oracle,
    least_period_automaton,
    least_period_predicate,
    period_predicate,
    run_pipeline,
)
from .predicates import (
    Formula,
    PredicateSyntaxError,
    eliminate_difference,
    flatten_terms,
    parse,
)
from .sequences import (
    SequenceOracle,
    factor_least_periods,
    paperfolding,
    paperfolding_oracle,
    period_doubling,
    period_doubling_oracle,
    rudin_shapiro,
    rudin_shapiro_oracle,
    synthesize_dfao,
    thue_morse,
    thue_morse_oracle,
)

__version__ = "0.1.0"
