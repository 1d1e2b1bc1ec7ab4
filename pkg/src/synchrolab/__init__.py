"""Shortest (careful) synchronizing words of DFAs and PFAs: exact search, bounds and constructions."""

__version__ = "0.1.0"

from .automaton import (  # noqa: E402
    Automaton,
    ParseError,
    StateSet,
    canonical_form,
    image,
    is_basic,
    is_complete,
    is_transitive,
    load_automaton,
    parse_automaton,
    run_word,
    serialize_automaton,
    step,
)
from .bounds import BoundReport, bound_L, bound_Lpp, bound_Lprime, bound_report  # noqa: E402
from .search import (  # noqa: E402
    SearchResult,
    SearchTask,
    enumerate_lengths,
    postprocess_minimize_alphabet,
    search_critical_dfa,
    search_extremal_pfa,
)
from .sync import (  # noqa: E402
    SyncReport,
    count_shortest,
    reduction_length,
    shortest_sync,
    subset_distance_table,
)

__all__ = [
    "Automaton",
    "BoundReport",
    "ParseError",
    "SearchResult",
    "SearchTask",
    "StateSet",
    "SyncReport",
    "bound_L",
    "bound_Lpp",
    "bound_Lprime",
    "bound_report",
    "canonical_form",
    "count_shortest",
    "enumerate_lengths",
    "image",
    "is_basic",
    "is_complete",
    "is_transitive",
    "load_automaton",
    "parse_automaton",
    "postprocess_minimize_alphabet",
    "reduction_length",
    "run_word",
    "search_critical_dfa",
    "search_extremal_pfa",
    "serialize_automaton",
    "shortest_sync",
    "step",
    "subset_distance_table",
]
