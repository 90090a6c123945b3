"""Free-group words, presentations and bounded trivialization search."""

from .words import (AlphabetMismatch, Word, comm, commutator_factors, conj, cyclic_reduce,
                    delete_generators, exponent_sum, format_letters, free_reduce, inv,
                    invert_letters, mul, power, reduce)
from .presentation import (DestabilizeError, Move, Presentation, PresentationError, abelianize,
                           add_trivial_relator, conjugate, destabilize, format_presentation,
                           invert, is_trivial_presentation, parse_presentation,
                           presentation_from_json, presentation_to_json, replay, replay_log,
                           stabilize, tietze_slide)
from .search import (DEFAULT_BUDGET, SearchConfig, abelian_obstruction, kill_generators_search,
                     normally_generates, trivialize_search, verify_trivialization)
