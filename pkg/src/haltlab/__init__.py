"""haltlab: a desk-scale laboratory for halting statistics.

Everything here computes with exact integers and rationals. Probabilities are
`fractions.Fraction`, uncertain quantities are closed rational intervals, and
"does not halt" is never observed directly: negative knowledge is always
relative to a step budget.
"""

from haltlab.codec import bits_of_index, enumerate_program_bits, index_of_bits
from haltlab.intervals import Interval
from haltlab.machine import (
    Dispatcher,
    PrefixFreeVM,
    RunOutcome,
    TableMachine,
    ToyVM,
    decidability,
    dispatch_spec,
    is_transparent,
    load_machine,
    machine_from_dict,
    machine_to_dict,
    run,
    time_wrap,
)
from haltlab.complexity import natural_complexity, time_randomness
from haltlab.density import density_report, random_stop_report
from haltlab.halting_prob import domain_prob_curve
from haltlab.runtime_dist import (
    halting_series,
    induced_distribution,
    split_halting_set,
    tail_threshold,
)
from haltlab.sweep import HaltingHistory, conditional_probs, prob_by, prob_exact, sweep

__version__ = "0.1.0"

__all__ = [
    "bits_of_index",
    "index_of_bits",
    "enumerate_program_bits",
    "Interval",
    "TableMachine",
    "ToyVM",
    "PrefixFreeVM",
    "Dispatcher",
    "RunOutcome",
    "run",
    "time_wrap",
    "dispatch_spec",
    "decidability",
    "is_transparent",
    "load_machine",
    "machine_from_dict",
    "machine_to_dict",
    "HaltingHistory",
    "sweep",
    "prob_exact",
    "prob_by",
    "conditional_probs",
    "natural_complexity",
    "time_randomness",
    "halting_series",
    "induced_distribution",
    "tail_threshold",
    "split_halting_set",
    "density_report",
    "random_stop_report",
    "domain_prob_curve",
    "__version__",
]
