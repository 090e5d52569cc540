"""Description complexity by program index, and random stop times.

The complexity of a string x relative to a machine is the least index n whose
program produces x. Indices double as time values, so a time t is called
random when the code of t has complexity at least 2^len / len; random times
cannot be hit by short programs that stop late. On transparent machines the
verdicts are exact; on opaque machines a found witness certifies "nonrandom"
but absence of one only yields "unknown".
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from haltlab.codec import bits_of_index, index_of_bits
from haltlab.errors import ConfigError
from haltlab.machine import (
    TIME_WRAP_EXTRA_BITS,
    TIME_WRAP_STEP_OVERHEAD,
    Machine,
    PrefixFreeVM,
    ToyVM,
    exact_run,
    is_transparent,
    run,
    time_wrap,
)
from haltlab.sweep import check_enum_cap

RANDOM = "random"
NONRANDOM = "nonrandom"
UNKNOWN = "unknown"


def _require_budget(machine: Machine, budget: int | None) -> None:
    if is_transparent(machine):
        if budget is not None:
            raise ConfigError("transparent machines take no budget (verdicts are exact)")
    else:
        if budget is None or budget < 1:
            raise ConfigError("opaque machines require a positive budget")


@lru_cache(maxsize=256)
def min_index_map(machine: Machine, cap: int, budget: int | None) -> dict[str, int]:
    """Map output -> least index n <= cap producing it (within budget if opaque).

    The returned dict is shared through a cache; treat it as read-only.
    """
    if cap < 0:
        raise ConfigError(f"cap must be >= 0, got {cap}")
    check_enum_cap(max(0, cap.bit_length() - 1))
    transparent = is_transparent(machine)
    found: dict[str, int] = {}
    for n in range(1, cap + 1):
        program = bits_of_index(n)
        if transparent:
            hit = exact_run(machine, program)
            output = hit[1] if hit is not None else None
        else:
            outcome = run(machine, program, budget)
            output = outcome.output if outcome.halted else None
        if output is not None and output not in found:
            found[output] = n
    return found


@dataclass(frozen=True)
class ComplexityResult:
    """Outcome of a capped search for the least producing index."""

    index: int | None  # least index found; None = no witness at or below the cap
    exact: bool  # True: verdict is exact; False: index (if any) only bounds from above
    search_cap: int
    budget: int | None


def natural_complexity(
    machine: Machine, target: str, search_cap: int, budget: int | None = None
) -> ComplexityResult:
    """Least index n <= search_cap with machine(code(n)) = target."""
    _require_budget(machine, budget)
    found = min_index_map(machine, search_cap, budget).get(target)
    return ComplexityResult(
        index=found,
        exact=is_transparent(machine),
        search_cap=search_cap,
        budget=budget,
    )


def randomness_threshold(t: int) -> Fraction:
    """A time t >= 2 is random when no index below 2^len/len produces code(t)."""
    if t < 2:
        raise ConfigError(f"randomness is defined for t >= 2, got {t}")
    length = len(bits_of_index(t))
    return Fraction(2**length, length)


def time_randomness(machine: Machine, t: int, budget: int | None = None) -> str:
    """Classify stop time t as random / nonrandom / unknown."""
    _require_budget(machine, budget)
    threshold = randomness_threshold(t)
    cap = math.ceil(threshold) - 1
    witness = min_index_map(machine, cap, budget).get(bits_of_index(t))
    if witness is not None:
        return NONRANDOM  # witness halts, so the bound holds even under budget
    return RANDOM if is_transparent(machine) else UNKNOWN


@dataclass(frozen=True)
class BoundCheck:
    """Stop-time compressibility check for one program."""

    program: str
    applicable: bool  # False: the program did not stop within the budget
    stop_time: int | None
    cap: int  # 2^(len(program) + 3)
    witness_index: int | None
    holds: bool | None


def stop_time_bound_holds(machine: Machine, program: str, budget: int) -> BoundCheck:
    """Check that the code of the stop time has complexity <= 2^(len(p)+c+1).

    On the VM kinds the timing wrapper supplies the witness directly; on
    table-style machines we fall back to enumeration below the cap.
    """
    if budget < 1:
        raise ConfigError(f"budget must be >= 1, got {budget}")
    cap = 2 ** (len(program) + TIME_WRAP_EXTRA_BITS + 1)
    outcome = run(machine, program, budget)
    if not outcome.halted:
        return BoundCheck(program, False, None, cap, None, None)
    stop = outcome.stop_time
    target = bits_of_index(stop)
    if isinstance(machine, (ToyVM, PrefixFreeVM)):
        wrapped = time_wrap(program)
        wrapped_outcome = run(machine, wrapped, budget + TIME_WRAP_STEP_OVERHEAD)
        witness = None
        if wrapped_outcome.halted and wrapped_outcome.output == target:
            witness = index_of_bits(wrapped)
    else:
        budget_arg = None if is_transparent(machine) else budget
        witness = min_index_map(machine, cap, budget_arg).get(target)
    holds = witness is not None and witness <= cap
    return BoundCheck(program, True, stop, cap, witness, holds)


@dataclass(frozen=True)
class RandomStringDensity:
    """Exact density of random strings of one length on a transparent machine."""

    length: int
    nonrandom_count: int
    density: Fraction
    floor: Fraction  # 1 - 1/length, certified lower bound


def random_string_density(machine: Machine, length: int) -> RandomStringDensity:
    """Fraction of length-n strings with complexity >= 2^n/n (exact).

    Strings no program below the threshold produces count as random; that is
    the verdict, not a budget artifact, because the machine is transparent.
    """
    if length < 1:
        raise ConfigError(f"length must be >= 1, got {length}")
    if not is_transparent(machine):
        raise ConfigError("random_string_density requires a transparent machine")
    threshold = Fraction(2**length, length)
    cap = math.ceil(threshold) - 1
    reached = min_index_map(machine, cap, None)
    nonrandom = sum(1 for output in reached if len(output) == length)
    total = 2**length
    return RandomStringDensity(
        length=length,
        nonrandom_count=nonrandom,
        density=Fraction(total - nonrandom, total),
        floor=1 - Fraction(1, length),
    )
