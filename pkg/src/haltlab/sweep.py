"""Exhaustive halting histories over fixed-length program spaces.

A sweep runs every length-N program with a common step horizon T and records
exact stop times. The associated product space is {0,1}^N x {1..T} with the
uniform measure 2^-N * 1/T; prob_exact and prob_by are measures of "stops
exactly at its recorded time" and "has stopped by the sampled time" there.
All probabilities are Fractions; nothing is ever rounded.

Sweeps are data-parallel over programs: workers get disjoint chunks and
results are merged by program key, so the outcome is identical for any worker
count and any scheduling order.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from haltlab.codec import index_of_bits
from haltlab.errors import ConfigError, ResourceLimitError, UndefinedConditionalError
from haltlab.machine import Machine, run

DEFAULT_ENUM_CAP_BITS = 24
ENUM_CAP_ENV = "HALTLAB_ENUM_CAP"


def enum_cap_bits() -> int:
    """Largest program length an exhaustive 2^N enumeration may use."""
    raw = os.environ.get(ENUM_CAP_ENV)
    if raw is None:
        return DEFAULT_ENUM_CAP_BITS
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"{ENUM_CAP_ENV} must be an integer, got {raw!r}") from exc


def check_enum_cap(length: int) -> None:
    cap = enum_cap_bits()
    if length > cap:
        raise ResourceLimitError(
            f"enumerating 2^{length} programs exceeds the cap of 2^{cap}; "
            f"set {ENUM_CAP_ENV} to allow it"
        )


@dataclass(frozen=True)
class HaltingHistory:
    """Result of one sweep: stop times of all halting length-N programs."""

    machine: Machine
    length: int
    horizon: int
    stops: Mapping[str, int]

    @property
    def space_size(self) -> int:
        return 2**self.length

    def programs(self) -> list[str]:
        """All length-N programs in lexicographic (= index) order."""
        return all_programs(self.length)


def all_programs(length: int) -> list[str]:
    if length == 0:
        return [""]
    return [format(v, f"0{length}b") for v in range(2**length)]


def _sweep_chunk(machine: Machine, programs: list[str], horizon: int) -> dict[str, int]:
    found: dict[str, int] = {}
    for program in programs:
        outcome = run(machine, program, horizon)
        if outcome.halted:
            found[program] = outcome.stop_time
    return found


def sweep(machine: Machine, length: int, horizon: int, workers: int = 1) -> HaltingHistory:
    """Run all 2^length programs for horizon steps and record exact stops."""
    if length < 0:
        raise ConfigError(f"length must be >= 0, got {length}")
    if horizon < 1:
        raise ConfigError(f"horizon must be >= 1, got {horizon}")
    if workers < 1:
        raise ConfigError(f"workers must be >= 1, got {workers}")
    check_enum_cap(length)
    programs = all_programs(length)
    if workers == 1 or len(programs) < 2 * workers:
        merged = _sweep_chunk(machine, programs, horizon)
    else:
        chunk = (len(programs) + workers - 1) // workers
        parts = [programs[i : i + chunk] for i in range(0, len(programs), chunk)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda ps: _sweep_chunk(machine, ps, horizon), parts))
        merged = {}
        for part in results:
            merged.update(part)
    stops = {p: merged[p] for p in programs if p in merged}
    return HaltingHistory(machine=machine, length=length, horizon=horizon, stops=stops)


# ---------------------------------------------------------------------------
# product-space measures

def prob_exact(history: HaltingHistory) -> Fraction:
    """Measure of {(p, t) : p stops exactly at t} in the product space."""
    return Fraction(len(history.stops), history.space_size * history.horizon)


def prob_by(history: HaltingHistory) -> Fraction:
    """Measure of {(p, t) : p has stopped by t} in the product space."""
    weight = sum(history.horizon - t + 1 for t in history.stops.values())
    return Fraction(weight, history.space_size * history.horizon)


# ---------------------------------------------------------------------------
# program-space fractions (the per-history halting statistics)

def halted_exactly_fraction(history: HaltingHistory, t: int) -> Fraction:
    """Fraction of programs stopping exactly at step t."""
    count = sum(1 for stop in history.stops.values() if stop == t)
    return Fraction(count, history.space_size)


def halted_by_fraction(history: HaltingHistory, t: int) -> Fraction:
    """Fraction of programs that have stopped by step t."""
    count = sum(1 for stop in history.stops.values() if stop <= t)
    return Fraction(count, history.space_size)


def eventual_fraction(history: HaltingHistory) -> Fraction:
    """Fraction of programs observed halting within the horizon."""
    return Fraction(len(history.stops), history.space_size)


@dataclass(frozen=True)
class ConditionalReport:
    """Halting statistics conditioned on surviving past t0."""

    t0: int
    t1: int | None
    survivors: int
    eventual_given_not_by: Fraction
    not_by_and_eventual: Fraction
    by_t1_given_not_by: Fraction | None


def conditional_probs(history: HaltingHistory, t0: int, t1: int | None = None) -> ConditionalReport:
    """Conditioning on "not stopped by t0" within the recorded horizon."""
    if not 0 <= t0 <= history.horizon:
        raise ConfigError(f"t0 must be in [0, {history.horizon}], got {t0}")
    if t1 is not None and not t0 < t1 <= history.horizon:
        raise ConfigError(f"t1 must be in ({t0}, {history.horizon}], got {t1}")
    survivors = history.space_size - sum(1 for t in history.stops.values() if t <= t0)
    if survivors == 0:
        raise UndefinedConditionalError(
            f"every program stopped by t0={t0}; the conditional is undefined"
        )
    later = sum(1 for t in history.stops.values() if t > t0)
    by_t1 = None
    if t1 is not None:
        by_t1 = Fraction(sum(1 for t in history.stops.values() if t0 < t <= t1), survivors)
    return ConditionalReport(
        t0=t0,
        t1=t1,
        survivors=survivors,
        eventual_given_not_by=Fraction(later, survivors),
        not_by_and_eventual=Fraction(later, history.space_size),
        by_t1_given_not_by=by_t1,
    )


# ---------------------------------------------------------------------------
# exports

def history_to_csv(history: HaltingHistory) -> str:
    """One row per program in index order; running programs marked RUNNING."""
    lines = ["program,stop_time"]
    for program in history.programs():
        stop = history.stops.get(program)
        lines.append(f"{program},{stop if stop is not None else 'RUNNING'}")
    return "\n".join(lines) + "\n"


def history_to_matrix(history: HaltingHistory) -> dict:
    """Grid form: cell (p, t) holds "h" once p has stopped by t."""
    rows = []
    for program in history.programs():
        stop = history.stops.get(program)
        cells = [
            "h" if stop is not None and t >= stop else ""
            for t in range(1, history.horizon + 1)
        ]
        rows.append({"program": program, "cells": cells})
    return {
        "length": history.length,
        "horizon": history.horizon,
        "times": list(range(1, history.horizon + 1)),
        "rows": rows,
    }


def budget_extension_consistent(
    earlier: HaltingHistory, later: HaltingHistory
) -> bool:
    """Stops found at a smaller horizon must persist verbatim at a larger one."""
    if earlier.horizon > later.horizon:
        return budget_extension_consistent(later, earlier)
    return all(later.stops.get(p) == t for p, t in earlier.stops.items())
