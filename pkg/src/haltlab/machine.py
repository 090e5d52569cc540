"""Machine descriptors and budgeted execution semantics.

Four machine kinds share one run() interface:

  ToyVM          bit programs on the ladder ISA; lenient halting (running off
                 the stream halts with empty output), so the domain is dense.
  PrefixFreeVM   same ISA, strict halting: END must fire exactly when the last
                 input bit has been consumed, everything else never halts.
                 The halting programs form a prefix-free set.
  TableMachine   finite explicit (program, stop_time, output) table.
  Dispatcher     program 0^i 1 x runs submachine i on x; the index prefix is
                 free of charge (DISPATCH_STEP_OVERHEAD = 0).

Every program is (2-bit mode)(rest). Mode "11" is the timing wrapper: run the
rest as a full program and, if it stops, emit the bit-code of its stop time.
So time_wrap(p) = "11"+p costs TIME_WRAP_EXTRA_BITS = 2 program bits and
TIME_WRAP_STEP_OVERHEAD = 1 extra step per nesting level. All other mode
values execute the rest directly on the base ISA.

A RunOutcome never says "never halts": not halting within the budget is all
that can be observed. Machines whose halting is decidable by construction
(tables, loop-free VM variants, dispatchers over those) are "transparent" and
additionally support exact_run / finite_domain.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Union

from haltlab import vm
from haltlab.codec import bits_of_index, index_of_bits
from haltlab.errors import ConfigError, ResourceLimitError

TIME_WRAP_EXTRA_BITS = 2
TIME_WRAP_STEP_OVERHEAD = 1
DISPATCH_STEP_OVERHEAD = 0

DEFAULT_OUTPUT_CAP = 1 << 20
# loop-free programs always halt; this cap turns a too-expensive exact run
# into a refusal instead of a wrong verdict
LOOP_FREE_STEP_CAP = 10**7

_BITSET = frozenset("01")

TRANSPARENT = "transparent"
OPAQUE = "opaque"


def _check_bits(s: str, what: str) -> str:
    if set(s) - _BITSET:
        raise ConfigError(f"{what} must be a bit string, got {s!r}")
    return s


@dataclass(frozen=True)
class RunOutcome:
    """Budget-relative observation of one run."""

    halted: bool
    stop_time: int | None = None
    output: str | None = None

    @classmethod
    def stopped(cls, stop_time: int, output: str) -> "RunOutcome":
        return cls(True, stop_time, output)

    @classmethod
    def running(cls) -> "RunOutcome":
        return cls(False)


@dataclass(frozen=True)
class ToyVM:
    """Ladder-ISA machine with lenient (dense-domain) halting."""

    isa_version: int = 1
    loop_free: bool = False

    def __post_init__(self) -> None:
        if self.isa_version != 1:
            raise ConfigError(f"unknown isa_version {self.isa_version}")


@dataclass(frozen=True)
class PrefixFreeVM:
    """Ladder-ISA machine with strict END-at-boundary halting."""

    isa_version: int = 1
    loop_free: bool = False

    def __post_init__(self) -> None:
        if self.isa_version != 1:
            raise ConfigError(f"unknown isa_version {self.isa_version}")


@dataclass(frozen=True)
class TableMachine:
    """Finite machine given by explicit stop times and outputs."""

    entries: tuple[tuple[str, int, str], ...]
    _lookup: dict = field(init=False, repr=False, compare=False, hash=False)

    def __post_init__(self) -> None:
        seen: dict[str, tuple[int, str]] = {}
        for program, stop_time, output in self.entries:
            _check_bits(program, "table program")
            _check_bits(output, "table output")
            if not isinstance(stop_time, int) or stop_time < 1:
                raise ConfigError(f"stop_time must be a positive int, got {stop_time!r}")
            if program in seen:
                raise ConfigError(f"duplicate table program {program!r}")
            seen[program] = (stop_time, output)
        object.__setattr__(self, "_lookup", seen)

    @classmethod
    def from_stops(cls, stops: dict[str, int], outputs: dict[str, str] | None = None) -> "TableMachine":
        outputs = outputs or {}
        entries = tuple(
            (p, t, outputs.get(p, "")) for p, t in sorted(stops.items(), key=lambda kv: index_of_bits(kv[0]))
        )
        return cls(entries)

    def lookup(self, program: str) -> tuple[int, str] | None:
        return self._lookup.get(program)


@dataclass(frozen=True)
class Dispatcher:
    """Routes 0^i 1 x to submachine i on x; all-zero programs never halt."""

    submachines: tuple["Machine", ...]

    def __post_init__(self) -> None:
        if not self.submachines:
            raise ConfigError("dispatcher needs at least one submachine")


Machine = Union[ToyVM, PrefixFreeVM, TableMachine, Dispatcher]


def dispatch_spec(submachines: list[Machine] | tuple[Machine, ...]) -> Dispatcher:
    """Build a dispatcher over contiguously indexed submachines."""
    return Dispatcher(tuple(submachines))


def time_wrap(program: str) -> str:
    """The timing wrapper: same halting behavior, output = code of stop time."""
    _check_bits(program, "program")
    return "11" + program


def decidability(machine: Machine) -> str:
    """Classify as transparent (halting decidable by construction) or opaque."""
    if isinstance(machine, TableMachine):
        return TRANSPARENT
    if isinstance(machine, (ToyVM, PrefixFreeVM)):
        return TRANSPARENT if machine.loop_free else OPAQUE
    if isinstance(machine, Dispatcher):
        if all(decidability(sub) == TRANSPARENT for sub in machine.submachines):
            return TRANSPARENT
        return OPAQUE
    raise ConfigError(f"unknown machine {machine!r}")


def is_transparent(machine: Machine) -> bool:
    return decidability(machine) == TRANSPARENT


def _split_modes(program: str) -> tuple[int, int]:
    """Count leading "11" mode fields; return (wrap_depth, offset_of_rest)."""
    pos = 0
    depth = 0
    n = len(program)
    while n - pos >= 2 and program[pos] == "1" and program[pos + 1] == "1":
        depth += 1
        pos += 2
    return depth, pos


def _run_vm(
    machine: ToyVM | PrefixFreeVM,
    program: str,
    budget: int,
    output_cap: int,
) -> RunOutcome:
    prefix_free = isinstance(machine, PrefixFreeVM)
    depth, pos = _split_modes(program)
    n = len(program)
    core_budget = budget - depth * TIME_WRAP_STEP_OVERHEAD
    if n - pos < 2:
        # program ends inside a mode field
        if prefix_free:
            return RunOutcome.running()
        if core_budget < 1:
            return RunOutcome.running()
        status, stop, out = vm.HALTED, 1, b""
    else:
        if core_budget < 1:
            return RunOutcome.running()
        status, stop, out = vm.run_stream(
            program.encode("ascii"),
            pos + 2,
            n,
            prefix_free,
            not machine.loop_free,
            core_budget,
            output_cap,
        )
    if status == vm.OUTPUT_LIMIT:
        raise ResourceLimitError(
            f"output exceeded {output_cap} bits at step {stop}; raise output_cap to proceed"
        )
    if status != vm.HALTED:
        return RunOutcome.running()
    output = out.decode("ascii")
    for _ in range(depth):
        output = bits_of_index(stop)
        stop += TIME_WRAP_STEP_OVERHEAD
    return RunOutcome.stopped(stop, output)


def run(
    machine: Machine,
    program: str,
    budget: int,
    output_cap: int = DEFAULT_OUTPUT_CAP,
) -> RunOutcome:
    """Run program for at most budget steps; budget-relative by design."""
    _check_bits(program, "program")
    if budget < 0:
        raise ConfigError(f"budget must be >= 0, got {budget}")
    if isinstance(machine, (ToyVM, PrefixFreeVM)):
        return _run_vm(machine, program, budget, output_cap)
    if isinstance(machine, TableMachine):
        hit = machine.lookup(program)
        if hit is not None and hit[0] <= budget:
            return RunOutcome.stopped(hit[0], hit[1])
        return RunOutcome.running()
    if isinstance(machine, Dispatcher):
        first_one = program.find("1")
        if first_one < 0:
            return RunOutcome.running()
        if first_one >= len(machine.submachines):
            return RunOutcome.running()
        inner = run(machine.submachines[first_one], program[first_one + 1 :], budget, output_cap)
        if inner.halted:
            return RunOutcome.stopped(inner.stop_time + DISPATCH_STEP_OVERHEAD, inner.output)
        return inner
    raise ConfigError(f"unknown machine {machine!r}")


def exact_run(machine: Machine, program: str) -> tuple[int, str] | None:
    """Exact (stop_time, output) on a transparent machine, None = never halts."""
    if not is_transparent(machine):
        raise ConfigError("exact_run requires a transparent machine")
    if isinstance(machine, TableMachine):
        return machine.lookup(program)
    if isinstance(machine, (ToyVM, PrefixFreeVM)):
        outcome = run(machine, program, LOOP_FREE_STEP_CAP)
        if outcome.halted:
            return (outcome.stop_time, outcome.output)
        if isinstance(machine, PrefixFreeVM):
            # loop-free + strict discipline: not halting within the cap can
            # only be certain divergence (truncation / early END / past-end)
            # or a SPIN burn larger than the cap; tell the two apart honestly
            if _certainly_diverges_loop_free(machine, program):
                return None
        raise ResourceLimitError(
            f"loop-free run of {program!r} exceeded {LOOP_FREE_STEP_CAP} steps"
        )
    if isinstance(machine, Dispatcher):
        first_one = program.find("1")
        if first_one < 0 or first_one >= len(machine.submachines):
            return None
        inner = exact_run(machine.submachines[first_one], program[first_one + 1 :])
        if inner is None:
            return None
        return (inner[0] + DISPATCH_STEP_OVERHEAD, inner[1])
    raise ConfigError(f"unknown machine {machine!r}")


def _certainly_diverges_loop_free(machine: PrefixFreeVM, program: str) -> bool:
    """Re-run with a tiny budget: the strict-discipline divergence cases are
    detected by the kernel in at most one pass over the stream."""
    depth, pos = _split_modes(program)
    if len(program) - pos < 2:
        return True
    status, _, _ = vm.run_stream(
        program.encode("ascii"),
        pos + 2,
        len(program),
        True,
        not machine.loop_free,
        LOOP_FREE_STEP_CAP,
        DEFAULT_OUTPUT_CAP,
    )
    return status == vm.DIVERGED


def finite_domain(machine: Machine) -> list[tuple[str, int, str]] | None:
    """Full (program, stop_time, output) list in index order for machines with
    a finite domain; None when the domain is infinite or unknown."""
    if isinstance(machine, TableMachine):
        return sorted(machine.entries, key=lambda e: index_of_bits(e[0]))
    if isinstance(machine, Dispatcher):
        items: list[tuple[str, int, str]] = []
        for i, sub in enumerate(machine.submachines):
            sub_items = finite_domain(sub)
            if sub_items is None:
                return None
            for program, stop, output in sub_items:
                items.append(("0" * i + "1" + program, stop + DISPATCH_STEP_OVERHEAD, output))
        return sorted(items, key=lambda e: index_of_bits(e[0]))
    return None


def timed_table(machine: TableMachine) -> TableMachine:
    """Derived table behaving like the timing wrapper of a table: same domain,
    stop one step later, output = code of the original stop time."""
    entries = tuple(
        (program, stop + TIME_WRAP_STEP_OVERHEAD, bits_of_index(stop))
        for program, stop, _ in machine.entries
    )
    return TableMachine(entries)


# ---------------------------------------------------------------------------
# serialization

def machine_to_dict(machine: Machine) -> dict:
    if isinstance(machine, TableMachine):
        entries = []
        for program, stop, output in machine.entries:
            entry: dict = {"program": program, "stop_time": stop}
            if output:
                entry["output"] = output
            entries.append(entry)
        return {"kind": "table", "entries": entries}
    if isinstance(machine, ToyVM):
        d: dict = {"kind": "toy-vm", "isa_version": machine.isa_version}
        if machine.loop_free:
            d["variant"] = "loop-free"
        return d
    if isinstance(machine, PrefixFreeVM):
        d = {"kind": "prefix-free-vm", "isa_version": machine.isa_version}
        if machine.loop_free:
            d["variant"] = "loop-free"
        return d
    if isinstance(machine, Dispatcher):
        return {
            "kind": "dispatcher",
            "submachines": [machine_to_dict(sub) for sub in machine.submachines],
        }
    raise ConfigError(f"unknown machine {machine!r}")


def _variant_flag(data: dict) -> bool:
    variant = data.get("variant", "full")
    if variant not in ("full", "loop-free"):
        raise ConfigError(f"unknown variant {variant!r}")
    return variant == "loop-free"


def machine_from_dict(data: dict) -> Machine:
    if not isinstance(data, dict) or "kind" not in data:
        raise ConfigError(f"machine descriptor must be an object with 'kind': {data!r}")
    kind = data["kind"]
    if kind == "table":
        entries = data.get("entries")
        if not isinstance(entries, list):
            raise ConfigError("table machine needs an 'entries' list")
        rows = []
        for entry in entries:
            if not isinstance(entry, dict) or "program" not in entry or "stop_time" not in entry:
                raise ConfigError(f"bad table entry {entry!r}")
            program = entry["program"]
            if not isinstance(program, str):
                raise ConfigError(f"table program must be a string, got {program!r}")
            _check_bits(program, "table program")
            rows.append((program, entry["stop_time"], entry.get("output", "")))
        rows.sort(key=lambda r: index_of_bits(r[0]))
        return TableMachine(tuple(rows))
    if kind == "toy-vm":
        return ToyVM(isa_version=data.get("isa_version", 1), loop_free=_variant_flag(data))
    if kind == "prefix-free-vm":
        return PrefixFreeVM(isa_version=data.get("isa_version", 1), loop_free=_variant_flag(data))
    if kind == "dispatcher":
        subs = data.get("submachines")
        if not isinstance(subs, list) or not subs:
            raise ConfigError("dispatcher needs a non-empty 'submachines' list")
        return Dispatcher(tuple(machine_from_dict(sub) for sub in subs))
    raise ConfigError(f"unknown machine kind {kind!r}")


_BUILTINS = {
    "toy-vm": ToyVM(),
    "loop-free-vm": ToyVM(loop_free=True),
    "prefix-free-vm": PrefixFreeVM(),
    "prefix-free-loop-free-vm": PrefixFreeVM(loop_free=True),
}


def load_machine(source: str | Path) -> Machine:
    """Load from a JSON file path or a builtin:NAME alias."""
    text = str(source)
    if text.startswith("builtin:"):
        name = text.split(":", 1)[1]
        if name not in _BUILTINS:
            raise ConfigError(
                f"unknown builtin machine {name!r}; available: {', '.join(sorted(_BUILTINS))}"
            )
        return _BUILTINS[name]
    path = Path(source)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read machine file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"machine file {path} is not valid JSON: {exc}") from exc
    return machine_from_dict(data)
