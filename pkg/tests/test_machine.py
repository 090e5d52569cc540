import json

from hypothesis import given, settings
from hypothesis import strategies as st
import pytest

from haltlab.codec import bits_of_index, index_of_bits
from haltlab.errors import ConfigError
from haltlab.machine import (
    Dispatcher,
    PrefixFreeVM,
    TableMachine,
    ToyVM,
    decidability,
    dispatch_spec,
    exact_run,
    finite_domain,
    is_transparent,
    load_machine,
    machine_from_dict,
    machine_to_dict,
    run,
    time_wrap,
    timed_table,
)
from haltlab.sweep import all_programs, sweep

bits = st.text(alphabet="01", max_size=18)


# run outcomes computed with tests/oracles/ref_vm.py and frozen; each entry is
# (program, (halted, stop_time, output))
PLAIN_GOLDENS = [
    ("", (True, 1, "")),
    ("1", (True, 1, "")),
    ("0000", (True, 1, "")),  # END inside the core
    ("01010", (True, 2, "")),  # output discarded by the run-off-the-end halt
    ("0101000", (True, 2, "0")),
    ("00011000", (True, 2, "1")),
    ("001011110", (True, 4, "")),  # SPIN burns one accumulator unit
    ("0001111101111111", (True, 9, "")),
    ("10110010000", (True, 3, "")),
    ("00101111110", (False, None, None)),  # INC/LOOP cycle never stops
    ("1100", (True, 2, "")),  # timing wrapper, one level
    ("111100", (True, 3, "0")),  # two wrapper levels re-code the stop time
    ("11010100", (True, 3, "0")),
]

PF_GOLDENS = [
    ("0000", (True, 1, "")),
    ("000000", (False, None, None)),  # early END is a certain divergence
    ("0001", (False, None, None)),
    ("00010", (False, None, None)),  # complete code but bits left unread
    ("000100", (False, None, None)),
    ("11010100", (False, None, None)),
    ("000111111000", (True, 2, "")),  # LOOP with empty accumulator, then END
]

LOOPFREE_GOLDENS = [
    ("00101111110", False, (True, 2, "")),  # LOOP is undecodable here
    ("00101111110", True, (False, None, None)),
    ("000111111000", True, (False, None, None)),
]


@pytest.mark.parametrize("program,expected", PLAIN_GOLDENS)
def test_plain_goldens(toy_vm, program, expected):
    outcome = run(toy_vm, program, 10**6)
    assert (outcome.halted, outcome.stop_time, outcome.output) == expected


@pytest.mark.parametrize("program,expected", PF_GOLDENS)
def test_prefix_free_goldens(prefix_free_vm, program, expected):
    outcome = run(prefix_free_vm, program, 10**6)
    assert (outcome.halted, outcome.stop_time, outcome.output) == expected


@pytest.mark.parametrize("program,prefix_free,expected", LOOPFREE_GOLDENS)
def test_loop_free_goldens(loop_free_vm, prefix_free_loop_free_vm, program, prefix_free, expected):
    machine = prefix_free_loop_free_vm if prefix_free else loop_free_vm
    outcome = run(machine, program, 10**6)
    assert (outcome.halted, outcome.stop_time, outcome.output) == expected


def test_run_input_validation(toy_vm):
    with pytest.raises(ConfigError):
        run(toy_vm, "01x", 10)
    with pytest.raises(ConfigError):
        run(toy_vm, "0", -1)


def test_budget_zero_observes_nothing(toy_vm):
    assert not run(toy_vm, "0000", 0).halted


# ---------------------------------------------------------------------------
# the timing wrapper

@settings(max_examples=60)
@given(bits)
def test_time_wrap_recodes_stop_time(toy_vm, program):
    """If p stops at t, then 11p stops at t+1 with output code(t)."""
    inner = run(toy_vm, program, 2048)
    wrapped = run(toy_vm, time_wrap(program), 2049)
    if inner.halted:
        assert wrapped.halted
        assert wrapped.stop_time == inner.stop_time + 1
        assert wrapped.output == bits_of_index(inner.stop_time)
    else:
        assert not wrapped.halted


def test_time_wrap_exhaustive_short(toy_vm):
    # every halting program of length <= 7, no sampling
    for length in range(8):
        for program in all_programs(length):
            inner = run(toy_vm, program, 4096)
            if not inner.halted:
                continue
            wrapped = run(toy_vm, time_wrap(program), 4097)
            assert wrapped.stop_time == inner.stop_time + 1
            assert wrapped.output == bits_of_index(inner.stop_time)


# ---------------------------------------------------------------------------
# prefix-freeness

def test_halting_set_is_prefix_free(prefix_free_vm):
    halting = []
    for length in range(1, 11):
        halting.extend(sweep(prefix_free_vm, length, 4096).stops)
    halting_set = set(halting)
    for p in halting:
        for q in halting_set:
            if len(q) > len(p) and q.startswith(p):
                pytest.fail(f"{p!r} and {q!r} both halt")


# ---------------------------------------------------------------------------
# transparency and the exact oracle

def test_decidability_labels(toy_vm, loop_free_vm, prefix_free_vm, table1):
    assert not is_transparent(toy_vm)
    assert not is_transparent(prefix_free_vm)
    assert is_transparent(loop_free_vm)
    assert is_transparent(table1)
    assert decidability(table1) != decidability(toy_vm)


def test_exact_run_refuses_opaque(toy_vm):
    with pytest.raises(ConfigError):
        exact_run(toy_vm, "0000")


@settings(max_examples=60)
@given(bits)
def test_exact_run_matches_budgeted_run(loop_free_vm, program):
    hit = exact_run(loop_free_vm, program)
    outcome = run(loop_free_vm, program, 10**6)
    if outcome.halted:
        assert hit == (outcome.stop_time, outcome.output)
    else:
        assert hit is None


# ---------------------------------------------------------------------------
# tables

def test_table_lookup_and_budget(table1):
    assert run(table1, "011", 8).halted
    assert not run(table1, "011", 7).halted
    assert not run(table1, "001", 10**6).halted  # not in the table
    assert exact_run(table1, "111") == (16, "")
    assert exact_run(table1, "001") is None


def test_table_rejects_duplicates():
    with pytest.raises(ConfigError):
        machine_from_dict(
            {
                "kind": "table",
                "entries": [
                    {"program": "0", "stop_time": 1},
                    {"program": "0", "stop_time": 2},
                ],
            }
        )


def test_timed_table_derivation(table1):
    derived = timed_table(table1)
    lookup = dict((p, (t, out)) for p, t, out in derived.entries)
    for program, stop, _ in table1.entries:
        assert lookup[program] == (stop + 1, bits_of_index(stop))


# ---------------------------------------------------------------------------
# dispatchers

def test_dispatcher_routing(table1):
    u = dispatch_spec([table1, timed_table(table1)])
    # slot 0: '1' + x, slot 1: '01' + x
    assert run(u, "1011", 10**6).stop_time == 8
    assert run(u, "01011", 10**6).stop_time == 9
    assert run(u, "01011", 10**6).output == bits_of_index(8)
    assert not run(u, "00111", 10**6).halted  # slot 2 is empty
    assert not run(u, "0000", 10**6).halted  # no selector bit
    assert not run(u, "", 10**6).halted


def test_dispatcher_index_inflation_bound(table1):
    """The least dispatcher index for x is at most (2^(i+1)+1) times the
    least submachine index, via the block-prepend identity on codes."""
    subs = [table1, timed_table(table1)]
    u = dispatch_spec(subs)
    udom = finite_domain(u)
    uleast = {}
    for p, _, out in sorted(udom, key=lambda e: index_of_bits(e[0])):
        uleast.setdefault(out, index_of_bits(p))
    for i, sub in enumerate(subs):
        least = {}
        for p, _, out in sorted(finite_domain(sub), key=lambda e: index_of_bits(e[0])):
            least.setdefault(out, index_of_bits(p))
        for x, n in least.items():
            assert x in uleast
            assert uleast[x] <= (2 ** (i + 1) + 1) * n


def test_dispatcher_transparency(table1, toy_vm, loop_free_vm):
    assert is_transparent(dispatch_spec([table1, loop_free_vm]))
    assert not is_transparent(dispatch_spec([table1, toy_vm]))


# ---------------------------------------------------------------------------
# serialization

def test_machine_dict_roundtrip(table1, toy_vm, prefix_free_vm, loop_free_vm):
    for machine in [
        table1,
        toy_vm,
        prefix_free_vm,
        loop_free_vm,
        dispatch_spec([table1, timed_table(table1)]),
    ]:
        data = machine_to_dict(machine)
        json.dumps(data)  # must be plain JSON types
        assert machine_from_dict(data) == machine


def test_load_machine_builtins():
    assert isinstance(load_machine("builtin:toy-vm"), ToyVM)
    assert isinstance(load_machine("builtin:prefix-free-vm"), PrefixFreeVM)
    assert load_machine("builtin:loop-free-vm").loop_free
    with pytest.raises(ConfigError):
        load_machine("builtin:nope")


def test_malformed_table_rejected():
    for entries in [
        [{"program": "01x", "stop_time": 1}],
        [{"program": "0", "stop_time": 0}],
        [{"program": 3, "stop_time": 1}],
    ]:
        with pytest.raises(ConfigError):
            machine_from_dict({"kind": "table", "entries": entries})
    with pytest.raises(ConfigError):
        machine_from_dict({"kind": "mystery"})
