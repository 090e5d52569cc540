from fractions import Fraction

import pytest

from haltlab.codec import bits_of_index, index_of_bits
from haltlab.complexity import (
    NONRANDOM,
    RANDOM,
    UNKNOWN,
    natural_complexity,
    random_string_density,
    randomness_threshold,
    stop_time_bound_holds,
    time_randomness,
)
from haltlab.errors import ConfigError
from haltlab.machine import TableMachine, dispatch_spec, run, timed_table

from oracles.ref_vm import ref_run


def ref_least_index(target, cap, prefix_free=False, allow_loops=True, budget=10**5):
    """Independent search for the least index producing target on a VM."""
    for n in range(1, cap + 1):
        halted, _, out = ref_run(bits_of_index(n), prefix_free, allow_loops, budget)
        if halted and out == target:
            return n
    return None


def identity_table(count):
    """Finite table sending each of the first `count` codes to itself."""
    return TableMachine(
        entries=tuple((bits_of_index(n), 1, bits_of_index(n)) for n in range(1, count + 1))
    )


def test_least_index_on_identity_table():
    machine = identity_table(12)
    assert natural_complexity(machine, bits_of_index(5), 64).index == 5
    assert natural_complexity(machine, "0000", 64).index is None
    assert natural_complexity(machine, bits_of_index(5), 64).exact


def test_least_index_on_table1(table1):
    # every table1 entry outputs the empty string; the least program is 000
    result = natural_complexity(table1, "", 64)
    assert result.index == index_of_bits("000") == 8
    assert natural_complexity(table1, "0", 64).index is None


def test_counting_bound(loop_free_vm):
    """At most N strings have complexity below N (least indices are distinct)."""
    from haltlab.complexity import min_index_map

    for cap in (1, 7, 63, 255, 2048):
        reached = min_index_map(loop_free_vm, cap, None)
        assert len(reached) <= cap
        assert len(set(reached.values())) == len(reached)


def test_thresholds():
    assert randomness_threshold(2) == Fraction(2, 1)
    assert randomness_threshold(4) == Fraction(4, 2)
    assert randomness_threshold(8) == Fraction(8, 3)
    with pytest.raises(ConfigError):
        randomness_threshold(1)


def test_time_randomness_matches_reference(loop_free_vm):
    import math

    for t in range(2, 40):
        verdict = time_randomness(loop_free_vm, t)
        threshold = randomness_threshold(t)
        witness = ref_least_index(
            bits_of_index(t), math.ceil(threshold) - 1, allow_loops=False
        )
        assert verdict == (NONRANDOM if witness is not None else RANDOM)


def test_time_randomness_opaque_is_sound(toy_vm):
    for t in range(2, 40):
        verdict = time_randomness(toy_vm, t, budget=4096)
        assert verdict in (NONRANDOM, UNKNOWN)
        if verdict == NONRANDOM:
            # sound: some index under the threshold really produces bin(t)
            import math

            witness = ref_least_index(bits_of_index(t), math.ceil(randomness_threshold(t)) - 1)
            assert witness is not None


def test_stop_bound_on_vm_programs(toy_vm):
    for length in range(7):
        for value in range(2**length):
            program = format(value, f"0{length}b") if length else ""
            check = stop_time_bound_holds(toy_vm, program, 4096)
            if not check.applicable:
                continue
            assert check.holds
            assert check.witness_index is not None
            assert check.witness_index <= 2 ** (length + 3)


def test_stop_bound_witness_is_the_wrapper(toy_vm):
    check = stop_time_bound_holds(toy_vm, "0000", 100)
    assert check.stop_time == 1
    # the wrapper 11p is itself the witness, so its index is known in advance
    assert check.witness_index == index_of_bits("110000")


def test_bare_table_misses_the_bound(table1):
    """A finite table is not closed under timing, so the compressibility
    bound genuinely fails there; registering the timed twin restores it."""
    bad = stop_time_bound_holds(table1, "011", 100)
    assert bad.applicable and not bad.holds

    u = dispatch_spec([table1, timed_table(table1)])
    good = stop_time_bound_holds(u, "1011", 100)
    assert good.applicable and good.holds
    assert run(u, "1011", 100).stop_time == 8
    assert good.witness_index == index_of_bits("01" + "011")


def test_random_string_density_floor(loop_free_vm):
    for n in range(2, 9):
        report = random_string_density(loop_free_vm, n)
        assert report.density >= report.floor == 1 - Fraction(1, n)
        # exact recount with the reference interpreter
        import math

        cap = math.ceil(Fraction(2**n, n)) - 1
        seen = set()
        for i in range(1, cap + 1):
            halted, _, out = ref_run(bits_of_index(i), False, False, 10**5)
            if halted and len(out) == n:
                seen.add(out)
        assert report.nonrandom_count == len(seen)


def test_random_string_density_needs_transparency(toy_vm):
    with pytest.raises(ConfigError):
        random_string_density(toy_vm, 4)
