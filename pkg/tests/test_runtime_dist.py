from fractions import Fraction

from hypothesis import given, settings
from hypothesis import strategies as st
import pytest

from haltlab.errors import ConfigError, DegenerateDistributionError
from haltlab.machine import TableMachine, machine_from_dict
from haltlab.runtime_dist import (
    DyadicWeights,
    GeometricTableWeights,
    floor_log2,
    halting_series,
    induced_distribution,
    split_halting_set,
    tail_certificate,
    tail_threshold,
    user_table_distribution,
    weights_from_dict,
)


def table_of(stops):
    return TableMachine.from_stops(stops)


# ---------------------------------------------------------------------------
# floor_log2

@given(st.fractions(min_value=Fraction(1, 10**6), max_value=Fraction(10**6), max_denominator=10**6))
def test_floor_log2_brackets(f):
    e = floor_log2(f)
    assert Fraction(2) ** e <= f < Fraction(2) ** (e + 1)


def test_floor_log2_powers():
    assert floor_log2(Fraction(1)) == 0
    assert floor_log2(Fraction(1, 2)) == -1
    assert floor_log2(Fraction(5, 8)) == -1
    assert floor_log2(Fraction(8)) == 3
    with pytest.raises(ValueError):
        floor_log2(Fraction(0))


# ---------------------------------------------------------------------------
# the normalizer series

def test_series_fixture_f_exact(fixture_f):
    # 2^-1/1 + 2^-2/2 = 5/8, computed from the table by hand
    interval = halting_series(fixture_f)
    assert interval.is_point and interval.lo == Fraction(5, 8)


def test_series_independent_sum(table1):
    expected = sum(
        Fraction(1, 2 ** int("1" + p, 2)) / t for p, t, _ in table1.entries
    )
    assert halting_series(table1).lo == expected


def test_series_width_and_nesting_transparent(loop_free_vm):
    previous = None
    for precision in range(1, 31):
        interval = halting_series(loop_free_vm, precision)
        assert interval.width < Fraction(1, 2**precision)
        if previous is not None:
            assert previous.encloses(interval)
        previous = interval


def test_series_width_and_nesting_opaque(toy_vm):
    previous = None
    for precision in range(1, 17):
        budget = 2 ** (precision + 2)
        interval = halting_series(toy_vm, precision, budget=budget)
        assert interval.width < Fraction(1, 2**precision)
        if previous is not None:
            assert previous.encloses(interval)
        previous = interval


def test_series_budget_rules(toy_vm, fixture_f):
    with pytest.raises(ConfigError):
        halting_series(fixture_f, 8, budget=100)  # transparent takes none
    with pytest.raises(ConfigError):
        halting_series(toy_vm, 8, budget=100)  # below 2^(8+2)
    with pytest.raises(ConfigError):
        halting_series(toy_vm, 17, budget=2**19)  # over the opaque precision cap
    assert halting_series(toy_vm, 17, budget=2**19, force=True).width < Fraction(1, 2**17)


# ---------------------------------------------------------------------------
# distributions and masses

def test_fixture_f_masses(fixture_f):
    dist = induced_distribution(fixture_f)
    assert dist.mass(1).lo == Fraction(4, 5)
    assert dist.mass(2).lo == Fraction(1, 5)
    assert dist.mass(3).lo == Fraction(0)
    assert dist.total_mass().lo == 1  # finite transparent: the masses sum exactly


def test_degenerate_distribution():
    empty = TableMachine(entries=())
    with pytest.raises(DegenerateDistributionError):
        induced_distribution(empty)


def test_degenerate_prefix_free_at_low_precision(prefix_free_vm):
    # no prefix-free program with index <= 10 halts, so 8 bits of precision
    # see an empty domain; 14 bits reach index 16 = "0000" which halts
    with pytest.raises(DegenerateDistributionError):
        induced_distribution(prefix_free_vm, 8, budget=2**10)
    dist = induced_distribution(prefix_free_vm, 14, budget=2**16)
    assert dist.normalizer.lo > 0


def test_tail_index_is_minimal_and_monotone(fixture_f):
    dist = induced_distribution(fixture_f)
    previous = 0
    for k in range(0, 21):
        b = dist.tail_index(k)
        target = Fraction(1, 2**k)
        assert dist.weights.tail_bound(b) / dist.normalizer.lo < target
        if b > 1:
            assert dist.weights.tail_bound(b - 1) / dist.normalizer.lo >= target
        assert b >= previous
        previous = b


def test_fixture_f_thresholds(fixture_f):
    dist = induced_distribution(fixture_f)
    assert tail_threshold(dist, 3) == 5
    for k in range(0, 21):
        horizon = tail_threshold(dist, k)
        assert horizon == k + 2
        assert tail_certificate(dist, horizon) < Fraction(1, 2**k)
        # exact tail mass is below the certificate
        assert dist.tail_mass(horizon).hi < Fraction(1, 2**k)


def test_threshold_knife_edge_bump():
    # normalizer exactly 1/2 puts the closed-form bound on the boundary,
    # so the strictness nudge must fire
    dist = induced_distribution(table_of({"": 1}))
    assert dist.normalizer.lo == Fraction(1, 2)
    for k in range(0, 10):
        horizon = tail_threshold(dist, k)
        assert horizon == k + 3
        assert tail_certificate(dist, horizon) < Fraction(1, 2**k)
        assert tail_certificate(dist, horizon - 1) >= Fraction(1, 2**k)


def test_opaque_tail_mass_certified(toy_vm):
    dist = induced_distribution(toy_vm, budget=4096)
    for k in range(1, 21):
        horizon = tail_threshold(dist, k)
        assert dist.tail_mass(horizon).hi < Fraction(1, 2**k)


# ---------------------------------------------------------------------------
# user-table weights

def test_user_table_matches_induced_when_dyadic(fixture_f):
    data = {
        "kind": "user-table",
        "weights": [["1", "2"], ["1", "4"], ["1", "8"]],
        "tail_modulus": {"type": "geometric", "ratio": "1/2"},
    }
    user = user_table_distribution(fixture_f, data)
    induced = induced_distribution(fixture_f)
    assert user.normalizer == induced.normalizer
    for i in range(1, 12):
        assert user.weight(i) == induced.weight(i)
        assert user.mass(i) == induced.mass(i)
    assert user.kind == "user-table" and induced.kind == "upsilon-induced"


def test_geometric_tail_identity():
    w = GeometricTableWeights(prefix=(Fraction(1, 3), Fraction(1, 9)), ratio=Fraction(1, 3))
    # continuation past the prefix: w(3) = 1/27, w(4) = 1/81, ...
    assert w.weight(3) == Fraction(1, 27) and w.weight(4) == Fraction(1, 81)
    # the tail bound telescopes exactly: tail(n) = w(n) + ... + w(M) + tail(M+1)
    for n in range(1, 8):
        for m in range(n, 12):
            partial = sum(w.weight(i) for i in range(n, m + 1))
            assert w.tail_bound(n) == partial + w.tail_bound(m + 1)
    # and on the pure geometric part it is the exact series value
    assert w.tail_bound(3) == Fraction(1, 18)
    assert w.tail_bound(1) == Fraction(1, 2)


def test_weight_file_validation():
    good = {
        "kind": "user-table",
        "weights": [["1", "2"]],
        "tail_modulus": {"type": "geometric", "ratio": "1/2"},
    }
    assert weights_from_dict(good).weight(1) == Fraction(1, 2)
    for broken in [
        {**good, "kind": "table"},
        {**good, "weights": []},
        {**good, "weights": [["1"]]},
        {**good, "tail_modulus": {"type": "linear"}},
        {**good, "tail_modulus": {"type": "geometric", "ratio": "3/2"}},
    ]:
        with pytest.raises(ConfigError):
            weights_from_dict(broken)


# ---------------------------------------------------------------------------
# the computable/rare split

def test_split_covers_and_respects_cutoffs(toy_vm):
    dist = induced_distribution(toy_vm, budget=4096)
    split = split_halting_set(toy_vm, dist, 2, 6, budget=4096)
    assert split.residual_measure_hi < split.residual_bound == Fraction(1, 8)
    seen = dict(split.computable) | dict(split.residual)
    assert not (set(dict(split.computable)) & set(dict(split.residual)))
    # cross-check coverage against a fresh sweep at each length
    from haltlab.sweep import sweep

    expected = {}
    for n in range(1, 7):
        expected.update(sweep(toy_vm, n, 4096).stops)
    assert seen == expected
    for program, stop in split.computable:
        assert stop < split.cutoffs[len(program)]
    for program, stop in split.residual:
        assert stop >= split.cutoffs[len(program)]


def test_split_with_nonempty_residual():
    from haltlab.codec import bits_of_index

    # "1" stops late enough to land past the cutoff, and the code of its stop
    # time is itself in the domain so the residual mass is strictly positive
    machine = table_of({"0": 1, "1": 5000, bits_of_index(5000): 7})
    dist = induced_distribution(machine)
    split = split_halting_set(machine, dist, 5, 1)
    assert split.cutoffs[1] <= 5000
    assert split.residual == (("1", 5000),)
    assert 0 < split.residual_measure_hi < split.residual_bound == Fraction(1, 64)


def test_split_budget_rules(toy_vm, fixture_f):
    dist = induced_distribution(fixture_f)
    with pytest.raises(ConfigError):
        split_halting_set(fixture_f, dist, 2, 2, budget=10)
    opaque_dist = induced_distribution(toy_vm, budget=4096)
    with pytest.raises(ConfigError):
        split_halting_set(toy_vm, opaque_dist, 2, 2)
