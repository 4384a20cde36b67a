import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freecov.freemoments import (
    ArityError,
    classical_moment,
    free_cumulants_from_moments,
    free_moment,
    free_moments_up_to,
    noncrossing_type_counts,
    partition_type_counts,
)
from freecov.partitions import catalan_number, enumerate_noncrossing, enumerate_set_partitions

from oracles import brute_moment

from collections import Counter


@pytest.mark.parametrize("p", range(1, 11))
def test_type_counts_match_enumeration(p):
    nc = Counter(tuple(sorted(pi.block_sizes(), reverse=True)) for pi in enumerate_noncrossing(p))
    assert nc == Counter(noncrossing_type_counts(p))
    if p <= 9:
        allp = Counter(tuple(sorted(pi.block_sizes(), reverse=True)) for pi in enumerate_set_partitions(p))
        assert allp == Counter(partition_type_counts(p))


def test_free_moment_examples():
    assert free_moment(2, (1, 1)) == 2
    assert free_moment(4, (1, 1, 1, 1)) == 14
    assert free_moment(4, (1, 0, 0, 0)) == 1


def test_batch_examples():
    assert free_moments_up_to(3, (1, 1, 1)) == [1, 2, 5]
    c = 0.7
    assert free_moments_up_to(3, (c, 0, 0)) == pytest.approx([c, c**2, c**3], rel=1e-15)
    # frozen from the brute-force oracle over NC(p) with a_k = 2^k
    assert free_moments_up_to(4, (2, 4, 8, 16)) == [2, 8, 40, 224]


def test_classical_examples():
    assert classical_moment(4, (1, 1, 1, 1)) == 15
    assert free_moment(4, (1, 1, 1, 1)) == 14
    assert classical_moment(2, (1, 1)) == 2
    # {123}: 3; three {ij}{k}: 2*1 each; {1}{2}{3}: 1
    assert classical_moment(3, (1, 2, 3)) == 10


@pytest.mark.parametrize("p", range(1, 8))
def test_against_brute_force(p):
    rng = np.random.default_rng(p)
    a = list(rng.uniform(-2, 2, size=p))
    assert free_moment(p, a) == pytest.approx(brute_moment(p, a, True), rel=1e-12, abs=1e-12)
    assert classical_moment(p, a) == pytest.approx(brute_moment(p, a, False), rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("p", range(1, 9))
def test_enumeration_method_agrees(p):
    a = [1.0 + 0.1 * k for k in range(p)]
    assert free_moment(p, a, method="enumerate") == pytest.approx(free_moment(p, a), rel=1e-13)
    assert classical_moment(p, a, method="enumerate") == pytest.approx(classical_moment(p, a), rel=1e-13)


@pytest.mark.parametrize("p", range(1, 13))
def test_all_ones_gives_catalan(p):
    assert free_moment(p, [1] * p) == catalan_number(p)


def test_arity_error():
    with pytest.raises(ArityError):
        free_moment(3, (1, 1))
    with pytest.raises(ArityError):
        classical_moment(4, (1, 1, 1))
    with pytest.raises(ArityError):
        free_moments_up_to(4, (1, 1))


def test_complex_cumulants():
    a = (1 + 1j, 0.5j)
    # NC(2): a_2 + a_1^2
    assert free_moment(2, a) == pytest.approx(a[1] + a[0] ** 2)


@given(
    st.lists(st.floats(-2, 2), min_size=8, max_size=8),
    st.floats(-3, 3).filter(lambda c: abs(c) > 1e-3),
    st.integers(1, 8),
)
@settings(max_examples=200)
def test_homogeneity(a, c, p):
    scaled = [c ** (k + 1) * a[k] for k in range(8)]
    for fn in (free_moment, classical_moment):
        base = fn(p, a)
        scale = sum(abs(x) for x in a) ** p + 1  # magnitude guard for cancellations
        assert fn(p, scaled) == pytest.approx(c**p * base, rel=1e-12, abs=1e-12 * abs(c) ** p * scale)


@given(st.lists(st.floats(0, 3), min_size=10, max_size=10), st.integers(1, 10))
@settings(max_examples=100)
def test_free_below_classical_for_nonnegative_cumulants(a, p):
    assert free_moment(p, a) <= classical_moment(p, a) * (1 + 1e-12)


def test_inverse_examples():
    assert free_cumulants_from_moments([1, 2, 5, 14]) == [1, 1, 1, 1]
    c = 1.3
    assert free_cumulants_from_moments([c, c**2, c**3]) == pytest.approx([c, 0, 0], abs=1e-14)


def test_round_trip_six():
    rng = np.random.default_rng(11)
    a = list(rng.uniform(-2, 2, size=6))
    back = free_cumulants_from_moments(free_moments_up_to(6, a))
    for x, y in zip(a, back):
        assert abs(x - y) <= 1e-9 * (1 + abs(x))


@given(st.lists(st.floats(-2, 2), min_size=1, max_size=8))
@settings(max_examples=200)
def test_round_trip_property(a):
    back = free_cumulants_from_moments(free_moments_up_to(len(a), a))
    assert all(abs(x - y) <= 1e-9 * (1 + abs(x)) for x, y in zip(a, back))


def test_non_finite_rejected():
    with pytest.raises(ValueError):
        free_moment(2, (1.0, math.inf))
