import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freecov.partitions import (
    SetPartition,
    SizeLimitError,
    bell_number,
    catalan_number,
    enumerate_noncrossing,
    enumerate_set_partitions,
    has_interval_block,
    is_noncrossing,
    kernel,
)

from oracles import catalan_by_recurrence, noncrossing_by_interval_removal, partitions_by_insertion


def P(*blocks):
    return SetPartition.from_blocks(blocks)


def as_set(parts):
    return {SetPartition.from_blocks(b) for b in parts}


def test_canonical_form_is_enforced():
    assert P([4, 2], [3, 1]) == P([1, 3], [2, 4])
    assert P([4, 2], [3, 1]).blocks == ((1, 3), (2, 4))


@pytest.mark.parametrize("blocks", [[[1], [1, 2]], [[1], [3]], [[1, 2], []]])
def test_invalid_partitions_rejected(blocks):
    with pytest.raises(ValueError):
        SetPartition.from_blocks(blocks)


def test_singleton():
    assert enumerate_set_partitions(1) == [P([1])]


@pytest.mark.parametrize("p", range(1, 9))
def test_set_partitions_match_insertion_oracle(p):
    got = enumerate_set_partitions(p)
    assert len(got) == len(set(got))
    assert set(got) == as_set(partitions_by_insertion(p))


def test_set_partition_counts():
    assert len(enumerate_set_partitions(3)) == 5
    assert len(enumerate_set_partitions(4)) == 15


def test_rgs_order_is_lexicographic():
    rgs = [pi.block_labels() for pi in enumerate_set_partitions(5)]
    assert rgs == sorted(rgs)


def test_noncrossing_small():
    assert enumerate_noncrossing(2) == [P([1, 2]), P([1], [2])]
    nc4 = enumerate_noncrossing(4)
    assert len(nc4) == 14
    assert set(enumerate_set_partitions(4)) - set(nc4) == {P([1, 3], [2, 4])}
    assert len(enumerate_noncrossing(6)) == 132 == catalan_by_recurrence(6)


@pytest.mark.parametrize("p", range(1, 11))
def test_noncrossing_equals_filtered_enumeration(p):
    assert enumerate_noncrossing(p) == [pi for pi in enumerate_set_partitions(p) if is_noncrossing(pi)]


@pytest.mark.parametrize("p", [0, 15])
def test_set_partition_size_limit(p):
    with pytest.raises(SizeLimitError):
        enumerate_set_partitions(p)


@pytest.mark.parametrize("p", [0, 17])
def test_noncrossing_size_limit(p):
    with pytest.raises(SizeLimitError):
        enumerate_noncrossing(p)


def test_is_noncrossing_examples():
    assert not is_noncrossing(P([1, 3], [2, 4]))
    assert is_noncrossing(P([1, 4], [2, 3]))
    for p in range(1, 8):
        assert is_noncrossing(SetPartition.from_blocks([[i] for i in range(1, p + 1)]))


@pytest.mark.parametrize("p", range(1, 9))
def test_is_noncrossing_agrees_with_interval_removal(p):
    for pi in enumerate_set_partitions(p):
        assert is_noncrossing(pi) == noncrossing_by_interval_removal(pi.to_list())


def test_is_noncrossing_agrees_with_interval_removal_p10():
    for pi in enumerate_set_partitions(10):
        assert is_noncrossing(pi) == noncrossing_by_interval_removal(pi.to_list())


def test_interval_block_examples():
    assert not has_interval_block(P([1, 3], [2, 4]))
    assert has_interval_block(P([1, 4], [2, 3]))


@pytest.mark.parametrize("p", range(1, 11))
def test_every_noncrossing_partition_has_an_interval_block(p):
    assert all(has_interval_block(pi) for pi in enumerate_noncrossing(p))


def test_kernel_examples():
    assert kernel((7, 3, 7)) == P([1, 3], [2])
    assert kernel((5, 5, 5, 5)) == P([1, 2, 3, 4])
    k = kernel((1, 2, 1, 2))
    assert k == P([1, 3], [2, 4]) and not is_noncrossing(k)


@pytest.mark.parametrize("p", range(1, 8))
def test_kernel_is_surjective(p):
    for pi in enumerate_set_partitions(p):
        word = [lab + 1 for lab in pi.block_labels()]
        assert kernel(word) == pi


@given(st.lists(st.integers(1, 6), min_size=1, max_size=10))
@settings(max_examples=200)
def test_kernel_definition(word):
    pi = kernel(word)
    labels = pi.block_labels()
    for i in range(len(word)):
        for j in range(len(word)):
            assert (labels[i] == labels[j]) == (word[i] == word[j])


def test_bell_numbers():
    assert bell_number(0) == 1
    assert bell_number(1) == 1
    assert bell_number(4) == 15
    assert bell_number(10) == 115975
    assert bell_number(40) == 157450588391204931289324344702531067


def test_catalan_numbers():
    assert catalan_number(1) == 1
    assert catalan_number(4) == 14
    assert catalan_number(8) == 1430
    assert all(catalan_number(n) == catalan_by_recurrence(n) for n in range(0, 41))


@pytest.mark.parametrize("p", range(1, 11))
def test_counts_match_enumeration(p):
    assert len(enumerate_set_partitions(p)) == bell_number(p)
    assert len(enumerate_noncrossing(p)) == catalan_number(p)


def test_count_limits():
    with pytest.raises(SizeLimitError):
        bell_number(41)
    with pytest.raises(SizeLimitError):
        catalan_number(-1)
