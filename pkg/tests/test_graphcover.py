from itertools import chain, combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from freecov.graphcover import (
    PreconditionError,
    TwoCoverSystem,
    ValidationError,
    build_matching_lemma24,
    check_lemma21,
    check_lemma22,
    check_lemma23,
    check_lemma25,
    enumerate_small_multigraphs,
    from_multigraph,
    lemma24_precondition,
    random_two_cover,
    sorted_residuals,
)
from freecov.partitions import SizeLimitError

TRIANGLE = from_multigraph(3, [(1, 2), (2, 3), (1, 3)])
PARALLEL = from_multigraph(2, [(1, 2), (1, 2)])
PATH = from_multigraph(3, [(1, 2), (2, 3)])


def subsets(r):
    return [set(c) for c in chain.from_iterable(combinations(range(1, r + 1), k) for k in range(r + 1))]


def test_from_multigraph():
    assert TRIANGLE.ground_size == 3
    assert TRIANGLE.sizes() == [2, 2, 2]
    assert PARALLEL.sets == (frozenset({1, 2}), frozenset({1, 2}))
    with pytest.raises(ValidationError):
        from_multigraph(2, [(1, 1)])
    with pytest.raises(ValidationError):
        from_multigraph(2, [(1, 3)])


def test_two_cover_invariant_enforced():
    with pytest.raises(ValidationError):
        TwoCoverSystem(2, 1, (frozenset({1}), frozenset()))


def test_residuals():
    assert sorted_residuals(TRIANGLE) == [2, 1, 0]
    assert sorted_residuals(PARALLEL) == [2, 0]
    assert sorted_residuals(PATH) == [1, 1, 0]


def test_lemma21_examples():
    rep = check_lemma21(TRIANGLE, 1)
    assert (rep.lhs, rep.rhs, rep.holds) == (2, 1.5, True)
    rep = check_lemma21(PARALLEL, 2)
    assert (rep.lhs, rep.rhs, rep.holds) == (2, 2, True)
    for sys in (TRIANGLE, PARALLEL, PATH):
        rep = check_lemma21(sys, 0)
        assert (rep.lhs, rep.rhs, rep.holds) == (0, 0, True)


def test_lemma22_examples():
    assert check_lemma22(TRIANGLE).lhs == 3 and check_lemma22(TRIANGLE).holds
    assert check_lemma22(PARALLEL).rhs == 2
    sys = random_two_cover(8, 16, 5)
    rep = check_lemma22(sys)
    assert rep.lhs == 16 and rep.rhs == 16 and rep.holds


def test_lemma23_examples():
    for sys in (TRIANGLE, PARALLEL, PATH):
        rep = check_lemma23(sys, range(1, sys.r + 1), 1)
        assert rep.lhs == sys.ground_size and rep.rhs == 0 and rep.holds
    rep = check_lemma23(TRIANGLE, {1}, 3)
    assert (rep.lhs, rep.rhs, rep.holds) == (2, 0, True)


def test_lemma25_examples():
    rep = check_lemma25(TRIANGLE, set())
    assert rep.lhs == 0 and rep.rhs == -0.5 * 2 * 3 and rep.holds
    rep = check_lemma25(TRIANGLE, {1, 2, 3})
    assert rep.lhs == 3 and rep.rhs == 3 and rep.holds


def test_lemma24_examples():
    assert build_matching_lemma24(5, {2, 5}, {2, 5}) == {2: 2, 5: 5}
    assert build_matching_lemma24(2, {1}, {2}) == {1: 2}
    with pytest.raises(PreconditionError):
        build_matching_lemma24(3, {2, 3}, {3})


@pytest.mark.parametrize("m", range(1, 8))
def test_lemma24_exhaustive(m):
    for lam1 in subsets(m):
        for lam2 in subsets(m):
            if lemma24_precondition(m, lam1, lam2):
                f = build_matching_lemma24(m, lam1, lam2)
                keys = sorted(f)
                assert set(keys) == lam1 and set(f.values()) <= lam2
                assert all(f[a] < f[b] for a, b in zip(keys, keys[1:]))
                assert all(f[k] >= k for k in keys)
            else:
                with pytest.raises(PreconditionError):
                    build_matching_lemma24(m, lam1, lam2)


def test_random_two_cover():
    sys = random_two_cover(2, 3, 123)
    assert sys.edges == ((1, 2),) * 3
    assert random_two_cover(5, 10, 1) == random_two_cover(5, 10, 1)
    for seed in range(1000):
        assert check_lemma22(random_two_cover(5, 10, seed)).holds


def test_enumerate_small_multigraphs_counts():
    assert len(list(enumerate_small_multigraphs(2, 2))) == 2
    assert len(list(enumerate_small_multigraphs(3, 1))) == 3
    # multisets of size 1..6 over the 6 vertex pairs of K4
    assert len(list(enumerate_small_multigraphs(4, 6))) == sum(
        len(list(combinations(range(6 + m - 1), m))) for m in range(1, 7)
    )
    with pytest.raises(SizeLimitError):
        list(enumerate_small_multigraphs(5, 2))


def test_parallel_pair_in_exhaustive_set_reaches_equality():
    systems = list(enumerate_small_multigraphs(2, 6))
    assert PARALLEL in systems
    rep = check_lemma21(PARALLEL, 2)
    assert rep.lhs == rep.rhs


def test_exhaustive_lemmas_small():
    t_grid = [k / 2 for k in range(15)]
    for sys in enumerate_small_multigraphs(4, 6, r_min=2):
        assert sum(sorted_residuals(sys)) == sys.ground_size
        assert check_lemma22(sys).holds
        for t in t_grid:
            assert check_lemma21(sys, t).holds
        for lam in subsets(sys.r):
            assert check_lemma25(sys, lam).holds
            for k0 in range(1, sys.r + 1):
                assert check_lemma23(sys, lam, k0).holds


edges_strategy = st.integers(2, 8).flatmap(
    lambda r: st.tuples(
        st.just(r),
        st.lists(
            st.tuples(st.integers(1, r), st.integers(1, r)).filter(lambda e: e[0] != e[1]),
            min_size=1,
            max_size=16,
        ),
    )
)


@given(edges_strategy, st.integers(0, 34).map(lambda k: k / 2), st.data())
@settings(max_examples=300)
def test_lemmas_on_random_multigraphs(graph, t, data):
    r, edges = graph
    sys = from_multigraph(r, edges)
    assert check_lemma22(sys).holds
    assert check_lemma21(sys, t).holds
    lam = data.draw(st.sets(st.integers(1, r)))
    k0 = data.draw(st.integers(1, r))
    assert check_lemma23(sys, lam, k0).holds
    assert check_lemma25(sys, lam).holds
