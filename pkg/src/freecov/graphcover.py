"""Two-cover set systems and brute-force checks of the graph inequalities.

A two-cover system is a family S_1..S_r of subsets of a ground set E where
every element lies in exactly two of the sets.  That is a loopless
multigraph in disguise: vertices are the sets, ground elements are edges,
and S_k is the set of edges incident to vertex k.

All lemma checks work on the sets relabelled in ascending order of size
(stable with respect to the original index).  The residual of the k-th set
in that order is ``|S_k minus (S_1 u ... u S_{k-1})|``; for k = 1 it is
``|S_1|``.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, combinations_with_replacement
from typing import Iterable, Iterator, Sequence

import numpy as np

from .partitions import SizeLimitError

__all__ = [
    "ValidationError",
    "PreconditionError",
    "TwoCoverSystem",
    "LemmaReport",
    "from_multigraph",
    "sorted_sizes",
    "sorted_residuals",
    "check_lemma21",
    "check_lemma22",
    "check_lemma23",
    "check_lemma25",
    "lemma24_precondition",
    "build_matching_lemma24",
    "random_two_cover",
    "enumerate_small_multigraphs",
]


class ValidationError(ValueError):
    pass


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class TwoCoverSystem:
    r: int
    ground_size: int
    sets: tuple[frozenset[int], ...]
    edges: tuple[tuple[int, int], ...] = ()

    def __post_init__(self) -> None:
        if len(self.sets) != self.r:
            raise ValidationError(f"expected {self.r} sets, got {len(self.sets)}")
        hits = [0] * (self.ground_size + 1)
        for s in self.sets:
            for e in s:
                if not 1 <= e <= self.ground_size:
                    raise ValidationError(f"element {e} outside ground set")
                hits[e] += 1
        bad = [e for e in range(1, self.ground_size + 1) if hits[e] != 2]
        if bad:
            raise ValidationError(f"elements {bad} are not covered exactly twice")

    def sizes(self) -> list[int]:
        return [len(s) for s in self.sets]

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "ground_size": self.ground_size,
            "sets": [sorted(s) for s in self.sets],
            "edges": [list(e) for e in self.edges],
        }


@dataclass(frozen=True)
class LemmaReport:
    holds: bool
    lhs: float
    rhs: float
    witness: str | None = None

    @property
    def slack(self) -> float:
        return self.lhs - self.rhs


def from_multigraph(r: int, edges: Iterable[Sequence[int]]) -> TwoCoverSystem:
    """Edge i (1-based) becomes ground element i, shared by its two endpoints."""
    if r < 1:
        raise ValidationError("r must be positive")
    edges = [tuple(e) for e in edges]
    incident: list[set[int]] = [set() for _ in range(r)]
    for i, e in enumerate(edges, start=1):
        if len(e) != 2:
            raise ValidationError(f"edge {e} is not a pair")
        u, v = e
        if u == v:
            raise ValidationError(f"loop edge {e}")
        if not (1 <= u <= r and 1 <= v <= r):
            raise ValidationError(f"edge {e} has an endpoint outside 1..{r}")
        incident[u - 1].add(i)
        incident[v - 1].add(i)
    return TwoCoverSystem(r, len(edges), tuple(frozenset(s) for s in incident), tuple(edges))


def _order(sys: TwoCoverSystem) -> list[int]:
    return sorted(range(sys.r), key=lambda k: len(sys.sets[k]))  # sorted() is stable


def sorted_sizes(sys: TwoCoverSystem) -> list[int]:
    return [len(sys.sets[k]) for k in _order(sys)]


def sorted_residuals(sys: TwoCoverSystem) -> list[int]:
    seen: set[int] = set()
    out = []
    for k in _order(sys):
        s = sys.sets[k]
        out.append(len(s - seen))
        seen |= s
    return out


# The _lemma* helpers take precomputed sorted sizes and residuals so the
# suite can sweep many (t, Lambda, k0) without recomputing them.

def _lemma21(sizes: Sequence[int], res: Sequence[int], t: float) -> tuple[float, float]:
    lhs = sum(min(t, x) for x in res)
    s1 = sizes[0] if sizes else 0
    rhs = min(t, s1) / 2 * len(sizes)
    return lhs, rhs


def _lemma23(sizes, res, lam: frozenset[int], k0: int) -> tuple[float, float]:
    lhs = sum(res[k - 1] for k in lam)
    head = range(1, k0)
    rhs = 0.5 * (sum(sizes[k - 1] for k in head if k in lam) - sum(sizes[k - 1] for k in head if k not in lam))
    return lhs, rhs


def _lemma25(sizes, res, lam: frozenset[int]) -> tuple[float, float]:
    lhs = sum(res[k - 1] for k in lam)
    rhs = 0.5 * sizes[0] * (len(lam) - (len(sizes) - len(lam)))
    return lhs, rhs


def check_lemma21(sys: TwoCoverSystem, t: float) -> LemmaReport:
    if t < 0:
        raise ValueError("t must be nonnegative")
    lhs, rhs = _lemma21(sorted_sizes(sys), sorted_residuals(sys), t)
    return LemmaReport(lhs >= rhs, lhs, rhs, f"t={t}")


def check_lemma22(sys: TwoCoverSystem) -> LemmaReport:
    lhs = sys.ground_size
    rhs = sum(sys.sizes()) / 2
    return LemmaReport(lhs == rhs, lhs, rhs)


def _as_index_set(lam: Iterable[int], r: int) -> frozenset[int]:
    lam = frozenset(lam)
    if any(not 1 <= k <= r for k in lam):
        raise ValueError(f"Lambda {sorted(lam)} is not a subset of 1..{r}")
    return lam


def check_lemma23(sys: TwoCoverSystem, lam: Iterable[int], k0: int) -> LemmaReport:
    """Indices in ``lam`` and ``k0`` refer to positions in the size-sorted order."""
    lam = _as_index_set(lam, sys.r)
    if not 1 <= k0 <= sys.r:
        raise ValueError(f"k0 must lie in [1, {sys.r}]")
    lhs, rhs = _lemma23(sorted_sizes(sys), sorted_residuals(sys), lam, k0)
    return LemmaReport(lhs >= rhs, lhs, rhs, f"Lambda={sorted(lam)}, k0={k0}")


def check_lemma25(sys: TwoCoverSystem, lam: Iterable[int]) -> LemmaReport:
    lam = _as_index_set(lam, sys.r)
    lhs, rhs = _lemma25(sorted_sizes(sys), sorted_residuals(sys), lam)
    return LemmaReport(lhs >= rhs, lhs, rhs, f"Lambda={sorted(lam)}")


def lemma24_precondition(m: int, lam1: Iterable[int], lam2: Iterable[int]) -> bool:
    """Every tail [l, m] meets lam1 in no more elements than it meets lam2."""
    in1 = set(lam1)
    in2 = set(lam2)
    c1 = c2 = 0
    for l in range(m, 0, -1):
        c1 += l in in1
        c2 += l in in2
        if c1 > c2:
            return False
    return True


def build_matching_lemma24(m: int, lam1: Iterable[int], lam2: Iterable[int]) -> dict[int, int]:
    """Send the i-th largest element of ``lam1`` to the i-th largest of ``lam2``."""
    if m < 1:
        raise ValueError("m must be positive")
    lam1 = sorted(set(lam1), reverse=True)
    lam2 = sorted(set(lam2), reverse=True)
    for k in lam1 + lam2:
        if not 1 <= k <= m:
            raise ValueError(f"element {k} outside 1..{m}")
    if not lemma24_precondition(m, lam1, lam2):
        raise PreconditionError(f"tail-count condition fails for {sorted(lam1)} -> {sorted(lam2)} on 1..{m}")
    return {k: v for k, v in zip(lam1, lam2)}


def random_two_cover(r: int, m: int, seed) -> TwoCoverSystem:
    """A loopless multigraph with m edges, each a uniform random vertex pair."""
    if r < 2 or m < 1:
        raise ValueError("need r >= 2 and m >= 1")
    rng = np.random.default_rng(seed)
    u = rng.integers(r, size=m)
    v = (u + rng.integers(1, r, size=m)) % r  # uniform over v != u
    edges = [(int(min(a, b)) + 1, int(max(a, b)) + 1) for a, b in zip(u, v)]
    return from_multigraph(r, edges)


def enumerate_small_multigraphs(r_max: int, m_max: int, r_min: int | None = None) -> Iterator[TwoCoverSystem]:
    """Every multiset of 1..m_max loopless edges on vertex sets of size r_min..r_max.

    ``r_min`` defaults to ``r_max``, i.e. graphs on exactly ``r_max`` vertices
    (isolated vertices allowed, they are empty sets).
    """
    if r_max > 4 or m_max > 6:
        raise SizeLimitError("exhaustive enumeration is limited to r_max <= 4, m_max <= 6")
    r_min = r_max if r_min is None else r_min
    for r in range(max(r_min, 2), r_max + 1):
        pairs = list(combinations(range(1, r + 1), 2))
        for m in range(1, m_max + 1):
            for edges in combinations_with_replacement(pairs, m):
                yield from_multigraph(r, edges)
