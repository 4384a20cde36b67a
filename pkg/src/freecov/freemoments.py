"""Free and classical moment-cumulant relations.

``free_moment(p, a)`` is the sum over noncrossing partitions of {1..p} of
``prod(a[|B|-1] for B in pi)``; ``classical_moment`` sums the same products
over all set partitions.  Both depend on a partition only through its block
size multiset, so the default evaluation groups partitions by type and
weights each type by its exact integer count.  ``method="enumerate"`` walks
the partitions one by one instead.
"""

from __future__ import annotations

import math
from collections import Counter
from functools import lru_cache
from typing import Iterator, Sequence, Union

from .partitions import (
    MAX_NONCROSSING_ORDER,
    MAX_SET_PARTITION_ORDER,
    SizeLimitError,
    iter_noncrossing,
    iter_set_partitions,
)

__all__ = [
    "ArityError",
    "free_moment",
    "free_moments_up_to",
    "classical_moment",
    "classical_moments_up_to",
    "free_cumulants_from_moments",
    "noncrossing_type_counts",
    "partition_type_counts",
]

Scalar = Union[float, complex]


class ArityError(ValueError):
    """Raised when a cumulant sequence is too short for the requested order."""


def _integer_partitions(n: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for k in range(min(n, largest), 0, -1):
        for rest in _integer_partitions(n - k, k):
            yield (k,) + rest


@lru_cache(maxsize=None)
def noncrossing_type_counts(p: int) -> dict[tuple[int, ...], int]:
    """Number of noncrossing partitions of {1..p} for each block-size type.

    Kreweras: a type with ``m_i`` blocks of size ``i`` and ``b`` blocks in
    total is realised by ``p! / ((p - b + 1)! * prod(m_i!))`` partitions.
    """
    out = {}
    for sizes in _integer_partitions(p):
        mult = Counter(sizes)
        denom = math.factorial(p - len(sizes) + 1)
        for m in mult.values():
            denom *= math.factorial(m)
        out[sizes] = math.factorial(p) // denom
    return out


@lru_cache(maxsize=None)
def partition_type_counts(p: int) -> dict[tuple[int, ...], int]:
    """Number of set partitions of {1..p} for each block-size type."""
    out = {}
    for sizes in _integer_partitions(p):
        mult = Counter(sizes)
        denom = 1
        for size, m in mult.items():
            denom *= math.factorial(size) ** m * math.factorial(m)
        out[sizes] = math.factorial(p) // denom
    return out


def _fsum(values: Sequence[Scalar]) -> Scalar:
    if any(isinstance(v, complex) for v in values):
        return complex(math.fsum(v.real for v in values), math.fsum(v.imag for v in values))
    return math.fsum(values)


def _check(p: int, a: Sequence[Scalar], ceiling: int) -> None:
    if not 1 <= p <= ceiling:
        raise SizeLimitError(f"p must lie in [1, {ceiling}], got {p}")
    if len(a) < p:
        raise ArityError(f"need at least {p} cumulants, got {len(a)}")
    for v in a[:p]:
        if not math.isfinite(abs(v)):
            raise ValueError(f"non-finite cumulant {v!r}")


def _block_product(sizes: Sequence[int], a: Sequence[Scalar]) -> Scalar:
    prod: Scalar = 1.0
    for s in sizes:
        prod *= a[s - 1]
    return prod


def _by_type(counts: dict[tuple[int, ...], int], a: Sequence[Scalar]) -> Scalar:
    return _fsum([c * _block_product(sizes, a) for sizes, c in counts.items()])


def _by_enumeration(partitions, a: Sequence[Scalar]) -> Scalar:
    return _fsum([_block_product(pi.block_sizes(), a) for pi in partitions])


def free_moment(p: int, a: Sequence[Scalar], method: str = "types") -> Scalar:
    """Sum over NC(p) of the products of ``a[|B| - 1]`` over blocks ``B``."""
    _check(p, a, MAX_NONCROSSING_ORDER)
    if method == "types":
        return _by_type(noncrossing_type_counts(p), a)
    if method == "enumerate":
        return _by_enumeration(iter_noncrossing(p), a)
    raise ValueError(f"unknown method {method!r}")


def free_moments_up_to(P: int, a: Sequence[Scalar], method: str = "types") -> list[Scalar]:
    if len(a) < P:
        raise ArityError(f"need at least {P} cumulants, got {len(a)}")
    return [free_moment(p, a, method) for p in range(1, P + 1)]


def classical_moment(p: int, a: Sequence[Scalar], method: str = "types") -> Scalar:
    """Sum over all partitions of {1..p}; the Bell-type analogue of free_moment."""
    _check(p, a, MAX_SET_PARTITION_ORDER)
    if method == "types":
        return _by_type(partition_type_counts(p), a)
    if method == "enumerate":
        return _by_enumeration(iter_set_partitions(p), a)
    raise ValueError(f"unknown method {method!r}")


def classical_moments_up_to(P: int, a: Sequence[Scalar], method: str = "types") -> list[Scalar]:
    if len(a) < P:
        raise ArityError(f"need at least {P} cumulants, got {len(a)}")
    return [classical_moment(p, a, method) for p in range(1, P + 1)]


def free_cumulants_from_moments(m: Sequence[Scalar]) -> list[Scalar]:
    """Invert the free moment-cumulant relation order by order.

    The relation is unitriangular: ``m_p = a_p + (terms in a_1..a_{p-1})``,
    so ``a_p`` is ``m_p`` minus the moment computed with ``a_p`` set to 0.
    """
    if len(m) < 1:
        raise ValueError("need at least one moment")
    a: list[Scalar] = []
    for p, mp in enumerate(m, start=1):
        a.append(0.0)
        a[p - 1] = mp - free_moment(p, a)
    return a
