"""Set partitions and noncrossing partitions of {1, ..., p}.

Partitions are enumerated as restricted growth strings (RGS) in
lexicographic order, so every listing is deterministic and duplicate free.
All counting is done with Python integers.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import comb
from typing import Iterable, Iterator, Sequence

__all__ = [
    "SizeLimitError",
    "SetPartition",
    "enumerate_set_partitions",
    "iter_set_partitions",
    "enumerate_noncrossing",
    "iter_noncrossing",
    "is_noncrossing",
    "has_interval_block",
    "kernel",
    "bell_number",
    "catalan_number",
]

MAX_SET_PARTITION_ORDER = 14
MAX_NONCROSSING_ORDER = 16
MAX_COUNT_ORDER = 40


class SizeLimitError(ValueError):
    """Raised when a request exceeds an enumeration ceiling."""


@dataclass(frozen=True)
class SetPartition:
    """A partition of ``{1, ..., p}`` stored in canonical form.

    Blocks are sorted by their smallest element and each block is ascending,
    so two partitions are equal exactly when their ``blocks`` tuples are.
    """

    p: int
    blocks: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        if self.p < 1:
            raise ValueError(f"ground set size must be positive, got {self.p}")
        blocks = tuple(sorted((tuple(sorted(b)) for b in self.blocks), key=lambda b: b[0] if b else 0))
        seen: list[int] = []
        for b in blocks:
            if not b:
                raise ValueError("empty block")
            seen.extend(b)
        if sorted(seen) != list(range(1, self.p + 1)):
            raise ValueError(f"blocks {blocks} do not partition {{1..{self.p}}}")
        object.__setattr__(self, "blocks", blocks)

    @classmethod
    def from_blocks(cls, blocks: Iterable[Iterable[int]]) -> "SetPartition":
        blocks = [list(b) for b in blocks]
        p = sum(len(b) for b in blocks)
        return cls(p, tuple(tuple(b) for b in blocks))

    @classmethod
    def from_rgs(cls, rgs: Sequence[int]) -> "SetPartition":
        """Build from a restricted growth string with 0-based block labels."""
        groups: dict[int, list[int]] = {}
        for i, label in enumerate(rgs, start=1):
            groups.setdefault(label, []).append(i)
        return cls(len(rgs), tuple(tuple(g) for g in groups.values()))

    def __len__(self) -> int:
        return len(self.blocks)

    def block_sizes(self) -> tuple[int, ...]:
        return tuple(len(b) for b in self.blocks)

    def block_labels(self) -> tuple[int, ...]:
        """0-based block index of each element 1..p (the RGS)."""
        labels = [0] * self.p
        for idx, block in enumerate(self.blocks):
            for i in block:
                labels[i - 1] = idx
        return tuple(labels)

    def to_list(self) -> list[list[int]]:
        return [list(b) for b in self.blocks]

    def __str__(self) -> str:
        return "{" + ",".join("{" + ",".join(map(str, b)) + "}" for b in self.blocks) + "}"


def _check_order(p: int, ceiling: int) -> None:
    if not 1 <= p <= ceiling:
        raise SizeLimitError(f"p must lie in [1, {ceiling}], got {p}")


def _rgs_all(p: int) -> Iterator[list[int]]:
    rgs = [0] * p

    def rec(i: int, nblocks: int) -> Iterator[list[int]]:
        if i == p:
            yield rgs
            return
        for label in range(nblocks + 1):
            rgs[i] = label
            yield from rec(i + 1, max(nblocks, label + 1))

    rgs[0] = 0
    yield from rec(1, 1)


def iter_set_partitions(p: int) -> Iterator[SetPartition]:
    """Lazily yield every partition of ``{1..p}`` in RGS-lexicographic order."""
    _check_order(p, MAX_SET_PARTITION_ORDER)
    for rgs in _rgs_all(p):
        yield SetPartition.from_rgs(rgs)


def enumerate_set_partitions(p: int) -> list[SetPartition]:
    return list(iter_set_partitions(p))


def _rgs_noncrossing(p: int) -> Iterator[list[int]]:
    # A block becomes closed once a later element joins a block below it on
    # the stack of open blocks; joining a closed block would create a crossing.
    rgs = [0] * p

    def rec(i: int, stack: list[int], nblocks: int) -> Iterator[list[int]]:
        if i == p:
            yield rgs
            return
        for label in range(nblocks + 1):
            if label < nblocks:
                if label not in stack:
                    continue
                pos = stack.index(label)
                rgs[i] = label
                yield from rec(i + 1, stack[: pos + 1], nblocks)
            else:
                rgs[i] = label
                yield from rec(i + 1, stack + [label], nblocks + 1)

    yield from rec(1, [0], 1)


def iter_noncrossing(p: int) -> Iterator[SetPartition]:
    """Lazily yield NC(p) in the same order as :func:`iter_set_partitions`."""
    _check_order(p, MAX_NONCROSSING_ORDER)
    for rgs in _rgs_noncrossing(p):
        yield SetPartition.from_rgs(rgs)


def enumerate_noncrossing(p: int) -> list[SetPartition]:
    return list(iter_noncrossing(p))


def is_noncrossing(pi: SetPartition) -> bool:
    """False iff some a < b < c < d has a, c in one block and b, d in another."""
    labels = pi.block_labels()
    for x in range(len(pi.blocks)):
        for y in range(x + 1, len(pi.blocks)):
            # look for the alternating pattern x y x y (or y x y x)
            seq = [lab for lab in labels if lab == x or lab == y]
            switches = sum(1 for u, v in zip(seq, seq[1:]) if u != v)
            if switches >= 3:
                return False
    return True


def has_interval_block(pi: SetPartition) -> bool:
    return any(b[-1] - b[0] + 1 == len(b) for b in pi.blocks)


def kernel(word: Sequence[int]) -> SetPartition:
    """Partition of positions 1..p grouping equal letters of ``word``."""
    if len(word) < 1:
        raise ValueError("word must be nonempty")
    first_seen: dict[int, int] = {}
    rgs = [first_seen.setdefault(v, len(first_seen)) for v in word]
    return SetPartition.from_rgs(rgs)


@lru_cache(maxsize=None)
def bell_number(p: int) -> int:
    """Bell number via the Bell triangle."""
    if not 0 <= p <= MAX_COUNT_ORDER:
        raise SizeLimitError(f"p must lie in [0, {MAX_COUNT_ORDER}], got {p}")
    if p == 0:
        return 1
    row = [1]
    for _ in range(p - 1):
        nxt = [row[-1]]
        for v in row:
            nxt.append(nxt[-1] + v)
        row = nxt
    return row[-1]


def catalan_number(p: int) -> int:
    if not 0 <= p <= MAX_COUNT_ORDER:
        raise SizeLimitError(f"p must lie in [0, {MAX_COUNT_ORDER}], got {p}")
    return comb(2 * p, p) // (p + 1)
