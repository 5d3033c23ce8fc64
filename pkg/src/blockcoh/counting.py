"""Upper bounds on the number of Kraus operators, in exact integer arithmetic.

For a partition (d_1, ..., d_k), a Kraus operator of the plain block class
has at most one nonzero block per column partition, and counting the ways to
place nonzero entries level by level gives the recurrence

    C_i = [ sum_j (2**(d_j * d_i) - 1) ] * C_{i+1},    C_{k+1} = 1,

with the bound equal to sum_i C_i.  For the strict class the nonzero blocks
of one operator occupy distinct rows, so the level counts run over injective
row choices:

    C_p = sum over injective tuples (i_p, ..., i_k) of
          prod_{l=p..k} (2**(d_{i_l} * d_l) - 1).

All-ones partitions collapse these to the closed forms d(d**d - 1)/(d - 1)
and sum_k d!/(k-1)! of the rank-one theory.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .blockcore import BlockPartition

# Injective-tuple enumeration grows factorially with the block count.
MAX_SBIO_BLOCKS = 8


@dataclass(frozen=True)
class BoundReport:
    """Per-level counts C_1..C_k and their total for one partition and class."""

    partition: BlockPartition
    kind: str                      # 'bio' | 'sbio'
    per_level: tuple[int, ...]
    total: int

    def __post_init__(self):
        if self.total != sum(self.per_level):
            raise ValueError("total does not match the per-level counts")
        if any(c < 1 for c in self.per_level):
            raise ValueError("every per-level count must be at least 1")


def bio_bound(partition: BlockPartition) -> BoundReport:
    """Evaluate the column-pattern recurrence, exactly."""
    dims = partition.dims
    k = len(dims)
    per_level = [0] * k
    c_next = 1
    for i in range(k, 0, -1):
        factor = sum(2 ** (dims[j] * dims[i - 1]) - 1 for j in range(k))
        c_next = factor * c_next
        per_level[i - 1] = c_next
    return BoundReport(partition, "bio", tuple(per_level), sum(per_level))


def sbio_bound(partition: BlockPartition, max_blocks: int = MAX_SBIO_BLOCKS) -> BoundReport:
    """Sum the injective-tuple products, exactly, by direct enumeration."""
    dims = partition.dims
    k = len(dims)
    if k > max_blocks:
        raise ValueError(
            f"partition has {k} blocks; enumeration is capped at {max_blocks}"
        )
    per_level = []
    for p in range(1, k + 1):
        levels = range(p - 1, k)
        total = 0
        for rows in itertools.permutations(range(k), k - p + 1):
            term = 1
            for row, level in zip(rows, levels):
                term *= 2 ** (dims[row] * dims[level]) - 1
            total += term
        per_level.append(total)
    return BoundReport(partition, "sbio", tuple(per_level), sum(per_level))


def rank_one_bio_total(d: int) -> int:
    """Closed form d (d**d - 1) / (d - 1) for the all-ones partition."""
    return d * (d**d - 1) // (d - 1)


def rank_one_sbio_total(d: int) -> int:
    """Closed form sum_{k=1..d} d! / (k-1)! for the all-ones partition."""
    return sum(math.factorial(d) // math.factorial(k - 1) for k in range(1, d + 1))


def rank_one_reduction_check(d: int) -> bool:
    """True when both bounds on the all-ones partition match their closed forms."""
    if not 2 <= d <= 8:
        raise ValueError(f"supported dimensions are 2..8, got {d}")
    ones = BlockPartition([1] * d)
    return (
        bio_bound(ones).total == rank_one_bio_total(d)
        and sbio_bound(ones).total == rank_one_sbio_total(d)
    )
