"""Perfect addressing of sorted card multisets, the dealer cache and the hand index"""
import logging
import math
from collections.abc import Callable, Sequence

import numpy as np

from app.models.cards import RANKS_DESC, TEN, Shoe
from app.models.play_hand import DealerDistribution
from app.schemas.results import CacheStats

logger = logging.getLogger(__name__)

# Card states per position: 0 (no card) and ranks 1..10
STATES = TEN + 1
INT64_LIMIT = 2**63


def t_value(j: int, n: int) -> int:
    """
    Table length for j items of n states each: T_j(n) = C(n + j - 1, j).

    Raises:
        ValueError: for j < 1, n outside 0..11, or a length beyond 64-bit integers
    """
    if j < 1:
        raise ValueError(f"Address depth must be at least 1, got {j}")
    if not 0 <= n <= STATES:
        raise ValueError(f"State count must be in 0..{STATES}, got {n}")
    value = math.comb(n + j - 1, j)
    if value >= INT64_LIMIT:
        raise ValueError(f"T_{j}({n}) does not fit a 64-bit address")
    return value


class AddressPlan:
    """Precomputed T_i(N) table for i = 1..j and N = 0..11"""

    def __init__(self, j: int) -> None:
        if j < 1:
            raise ValueError(f"Address depth must be at least 1, got {j}")
        self.j = j
        self.t_table = np.zeros((j + 1, STATES + 1), dtype=np.int64)
        for i in range(1, j + 1):
            for n in range(STATES + 1):
                self.t_table[i, n] = t_value(i, n)
        self._rows: list[list[int]] = self.t_table.tolist()
        self.size = int(self.t_table[j, STATES])

    def address(self, removals: Sequence[int]) -> int:
        """
        K_j of a non-increasing sequence of ranks (0 = no card), 1-based.

        Shorter sequences are padded with zeros.
        """
        assert len(removals) <= self.j, "more removals than the address depth"
        rows = self._rows
        j = self.j
        address = 1
        previous = TEN
        for k, x in enumerate(removals, start=1):
            assert 0 <= x <= previous, "removals must be non-increasing ranks"
            previous = x
            address += rows[j - k + 1][x]
        return address

    def slot(self, counts: Sequence[int]) -> int | None:
        """
        0-based slot for a multiset given as per-rank counts (index 0 unused).

        Returns None when the multiset is longer than j or has a negative count.
        """
        rows = self._rows
        j = self.j
        slot = 0
        k = 0
        for rank in RANKS_DESC:
            c = counts[rank]
            if c == 0:
                continue
            if c < 0 or k + c > j:
                return None
            for _ in range(c):
                k += 1
                slot += rows[j - k + 1][rank]
        return slot


def plan_for_budget(budget_bytes: int, dtype: str = "float64", max_depth: int = 24) -> int:
    """
    Largest depth j whose slot table fits the memory budget.

    Each slot stores six dealer probabilities. A budget below the smallest
    table returns 0, which disables the cache.
    """
    slot_bytes = 6 * np.dtype(dtype).itemsize
    depth = 0
    for j in range(1, max_depth + 1):
        if t_value(j, STATES) * slot_bytes > budget_bytes:
            break
        depth = j
    if depth == 0:
        logger.warning("Cache budget of %d bytes is below one table; dealer cache disabled", budget_bytes)
    return depth


class DealerCache:
    """
    Dealer distributions addressed by the cards removed since a baseline shoe.

    Slots are rows of a (T_j(11), 6) array; NaN marks an empty slot. Depth 0
    disables storage and every request goes to the producer.
    """

    def __init__(
        self,
        baseline: Shoe,
        producer: Callable[[Shoe], DealerDistribution],
        depth: int,
        dtype: str = "float64",
    ) -> None:
        self.baseline = list(baseline.counts)
        self.baseline_total = baseline.total
        self.producer = producer
        self.dtype = dtype
        self.hits = 0
        self.misses = 0
        self.bypasses = 0
        if depth > 0:
            self.plan: AddressPlan | None = AddressPlan(depth)
            self.slots = np.full((self.plan.size, 6), np.nan, dtype=dtype)
        else:
            self.plan = None
            self.slots = np.empty((0, 6), dtype=dtype)

    @property
    def depth(self) -> int:
        return self.plan.j if self.plan else 0

    def lookup_or_compute(
        self,
        removals: Sequence[int],
        compute: Callable[[], DealerDistribution],
    ) -> DealerDistribution:
        """Fetch the distribution stored for a sorted removal multiset, computing it once."""
        if self.plan is None or len(removals) > self.plan.j:
            self.bypasses += 1
            return compute()
        return self._fetch(self.plan.address(removals) - 1, compute)

    def distribution(self, shoe: Shoe) -> DealerDistribution:
        """Dealer distribution for the shoe, through the cache when it is addressable."""
        plan = self.plan
        if plan is None or not 0 <= self.baseline_total - shoe.total <= plan.j:
            self.bypasses += 1
            return self.producer(shoe)
        removed = [b - c for b, c in zip(self.baseline, shoe.counts)]
        slot = plan.slot(removed)
        if slot is None:
            self.bypasses += 1
            return self.producer(shoe)
        return self._fetch(slot, lambda: self.producer(shoe))

    def _fetch(self, slot: int, compute: Callable[[], DealerDistribution]) -> DealerDistribution:
        row = self.slots[slot]
        if math.isnan(row[0]):
            self.misses += 1
            dist = compute()
            row[:] = dist
            return dist
        self.hits += 1
        return DealerDistribution(*row.tolist())

    def stats(self) -> CacheStats:
        slots = self.plan.size if self.plan else 0
        filled = int(np.count_nonzero(~np.isnan(self.slots[:, 0]))) if slots else 0
        return CacheStats(
            depth=self.depth,
            slots=slots,
            bytes=int(self.slots.nbytes),
            dtype=self.dtype,
            hits=self.hits,
            misses=self.misses,
            bypasses=self.bypasses,
            filled=filled,
            fill_ratio=filled / slots if slots else 0.0,
        )


class HandIndex:
    """Catalog positions addressed by hand composition; -1 means unseen"""

    def __init__(self, depth: int = 14) -> None:
        self.plan = AddressPlan(depth)
        self.entries = np.full(self.plan.size, -1, dtype=np.int32)

    def get(self, card_counts: Sequence[int]) -> tuple[int, int]:
        """Return (slot, catalog position) for a hand's per-rank counts."""
        slot = self.plan.slot(card_counts)
        assert slot is not None, "hand longer than the hand index depth"
        return slot, int(self.entries[slot])

    def put(self, slot: int, position: int) -> None:
        self.entries[slot] = position
