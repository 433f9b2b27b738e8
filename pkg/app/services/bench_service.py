"""Benchmark service - timing of the exact split methods across cache depths"""
import logging
import time
from collections.abc import Iterable

from app.models.cards import RANKS, rank_label
from app.schemas.results import BenchRow
from app.schemas.rules import RuleSet
from app.services.dealer_service import make_dealer_cache
from app.services.split_service import METHOD_HANDS, exact_split, prepare_split_shoe

logger = logging.getLogger(__name__)

# Depth 0 runs without a dealer cache
DEPTH_SWEEP = (0, 2, 4, 6, 8, 10, 12)


def bench_split(up: int, pairs: list[int], rules: RuleSet, method: str, depth: int | None) -> BenchRow:
    """
    Time one exact split sweep over a list of pairs against one up card.

    Every pair gets a fresh dealer cache of the given depth (None sizes it
    from the configured byte budget).
    """
    hits = misses = hands = unique = 0
    filled = slots = 0
    used_depth = 0
    start = time.perf_counter()
    for pair in pairs:
        shoe = prepare_split_shoe(rules.decks, up, pair)
        cache = make_dealer_cache(shoe, up, rules, depth=depth)
        result = exact_split(shoe, up, pair, rules, cache, method)
        stats = cache.stats()
        hits += stats.hits
        misses += stats.misses
        filled += stats.filled
        slots += stats.slots
        used_depth = stats.depth
        hands += result.hands_enumerated
        unique += result.unique_hands
    elapsed = time.perf_counter() - start

    logger.info(
        "Bench vs %s h=%d %s depth=%d: %.3fs, %d hits, %d misses",
        rank_label(up), rules.max_hands, method, used_depth, elapsed, hits, misses,
    )
    return BenchRow(
        up=rank_label(up),
        pairs=",".join(rank_label(p) for p in pairs),
        max_hands=rules.max_hands,
        method=method,
        depth=used_depth,
        elapsed=elapsed,
        hands_enumerated=hands,
        unique_hands=unique,
        hits=hits,
        misses=misses,
        fill_ratio=filled / slots if slots else 0.0,
    )


def run_bench(
    up: int,
    pairs: list[int] | None = None,
    max_hands: Iterable[int] = (2,),
    methods: Iterable[str] = (METHOD_HANDS,),
    depths: Iterable[int | None] = (None,),
    rules: RuleSet | None = None,
) -> list[BenchRow]:
    """
    Benchmark grid: every max_hands x method x cache depth combination.

    Args:
        up: Dealer up card
        pairs: Split pairs (all ten by default)
        max_hands: Hand limits to time
        methods: "hands" and/or "recursive"
        depths: Cache depths; 0 disables the cache, None uses the byte budget
        rules: Base rules; max_hands is overridden per row

    Returns:
        One BenchRow per combination, in loop order
    """
    base = rules or RuleSet()
    pairs = list(pairs or RANKS)
    rows = []
    for h in max_hands:
        variant = RuleSet(**{**base.model_dump(), "max_hands": h})
        for method in methods:
            for depth in depths:
                rows.append(bench_split(up, pairs, variant, method, depth))
    return rows
