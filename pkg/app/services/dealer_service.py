"""Dealer service - final-total distributions conditional on no dealer natural"""
import logging
from collections.abc import Callable

from app.config import settings
from app.models.cards import ACE, RANKS, Shoe, natural_rank
from app.models.play_hand import DealerDistribution
from app.schemas.rules import RuleSet
from app.utils.addressing import DealerCache, plan_for_budget

logger = logging.getLogger(__name__)

_BUST = (0.0, 0.0, 0.0, 0.0, 0.0, 1.0)
_FINAL = {
    17: (1.0, 0.0, 0.0, 0.0, 0.0, 0.0),
    18: (0.0, 1.0, 0.0, 0.0, 0.0, 0.0),
    19: (0.0, 0.0, 1.0, 0.0, 0.0, 0.0),
    20: (0.0, 0.0, 0.0, 1.0, 0.0, 0.0),
    21: (0.0, 0.0, 0.0, 0.0, 1.0, 0.0),
}
# Per-rank digit of the drawn-card code; a rank never has 256 cards in a shoe
_STEP = [0] + [1 << (8 * (rank - 1)) for rank in RANKS]

Weigher = Callable[[list[int], int], list[float]]


def dealer_distribution(shoe: Shoe, up: int, rules: RuleSet) -> DealerDistribution:
    """
    Exact distribution of the dealer's final total.

    The shoe must already exclude the up card. The hole card never completes
    a natural; its probabilities are renormalized over the other ranks.
    """
    return _play_out(shoe, up, rules.dealer_hits_soft17, None)


def hole_conditioned_card_probs(counts: list[int], n: int, s: int, i: int) -> list[float]:
    """
    Dealer card probabilities p(k, i, s) when i - 1 unseen player cards are known not to be s.

    Args:
        counts: per-rank counts of the visible shoe
        n: number of cards in the visible shoe
        s: split card
        i: number of split hands being modelled

    Returns:
        Probabilities indexed by rank (index 0 unused), summing to 1
    """
    hidden = i - 1
    n_s = counts[s]
    if n - hidden <= 0 or n - n_s < hidden:
        return [c / n for c in counts]
    other = (n - n_s - hidden) / (n - n_s) if n > n_s else 1.0
    denominator = n - hidden
    probs = [0.0] * len(counts)
    for k in RANKS:
        c = counts[k]
        if c:
            probs[k] = c / denominator if k == s else c / denominator * other
    return probs


def dealer_distribution_hole_conditioned(
    shoe: Shoe,
    up: int,
    s: int,
    i: int,
    rules: RuleSet,
) -> DealerDistribution:
    """Dealer distribution where every draw uses p(k, i, s) instead of n_k/n."""
    if not 2 <= i <= 4:
        raise ValueError(f"Hole-conditioned dealer needs 2 <= i <= 4, got {i}")
    return _play_out(
        shoe,
        up,
        rules.dealer_hits_soft17,
        lambda counts, n: hole_conditioned_card_probs(counts, n, s, i),
    )


def _play_out(shoe: Shoe, up: int, hits_soft17: bool, weigh: Weigher | None) -> DealerDistribution:
    counts = list(shoe.counts)
    natural = natural_rank(up)
    memo: dict[int, tuple[float, ...]] = {}

    def draw(hard: int, has_ace: bool, n: int, key: int) -> tuple[float, ...]:
        total = hard + 10 if has_ace and hard <= 11 else hard
        if total > 21:
            return _BUST
        if total >= 17 and not (hits_soft17 and total == 17 and has_ace and hard == 7):
            return _FINAL[total]
        cached = memo.get(key)
        if cached is not None:
            return cached

        assert n > 0, "dealer drew from an empty shoe"
        probs = weigh(counts, n) if weigh else None
        d17 = d18 = d19 = d20 = d21 = dbust = 0.0
        for rank in RANKS:
            c = counts[rank]
            if not c:
                continue
            p = probs[rank] if probs else c / n
            counts[rank] = c - 1
            o = draw(hard + rank, has_ace or rank == ACE, n - 1, key + _STEP[rank])
            counts[rank] = c
            d17 += p * o[0]
            d18 += p * o[1]
            d19 += p * o[2]
            d20 += p * o[3]
            d21 += p * o[4]
            dbust += p * o[5]
        result = (d17, d18, d19, d20, d21, dbust)
        memo[key] = result
        return result

    # Hole card: drop the rank that would make a natural and renormalize
    n = shoe.total
    assert n > 0, "dealer drew from an empty shoe"
    weights = weigh(counts, n) if weigh else [float(c) for c in counts]
    if natural:
        weights[natural] = 0.0
    norm = sum(weights[rank] for rank in RANKS)
    assert norm > 0, "no hole card avoids a dealer natural"

    out = [0.0] * 6
    for rank in RANKS:
        c = counts[rank]
        w = weights[rank]
        if not c or not w:
            continue
        p = w / norm
        counts[rank] = c - 1
        o = draw(up + rank, up == ACE or rank == ACE, n - 1, _STEP[rank])
        counts[rank] = c
        for idx in range(6):
            out[idx] += p * o[idx]
    return DealerDistribution(*out)


def make_dealer_cache(
    shoe: Shoe,
    up: int,
    rules: RuleSet,
    depth: int | None = None,
    cache_bytes: int | None = None,
    dtype: str | None = None,
) -> DealerCache:
    """
    Dealer cache for one (up card, split pair) task, baselined on the current shoe.

    An explicit depth wins; otherwise the depth is sized from the byte budget.
    """
    dtype = dtype or settings.CACHE_DTYPE
    if depth is None:
        budget = settings.CACHE_BYTES if cache_bytes is None else cache_bytes
        depth = plan_for_budget(budget, dtype, settings.MAX_CACHE_DEPTH)
    cache = DealerCache(shoe, lambda current: dealer_distribution(current, up, rules), depth, dtype)
    logger.debug("Dealer cache for up %d: depth=%d slots=%d bytes=%d", up, depth, cache.slots.shape[0], cache.slots.nbytes)
    return cache


def make_conditioned_cache(shoe: Shoe, up: int, s: int, i: int, rules: RuleSet) -> DealerCache:
    """Separate cache for hole-conditioned distributions (never mixed with the plain cache)."""
    return DealerCache(
        shoe,
        lambda current: dealer_distribution_hole_conditioned(current, up, s, i, rules),
        settings.CONDITIONED_CACHE_DEPTH,
        "float64",
    )
