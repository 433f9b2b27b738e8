"""Approximation service - split EVs from single-hand values and resplit probabilities"""
import logging
from typing import NamedTuple

from app.core.workers import run_tasks
from app.models.cards import Shoe, natural_rank, rank_label
from app.schemas.results import ApproxRow, ConditionalHandEV, ResplitProbabilities
from app.schemas.rules import RuleSet
from app.services.dealer_service import make_conditioned_cache, make_dealer_cache
from app.services.split_service import exact_split, prepare_split_shoe, split_hand_ev
from app.utils.addressing import DealerCache

logger = logging.getLogger(__name__)

MAX_APPROX_HANDS = 4


def _position_prob(shoe: Shoe, up: int, s: int, position: int, after_split_card: bool) -> float:
    """
    Probability that the card in a given draw position is s.

    The shoe shrinks by one card per earlier position; after_split_card also
    takes one s out of the shoe.
    """
    n = shoe.total - (position - 1)
    n_s = shoe.counts[s] - (1 if after_split_card else 0)
    if n <= 0 or n_s <= 0:
        return 0.0
    natural = natural_rank(up)
    if not natural:
        return min(1.0, n_s / n)
    n_x = n_s if natural == s else shoe.counts[natural]
    if n <= 1 or n <= n_x:
        return min(1.0, n_s / n)
    if s == natural:
        return min(1.0, n_s / (n - 1))
    return min(1.0, n_s / (n - 1) * (n - n_x - 1) / (n - n_x))


def resplit_position_probs(shoe: Shoe, up: int, s: int, literal_p4_4: bool = False) -> ResplitProbabilities:
    """
    Probabilities of the card-order classes for up to four split hands.

    The shoe must already exclude the up card and both split cards.

    Args:
        shoe: Baseline shoe
        up: Dealer up card
        s: Split card
        literal_p4_4: use (1 - p3(s|s)) in P(4/4), which does not sum to one

    Returns:
        ResplitProbabilities
    """
    p1 = _position_prob(shoe, up, s, 1, False)
    p2 = _position_prob(shoe, up, s, 2, False)
    p2s = _position_prob(shoe, up, s, 2, True)
    p3s = _position_prob(shoe, up, s, 3, True)
    p4s = _position_prob(shoe, up, s, 4, True)

    p4_4 = p1 * (1 - p2s) * ((1 - p3s) if literal_p4_4 else p3s)
    return ResplitProbabilities(
        p2=(1 - p1) * (1 - p2),
        p3_1=(1 - p1) * p2 * (1 - p3s) * (1 - p4s),
        p3_2=p1 * (1 - p2s) * (1 - p3s) * (1 - p4s),
        p4_1=(1 - p1) * p2 * (1 - p3s) * p4s,
        p4_2=(1 - p1) * p2 * p3s,
        p4_3=p1 * (1 - p2s) * (1 - p3s) * p4s,
        p4_4=min(1.0, p4_4),
        p4_5=p1 * p2s,
    )


def card_order_coefficients(probs: ResplitProbabilities) -> tuple[float, float, float]:
    """Weights on E(2), E(3) and E(4); they add up to the expected number of hands."""
    c2 = 2 * probs.p2 + probs.p3_1 + probs.p4_1 + probs.p4_2
    c3 = 3 * probs.p3 - probs.p3_1 + probs.p4_1 + 2 * probs.p4_3 + probs.p4_4
    c4 = 4 * probs.p4 - 2 * probs.p4_1 - probs.p4_2 - 2 * probs.p4_3 - probs.p4_4
    return c2, c3, c4


def conditional_hand_ev(
    shoe: Shoe,
    up: int,
    s: int,
    i: int,
    rules: RuleSet,
    cache: DealerCache | None = None,
) -> float:
    """
    E(i): single-hand EV of a hand seeded with s when i split cards are out of the shoe.

    Below rules.max_hands the hand may not draw s as its second card and the
    dealer is conditioned on i - 1 unseen non-s player cards. At max_hands the
    second card is unrestricted and the plain dealer (and cache) is used.
    Returns 0 when the shoe lacks the extra split cards.
    """
    extra = [s] * (i - 2)
    if not shoe.remove_all(extra):
        return 0.0
    try:
        if i >= rules.max_hands:
            dealer = cache if cache is not None else make_dealer_cache(shoe, up, rules)
            return split_hand_ev(shoe, up, s, rules, dealer)
        dealer = make_conditioned_cache(shoe, up, s, i, rules)
        return split_hand_ev(shoe, up, s, rules, dealer, forbid_second_split_card=True)
    finally:
        for card in extra:
            shoe.restore(card)


def conditional_hand_evs(shoe: Shoe, up: int, s: int, rules: RuleSet, cache: DealerCache | None = None) -> ConditionalHandEV:
    """E(2), E(3) and E(4) for four-hand rules."""
    return ConditionalHandEV(
        e2=conditional_hand_ev(shoe, up, s, 2, rules, cache),
        e3=conditional_hand_ev(shoe, up, s, 3, rules, cache),
        e4=conditional_hand_ev(shoe, up, s, 4, rules, cache),
    )


def approx_nonresplit(
    shoe: Shoe,
    up: int,
    s: int,
    rules: RuleSet,
    cache: DealerCache,
    keep_second_card: bool = False,
) -> float:
    """
    Twice the EV of one hand seeded with s.

    With keep_second_card the other split card goes back into the shoe for
    the single-hand calculation.
    """
    if not keep_second_card:
        return 2.0 * split_hand_ev(shoe, up, s, rules, cache)
    shoe.restore(s)
    try:
        dealer = make_dealer_cache(shoe, up, rules)
        return 2.0 * split_hand_ev(shoe, up, s, rules, dealer)
    finally:
        shoe.remove(s)


def _check_hands(rules: RuleSet) -> None:
    if rules.max_hands > MAX_APPROX_HANDS:
        raise ValueError(f"Resplit approximations support up to {MAX_APPROX_HANDS} hands, got {rules.max_hands}")


def griffin_resplit(shoe: Shoe, up: int, s: int, rules: RuleSet, cache: DealerCache | None = None) -> float:
    """
    Sum over i of i * P(i) * E(i) for up to rules.max_hands hands.

    The largest hand count takes the remaining probability.
    """
    _check_hands(rules)
    if not rules.can_resplit(s):
        return approx_nonresplit(shoe, up, s, rules, cache or make_dealer_cache(shoe, up, rules))
    probs = resplit_position_probs(shoe, up, s)
    e2 = conditional_hand_ev(shoe, up, s, 2, rules, cache)
    e3 = conditional_hand_ev(shoe, up, s, 3, rules, cache)
    if rules.max_hands == 3:
        return 2 * probs.p2 * e2 + 3 * (1 - probs.p2) * e3
    e4 = conditional_hand_ev(shoe, up, s, 4, rules, cache)
    p4 = 1 - probs.p2 - probs.p3
    return 2 * probs.p2 * e2 + 3 * probs.p3 * e3 + 4 * p4 * e4


def new_approx_resplit(
    shoe: Shoe,
    up: int,
    s: int,
    rules: RuleSet,
    cache: DealerCache | None = None,
    literal_p4_4: bool = False,
) -> float:
    """
    Split EV from E(2), E(3), E(4) weighted by the card-order classes.

    Three-hand rules fall back to the sum-over-hands form.
    """
    _check_hands(rules)
    if not rules.can_resplit(s) or rules.max_hands == 3:
        return griffin_resplit(shoe, up, s, rules, cache)
    probs = resplit_position_probs(shoe, up, s, literal_p4_4=literal_p4_4)
    evs = conditional_hand_evs(shoe, up, s, rules, cache)
    c2, c3, c4 = card_order_coefficients(probs)
    return c2 * evs.e2 + c3 * evs.e3 + c4 * evs.e4


def approx_split(shoe: Shoe, up: int, s: int, rules: RuleSet, cache: DealerCache) -> float:
    """Best available approximation for the rules: no split, no resplit, or card-order resplit."""
    if rules.max_hands == 1:
        raise ValueError("Splitting is not allowed with max_hands == 1")
    if rules.max_hands == 2 or not rules.can_resplit(s):
        return approx_nonresplit(shoe, up, s, rules, cache)
    return new_approx_resplit(shoe, up, s, rules, cache)


class CompareTask(NamedTuple):
    up: int
    pair: int
    rules: RuleSet
    keep_second_card: bool = False
    exact: bool = True
    literal_p4_4: bool = False


def _error(approx: float | None, exact: float | None) -> float | None:
    if approx is None or exact is None:
        return None
    return approx - exact


def compare_cell(task: CompareTask) -> ApproxRow:
    """Every approximation for one (up, pair) cell next to the exact value."""
    up, pair, rules = task.up, task.pair, task.rules
    shoe = prepare_split_shoe(rules.decks, up, pair)
    cache = make_dealer_cache(shoe, up, rules)

    nonresplit = approx_nonresplit(shoe, up, pair, rules, cache)
    keep = approx_nonresplit(shoe, up, pair, rules, cache, keep_second_card=True) if task.keep_second_card else None
    griffin = new = None
    if rules.can_resplit(pair):
        griffin = griffin_resplit(shoe, up, pair, rules, cache)
        new = new_approx_resplit(shoe, up, pair, rules, cache, literal_p4_4=task.literal_p4_4)
    exact = exact_split(shoe, up, pair, rules, cache).ev if task.exact else None
    logger.debug("Approximations for %s vs %s done (exact=%s)", rank_label(pair), rank_label(up), task.exact)

    return ApproxRow(
        pair=f"{rank_label(pair)},{rank_label(pair)}",
        up=rank_label(up),
        rules=rules.label,
        exact=exact,
        nonresplit=nonresplit,
        keep_second_card=keep,
        griffin=griffin,
        new_approx=new,
        error_nonresplit=None if rules.can_resplit(pair) else _error(nonresplit, exact),
        error_griffin=_error(griffin, exact),
        error_new_approx=_error(new, exact),
    )


def approx_compare(
    rules: RuleSet,
    pairs: list[int],
    ups: list[int],
    keep_second_card: bool = False,
    exact: bool = True,
    workers: int = 1,
    literal_p4_4: bool = False,
) -> list[ApproxRow]:
    """
    Approximations against exact values, one row per (up, pair), sorted by up then pair.

    literal_p4_4 switches the card-order resplit to the printed P(4/4).

    Raises:
        ValueError: when splitting is not allowed or the rules need an exact multideck value
    """
    if rules.max_hands == 1:
        raise ValueError("Nothing to approximate with max_hands == 1")
    _check_hands(rules)
    if exact and rules.decks > 1:
        raise ValueError("Exact split EVs are single-deck only; compare without the exact column")
    tasks = [
        CompareTask(up, pair, rules, keep_second_card, exact, literal_p4_4)
        for up in sorted(set(ups))
        for pair in sorted(set(pairs))
    ]
    return run_tasks(compare_cell, tasks, workers, desc="approximation cells")
