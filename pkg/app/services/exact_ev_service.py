"""Exact EV service - stand, hit and double expected values for a single hand"""
from app.models.cards import RANKS, HandState, Shoe, natural_rank, parse_ranks, rank_label
from app.models.play_hand import DealerDistribution
from app.schemas.results import HandEVReport
from app.schemas.rules import RuleSet
from app.services.dealer_service import make_dealer_cache
from app.services.strategy_service import Action, basic_action, basic_hit
from app.utils.addressing import DealerCache


def card_weights(shoe: Shoe, up: int) -> list[float]:
    """
    Probability of each rank being the next player card, given no dealer natural.

    Returns:
        Weights indexed by rank (index 0 unused)
    """
    counts = shoe.counts
    n = shoe.total
    natural = natural_rank(up)
    n_x = counts[natural] if natural else 0
    if not natural or n <= 1 or n == n_x:
        return [c / n for c in counts] if n else [0.0] * len(counts)
    other = (n - n_x - 1) / (n - n_x)
    weights = [c / (n - 1) * other for c in counts]
    weights[natural] = n_x / (n - 1)
    return weights


def player_card_prob(shoe: Shoe, up: int, i: int) -> float:
    """Conditional probability that the next player card has rank i."""
    n = shoe.total
    assert n > 0, "player drew from an empty shoe"
    counts = shoe.counts
    natural = natural_rank(up)
    if not natural:
        return counts[i] / n
    n_x = counts[natural]
    if n <= 1 or n == n_x:
        return counts[i] / n
    if i == natural:
        return n_x / (n - 1)
    return counts[i] / (n - 1) * (n - n_x - 1) / (n - n_x)


def stand_value(total: int, dist: DealerDistribution) -> float:
    """EV of standing on a total against a dealer distribution."""
    if total > 21:
        return -1.0
    if total < 17:
        return dist.dbust - (dist.d17 + dist.d18 + dist.d19 + dist.d20 + dist.d21)
    win = dist.dbust
    lose = 0.0
    for dealer_total in range(17, 22):
        if dealer_total < total:
            win += dist[dealer_total - 17]
        elif dealer_total > total:
            lose += dist[dealer_total - 17]
    return win - lose


def stand_ev(hand: HandState, up: int, dist: DealerDistribution) -> float:
    """EV of standing; dist must be computed for the shoe without the hand and the up card."""
    return stand_value(hand.total, dist)


def hit_ev(hand: HandState, up: int, shoe: Shoe, cache: DealerCache, rules: RuleSet) -> float:
    """
    EV of taking one card and then playing on by the hitting rules.

    Args:
        hand: Player hand (its cards and the up card already out of the shoe)
        up: Dealer up card
        shoe: Remaining cards
        cache: Dealer distribution source for this up card
        rules: Rule set

    Returns:
        Expected win per unit bet
    """
    weights = card_weights(shoe, up)
    exval = 0.0
    for rank in RANKS:
        w = weights[rank]
        if not w:
            continue
        shoe.remove(rank)
        hand.hit(rank)
        if basic_hit(hand, up, rules):
            exval += w * hit_ev(hand, up, shoe, cache, rules)
        elif hand.busted:
            exval -= w
        else:
            exval += w * stand_value(hand.total, cache.distribution(shoe))
        hand.unhit(rank)
        shoe.restore(rank)
    return exval


def double_ev(hand: HandState, up: int, shoe: Shoe, cache: DealerCache, rules: RuleSet) -> float:
    """EV of doubling: twice the EV of one more card and standing."""
    weights = card_weights(shoe, up)
    exval = 0.0
    for rank in RANKS:
        w = weights[rank]
        if not w:
            continue
        shoe.remove(rank)
        hand.hit(rank)
        if hand.busted:
            exval -= w
        else:
            exval += w * stand_value(hand.total, cache.distribution(shoe))
        hand.unhit(rank)
        shoe.restore(rank)
    return 2.0 * exval


def basic_strategy_ev(hand: HandState, up: int, shoe: Shoe, cache: DealerCache, rules: RuleSet) -> float:
    """EV of playing an unsplit hand by basic strategy."""
    action = basic_action(hand, up, rules)
    if action is Action.DOUBLE:
        return double_ev(hand, up, shoe, cache, rules)
    if action is Action.HIT:
        return hit_ev(hand, up, shoe, cache, rules)
    return stand_value(hand.total, cache.distribution(shoe))


def hand_evs(cards: str, up: int, rules: RuleSet, depth: int | None = None) -> HandEVReport:
    """
    Stand, hit, double and basic-strategy EVs of one hand from a full shoe.

    Raises:
        ValueError: if the cards cannot be dealt from the shoe
    """
    ranks = parse_ranks(cards)
    shoe = Shoe.from_decks(rules.decks)
    if not shoe.remove_all([up, *ranks]):
        raise ValueError(f"Cards {cards} and up card {rank_label(up)} are not in a {rules.decks}-deck shoe")
    hand = HandState.from_cards(ranks)
    cache = make_dealer_cache(shoe, up, rules, depth=depth)

    stand = stand_value(hand.total, cache.distribution(shoe))
    hit = hit_ev(hand, up, shoe, cache, rules) if not hand.busted else -1.0
    double = double_ev(hand, up, shoe, cache, rules) if hand.num_cards == 2 else None
    return HandEVReport(
        cards=",".join(rank_label(r) for r in ranks),
        up=rank_label(up),
        total=hand.total,
        soft=hand.soft,
        stand=stand,
        hit=hit,
        double=double,
        basic=basic_strategy_ev(hand, up, shoe, cache, rules),
        action=basic_action(hand, up, rules).value,
    )
