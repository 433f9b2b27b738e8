"""Unmemoized brute-force enumerators used as independent checks on toy shoes"""
from app.models.cards import ACE, RANKS, HandState, natural_rank, score_cards
from app.schemas.rules import RuleSet
from app.services.split_service import next_action
from app.services.strategy_service import Action


def _dealer_outcomes(counts: list[int], hard: int, has_ace: bool, hits_soft17: bool, p: float, out: list[float]) -> None:
    total = hard + 10 if has_ace and hard <= 11 else hard
    if total > 21:
        out[5] += p
        return
    if total >= 17 and not (hits_soft17 and total == 17 and has_ace and hard == 7):
        out[total - 17] += p
        return
    n = sum(counts)
    for rank in RANKS:
        c = counts[rank]
        if not c:
            continue
        counts[rank] -= 1
        _dealer_outcomes(counts, hard + rank, has_ace or rank == ACE, hits_soft17, p * c / n, out)
        counts[rank] += 1


def brute_dealer_distribution(counts: list[int], up: int, hits_soft17: bool = False) -> list[float]:
    """
    Dealer final totals 17..21 and bust, conditional on no natural.

    Every hole card is dealt, naturals included; the natural mass is then
    divided out.
    """
    counts = list(counts)
    n = sum(counts)
    out = [0.0] * 6
    natural_mass = 0.0
    for hole in RANKS:
        c = counts[hole]
        if not c:
            continue
        if natural_rank(up) == hole:
            natural_mass += c / n
            continue
        counts[hole] -= 1
        _dealer_outcomes(counts, up + hole, up == ACE or hole == ACE, hits_soft17, c / n, out)
        counts[hole] += 1
    return [value / (1 - natural_mass) for value in out]


def _settle(hands: list[list[int]], bets: list[int], counts: list[int], up: int, hole: int, rules: RuleSet) -> float:
    totals = [score_cards(cards).total for cards in hands]
    if all(total > 21 for total in totals):
        return -float(sum(bets))
    dist = [0.0] * 6
    _dealer_outcomes(list(counts), up + hole, up == ACE or hole == ACE, rules.dealer_hits_soft17, 1.0, dist)
    ev = 0.0
    for total, bet in zip(totals, bets):
        if total > 21:
            ev -= bet
            continue
        for dealer_total in range(17, 22):
            p = dist[dealer_total - 17]
            if total > dealer_total:
                ev += bet * p
            elif total < dealer_total:
                ev -= bet * p
        ev += bet * dist[5]
    return ev


def _play(hands: list[list[int]], bets: list[int], idx: int, counts: list[int], up: int, hole: int, s: int, rules: RuleSet) -> float:
    if idx == len(hands):
        return _settle(hands, bets, counts, up, hole, rules)
    hand = HandState.from_cards(hands[idx])
    hand.bet = bets[idx]
    action = next_action(hand, up, rules)
    if action is Action.STAND:
        return _play(hands, bets, idx + 1, counts, up, hole, s, rules)
    if action is Action.DOUBLE:
        bets = bets[:idx] + [2] + bets[idx + 1:]

    n = sum(counts)
    ev = 0.0
    for rank in RANKS:
        c = counts[rank]
        if not c:
            continue
        counts[rank] -= 1
        if rules.can_resplit(s) and rank == s and len(hands[idx]) == 1 and len(hands) < rules.max_hands:
            ev += c / n * _play(hands + [[s]], bets + [1], idx, counts, up, hole, s, rules)
        else:
            grown = hands[:idx] + [hands[idx] + [rank]] + hands[idx + 1:]
            ev += c / n * _play(grown, bets, idx, counts, up, hole, s, rules)
        counts[rank] += 1
    return ev


def brute_split_ev(counts: list[int], up: int, s: int, rules: RuleSet) -> float:
    """
    Split EV by dealing the hole card first and every later card in order.

    counts must already exclude the up card and both split cards.
    """
    counts = list(counts)
    natural = natural_rank(up)
    eligible = sum(counts) - (counts[natural] if natural else 0)
    ev = 0.0
    for hole in RANKS:
        c = counts[hole]
        if not c or hole == natural:
            continue
        counts[hole] -= 1
        ev += c / eligible * _play([[s], [s]], [1, 1], 0, counts, up, hole, s, rules)
        counts[hole] += 1
    return ev
