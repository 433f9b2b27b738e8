"""Strategy service - single-deck zero-memory basic strategy and split-hand actions"""
from enum import Enum

from app.models.cards import ACE, RANKS, TEN, HandState, rank_label
from app.schemas.rules import DD1, DD2, ND, RuleSet


class Action(str, Enum):
    """Player decision for a hand"""
    STAND = "stand"
    HIT = "hit"
    DOUBLE = "double"


def basic_hit(hand: HandState, up: int, rules: RuleSet) -> bool:
    """
    Hitting rules for a hand of two or more cards.

    Args:
        hand: Player hand
        up: Dealer up card
        rules: Rule set (only the soft-17 rule matters here)

    Returns:
        True if basic strategy hits
    """
    total = hand.total
    if total >= 21:
        return False
    stands_soft17 = not rules.dealer_hits_soft17

    if hand.soft:
        if 2 <= up <= 8:
            return total <= 17
        if up == ACE and stands_soft17:
            return total <= 17
        return total <= 18

    two_cards = hand.num_cards == 2
    if up in (2, 3):
        if two_cards:
            pair = hand.pair()
            if up == 2 and stands_soft17 and pair == (3, TEN):
                return True
            if up == 3 and pair in ((4, 8), (5, 7), (6, 6)):
                return False
        return total <= 12
    if up in (4, 5, 6):
        if two_cards and hand.pair() == (2, TEN) and (up == 4 or (up == 6 and stands_soft17)):
            return True
        return total <= 11

    # 7 through ten and ace
    if up == TEN:
        if two_cards and hand.pair() == (7, 7):
            return False
        if total == 16 and hand.num_cards >= 3:
            return False
    return total <= 16


def appendix_double(hand: HandState, up: int, rules: RuleSet) -> bool:
    """Doubling table for two-card hands, before any rule restriction."""
    if hand.num_cards != 2:
        return False
    total = hand.total
    if hand.soft:
        other = total - 11
        if up == 2:
            return other == 6
        if up == 3:
            return other in (6, 7)
        if up in (4, 5):
            return 2 <= other <= 7
        if up == 6:
            return 2 <= other <= 8
        return False

    if up in (2, 3, 4):
        return 9 <= total <= 11
    if up in (5, 6):
        if hand.pair() == (2, 6) and (up == 6 or not rules.dealer_hits_soft17):
            return False
        return 8 <= total <= 11
    if 7 <= up <= 9:
        return total in (10, 11)
    return total == 11


def double_permitted(hand: HandState, option: str) -> bool:
    """Whether a double-down option lets this two-card hand double at all."""
    if hand.num_cards != 2 or option == ND:
        return False
    if option == DD2:
        return not hand.soft and hand.total in (10, 11)
    return option == DD1


def basic_double(hand: HandState, up: int, rules: RuleSet) -> bool:
    """Basic-strategy doubling for an unsplit two-card hand under rules.dd_option."""
    return double_permitted(hand, rules.dd_option) and appendix_double(hand, up, rules)


def split_action(hand: HandState, up: int, rules: RuleSet) -> Action:
    """
    Decision for a two-card hand inside a split group.

    Split aces take their one card and stand. Doubling follows the doubling
    table when rules.dd_after_split permits it; otherwise the hitting rules apply.
    """
    if hand.first_card == ACE:
        return Action.STAND
    if double_permitted(hand, rules.dd_after_split) and appendix_double(hand, up, rules):
        return Action.DOUBLE
    return Action.HIT if basic_hit(hand, up, rules) else Action.STAND


def basic_action(hand: HandState, up: int, rules: RuleSet) -> Action:
    """Decision for an ordinary (unsplit) hand."""
    if hand.num_cards == 2 and basic_double(hand, up, rules):
        return Action.DOUBLE
    return Action.HIT if basic_hit(hand, up, rules) else Action.STAND


def strategy_grid(rules: RuleSet) -> list[dict]:
    """
    Full decision grid for auditing the strategy tables.

    Every two-card composition (low card first) against every up card, then
    hard and soft totals for hands of three or more cards.
    """
    rows: list[dict] = []
    ups = [*range(2, TEN + 1), ACE]

    for c1 in RANKS:
        for c2 in range(c1, TEN + 1):
            if (c1, c2) == (ACE, TEN):
                continue
            hand = HandState.from_cards([c1, c2])
            row = {"hand": f"{rank_label(c1)},{rank_label(c2)}", "total": hand.total, "soft": hand.soft}
            for up in ups:
                row[rank_label(up)] = basic_action(hand, up, rules).value
            rows.append(row)

    # Three-card hands: hard 6..20 as (x, y, 2), soft 13..20 as (A, 2, x) or (A, A, A)
    for total in range(6, 21):
        first = min(TEN, total - 4)
        hand = HandState.from_cards([first, total - first - 2, 2])
        rows.append(_multi_card_row(f"hard {total}, 3+ cards", hand, ups, rules))
    for total in range(13, 21):
        cards = [ACE, ACE, ACE] if total == 13 else [ACE, 2, total - 13]
        hand = HandState.from_cards(cards)
        rows.append(_multi_card_row(f"soft {total}, 3+ cards", hand, ups, rules))
    return rows


def _multi_card_row(label: str, hand: HandState, ups: list[int], rules: RuleSet) -> dict:
    row = {"hand": label, "total": hand.total, "soft": hand.soft}
    for up in ups:
        row[rank_label(up)] = Action.HIT.value if basic_hit(hand, up, rules) else Action.STAND.value
    return row
