"""Split service - exact pair-splitting EVs by recursive enumeration and by unique hands"""
import logging
import time

from app.config import settings
from app.models.cards import RANKS, RANKS_DESC, HandState, Shoe, rank_label
from app.models.play_hand import PlayHand
from app.schemas.results import SplitResult
from app.schemas.rules import RuleSet
from app.services.exact_ev_service import basic_strategy_ev, card_weights, player_card_prob, stand_value
from app.services.strategy_service import Action, basic_hit, split_action
from app.utils.addressing import DealerCache, HandIndex

logger = logging.getLogger(__name__)

METHOD_RECURSIVE = "recursive"
METHOD_HANDS = "hands"
METHODS = (METHOD_HANDS, METHOD_RECURSIVE)


def prepare_split_shoe(decks: int, up: int, s: int) -> Shoe:
    """Full shoe with the up card and both split cards dealt."""
    shoe = Shoe.from_decks(decks)
    if not shoe.remove_all([up, s, s]):
        raise ValueError(f"Cannot deal ({rank_label(s)},{rank_label(s)}) vs {rank_label(up)} from {decks} deck(s)")
    return shoe


def next_action(hand: HandState, up: int, rules: RuleSet) -> Action:
    """What a split hand does next: one-card hands draw, doubled hands stand after their card."""
    if hand.num_cards == 1:
        return Action.HIT
    if hand.bet == 2:
        return Action.STAND
    if hand.num_cards == 2:
        return split_action(hand, up, rules)
    return Action.HIT if basic_hit(hand, up, rules) else Action.STAND


def _settle(totals: list[int], bets: list[float], count: int, shoe: Shoe, cache: DealerCache) -> float:
    """Total win of the first `count` hands against the dealer on the shared depleted shoe."""
    if all(totals[k] > 21 for k in range(count)):
        return -sum(bets[:count])
    dist = cache.distribution(shoe)
    return sum(bets[k] * stand_value(totals[k], dist) for k in range(count))


def _require_single_deck(shoe: Shoe) -> None:
    if shoe.decks > 1:
        raise ValueError("Exact split EVs are computed for single-deck shoes only; use the approximation")


def _unsplit(shoe: Shoe, up: int, s: int, rules: RuleSet, cache: DealerCache, method: str, start: float) -> SplitResult:
    """max_hands == 1: the pair is played as an ordinary hand."""
    hand = HandState.from_cards([s, s])
    ev = basic_strategy_ev(hand, up, shoe, cache, rules)
    return SplitResult(
        ev=ev,
        method=method,
        hands_enumerated=1,
        probability_mass=1.0,
        elapsed=time.perf_counter() - start,
        cache=cache.stats(),
    )


def exact_split_recursive(shoe: Shoe, up: int, s: int, rules: RuleSet, cache: DealerCache) -> SplitResult:
    """
    Exact split EV by card-by-card enumeration of every split hand.

    The shoe must already exclude the up card and both split cards. Drawing
    another split card as a second card opens a new hand while fewer than
    rules.max_hands are in play. When the last hand is done, all hands are
    settled together against the dealer on the shared depleted shoe.
    """
    start = time.perf_counter()
    if rules.max_hands == 1:
        return _unsplit(shoe, up, s, rules, cache, METHOD_RECURSIVE, start)
    _require_single_deck(shoe)

    max_hands = rules.max_hands
    resplit = rules.can_resplit(s)
    hands = [HandState.seed(s), HandState.seed(s)]
    settled = 0
    mass = 0.0

    def play(idx: int, path: float) -> float:
        hand = hands[idx]
        weights = card_weights(shoe, up)
        exval = 0.0
        for rank in RANKS_DESC:
            w = weights[rank]
            if not w:
                continue
            shoe.remove(rank)
            spawned = resplit and rank == s and hand.num_cards == 1 and len(hands) < max_hands
            if spawned:
                hands.append(HandState.seed(s))
            else:
                hand.hit(rank)
            exval += w * advance(idx, path * w)
            if spawned:
                hands.pop()
            else:
                hand.unhit(rank)
            shoe.restore(rank)
        return exval

    def advance(idx: int, path: float) -> float:
        nonlocal settled, mass
        hand = hands[idx]
        action = next_action(hand, up, rules)
        if action is Action.HIT:
            return play(idx, path)
        if action is Action.DOUBLE:
            hand.bet = 2
            value = play(idx, path)
            hand.bet = 1
            return value
        if idx + 1 < len(hands):
            return play(idx + 1, path)
        settled += 1
        mass += path
        count = len(hands)
        return _settle([h.total for h in hands], [h.bet for h in hands], count, shoe, cache)

    ev = play(0, 1.0)
    elapsed = time.perf_counter() - start
    logger.debug("Recursive split %s vs %s: %d settlements in %.2fs", rank_label(s), rank_label(up), settled, elapsed)
    return SplitResult(
        ev=ev,
        method=METHOD_RECURSIVE,
        hands_enumerated=settled,
        probability_mass=mass,
        elapsed=elapsed,
        cache=cache.stats(),
    )


def enumerate_unique_hands(shoe: Shoe, up: int, s: int, rules: RuleSet) -> list[PlayHand]:
    """
    Catalog every playable single split hand, merged by composition.

    Each generation path adds one occurrence to its hand; paths whose second
    card is another split card are also counted as splittable. The total of
    all occurrences is the number of hands generated.
    """
    index = HandIndex(settings.HAND_INDEX_DEPTH)
    catalog: list[PlayHand] = []
    hand = HandState.seed(s)

    def generate() -> None:
        action = next_action(hand, up, rules)
        if action is Action.STAND:
            record()
            return
        if action is Action.DOUBLE:
            hand.bet = 2
            draw_each()
            hand.bet = 1
            return
        draw_each()

    def draw_each() -> None:
        for rank in RANKS_DESC:
            if not shoe.remove(rank):
                continue
            hand.hit(rank)
            generate()
            hand.unhit(rank)
            shoe.restore(rank)

    def record() -> None:
        slot, position = index.get(hand.card_counts)
        if position < 0:
            drawn = hand.cards()
            drawn.remove(s)
            position = len(catalog)
            catalog.append(PlayHand(s, drawn))
            index.put(slot, position)
        catalog[position].record(hand.bet, hand.second_card == s)

    generate()
    return catalog


def exact_split_hands(
    shoe: Shoe,
    up: int,
    s: int,
    rules: RuleSet,
    cache: DealerCache,
    catalog: list[PlayHand] | None = None,
) -> SplitResult:
    """
    Exact split EV by looping over the unique-hands catalog for each hand slot.

    Before the loop a resplit branch draws another split card and adds a hand.
    While more hands may still be added, catalog hands whose second card is a
    split card contribute only their non-splittable fraction.
    """
    start = time.perf_counter()
    if rules.max_hands == 1:
        return _unsplit(shoe, up, s, rules, cache, METHOD_HANDS, start)
    _require_single_deck(shoe)
    if catalog is None:
        catalog = enumerate_unique_hands(shoe, up, s, rules)
    assert all(entry.split_card == s for entry in catalog), "catalog built for another split card"

    entries = []
    for entry in catalog:
        total = HandState.from_cards([s, *entry.drawn]).total
        nonsplit = entry.nonsplit_occurrences
        entries.append((
            entry.drawn,
            total,
            entry.occurrences,
            entry.average_bet(),
            entry.splittable_occurrences > 0,
            nonsplit,
            entry.average_bet(nonsplit=True) if nonsplit else 0.0,
        ))

    max_hands = rules.max_hands
    resplit = rules.can_resplit(s)
    totals = [0] * max_hands
    bets = [1.0] * max_hands
    n_hands = 2
    settled = 0
    mass = 0.0

    def remove_and_weigh(drawn: list[int]) -> float:
        w = 1.0
        for k, card in enumerate(drawn):
            p = player_card_prob(shoe, up, card) if shoe.counts[card] else 0.0
            if not p:
                for taken in drawn[:k]:
                    shoe.restore(taken)
                return 0.0
            w *= p
            shoe.remove(card)
        return w

    def play(idx: int, path: float) -> float:
        nonlocal n_hands, settled, mass
        exval = 0.0
        can_add = resplit and n_hands < max_hands
        w = player_card_prob(shoe, up, s) if can_add and shoe.counts[s] else 0.0
        if w:
            shoe.remove(s)
            n_hands += 1
            exval += w * play(idx, path * w)
            n_hands -= 1
            shoe.restore(s)

        last = idx == n_hands - 1
        for drawn, total, occurrences, bet, splittable, nonsplit, nonsplit_bet in entries:
            if can_add and splittable:
                occurrences, bet = nonsplit, nonsplit_bet
            if not occurrences:
                continue
            w = remove_and_weigh(drawn)
            if not w:
                continue
            w *= occurrences
            totals[idx] = total
            bets[idx] = bet
            if last:
                settled += 1
                mass += path * w
                exval += w * _settle(totals, bets, n_hands, shoe, cache)
            else:
                exval += w * play(idx + 1, path * w)
            for card in drawn:
                shoe.restore(card)
        return exval

    ev = play(0, 1.0)
    elapsed = time.perf_counter() - start
    logger.debug(
        "Hands split %s vs %s: %d unique hands, %d settlements in %.2fs",
        rank_label(s), rank_label(up), len(catalog), settled, elapsed,
    )
    return SplitResult(
        ev=ev,
        method=METHOD_HANDS,
        hands_enumerated=settled,
        unique_hands=len(catalog),
        probability_mass=mass,
        elapsed=elapsed,
        cache=cache.stats(),
    )


def exact_split(
    shoe: Shoe,
    up: int,
    s: int,
    rules: RuleSet,
    cache: DealerCache,
    method: str = METHOD_HANDS,
) -> SplitResult:
    """Dispatch to one of the exact methods."""
    if method == METHOD_HANDS:
        return exact_split_hands(shoe, up, s, rules, cache)
    if method == METHOD_RECURSIVE:
        return exact_split_recursive(shoe, up, s, rules, cache)
    raise ValueError(f"Unknown split method: {method}")


def split_hand_ev(
    shoe: Shoe,
    up: int,
    s: int,
    rules: RuleSet,
    dealer: DealerCache,
    forbid_second_split_card: bool = False,
) -> float:
    """
    EV of one split hand seeded with s, played alone to completion.

    With forbid_second_split_card the second card is drawn from the other
    ranks only, with their weights renormalized.
    """
    hand = HandState.seed(s)

    def play() -> float:
        weights = card_weights(shoe, up)
        if forbid_second_split_card and hand.num_cards == 1:
            weights[s] = 0.0
            norm = sum(weights[rank] for rank in RANKS)
            if not norm:
                return 0.0
            weights = [w / norm for w in weights]
        exval = 0.0
        for rank in RANKS:
            w = weights[rank]
            if not w:
                continue
            shoe.remove(rank)
            hand.hit(rank)
            exval += w * advance()
            hand.unhit(rank)
            shoe.restore(rank)
        return exval

    def advance() -> float:
        action = next_action(hand, up, rules)
        if action is Action.HIT:
            return play()
        if action is Action.DOUBLE:
            hand.bet = 2
            value = play()
            hand.bet = 1
            return value
        if hand.busted:
            return -float(hand.bet)
        return hand.bet * stand_value(hand.total, dealer.distribution(shoe))

    return play()


def split_ev_one_hand(shoe: Shoe, up: int, s: int, rules: RuleSet, cache: DealerCache) -> float:
    """Twice the EV of a single split hand, with the other split card out of the shoe."""
    return 2.0 * split_hand_ev(shoe, up, s, rules, cache)
