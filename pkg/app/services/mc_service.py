"""Monte Carlo service - simulated split play as an independent check on the exact engines"""
import logging
import math

import numpy as np

from app.config import settings
from app.core.workers import run_tasks
from app.models.cards import ACE, RANKS, HandState, Shoe, natural_rank
from app.schemas.results import McResult
from app.schemas.rules import RuleSet
from app.services.split_service import next_action
from app.services.strategy_service import Action, basic_action, basic_hit

logger = logging.getLogger(__name__)

_BATCH = 4096
_MAX_REJECTS_PER_TRIAL = 100


class ShoeExhausted(Exception):
    """A trial ran out of cards"""


class _Deal:
    """Cards of one shuffled shoe; card 0 is the dealer's hole card."""

    __slots__ = ("cards", "pos")

    def __init__(self, cards: list[int]):
        self.cards = cards
        self.pos = 1

    def draw(self) -> int:
        if self.pos >= len(self.cards):
            raise ShoeExhausted
        card = self.cards[self.pos]
        self.pos += 1
        return card


def _dealer_total(up: int, deal: _Deal, hits_soft17: bool) -> int:
    hard = up + deal.cards[0]
    has_ace = up == ACE or deal.cards[0] == ACE
    while True:
        total = hard + 10 if has_ace and hard <= 11 else hard
        if total > 21:
            return total
        if total >= 17 and not (hits_soft17 and total == 17 and has_ace and hard == 7):
            return total
        card = deal.draw()
        hard += card
        has_ace = has_ace or card == ACE


def _settle(hands: list[HandState], up: int, deal: _Deal, rules: RuleSet) -> float:
    if all(hand.busted for hand in hands):
        return -float(sum(hand.bet for hand in hands))
    dealer = _dealer_total(up, deal, rules.dealer_hits_soft17)
    win = 0.0
    for hand in hands:
        total = hand.total
        if total > 21 or (dealer <= 21 and total < dealer):
            win -= hand.bet
        elif dealer > 21 or total > dealer:
            win += hand.bet
    return win


def _play_split(deal: _Deal, up: int, s: int, rules: RuleSet) -> float:
    resplit = rules.can_resplit(s)
    hands = [HandState.seed(s), HandState.seed(s)]
    idx = 0
    while idx < len(hands):
        hand = hands[idx]
        action = next_action(hand, up, rules)
        if action is Action.STAND:
            idx += 1
            continue
        if action is Action.DOUBLE:
            hand.bet = 2
        card = deal.draw()
        if resplit and card == s and hand.num_cards == 1 and len(hands) < rules.max_hands:
            hands.append(HandState.seed(s))
        else:
            hand.hit(card)
    return _settle(hands, up, deal, rules)


def _play_unsplit(deal: _Deal, up: int, s: int, rules: RuleSet) -> float:
    hand = HandState.from_cards([s, s])
    action = basic_action(hand, up, rules)
    if action is Action.DOUBLE:
        hand.bet = 2
        hand.hit(deal.draw())
    elif action is Action.HIT:
        hand.hit(deal.draw())
        while basic_hit(hand, up, rules):
            hand.hit(deal.draw())
    return _settle([hand], up, deal, rules)


def _simulate_block(task: tuple[list[int], int, int, RuleSet, int, np.random.SeedSequence]) -> tuple[list[float], int]:
    counts, up, s, rules, trials, seed_seq = task
    rng = np.random.default_rng(seed_seq)
    deck = np.repeat(np.arange(len(counts)), counts)
    natural = natural_rank(up)
    play = _play_unsplit if rules.max_hands == 1 else _play_split

    outcomes: list[float] = []
    rejected = 0
    while len(outcomes) < trials:
        batch = min(_BATCH, trials - len(outcomes) + 16)
        shuffled = rng.permuted(np.tile(deck, (batch, 1)), axis=1)
        for row in shuffled.tolist():
            if len(outcomes) == trials:
                break
            if natural and row[0] == natural:
                rejected += 1
                continue
            try:
                outcomes.append(play(_Deal(row), up, s, rules))
            except ShoeExhausted:
                rejected += 1
        if rejected > _MAX_REJECTS_PER_TRIAL * trials + _BATCH:
            raise ValueError("Almost every deal is rejected; the shoe is too small for these rules")
    return outcomes, rejected


def simulate_split(
    shoe: Shoe,
    up: int,
    s: int,
    rules: RuleSet,
    trials: int | None = None,
    seed: int | None = None,
    workers: int = 1,
    blocks: int | None = None,
) -> McResult:
    """
    Estimate a split EV by dealing shuffled shoes.

    The shoe must already exclude the up card and both split cards. The hole
    card is the first card of each shuffle; shuffles where it completes a
    dealer natural are rejected, and so are shuffles that run out of cards.
    Trials are spread over a fixed number of seeded streams so the estimate
    does not depend on the worker count.

    Args:
        shoe: Remaining cards
        up: Dealer up card
        s: Split card
        rules: Rule set (max_hands == 1 plays the pair unsplit)
        trials: Accepted trials
        seed: Root seed
        workers: Worker processes
        blocks: Number of random streams

    Returns:
        McResult with mean and standard error

    Raises:
        ValueError: if trials < 1 or the shoe is too small to deal
    """
    trials = settings.MC_TRIALS if trials is None else trials
    seed = settings.MC_SEED if seed is None else seed
    blocks = blocks or settings.MC_BLOCKS
    if trials < 1:
        raise ValueError(f"trials must be at least 1, got {trials}")
    natural = natural_rank(up)
    playable = sum(shoe.counts[rank] for rank in RANKS if rank != natural)
    if playable == 0 or shoe.total < 4:
        raise ValueError("The shoe is too small to deal a split round")

    blocks = min(blocks, trials)
    sizes = [trials // blocks + (1 if b < trials % blocks else 0) for b in range(blocks)]
    streams = np.random.SeedSequence(seed).spawn(blocks)
    tasks = [(list(shoe.counts), up, s, rules, size, stream) for size, stream in zip(sizes, streams)]

    outcomes: list[float] = []
    rejected = 0
    for block_outcomes, block_rejected in run_tasks(_simulate_block, tasks, workers, desc="mc blocks"):
        outcomes.extend(block_outcomes)
        rejected += block_rejected

    values = np.asarray(outcomes, dtype=np.float64)
    stderr = float(values.std(ddof=1) / math.sqrt(len(values))) if len(values) > 1 else 0.0
    logger.debug("MC %d vs %d: %d trials, %d rejected", s, up, len(values), rejected)
    return McResult(mean=float(values.mean()), stderr=stderr, trials=len(values), seed=seed, rejected=rejected)
