"""Game service - whole-game basic-strategy EV from the option EVs of every initial deal"""
import logging
from collections.abc import Iterable, Mapping
from typing import NamedTuple

from app.config import settings
from app.core.workers import run_tasks
from app.models.cards import ACE, RANKS, TEN, HandState, Shoe, natural_rank
from app.schemas.results import (
    DealComponent,
    GameEV,
    GameTableRow,
    PrecisionPoint,
    SplitDecision,
    SplitOpportunityStats,
)
from app.schemas.rules import DD1, DD2, ND, RuleSet
from app.services.dealer_service import make_dealer_cache
from app.services.exact_ev_service import double_ev, hit_ev, stand_value
from app.services.strategy_service import Action, double_permitted
from app.services.table_service import SOURCE_EXACT, split_cells, split_table

logger = logging.getLogger(__name__)

SPLIT = "split"
NATURAL = "natural"
BLACKJACK_PAYS = 1.5

# Dealer-natural probability of a deal: from the shoe less the up card, or less all three dealt cards
NATURAL_BY_UP_CARD = "up-card"
NATURAL_BY_DEAL = "deal"
NATURAL_WEIGHTINGS = (NATURAL_BY_UP_CARD, NATURAL_BY_DEAL)

# (pair, up) -> split EV
SplitTable = Mapping[tuple[int, int], float]
# (up, c1, c2) -> (stand, hit, double)
OptionTable = dict[tuple[int, int, int], tuple[float, float, float]]

TABLE_COLUMNS = (
    ("dd_any_nd", DD1, ND),
    ("dd_any_dd1", DD1, DD1),
    ("dd_10_11_nd", DD2, ND),
    ("dd_10_11_dd2", DD2, DD2),
)
OPTION_BASE = "Base - no resplit"
OPTION_RESPLIT = "Delta resplit (-A's)"
OPTION_RESPLIT_ACES = "Delta resplit (+A's)"
OPTION_NO_SPLIT = "Delta eliminate splitting"


class CacheBudget(NamedTuple):
    """Dealer cache sizing passed down to every per-up-card task; an explicit depth wins"""
    depth: int | None = None
    cache_bytes: int | None = None


def initial_deals(shoe: Shoe, natural_weighting: str | None = None) -> list[DealComponent]:
    """
    Every initial deal (up card, c1 <= c2) with its exact probability.

    natural_probability is the chance that the hole card completes a dealer
    natural. With the up-card weighting it depends on the up card alone
    (natural cards over the shoe less the up card); with the deal weighting
    the two player cards are removed as well. Both give the same overall
    chance of a dealer natural. The deal probabilities add up to one.

    Raises:
        ValueError: if the shoe cannot deal three cards and a hole card, or
            for an unknown weighting
    """
    natural_weighting = natural_weighting or settings.NATURAL_WEIGHTING
    if natural_weighting not in NATURAL_WEIGHTINGS:
        raise ValueError(f"Unknown natural weighting: {natural_weighting}")
    counts = shoe.counts
    n = shoe.total
    if n < 4:
        raise ValueError(f"A shoe of {n} cards cannot deal a round")

    deals = []
    for up in RANKS:
        natural = natural_rank(up)
        for c1 in RANKS:
            for c2 in range(c1, TEN + 1):
                p = counts[c1] / n
                p *= max(counts[c2] - (c1 == c2), 0) / (n - 1)
                p *= max(counts[up] - (up == c1) - (up == c2), 0) / (n - 2)
                if p <= 0:
                    continue
                if c1 != c2:
                    p *= 2
                q = 0.0
                if natural and natural_weighting == NATURAL_BY_UP_CARD:
                    q = (counts[natural] - (natural == up)) / (n - 1)
                elif natural:
                    left = counts[natural] - (natural == up) - (natural == c1) - (natural == c2)
                    q = max(left, 0) / (n - 3)
                deals.append(DealComponent(up=up, c1=c1, c2=c2, probability=p, natural_probability=q))
    return deals


def pair_fraction(deals: Iterable[DealComponent]) -> float:
    """Probability of being dealt a pair that can be played (no dealer natural)."""
    return sum(d.probability * (1 - d.natural_probability) for d in deals if d.c1 == d.c2)


def _option_evs(task: tuple[int, bool, int, CacheBudget]) -> OptionTable:
    decks, hits_soft17, up, budget = task
    rules = RuleSet(decks=decks, dealer_hits_soft17=hits_soft17)
    shoe = Shoe.from_decks(decks)
    shoe.remove(up)
    cache = make_dealer_cache(shoe, up, rules, budget.depth, budget.cache_bytes)

    evs: OptionTable = {}
    for c1 in RANKS:
        for c2 in range(c1, TEN + 1):
            if (c1, c2) == (ACE, TEN) or not shoe.remove_all([c1, c2]):
                continue
            hand = HandState.from_cards([c1, c2])
            stand = stand_value(hand.total, cache.distribution(shoe))
            evs[(up, c1, c2)] = (
                stand,
                hit_ev(hand, up, shoe, cache, rules),
                double_ev(hand, up, shoe, cache, rules),
            )
            shoe.restore(c2)
            shoe.restore(c1)
    return evs


def deal_options(
    decks: int = 1,
    dealer_hits_soft17: bool = False,
    workers: int = 1,
    budget: CacheBudget | None = None,
) -> OptionTable:
    """Stand, hit and double EVs of every non-natural two-card hand, one task per up card."""
    budget = budget or CacheBudget()
    tasks = [(decks, dealer_hits_soft17, up, budget) for up in RANKS]
    options: OptionTable = {}
    for evs in run_tasks(_option_evs, tasks, workers, desc="up cards"):
        options.update(evs)
    return options


def split_values(
    rules: RuleSet,
    split_source: str = SOURCE_EXACT,
    workers: int = 1,
    split_evs: SplitTable | None = None,
    budget: CacheBudget | None = None,
) -> dict[tuple[int, int], float]:
    """
    Split EVs for every (pair, up) under the rules.

    Supplied split_evs are used as they are. Exact tables exist for single
    decks only.

    Raises:
        ValueError: for an exact source on a multideck shoe
    """
    if rules.max_hands == 1:
        return {}
    if split_evs is not None:
        return dict(split_evs)
    if split_source == SOURCE_EXACT and rules.decks > 1:
        raise ValueError("Exact split tables are single-deck only; use the approximation for more decks")
    budget = budget or CacheBudget()
    cells, _ = split_cells(
        [rules], source=split_source, depth=budget.depth, cache_bytes=budget.cache_bytes, workers=workers,
    )
    return split_table(cells, rules)


def _rounded(value: float | None, digits: int | None) -> float | None:
    if value is None or digits is None:
        return value
    return round(value, digits)


def _score_deal(
    deal: DealComponent,
    options: OptionTable,
    splits: Mapping[tuple[int, int], float],
    rules: RuleSet,
    digits: int | None,
) -> DealComponent:
    q = deal.natural_probability
    if (deal.c1, deal.c2) == (ACE, TEN):
        return deal.model_copy(update={"action": NATURAL, "ev": BLACKJACK_PAYS * (1 - q)})

    stand, hit, double = (_rounded(v, digits) for v in options[(deal.up, deal.c1, deal.c2)])
    if not double_permitted(HandState.from_cards([deal.c1, deal.c2]), rules.dd_option):
        double = None
    split = None
    if deal.c1 == deal.c2 and rules.max_hands > 1:
        if (deal.c1, deal.up) not in splits:
            raise ValueError(f"No split EV for pair {deal.c1} vs up card {deal.up}")
        split = _rounded(splits[(deal.c1, deal.up)], digits)

    action, best = Action.STAND.value, stand
    for name, value in ((Action.HIT.value, hit), (Action.DOUBLE.value, double), (SPLIT, split)):
        if value is not None and value > best:
            action, best = name, value
    return deal.model_copy(update={
        "stand": stand,
        "hit": hit,
        "double": double,
        "split": split,
        "action": action,
        "ev": -q + (1 - q) * best,
    })


def game_ev(
    rules: RuleSet,
    split_source: str = SOURCE_EXACT,
    workers: int = 1,
    split_evs: SplitTable | None = None,
    options: OptionTable | None = None,
    digits: int | None = None,
    budget: CacheBudget | None = None,
    natural_weighting: str | None = None,
) -> GameEV:
    """
    Whole-game EV in percent of the initial bet.

    Each deal takes the best of stand, hit, double (when the rules allow it)
    and split (for pairs, when max_hands > 1); ties go to standing. Naturals
    pay 3:2 and push against a dealer natural; a dealer natural otherwise
    takes the bet.

    Args:
        rules: Rule set
        split_source: "exact" or "approx" split tables
        workers: Worker processes for the per-up-card tasks
        split_evs: Precomputed (pair, up) split EVs, used instead of computing them
        options: Precomputed stand/hit/double EVs for the same decks and soft-17 rule
        digits: Round every option EV to this many decimals first
        budget: Dealer cache depth or byte budget for computed options and splits
        natural_weighting: "up-card" or "deal" (settings.NATURAL_WEIGHTING by default)

    Returns:
        GameEV with one component per initial deal
    """
    shoe = Shoe.from_decks(rules.decks)
    if options is None:
        options = deal_options(rules.decks, rules.dealer_hits_soft17, workers, budget)
    splits = split_values(rules, split_source, workers, split_evs, budget)

    deals = initial_deals(shoe, natural_weighting)
    components = [_score_deal(deal, options, splits, rules, digits) for deal in deals]
    value = 100.0 * sum(c.probability * c.ev for c in components)

    notes = []
    if split_evs is not None:
        notes.append("split EVs supplied by the caller")
    if rules.decks > 1:
        logger.warning("Multideck game EV uses the single-deck strategy tables")
        notes.append("single-deck basic strategy tables used for a multideck shoe")
    logger.info("Game EV %s: %+.4f%%", rules.label, value)
    return GameEV(
        value=value,
        rules=rules,
        split_source="supplied" if split_evs is not None else split_source,
        components=components,
        notes=notes,
    )


def rule_delta(
    base: RuleSet,
    variant: RuleSet,
    split_source: str = SOURCE_EXACT,
    workers: int = 1,
    split_tables: Mapping[RuleSet, SplitTable] | None = None,
    budget: CacheBudget | None = None,
) -> float:
    """game_ev(variant) - game_ev(base) in percentage points."""
    if base == variant:
        return 0.0
    split_tables = split_tables or {}
    shared = None
    if (base.decks, base.dealer_hits_soft17) == (variant.decks, variant.dealer_hits_soft17):
        shared = deal_options(base.decks, base.dealer_hits_soft17, workers, budget)
    base_ev = game_ev(base, split_source, workers, split_tables.get(base), shared, budget=budget)
    variant_ev = game_ev(variant, split_source, workers, split_tables.get(variant), shared, budget=budget)
    return variant_ev.value - base_ev.value


def precision_sweep(
    rules: RuleSet,
    digits: Iterable[int] = range(1, 9),
    split_source: str = SOURCE_EXACT,
    workers: int = 1,
    split_evs: SplitTable | None = None,
    budget: CacheBudget | None = None,
) -> list[PrecisionPoint]:
    """Game EV recomputed from option EVs rounded to each number of decimals."""
    options = deal_options(rules.decks, rules.dealer_hits_soft17, workers, budget)
    splits = split_values(rules, split_source, workers, split_evs, budget)
    reference = game_ev(rules, split_source, workers, splits, options).value
    points = []
    for k in digits:
        if k < 0:
            raise ValueError(f"Number of decimals must be non-negative, got {k}")
        value = game_ev(rules, split_source, workers, splits, options, digits=k).value
        points.append(PrecisionPoint(digits=k, value=value, deviation=value - reference))
    return points


def split_decisions(
    rules: RuleSet,
    split_source: str = SOURCE_EXACT,
    workers: int = 1,
    split_evs: SplitTable | None = None,
    options: OptionTable | None = None,
    budget: CacheBudget | None = None,
) -> list[SplitDecision]:
    """Per (pair, up): does splitting beat the best of stand, hit and an allowed double?"""
    if options is None:
        options = deal_options(rules.decks, rules.dealer_hits_soft17, workers, budget)
    splits = split_values(rules, split_source, workers, split_evs, budget)

    decisions = []
    for pair in RANKS:
        hand = HandState.from_cards([pair, pair])
        for up in RANKS:
            stand, hit, double = options[(up, pair, pair)]
            alternative, best = Action.STAND.value, stand
            if hit > best:
                alternative, best = Action.HIT.value, hit
            if double_permitted(hand, rules.dd_option) and double > best:
                alternative, best = Action.DOUBLE.value, double
            split = splits.get((pair, up))
            decisions.append(SplitDecision(
                pair=pair,
                up=up,
                split=split,
                best_alternative=best,
                alternative=alternative,
                split_is_best=split is not None and split > best,
            ))
    return decisions


def split_opportunity_stats(
    rules: RuleSet,
    split_source: str = SOURCE_EXACT,
    workers: int = 1,
    split_evs: SplitTable | None = None,
    game: GameEV | None = None,
) -> SplitOpportunityStats:
    """Probability of a playable pair, and of one where splitting is the best play."""
    if game is None:
        game = game_ev(rules, split_source, workers, split_evs)
    pairs = [c for c in game.components if c.c1 == c.c2]
    favorable = sum(c.probability * (1 - c.natural_probability) for c in pairs if c.action == SPLIT)
    return SplitOpportunityStats(pair_fraction=pair_fraction(pairs), favorable_fraction=favorable)


def game_ev_table(
    decks: int = 1,
    dealer_hits_soft17: bool = False,
    split_source: str = SOURCE_EXACT,
    workers: int = 1,
    split_tables: Mapping[RuleSet, SplitTable] | None = None,
    budget: CacheBudget | None = None,
    natural_weighting: str | None = None,
) -> list[GameTableRow]:
    """
    Base game and splitting-rule deltas for the four doubling columns.

    The base row is each column's own game EV without resplitting. Every
    delta row is measured from the base of the ND column in the same
    doubling half, so a DD1 or DD2 delta also carries the gain from doubling
    after splitting. Eliminating splitting only fills the ND columns.
    """
    split_tables = split_tables or {}
    options = deal_options(decks, dealer_hits_soft17, workers, budget)
    values: dict[RuleSet, float] = {}

    def value(rules: RuleSet) -> float:
        if rules not in values:
            values[rules] = game_ev(
                rules, split_source, workers, split_tables.get(rules), options,
                budget=budget, natural_weighting=natural_weighting,
            ).value
        return values[rules]

    rows = {name: {} for name in (OPTION_BASE, OPTION_RESPLIT, OPTION_RESPLIT_ACES, OPTION_NO_SPLIT)}
    for column, dd_option, dd_after_split in TABLE_COLUMNS:
        common = {"decks": decks, "dealer_hits_soft17": dealer_hits_soft17, "dd_option": dd_option}
        reference = value(RuleSet(**common, dd_after_split=ND, max_hands=2))
        common["dd_after_split"] = dd_after_split
        rows[OPTION_BASE][column] = value(RuleSet(**common, max_hands=2))
        rows[OPTION_RESPLIT][column] = value(RuleSet(**common, max_hands=4)) - reference
        rows[OPTION_RESPLIT_ACES][column] = value(RuleSet(**common, max_hands=4, resplit_aces=True)) - reference
        if dd_after_split == ND:
            rows[OPTION_NO_SPLIT][column] = value(RuleSet(**common, max_hands=1)) - reference
    return [GameTableRow(option=name, **columns) for name, columns in rows.items()]
