"""Tests for whole-game EVs"""
from types import SimpleNamespace

import pytest

from app.models.cards import ACE, RANKS, TEN, Shoe
from app.schemas.rules import DD1, DD2, ND, RuleSet
from app.services import game_service
from app.services.game_service import (
    NATURAL,
    NATURAL_BY_DEAL,
    NATURAL_BY_UP_CARD,
    NATURAL_WEIGHTINGS,
    OPTION_BASE,
    OPTION_NO_SPLIT,
    OPTION_RESPLIT,
    OPTION_RESPLIT_ACES,
    SPLIT,
    TABLE_COLUMNS,
    game_ev,
    game_ev_table,
    initial_deals,
    pair_fraction,
    precision_sweep,
    rule_delta,
    split_decisions,
    split_opportunity_stats,
    split_values,
)
from app.services.table_service import SOURCE_APPROX
from tests.reference_values import (
    APPROX_GAME_TOLERANCE,
    FAVORABLE_SPLIT_FRACTION,
    FAVORABLE_SPLIT_TOLERANCE,
    GAME_BASE,
    GAME_NO_SPLIT,
    GAME_RESPLIT,
    GAME_RESPLIT_ACES,
    GAME_TOLERANCE,
    H2_DD1,
    H2_ND,
    H4_DD1,
    H4_ND,
    HIT_SOFT17_SHIFT,
    MULTIDECK_DECREASE,
    MULTIDECK_TOLERANCE,
    PAIR_FRACTION,
    split_column,
)


def _flat_options(stand: float = 0.0, hit: float = 0.0, double: float = 0.0) -> dict:
    return {
        (up, c1, c2): (stand, hit, double)
        for up in RANKS
        for c1 in RANKS
        for c2 in range(c1, TEN + 1)
        if (c1, c2) != (ACE, TEN)
    }


def _flat_splits(value: float) -> dict:
    return {(pair, up): value for pair in RANKS for up in RANKS}


@pytest.mark.parametrize("decks", [1, 2, 6])
def test_deal_probabilities_sum_to_one(decks):
    deals = initial_deals(Shoe.from_decks(decks))
    assert sum(d.probability for d in deals) == pytest.approx(1.0, abs=1e-12)
    assert all(d.c1 <= d.c2 for d in deals)
    assert all(0 <= d.natural_probability < 1 for d in deals)


def test_dealer_natural_probability():
    deals = {(d.up, d.c1, d.c2): d for d in initial_deals(Shoe.from_decks(1), NATURAL_BY_UP_CARD)}
    assert deals[(ACE, 8, 9)].natural_probability == pytest.approx(16 / 51)
    assert deals[(TEN, 8, 9)].natural_probability == pytest.approx(4 / 51)
    assert deals[(TEN, ACE, ACE)].natural_probability == pytest.approx(4 / 51)
    assert deals[(6, 8, 9)].natural_probability == 0.0


def test_natural_per_deal():
    deals = {(d.up, d.c1, d.c2): d for d in initial_deals(Shoe.from_decks(1), NATURAL_BY_DEAL)}
    assert deals[(ACE, 8, 9)].natural_probability == pytest.approx(16 / 49)
    assert deals[(TEN, 8, 9)].natural_probability == pytest.approx(4 / 49)
    assert deals[(TEN, ACE, ACE)].natural_probability == pytest.approx(2 / 49)
    assert deals[(6, 8, 9)].natural_probability == 0.0


@pytest.mark.parametrize("weighting", NATURAL_WEIGHTINGS)
def test_weightings_share_the_natural_chance(weighting):
    deals = initial_deals(Shoe.from_decks(1), weighting)
    assert sum(d.probability * d.natural_probability for d in deals) == pytest.approx(128 / 2652, abs=1e-12)
    ten_six = {(d.up, d.c1, d.c2): d for d in deals}[(TEN, 6, TEN)]
    assert ten_six.probability == pytest.approx(2 * (4 / 52) * (16 / 51) * (15 / 50))


def test_unknown_weighting():
    with pytest.raises(ValueError):
        initial_deals(Shoe.from_decks(1), "shoe")


@pytest.mark.slow
def test_natural_weighting_moves_the_game(single_deck_options):
    rules = RuleSet(max_hands=2)
    splits = split_column(H2_ND)
    by_up_card = game_ev(rules, split_evs=splits, options=single_deck_options, natural_weighting=NATURAL_BY_UP_CARD)
    by_deal = game_ev(rules, split_evs=splits, options=single_deck_options, natural_weighting=NATURAL_BY_DEAL)
    assert by_up_card.value == pytest.approx(GAME_BASE[0], abs=GAME_TOLERANCE)
    assert by_deal.value - by_up_card.value == pytest.approx(0.0438, abs=2e-3)


def test_pair_fraction():
    fraction = pair_fraction(initial_deals(Shoe.from_decks(1), NATURAL_BY_UP_CARD))
    assert fraction == pytest.approx(PAIR_FRACTION, abs=2e-4)


def test_small_shoe_cannot_deal():
    with pytest.raises(ValueError):
        initial_deals(Shoe.from_counts({"T": 3}))


def test_split_values():
    assert split_values(RuleSet(max_hands=1)) == {}
    supplied = _flat_splits(0.25)
    assert split_values(RuleSet(), split_evs=supplied) == supplied
    with pytest.raises(ValueError):
        split_values(RuleSet(decks=2))


def test_standing_wins_ties():
    rules = RuleSet(max_hands=2)
    game = game_ev(rules, split_evs=_flat_splits(0.0), options=_flat_options())
    expected = 0.0
    for deal in initial_deals(Shoe.from_decks(1)):
        if (deal.c1, deal.c2) == (ACE, TEN):
            expected += deal.probability * 1.5 * (1 - deal.natural_probability)
        else:
            expected -= deal.probability * deal.natural_probability
    assert game.value == pytest.approx(100 * expected, abs=1e-12)
    assert {c.action for c in game.components} == {"stand", NATURAL}
    assert game.split_source == "supplied"


@pytest.mark.parametrize("dd_option, eleven, soft", [(ND, "hit", "hit"), (DD2, "double", "hit"), (DD1, "double", "double")])
def test_double_follows_the_rules(dd_option, eleven, soft):
    rules = RuleSet(dd_option=dd_option, dd_after_split=ND, max_hands=1)
    game = game_ev(rules, options=_flat_options(0.0, 0.1, 0.2))
    actions = {(c.up, c.c1, c.c2): c.action for c in game.components}
    assert actions[(6, 5, 6)] == eleven
    assert actions[(6, ACE, 6)] == soft
    assert all(c.split is None for c in game.components)


def test_split_only_when_it_is_best():
    options = _flat_options(0.0, 0.1, 0.0)
    game = game_ev(RuleSet(dd_option=ND), split_evs=_flat_splits(0.3), options=options)
    pairs = [c for c in game.components if c.c1 == c.c2]
    assert all(c.action == SPLIT for c in pairs)
    low = game_ev(RuleSet(dd_option=ND), split_evs=_flat_splits(0.05), options=options)
    assert not any(c.action == SPLIT for c in low.components)


def test_missing_split_value():
    splits = _flat_splits(0.0)
    del splits[(8, 6)]
    with pytest.raises(ValueError):
        game_ev(RuleSet(), split_evs=splits, options=_flat_options())


def test_rounded_option_evs():
    options = _flat_options(0.0004, 0.0, 0.0)
    exact = game_ev(RuleSet(max_hands=1), options=options)
    rounded = game_ev(RuleSet(max_hands=1), options=options, digits=3)
    assert all(c.stand == 0.0 for c in rounded.components if c.action != NATURAL)
    assert rounded.value < exact.value


def test_split_opportunities():
    options = _flat_options()
    rules = RuleSet()
    game = game_ev(rules, split_evs=_flat_splits(1.0), options=options)
    stats = split_opportunity_stats(rules, game=game)
    assert stats.favorable_fraction == pytest.approx(stats.pair_fraction)
    never = game_ev(RuleSet(max_hands=1), options=options)
    assert split_opportunity_stats(RuleSet(max_hands=1), game=never).favorable_fraction == 0.0


def test_split_decisions():
    splits = _flat_splits(0.05)
    decisions = split_decisions(RuleSet(dd_option=DD2), split_evs=splits, options=_flat_options(0.0, 0.1, 0.2))
    assert len(decisions) == 100
    by_cell = {(d.pair, d.up): d for d in decisions}
    assert by_cell[(5, 6)].alternative == "double"
    assert by_cell[(8, 6)].alternative == "hit"
    assert not any(d.split_is_best for d in decisions)


def test_rule_delta_of_identical_rules():
    assert rule_delta(RuleSet(), RuleSet()) == 0.0


def test_precision_sweep(monkeypatch):
    options = _flat_options(0.123456789, 0.0, 0.0)
    monkeypatch.setattr(game_service, "deal_options", lambda *args, **kwargs: options)
    points = precision_sweep(RuleSet(max_hands=1), digits=[1, 4, 8])
    assert [p.digits for p in points] == [1, 4, 8]
    assert abs(points[-1].deviation) < 1e-6
    assert abs(points[0].deviation) > abs(points[1].deviation)
    with pytest.raises(ValueError):
        precision_sweep(RuleSet(max_hands=1), digits=[-1])


@pytest.fixture(scope="module")
def single_deck_options():
    return game_service.deal_options(1, False)


def _published(column: int, rules: RuleSet, h2_column: int | None = None) -> dict:
    """Published column over the approximation; ace rows from the h=2 column when aces cannot resplit."""
    table = split_values(rules, SOURCE_APPROX)
    table.update(split_column(column))
    if h2_column is not None:
        table.update({key: value for key, value in split_column(h2_column).items() if key[0] == ACE})
    return table


def _supplied_tables() -> dict:
    """Split tables for every rule set of the game table: published cells where printed, the approximation elsewhere."""
    tables = {}
    for dd_option in (DD1, DD2):
        tables[RuleSet(dd_option=dd_option, max_hands=2)] = split_column(H2_ND)
        tables[RuleSet(dd_option=dd_option, max_hands=4)] = _published(H4_ND, RuleSet(dd_option=dd_option, max_hands=4), H2_ND)
        tables[RuleSet(dd_option=dd_option, max_hands=4, resplit_aces=True)] = split_column(H4_ND)
    das = {"dd_option": DD1, "dd_after_split": DD1}
    tables[RuleSet(**das, max_hands=2)] = split_column(H2_DD1)
    tables[RuleSet(**das, max_hands=4)] = _published(H4_DD1, RuleSet(**das, max_hands=4), H2_DD1)
    tables[RuleSet(**das, max_hands=4, resplit_aces=True)] = _published(H4_DD1, RuleSet(**das, max_hands=4, resplit_aces=True))
    for max_hands, resplit_aces in ((2, False), (4, False), (4, True)):
        rules = RuleSet(dd_option=DD2, dd_after_split=DD2, max_hands=max_hands, resplit_aces=resplit_aces)
        tables[rules] = split_values(rules, SOURCE_APPROX)
    return tables


@pytest.fixture(scope="module")
def game_table(single_deck_options):
    with pytest.MonkeyPatch.context() as patch:
        patch.setattr(game_service, "deal_options", lambda *args, **kwargs: single_deck_options)
        rows = game_ev_table(split_tables=_supplied_tables())
    return {row.option: row for row in rows}


# (row, expected values, tolerance per column); resplitting with DD2 after splitting uses approximated tables
game_table_cases = [
    (OPTION_BASE, GAME_BASE, (GAME_TOLERANCE,) * 4),
    (OPTION_RESPLIT, GAME_RESPLIT, (GAME_TOLERANCE,) * 3 + (GAME_TOLERANCE + APPROX_GAME_TOLERANCE,)),
    (OPTION_RESPLIT_ACES, GAME_RESPLIT_ACES, (GAME_TOLERANCE,) * 3 + (GAME_TOLERANCE + APPROX_GAME_TOLERANCE,)),
    (OPTION_NO_SPLIT, GAME_NO_SPLIT, (GAME_TOLERANCE,) * 4),
]


@pytest.mark.slow
@pytest.mark.parametrize("option, expected, tolerances", game_table_cases)
@pytest.mark.parametrize("index, column", list(enumerate(c[0] for c in TABLE_COLUMNS)))
def test_game_table_cells(game_table, option, expected, tolerances, index, column):
    value = getattr(game_table[option], column)
    if expected[index] is None:
        assert value is None
    else:
        assert value == pytest.approx(expected[index], abs=tolerances[index])


@pytest.mark.slow
def test_game_table_resplit_rows_start_from_the_nd_base(game_table):
    base = game_table[OPTION_BASE]
    resplit = game_table[OPTION_RESPLIT]
    # the DD1 delta includes the gain from doubling after splitting
    assert resplit.dd_any_dd1 - (base.dd_any_dd1 - base.dd_any_nd) == pytest.approx(GAME_RESPLIT[1] - (GAME_BASE[1] - GAME_BASE[0]), abs=2 * GAME_TOLERANCE)
    assert resplit.dd_any_dd1 > base.dd_any_dd1 - base.dd_any_nd


@pytest.mark.slow
def test_doubling_after_splitting_base(single_deck_options):
    rules = RuleSet(dd_after_split=DD1, max_hands=2)
    game = game_ev(rules, split_evs=split_column(H2_DD1), options=single_deck_options)
    assert game.value == pytest.approx(GAME_BASE[1], abs=GAME_TOLERANCE)


def _stub_game_value(rules: RuleSet) -> float:
    value = {ND: 0.0, DD1: 1.0, DD2: 2.0}[rules.dd_after_split] + rules.max_hands / 10
    if rules.resplit_aces:
        value += 0.01
    if rules.dd_option == DD2:
        value += 100
    return value


def test_game_table_deltas_subtract_the_nd_base(monkeypatch):
    monkeypatch.setattr(game_service, "deal_options", lambda *args, **kwargs: {})
    monkeypatch.setattr(game_service, "game_ev", lambda rules, *args, **kwargs: SimpleNamespace(value=_stub_game_value(rules)))
    rows = {row.option: row for row in game_ev_table()}
    assert list(rows) == [OPTION_BASE, OPTION_RESPLIT, OPTION_RESPLIT_ACES, OPTION_NO_SPLIT]

    assert rows[OPTION_BASE].dd_any_nd == pytest.approx(0.2)
    assert rows[OPTION_BASE].dd_any_dd1 == pytest.approx(1.2)
    assert rows[OPTION_BASE].dd_10_11_dd2 == pytest.approx(102.2)
    # ND base is 0.2 on the left half and 100.2 on the right
    assert rows[OPTION_RESPLIT].dd_any_nd == pytest.approx(0.2)
    assert rows[OPTION_RESPLIT].dd_any_dd1 == pytest.approx(1.2)
    assert rows[OPTION_RESPLIT_ACES].dd_any_dd1 == pytest.approx(1.21)
    assert rows[OPTION_RESPLIT].dd_10_11_dd2 == pytest.approx(2.2)
    assert rows[OPTION_RESPLIT_ACES].dd_10_11_dd2 == pytest.approx(2.21)
    assert rows[OPTION_NO_SPLIT].dd_any_nd == pytest.approx(-0.1)
    assert rows[OPTION_NO_SPLIT].dd_10_11_nd == pytest.approx(-0.1)
    assert rows[OPTION_NO_SPLIT].dd_any_dd1 is None
    assert rows[OPTION_NO_SPLIT].dd_10_11_dd2 is None


@pytest.mark.slow
def test_dealer_hitting_soft17_costs_the_player():
    stand = game_ev(RuleSet(max_hands=2), split_source=SOURCE_APPROX).value
    hit = game_ev(RuleSet(max_hands=2, dealer_hits_soft17=True), split_source=SOURCE_APPROX).value
    low, high = HIT_SOFT17_SHIFT
    assert low - 0.02 <= stand - hit <= high + 0.02


@pytest.mark.slow
@pytest.mark.parametrize("decks", sorted(MULTIDECK_DECREASE))
def test_more_decks_cost_the_player(decks):
    single = game_ev(RuleSet(max_hands=2), split_source=SOURCE_APPROX).value
    game = game_ev(RuleSet(decks=decks, max_hands=2), split_source=SOURCE_APPROX)
    assert single - game.value == pytest.approx(MULTIDECK_DECREASE[decks], abs=MULTIDECK_TOLERANCE)
    assert game.notes


@pytest.mark.slow
def test_few_pairs_are_worth_splitting(single_deck_options):
    rules = RuleSet(dd_after_split=DD1, max_hands=4, resplit_aces=True)
    splits = _published(H4_DD1, rules)
    stats = split_opportunity_stats(rules, game=game_ev(rules, split_evs=splits, options=single_deck_options))
    assert stats.pair_fraction == pytest.approx(PAIR_FRACTION, abs=2e-4)
    assert stats.favorable_fraction == pytest.approx(FAVORABLE_SPLIT_FRACTION, abs=FAVORABLE_SPLIT_TOLERANCE)
