"""Tests for single-hand exact EVs"""
import pytest

from app.models.cards import ACE, RANKS, TEN, HandState, Shoe
from app.models.play_hand import DealerDistribution
from app.schemas.rules import RuleSet
from app.services.dealer_service import make_dealer_cache
from app.services.exact_ev_service import (
    basic_strategy_ev,
    card_weights,
    double_ev,
    hand_evs,
    hit_ev,
    player_card_prob,
    stand_ev,
    stand_value,
)
from tests.reference_values import TENS_VS_SIX


def _shoe(removed: list[int]) -> Shoe:
    shoe = Shoe.from_decks(1)
    assert shoe.remove_all(removed)
    return shoe


@pytest.mark.parametrize("up", list(RANKS))
def test_card_weights_sum_to_one(up):
    shoe = _shoe([up, 8, 8, TEN, ACE])
    weights = card_weights(shoe, up)
    assert weights[0] == 0
    assert sum(weights) == pytest.approx(1.0, abs=1e-12)
    for rank in RANKS:
        assert player_card_prob(shoe, up, rank) == pytest.approx(weights[rank], abs=1e-15)


def test_no_natural_shifts_weight_to_the_natural_card():
    shoe = _shoe([ACE])
    weights = card_weights(shoe, ACE)
    # The hole card is known not to be a ten, so tens are likelier for the player
    assert weights[TEN] > shoe.counts[TEN] / shoe.total
    assert weights[5] < shoe.counts[5] / shoe.total


def test_weights_degenerate_when_only_natural_cards_remain():
    shoe = Shoe.from_counts({"T": 3})
    assert card_weights(shoe, ACE)[TEN] == pytest.approx(1.0)


stand_cases = [
    (22, DealerDistribution(0.2, 0.2, 0.2, 0.2, 0.1, 0.1), -1.0),
    (16, DealerDistribution(0.2, 0.2, 0.2, 0.2, 0.1, 0.1), -0.8),
    (19, DealerDistribution(0.2, 0.2, 0.2, 0.2, 0.1, 0.1), 0.5 - 0.3),
    (21, DealerDistribution(0.0, 0.0, 0.0, 0.0, 0.0, 1.0), 1.0),
    (17, DealerDistribution(1.0, 0.0, 0.0, 0.0, 0.0, 0.0), 0.0),
]


@pytest.mark.parametrize("total, dist, expected", stand_cases)
def test_stand_value(total, dist, expected):
    assert stand_value(total, dist) == pytest.approx(expected)


def test_tens_stand_vs_six():
    report = hand_evs("T,T", 6, RuleSet())
    assert report.action == "stand"
    assert report.basic == pytest.approx(report.stand)
    assert report.stand == pytest.approx(TENS_VS_SIX[0], abs=1e-6)
    assert report.total == 20 and not report.soft


def test_sixteen_vs_ten_hits():
    report = hand_evs("T,6", TEN, RuleSet())
    assert report.action == "hit"
    assert report.basic == pytest.approx(report.hit)
    assert -0.6 < report.hit < -0.5
    assert report.stand < 0


def test_double_only_on_two_cards():
    three = hand_evs("5,3,2", 6, RuleSet())
    assert three.double is None
    two = hand_evs("6,5", 6, RuleSet())
    assert two.action == "double"
    assert two.basic == pytest.approx(two.double)
    assert two.double > two.hit


def test_hand_evs_rejects_undealable_cards():
    with pytest.raises(ValueError):
        hand_evs("5,5,5,5", 5, RuleSet())


def test_cache_does_not_change_values():
    rules = RuleSet()
    for cards, up in [("T,6", TEN), ("A,7", 9), ("2,3", 4)]:
        assert hand_evs(cards, up, rules, depth=0) == hand_evs(cards, up, rules, depth=6)


def test_basic_strategy_ev_leaves_shoe_untouched():
    shoe = _shoe([9, TEN, 6])
    before = shoe.copy()
    hand = HandState.from_cards([TEN, 6])
    cache = make_dealer_cache(shoe, 9, RuleSet(), depth=4)
    basic_strategy_ev(hand, 9, shoe, cache, RuleSet())
    assert shoe == before
    assert hand.cards() == [TEN, 6]


def test_options_on_a_shoe_of_tens():
    # 6,5 vs 6 with only tens left: the player makes 21 and the dealer always busts
    shoe = Shoe.from_counts({"T": 5})
    rules = RuleSet()
    hand = HandState.from_cards([6, 5])
    cache = make_dealer_cache(shoe, 6, rules, depth=2)
    assert stand_ev(hand, 6, cache.distribution(shoe)) == pytest.approx(1.0)
    assert hit_ev(hand, 6, shoe, cache, rules) == pytest.approx(1.0)
    assert double_ev(hand, 6, shoe, cache, rules) == pytest.approx(2.0)
    assert shoe == Shoe.from_counts({"T": 5})


def test_hit_and_double_match_hand_evs():
    rules = RuleSet()
    shoe = _shoe([6, 6, 5])
    hand = HandState.from_cards([6, 5])
    cache = make_dealer_cache(shoe, 6, rules, depth=4)
    report = hand_evs("6,5", 6, rules)
    assert hit_ev(hand, 6, shoe, cache, rules) == pytest.approx(report.hit, abs=1e-12)
    assert double_ev(hand, 6, shoe, cache, rules) == pytest.approx(report.double, abs=1e-12)
