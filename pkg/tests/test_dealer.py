"""Tests for dealer final-total distributions"""
import pytest

from app.models.cards import ACE, RANKS, TEN, Shoe
from app.models.play_hand import DealerDistribution
from app.schemas.rules import RuleSet
from app.services.dealer_service import (
    dealer_distribution,
    dealer_distribution_hole_conditioned,
    hole_conditioned_card_probs,
    make_conditioned_cache,
    make_dealer_cache,
)
from tests.oracles import brute_dealer_distribution

toy_shoes = [
    (6, {"T": 5, "9": 2, "8": 1, "2": 1, "A": 1}),
    (ACE, {"T": 4, "A": 1, "7": 2, "6": 1, "9": 1}),
    (TEN, {"T": 3, "A": 2, "7": 1, "8": 2, "9": 1}),
    (2, {"T": 6, "9": 2, "5": 1, "4": 1}),
]


def _full_shoe_minus(up: int, decks: int = 1) -> Shoe:
    shoe = Shoe.from_decks(decks)
    shoe.remove(up)
    return shoe


@pytest.mark.parametrize("hits_soft17", [False, True])
@pytest.mark.parametrize("up", list(RANKS))
def test_distribution_is_normalized(up, hits_soft17):
    dist = dealer_distribution(_full_shoe_minus(up), up, RuleSet(dealer_hits_soft17=hits_soft17))
    assert sum(dist) == pytest.approx(1.0, abs=1e-12)
    assert all(p >= 0 for p in dist)


@pytest.mark.parametrize("hits_soft17", [False, True])
@pytest.mark.parametrize("up, counts", toy_shoes)
def test_distribution_matches_brute_force(up, counts, hits_soft17):
    shoe = Shoe.from_counts(counts)
    dist = dealer_distribution(shoe, up, RuleSet(dealer_hits_soft17=hits_soft17))
    expected = brute_dealer_distribution(shoe.counts, up, hits_soft17)
    assert list(dist) == pytest.approx(expected, abs=1e-12)


def test_six_up_busts_often():
    dist = dealer_distribution(_full_shoe_minus(6), 6, RuleSet())
    assert 0.41 < dist.dbust < 0.44


def test_hitting_soft17_removes_dealer_seventeens():
    shoe = _full_shoe_minus(6)
    stand = dealer_distribution(shoe, 6, RuleSet())
    hit = dealer_distribution(shoe, 6, RuleSet(dealer_hits_soft17=True))
    assert hit.d17 < stand.d17
    assert hit.dbust > stand.dbust


def test_distribution_leaves_shoe_untouched():
    shoe = _full_shoe_minus(ACE)
    before = shoe.copy()
    dealer_distribution(shoe, ACE, RuleSet())
    assert shoe == before


def test_hole_conditioned_probs_sum_to_one():
    shoe = Shoe.from_decks(1)
    shoe.remove_all([6, 8, 8])
    for i in (2, 3, 4):
        probs = hole_conditioned_card_probs(shoe.counts, shoe.total, 8, i)
        assert sum(probs) == pytest.approx(1.0, abs=1e-12)
        # Unseen non-8 player cards make an 8 more likely
        assert probs[8] > shoe.counts[8] / shoe.total


def test_hole_conditioned_probs_without_split_cards():
    shoe = Shoe.from_counts({"T": 6, "5": 2, "2": 2})
    probs = hole_conditioned_card_probs(shoe.counts, shoe.total, 8, 3)
    assert probs == pytest.approx([c / shoe.total for c in shoe.counts])


def test_hole_conditioned_distribution():
    shoe = Shoe.from_decks(1)
    shoe.remove_all([6, 8, 8])
    dist = dealer_distribution_hole_conditioned(shoe, 6, 8, 3, RuleSet())
    assert sum(dist) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ValueError):
        dealer_distribution_hole_conditioned(shoe, 6, 8, 5, RuleSet())


def test_cache_is_transparent():
    shoe = _full_shoe_minus(9)
    rules = RuleSet()
    cached = make_dealer_cache(shoe, 9, rules, depth=4)
    for removals in ([2], [TEN, 5], [ACE, ACE, 3], [7, 7, 7, 7], [TEN, 9, 8, 3, 2]):
        assert shoe.remove_all(removals)
        direct = dealer_distribution(shoe, 9, rules)
        assert cached.distribution(shoe) == pytest.approx(direct, abs=1e-15)
        assert cached.distribution(shoe) == pytest.approx(direct, abs=1e-15)
        for card in removals:
            shoe.restore(card)
    stats = cached.stats()
    assert stats.misses == 4
    assert stats.hits == 4
    assert stats.bypasses == 2


def test_lookup_or_compute_stores_once():
    cache = make_dealer_cache(_full_shoe_minus(9), 9, RuleSet(), depth=2)
    calls = []

    def compute():
        calls.append(1)
        return DealerDistribution(0.1, 0.1, 0.1, 0.1, 0.1, 0.5)

    first = cache.lookup_or_compute([TEN, 5], compute)
    second = cache.lookup_or_compute([TEN, 5], compute)
    assert len(calls) == 1
    assert second == pytest.approx(first)
    cache.lookup_or_compute([TEN, 5, 2], compute)
    assert len(calls) == 2
    assert cache.stats().bypasses == 1


def test_conditioned_cache_matches_direct():
    shoe = Shoe.from_decks(1)
    shoe.remove_all([6, 8, 8])
    rules = RuleSet()
    cache = make_conditioned_cache(shoe, 6, 8, 3, rules)
    shoe.remove(TEN)
    direct = dealer_distribution_hole_conditioned(shoe, 6, 8, 3, rules)
    assert cache.distribution(shoe) == pytest.approx(direct, abs=1e-15)
    assert cache.distribution(shoe) == pytest.approx(direct, abs=1e-15)
    assert cache.stats().hits == 1
