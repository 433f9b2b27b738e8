"""Tests for multiset addressing, the dealer cache and the hand index"""
import math
from itertools import combinations_with_replacement

import pytest

from app.models.cards import ACE, TEN
from app.utils.addressing import AddressPlan, HandIndex, plan_for_budget, t_value


@pytest.mark.parametrize("j, n", [(1, 0), (1, 11), (2, 11), (3, 5), (14, 11), (24, 11)])
def test_t_value(j, n):
    assert t_value(j, n) == math.comb(n + j - 1, j)


def test_t_value_small_cases():
    assert t_value(1, 7) == 7
    assert t_value(2, 11) == 66
    assert t_value(3, 0) == 0


@pytest.mark.parametrize("j, n", [(0, 5), (2, 12), (2, -1), (2000, 11)])
def test_t_value_rejects(j, n):
    with pytest.raises(ValueError):
        t_value(j, n)


def test_t_value_near_the_64_bit_limit():
    # C(210, 10) is about 3.7e16, C(2010, 10) about 3e26
    assert t_value(200, 11) == math.comb(210, 10)
    assert math.comb(2010, 10) >= 2**63


@pytest.mark.parametrize("j", [1, 2, 3, 4])
def test_address_is_a_bijection(j):
    plan = AddressPlan(j)
    addresses = {plan.address(list(reversed(combo))) for combo in combinations_with_replacement(range(TEN + 1), j)}
    assert addresses == set(range(1, plan.size + 1))
    assert plan.size == t_value(j, 11)


def test_padding_and_empty_multiset():
    plan = AddressPlan(3)
    assert plan.address([]) == 1
    assert plan.address([0, 0, 0]) == 1
    assert plan.address([5]) == plan.address([5, 0, 0])


@pytest.mark.parametrize("j", [2, 3, 4])
def test_slot_matches_address(j):
    plan = AddressPlan(j)
    for combo in combinations_with_replacement(range(ACE, TEN + 1), j):
        counts = [0] * (TEN + 1)
        for rank in combo:
            counts[rank] += 1
        assert plan.slot(counts) == plan.address(sorted(combo, reverse=True)) - 1


def test_slot_rejects_long_or_negative():
    plan = AddressPlan(2)
    assert plan.slot([0, 1, 1, 1, 0, 0, 0, 0, 0, 0, 0]) is None
    assert plan.slot([0, -1, 0, 0, 0, 0, 0, 0, 0, 0, 0]) is None
    assert plan.slot([0] * 11) == 0


def test_address_requires_sorted_removals():
    plan = AddressPlan(3)
    with pytest.raises(AssertionError):
        plan.address([2, 5])


def test_plan_for_budget():
    assert plan_for_budget(64 * 1024 * 1024, "float64", 24) == 13
    assert plan_for_budget(64 * 1024 * 1024, "float32", 24) == 14
    assert plan_for_budget(64 * 1024 * 1024, "float64", 8) == 8
    assert plan_for_budget(100, "float64", 24) == 0


def test_hand_index():
    index = HandIndex(4)
    counts = [0] * 11
    counts[8] = 1
    counts[3] = 2
    slot, position = index.get(counts)
    assert position == -1
    index.put(slot, 7)
    assert index.get(counts) == (slot, 7)
