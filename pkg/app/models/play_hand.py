"""Unique split hand and dealer outcome vector"""
from typing import NamedTuple


class DealerDistribution(NamedTuple):
    """Final dealer totals 17..21 and bust, conditional on no dealer natural"""
    d17: float
    d18: float
    d19: float
    d20: float
    d21: float
    dbust: float


class PlayHand:
    """
    One unique completed split hand.

    ``drawn`` holds the cards received after the split card, so the hand's
    composition is the split card plus ``drawn``. Counters accumulate over
    every order-distinct way the hand was generated.
    """

    __slots__ = (
        "split_card",
        "drawn",
        "occurrences",
        "splittable_occurrences",
        "total_bet",
        "total_bet_splittable",
    )

    def __init__(self, split_card: int, drawn: list[int]) -> None:
        self.split_card = split_card
        self.drawn = drawn
        self.occurrences = 0
        self.splittable_occurrences = 0
        self.total_bet = 0
        self.total_bet_splittable = 0

    def record(self, bet: int, splittable: bool) -> None:
        self.occurrences += 1
        self.total_bet += bet
        if splittable:
            self.splittable_occurrences += 1
            self.total_bet_splittable += bet

    @property
    def composition(self) -> list[int]:
        return sorted([self.split_card, *self.drawn], reverse=True)

    @property
    def nonsplit_occurrences(self) -> int:
        return self.occurrences - self.splittable_occurrences

    def average_bet(self, nonsplit: bool = False) -> float:
        """Average bet per realization, optionally over the non-splittable ones only."""
        if nonsplit:
            return (self.total_bet - self.total_bet_splittable) / self.nonsplit_occurrences
        return self.total_bet / self.occurrences

    def __repr__(self) -> str:
        return (
            f"<PlayHand(cards={self.composition}, occurrences={self.occurrences}, "
            f"splittable={self.splittable_occurrences}, total_bet={self.total_bet})>"
        )
