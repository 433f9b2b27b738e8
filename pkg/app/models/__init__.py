"""In-memory domain models"""
from app.models.cards import ACE, TEN, RANKS, HandState, Score, Shoe, score, score_cards
from app.models.play_hand import DealerDistribution, PlayHand

__all__ = [
    "ACE",
    "TEN",
    "RANKS",
    "HandState",
    "Score",
    "Shoe",
    "score",
    "score_cards",
    "DealerDistribution",
    "PlayHand",
]
