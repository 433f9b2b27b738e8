"""Card ranks, shoe state, hands and scoring"""
from collections.abc import Iterable, Mapping, Sequence
from typing import NamedTuple

ACE = 1
TEN = 10
RANKS = range(ACE, TEN + 1)
# Loop order of the split enumerators
RANKS_DESC = range(TEN, ACE - 1, -1)

MAX_HAND_CARDS = 14

_RANK_ALIASES = {
    "A": ACE,
    "1": ACE,
    "T": TEN,
    "10": TEN,
    "J": TEN,
    "Q": TEN,
    "K": TEN,
}


def parse_rank(text: str | int) -> int:
    """
    Parse a card rank from user input.

    Accepts ``A``/``1`` for aces, ``2``..``9``, and ``T``/``10``/``J``/``Q``/``K``
    for ten-value cards.

    Raises:
        ValueError: if the text is not a card rank
    """
    if isinstance(text, int):
        if text in RANKS:
            return text
        raise ValueError(f"Invalid card rank: {text}")
    token = text.strip().upper()
    if token in _RANK_ALIASES:
        return _RANK_ALIASES[token]
    if token.isdigit() and 2 <= int(token) <= 9:
        return int(token)
    raise ValueError(f"Invalid card rank: {text!r}")


def parse_ranks(text: str) -> list[int]:
    """Parse a comma-separated rank list such as ``A,2,T``."""
    items = [item for item in text.split(",") if item.strip()]
    if not items:
        raise ValueError("Empty card list")
    return [parse_rank(item) for item in items]


def rank_label(rank: int) -> str:
    """Short label used in tables: A, 2..9, T."""
    if rank == ACE:
        return "A"
    if rank == TEN:
        return "T"
    return str(rank)


def natural_rank(up: int) -> int:
    """Rank that completes a dealer natural for this up card, 0 when none can."""
    if up == ACE:
        return TEN
    if up == TEN:
        return ACE
    return 0


class Score(NamedTuple):
    """Hand score: total and whether an ace is counted as 11"""
    total: int
    soft: bool


def score_cards(cards: Iterable[int]) -> Score:
    """Score a plain sequence of ranks."""
    hard = 0
    has_ace = False
    for card in cards:
        hard += card
        has_ace = has_ace or card == ACE
    if has_ace and hard <= 11:
        return Score(hard + 10, True)
    return Score(hard, False)


class Shoe:
    """Remaining cards counted by rank (index 0 unused)"""

    __slots__ = ("counts", "total", "decks")

    def __init__(self, counts: Sequence[int], decks: int = 1) -> None:
        self.counts = list(counts)
        self.total = sum(self.counts)
        self.decks = decks

    @classmethod
    def from_decks(cls, decks: int = 1) -> "Shoe":
        if decks < 1:
            raise ValueError("Deck count must be at least 1")
        counts = [0] + [4 * decks] * 9 + [16 * decks]
        return cls(counts, decks)

    @classmethod
    def from_counts(cls, counts: Mapping[int | str, int] | Sequence[int], decks: int = 1) -> "Shoe":
        """
        Build a contrived shoe.

        Args:
            counts: mapping rank -> count, or a sequence of ten counts for A..T
            decks: deck count used for the per-rank maxima

        Raises:
            ValueError: if a count is negative or above the maximum for the deck count
        """
        if isinstance(counts, Mapping):
            values = [0] * 11
            for rank, count in counts.items():
                values[parse_rank(rank)] += count
        else:
            if len(counts) != 10:
                raise ValueError("Expected ten counts, ace through ten")
            values = [0, *counts]
        shoe = cls(values, decks)
        for rank in RANKS:
            if not 0 <= values[rank] <= shoe.max_count(rank):
                raise ValueError(
                    f"Count {values[rank]} for rank {rank_label(rank)} is outside 0..{shoe.max_count(rank)}"
                )
        return shoe

    def max_count(self, rank: int) -> int:
        return 16 * self.decks if rank == TEN else 4 * self.decks

    def remove(self, rank: int) -> bool:
        """Take one card of a rank; False leaves the shoe unchanged when none remain."""
        if self.counts[rank] == 0:
            return False
        self.counts[rank] -= 1
        self.total -= 1
        return True

    def remove_all(self, ranks: Iterable[int]) -> bool:
        """Remove several cards, all or nothing."""
        taken: list[int] = []
        for rank in ranks:
            if not self.remove(rank):
                for card in taken:
                    self.restore(card)
                return False
            taken.append(rank)
        return True

    def restore(self, rank: int) -> None:
        assert self.counts[rank] < self.max_count(rank), f"restore above maximum for rank {rank}"
        self.counts[rank] += 1
        self.total += 1

    def copy(self) -> "Shoe":
        return Shoe(self.counts, self.decks)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Shoe):
            return NotImplemented
        return self.counts == other.counts and self.decks == other.decks

    def __repr__(self) -> str:
        cards = ", ".join(f"{rank_label(r)}:{self.counts[r]}" for r in RANKS)
        return f"<Shoe(decks={self.decks}, total={self.total}, {cards})>"


class HandState:
    """
    One player hand tracked by running totals.

    ``bet`` is in initial-bet units (2 after doubling). ``second_card`` is 0
    until the hand holds two cards.
    """

    __slots__ = ("card_counts", "first_card", "second_card", "num_cards", "bet", "hard_total", "aces")

    def __init__(self) -> None:
        self.card_counts = [0] * 11
        self.first_card = 0
        self.second_card = 0
        self.num_cards = 0
        self.bet = 1
        self.hard_total = 0
        self.aces = 0

    @classmethod
    def seed(cls, first_card: int) -> "HandState":
        """A split hand holding its single split card."""
        hand = cls()
        hand.hit(first_card)
        return hand

    @classmethod
    def from_cards(cls, cards: Iterable[int]) -> "HandState":
        hand = cls()
        for card in cards:
            hand.hit(card)
        return hand

    def hit(self, rank: int) -> None:
        assert self.num_cards < MAX_HAND_CARDS, "hand longer than the longest playable hand"
        self.card_counts[rank] += 1
        self.num_cards += 1
        self.hard_total += rank
        if rank == ACE:
            self.aces += 1
        if self.num_cards == 1:
            self.first_card = rank
        elif self.num_cards == 2:
            self.second_card = rank

    def unhit(self, rank: int) -> None:
        assert self.card_counts[rank] > 0, f"rank {rank} not in hand"
        self.card_counts[rank] -= 1
        self.num_cards -= 1
        self.hard_total -= rank
        if rank == ACE:
            self.aces -= 1
        if self.num_cards == 1:
            self.second_card = 0
        elif self.num_cards == 0:
            self.first_card = 0

    @property
    def total(self) -> int:
        if self.aces and self.hard_total <= 11:
            return self.hard_total + 10
        return self.hard_total

    @property
    def soft(self) -> bool:
        return self.aces > 0 and self.hard_total <= 11

    @property
    def busted(self) -> bool:
        return self.hard_total > 21

    def pair(self) -> tuple[int, int]:
        """Two-card composition, low card first."""
        if self.first_card <= self.second_card:
            return self.first_card, self.second_card
        return self.second_card, self.first_card

    def cards(self) -> list[int]:
        """Composition in non-increasing order."""
        return [rank for rank in RANKS_DESC for _ in range(self.card_counts[rank])]

    def __repr__(self) -> str:
        labels = ",".join(rank_label(r) for r in self.cards())
        return f"<HandState({labels}, bet={self.bet})>"


def score(hand: HandState) -> Score:
    """Score of a hand from its running totals."""
    return Score(hand.total, hand.soft)
