"""Rule set schemas"""
from pydantic import BaseModel, Field, model_validator

from app.models.cards import ACE

# Double-down options, both for the unsplit game and after splitting
ND = "none"
DD1 = "any"
DD2 = "10-11"

DOUBLE_PATTERN = "^(none|any|10-11)$"
DOUBLE_LABELS = {ND: "ND", DD1: "DD1", DD2: "DD2"}


class RuleSet(BaseModel):
    """Blackjack rules that matter for pair splitting"""
    decks: int = Field(1, ge=1, le=8)
    dealer_hits_soft17: bool = False
    dd_option: str = Field(DD1, pattern=DOUBLE_PATTERN)
    dd_after_split: str = Field(ND, pattern=DOUBLE_PATTERN)
    max_hands: int = Field(2, ge=1)
    resplit_aces: bool = False

    model_config = {"frozen": True}

    @model_validator(mode="after")
    def check_after_split_option(self) -> "RuleSet":
        if self.dd_option == ND and self.dd_after_split != ND:
            raise ValueError("Doubling after splitting needs doubling in the unsplit game")
        return self

    @property
    def dealer_stands_soft17(self) -> bool:
        return not self.dealer_hits_soft17

    def can_resplit(self, split_card: int) -> bool:
        """Whether a split hand of this card may be split again."""
        return self.max_hands > 2 and (split_card != ACE or self.resplit_aces)

    @property
    def label(self) -> str:
        soft17 = "H17" if self.dealer_hits_soft17 else "S17"
        resplit = f"h={self.max_hands}"
        if self.max_hands > 2 and self.resplit_aces:
            resplit += "+RSA"
        return (
            f"{self.decks}D {soft17} DD:{DOUBLE_LABELS[self.dd_option]} "
            f"DAS:{DOUBLE_LABELS[self.dd_after_split]} {resplit}"
        )
