"""Job schema for the command-line orchestrator"""
from pydantic import BaseModel, Field, field_validator, model_validator

from app.models.cards import RANKS
from app.schemas.rules import RuleSet

COMMANDS = (
    "ev-split",
    "ev-table",
    "ev-game",
    "ev-hand",
    "approx-compare",
    "bench",
    "mc",
    "strategy-dump",
    "dealer-dump",
    "precision-sweep",
)
COMMAND_PATTERN = "^(" + "|".join(COMMANDS) + ")$"


class JobSpec(BaseModel):
    """One CLI invocation: what to compute, under which rules, and where to write it"""
    command: str = Field(..., pattern=COMMAND_PATTERN)
    rules: RuleSet = RuleSet()
    pairs: list[int] = Field(default_factory=lambda: list(RANKS))
    ups: list[int] = Field(default_factory=lambda: list(RANKS))
    output: str = Field("csv", pattern="^(csv|json|markdown)$")
    out: str | None = None
    cache_bytes: int | None = Field(None, ge=0)
    cache_depth: int | None = Field(None, ge=0)
    workers: int = Field(1, ge=1)
    method: str = Field("hands", pattern="^(hands|recursive)$")
    split_source: str = Field("exact", pattern="^(exact|approx)$")
    trials: int = Field(100_000, ge=1)
    seed: int = Field(0, ge=0)

    # ev-hand / dealer-dump
    cards: str | None = None
    remove: list[int] = []
    split_card: int | None = None
    conditioned_hands: int | None = Field(None, ge=2, le=4)

    # ev-game / precision-sweep
    game_table: bool = False
    decisions: bool = False
    resplit: str | None = Field(None, pattern="^(none|no-aces|aces)$")
    digits: list[int] = Field(default_factory=lambda: list(range(1, 9)))
    natural_weighting: str = Field("up-card", pattern="^(up-card|deal)$")

    # approx-compare
    keep_second_card: bool = False
    skip_exact: bool = False
    literal_p4_4: bool = False

    # bench
    bench_hands: list[int] = [2]
    bench_methods: list[str] = ["hands"]
    bench_depths: list[int | None] = [None]

    @field_validator("pairs", "ups", "remove")
    @classmethod
    def check_ranks(cls, values: list[int]) -> list[int]:
        for rank in values:
            if rank not in RANKS:
                raise ValueError(f"Invalid card rank: {rank}")
        return values

    @field_validator("pairs", "ups", "bench_hands", "bench_methods", "bench_depths", "digits")
    @classmethod
    def check_not_empty(cls, values: list) -> list:
        if not values:
            raise ValueError("Selection must not be empty")
        return values

    @model_validator(mode="after")
    def check_cache_options(self) -> "JobSpec":
        if self.cache_bytes is not None and self.cache_depth is not None:
            raise ValueError("Give either a cache byte budget or a cache depth, not both")
        if (self.split_card is None) != (self.conditioned_hands is None):
            raise ValueError("A hole-conditioned dealer needs both a split card and a hand count")
        return self
