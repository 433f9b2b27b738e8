"""Result and report schemas"""
from pydantic import BaseModel, Field

from app.schemas.rules import RuleSet


class CacheStats(BaseModel):
    """Dealer cache sizing and counters"""
    depth: int
    slots: int
    bytes: int
    dtype: str
    hits: int = 0
    misses: int = 0
    bypasses: int = 0
    filled: int = 0
    fill_ratio: float = 0.0

    def merge(self, other: "CacheStats") -> "CacheStats":
        """Sum counters of two caches of the same shape."""
        slots = self.slots + other.slots
        filled = self.filled + other.filled
        return CacheStats(
            depth=max(self.depth, other.depth),
            slots=slots,
            bytes=self.bytes + other.bytes,
            dtype=self.dtype,
            hits=self.hits + other.hits,
            misses=self.misses + other.misses,
            bypasses=self.bypasses + other.bypasses,
            filled=filled,
            fill_ratio=filled / slots if slots else 0.0,
        )


class SplitResult(BaseModel):
    """Exact split EV for one (pair, up card, rules) cell"""
    ev: float
    method: str
    hands_enumerated: int = 0
    unique_hands: int = 0
    probability_mass: float = 0.0
    elapsed: float = 0.0
    cache: CacheStats | None = None


class ResplitProbabilities(BaseModel):
    """Probabilities of the card-order classes for up to four split hands"""
    p2: float = Field(..., ge=0.0, le=1.0)
    p3_1: float = Field(..., ge=0.0, le=1.0)
    p3_2: float = Field(..., ge=0.0, le=1.0)
    p4_1: float = Field(..., ge=0.0, le=1.0)
    p4_2: float = Field(..., ge=0.0, le=1.0)
    p4_3: float = Field(..., ge=0.0, le=1.0)
    p4_4: float = Field(..., ge=0.0, le=1.0)
    p4_5: float = Field(..., ge=0.0, le=1.0)

    @property
    def p3(self) -> float:
        return self.p3_1 + self.p3_2

    @property
    def p4(self) -> float:
        return self.p4_1 + self.p4_2 + self.p4_3 + self.p4_4 + self.p4_5

    @property
    def total(self) -> float:
        return self.p2 + self.p3 + self.p4


class ConditionalHandEV(BaseModel):
    """Single-hand EVs with 2, 3 and 4 split cards removed"""
    e2: float
    e3: float
    e4: float


class McResult(BaseModel):
    """Monte Carlo estimate of a split EV"""
    mean: float
    stderr: float
    trials: int
    seed: int
    rejected: int = 0


class HandEVReport(BaseModel):
    """Stand, hit, double and basic-strategy EVs for one hand"""
    cards: str
    up: str
    total: int
    soft: bool
    stand: float
    hit: float
    double: float | None = None
    basic: float
    action: str


class DealComponent(BaseModel):
    """One initial deal with its option EVs (conditional on no dealer natural)"""
    up: int
    c1: int
    c2: int
    probability: float
    natural_probability: float
    stand: float | None = None
    hit: float | None = None
    double: float | None = None
    split: float | None = None
    action: str = ""
    ev: float = 0.0


class GameEV(BaseModel):
    """Whole-game basic-strategy EV in percent of the initial bet"""
    value: float
    rules: RuleSet
    split_source: str
    components: list[DealComponent] = []
    notes: list[str] = []


class GameTableRow(BaseModel):
    """One row of the splitting-rules game table (percent)"""
    option: str
    dd_any_nd: float | None = None
    dd_any_dd1: float | None = None
    dd_10_11_nd: float | None = None
    dd_10_11_dd2: float | None = None


class PrecisionPoint(BaseModel):
    """Game EV recomputed from option EVs rounded to a number of decimals"""
    digits: int
    value: float
    deviation: float


class SplitOpportunityStats(BaseModel):
    """How often a pair is dealt and how often splitting it is the best play"""
    pair_fraction: float
    favorable_fraction: float


class SplitDecision(BaseModel):
    """Whether splitting beats the best alternative for one pair and up card"""
    pair: int
    up: int
    split: float | None
    best_alternative: float
    alternative: str
    split_is_best: bool


class ApproxRow(BaseModel):
    """Exact and approximate split EVs for one cell"""
    pair: str
    up: str
    rules: str
    exact: float | None = None
    nonresplit: float | None = None
    keep_second_card: float | None = None
    griffin: float | None = None
    new_approx: float | None = None
    error_nonresplit: float | None = None
    error_griffin: float | None = None
    error_new_approx: float | None = None


class BenchRow(BaseModel):
    """Timing and cache counters for one benchmark run"""
    up: str
    pairs: str
    max_hands: int
    method: str
    depth: int
    elapsed: float
    hands_enumerated: int
    unique_hands: int
    hits: int
    misses: int
    fill_ratio: float
