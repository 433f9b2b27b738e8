"""Table service - split EV cells computed as independent (up card, pair) tasks"""
import logging
import time
from typing import NamedTuple

from app.core.workers import run_tasks
from app.models.cards import ACE, RANKS, HandState, rank_label
from app.schemas.results import CacheStats, SplitResult
from app.schemas.rules import DOUBLE_LABELS, RuleSet
from app.services.approx_service import approx_split
from app.services.dealer_service import make_dealer_cache
from app.services.exact_ev_service import basic_strategy_ev
from app.services.split_service import METHOD_HANDS, exact_split, prepare_split_shoe

logger = logging.getLogger(__name__)

SOURCE_EXACT = "exact"
SOURCE_APPROX = "approx"
SOURCES = (SOURCE_EXACT, SOURCE_APPROX)

# Exact sweeps that take days rather than minutes
_SLOW_UPS = (7, 8, 9, 10, ACE)


class SplitTask(NamedTuple):
    """One (up card, pair) unit of work over several rule variants"""
    up: int
    pair: int
    variants: tuple[RuleSet, ...]
    source: str = SOURCE_EXACT
    method: str = METHOD_HANDS
    depth: int | None = None
    cache_bytes: int | None = None
    dtype: str | None = None


class SplitCell(NamedTuple):
    up: int
    pair: int
    rules: RuleSet
    ev: float
    result: SplitResult | None


class SplitTaskResult(NamedTuple):
    cells: list[SplitCell]
    cache: CacheStats | None


def variant_label(rules: RuleSet) -> str:
    """Column name for a rule variant: h2_ND, h4_DD1, h4_ND_rsa, ..."""
    label = f"h{rules.max_hands}_{DOUBLE_LABELS[rules.dd_after_split]}"
    if rules.max_hands > 2 and rules.resplit_aces:
        label += "_rsa"
    return label


def compute_split_task(task: SplitTask) -> SplitTaskResult:
    """
    Split EVs of one pair against one up card for every variant of the task.

    The task owns its dealer caches (one per soft-17 rule); they are shared
    by the variants and dropped when the task ends.
    """
    start = time.perf_counter()
    caches = {}
    cells: list[SplitCell] = []
    for rules in task.variants:
        shoe = prepare_split_shoe(rules.decks, task.up, task.pair)
        cache = caches.get(rules.dealer_hits_soft17)
        if cache is None:
            cache = make_dealer_cache(shoe, task.up, rules, task.depth, task.cache_bytes, task.dtype)
            caches[rules.dealer_hits_soft17] = cache

        if rules.max_hands == 1:
            ev = basic_strategy_ev(HandState.from_cards([task.pair, task.pair]), task.up, shoe, cache, rules)
            cells.append(SplitCell(task.up, task.pair, rules, ev, None))
        elif task.source == SOURCE_EXACT:
            if rules.max_hands > 2 and rules.can_resplit(task.pair) and task.up in _SLOW_UPS:
                logger.warning(
                    "Exact %s vs %s with %d hands may run for days",
                    rank_label(task.pair), rank_label(task.up), rules.max_hands,
                )
            result = exact_split(shoe, task.up, task.pair, rules, cache, task.method)
            cells.append(SplitCell(task.up, task.pair, rules, result.ev, result))
        elif task.source == SOURCE_APPROX:
            ev = approx_split(shoe, task.up, task.pair, rules, cache)
            cells.append(SplitCell(task.up, task.pair, rules, ev, None))
        else:
            raise ValueError(f"Unknown split source: {task.source}")

    stats = None
    for cache in caches.values():
        stats = cache.stats() if stats is None else stats.merge(cache.stats())
    logger.info(
        "Pair %s vs %s: %d variant(s) in %.2fs",
        rank_label(task.pair), rank_label(task.up), len(task.variants), time.perf_counter() - start,
    )
    return SplitTaskResult(cells, stats)


def split_cells(
    variants: list[RuleSet],
    pairs: list[int] | None = None,
    ups: list[int] | None = None,
    source: str = SOURCE_EXACT,
    method: str = METHOD_HANDS,
    depth: int | None = None,
    cache_bytes: int | None = None,
    dtype: str | None = None,
    workers: int = 1,
) -> tuple[list[SplitCell], CacheStats | None]:
    """
    Split EV cells for every (up, pair) and rule variant.

    Cells come back sorted by up card, then pair, then variant order, for any
    number of workers.

    Raises:
        ValueError: on an empty selection or an unknown source
    """
    if source not in SOURCES:
        raise ValueError(f"Unknown split source: {source}")
    pairs = sorted(set(pairs or RANKS))
    ups = sorted(set(ups or RANKS))
    if not variants or not pairs or not ups:
        raise ValueError("Nothing to compute: empty pair, up card or rule selection")

    tasks = [
        SplitTask(up, pair, tuple(variants), source, method, depth, cache_bytes, dtype)
        for up in ups
        for pair in pairs
    ]
    results = run_tasks(compute_split_task, tasks, workers, desc="split cells")

    cells: list[SplitCell] = []
    stats = None
    for result in results:
        cells.extend(result.cells)
        if result.cache is not None:
            stats = result.cache if stats is None else stats.merge(result.cache)
    return cells, stats


def split_table(cells: list[SplitCell], rules: RuleSet) -> dict[tuple[int, int], float]:
    """(pair, up) -> EV for one rule variant."""
    return {(cell.pair, cell.up): cell.ev for cell in cells if cell.rules == rules}


def split_table_rows(cells: list[SplitCell], variants: list[RuleSet]) -> list[dict]:
    """One row per (pair, up) with a column per variant, in the published layout."""
    labels = [variant_label(rules) for rules in variants]
    grouped: dict[tuple[int, int], dict[str, float]] = {}
    for cell in cells:
        row = grouped.setdefault((cell.pair, cell.up), {})
        row[variant_label(cell.rules)] = cell.ev

    rows = []
    for (pair, up) in sorted(grouped):
        row = {"pair": f"{rank_label(pair)},{rank_label(pair)}", "up": rank_label(up)}
        for label in labels:
            row[label] = grouped[(pair, up)].get(label)
        rows.append(row)
    return rows
