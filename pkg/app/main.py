"""Command-line entry point: split EV tables, game EVs, approximations and benchmarks"""
import argparse
import logging
from collections.abc import Callable
from typing import Any

from app.config import settings
from app.core.logging import setup_logging
from app.core.workers import TaskFailure
from app.models.cards import RANKS, Shoe, parse_rank, parse_ranks, rank_label
from app.schemas.job import JobSpec
from app.schemas.results import CacheStats
from app.schemas.rules import DD1, DD2, ND, RuleSet
from app.services import (
    approx_service,
    bench_service,
    dealer_service,
    exact_ev_service,
    game_service,
    mc_service,
    strategy_service,
    table_service,
)
from app.services.split_service import METHOD_HANDS, METHODS, prepare_split_shoe
from app.utils.formatting import FORMATS, render, write_output

logger = logging.getLogger(__name__)

DOUBLE_CHOICES = (ND, DD1, DD2)
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2

Report = tuple[str, list[Any], dict[str, Any]]


def _ranks(text: str) -> list[int]:
    try:
        return parse_ranks(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _rank(text: str) -> int:
    try:
        return parse_rank(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc)) from exc


def _ints(text: str) -> list[int]:
    try:
        return [int(item) for item in text.split(",") if item.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"Expected a comma-separated list of integers: {text!r}") from exc


def _digit_range(text: str) -> list[int]:
    """'3' or '1-8'."""
    try:
        low, _, high = text.partition("-")
        first, last = int(low), int(high or low)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"Expected A-B: {text!r}") from exc
    if first > last:
        raise argparse.ArgumentTypeError(f"Empty digit range: {text!r}")
    return list(range(first, last + 1))


def _depths(text: str) -> list[int | None]:
    """'sweep', 'budget' or a list of depths."""
    if text == "sweep":
        return list(bench_service.DEPTH_SWEEP)
    if text == "budget":
        return [None]
    return list(_ints(text))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pairsplit",
        description="Exact and approximate blackjack pair-splitting expected values",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    output = argparse.ArgumentParser(add_help=False)
    output.add_argument("--format", choices=FORMATS, default=settings.OUTPUT_FORMAT)
    output.add_argument("--out", help="output file (stdout by default)")
    output.add_argument("--workers", type=int, default=settings.WORKERS)
    output.add_argument("--log-level", default=None)

    def rules(max_hands: bool = True) -> argparse.ArgumentParser:
        group = argparse.ArgumentParser(add_help=False)
        group.add_argument("--decks", type=int, default=settings.DEFAULT_DECKS)
        group.add_argument("--soft17", choices=("stand", "hit"), default="stand")
        group.add_argument("--dd", choices=DOUBLE_CHOICES, default=DD1, help="doubling in the unsplit game")
        group.add_argument("--dd-after-split", choices=DOUBLE_CHOICES, default=ND)
        if max_hands:
            group.add_argument("--max-hands", type=int, default=2)
        group.add_argument("--resplit-aces", action="store_true")
        return group

    selection = argparse.ArgumentParser(add_help=False)
    selection.add_argument("--pairs", type=_ranks, default=list(RANKS), help="e.g. A,2,8")
    selection.add_argument("--ups", type=_ranks, default=list(RANKS), help="e.g. 2,3,T")

    cache = argparse.ArgumentParser(add_help=False)
    budget = cache.add_mutually_exclusive_group()
    budget.add_argument("--cache-bytes", type=int)
    budget.add_argument("--cache-depth", type=int)

    split_parents = [rules(), selection, cache, output]
    for name, text in (("ev-split", "exact or approximate split EVs"), ("ev-table", "split EV table, h=2 and h=N columns")):
        sub = commands.add_parser(name, parents=split_parents, help=text)
        sub.add_argument("--method", choices=METHODS, default=METHOD_HANDS)
        sub.add_argument("--split-source", choices=table_service.SOURCES, default=table_service.SOURCE_EXACT)

    sub = commands.add_parser("ev-game", parents=[rules(), cache, output], help="whole-game EV")
    sub.add_argument(
        "--natural-weighting",
        choices=game_service.NATURAL_WEIGHTINGS,
        default=settings.NATURAL_WEIGHTING,
        help="dealer-natural probability from the shoe less the up card, or less the whole deal",
    )
    sub.add_argument("--split-source", choices=table_service.SOURCES, default=table_service.SOURCE_EXACT)
    sub.add_argument("--table", action="store_true", help="base game and splitting-rule deltas")
    sub.add_argument("--resplit", choices=("none", "no-aces", "aces"), help="resplit to 4 hands and report the delta")
    sub.add_argument("--decisions", action="store_true", help="per-pair split decisions")

    sub = commands.add_parser("ev-hand", parents=[rules(), cache, output], help="EVs of one hand")
    sub.add_argument("--cards", required=True, help="e.g. 10,6")
    sub.add_argument("--up", type=_rank, required=True)

    sub = commands.add_parser("approx-compare", parents=[rules(), selection, output], help="approximations vs exact")
    sub.add_argument("--keep-second-card", action="store_true")
    sub.add_argument(
        "--literal-p44",
        action="store_true",
        help=(
            "use P(4/4) as printed, with 1 - p3(s|s); the default uses p3(s|s) "
            "so that the card-order probabilities sum to one"
        ),
    )
    sub.add_argument("--no-exact", action="store_true", help="skip the exact column")

    sub = commands.add_parser("bench", parents=[rules(max_hands=False), output], help="method and cache timings")
    sub.add_argument("--up", type=_rank, required=True)
    sub.add_argument("--pairs", type=_ranks, default=list(RANKS))
    sub.add_argument("--max-hands", type=_ints, default=[2])
    sub.add_argument("--methods", type=lambda text: text.split(","), default=[METHOD_HANDS])
    sub.add_argument("--cache-depth", type=_depths, default=[None], help="'sweep', 'budget' or depths")

    sub = commands.add_parser("mc", parents=[rules(), selection, output], help="Monte Carlo split EVs")
    sub.add_argument("--trials", type=int, default=settings.MC_TRIALS)
    sub.add_argument("--seed", type=int, default=settings.MC_SEED)

    commands.add_parser("strategy-dump", parents=[rules(), output], help="basic strategy decision grid")

    sub = commands.add_parser("dealer-dump", parents=[rules(), output], help="dealer final-total distribution")
    sub.add_argument("--up", type=_rank, required=True)
    sub.add_argument("--remove", type=_ranks, default=[], help="cards also out of the shoe")
    sub.add_argument("--split-card", type=_rank)
    sub.add_argument("--hands", type=int, help="hole-conditioned dealer for this many split hands")

    sub = commands.add_parser("precision-sweep", parents=[rules(), output], help="game EV vs table precision")
    sub.add_argument("--digits", type=_digit_range, default=list(range(1, 9)))
    sub.add_argument("--split-source", choices=table_service.SOURCES, default=table_service.SOURCE_EXACT)
    return parser


def job_from_args(args: argparse.Namespace) -> JobSpec:
    """Validated JobSpec from parsed arguments."""
    max_hands = args.max_hands if isinstance(getattr(args, "max_hands", None), int) else 2
    rules = RuleSet(
        decks=args.decks,
        dealer_hits_soft17=args.soft17 == "hit",
        dd_option=args.dd,
        dd_after_split=args.dd_after_split,
        max_hands=max_hands,
        resplit_aces=args.resplit_aces,
    )
    fields: dict[str, Any] = {
        "command": args.command,
        "rules": rules,
        "output": args.format,
        "out": args.out,
        "workers": args.workers,
    }
    optional = {
        "pairs": "pairs",
        "ups": "ups",
        "cache_bytes": "cache_bytes",
        "method": "method",
        "split_source": "split_source",
        "trials": "trials",
        "seed": "seed",
        "cards": "cards",
        "remove": "remove",
        "split_card": "split_card",
        "conditioned_hands": "hands",
        "game_table": "table",
        "decisions": "decisions",
        "resplit": "resplit",
        "digits": "digits",
        "keep_second_card": "keep_second_card",
        "bench_methods": "methods",
        "natural_weighting": "natural_weighting",
    }
    for field, attr in optional.items():
        value = getattr(args, attr, None)
        if value is not None:
            fields[field] = value
    if getattr(args, "no_exact", False):
        fields["skip_exact"] = True
    if getattr(args, "literal_p44", False):
        fields["literal_p4_4"] = True
    if getattr(args, "up", None) is not None:
        fields["ups"] = [args.up]

    if args.command == "bench":
        fields["bench_hands"] = args.max_hands
        fields["bench_depths"] = args.cache_depth
    elif getattr(args, "cache_depth", None) is not None:
        fields["cache_depth"] = args.cache_depth
    return JobSpec(**fields)


def _metadata_cache(stats: CacheStats | None) -> dict[str, Any]:
    if stats is None:
        return {}
    return {
        "cache_depth": stats.depth,
        "cache_bytes": stats.bytes,
        "cache_hits": stats.hits,
        "cache_misses": stats.misses,
        "cache_fill_ratio": f"{stats.fill_ratio:.6f}",
    }


def _ev_split(job: JobSpec) -> Report:
    cells, stats = table_service.split_cells(
        [job.rules], job.pairs, job.ups, job.split_source, job.method,
        job.cache_depth, job.cache_bytes, workers=job.workers,
    )
    rows = []
    for cell in cells:
        row = {"pair": f"{rank_label(cell.pair)},{rank_label(cell.pair)}", "up": rank_label(cell.up), "ev": cell.ev}
        if cell.result is not None:
            row["hands_enumerated"] = cell.result.hands_enumerated
            row["unique_hands"] = cell.result.unique_hands
            row["probability_mass"] = cell.result.probability_mass
        rows.append(row)
    return "Split EVs", rows, {"split_source": job.split_source, "method": job.method, **_metadata_cache(stats)}


def _table_variants(rules: RuleSet) -> list[RuleSet]:
    variants = []
    for max_hands in sorted({2, rules.max_hands}):
        for dd_after_split in dict.fromkeys((ND, rules.dd_after_split)):
            variant = RuleSet(**{**rules.model_dump(), "max_hands": max_hands, "dd_after_split": dd_after_split})
            variants.append(variant)
    return variants


def _ev_table(job: JobSpec) -> Report:
    variants = _table_variants(job.rules)
    cells, stats = table_service.split_cells(
        variants, job.pairs, job.ups, job.split_source, job.method,
        job.cache_depth, job.cache_bytes, workers=job.workers,
    )
    metadata = {
        "split_source": job.split_source,
        "columns": ", ".join(table_service.variant_label(v) for v in variants),
        **_metadata_cache(stats),
    }
    return "Split EV table", table_service.split_table_rows(cells, variants), metadata


def _ev_game(job: JobSpec) -> Report:
    rules = job.rules
    budget = game_service.CacheBudget(job.cache_depth, job.cache_bytes)
    weighting = job.natural_weighting
    metadata: dict[str, Any] = {"split_source": job.split_source, "natural_weighting": weighting}
    if job.game_table:
        rows = game_service.game_ev_table(
            rules.decks, rules.dealer_hits_soft17, job.split_source, job.workers,
            budget=budget, natural_weighting=weighting,
        )
        return "Effect of splitting rules on game EV (percent)", rows, metadata

    options = game_service.deal_options(rules.decks, rules.dealer_hits_soft17, job.workers, budget)
    if job.resplit is not None:
        base = RuleSet(**{**rules.model_dump(), "max_hands": 2, "resplit_aces": False})
        base_ev = game_service.game_ev(
            base, job.split_source, job.workers, options=options, budget=budget, natural_weighting=weighting,
        )
        rows = [{"rules": base.label, "value": base_ev.value, "delta": None}]
        if job.resplit != "none":
            variant = RuleSet(**{**base.model_dump(), "max_hands": 4, "resplit_aces": job.resplit == "aces"})
            variant_ev = game_service.game_ev(
                variant, job.split_source, job.workers, options=options, budget=budget, natural_weighting=weighting,
            )
            rows.append({"rules": variant.label, "value": variant_ev.value, "delta": variant_ev.value - base_ev.value})
        return "Game EV (percent)", rows, metadata

    game = game_service.game_ev(
        rules, job.split_source, job.workers, options=options, budget=budget, natural_weighting=weighting,
    )
    metadata["notes"] = "; ".join(game.notes)
    if job.decisions:
        stats = game_service.split_opportunity_stats(rules, game=game)
        metadata["pair_fraction"] = f"{stats.pair_fraction:.6f}"
        metadata["favorable_fraction"] = f"{stats.favorable_fraction:.6f}"
        splits = {(c.c1, c.up): c.split for c in game.components if c.split is not None}
        decisions = game_service.split_decisions(rules, split_evs=splits, options=options)
        return "Split decisions", decisions, metadata
    return "Game EV (percent)", [{"rules": rules.label, "value": game.value}], metadata


def _ev_hand(job: JobSpec) -> Report:
    report = exact_ev_service.hand_evs(job.cards or "", job.ups[0], job.rules, depth=job.cache_depth)
    return "Hand EVs", [report], {}


def _approx_compare(job: JobSpec) -> Report:
    rows = approx_service.approx_compare(
        job.rules, job.pairs, job.ups, job.keep_second_card, exact=not job.skip_exact, workers=job.workers,
        literal_p4_4=job.literal_p4_4,
    )
    return "Approximate split EVs", rows, {"literal_p4_4": job.literal_p4_4}


def _bench(job: JobSpec) -> Report:
    rows = bench_service.run_bench(
        job.ups[0], job.pairs, job.bench_hands, job.bench_methods, job.bench_depths, job.rules,
    )
    return "Split benchmark", rows, {}


def _mc(job: JobSpec) -> Report:
    rows = []
    for up in sorted(set(job.ups)):
        for pair in sorted(set(job.pairs)):
            shoe = prepare_split_shoe(job.rules.decks, up, pair)
            result = mc_service.simulate_split(shoe, up, pair, job.rules, job.trials, job.seed, job.workers)
            rows.append({"pair": f"{rank_label(pair)},{rank_label(pair)}", "up": rank_label(up), **result.model_dump()})
    return "Monte Carlo split EVs", rows, {"trials": job.trials, "seed": job.seed}


def _strategy_dump(job: JobSpec) -> Report:
    return "Basic strategy", strategy_service.strategy_grid(job.rules), {}


def _dealer_dump(job: JobSpec) -> Report:
    up = job.ups[0]
    shoe = Shoe.from_decks(job.rules.decks)
    if not shoe.remove_all([up, *job.remove]):
        raise ValueError("The removed cards are not all in the shoe")
    if job.split_card is not None:
        dist = dealer_service.dealer_distribution_hole_conditioned(
            shoe, up, job.split_card, job.conditioned_hands, job.rules,
        )
    else:
        dist = dealer_service.dealer_distribution(shoe, up, job.rules)
    row = {
        "up": rank_label(up),
        "removed": ",".join(rank_label(r) for r in job.remove),
        **dist._asdict(),
        "total": sum(dist),
    }
    return "Dealer distribution", [row], {}


def _precision_sweep(job: JobSpec) -> Report:
    points = game_service.precision_sweep(job.rules, job.digits, job.split_source, job.workers)
    return "Game EV by table precision", points, {"split_source": job.split_source}


HANDLERS: dict[str, Callable[[JobSpec], Report]] = {
    "ev-split": _ev_split,
    "ev-table": _ev_table,
    "ev-game": _ev_game,
    "ev-hand": _ev_hand,
    "approx-compare": _approx_compare,
    "bench": _bench,
    "mc": _mc,
    "strategy-dump": _strategy_dump,
    "dealer-dump": _dealer_dump,
    "precision-sweep": _precision_sweep,
}


def run(job: JobSpec) -> int:
    """Execute a job and write its report; returns the exit status."""
    title, rows, metadata = HANDLERS[job.command](job)
    header = {
        "app": f"{settings.APP_NAME} {settings.VERSION}",
        "command": job.command,
        "rules": job.rules.label,
        **metadata,
    }
    write_output(render(rows, job.output, header, title), job.out)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    """
    Parse arguments and run one command.

    Returns:
        0 on success, 1 when a computation fails, 2 for invalid input
    """
    args = build_parser().parse_args(argv)
    try:
        setup_logging(args.log_level)
        return run(job_from_args(args))
    except ValueError as exc:
        # pydantic ValidationError is a ValueError too
        logger.error("%s", exc)
        return EXIT_USAGE
    except TaskFailure as exc:
        logger.error("Computation failed: %s", exc)
        return EXIT_FAILURE
    except Exception:
        logger.exception("Computation failed")
        return EXIT_FAILURE
