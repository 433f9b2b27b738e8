#!/usr/bin/env python3
"""Compare exact split EVs with the published single-deck table. Run with: python scripts/check_tables.py --ups 2,3,4,5,6"""
import argparse
import sys
from pathlib import Path

# Add project root to path
sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from app.models.cards import RANKS, parse_ranks, rank_label
from app.schemas.rules import DD1, ND, RuleSet
from app.services.table_service import SOURCE_EXACT, split_cells, split_table, variant_label
from tests.reference_values import H2_DD1, H2_ND, split_column, split_tolerance


def main():
    parser = argparse.ArgumentParser(description="Check exact h=2 split EVs against the reference table")
    parser.add_argument("--ups", default="2,3,4,5,6")
    parser.add_argument("--pairs", default=",".join(rank_label(r) for r in RANKS))
    parser.add_argument("--workers", type=int, default=1)
    parser.add_argument("--tolerance", type=float, help="absolute tolerance (default: per-pair table tolerance)")
    args = parser.parse_args()

    try:
        ups = parse_ranks(args.ups)
        pairs = parse_ranks(args.pairs)
    except ValueError as e:
        print(f"Error: {e}", file=sys.stderr)
        sys.exit(2)

    variants = [RuleSet(max_hands=2, dd_after_split=ND), RuleSet(max_hands=2, dd_after_split=DD1)]
    cells, _ = split_cells(variants, pairs, ups, SOURCE_EXACT, workers=args.workers)

    failures = 0
    for rules, column in zip(variants, (H2_ND, H2_DD1)):
        computed = split_table(cells, rules)
        expected = split_column(column)
        for key, ev in sorted(computed.items()):
            if key not in expected:
                continue
            diff = abs(ev - expected[key])
            pair, up = key
            if diff > (args.tolerance or split_tolerance(pair)):
                failures += 1
                print(f"{rank_label(pair)},{rank_label(pair)} vs {rank_label(up)} [{variant_label(rules)}]: {ev:+.6f} != {expected[key]:+.6f}")

    print(f"Checked {len(cells)} cells, {failures} mismatches")
    sys.exit(1 if failures else 0)


if __name__ == "__main__":
    main()
