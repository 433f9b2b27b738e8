"""Service layer for the EV computations"""
from app.services import (
    strategy_service,
    dealer_service,
    exact_ev_service,
    split_service,
    approx_service,
    table_service,
    game_service,
    mc_service,
    bench_service,
)

__all__ = [
    "strategy_service",
    "dealer_service",
    "exact_ev_service",
    "split_service",
    "approx_service",
    "table_service",
    "game_service",
    "mc_service",
    "bench_service",
]
