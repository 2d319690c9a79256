"""Deterministic supply-chain trading game simulator.

Thin wrappers over the C++ core. Configs and specs are plain dicts in the
same layout as the JSON files the scm_arena CLI reads.
"""

import json
import os

from . import _core
from ._core import ConfigError, MarketError, ReplayDivergence, ScmError

__all__ = [
    "ConfigError",
    "MarketError",
    "ReplayDivergence",
    "ScmError",
    "clear_auction",
    "default_catalog",
    "default_config",
    "quote",
    "replay",
    "run_game",
    "tournament",
]


def _dump(doc):
    return None if doc is None else json.dumps(doc)


def default_config():
    """The default 220-day, 6-agent game config."""
    return json.loads(_core.default_config())


def default_catalog():
    """The default 10-component, 16-product catalog."""
    return json.loads(_core.default_catalog())


def clear_auction(reserve, bids):
    """Lowest bid at or below reserve wins, ties to the lower agent id.

    bids: iterable of (agent_id, unit_price). Returns (winner, price) or None.
    """
    return _core.clear_auction(int(reserve), [(int(a), int(p)) for a, p in bids])


def quote(base_price, daily_capacity, committed, today, due, discount):
    """Supplier unit quote for delivery on `due`, given committed units per day."""
    return _core.quote(int(base_price), int(daily_capacity), {int(d): int(u) for d, u in committed.items()},
                       int(today), int(due), float(discount))


def run_game(config=None, seed=None, log_path=None):
    """Plays one game and returns per-agent results."""
    return json.loads(_core.run_game(_dump(config), seed, None if log_path is None else os.fspath(log_path)))


def replay(log_path, config=None):
    """Re-simulates a logged game; raises ReplayDivergence on any mismatch."""
    return json.loads(_core.replay(os.fspath(log_path), _dump(config)))


def tournament(spec, out_dir=None, threads=0):
    """Runs every (line-up, seed) game; returns games.csv and summary.csv text."""
    if out_dir is not None:
        out_dir = os.fspath(out_dir)
        os.makedirs(out_dir, exist_ok=True)
    return json.loads(_core.tournament(json.dumps(spec), out_dir, int(threads)))
