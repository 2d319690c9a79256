import csv
import io

import pytest

import scm_arena


def small_config(horizon=15, agents=3):
    config = scm_arena.default_config()
    config["horizon_days"] = horizon
    config["num_agents"] = agents
    config["agents"] = config["agents"][:agents]
    return config


def test_default_catalog_and_config():
    catalog = scm_arena.default_catalog()
    assert len(catalog["components"]) == 10
    assert len(catalog["products"]) == 16
    config = scm_arena.default_config()
    assert config["horizon_days"] == 220
    assert config["num_agents"] == 6


def test_clear_auction():
    assert scm_arena.clear_auction(1550, [(0, 1500), (1, 1400), (2, 1600)]) == (1, 1400)
    assert scm_arena.clear_auction(1000, [(0, 1500), (1, 1400)]) is None
    assert scm_arena.clear_auction(2000, [(3, 1500), (1, 1500)]) == (1, 1500)
    with pytest.raises(scm_arena.MarketError):
        scm_arena.clear_auction(2000, [(1, 1500), (1, 1400)])


def test_quote_discounts_free_capacity():
    assert scm_arena.quote(1000, 500, {}, 0, 5, 0.5) == 500
    assert scm_arena.quote(1000, 500, {d: 500 for d in range(1, 6)}, 0, 5, 0.5) == 1000


def test_run_replay_round_trip(tmp_path):
    config = small_config()
    log = tmp_path / "game.jsonl"
    result = scm_arena.run_game(config, seed=4, log_path=log)
    assert result["seed"] == 4
    assert len(result["agents"]) == 3
    for a in result["agents"]:
        assert a["balance"] == a["revenue"] - a["material"] - a["storage"] - a["penalty"] - a["interest"]
    again = scm_arena.run_game(config, seed=4)
    assert again == dict(result)
    replayed = scm_arena.replay(log, config)
    assert replayed["agents"] == result["agents"]

    lines = log.read_text().splitlines()
    lines[30] = lines[30].replace('"day":', '"day":9', 1)
    bad = tmp_path / "bad.jsonl"
    bad.write_text("\n".join(lines) + "\n")
    with pytest.raises(scm_arena.ReplayDivergence):
        scm_arena.replay(bad, config)


def test_bad_config_raises():
    config = small_config()
    config["num_agents"] = 1
    with pytest.raises(scm_arena.ConfigError):
        scm_arena.run_game(config)


def test_tournament(tmp_path):
    base = small_config(horizon=8, agents=2)
    spec = {
        "base_config": base,
        "lineups": [
            {"name": "a", "agents": [{"sales_strategy": "fixed"}, {"sales_strategy": "minmax"}]},
            {"name": "b", "agents": [{"sales_strategy": "undercut"}, {"sales_strategy": "undercut"}]},
        ],
        "seeds": [1, 2, 3],
    }
    out = scm_arena.tournament(spec, out_dir=tmp_path)
    rows = list(csv.DictReader(io.StringIO(out["games_csv"])))
    assert len(rows) == 12
    assert sum(1 for r in rows if r["agent_id"] == "0") == 6
    assert len(list((tmp_path / "logs").iterdir())) == 6
    assert (tmp_path / "summary.csv").exists()
