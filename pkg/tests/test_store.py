import numpy as np
import pytest

from app.db.store import BaselineCache
from app.errors import ParseError
from app.median.experiment import load_baselines
from app.median.graph import grid_road_graph
from app.median.shortest_paths import shortest_path_matrix
from app.models.graphs import MedoidSolution


def test_put_and_get(tmp_path):
    cache = BaselineCache(tmp_path / "cache.json")
    sol = MedoidSolution(k=2, facilities=[1, 4], cost=3.5, seed=7)
    cache.put_many("abc", [sol])
    assert cache.get("abc", 2, 7) == sol
    assert cache.get("abc", 2, 8) is None
    assert cache.get("other", 2, 7) is None
    assert len(cache) == 1


def test_entries_survive_reopen(tmp_path):
    path = tmp_path / "cache.json"
    BaselineCache(path).put_many("abc", [MedoidSolution(k=1, facilities=[0], cost=2.0)])
    assert BaselineCache(path).get("abc", 1, 0).cost == 2.0


def test_failed_transaction_rolls_back(tmp_path):
    path = tmp_path / "cache.json"
    cache = BaselineCache(path)
    cache.put_many("abc", [MedoidSolution(k=1, facilities=[0], cost=2.0)])
    with pytest.raises(RuntimeError):
        with cache.tx() as entries:
            entries["abc:2:0"] = {"k": 2, "facilities": [0, 1], "cost": 1.0}
            raise RuntimeError("boom")
    assert cache.get("abc", 2, 0) is None
    assert len(cache) == 1
    assert BaselineCache(path).get("abc", 2, 0) is None


def test_corrupt_file(tmp_path):
    path = tmp_path / "cache.json"
    path.write_text("{broken", encoding="utf-8")
    with pytest.raises(ParseError):
        BaselineCache(path)
    path.write_text('{"version": 99, "entries": {}}', encoding="utf-8")
    with pytest.raises(ParseError):
        BaselineCache(path)


def test_bad_entry(tmp_path):
    cache = BaselineCache(tmp_path / "cache.json")
    with cache.tx() as entries:
        entries["abc:1:0"] = {"k": 0, "facilities": [], "cost": -1.0}
    with pytest.raises(ParseError):
        cache.get("abc", 1, 0)


def test_baselines_are_computed_once(tmp_path):
    dist = shortest_path_matrix(grid_road_graph(2, 3, seed=1))
    cache = BaselineCache(tmp_path / "cache.json")
    first = load_baselines(dist, seed=3, cache=cache, key="g")
    assert sorted(first) == [1, 2, 3, 4, 5, 6]
    assert len(cache) == 6
    again = load_baselines(dist, seed=3, cache=BaselineCache(tmp_path / "cache.json"), key="g")
    assert {k: sol.cost for k, sol in again.items()} == {k: sol.cost for k, sol in first.items()}
    assert np.isclose(again[6].cost, 0.0)
