"""Unittests for dialectica._common."""

from datetime import datetime, timedelta, timezone

import pandas as pd
import pytest
import time_machine

from dialectica._common import JSONCache, spawn_rng, standardize_colnames, write_atomic

# JSONCache


def test_cache_put_and_get(tmp_path):
    cache = JSONCache(data_dir=tmp_path, max_age=None)
    assert cache.get("doc") is None
    cache.put("doc", {"winner": "P"})
    assert cache.is_cached("doc")
    assert cache.get("doc") == {"winner": "P"}


def test_cache_no_cache(tmp_path):
    JSONCache(data_dir=tmp_path).put("doc", [1, 2])
    cache = JSONCache(data_dir=tmp_path, no_cache=True)
    assert cache.get("doc") is None


def test_cache_no_store(tmp_path):
    cache = JSONCache(data_dir=tmp_path / "store", no_store=True)
    cache.put("doc", [1, 2])
    assert not (tmp_path / "store").exists()


def test_cache_max_age(tmp_path):
    """It should ignore cached documents older than max_age."""
    cache = JSONCache(data_dir=tmp_path, max_age=1)
    cache.put("doc", {"a": 1})
    assert cache.is_cached("doc")
    with time_machine.travel(datetime.now(timezone.utc) + timedelta(days=3)):
        assert not cache.is_cached("doc")
        assert cache.get("doc") is None
    fresh = JSONCache(data_dir=tmp_path, max_age=timedelta(days=7))
    with time_machine.travel(datetime.now(timezone.utc) + timedelta(days=3)):
        assert fresh.is_cached("doc")


def test_cache_max_age_type(tmp_path):
    with pytest.raises(TypeError, match="max_age"):
        JSONCache(data_dir=tmp_path, max_age="1 day")  # type: ignore[arg-type]


# write_atomic


def test_write_atomic(tmp_path):
    path = write_atomic(tmp_path / "out" / "order.json", "{}")
    assert path.read_text(encoding="utf8") == "{}"
    with pytest.raises(FileExistsError, match="force"):
        write_atomic(path, "[]")
    write_atomic(path, "[]", force=True)
    assert path.read_text(encoding="utf8") == "[]"
    assert [p.name for p in path.parent.iterdir()] == ["order.json"]


# spawn_rng


def test_spawn_rng_streams():
    """It should derive the same stream for the same key, whatever was drawn before."""
    first = spawn_rng(42, 3).random(4)
    spawn_rng(42, 2).random(100)
    assert (spawn_rng(42, 3).random(4) == first).all()
    assert not (spawn_rng(42, 4).random(4) == first).all()
    assert not (spawn_rng(43, 3).random(4) == first).all()


# standardize_colnames


def test_standardize_colnames():
    df = pd.DataFrame(columns=["Id", "Municipality", "ActorName", "relation-type", "lat"])
    assert list(standardize_colnames(df).columns) == [
        "id",
        "municipality",
        "actor_name",
        "relation_type",
        "lat",
    ]
    partial = standardize_colnames(df, cols=["ActorName"])
    assert list(partial.columns) == ["Id", "Municipality", "actor_name", "relation-type", "lat"]
