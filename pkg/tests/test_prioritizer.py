"""Unittests for dialectica.prioritizer."""

import json

import pytest

from dialectica._common import EmptyCorpus, MixedCorpora
from dialectica.extensions import Semantics
from dialectica.knowledge import parse_corpus
from dialectica.logic import parse_formula
from dialectica.prioritizer import (
    DEFAULT_VALUE,
    _rank,
    corpus_from_kb,
    histogram,
    histogram_hash,
    outcomes_to_json,
    prioritise,
    run_dialogues,
)

# corpus


def test_restoration_corpus(restoration):
    assert restoration.tags == ["agriculture", "restoration"]
    args = restoration.arguments
    assert args["agriculture"].support == (parse_formula("a"), parse_formula("a -> y"))
    assert args["restoration"].claim == parse_formula("~a")
    assert restoration.vaf.attacks == {("restoration", "agriculture")}


def test_corpus_default_value():
    """It should give every action one shared value when none are declared."""
    corpus = corpus_from_kb(parse_corpus('a.\n@tag "t" b :- a.\n'))
    assert corpus.actions[0].value == DEFAULT_VALUE
    assert corpus.audiences == ((DEFAULT_VALUE,),)
    assert corpus.actions[0].claim == parse_formula("b")


def test_corpus_without_actions():
    with pytest.raises(EmptyCorpus):
        corpus_from_kb(parse_corpus("a.\na -> b.\n"))


def test_fingerprint(restoration, corpus_kb0):
    assert restoration.fingerprint != corpus_kb0.fingerprint
    assert len(restoration.fingerprint) == 16


# run_dialogues


def test_restoration_first(restoration, solution_cache):
    """It should always put restoration first: its attack on agriculture survives the dialogue."""
    outcomes = run_dialogues(restoration, Semantics.GROUNDED, 5, seed=3, cache=solution_cache)
    assert len(outcomes) == 5
    for o in outcomes:
        assert o.sampled == ("agriculture", "restoration")
        assert o.positions == {"restoration": 1, "agriculture": 2}
        assert o.extensions == (("restoration",),)
        assert o.trace[0] == {
            "attack": ["restoration", "agriculture"],
            "winner": "P",
            "kept": True,
        }


def test_run_dialogues_deterministic(glr_corpus, solution_cache):
    """It should reproduce the same histogram for the same seed."""
    first = run_dialogues(glr_corpus, Semantics.PREFERRED, 6, seed=11, cache=solution_cache)
    second = run_dialogues(glr_corpus, Semantics.PREFERRED, 6, seed=11, cache=solution_cache)
    assert histogram_hash(histogram(first)) == histogram_hash(histogram(second))
    assert [o.positions for o in first] == [o.positions for o in second]


def test_run_dialogues_streams(restoration, solution_cache):
    """It should draw every outcome from its own stream, whatever the batch size."""
    short = run_dialogues(restoration, Semantics.GROUNDED, 2, seed=5, cache=solution_cache)
    long = run_dialogues(restoration, Semantics.GROUNDED, 4, seed=5, cache=solution_cache)
    assert [o.audience for o in short] == [o.audience for o in long[:2]]


def test_run_dialogues_positions_are_permutations(glr_corpus, solution_cache):
    outcomes = run_dialogues(glr_corpus, Semantics.GROUNDED, 4, seed=1, cache=solution_cache)
    for o in outcomes:
        assert sorted(o.positions.values()) == list(range(1, 11))
        assert len(o.sampled) >= 2
        assert o.audience in glr_corpus.vaf.audiences


def test_run_dialogues_grounded_within_preferred(glr_corpus, solution_cache):
    """It should accept under preferred every tag accepted under grounded."""
    n = 12
    grounded = run_dialogues(glr_corpus, Semantics.GROUNDED, n, seed=4, cache=solution_cache)
    preferred = run_dialogues(glr_corpus, Semantics.PREFERRED, n, seed=4, cache=solution_cache)
    for g, p in zip(grounded, preferred):
        assert (g.audience, g.sampled) == (p.audience, p.sampled)
        (ground,) = g.extensions
        for tag in ground:
            assert p.acceptance[tag] == len(p.extensions)
        assert [t for t in g.trace if "attack" in t] == [t for t in p.trace if "attack" in t]


def test_run_dialogues_invalid_n(restoration):
    with pytest.raises(ValueError, match="at least 1"):
        run_dialogues(restoration, Semantics.GROUNDED, 0)


# _rank


def test_rank_head_to_head_over_total_wins():
    """It should order equally accepted tags by their mutual dialogue, not by wins."""
    acceptance = {"v": 1, "w": 1, "y": 1, "z": 1}
    # z wins twice, y once, but y beat z
    beats = {("z", "v"), ("z", "w"), ("y", "z")}
    assert _rank(["v", "w", "y", "z"], acceptance, beats) == ["y", "z", "v", "w"]


def test_rank_acceptance_first():
    acceptance = {"a": 0, "b": 1}
    assert _rank(["a", "b"], acceptance, {("a", "b")}) == ["b", "a"]


def test_rank_cycle():
    """It should fall back to the tag name when the dialogues form a cycle."""
    acceptance = {"a": 1, "b": 1, "c": 1}
    beats = {("a", "b"), ("b", "c"), ("c", "a")}
    assert _rank(["c", "b", "a"], acceptance, beats) == ["a", "b", "c"]
    assert _rank(["c", "b", "a"], acceptance, set()) == ["a", "b", "c"]


# histogram


def test_histogram(restoration, solution_cache):
    outcomes = run_dialogues(restoration, Semantics.PREFERRED, 4, seed=0, cache=solution_cache)
    hist = histogram(outcomes)
    assert hist.counts.loc["restoration", "pos1"] == 4
    assert hist.counts.loc["agriculture", "pos2"] == 4
    assert hist.to_csv() == "tag,pos1,pos2\nagriculture,0,4\nrestoration,4,0\n"
    assert len(histogram_hash(hist)) == 64


def test_histogram_row_sums(glr_corpus, solution_cache):
    """It should count every tag once per outcome."""
    outcomes = run_dialogues(glr_corpus, Semantics.RESOLUTION, 5, seed=2, cache=solution_cache)
    counts = histogram(outcomes).counts
    assert (counts.sum(axis=1) == 5).all()
    assert (counts.sum(axis=0) == 5).all()
    assert list(counts.columns) == [f"pos{i}" for i in range(1, 11)]


def test_histogram_mixed(restoration, solution_cache):
    grounded = run_dialogues(restoration, Semantics.GROUNDED, 1, seed=0, cache=solution_cache)
    preferred = run_dialogues(restoration, Semantics.PREFERRED, 1, seed=0, cache=solution_cache)
    with pytest.raises(MixedCorpora):
        histogram(grounded + preferred)
    with pytest.raises(ValueError, match="zero outcomes"):
        histogram([])


# prioritise


def test_prioritise(restoration, solution_cache):
    outcomes = run_dialogues(restoration, Semantics.GROUNDED, 3, seed=9, cache=solution_cache)
    order = prioritise(histogram(outcomes))
    assert order.tags == ("restoration", "agriculture")
    assert order.trace[0] == {
        "rank": 1,
        "tag": "restoration",
        "mean_position": 1.0,
        "first_place": 3,
        "tie": [],
    }
    doc = json.loads(order.to_json())
    assert doc["order"] == ["restoration", "agriculture"]


def test_prioritise_kb1(corpus_kb1, solution_cache):
    """It should order the tags by their mean position over the outcomes."""
    n = 20
    outcomes = run_dialogues(corpus_kb1, Semantics.PREFERRED, n, seed=6, cache=solution_cache)
    order = prioritise(histogram(outcomes))
    assert sorted(order.tags) == ["A1", "A2", "A3", "A4", "A5"]
    means = [row["mean_position"] for row in order.trace]
    assert means == sorted(means)
    for row in order.trace:
        tag = row["tag"]
        assert row["mean_position"] == pytest.approx(sum(o.positions[tag] for o in outcomes) / n)
        assert row["first_place"] == sum(o.positions[tag] == 1 for o in outcomes)
    assert [row["rank"] for row in order.trace] == [1, 2, 3, 4, 5]


def test_outcomes_to_json(restoration, solution_cache):
    outcomes = run_dialogues(restoration, Semantics.COMPLETE, 1, seed=0, cache=solution_cache)
    (doc,) = outcomes_to_json(outcomes)
    assert doc["semantics"] == "complete"
    assert doc["positions"] == {"restoration": 1, "agriculture": 2}
    assert doc["extensions"] == [["restoration"]]
