"""Unittests for dialectica.knowledge."""

import pytest

from dialectica._common import (
    CorpusSyntaxError,
    DuplicateTag,
    EmptyValues,
    NotTotalOrder,
    PartialValMap,
    UnknownArgument,
)
from dialectica.knowledge import (
    Argument,
    Mode,
    build_vaf,
    compute_attacks,
    derive_arguments,
    entails,
    parse_corpus,
    satisfiable,
    vaf_to_json,
)
from dialectica.logic import equivalent, parse_formula

DIAMOND_Y = parse_formula("~(a & (a -> y))")


def _f(text):
    return parse_formula(text)


# parse_corpus


def test_parse_facts_and_rules():
    kb = parse_corpus("a.\na -> y.\n")
    assert kb.as_formulas == (_f("a"), _f("a -> y"))


def test_rule_lowering():
    """It should lower a rule to an implication from its conjoined body."""
    assert parse_corpus("y :- a.").as_formulas == (_f("a -> y"),)
    lowered = parse_corpus("w :- h, r.").as_formulas[0]
    assert equivalent(lowered, _f("h & r -> w"))


def test_parse_comments_and_duplicates():
    kb = parse_corpus("# header\na.  # trailing\n\na.\n")
    assert kb.as_formulas == (_f("a"),)
    assert len(kb.clauses) == 2


def test_parse_directives(kb0):
    assert list(kb0.tags) == ["A1", "A2", "A3", "A4"]
    assert kb0.claims["A2"] == DIAMOND_Y
    assert kb0.values == {"A1": "y", "A2": "w", "A3": "y", "A4": "w"}
    assert kb0.audiences == (("y", "w"), ("w", "y"))
    assert kb0.tags["A1"].formula == _f("a -> y")


def test_parse_syntax_error_line():
    """It should report the line of a malformed clause."""
    with pytest.raises(CorpusSyntaxError, match="line 2") as excinfo:
        parse_corpus("a.\na -> .\n")
    assert excinfo.value.lineno == 2
    with pytest.raises(CorpusSyntaxError, match="must end with"):
        parse_corpus("a")
    with pytest.raises(CorpusSyntaxError, match="unknown directive"):
        parse_corpus('@weight "x" 2.')
    with pytest.raises(CorpusSyntaxError, match="not a tagged clause"):
        parse_corpus('a.\n@value "ghost" y.')


def test_parse_duplicate_tag():
    with pytest.raises(DuplicateTag, match="already used"):
        parse_corpus('@tag "t" a.\n@tag "t" b.')


# entails


def test_entails():
    assert entails([_f("a"), _f("a -> y")], _f("y"))
    assert entails([], _f("a | ~a"))
    assert entails([_f("r"), _f("r -> ~a")], DIAMOND_Y)
    assert not entails([_f("a")], _f("y"))


def test_satisfiable():
    assert satisfiable([])
    assert satisfiable([_f("a"), _f("a -> y")])
    assert not satisfiable([_f("a"), _f("~a")])


# derive_arguments


def test_derive_arguments_for_yield(kb0):
    """It should find every minimal support of y, from the bare fact to the agricultural rule."""
    supports = {a.support for a in derive_arguments(kb0, [_f("y")])}
    assert (_f("y"),) in supports
    assert (_f("a"), _f("a -> y")) in supports


def test_derive_arguments_properties(kb0):
    """It should only return minimal supports that entail the claim."""
    for arg in derive_arguments(kb0, [DIAMOND_Y, _f("y")], max_support=3):
        assert entails(arg.support, arg.claim)
        for i in range(len(arg.support)):
            rest = arg.support[:i] + arg.support[i + 1 :]
            assert not entails(rest, arg.claim)


def test_derive_arguments_modes():
    """It should keep inconsistent supports only in dialetheic mode."""
    kb = parse_corpus("a.\n~a.\nb.\n")
    classical = derive_arguments(kb, [_f("y")], Mode.CLASSICAL)
    dialetheic = derive_arguments(kb, [_f("y")], Mode.DIALETHEIC)
    assert classical == []
    assert [a.support for a in dialetheic] == [(_f("a"), _f("~a"))]


def test_derive_arguments_mode_monotonicity(kb0):
    classical = {a.support for a in derive_arguments(kb0, [DIAMOND_Y], Mode.CLASSICAL)}
    dialetheic = {a.support for a in derive_arguments(kb0, [DIAMOND_Y], Mode.DIALETHEIC)}
    assert classical <= dialetheic


def test_derive_arguments_containing(kb0):
    found = derive_arguments(kb0, [DIAMOND_Y], containing=_f("(r -> h) -> (h -> ~a)"))
    assert found[0].support == (_f("r"), _f("r -> h"), _f("(r -> h) -> (h -> ~a)"))


def test_derive_arguments_empty_kb():
    assert derive_arguments([], [_f("a")]) == []


def test_derive_arguments_ids():
    kb = parse_corpus("a.\nb.\n")
    found = derive_arguments(kb, [_f("a"), _f("b")], prefix="X", start=7, tag="t")
    assert [a.id for a in found] == ["X7", "X8"]
    assert all(a.premise_tag == "t" for a in found)


# compute_attacks


def test_compute_attacks_example(corpus_kb0):
    """It should reproduce the three attacks of the land-use argumentation tree."""
    attacks = compute_attacks(corpus_kb0.arguments.values())
    assert attacks == {("A2", "A1"), ("A4", "A1"), ("A3", "A2")}


def test_example_supports(corpus_kb0):
    args = corpus_kb0.arguments
    assert args["A1"].support == (_f("a"), _f("a -> y"))
    assert args["A2"].support == (_f("r"), _f("r -> ~a"))
    assert args["A3"].support == (_f("y"), _f("y -> ~r"))
    assert args["A4"].support == (_f("r"), _f("r -> h"), _f("(r -> h) -> (h -> ~a)"))


def test_compute_attacks_trivial():
    one = Argument("A", (_f("a"),), _f("a"))
    other = Argument("B", (_f("b"),), _f("b"))
    assert compute_attacks([one]) == frozenset()
    assert compute_attacks([one, other]) == frozenset()


def test_compute_attacks_order_independent(corpus_kb0):
    args = list(corpus_kb0.arguments.values())
    assert compute_attacks(args) == compute_attacks(reversed(args))


def test_concede_filter():
    """It should drop an attack on a conceding support only when asked to."""
    inconsistent = Argument("B", (_f("a"), _f("~a")), _f("y"))
    attacker = Argument("A", (_f("~a"),), _f("~a"))
    assert ("A", "B") in compute_attacks([attacker, inconsistent])
    assert ("A", "B") not in compute_attacks([attacker, inconsistent], concede_filter=True)


def test_concede_filter_keeps_consistent_attacks(corpus_kb0):
    args = list(corpus_kb0.arguments.values())
    assert compute_attacks(args, concede_filter=True) == compute_attacks(args)


# build_vaf


def test_build_vaf_example(corpus_kb0):
    vaf = corpus_kb0.vaf
    assert set(vaf.values) == {"y", "w"}
    assert vaf.val == {"A1": "y", "A2": "w", "A3": "y", "A4": "w"}
    assert vaf.audiences == (("y", "w"), ("w", "y"))
    assert vaf.ids == ("A1", "A2", "A3", "A4")
    assert vaf.argument("A3").claim == _f("~(r & (r -> ~a))")
    with pytest.raises(UnknownArgument, match="A9"):
        vaf.argument("A9")


def test_build_vaf_pairs_audience():
    """It should accept an audience given as (better, worse) pairs."""
    args = [Argument("A", (_f("a"),), _f("a"))]
    vaf = build_vaf(args, [], ["x", "y", "z"], {"A": "x"}, [[("z", "y"), ("y", "x")]])
    assert vaf.audiences == (("z", "y", "x"),)


def test_build_vaf_errors(corpus_kb0):
    args = list(corpus_kb0.arguments.values())
    val = {"A1": "y", "A2": "w", "A4": "w"}
    with pytest.raises(PartialValMap, match="A3"):
        build_vaf(args, [], ["y", "w"], val, [["y", "w"]])
    with pytest.raises(PartialValMap, match="not declared"):
        build_vaf(args, [], ["y"], {**val, "A3": "y"}, [["y"]])
    with pytest.raises(EmptyValues):
        build_vaf(args, [], [], {**val, "A3": "y"}, [])
    with pytest.raises(NotTotalOrder, match="cyclic"):
        build_vaf(args, [], ["y", "w"], {**val, "A3": "y"}, [[("y", "w"), ("w", "y")]])
    with pytest.raises(NotTotalOrder):
        build_vaf(args, [], ["y", "w"], {**val, "A3": "y"}, [["y"]])
    with pytest.raises(ValueError, match="attacks itself"):
        build_vaf(args, [("A1", "A1")], ["y", "w"], {**val, "A3": "y"}, [["y", "w"]])


def test_vaf_to_json(corpus_kb0):
    doc = vaf_to_json(corpus_kb0.vaf)
    assert [a["id"] for a in doc["arguments"]] == ["A1", "A2", "A3", "A4"]
    assert doc["arguments"][0] == {
        "id": "A1",
        "support": ["a", "a -> y"],
        "claim": "y",
        "value": "y",
        "tag": "A1",
    }
    assert doc["attacks"] == [["A2", "A1"], ["A3", "A2"], ["A4", "A1"]]
    assert doc["audiences"] == [["y", "w"], ["w", "y"]]
