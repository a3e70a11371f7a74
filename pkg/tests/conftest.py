"""Pytest fixtures for dialectica package."""

from pathlib import Path

import pytest

from dialectica.ddg import SolutionCache
from dialectica.extensions import AF
from dialectica.knowledge import KnowledgeBase, parse_corpus
from dialectica.logic import DModel
from dialectica.netkit import SocialGraph, load_graph
from dialectica.prioritizer import ActionCorpus, load_corpus

FIXTURES = Path(__file__).parent.parent / "fixtures"


@pytest.fixture()
def fixtures_dir() -> Path:
    """Return the directory of the shipped fixture files."""
    return FIXTURES


@pytest.fixture()
def kb0() -> KnowledgeBase:
    """Return the land-use knowledge base with four action arguments."""
    return parse_corpus((FIXTURES / "example_kb0.kb").read_text(encoding="utf8"))


@pytest.fixture()
def corpus_kb0() -> ActionCorpus:
    """Return the action corpus of the land-use knowledge base."""
    return load_corpus(FIXTURES / "example_kb0.kb")


@pytest.fixture()
def corpus_kb1() -> ActionCorpus:
    """Return the action corpus extended with the water-supply premises."""
    return load_corpus(FIXTURES / "example_kb1.kb")


@pytest.fixture()
def restoration() -> ActionCorpus:
    """Return the two-action corpus opposing agriculture and restoration."""
    return load_corpus(FIXTURES / "example_restoration.kb")


@pytest.fixture()
def glr_corpus() -> ActionCorpus:
    """Return the corpus of the ten paramo premises."""
    return load_corpus(FIXTURES / "glr_premises.kb")


@pytest.fixture()
def glut_model() -> DModel:
    """Return a two-world model in which ``a`` is a glut at ``w0``."""
    return DModel(
        worlds=("w0", "w1"),
        star={"w0": "w1", "w1": "w0"},
        tern=frozenset(),
        holds={("a", "w0"): True, ("a", "w1"): False},
        designated="w0",
    )


@pytest.fixture()
def classical_model() -> DModel:
    """Return a one-world model with identity reversal and reflexive accessibility."""
    return DModel(
        worlds=("w",),
        star={"w": "w"},
        tern=frozenset({("w", "w", "w")}),
        holds={("a", "w"): True, ("b", "w"): False},
        designated="w",
    )


@pytest.fixture()
def two_cycle() -> AF:
    """Return two arguments defeating each other."""
    return AF(("A", "B"), frozenset({("A", "B"), ("B", "A")}))


@pytest.fixture()
def chain() -> AF:
    """Return the chain A defeats B defeats C."""
    return AF(("A", "B", "C"), frozenset({("A", "B"), ("B", "C")}))


@pytest.fixture()
def path_graph() -> SocialGraph:
    """Return the three-actor path a - b - c."""
    return load_graph(FIXTURES / "path_nodes.csv", FIXTURES / "path_edges.csv")


@pytest.fixture()
def planted_graph() -> SocialGraph:
    """Return a 30-actor network with two planted blocks of 15 actors."""
    return load_graph(FIXTURES / "planted_nodes.csv", FIXTURES / "planted_edges.csv")


@pytest.fixture()
def glr_graph() -> SocialGraph:
    """Return the baseline actor network of the paramo fixture."""
    return load_graph(FIXTURES / "glr_actors.csv", FIXTURES / "glr_links.csv")


@pytest.fixture()
def solution_cache(tmp_path) -> SolutionCache:
    """Return a solution cache in a temporary directory."""
    return SolutionCache(data_dir=tmp_path / "ddg", no_cache=False, no_store=False, max_age=None)
