"""Value-based argumentation, dialectical dialogue games and actor network analysis."""

__version__ = "0.1.0"

__all__ = [
    "ActionCorpus",
    "DModel",
    "KnowledgeBase",
    "Ranks",
    "Ruleset",
    "Semantics",
    "SocialGraph",
    "load_corpus",
    "load_graph",
    "parse_corpus",
    "parse_formula",
    "prioritise",
    "run_dialogues",
    "solve",
]

from .ddg import Ranks, Ruleset, solve
from .extensions import Semantics
from .knowledge import KnowledgeBase, parse_corpus
from .logic import DModel, parse_formula
from .netkit import SocialGraph, load_graph
from .prioritizer import ActionCorpus, load_corpus, prioritise, run_dialogues
