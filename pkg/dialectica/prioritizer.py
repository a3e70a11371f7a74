"""Batches of dialogues over an action corpus and the prioritisation orders they yield."""

import hashlib
import io
import json
from collections.abc import Iterable, Sequence
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Any, Optional, Union

import pandas as pd

from ._common import EmptyCorpus, MixedCorpora, spawn_rng
from ._config import SETTINGS, logger
from .ddg import Player, Ranks, Ruleset, SolutionCache
from .extensions import Semantics, extensions, project_audience
from .knowledge import (
    VAF,
    Argument,
    KnowledgeBase,
    Mode,
    build_vaf,
    compute_attacks,
    derive_arguments,
    parse_corpus,
)
from .logic import Formula

DEFAULT_VALUE = "default"


@dataclass(frozen=True)
class Action:
    """An action of a corpus: the premise tag, its claim and its value."""

    tag: str
    claim: Formula
    value: str


@dataclass(frozen=True, eq=False)
class ActionCorpus:
    """A knowledge base with tagged actions, values and audiences.

    Parameters
    ----------
    kb : KnowledgeBase
        The parsed corpus.
    actions : tuple of Action
        The actions, in file order.
    audiences : tuple of tuple of str
        Value rankings, best value first.
    seed : int
        Default seed of dialogue batches over this corpus.
    """

    kb: KnowledgeBase
    actions: tuple[Action, ...]
    audiences: tuple[tuple[str, ...], ...]
    seed: int = 0

    def __post_init__(self) -> None:
        if not self.actions:
            raise EmptyCorpus("the corpus declares no tagged actions")
        tags = [a.tag for a in self.actions]
        if len(set(tags)) != len(tags):
            raise ValueError(f"action tags are not unique: {tags}")

    @property
    def tags(self) -> list[str]:
        """Action tags in file order."""
        return [a.tag for a in self.actions]

    @cached_property
    def fingerprint(self) -> str:
        """Short digest identifying the actions of the corpus."""
        text = "\n".join(f"{a.tag}|{a.claim}|{a.value}" for a in self.actions)
        return hashlib.sha256(text.encode("utf8")).hexdigest()[:16]

    @cached_property
    def arguments(self) -> dict[str, Argument]:
        """One argument per action, labelled by its tag.

        The argument is the smallest support that contains the tagged clause
        and entails the action's claim.
        """
        result = {}
        for action in self.actions:
            premise = self.kb.tags[action.tag].formula
            found = derive_arguments(
                self.kb,
                [action.claim],
                Mode.DIALETHEIC,
                containing=premise,
                max_support=SETTINGS["max_support"],
                tag=action.tag,
            )
            if not found:
                raise ValueError(f"no argument derives the claim of action '{action.tag}'")
            result[action.tag] = Argument(action.tag, found[0].support, action.claim, action.tag)
        return result

    def framework(self, concede_filter: bool = False) -> VAF:
        """The value-based framework of the action arguments.

        ``concede_filter`` is passed on to :func:`compute_attacks`.
        """
        args = list(self.arguments.values())
        values = [a.value for a in self.actions] + [v for aud in self.audiences for v in aud]
        return build_vaf(
            args,
            compute_attacks(args, concede_filter=concede_filter),
            dict.fromkeys(values),
            {a.tag: a.value for a in self.actions},
            self.audiences,
        )

    @cached_property
    def vaf(self) -> VAF:
        """The value-based framework used by dialogue batches."""
        return self.framework()


def corpus_from_kb(kb: KnowledgeBase, seed: int = 0) -> ActionCorpus:
    """Build an action corpus from a parsed corpus.

    The claim of an action defaults to the head of its tagged clause. If the
    corpus declares no values at all, every action promotes one shared value.

    Raises
    ------
    EmptyCorpus
        If the corpus has no tagged clause.
    """
    tags = kb.tags
    if not tags:
        raise EmptyCorpus("the corpus declares no tagged actions")
    values = dict(kb.values) or dict.fromkeys(tags, DEFAULT_VALUE)
    actions = tuple(
        Action(tag, kb.claims.get(tag, clause.head), values.get(tag, ""))
        for tag, clause in tags.items()
    )
    audiences = kb.audiences
    if not audiences:
        audiences = (tuple(dict.fromkeys(a.value for a in actions)),)
    return ActionCorpus(kb, actions, audiences, seed)


def load_corpus(path: Union[str, Path], seed: int = 0) -> ActionCorpus:
    """Read an action corpus from a corpus file."""
    path = Path(path)
    corpus = corpus_from_kb(parse_corpus(path.read_text(encoding="utf8")), seed)
    logger.info("Loaded %d actions from %s", len(corpus.actions), path)
    return corpus


@dataclass(frozen=True)
class DialogueOutcome:
    """The result of one batch item.

    Parameters
    ----------
    index : int
        Position of the outcome in its batch.
    corpus : str
        Fingerprint of the corpus.
    semantics : Semantics
        The acceptance semantics.
    audience : tuple of str
        The sampled audience.
    sampled : tuple of str
        The sampled action tags.
    acceptance : dict
        Number of extensions accepting each tag.
    positions : dict
        Position of every tag of the corpus, 1 first.
    trace : list of dict
        The dialogues played and the ranking keys used.
    """

    index: int
    corpus: str
    semantics: Semantics
    audience: tuple[str, ...]
    sampled: tuple[str, ...]
    extensions: tuple[tuple[str, ...], ...]
    acceptance: dict[str, int]
    positions: dict[str, int]
    trace: list[dict[str, Any]] = field(default_factory=list, compare=False)


def _winner_lookup(cache: Optional[SolutionCache], ranks: Ranks) -> Any:
    memo: dict[Formula, Player] = {}

    def winner(thesis: Formula) -> Player:
        if thesis not in memo:
            store = cache if cache is not None else SolutionCache()
            memo[thesis] = store.winner(thesis, ranks, Ruleset.DIALETHEIC)
        return memo[thesis]

    return winner


def _rank(
    tags: Sequence[str], acceptance: dict[str, int], beats: set[tuple[str, str]]
) -> list[str]:
    """Order tags by acceptance count, then head-to-head results, then name.

    Within a group of equally accepted tags, the next tag is the smallest one
    that no remaining tag of the group has beaten. A cycle of head-to-head
    results falls back to the smallest remaining tag.
    """
    order: list[str] = []
    for count in sorted(set(acceptance.values()), reverse=True):
        group = sorted(t for t in tags if acceptance[t] == count)
        while group:
            unbeaten = [t for t in group if not any((o, t) in beats for o in group)]
            pick = (unbeaten or group)[0]
            order.append(pick)
            group.remove(pick)
    return order


def run_dialogues(
    corpus: ActionCorpus,
    semantics: Semantics,
    n: int,
    seed: Optional[int] = None,
    ranks: Optional[Ranks] = None,
    cache: Optional[SolutionCache] = None,
) -> list[DialogueOutcome]:
    """Play ``n`` batches of dialogues over a corpus.

    Every outcome draws from its own random stream ``(seed, index)``: an
    audience uniformly among the corpus audiences and a uniform subset of at
    least two actions. Each attack between sampled actions is contested by a
    dialogue on the attacker's argument under the dialetheic rules; the
    attack stands only if the proponent wins. The surviving framework is
    projected through the audience and evaluated under ``semantics``.

    Tags are positioned by descending acceptance count (accepted in every
    extension first). Tags with equal counts are ordered by the dialogues
    they contested against each other, then by tag.

    Parameters
    ----------
    corpus : ActionCorpus
        The corpus.
    semantics : Semantics
        The acceptance semantics.
    n : int
        Number of outcomes.
    seed : int, optional
        Root seed; defaults to the corpus seed.
    ranks : Ranks, optional
        Ranks of the contest dialogues.
    cache : SolutionCache, optional
        Cache of solved dialogues.

    Raises
    ------
    ValueError
        If ``n`` is smaller than 1.

    Returns
    -------
    list of DialogueOutcome
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    seed = corpus.seed if seed is None else seed
    ranks = ranks or Ranks(*SETTINGS["prioritizer_ranks"])
    winner = _winner_lookup(cache, ranks)
    vaf = corpus.vaf
    tags = corpus.tags
    outcomes = []
    for i in range(n):
        rng = spawn_rng(seed, i)
        audience = vaf.audiences[int(rng.integers(len(vaf.audiences)))]
        k = int(rng.integers(min(2, len(tags)), len(tags) + 1))
        sampled = tuple(sorted(tags[j] for j in rng.choice(len(tags), size=k, replace=False)))

        trace: list[dict[str, Any]] = []
        beats: set[tuple[str, str]] = set()
        kept = []
        for a, b in sorted(vaf.attacks):
            if a not in sampled or b not in sampled:
                continue
            result = winner(vaf.argument(a).thesis)
            if result is Player.P:
                kept.append((a, b))
                beats.add((a, b))
            else:
                beats.add((b, a))
            trace.append({"attack": [a, b], "winner": result.value, "kept": result is Player.P})

        sub = build_vaf(
            [vaf.argument(t) for t in sampled],
            kept,
            vaf.values,
            {t: vaf.val[t] for t in sampled},
            vaf.audiences,
        )
        exts = extensions(project_audience(sub, audience), semantics)
        acceptance = {t: sum(t in e for e in exts) for t in tags}
        order = _rank(tags, acceptance, beats)
        positions = {t: order.index(t) + 1 for t in tags}
        trace.append(
            {
                "rule": "acceptance count, then head-to-head dialogue, then tag",
                "acceptance": {t: acceptance[t] for t in order},
                "beats": sorted(map(list, beats)),
            }
        )
        logger.debug("Outcome %d: %s", i, " > ".join(order))
        outcomes.append(
            DialogueOutcome(
                i,
                corpus.fingerprint,
                semantics,
                audience,
                sampled,
                tuple(tuple(e.sorted()) for e in exts),
                acceptance,
                positions,
                trace,
            )
        )
    logger.info("Played %d outcomes under %s semantics", n, semantics.value)
    return outcomes


@dataclass(frozen=True, eq=False)
class PositionHistogram:
    """How often each tag ended at each position.

    Parameters
    ----------
    counts : pd.DataFrame
        Counts indexed by tag with columns ``pos1`` to ``posN``.
    semantics : Semantics
        The acceptance semantics of the outcomes.
    corpus : str
        Fingerprint of the corpus.
    """

    counts: pd.DataFrame
    semantics: Semantics
    corpus: str

    def to_csv(self) -> str:
        """Return the histogram as CSV with header ``tag,pos1,pos2,...``."""
        buf = io.StringIO()
        self.counts.to_csv(buf, index_label="tag", lineterminator="\n")
        return buf.getvalue()


def histogram(outcomes: Sequence[DialogueOutcome]) -> PositionHistogram:
    """Count the positions of every tag over a batch of outcomes.

    Raises
    ------
    ValueError
        If ``outcomes`` is empty.
    MixedCorpora
        If the outcomes stem from different corpora or semantics.

    Returns
    -------
    PositionHistogram
    """
    if not outcomes:
        raise ValueError("cannot build a histogram from zero outcomes")
    first = outcomes[0]
    for o in outcomes:
        if o.corpus != first.corpus or o.semantics is not first.semantics:
            raise MixedCorpora(
                f"outcome {o.index} stems from corpus {o.corpus} ({o.semantics.value}), "
                f"not {first.corpus} ({first.semantics.value})"
            )
    tags = list(first.positions)
    df = pd.DataFrame(
        [(t, p) for o in outcomes for t, p in o.positions.items()], columns=["tag", "position"]
    )
    counts = (
        pd.crosstab(df["tag"], df["position"])
        .reindex(index=tags, columns=range(1, len(tags) + 1), fill_value=0)
        .rename(columns=lambda p: f"pos{p}")
        .astype(int)
    )
    counts.index.name = "tag"
    counts.columns.name = None
    return PositionHistogram(counts, first.semantics, first.corpus)


def histogram_hash(hist: PositionHistogram) -> str:
    """Return the SHA-256 digest of the histogram CSV."""
    return hashlib.sha256(hist.to_csv().encode("utf8")).hexdigest()


@dataclass(frozen=True)
class PrioritisationOrder:
    """A total order over the tags, rank 1 first, with the aggregation trace."""

    tags: tuple[str, ...]
    trace: list[dict[str, Any]]

    def to_json(self) -> str:
        """Return the order and its trace as JSON."""
        return json.dumps({"order": list(self.tags), "trace": self.trace}, indent=2)


def prioritise(hist: PositionHistogram) -> PrioritisationOrder:
    """Aggregate a histogram into a prioritisation order.

    Tags are ordered by ascending mean position, then by how often they took
    position 1, then lexicographically. The order is a reporting convention
    over dialogue outcomes, not a preference relation.

    Parameters
    ----------
    hist : PositionHistogram
        The histogram.

    Returns
    -------
    PrioritisationOrder
    """
    counts = hist.counts
    positions = pd.Series(range(1, counts.shape[1] + 1), index=counts.columns)
    stats = pd.DataFrame(
        {
            "mean_position": counts.mul(positions, axis=1).sum(axis=1) / counts.sum(axis=1),
            "first_place": counts.iloc[:, 0],
        }
    ).rename_axis(None)
    stats["tag"] = stats.index
    stats = stats.sort_values(
        ["mean_position", "first_place", "tag"], ascending=[True, False, True], kind="mergesort"
    )
    trace = []
    for rank, (tag, row) in enumerate(stats.iterrows(), start=1):
        tied = stats[
            (stats["mean_position"] == row["mean_position"])
            & (stats["first_place"] == row["first_place"])
        ]
        trace.append(
            {
                "rank": rank,
                "tag": tag,
                "mean_position": float(row["mean_position"]),
                "first_place": int(row["first_place"]),
                "tie": sorted(t for t in tied.index if t != tag),
            }
        )
    return PrioritisationOrder(tuple(stats.index), trace)


def outcomes_to_json(outcomes: Iterable[DialogueOutcome]) -> list[dict[str, Any]]:
    """Return the JSON trace of a batch of outcomes."""
    return [
        {
            "index": o.index,
            "semantics": o.semantics.value,
            "audience": list(o.audience),
            "sampled": list(o.sampled),
            "extensions": [list(e) for e in o.extensions],
            "positions": o.positions,
            "trace": o.trace,
        }
        for o in outcomes
    ]
