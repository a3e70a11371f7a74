"""Clause corpora, argument derivation, attacks and value-based frameworks."""

import itertools
import re
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property, lru_cache
from typing import Any, Optional, Union

import numpy as np

from ._common import (
    CorpusSyntaxError,
    DuplicateTag,
    EmptyValues,
    FormulaSyntaxError,
    NotTotalOrder,
    PartialValMap,
    UnknownArgument,
)
from ._config import logger
from .logic import Formula, Implies, Not, Sequent, conjoin, parse_formula, truth_table


class Mode(Enum):
    """How inconsistent supports are treated.

    Attributes
    ----------
    CLASSICAL: Supports must be satisfiable.
    DIALETHEIC: Unsatisfiable supports are kept.
    """

    CLASSICAL = "classical"
    DIALETHEIC = "dialetheic"


@dataclass(frozen=True)
class Clause:
    """A fact ``head.`` or a rule ``head :- b1, b2.`` of a corpus."""

    head: Formula
    body: tuple[Formula, ...] = ()
    line: int = 0
    tag: Optional[str] = None

    @property
    def formula(self) -> Formula:
        """The clause as a formula; rules become ``(b1 & b2) -> head``."""
        if not self.body:
            return self.head
        return Implies(conjoin(self.body), self.head)


@dataclass(frozen=True, eq=False)
class KnowledgeBase:
    """A parsed corpus.

    Parameters
    ----------
    clauses : tuple of Clause
        Clauses in file order.
    claims : dict
        Claim per action tag set with ``@claim``.
    values : dict
        Value label per action tag set with ``@value``.
    audiences : tuple of tuple of str
        Value rankings declared with ``@audience``, best value first.
    """

    clauses: tuple[Clause, ...]
    claims: Mapping[str, Formula] = field(default_factory=dict)
    values: Mapping[str, str] = field(default_factory=dict)
    audiences: tuple[tuple[str, ...], ...] = ()

    @cached_property
    def as_formulas(self) -> tuple[Formula, ...]:
        """The clauses as formulas, deduplicated, in order of first appearance."""
        return tuple(dict.fromkeys(c.formula for c in self.clauses))

    @property
    def tags(self) -> dict[str, Clause]:
        """Tagged clauses by action tag, in file order."""
        return {c.tag: c for c in self.clauses if c.tag is not None}


_DIRECTIVE_RE = re.compile(r"@(?P<name>\w+)\s+(?P<rest>.*)$")
_QUOTED_RE = re.compile(r'"(?P<tag>[^"]+)"\s+(?P<rest>.*)$')
_VALUE_RE = re.compile(r"[A-Za-z_][\w-]*")


def _strip_period(text: str, lineno: int) -> str:
    text = text.strip()
    if not text.endswith("."):
        raise CorpusSyntaxError("statement must end with '.'", lineno)
    return text[:-1].strip()


def _formula(text: str, lineno: int) -> Formula:
    try:
        f = parse_formula(text)
    except FormulaSyntaxError as e:
        raise CorpusSyntaxError(str(e), lineno) from e
    if isinstance(f, Sequent):
        raise CorpusSyntaxError("sequents are not allowed in a corpus", lineno)
    return f


def _parse_clause(text: str, lineno: int, tag: Optional[str] = None) -> Clause:
    text = _strip_period(text, lineno)
    head, sep, body = text.partition(":-")
    if not sep:
        return Clause(_formula(head, lineno), (), lineno, tag)
    parts = [b.strip() for b in body.split(",")]
    if not all(parts):
        raise CorpusSyntaxError("empty formula in rule body", lineno)
    return Clause(_formula(head, lineno), tuple(_formula(b, lineno) for b in parts), lineno, tag)


def parse_corpus(text: str) -> KnowledgeBase:
    """Parse a clause corpus.

    Each non-empty line holds one statement; ``#`` starts a comment.

    * ``head.`` is a fact and ``head :- b1, b2.`` a rule.
    * ``@tag "name" <clause>`` marks the clause as the premise of an action.
    * ``@claim "name" <formula>.`` sets the claim of an action (default: the
      head of the tagged clause).
    * ``@value "name" <value>.`` sets the value an action promotes.
    * ``@audience v1 > v2 > ... .`` declares an audience.

    Parameters
    ----------
    text : str
        The corpus text.

    Raises
    ------
    CorpusSyntaxError
        If a line cannot be parsed; the error carries the line number.
    DuplicateTag
        If an action tag is used for more than one clause.

    Returns
    -------
    KnowledgeBase
    """
    clauses: list[Clause] = []
    claims: dict[str, Formula] = {}
    values: dict[str, str] = {}
    audiences: list[tuple[str, ...]] = []
    references: list[tuple[str, int]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if not line.startswith("@"):
            clauses.append(_parse_clause(line, lineno))
            continue
        m = _DIRECTIVE_RE.match(line)
        if m is None:
            raise CorpusSyntaxError(f"malformed directive '{line}'", lineno)
        name, rest = m.group("name"), m.group("rest")
        if name == "audience":
            ranking = tuple(v.strip() for v in _strip_period(rest, lineno).split(">"))
            if not all(_VALUE_RE.fullmatch(v) for v in ranking):
                raise CorpusSyntaxError(f"malformed audience '{rest}'", lineno)
            audiences.append(ranking)
            continue
        q = _QUOTED_RE.match(rest)
        if q is None:
            raise CorpusSyntaxError(f"@{name} expects a quoted action tag", lineno)
        tag, body = q.group("tag"), q.group("rest")
        if name == "tag":
            if any(c.tag == tag for c in clauses):
                raise DuplicateTag(f"line {lineno}: tag '{tag}' is already used")
            clauses.append(_parse_clause(body, lineno, tag))
        elif name == "claim":
            claims[tag] = _formula(_strip_period(body, lineno), lineno)
            references.append((tag, lineno))
        elif name == "value":
            value = _strip_period(body, lineno)
            if not _VALUE_RE.fullmatch(value):
                raise CorpusSyntaxError(f"malformed value '{value}'", lineno)
            values[tag] = value
            references.append((tag, lineno))
        else:
            raise CorpusSyntaxError(f"unknown directive '@{name}'", lineno)

    tagged = {c.tag for c in clauses}
    for tag, lineno in references:
        if tag not in tagged:
            raise CorpusSyntaxError(f"'{tag}' is not a tagged clause", lineno)
    kb = KnowledgeBase(tuple(clauses), claims, values, tuple(audiences))
    logger.debug("Parsed corpus with %d clauses and %d actions", len(clauses), len(kb.tags))
    return kb


def _bits(column: np.ndarray) -> int:
    return int.from_bytes(np.packbits(column).tobytes(), "big")


def entails(premises: Iterable[Formula], claim: Formula) -> bool:
    """Return True iff every assignment satisfying all premises satisfies ``claim``.

    Raises
    ------
    TooManyAtoms
        If more than 20 atoms are involved.
    """
    premises = list(premises)
    _, table = truth_table([*premises, claim])
    satisfied = table[:, :-1].all(axis=1)
    return bool(table[satisfied, -1].all())


def satisfiable(formulas: Iterable[Formula]) -> bool:
    """Return True iff some assignment satisfies all ``formulas``."""
    formulas = list(formulas)
    if not formulas:
        return True
    _, table = truth_table(formulas)
    return bool(table.all(axis=1).any())


@dataclass(frozen=True)
class Argument:
    """An argument ``<support, claim>``.

    Parameters
    ----------
    id : str
        Label of the argument.
    support : tuple of Formula
        The premises, in knowledge-base order.
    claim : Formula
        The conclusion.
    premise_tag : str, optional
        The action whose premise this argument builds on.
    """

    id: str
    support: tuple[Formula, ...]
    claim: Formula
    premise_tag: Optional[str] = None

    @property
    def thesis(self) -> Sequent:
        """The argument as a dialogue thesis ``support |- claim``."""
        return Sequent(self.support, self.claim)

    def __str__(self) -> str:
        support = ", ".join(str(f) for f in self.support)
        return f"{self.id} = <{{{support}}}, {self.claim}>"


AttackRelation = frozenset[tuple[str, str]]


def derive_arguments(
    kb: Union[KnowledgeBase, Sequence[Formula]],
    claims: Sequence[Formula],
    mode: Mode = Mode.CLASSICAL,
    *,
    containing: Optional[Formula] = None,
    max_support: Optional[int] = None,
    tag: Optional[str] = None,
    prefix: str = "A",
    start: int = 1,
) -> list[Argument]:
    """Derive all arguments for ``claims`` from a knowledge base.

    Supports are subset-minimal sets of knowledge-base formulas that entail a
    claim. They are enumerated by increasing size, so the result is
    deterministic: claims in the given order, then by support size, then by
    position of the support members in the knowledge base.

    Parameters
    ----------
    kb : KnowledgeBase or sequence of Formula
        The knowledge base.
    claims : sequence of Formula
        Claims to argue for.
    mode : Mode
        In classical mode unsatisfiable supports are dropped; in dialetheic
        mode they are kept.
    containing : Formula, optional
        Only return supports containing this formula.
    max_support : int, optional
        Only consider supports up to this size.
    tag : str, optional
        Action tag attached to the derived arguments.
    prefix : str
        Prefix of the generated argument ids.
    start : int
        Number of the first generated argument id.

    Returns
    -------
    list of Argument
    """
    formulas = list(kb.as_formulas if isinstance(kb, KnowledgeBase) else dict.fromkeys(kb))
    required: list[int] = []
    if containing is not None:
        if containing not in formulas:
            return []
        required = [formulas.index(containing)]
    pool = [i for i in range(len(formulas)) if i not in required]
    limit = len(formulas) if max_support is None else min(max_support, len(formulas))

    result: list[Argument] = []
    for claim in claims:
        _, table = truth_table([*formulas, claim])
        masks = [_bits(table[:, j]) for j in range(len(formulas))]
        full = _bits(np.ones(table.shape[0], dtype=bool))
        claim_mask = _bits(table[:, -1])

        def models(subset: Iterable[int]) -> int:
            sat = full
            for i in subset:
                sat &= masks[i]
            return sat

        def proves(subset: Iterable[int], claim_mask: int = claim_mask) -> bool:
            return models(subset) & ~claim_mask == 0

        minimal: list[frozenset[int]] = []
        for size in range(len(required), limit + 1):
            for combo in itertools.combinations(pool, size - len(required)):
                subset = frozenset((*required, *combo))
                if any(found <= subset for found in minimal) or not proves(subset):
                    continue
                if any(proves(subset - {i}) for i in subset):
                    continue
                minimal.append(subset)
                if mode is Mode.CLASSICAL and models(subset) == 0:
                    continue
                support = tuple(formulas[i] for i in sorted(subset))
                result.append(Argument(f"{prefix}{start + len(result)}", support, claim, tag))
    logger.debug("Derived %d arguments for %d claims", len(result), len(claims))
    return result


@lru_cache(maxsize=None)
def _equivalent(f: Formula, g: Formula) -> bool:
    _, table = truth_table([f, g])
    return bool((table[:, 0] == table[:, 1]).all())


def _rebuts(attacker: Argument, attacked: Argument) -> bool:
    targets = [Not(phi) for phi in attacked.support]
    if attacked.support:
        targets.append(Not(conjoin(attacked.support)))
    return any(_equivalent(attacker.claim, t) for t in targets)


def compute_attacks(
    args: Iterable[Argument], *, concede_filter: bool = False
) -> AttackRelation:
    """Compute the attack relation between arguments.

    ``A`` attacks ``B`` iff the claim of ``A`` is classically equivalent to the
    negation of a member of the support of ``B`` or to the negation of the
    conjunction of that support, whatever the logic mode of the arguments.

    Parameters
    ----------
    args : iterable of Argument
        The arguments.
    concede_filter : bool
        Drop an attack when the support of ``B`` already entails the claim
        of ``A``. Only an inconsistent support can concede a claim that
        negates one of its own members.

    Returns
    -------
    frozenset of (str, str)
        Pairs ``(attacker id, attacked id)``.
    """
    ordered = sorted(args, key=lambda a: a.id)
    attacks = set()
    for a in ordered:
        for b in ordered:
            if a.id == b.id or not _rebuts(a, b):
                continue
            if concede_filter and entails(b.support, a.claim):
                logger.debug("%s concedes the claim of %s; attack dropped", b.id, a.id)
                continue
            attacks.add((a.id, b.id))
    return frozenset(attacks)


@dataclass(frozen=True, eq=False)
class VAF:
    """A value-based argumentation framework.

    Parameters
    ----------
    arguments : tuple of Argument
        Arguments sorted by id.
    attacks : frozenset of (str, str)
        The attack relation.
    values : tuple of str
        The values promoted by arguments.
    val : dict
        Value of each argument id.
    audiences : tuple of tuple of str
        Strict total orders on the values, best value first.
    """

    arguments: tuple[Argument, ...]
    attacks: AttackRelation
    values: tuple[str, ...]
    val: Mapping[str, str]
    audiences: tuple[tuple[str, ...], ...]

    @property
    def ids(self) -> tuple[str, ...]:
        """Argument ids in order."""
        return tuple(a.id for a in self.arguments)

    def argument(self, arg_id: str) -> Argument:
        """Return the argument labelled ``arg_id``."""
        for a in self.arguments:
            if a.id == arg_id:
                return a
        raise UnknownArgument(arg_id)


def _as_ranking(
    audience: Union[Sequence[str], Iterable[tuple[str, str]]], values: tuple[str, ...]
) -> tuple[str, ...]:
    items = list(audience)
    if items and all(isinstance(i, str) for i in items):
        if len(set(items)) != len(items) or set(items) != set(values):
            raise NotTotalOrder(f"{items} is not a strict total order on {list(values)}")
        return tuple(items)
    # a set of (better, worse) pairs; take its transitive closure
    beats: dict[str, set[str]] = {v: set() for v in values}
    for better, worse in items:
        if better not in beats or worse not in beats:
            raise NotTotalOrder(f"({better}, {worse}) relates unknown values")
        beats[better].add(worse)
    changed = True
    while changed:
        changed = False
        for v in values:
            reach = set().union(*(beats[w] for w in beats[v])) - beats[v]
            if reach:
                beats[v] |= reach
                changed = True
    for v in values:
        if v in beats[v]:
            raise NotTotalOrder(f"the order is cyclic through '{v}'")
    for v, w in itertools.combinations(values, 2):
        if w not in beats[v] and v not in beats[w]:
            raise NotTotalOrder(f"'{v}' and '{w}' are not comparable")
    return tuple(sorted(values, key=lambda v: -len(beats[v])))


def build_vaf(
    args: Iterable[Argument],
    attacks: Iterable[tuple[str, str]],
    values: Iterable[str],
    val_map: Mapping[str, str],
    audiences: Iterable[Union[Sequence[str], Iterable[tuple[str, str]]]],
) -> VAF:
    """Validate and assemble a value-based argumentation framework.

    Parameters
    ----------
    args : iterable of Argument
        The arguments.
    attacks : iterable of (str, str)
        Attack pairs between argument ids.
    values : iterable of str
        The value labels.
    val_map : dict
        Value of every argument id.
    audiences : iterable
        Each audience is either a ranking of all values (best first) or a
        collection of ``(better, worse)`` pairs whose closure is a strict
        total order.

    Raises
    ------
    EmptyValues
        If no values are given.
    PartialValMap
        If an argument has no value, or a value is not declared.
    NotTotalOrder
        If an audience is not a strict total order on the values.
    UnknownArgument
        If an attack references an unknown argument.
    ValueError
        If an argument attacks itself.

    Returns
    -------
    VAF
    """
    arguments = tuple(sorted(args, key=lambda a: a.id))
    ids = {a.id for a in arguments}
    value_set = tuple(dict.fromkeys(values))
    if not value_set:
        raise EmptyValues("a value-based framework needs at least one value")
    missing = sorted(ids - set(val_map))
    if missing:
        raise PartialValMap(f"no value for arguments {missing}")
    unknown = sorted({v for a, v in val_map.items() if a in ids and v not in value_set})
    if unknown:
        raise PartialValMap(f"values {unknown} are not declared")
    relation = frozenset((a, b) for a, b in attacks)
    for a, b in relation:
        for x in (a, b):
            if x not in ids:
                raise UnknownArgument(x)
        if a == b:
            raise ValueError(f"argument {a} attacks itself")
    rankings = tuple(dict.fromkeys(_as_ranking(aud, value_set) for aud in audiences))
    return VAF(arguments, relation, value_set, {a: val_map[a] for a in sorted(ids)}, rankings)


def vaf_to_json(vaf: VAF) -> dict[str, Any]:
    """Return the JSON document of a framework."""
    return {
        "arguments": [
            {
                "id": a.id,
                "support": [str(f) for f in a.support],
                "claim": str(a.claim),
                "value": vaf.val[a.id],
                "tag": a.premise_tag,
            }
            for a in vaf.arguments
        ],
        "attacks": [list(pair) for pair in sorted(vaf.attacks)],
        "audiences": [list(aud) for aud in vaf.audiences],
    }
