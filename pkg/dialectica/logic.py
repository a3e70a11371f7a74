"""Sentential formulas: parsing, rendering, classical and four-valued evaluation."""

import itertools
import re
from collections.abc import Iterable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Union

import numpy as np

from ._common import (
    CapExceeded,
    FormulaSyntaxError,
    InvalidModel,
    MissingAtom,
    TooManyAtoms,
    UnknownAtom,
    UnknownWorld,
)

MAX_TABLE_ATOMS = 20
ATOM_PATTERN = re.compile(r"[a-z][a-z0-9_]*")


class _Formula:
    def __str__(self) -> str:
        return render_formula(self)  # type: ignore[arg-type]


@dataclass(frozen=True)
class Atom(_Formula):
    """A sentential variable such as ``a`` or ``oak_coffee``."""

    name: str

    def __post_init__(self) -> None:
        if not ATOM_PATTERN.fullmatch(self.name):
            raise ValueError(f"Invalid atom name: '{self.name}'")


@dataclass(frozen=True)
class Not(_Formula):
    operand: "Formula"


@dataclass(frozen=True)
class And(_Formula):
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or(_Formula):
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies(_Formula):
    antecedent: "Formula"
    consequent: "Formula"


@dataclass(frozen=True)
class Sequent(_Formula):
    """A thesis ``p1, ..., pn |- c``: the conclusion follows from the premises."""

    premises: tuple["Formula", ...]
    conclusion: "Formula"

    def __post_init__(self) -> None:
        object.__setattr__(self, "premises", tuple(self.premises))
        for part in (*self.premises, self.conclusion):
            if isinstance(part, Sequent) or _contains_sequent(part):
                raise ValueError("Sequents may only appear at the top level")


Formula = Union[Atom, Not, And, Or, Implies, Sequent]
Assignment = Mapping[Union[str, Atom], bool]


def _contains_sequent(f: "Formula") -> bool:
    if isinstance(f, Sequent):
        return True
    if isinstance(f, Atom):
        return False
    if isinstance(f, Not):
        return _contains_sequent(f.operand)
    return any(_contains_sequent(child) for child in _children(f))


def _children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, Atom):
        return ()
    if isinstance(f, Not):
        return (f.operand,)
    if isinstance(f, (And, Or)):
        return (f.left, f.right)
    if isinstance(f, Implies):
        return (f.antecedent, f.consequent)
    return (*f.premises, f.conclusion)


def atoms(f: Formula) -> frozenset[str]:
    """Return the names of all atoms occurring in ``f``."""
    if isinstance(f, Atom):
        return frozenset([f.name])
    return frozenset().union(*(atoms(child) for child in _children(f)))


def depth(f: Formula) -> int:
    """Return the connective nesting depth of ``f`` (atoms have depth 0)."""
    if isinstance(f, Atom):
        return 0
    return 1 + max((depth(child) for child in _children(f)), default=0)


def conjoin(formulas: Sequence[Formula]) -> Formula:
    """Right-fold ``formulas`` into a conjunction ``f1 & (f2 & (...))``."""
    if not formulas:
        raise ValueError("Cannot conjoin an empty sequence of formulas")
    result = formulas[-1]
    for f in reversed(formulas[:-1]):
        result = And(f, result)
    return result


def unfold_sequent(f: Formula) -> Formula:
    """Return a sequent as the implication from its conjoined premises to its conclusion.

    Other formulas are returned unchanged.
    """
    if not isinstance(f, Sequent):
        return f
    if not f.premises:
        return f.conclusion
    return Implies(conjoin(f.premises), f.conclusion)


# Parsing

_TOKEN_SPEC = [
    ("WS", r"\s+"),
    ("ATOM", r"[a-z][a-z0-9_]*"),
    ("TURNSTILE", r"\|-"),
    ("ARROW", r"->"),
    ("AND", r"&"),
    ("OR", r"\|"),
    ("NOT", r"~"),
    ("LPAREN", r"\("),
    ("RPAREN", r"\)"),
    ("COMMA", r","),
]
_TOKEN_RE = re.compile("|".join(f"(?P<{name}>{regex})" for name, regex in _TOKEN_SPEC))


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    offset: int


def _tokenize(text: str) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            offset = _byte_offset(text, pos)
            raise FormulaSyntaxError(f"unexpected character '{text[pos]}'", offset)
        if m.lastgroup != "WS":
            tokens.append(_Token(m.lastgroup or "", m.group(), _byte_offset(text, pos)))
        pos = m.end()
    tokens.append(_Token("END", "", _byte_offset(text, len(text))))
    return tokens


def _byte_offset(text: str, pos: int) -> int:
    return len(text[:pos].encode("utf8"))


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    @property
    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        token = self.tokens[self.pos]
        self.pos += 1
        return token

    def expect(self, kind: str, what: str) -> _Token:
        if self.peek.kind != kind:
            raise FormulaSyntaxError(f"expected {what}", self.peek.offset)
        return self.advance()

    def thesis(self) -> Formula:
        if any(t.kind == "TURNSTILE" for t in self.tokens):
            premises = []
            if self.peek.kind != "TURNSTILE":
                premises.append(self.implication())
                while self.peek.kind == "COMMA":
                    self.advance()
                    premises.append(self.implication())
            self.expect("TURNSTILE", "'|-'")
            conclusion = self.implication()
            self.expect("END", "end of input")
            return Sequent(tuple(premises), conclusion)
        f = self.implication()
        self.expect("END", "end of input")
        return f

    def implication(self) -> Formula:
        left = self.disjunction()
        if self.peek.kind == "ARROW":
            self.advance()
            return Implies(left, self.implication())
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.peek.kind == "OR":
            self.advance()
            left = Or(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.unary()
        while self.peek.kind == "AND":
            self.advance()
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        token = self.peek
        if token.kind == "NOT":
            self.advance()
            return Not(self.unary())
        if token.kind == "ATOM":
            self.advance()
            return Atom(token.text)
        if token.kind == "LPAREN":
            self.advance()
            inner = self.implication()
            self.expect("RPAREN", "')'")
            return inner
        raise FormulaSyntaxError("expected a formula", token.offset)


def parse_formula(text: str) -> Formula:
    """Parse the concrete syntax of a formula or sequent.

    Negation ``~`` binds tightest, followed by ``&``, ``|`` and the
    right-associative ``->``. A thesis ``p1, p2 |- c`` parses to a
    :class:`Sequent`; ``|- c`` has no premises.

    Parameters
    ----------
    text : str
        The formula text.

    Raises
    ------
    FormulaSyntaxError
        If the text is empty, has unbalanced parentheses, a dangling
        connective or an empty operand. The error carries the byte offset.

    Returns
    -------
    Formula
    """
    if not text.strip():
        raise FormulaSyntaxError("empty formula", 0)
    return _Parser(text).thesis()


# Rendering

_PRECEDENCE = {Implies: 1, Or: 2, And: 3, Not: 4, Atom: 5}


def _wrap(f: Formula, parens: bool) -> str:
    text = render_formula(f)
    return f"({text})" if parens else text


def render_formula(f: Formula) -> str:
    """Render ``f`` in the concrete syntax accepted by :func:`parse_formula`."""
    if isinstance(f, Atom):
        return f.name
    if isinstance(f, Not):
        return "~" + _wrap(f.operand, _PRECEDENCE[type(f.operand)] < 4)
    if isinstance(f, (And, Or)):
        prec = _PRECEDENCE[type(f)]
        op = "&" if isinstance(f, And) else "|"
        left = _wrap(f.left, _PRECEDENCE[type(f.left)] < prec)
        right = _wrap(f.right, _PRECEDENCE[type(f.right)] <= prec)
        return f"{left} {op} {right}"
    if isinstance(f, Implies):
        # nested implications are always parenthesised
        left = _wrap(f.antecedent, _PRECEDENCE[type(f.antecedent)] <= 1)
        right = _wrap(f.consequent, _PRECEDENCE[type(f.consequent)] <= 1)
        return f"{left} -> {right}"
    premises = ", ".join(render_formula(p) for p in f.premises)
    conclusion = render_formula(f.conclusion)
    return f"{premises} |- {conclusion}" if premises else f"|- {conclusion}"


# Classical semantics


def _by_name(v: Assignment) -> dict[str, bool]:
    return {(k.name if isinstance(k, Atom) else k): bool(b) for k, b in v.items()}


def eval_classical(f: Formula, v: Assignment) -> bool:
    """Evaluate ``f`` under the two-valued assignment ``v``.

    A :class:`Sequent` is evaluated as the material implication from the
    conjoined premises to the conclusion.

    Parameters
    ----------
    f : Formula
        The formula to evaluate.
    v : dict
        Truth value per atom (keyed by :class:`Atom` or atom name).

    Raises
    ------
    MissingAtom
        If ``v`` does not cover an atom of ``f``.

    Returns
    -------
    bool
    """
    return _eval(f, _by_name(v))


def _eval(f: Formula, v: dict[str, bool]) -> bool:
    if isinstance(f, Atom):
        if f.name not in v:
            raise MissingAtom(f.name)
        return v[f.name]
    if isinstance(f, Not):
        return not _eval(f.operand, v)
    if isinstance(f, And):
        return _eval(f.left, v) and _eval(f.right, v)
    if isinstance(f, Or):
        return _eval(f.left, v) or _eval(f.right, v)
    if isinstance(f, Implies):
        return not _eval(f.antecedent, v) or _eval(f.consequent, v)
    return not all(_eval(p, v) for p in f.premises) or _eval(f.conclusion, v)


def truth_table(
    formulas: Sequence[Formula], names: Iterable[str] = ()
) -> tuple[tuple[str, ...], np.ndarray]:
    """Evaluate formulas on every assignment of their atoms.

    Row ``i`` of the table corresponds to the assignment in which the atom at
    position ``j`` (sorted by name) is true iff bit ``n - 1 - j`` of ``i`` is set.

    Parameters
    ----------
    formulas : sequence of Formula
        Formulas forming the columns of the table.
    names : iterable of str
        Additional atoms to range over.

    Raises
    ------
    TooManyAtoms
        If more than 20 atoms are involved.

    Returns
    -------
    tuple
        The sorted atom names and a boolean array of shape
        ``(2 ** n_atoms, len(formulas))``.
    """
    vocabulary = set(names).union(*(atoms(f) for f in formulas))
    if len(vocabulary) > MAX_TABLE_ATOMS:
        raise TooManyAtoms(
            f"{len(vocabulary)} atoms exceed the truth-table cap of {MAX_TABLE_ATOMS}"
        )
    ordered = tuple(sorted(vocabulary))
    n = len(ordered)
    rows = np.arange(2**n, dtype=np.int64)
    env = {name: ((rows >> (n - 1 - j)) & 1).astype(bool) for j, name in enumerate(ordered)}
    table = np.empty((2**n, len(formulas)), dtype=bool)
    for col, f in enumerate(formulas):
        table[:, col] = _vec(f, env, 2**n)
    return ordered, table


def _vec(f: Formula, env: dict[str, np.ndarray], size: int) -> np.ndarray:
    if isinstance(f, Atom):
        return env[f.name]
    if isinstance(f, Not):
        return ~_vec(f.operand, env, size)
    if isinstance(f, And):
        return _vec(f.left, env, size) & _vec(f.right, env, size)
    if isinstance(f, Or):
        return _vec(f.left, env, size) | _vec(f.right, env, size)
    if isinstance(f, Implies):
        return ~_vec(f.antecedent, env, size) | _vec(f.consequent, env, size)
    premises = np.ones(size, dtype=bool)
    for p in f.premises:
        premises &= _vec(p, env, size)
    return ~premises | _vec(f.conclusion, env, size)


def is_tautology(f: Formula) -> bool:
    """Return True iff ``f`` is classically true under every assignment."""
    _, table = truth_table([f])
    return bool(table.all())


def equivalent(f: Formula, g: Formula) -> bool:
    """Return True iff ``f`` and ``g`` are classically equivalent."""
    _, table = truth_table([f, g])
    return bool((table[:, 0] == table[:, 1]).all())


# Four-valued semantics


class Truth4(Enum):
    """The four truth values of the d-model semantics.

    Attributes
    ----------
    T: true only.
    I: both true and false (a glut).
    N: neither true nor false (a gap).
    F: false only.
    """

    T = "t"
    I = "i"  # noqa: E741
    N = "n"
    F = "f"

    @property
    def designated(self) -> bool:
        """Whether the value counts as (at least) true."""
        return self in (Truth4.T, Truth4.I)


@dataclass(frozen=True, eq=False)
class DModel:
    """A finite model with a reversal map and a ternary accessibility relation.

    Parameters
    ----------
    worlds : tuple of str
        World identifiers.
    star : dict
        The reversal map; must be an involution.
    tern : frozenset of (str, str, str)
        Ternary accessibility relation used to evaluate implications.
    holds : dict
        Truth of each ``(atom name, world)`` pair.
    designated : str
        The world at which validity is judged.
    """

    worlds: tuple[str, ...]
    star: Mapping[str, str]
    tern: frozenset[tuple[str, str, str]]
    holds: Mapping[tuple[str, str], bool]
    designated: str
    vocabulary: frozenset[str] = field(init=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "worlds", tuple(self.worlds))
        object.__setattr__(self, "tern", frozenset(tuple(t) for t in self.tern))
        worlds = set(self.worlds)
        if not worlds or len(worlds) != len(self.worlds):
            raise InvalidModel("worlds must be non-empty and unique")
        if self.designated not in worlds:
            raise InvalidModel(f"designated world '{self.designated}' is not a world")
        if set(self.star) != worlds or not set(self.star.values()) <= worlds:
            raise InvalidModel("star must be a total map on the worlds")
        if any(self.star[self.star[w]] != w for w in worlds):
            raise InvalidModel("star must be an involution")
        if any(x not in worlds for t in self.tern for x in t):
            raise InvalidModel("tern must only relate worlds")
        vocabulary = frozenset(p for p, _ in self.holds)
        missing = [(p, w) for p in vocabulary for w in worlds if (p, w) not in self.holds]
        if missing or any(w not in worlds for _, w in self.holds):
            raise InvalidModel("holds must be defined for every (atom, world) pair")
        object.__setattr__(self, "vocabulary", vocabulary)

    @classmethod
    def from_json(cls, doc: Mapping[str, Any]) -> "DModel":
        """Build a model from its JSON document.

        The document has the keys ``worlds``, ``star``, ``tern``, ``holds``
        (keyed ``"atom@world"``) and ``designated``.
        """
        holds = {}
        for key, value in doc["holds"].items():
            atom, _, world = key.partition("@")
            holds[(atom, world)] = bool(value)
        return cls(
            worlds=tuple(doc["worlds"]),
            star=dict(doc["star"]),
            tern=frozenset(tuple(t) for t in doc["tern"]),
            holds=holds,
            designated=doc.get("designated", doc["worlds"][0]),
        )

    def to_json(self) -> dict[str, Any]:
        """Return the JSON document of the model."""
        return {
            "worlds": list(self.worlds),
            "star": dict(self.star),
            "tern": [list(t) for t in sorted(self.tern)],
            "holds": {f"{p}@{w}": b for (p, w), b in sorted(self.holds.items())},
            "designated": self.designated,
        }


def holds(m: DModel, w: str, f: Formula) -> bool:
    """Return whether ``f`` holds at world ``w`` of ``m``.

    Conjunction and disjunction are evaluated pointwise, ``~f`` holds at ``w``
    iff ``f`` fails at the reversal of ``w``, and ``f -> g`` holds at ``w`` iff
    for every triple ``(w, u, v)`` of the accessibility relation, ``f`` holding
    at ``u`` forces ``g`` to hold at ``v``.

    Parameters
    ----------
    m : DModel
        The model.
    w : str
        A world of the model.
    f : Formula
        A formula that is not a sequent.

    Raises
    ------
    UnknownWorld
        If ``w`` is not a world of ``m``.
    UnknownAtom
        If ``f`` contains an atom without valuation in ``m``.
    ValueError
        If ``f`` is a sequent.

    Returns
    -------
    bool
    """
    if w not in m.star:
        raise UnknownWorld(w)
    return _holds(m, w, f)


def _holds(m: DModel, w: str, f: Formula) -> bool:
    if isinstance(f, Atom):
        if (f.name, w) not in m.holds:
            raise UnknownAtom(f.name)
        return m.holds[(f.name, w)]
    if isinstance(f, Not):
        return not _holds(m, m.star[w], f.operand)
    if isinstance(f, And):
        return _holds(m, w, f.left) and _holds(m, w, f.right)
    if isinstance(f, Or):
        return _holds(m, w, f.left) or _holds(m, w, f.right)
    if isinstance(f, Implies):
        return all(
            not _holds(m, u, f.antecedent) or _holds(m, v, f.consequent)
            for (x, u, v) in m.tern
            if x == w
        )
    raise ValueError("Sequents have no value in a d-model")


def eval4(m: DModel, w: str, f: Formula) -> Truth4:
    """Return the four-valued truth value of ``f`` at world ``w``."""
    here = holds(m, w, f)
    dual = holds(m, m.star[w], f)
    if here and dual:
        return Truth4.T
    if here:
        return Truth4.I
    if dual:
        return Truth4.N
    return Truth4.F


def is_true(m: DModel, f: Formula) -> bool:
    """Return True iff ``f`` takes value t at the designated world."""
    return eval4(m, m.designated, f) is Truth4.T


def is_designated(m: DModel, f: Formula) -> bool:
    """Return True iff ``f`` takes value t or i at the designated world."""
    return eval4(m, m.designated, f).designated


def is_gap_free(m: DModel) -> bool:
    """Return True iff no atom takes value n at any world of ``m``."""
    return not any(
        not m.holds[(p, w)] and m.holds[(p, m.star[w])] for p in m.vocabulary for w in m.worlds
    )


def _involutions(points: tuple[str, ...]) -> Iterator[dict[str, str]]:
    if not points:
        yield {}
        return
    first, rest = points[0], points[1:]
    for rest_map in _involutions(rest):
        yield {first: first, **rest_map}
    for i, partner in enumerate(rest):
        remaining = rest[:i] + rest[i + 1 :]
        for rest_map in _involutions(remaining):
            yield {first: partner, partner: first, **rest_map}


def enumerate_dmodels(
    names: Iterable[Union[str, Atom]], max_worlds: int, gap_free: bool = False
) -> Iterator[DModel]:
    """Enumerate every d-model over ``names`` with up to ``max_worlds`` worlds.

    Models are generated by brute force (no isomorphism reduction) in a fixed
    order: number of worlds, reversal map, accessibility relation, valuation.
    Worlds are named ``w0``, ``w1``, ...; ``w0`` is designated.

    Parameters
    ----------
    names : iterable of str or Atom
        The vocabulary (at most 3 atoms).
    max_worlds : int
        Largest number of worlds (at most 3).
    gap_free : bool
        Only yield models in which no atom takes value n.

    Raises
    ------
    CapExceeded
        If the vocabulary or the number of worlds exceeds its cap.

    Yields
    ------
    DModel
    """
    vocabulary = sorted({n.name if isinstance(n, Atom) else n for n in names})
    if len(vocabulary) > 3 or max_worlds > 3:
        raise CapExceeded("d-model enumeration is capped at 3 atoms and 3 worlds")
    if max_worlds < 1:
        raise CapExceeded("max_worlds must be at least 1")
    for k in range(1, max_worlds + 1):
        worlds = tuple(f"w{i}" for i in range(k))
        triples = list(itertools.product(worlds, repeat=3))
        keys = [(p, w) for p in vocabulary for w in worlds]
        for star in _involutions(worlds):
            for mask in range(2 ** len(triples)):
                tern = frozenset(t for j, t in enumerate(triples) if mask >> j & 1)
                for values in itertools.product((False, True), repeat=len(keys)):
                    model = DModel(worlds, star, tern, dict(zip(keys, values)), worlds[0])
                    if gap_free and not is_gap_free(model):
                        continue
                    yield model
