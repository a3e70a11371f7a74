"""Two-player dialectical dialogical games: rules, plays and solving."""

import hashlib
import json
import re
from collections.abc import Mapping
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import Any, Optional, Union

from ._common import (
    CapExceeded,
    FormulaSyntaxError,
    IllegalMove,
    JSONCache,
    NotTerminal,
    TerminalPlay,
)
from ._config import DATA_DIR, MAX_PLIES, MAXAGE, MOVE_ORDER, NOCACHE, NOSTORE, logger
from .logic import (
    And,
    Atom,
    DModel,
    Formula,
    Implies,
    Not,
    Or,
    Sequent,
    Truth4,
    atoms,
    conjoin,
    depth,
    eval4,
    parse_formula,
    unfold_sequent,
)

MAX_ATOMS = 6
MAX_DEPTH = 5
MAX_RANK = 3


class Player(Enum):
    """The two parties of a dialogue.

    Attributes
    ----------
    P: The proponent, who asserts the thesis.
    O: The opponent.
    """

    P = "P"
    O = "O"  # noqa: E741

    @property
    def other(self) -> "Player":
        """The other player."""
        return Player.O if self is Player.P else Player.P


class Force(Enum):
    """Whether a move attacks, defends or opens the dialogue."""

    ATTACK = "A"
    DEFENCE = "D"
    STARTER = "S"


class Kind(Enum):
    """What a move does.

    Attributes
    ----------
    ASSERT: Assert a formula (``!``).
    AND_LEFT: Request the left conjunct (``?andL``).
    AND_RIGHT: Request the right conjunct (``?andR``).
    OR: Request a disjunct (``?or``).
    PREMISES: Attack a sequent by asserting the conjunction of its premises (``!!``).
    RANK: Declare a rank in the dialogue starter.
    """

    ASSERT = "assert"
    AND_LEFT = "andL"
    AND_RIGHT = "andR"
    OR = "or"
    PREMISES = "premises"
    RANK = "rank"


class Ruleset(Enum):
    """The two rule sets of the game.

    Attributes
    ----------
    CLASSICAL: The proponent may only assert atoms the opponent asserted.
    DIALETHEIC: Conjunct immunity protects answers to conjunct requests, and
        the proponent may defend with atoms freely.
    """

    CLASSICAL = "classical"
    DIALETHEIC = "dialetheic"


@dataclass(frozen=True)
class Ranks:
    """Per-player bound on moves against the same target."""

    opponent: int
    proponent: int

    def __post_init__(self) -> None:
        if self.opponent < 1 or self.proponent < 1:
            raise ValueError(f"Ranks must be positive, got {self.opponent}, {self.proponent}")

    def of(self, player: Player) -> int:
        """Return the rank of ``player``."""
        return self.proponent if player is Player.P else self.opponent

    @classmethod
    def parse(cls, text: str) -> "Ranks":
        """Parse ranks written as ``r1,r2`` (opponent first)."""
        try:
            r1, r2 = (int(x) for x in text.split(","))
        except ValueError:
            raise ValueError(f"Invalid ranks '{text}'; expected 'r1,r2'") from None
        return cls(r1, r2)


@dataclass(frozen=True)
class Move:
    """A single move of a dialogue.

    Parameters
    ----------
    player : Player
        Who moves.
    force : Force
        Attack, defence or starter.
    kind : Kind
        The type of move.
    content : Formula, optional
        The asserted formula.
    target : int, optional
        Position of the move this move responds to.
    rank : int, optional
        The declared rank of a rank declaration.
    """

    player: Player
    force: Force
    kind: Kind
    content: Optional[Formula] = None
    target: Optional[int] = None
    rank: Optional[int] = None

    def __str__(self) -> str:
        p = self.player.value
        if self.kind is Kind.RANK:
            return f"{p} {'n' if self.player is Player.O else 'm'}:={self.rank}"
        if self.force is Force.STARTER:
            return f"{p} !{self.content}"
        prefix = "A:" if self.force is Force.ATTACK else "D:"
        if self.kind is Kind.ASSERT:
            body = f"!{self.content}"
        elif self.kind is Kind.PREMISES:
            body = f"!!{self.content if self.content is not None else ''}"
        else:
            body = f"?{self.kind.value}"
        return f"{p} {prefix}{body}@{self.target}"

    @property
    def is_assertion(self) -> bool:
        """Whether the move asserts a formula that can be attacked."""
        return self.kind in (Kind.ASSERT, Kind.PREMISES) and self.content is not None

    def sort_key(self) -> tuple[str, str, str, int]:
        """Key of the deterministic move order used by the solver."""
        content = str(self.content) if self.content is not None else ""
        target = self.target if self.target is not None else -1
        return (self.force.value, self.kind.value, content, target)


Signature = tuple[Any, ...]


def _signature(move: Move, sigs: tuple[Signature, ...]) -> Signature:
    target = sigs[move.target] if move.target is not None else None
    content = str(move.content) if move.content is not None else ""
    return (move.player.value, move.force.value, move.kind.value, content, move.rank, target)


@dataclass(frozen=True, eq=False)
class Play:
    """The state of a dialogue.

    Positions 0 to 2 hold the dialogue starter: the proponent's thesis and
    the two rank declarations. Afterwards the players alternate, starting
    with the opponent.
    """

    thesis: Formula
    ranks: Ranks
    ruleset: Ruleset
    moves: tuple[Move, ...]
    move_order: str = "per-target"
    signatures: tuple[Signature, ...] = field(default=(), repr=False)

    def __post_init__(self) -> None:
        if len(self.signatures) != len(self.moves):
            sigs: tuple[Signature, ...] = ()
            for mv in self.moves:
                sigs = (*sigs, _signature(mv, sigs))
            object.__setattr__(self, "signatures", sigs)

    @property
    def to_move(self) -> Player:
        """The player to move next."""
        return Player.O if len(self.moves) % 2 == 1 else Player.P

    @property
    def state_key(self) -> tuple[frozenset[Signature], Player]:
        """Key identifying the play up to the order of independent moves."""
        return frozenset(self.signatures), self.to_move

    def canonical(self) -> list[str]:
        """Return the canonical transcript: the moves' signatures, sorted."""
        return sorted(repr(s) for s in self.signatures)

    def transcript(self) -> list[str]:
        """Return the moves in notation, one per position."""
        return [f"({i}) {mv}" for i, mv in enumerate(self.moves)]


def new_game(
    thesis: Formula,
    ranks: Ranks,
    ruleset: Ruleset = Ruleset.CLASSICAL,
    move_order: str = MOVE_ORDER,
) -> Play:
    """Open a dialogue on ``thesis``.

    Parameters
    ----------
    thesis : Formula
        The proponent's thesis.
    ranks : Ranks
        The ranks of both players.
    ruleset : Ruleset
        Classical or dialetheic rules.
    move_order : str
        ``per-target`` bounds the moves against the same target by the rank;
        ``global`` bounds all attacks and defences of a player by the rank.

    Returns
    -------
    Play
        The play after the dialogue starter; the opponent moves next.
    """
    if move_order not in ("per-target", "global"):
        raise ValueError(f"Invalid move order '{move_order}'")
    starter = (
        Move(Player.P, Force.STARTER, Kind.ASSERT, thesis),
        Move(Player.O, Force.STARTER, Kind.RANK, rank=ranks.opponent),
        Move(Player.P, Force.STARTER, Kind.RANK, rank=ranks.proponent),
    )
    return Play(thesis, ranks, ruleset, starter, move_order)


def _attacks_on(play: Play, pos: int, player: Player) -> list[Move]:
    content = play.moves[pos].content
    if isinstance(content, Not):
        return [Move(player, Force.ATTACK, Kind.ASSERT, content.operand, pos)]
    if isinstance(content, And):
        return [
            Move(player, Force.ATTACK, Kind.AND_LEFT, None, pos),
            Move(player, Force.ATTACK, Kind.AND_RIGHT, None, pos),
        ]
    if isinstance(content, Or):
        return [Move(player, Force.ATTACK, Kind.OR, None, pos)]
    if isinstance(content, Implies):
        return [Move(player, Force.ATTACK, Kind.ASSERT, content.antecedent, pos)]
    if isinstance(content, Sequent):
        premises = conjoin(content.premises) if content.premises else None
        return [Move(player, Force.ATTACK, Kind.PREMISES, premises, pos)]
    return []


def _defences_against(play: Play, pos: int, player: Player) -> list[Move]:
    attack = play.moves[pos]
    content = play.moves[attack.target].content  # type: ignore[index]
    answers: list[Formula] = []
    if attack.kind is Kind.AND_LEFT and isinstance(content, And):
        answers = [content.left]
    elif attack.kind is Kind.AND_RIGHT and isinstance(content, And):
        answers = [content.right]
    elif attack.kind is Kind.OR and isinstance(content, Or):
        answers = [content.left, content.right]
    elif attack.kind is Kind.ASSERT and isinstance(content, Implies):
        answers = [content.consequent]
    elif attack.kind is Kind.PREMISES and isinstance(content, Sequent):
        answers = [content.conclusion]
    return [Move(player, Force.DEFENCE, Kind.ASSERT, a, pos) for a in answers]


def _candidates(play: Play) -> list[Move]:
    """Moves of the player to move allowed by the local rules alone."""
    player = play.to_move
    result = []
    for pos, mv in enumerate(play.moves):
        if mv.player is player:
            continue
        if mv.is_assertion:
            result.extend(_attacks_on(play, pos, player))
        attacked = play.moves[mv.target] if mv.target is not None else None
        if mv.force is Force.ATTACK and attacked is not None and attacked.player is player:
            result.extend(_defences_against(play, pos, player))
    return result


def _violation(play: Play, mv: Move) -> Optional[str]:
    """Return the global rule ``mv`` violates, if any."""
    own = [m for m in play.moves if m.player is mv.player and m.force is not Force.STARTER]
    rank = play.ranks.of(mv.player)
    # G1: move order
    if play.move_order == "global":
        if len(own) >= rank:
            return "G1"
    elif sum(1 for m in own if m.target == mv.target) >= rank:
        return "G1"
    # G2: classical attack
    # Dialetheic rules leave P's atomic defences unrestricted; the thesis a & ~a
    # is won only because P may defend the atom a before O concedes it.
    if mv.player is Player.P and mv.kind is Kind.ASSERT and isinstance(mv.content, Atom):
        if mv.force is Force.ATTACK or play.ruleset is Ruleset.CLASSICAL:
            conceded = any(
                m.player is Player.O
                and m.kind in (Kind.ASSERT, Kind.PREMISES)
                and m.content == mv.content
                for m in play.moves
            )
            if not conceded:
                return "G2"
    # G3: repetition
    if any(
        (m.force, m.kind, m.content, m.target) == (mv.force, mv.kind, mv.content, mv.target)
        for m in own
    ):
        return "G3"
    # G4: conjunct immunity
    if (
        play.ruleset is Ruleset.DIALETHEIC
        and mv.player is Player.O
        and mv.force is Force.ATTACK
        and mv.kind is Kind.ASSERT
    ):
        answer = play.moves[mv.target]  # type: ignore[index]
        if answer.force is Force.DEFENCE:
            request = play.moves[answer.target]  # type: ignore[index]
            if request.player is Player.O and request.kind in (Kind.AND_LEFT, Kind.AND_RIGHT):
                conj = play.moves[request.target].content  # type: ignore[index]
                if isinstance(conj, And):
                    other = conj.right if request.kind is Kind.AND_LEFT else conj.left
                    if mv.content == other:
                        return "G4"
    return None


def legal_moves(play: Play) -> frozenset[Move]:
    """Return the legal moves of the player to move.

    A play without legal moves is terminal.

    Parameters
    ----------
    play : Play
        The current play.

    Returns
    -------
    frozenset of Move
    """
    return frozenset(mv for mv in _candidates(play) if _violation(play, mv) is None)


def _extend(play: Play, mv: Move) -> Play:
    return replace(
        play,
        moves=(*play.moves, mv),
        signatures=(*play.signatures, _signature(mv, play.signatures)),
    )


def apply_move(play: Play, mv: Move) -> Play:
    """Play ``mv``.

    Parameters
    ----------
    play : Play
        The current play.
    mv : Move
        The move to make.

    Raises
    ------
    TerminalPlay
        If the play has no legal moves left.
    IllegalMove
        If ``mv`` breaks a rule; the error carries the rule id (``L`` for the
        local rules and turn order, ``G1`` to ``G4`` for the global rules).

    Returns
    -------
    Play
        A new play with ``mv`` appended.
    """
    legal = legal_moves(play)
    if not legal:
        raise TerminalPlay("the dialogue is over")
    if mv in legal:
        logger.debug("(%d) %s", len(play.moves), mv)
        return _extend(play, mv)
    if mv.player is not play.to_move:
        raise IllegalMove("L", f"it is {play.to_move.value}'s turn")
    if mv.target is None or not 0 <= mv.target < len(play.moves):
        raise IllegalMove("L", f"{mv} does not reference an earlier position")
    if mv not in _candidates(play):
        raise IllegalMove("L", f"{mv} is not an attack or defence of position {mv.target}")
    rule = _violation(play, mv)
    raise IllegalMove(rule or "L", f"{mv} is not allowed")


def _winner(play: Play) -> Player:
    if isinstance(play.thesis, Atom):
        # the opponent never conceded the atom
        return Player.O
    return play.moves[-1].player


def terminal_winner(play: Play) -> Player:
    """Return the winner of a finished play.

    The player who made the last move wins: the other player has no move
    left. A bare atomic thesis is lost by the proponent, who may not assert
    an atom the opponent never conceded.

    Raises
    ------
    NotTerminal
        If legal moves remain.
    """
    if legal_moves(play):
        raise NotTerminal("the dialogue still has legal moves")
    return _winner(play)


Template = tuple[Force, Kind, Optional[Formula], Optional[Signature], Optional[int]]
StateKey = tuple[frozenset[Signature], Player]


@dataclass(frozen=True, eq=False)
class Strategy:
    """A winning strategy: the move to make in every reachable play.

    Plays are identified by their canonical transcript, so transpositions
    of the same moves share one entry.
    """

    player: Player
    table: Mapping[StateKey, Template]

    def __len__(self) -> int:
        return len(self.table)

    def __contains__(self, play: object) -> bool:
        return isinstance(play, Play) and play.state_key in self.table

    def move_for(self, play: Play) -> Move:
        """Return the strategy's move in ``play``.

        Raises
        ------
        KeyError
            If the strategy does not cover ``play``.
        """
        return _resolve(play, self.table[play.state_key])

    def to_json(self) -> list[dict[str, Any]]:
        """Return the strategy as a list of transcript/move entries."""
        entries = []
        for (sigs, _), (force, kind, content, _target, rank) in self.table.items():
            entries.append(
                {
                    "transcript": sorted(repr(s) for s in sigs),
                    "force": force.value,
                    "kind": kind.value,
                    "content": str(content) if content is not None else None,
                    "rank": rank,
                }
            )
        return sorted(entries, key=lambda e: (len(e["transcript"]), e["transcript"]))


def _template(play: Play, mv: Move) -> Template:
    target = play.signatures[mv.target] if mv.target is not None else None
    return (mv.force, mv.kind, mv.content, target, mv.rank)


def _resolve(play: Play, template: Template) -> Move:
    force, kind, content, target_sig, rank = template
    target = play.signatures.index(target_sig) if target_sig is not None else None
    return Move(play.to_move, force, kind, content, target, rank)


@dataclass(frozen=True)
class GameResult:
    """The outcome of solving a game.

    Parameters
    ----------
    winner : Player
        The player with a winning strategy.
    strategy : Strategy
        A winning strategy for ``winner``.
    explored_nodes : int
        Number of distinct positions evaluated.
    """

    winner: Player
    strategy: Strategy
    explored_nodes: int


class _Solver:
    def __init__(self, max_plies: int):
        self.max_plies = max_plies
        self.memo: dict[StateKey, tuple[Player, Optional[Template]]] = {}

    def value(self, play: Play) -> Player:
        key = play.state_key
        hit = self.memo.get(key)
        if hit is not None:
            return hit[0]
        if len(play.moves) > self.max_plies:
            raise CapExceeded(f"dialogue exceeds {self.max_plies} plies")
        mover = play.to_move
        moves = sorted(legal_moves(play), key=Move.sort_key)
        if not moves:
            winner = _winner(play)
            self.memo[key] = (winner, None)
            return winner
        for mv in moves:
            if self.value(_extend(play, mv)) is mover:
                self.memo[key] = (mover, _template(play, mv))
                return mover
        self.memo[key] = (mover.other, None)
        return mover.other

    def strategy(self, root: Play, winner: Player) -> Strategy:
        table: dict[StateKey, Template] = {}
        seen: set[StateKey] = set()
        stack = [root]
        while stack:
            play = stack.pop()
            key = play.state_key
            if key in seen:
                continue
            seen.add(key)
            _, template = self.memo[key]
            if template is not None and play.to_move is winner:
                table[key] = template
                stack.append(_extend(play, _resolve(play, template)))
            elif play.to_move is not winner:
                stack.extend(_extend(play, mv) for mv in legal_moves(play))
        return Strategy(winner, table)


def _check_caps(thesis: Formula, ranks: Ranks) -> None:
    if len(atoms(thesis)) > MAX_ATOMS:
        raise CapExceeded(f"thesis has more than {MAX_ATOMS} atoms")
    if depth(thesis) > MAX_DEPTH:
        raise CapExceeded(f"thesis is deeper than {MAX_DEPTH}")
    if max(ranks.opponent, ranks.proponent) > MAX_RANK:
        raise CapExceeded(f"ranks are capped at {MAX_RANK}")


def solve(
    thesis: Formula,
    ranks: Ranks,
    ruleset: Ruleset = Ruleset.CLASSICAL,
    max_plies: int = MAX_PLIES,
    move_order: str = MOVE_ORDER,
) -> GameResult:
    """Solve a dialogue by backward induction.

    Positions are explored depth-first; moves are tried in a fixed
    lexicographic order and the first winning move is kept, so the result is
    a pure function of the arguments.

    Parameters
    ----------
    thesis : Formula
        The proponent's thesis.
    ranks : Ranks
        The ranks of both players.
    ruleset : Ruleset
        Classical or dialetheic rules.
    max_plies : int
        Depth bound of the game tree.
    move_order : str
        ``per-target`` or ``global`` rank budget.

    Raises
    ------
    CapExceeded
        If the thesis has more than 6 atoms or depth above 5, a rank exceeds
        3, or a play grows beyond ``max_plies``.

    Returns
    -------
    GameResult
    """
    _check_caps(thesis, ranks)
    root = new_game(thesis, ranks, ruleset, move_order)
    solver = _Solver(max_plies)
    winner = solver.value(root)
    logger.debug(
        "Solved %s (%s, ranks %d/%d): %s wins after %d positions",
        thesis,
        ruleset.value,
        ranks.opponent,
        ranks.proponent,
        winner.value,
        len(solver.memo),
    )
    return GameResult(winner, solver.strategy(root, winner), len(solver.memo))


def verify_strategy(
    result: GameResult,
    thesis: Formula,
    ranks: Ranks,
    ruleset: Ruleset,
    move_order: str = MOVE_ORDER,
) -> bool:
    """Check that the strategy of ``result`` wins against every counter-line."""
    seen: set[StateKey] = set()
    stack = [new_game(thesis, ranks, ruleset, move_order)]
    while stack:
        play = stack.pop()
        if play.state_key in seen:
            continue
        seen.add(play.state_key)
        legal = legal_moves(play)
        if not legal:
            if _winner(play) is not result.winner:
                return False
        elif play.to_move is result.winner:
            if play not in result.strategy:
                return False
            mv = result.strategy.move_for(play)
            if mv not in legal:
                return False
            stack.append(_extend(play, mv))
        else:
            stack.extend(_extend(play, mv) for mv in legal)
    return True


def cross_check(play: Play, model: DModel) -> Truth4:
    """Evaluate the thesis of ``play`` at the designated world of ``model``.

    A sequent thesis is evaluated as the implication from its conjoined
    premises to its conclusion.
    """
    return eval4(model, model.designated, unfold_sequent(play.thesis))


class SolutionCache(JSONCache):
    """Cache of solved dialogue winners.

    Parameters
    ----------
    no_cache : bool
        If True, will not use cached solutions.
    no_store : bool
        If True, will not store solutions.
    data_dir : Path
        Path to directory where solutions will be cached.
    max_age : int, optional
        The max. age in days of a cached solution.
    """

    def __init__(
        self,
        no_cache: bool = NOCACHE,
        no_store: bool = NOSTORE,
        data_dir: Path = DATA_DIR / "ddg",
        max_age: Optional[int] = MAXAGE,
    ):
        """Initialize a new solution cache."""
        super().__init__(data_dir=data_dir, no_cache=no_cache, no_store=no_store, max_age=max_age)

    @staticmethod
    def key(thesis: Formula, ranks: Ranks, ruleset: Ruleset, move_order: str) -> str:
        """Return the cache key of a game."""
        spec = f"{thesis}|{ranks.opponent},{ranks.proponent}|{ruleset.value}|{move_order}"
        return hashlib.sha256(spec.encode("utf8")).hexdigest()[:24]

    def winner(
        self,
        thesis: Formula,
        ranks: Ranks,
        ruleset: Ruleset = Ruleset.DIALETHEIC,
        move_order: str = MOVE_ORDER,
    ) -> Player:
        """Return the winner of a game, solving it only on a cache miss."""
        key = self.key(thesis, ranks, ruleset, move_order)
        doc = self.get(key)
        if doc is not None:
            return Player(doc["winner"])
        result = solve(thesis, ranks, ruleset, move_order=move_order)
        self.put(
            key,
            {
                "thesis": str(thesis),
                "ranks": [ranks.opponent, ranks.proponent],
                "ruleset": ruleset.value,
                "move_order": move_order,
                "winner": result.winner.value,
                "explored_nodes": result.explored_nodes,
            },
        )
        return result.winner


# Transcripts

_MOVE_RE = re.compile(
    r"^\s*(?P<player>[PO])\s+(?:(?P<force>[AD]):)?(?P<body>[!?].*?)@(?P<target>\d+)\s*$"
)
_REQUESTS = {
    "andL": Kind.AND_LEFT,
    "L": Kind.AND_LEFT,
    "andR": Kind.AND_RIGHT,
    "R": Kind.AND_RIGHT,
    "or": Kind.OR,
}


def parse_move(text: str, play: Play) -> Move:
    """Parse a move written in step-mode notation.

    Examples are ``O !a@2``, ``P ?andR@1`` (``?R`` and ``?L`` are aliases),
    ``O ?or@0`` and ``O !!a & b@0`` for asserting the premises of a sequent.
    Attack and defence are inferred from ``play``; an ``A:`` or ``D:`` prefix
    after the player settles ambiguous assertions.

    Raises
    ------
    FormulaSyntaxError
        If the move or its content cannot be parsed.
    IllegalMove
        If the assertion is neither an attack nor a defence at its target.
    """
    m = _MOVE_RE.match(text)
    if m is None:
        raise FormulaSyntaxError(f"cannot parse move '{text.strip()}'", 0)
    player = Player(m.group("player"))
    body = m.group("body").strip()
    target = int(m.group("target"))
    if body.startswith("?"):
        kind = _REQUESTS.get(body[1:].strip())
        if kind is None:
            raise FormulaSyntaxError(f"unknown request '{body}'", 0)
        return Move(player, Force.ATTACK, kind, None, target)
    if body.startswith("!!"):
        content = parse_formula(body[2:]) if body[2:].strip() else None
        return Move(player, Force.ATTACK, Kind.PREMISES, content, target)
    content = parse_formula(body[1:])
    if m.group("force"):
        force = Force(m.group("force"))
        return Move(player, force, Kind.ASSERT, content, target)
    options = [
        Move(player, force, Kind.ASSERT, content, target)
        for force in (Force.ATTACK, Force.DEFENCE)
    ]
    structural = _candidates(play) if player is play.to_move else []
    matching = [mv for mv in options if mv in structural]
    if len(matching) > 1:
        raise IllegalMove("L", f"'{text.strip()}' is ambiguous; prefix the body with A: or D:")
    return matching[0] if matching else options[0]


def move_to_json(mv: Move) -> dict[str, Any]:
    """Return the transcript entry of a move."""
    return {
        "player": mv.player.value,
        "force": mv.force.value,
        "kind": mv.kind.value,
        "content": str(mv.content) if mv.content is not None else None,
        "target": mv.target,
    }


def move_from_json(doc: Mapping[str, Any]) -> Move:
    """Build a move from its transcript entry."""
    content = doc.get("content")
    return Move(
        Player(doc["player"]),
        Force(doc["force"]),
        Kind(doc["kind"]),
        parse_formula(content) if content else None,
        doc.get("target"),
    )


def dump_transcript(play: Play) -> dict[str, Any]:
    """Return the JSON transcript of a play (the starter is implied)."""
    return {
        "thesis": str(play.thesis),
        "ranks": [play.ranks.opponent, play.ranks.proponent],
        "ruleset": play.ruleset.value,
        "moves": [move_to_json(mv) for mv in play.moves[3:]],
    }


def replay_transcript(doc: Union[str, Mapping[str, Any]]) -> Play:
    """Replay a JSON transcript move by move.

    Raises
    ------
    IllegalMove
        If a move of the transcript breaks a rule.
    """
    if isinstance(doc, str):
        doc = json.loads(doc)
    play = new_game(
        parse_formula(doc["thesis"]),
        Ranks(*doc.get("ranks", (1, 2))),
        Ruleset(doc.get("ruleset", "classical")),
    )
    for entry in doc["moves"]:
        play = apply_move(play, move_from_json(entry))
    return play
