"""Command-line interface."""

import argparse
import json
import sys
from collections.abc import Sequence
from pathlib import Path
from typing import Any, Optional, TextIO

from rich.console import Console
from rich.markup import escape

from . import __version__
from ._common import CapExceeded, IllegalMove, TerminalPlay, write_atomic
from ._config import SETTINGS, logger
from .ddg import (
    Ranks,
    Ruleset,
    apply_move,
    cross_check,
    dump_transcript,
    legal_moves,
    new_game,
    parse_move,
    replay_transcript,
    solve,
    terminal_winner,
    verify_strategy,
)
from .extensions import (
    Semantics,
    argumentation_tree,
    extensions,
    extensions_report,
    project_audience,
)
from .knowledge import vaf_to_json
from .logic import DModel, eval4, is_tautology, parse_formula, truth_table, unfold_sequent
from .netkit import (
    block_composition,
    block_correlation,
    betweenness,
    load_actor_tags,
    load_graph,
    partition_search,
    partition_to_json,
    reweight_edges,
    to_dot,
)
from .prioritizer import (
    histogram,
    histogram_hash,
    load_corpus,
    outcomes_to_json,
    prioritise,
    run_dialogues,
)

EXIT_USAGE = 2
EXIT_CAP = 3
EXIT_IO = 4

console = Console(highlight=False)
err_console = Console(stderr=True, highlight=False)


def _trace(args: argparse.Namespace, event: str, **data: Any) -> None:
    """Write one line of the machine-readable decision log to stderr."""
    if getattr(args, "trace", False):
        print(json.dumps({"event": event, **data}, sort_keys=True), file=sys.stderr)


def _emit(args: argparse.Namespace, name: str, text: str) -> None:
    """Write a result to ``--out`` or to stdout."""
    if args.out is None:
        sys.stdout.write(text)
        return
    path = write_atomic(Path(args.out) / name, text, force=args.force)
    console.print(f"wrote {path}")


def _ranks(text: Optional[str]) -> Ranks:
    return Ranks.parse(text) if text else Ranks(*SETTINGS["ranks"])


# Commands


def cmd_formula(args: argparse.Namespace) -> int:
    """Print the classical summary of a formula and, with a model, its values."""
    f = parse_formula(args.expr)
    names, table = truth_table([f])
    satisfying = int(table[:, 0].sum())
    console.print(f"formula: {f}")
    console.print(f"atoms: {', '.join(names) or '-'}")
    console.print(f"tautology: {str(is_tautology(f)).lower()}")
    console.print(f"satisfiable: {str(satisfying > 0).lower()}")
    console.print(f"models: {satisfying}/{len(table)}")
    if args.model:
        model = DModel.from_json(json.loads(Path(args.model).read_text(encoding="utf8")))
        for w in model.worlds:
            value = eval4(model, w, unfold_sequent(f))
            console.print(f"{w}: {value.value}")
            _trace(args, "eval4", world=w, value=value.value)
    return 0


def cmd_af(args: argparse.Namespace) -> int:
    """Compute the extensions of the action arguments of a corpus per audience."""
    vaf = load_corpus(args.corpus).framework(concede_filter=args.concede_filter)
    semantics = Semantics(args.semantics)
    if args.audience:
        audiences = [tuple(v.strip() for v in args.audience.split(">"))]
    else:
        audiences = list(vaf.audiences)
    reports = []
    for audience in audiences:
        af = project_audience(vaf, audience)
        report = extensions_report(semantics, audience, extensions(af, semantics))
        if args.tree:
            report["tree"] = argumentation_tree(af, args.tree)
        _trace(args, "defeats", audience=list(audience), defeats=sorted(af.defeats))
        reports.append(report)
    doc = {"framework": vaf_to_json(vaf), "reports": reports}
    _emit(args, f"extensions_{semantics.value}.json", json.dumps(doc, indent=2) + "\n")
    return 0


def _step(args: argparse.Namespace, stdin: TextIO) -> int:
    play = new_game(parse_formula(args.thesis), _ranks(args.ranks), Ruleset(args.ruleset))
    for line in play.transcript():
        console.print(line)
    while True:
        legal = sorted(legal_moves(play), key=lambda m: m.sort_key())
        if not legal:
            winner = terminal_winner(play)
            console.print(f"winner: {winner.value}")
            _trace(args, "terminal", winner=winner.value, transcript=dump_transcript(play))
            return 0
        console.print(f"{play.to_move.value} to move; legal moves:")
        for mv in legal:
            console.print(f"  {escape(str(mv))}")
        line = stdin.readline()
        if not line or line.strip() in ("quit", "q"):
            return 0
        try:
            mv = parse_move(line, play)
            play = apply_move(play, mv)
        except (IllegalMove, SyntaxError) as e:
            console.print(f"illegal: {escape(str(e))}")
            continue
        console.print(escape(play.transcript()[-1]))
        _trace(args, "move", position=len(play.moves) - 1, move=str(mv))


def cmd_ddg(args: argparse.Namespace, stdin: Optional[TextIO] = None) -> int:
    """Solve, replay or interactively step through a dialogue."""
    if args.mode == "replay":
        if not args.transcript:
            raise ValueError("replay needs --transcript")
        doc = json.loads(Path(args.transcript).read_text(encoding="utf8"))
        play = replay_transcript(doc)
        for line in play.transcript():
            console.print(escape(line))
        console.print("valid: true")
        if legal_moves(play):
            console.print("terminal: false")
        else:
            console.print(f"winner: {terminal_winner(play).value}")
        return 0
    if args.thesis is None:
        raise ValueError(f"{args.mode} needs a thesis")
    if args.mode == "step":
        return _step(args, stdin or sys.stdin)

    thesis = parse_formula(args.thesis)
    ranks = _ranks(args.ranks)
    ruleset = Ruleset(args.ruleset)
    result = solve(thesis, ranks, ruleset)
    console.print(f"winner: {result.winner.value}")
    console.print(f"explored: {result.explored_nodes}")
    if args.strategy:
        console.print(f"strategy: {len(result.strategy)} positions")
        _emit(args, "strategy.json", json.dumps(result.strategy.to_json(), indent=2) + "\n")
    if args.model:
        model = DModel.from_json(json.loads(Path(args.model).read_text(encoding="utf8")))
        value = cross_check(new_game(thesis, ranks, ruleset), model)
        console.print(f"model value: {value.value}")
    if args.verify:
        verified = verify_strategy(result, thesis, ranks, ruleset)
        console.print(f"verified: {str(verified).lower()}")
    _trace(
        args,
        "solve",
        thesis=str(thesis),
        winner=result.winner.value,
        explored_nodes=result.explored_nodes,
    )
    return 0


def cmd_prioritize(args: argparse.Namespace) -> int:
    """Run a batch of dialogues and write the histogram and the order."""
    corpus = load_corpus(args.corpus, seed=args.seed)
    semantics = Semantics(args.semantics)
    outcomes = run_dialogues(corpus, semantics, args.n, seed=args.seed)
    hist = histogram(outcomes)
    order = prioritise(hist)
    for o in outcomes_to_json(outcomes):
        _trace(args, "outcome", **o)
    if args.out is None:
        # stdout carries only the CSV
        sys.stdout.write(hist.to_csv())
        sys.stderr.write(order.to_json() + "\n")
        return 0
    _emit(args, f"histogram_{semantics.value}.csv", hist.to_csv())
    _emit(args, f"order_{semantics.value}.json", order.to_json() + "\n")
    console.print(f"hash: {histogram_hash(hist)}")
    for rank, tag in enumerate(order.tags, start=1):
        console.print(f"{rank}. {escape(tag)}")
    return 0


def cmd_net(args: argparse.Namespace) -> int:
    """Run a network analysis."""
    g = load_graph(args.nodes, args.edges)
    if args.actor_tags:
        g = reweight_edges(g, args.accepted, load_actor_tags(args.actor_tags))
    if args.action == "betweenness":
        scores = betweenness(g, weighted=args.weighted)
        _emit(args, "betweenness.csv", scores.rename_axis("id").to_csv(lineterminator="\n"))
        return 0

    if args.seed is None:
        raise ValueError(f"'{args.action}' is stochastic and needs --seed")
    b_max = args.bmax if args.bmax is not None else len(g.ids)
    best, samples = partition_search(
        g, args.bmin, b_max, args.sweeps, seed=args.seed, description_length=args.dl
    )
    _trace(args, "partition", B=best.B, entropy=best.entropy, samples=len(samples))
    if args.action == "blocks":
        if args.format == "dot":
            _emit(args, "blocks.dot", to_dot(g, best))
        elif args.format == "csv":
            table = block_composition(g, best, by=args.by)
            _emit(args, "composition.csv", table.to_csv(lineterminator="\n"))
        else:
            _emit(args, "partition.json", json.dumps(partition_to_json(best), indent=2) + "\n")
        return 0
    matrix = block_correlation(samples, best)
    _emit(args, "correlation.csv", matrix.to_csv(index_label="block", lineterminator="\n"))
    return 0


# Parser


def build_parser() -> argparse.ArgumentParser:
    """Return the argument parser of the ``dialectica`` command."""
    parser = argparse.ArgumentParser(
        prog="dialectica", description="Argumentation, dialogue games and actor networks."
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--trace", action="store_true", help="emit a JSON-lines decision log on stderr"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def outputs(p: argparse.ArgumentParser) -> None:
        p.add_argument("--out", metavar="DIR", help="write results to DIR instead of stdout")
        p.add_argument("--force", action="store_true", help="overwrite existing output files")

    p = sub.add_parser("formula", help="classical summary and four-valued evaluation")
    p.add_argument("expr")
    p.add_argument("--model", metavar="PATH", help="d-model JSON file")
    p.set_defaults(func=cmd_formula)

    p = sub.add_parser("af", help="extensions of a corpus")
    p.add_argument("corpus")
    p.add_argument("--audience", help="value ranking, e.g. 'y > w'")
    p.add_argument("--semantics", choices=[s.value for s in Semantics], default="preferred")
    p.add_argument(
        "--concede-filter",
        action="store_true",
        help="drop attacks on arguments whose support already entails the claim",
    )
    p.add_argument("--tree", metavar="ARG", help="include the argumentation tree rooted at ARG")
    p.add_argument("--format", choices=["json"], default="json")
    outputs(p)
    p.set_defaults(func=cmd_af)

    p = sub.add_parser("ddg", help="dialectical dialogue games")
    p.add_argument("thesis", nargs="?")
    p.add_argument("--ranks", metavar="R1,R2", help="opponent and proponent ranks")
    p.add_argument("--ruleset", choices=[r.value for r in Ruleset], default="classical")
    p.add_argument("--mode", choices=["solve", "step", "replay"], default="solve")
    p.add_argument("--transcript", metavar="PATH", help="transcript JSON to replay")
    p.add_argument("--model", metavar="PATH", help="d-model JSON for a semantic cross-check")
    p.add_argument("--strategy", action="store_true", help="write the winning strategy")
    p.add_argument("--verify", action="store_true", help="replay the strategy exhaustively")
    p.add_argument("--format", choices=["json"], default="json")
    outputs(p)
    p.set_defaults(func=cmd_ddg)

    p = sub.add_parser("prioritize", help="prioritisation orders over dialogue batches")
    p.add_argument("corpus")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("-n", type=int, default=100, help="number of outcomes")
    p.add_argument("--semantics", choices=[s.value for s in Semantics], default="grounded")
    p.add_argument("--format", choices=["csv"], default="csv")
    outputs(p)
    p.set_defaults(func=cmd_prioritize)

    p = sub.add_parser("net", help="actor network analysis")
    p.add_argument("nodes")
    p.add_argument("edges")
    p.add_argument("--action", choices=["betweenness", "blocks", "correlate"], required=True)
    p.add_argument("--seed", type=int)
    p.add_argument("--weighted", action="store_true", help="use weights as distances")
    p.add_argument("--bmin", type=int, default=1)
    p.add_argument("--bmax", type=int)
    p.add_argument("--sweeps", type=int, default=SETTINGS["sweeps"])
    p.add_argument("--dl", action="store_true", help="add the model description length")
    p.add_argument("--by", choices=["typology", "municipality"], default="typology")
    p.add_argument("--actor-tags", metavar="PATH", help="CSV actor,tag for edge reweighting")
    p.add_argument("--accepted", nargs="*", default=[], help="accepted action tags")
    p.add_argument("--format", choices=["json", "csv", "dot"], default="json")
    outputs(p)
    p.set_defaults(func=cmd_net)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the command line and return its exit code.

    Exit codes are 0 on success, 2 on usage, parse and validation errors,
    3 when a resource cap is exceeded and 4 on I/O errors.
    """
    args = build_parser().parse_args(argv)
    try:
        return int(args.func(args))
    except CapExceeded as e:
        err_console.print(f"[red]cap exceeded:[/red] {escape(str(e))}")
        return EXIT_CAP
    except (SyntaxError, KeyError, ValueError, TerminalPlay) as e:
        err_console.print(f"[red]error:[/red] {escape(str(e))}")
        return EXIT_USAGE
    except OSError as e:
        logger.error("I/O error: %s", e)
        err_console.print(f"[red]I/O error:[/red] {escape(str(e))}")
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
