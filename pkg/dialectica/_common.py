"""Errors, seeding, caching and I/O helpers shared by all modules."""

import json
import os
import re
import tempfile
from datetime import datetime, timedelta, timezone
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np
import pandas as pd

from ._config import DATA_DIR, MAXAGE, logger

# Parsing


class FormulaSyntaxError(SyntaxError):
    """A formula could not be parsed.

    Parameters
    ----------
    msg : str
        What went wrong.
    offset : int
        Byte offset in the input text where parsing failed.
    """

    def __init__(self, msg: str, offset: int):
        super().__init__(f"{msg} (at offset {offset})")
        self.offset = offset


class CorpusSyntaxError(SyntaxError):
    """A corpus line could not be parsed."""

    def __init__(self, msg: str, lineno: int):
        super().__init__(f"line {lineno}: {msg}")
        self.lineno = lineno


# Lookups


class MissingAtom(KeyError):
    """An assignment does not cover an atom of the formula."""


class UnknownAtom(KeyError):
    """A model has no valuation for an atom."""


class UnknownWorld(KeyError):
    """A world is not part of the model."""


class UnknownArgument(KeyError):
    """An argument id is not part of the framework."""


class UnknownAudience(KeyError):
    """An audience is not one of the framework's audiences."""


class UnknownNode(KeyError):
    """An edge references a node that was not declared."""


# Resource caps


class CapExceeded(ValueError):
    """A computation would exceed one of the documented resource caps."""


class TooManyAtoms(CapExceeded):
    """A truth table would range over too many atoms."""


# Validation


class InvalidModel(ValueError):
    """A d-model violates one of its structural invariants."""


class DuplicateTag(ValueError):
    """An action tag is used more than once in a corpus."""


class DuplicateId(ValueError):
    """A node id is declared more than once."""


class BadWeight(ValueError):
    """An edge weight is not a finite positive number."""


class PartialValMap(ValueError):
    """The value map does not cover every argument."""


class NotTotalOrder(ValueError):
    """An audience is not a strict total order on the values."""


class EmptyValues(ValueError):
    """A value-based framework needs at least one value."""


class EmptyCorpus(ValueError):
    """A corpus declares no actions."""


class MixedCorpora(ValueError):
    """Outcomes from different corpora cannot be aggregated."""


class PartialPartition(ValueError):
    """A partition does not cover every node of the graph."""


class BadRange(ValueError):
    """A block count range is empty or invalid."""


class EmptySamples(ValueError):
    """There are no partition samples to aggregate."""


class IllegalMove(ValueError):
    """A move violates a rule of the dialogue.

    Parameters
    ----------
    rule : str
        The violated rule: ``L`` (local rules), ``G1`` (rank bound), ``G2``
        (classical attack), ``G3`` (repetition) or ``G4`` (conjunct immunity).
    msg : str
        Human readable description.
    """

    def __init__(self, rule: str, msg: str):
        super().__init__(f"[{rule}] {msg}")
        self.rule = rule


# Game state


class TerminalPlay(RuntimeError):
    """No move can be made in a finished dialogue."""


class NotTerminal(RuntimeError):
    """The dialogue still has legal moves."""


class EntropyDrift(RuntimeError):
    """Incrementally tracked entropy diverged from a full recomputation."""


def spawn_rng(seed: int, *key: int) -> np.random.Generator:
    """Return a random generator for a sub-stream of ``seed``.

    Streams are derived with a counter-based scheme: the generator for
    ``(seed, 3)`` is the same whether or not the streams ``(seed, 0..2)`` were
    drawn before, so serial and parallel runs agree.

    Parameters
    ----------
    seed : int
        The root seed of the run.
    *key : int
        Counters identifying the sub-stream, e.g. the outcome index.

    Returns
    -------
    numpy.random.Generator
    """
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, *key])))


def write_atomic(path: Path, text: str, force: bool = False) -> Path:
    """Write ``text`` to ``path`` through a temporary file and a rename.

    Parameters
    ----------
    path : Path
        Destination file.
    text : str
        Content to write.
    force : bool
        Overwrite ``path`` if it exists.

    Raises
    ------
    FileExistsError
        If ``path`` exists and ``force`` is False.

    Returns
    -------
    Path
        The written path.
    """
    if path.exists() and not force:
        raise FileExistsError(f"{path} exists; use force to overwrite it.")
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf8") as fh:
            fh.write(text)
        Path(tmp).replace(path)
    except BaseException:
        Path(tmp).unlink(missing_ok=True)
        raise
    logger.debug("Wrote %s", path)
    return path


def standardize_colnames(df: pd.DataFrame, cols: Optional[list[str]] = None) -> pd.DataFrame:
    """Convert DataFrame column names to snake case."""

    def to_snake(name: str) -> str:
        name = re.sub("(.)([A-Z][a-z]+)", r"\1_\2", name.strip())
        name = re.sub("([a-z0-9])([A-Z])", r"\1_\2", name)
        return name.lower().replace("-", "_").replace(" ", "_")

    if cols is None:
        cols = list(df.columns)
    return df.rename(columns={c: to_snake(c) for c in cols})


class JSONCache:
    """Cache of JSON documents keyed by name.

    Parameters
    ----------
    data_dir : Path
        Directory where documents are stored.
    no_cache : bool
        If True, will not use cached documents.
    no_store : bool
        If True, will not store computed documents.
    max_age : int for age in days, or timedelta object, optional
        The max. age of a cached document before it is recomputed.
    """

    def __init__(
        self,
        data_dir: Path = DATA_DIR,
        no_cache: bool = False,
        no_store: bool = False,
        max_age: Optional[Union[int, timedelta]] = MAXAGE,
    ):
        """Create a new cache."""
        self.data_dir = data_dir
        self.no_cache = no_cache
        self.no_store = no_store
        if max_age is None or isinstance(max_age, timedelta):
            self.max_age = max_age
        elif isinstance(max_age, int):
            self.max_age = timedelta(days=max_age)
        else:
            raise TypeError("'max_age' must be of type int or datetime.timedelta")
        if self.no_store:
            logger.info("Caching is disabled")
        else:
            logger.debug("Saving cached data to %s", self.data_dir)
            self.data_dir.mkdir(parents=True, exist_ok=True)

    def _path(self, key: str) -> Path:
        return self.data_dir / f"{key}.json"

    def is_cached(self, key: str) -> bool:
        """Check if ``key`` has a valid cached document.

        Parameters
        ----------
        key : str
            Document name.

        Returns
        -------
        bool
            True in case of a cache hit, otherwise False.
        """
        filepath = self._path(key)
        if not filepath.exists():
            return False
        if self.max_age is not None:
            last_modified = datetime.fromtimestamp(filepath.stat().st_mtime, tz=timezone.utc)
            if datetime.now(timezone.utc) - last_modified > self.max_age:
                return False
        return True

    def get(self, key: str) -> Optional[Any]:
        """Return the cached document for ``key`` or None on a miss."""
        if self.no_cache or not self.is_cached(key):
            return None
        logger.debug("Retrieving %s from cache", key)
        with self._path(key).open(encoding="utf8") as fh:
            return json.load(fh)

    def put(self, key: str, doc: Any) -> None:
        """Store ``doc`` under ``key`` unless storing is disabled."""
        if self.no_store:
            return
        write_atomic(self._path(key), json.dumps(doc, sort_keys=True), force=True)
