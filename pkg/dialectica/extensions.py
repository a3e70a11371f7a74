"""Audience projection and acceptance semantics of argumentation frameworks."""

import itertools
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Any, Optional

from ._common import CapExceeded, UnknownArgument, UnknownAudience
from ._config import logger
from .knowledge import VAF

MAX_ENUMERATED_ARGUMENTS = 20
MAX_MUTUAL_PAIRS = 12


class Semantics(Enum):
    """Acceptance semantics.

    Attributes
    ----------
    GROUNDED: The least complete extension.
    COMPLETE: Admissible sets containing every argument they defend.
    PREFERRED: Maximal admissible sets.
    RESOLUTION: Resolution-based grounded semantics, also known as closed
        preferred semantics.
    """

    GROUNDED = "grounded"
    COMPLETE = "complete"
    PREFERRED = "preferred"
    RESOLUTION = "resolution"


@dataclass(frozen=True)
class AF:
    """An abstract argumentation framework with a defeat relation."""

    arguments: tuple[str, ...]
    defeats: frozenset[tuple[str, str]]

    def __post_init__(self) -> None:
        object.__setattr__(self, "arguments", tuple(sorted(set(self.arguments))))
        object.__setattr__(self, "defeats", frozenset(self.defeats))
        known = set(self.arguments)
        for a, b in self.defeats:
            for x in (a, b):
                if x not in known:
                    raise UnknownArgument(x)
            if a == b:
                raise ValueError(f"argument {a} defeats itself")

    def attackers(self, arg: str) -> set[str]:
        """Return the arguments defeating ``arg``."""
        return {a for a, b in self.defeats if b == arg}


@dataclass(frozen=True)
class Extension:
    """A set of accepted arguments under some semantics."""

    members: frozenset[str]
    semantics: Semantics

    def __contains__(self, arg: object) -> bool:
        return arg in self.members

    def sorted(self) -> list[str]:
        """Return the member ids in lexicographic order."""
        return sorted(self.members)


class _Bits:
    """Bitmask view of an AF; bit ``i`` stands for ``af.arguments[i]``."""

    def __init__(self, af: AF):
        self.af = af
        self.index = {a: i for i, a in enumerate(af.arguments)}
        n = len(af.arguments)
        self.out = [0] * n  # arguments defeated by i
        self.into = [0] * n  # arguments defeating i
        for a, b in af.defeats:
            self.out[self.index[a]] |= 1 << self.index[b]
            self.into[self.index[b]] |= 1 << self.index[a]
        self.all = (1 << n) - 1
        self.defended = lru_cache(maxsize=None)(self._defended)

    def mask(self, members: Iterable[str]) -> int:
        m = 0
        for a in members:
            if a not in self.index:
                raise UnknownArgument(a)
            m |= 1 << self.index[a]
        return m

    def members(self, mask: int) -> frozenset[str]:
        return frozenset(a for i, a in enumerate(self.af.arguments) if mask >> i & 1)

    def attacked(self, mask: int) -> int:
        result = 0
        for i in range(len(self.out)):
            if mask >> i & 1:
                result |= self.out[i]
        return result

    def _defended(self, mask: int) -> int:
        attacked = self.attacked(mask)
        result = 0
        for i, into in enumerate(self.into):
            if into & ~attacked == 0:
                result |= 1 << i
        return result

    def conflict_free(self, mask: int) -> bool:
        return self.attacked(mask) & mask == 0

    def grounded(self) -> int:
        mask = 0
        while True:
            nxt = self.defended(mask)
            if nxt == mask:
                return mask
            mask = nxt


def _ordered(extensions: Iterable[Extension]) -> list[Extension]:
    return sorted(set(extensions), key=lambda e: (len(e.members), e.sorted()))


def project_audience(vaf: VAF, audience: Sequence[str]) -> AF:
    """Turn the attacks of a VAF into defeats for one audience.

    An attack ``(A, B)`` succeeds as a defeat unless the value of ``B`` is
    strictly preferred to the value of ``A`` by the audience.

    Parameters
    ----------
    vaf : VAF
        The framework.
    audience : sequence of str
        A ranking of the values, best first; one of ``vaf.audiences``.

    Raises
    ------
    UnknownAudience
        If the audience is not one of the framework's audiences.

    Returns
    -------
    AF
    """
    ranking = tuple(audience)
    if ranking not in vaf.audiences:
        raise UnknownAudience(" > ".join(ranking))
    rank = {v: i for i, v in enumerate(ranking)}
    defeats = frozenset(
        (a, b) for a, b in vaf.attacks if not rank[vaf.val[b]] < rank[vaf.val[a]]
    )
    logger.debug(
        "Audience %s keeps %d of %d attacks", " > ".join(ranking), len(defeats), len(vaf.attacks)
    )
    return AF(vaf.ids, defeats)


def is_conflict_free(af: AF, s: Iterable[str]) -> bool:
    """Return True iff no member of ``s`` defeats another member of ``s``.

    Raises
    ------
    UnknownArgument
        If ``s`` contains an id that is not part of ``af``.
    """
    bits = _Bits(af)
    return bits.conflict_free(bits.mask(s))


def is_admissible(af: AF, s: Iterable[str]) -> bool:
    """Return True iff ``s`` is conflict-free and defends all of its members.

    Raises
    ------
    UnknownArgument
        If ``s`` contains an id that is not part of ``af``.
    """
    bits = _Bits(af)
    mask = bits.mask(s)
    return bits.conflict_free(mask) and mask & ~bits.defended(mask) == 0


def grounded(af: AF) -> Extension:
    """Return the grounded extension: the least fixed point of the defence operator."""
    bits = _Bits(af)
    return Extension(bits.members(bits.grounded()), Semantics.GROUNDED)


def _complete_masks(af: AF) -> list[int]:
    if len(af.arguments) > MAX_ENUMERATED_ARGUMENTS:
        raise CapExceeded(
            f"{len(af.arguments)} arguments exceed the enumeration cap of "
            f"{MAX_ENUMERATED_ARGUMENTS}"
        )
    bits = _Bits(af)
    base = bits.grounded()
    excluded = bits.attacked(base)
    undecided = [i for i in range(len(af.arguments)) if not (base | excluded) >> i & 1]
    found: list[int] = []

    def search(k: int, mask: int, attacked: int) -> None:
        if k == len(undecided):
            if bits.defended(mask) == mask:
                found.append(mask)
            return
        i = undecided[k]
        bit = 1 << i
        if not (attacked & bit or bits.out[i] & (mask | bit)):
            search(k + 1, mask | bit, attacked | bits.out[i])
        search(k + 1, mask, attacked)

    search(0, base, bits.attacked(base))
    return found


def complete_all(af: AF) -> list[Extension]:
    """Return all complete extensions.

    Raises
    ------
    CapExceeded
        If the framework has more than 20 arguments.
    """
    bits = _Bits(af)
    return _ordered(Extension(bits.members(m), Semantics.COMPLETE) for m in _complete_masks(af))


def preferred_all(af: AF) -> list[Extension]:
    """Return all preferred extensions (maximal admissible sets).

    Every admissible set is contained in a complete one, so the maximal
    complete extensions are exactly the maximal admissible sets.

    Raises
    ------
    CapExceeded
        If the framework has more than 20 arguments.
    """
    bits = _Bits(af)
    masks = _complete_masks(af)
    maximal = [m for m in masks if not any(o != m and o & m == m for o in masks)]
    return _ordered(Extension(bits.members(m), Semantics.PREFERRED) for m in maximal)


def resolution_grounded(af: AF) -> list[Extension]:
    """Return the resolution-based grounded extensions.

    Every mutual defeat ``A <-> B`` is resolved in both directions; the
    result collects the inclusion-minimal grounded extensions over all
    resolutions.

    Raises
    ------
    CapExceeded
        If there are more than 12 mutual defeat pairs.
    """
    mutual = sorted((a, b) for a, b in af.defeats if a < b and (b, a) in af.defeats)
    if len(mutual) > MAX_MUTUAL_PAIRS:
        raise CapExceeded(
            f"{len(mutual)} mutual defeats exceed the resolution cap of {MAX_MUTUAL_PAIRS}"
        )
    candidates = set()
    for choice in itertools.product((0, 1), repeat=len(mutual)):
        dropped = {(b, a) if keep == 0 else (a, b) for (a, b), keep in zip(mutual, choice)}
        resolved = AF(af.arguments, af.defeats - dropped)
        candidates.add(grounded(resolved).members)
    minimal = [c for c in candidates if not any(o < c for o in candidates)]
    logger.debug("%d resolutions, %d minimal grounded sets", 2 ** len(mutual), len(minimal))
    return _ordered(Extension(c, Semantics.RESOLUTION) for c in minimal)


closed_preferred = resolution_grounded


def extensions(af: AF, semantics: Semantics) -> list[Extension]:
    """Return the extensions of ``af`` under ``semantics``."""
    if semantics is Semantics.GROUNDED:
        return [grounded(af)]
    if semantics is Semantics.COMPLETE:
        return complete_all(af)
    if semantics is Semantics.PREFERRED:
        return preferred_all(af)
    return resolution_grounded(af)


def extensions_report(
    semantics: Semantics, audience: Optional[Sequence[str]], exts: Iterable[Extension]
) -> dict[str, Any]:
    """Return the JSON report of a set of extensions."""
    return {
        "semantics": semantics.value,
        "audience": list(audience) if audience is not None else None,
        "extensions": [e.sorted() for e in _ordered(exts)],
    }


def argumentation_tree(af: AF, root: str) -> dict[str, Any]:
    """Return the tree of defeaters rooted at ``root``.

    Each node lists the arguments defeating it; an argument already on the
    path from the root is not expanded again.

    Raises
    ------
    UnknownArgument
        If ``root`` is not part of ``af``.
    """
    if root not in af.arguments:
        raise UnknownArgument(root)

    def expand(arg: str, path: frozenset[str]) -> dict[str, Any]:
        return {
            "id": arg,
            "defeaters": [
                expand(a, path | {a}) for a in sorted(af.attackers(arg)) if a not in path
            ],
        }

    return expand(root, frozenset([root]))


def hasse_diagram(exts: Iterable[Extension]) -> list[tuple[list[str], list[str]]]:
    """Return the covering pairs ``(smaller, larger)`` of the inclusion order."""
    ordered = _ordered(exts)
    pairs = []
    for low, high in itertools.permutations(ordered, 2):
        if not low.members < high.members:
            continue
        if any(low.members < mid.members < high.members for mid in ordered):
            continue
        pairs.append((low.sorted(), high.sorted()))
    return sorted(pairs)
