"""Surface-form normalization and abbreviation unification."""

from __future__ import annotations

import re
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .model import Mention

_NOT_ALNUM = re.compile(r"[^a-z0-9]+")

ABBREVIATION = "abbreviation"


def normalize(surface: str) -> str:
    """Lowercase, then drop everything outside ``[a-z0-9]``.

    >>> normalize("SPSS 28")
    'spss28'
    >>> normalize("C++")
    'c'
    """
    return _NOT_ALNUM.sub("", surface.lower())


def _lookup_key(surface: str) -> str:
    return surface.strip().lower()


@dataclass(frozen=True)
class AbbreviationMap:
    """Short form -> terminal long form, both kept as raw surfaces.

    Lookups are whitespace-trimmed and case-insensitive.
    """

    entries: Mapping[str, str] = field(default_factory=dict)
    skipped_self_pairs: int = 0

    def __post_init__(self):
        object.__setattr__(
            self, "_index", {_lookup_key(k): v for k, v in self.entries.items()}
        )

    def expand(self, surface: str) -> str:
        return self._index.get(_lookup_key(surface), surface)

    def __contains__(self, surface: str) -> bool:
        return _lookup_key(surface) in self._index

    def __len__(self) -> int:
        return len(self.entries)

    def dump(self) -> str:
        return "".join(f"{k}\t{v}\n" for k, v in sorted(self.entries.items()))


def build_abbreviation_map(mentions: Iterable[Mention]) -> AbbreviationMap:
    votes: dict[str, Counter] = defaultdict(Counter)
    raw_short: dict[str, str] = {}
    skipped = 0
    for m in mentions:
        for rel in m.relations:
            if rel.relation_type.lower() != ABBREVIATION:
                continue
            a, b = m.surface.strip(), rel.surface.strip()
            if len(a) == len(b):
                skipped += 1
                continue
            short, long_ = (a, b) if len(a) < len(b) else (b, a)
            key = _lookup_key(short)
            votes[key][long_] += 1
            if key not in raw_short or short < raw_short[key]:
                raw_short[key] = short

    # majority long form per short form, ties -> lexicographically smallest
    direct = {
        key: min(counter.items(), key=lambda kv: (-kv[1], kv[0]))[0]
        for key, counter in votes.items()
    }

    def terminal(long_: str) -> str:
        # lengths strictly increase along a chain, so this terminates
        while _lookup_key(long_) in direct:
            long_ = direct[_lookup_key(long_)]
        return long_

    entries = {raw_short[key]: terminal(long_) for key, long_ in direct.items()}
    return AbbreviationMap(entries, skipped)


def canonical_key(surface: str, abbrev: AbbreviationMap | None = None) -> str:
    if abbrev is not None:
        surface = abbrev.expand(surface)
    return normalize(surface)
