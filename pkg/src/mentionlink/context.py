"""Structured context strings fed to the encoder.

The anchor (lowercased surface) is written twice so it dominates mean pooling,
then the entity type in original casing, then every relation surface in input
order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from .errors import ContractError
from .model import Mention


@dataclass(frozen=True)
class ContextString:
    value: str
    mention_id: str


def _collapse(text: str) -> str:
    return " ".join(text.split())


def build_context(m: Mention) -> ContextString:
    anchor = _collapse(m.surface.lower())
    if not anchor:
        raise ContractError(f"mention {m.id!r}: empty surface")
    parts = [anchor, anchor, _collapse(m.entity_type)]
    parts.extend(_collapse(r.surface) for r in m.relations)
    return ContextString(" ".join(p for p in parts if p), m.id)


def build_contexts(mentions: Iterable[Mention]) -> list[ContextString]:
    return [build_context(m) for m in mentions]


def dump_contexts(contexts: Iterable[ContextString]) -> str:
    return "".join(f"{c.mention_id}\t{c.value}\n" for c in contexts)
