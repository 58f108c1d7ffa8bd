"""Routing of test mentions through the knowledge-base cascade.

Order, first hit wins:

1. exact canonical-name hit in the dictionary (subtask3 only by default);
2. nearest centroid with similarity >= high_threshold;
3. similarity in [medium_threshold, high_threshold) *and* a dictionary hit
   (subtask1/2 only by default); the dictionary's cluster wins;
4. unmatched, handed on to density clustering.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .canonical import AbbreviationMap, canonical_key
from .kb import KnowledgeBase
from .model import Mention, PipelineConfig

EXACT = "exact_string"
HIGH = "high_sim"
MEDIUM = "medium_sim_string"
UNMATCHED = "unmatched"


@dataclass(frozen=True)
class Assignment:
    mention_id: str
    method: str
    cluster_id: str | None = None
    similarity: float | None = None

    @property
    def matched(self) -> bool:
        return self.method != UNMATCHED

    def trace_line(self) -> str:
        sim = "" if self.similarity is None else f"{self.similarity:.6f}"
        return f"{self.mention_id}\t{self.method}\t{self.cluster_id or ''}\t{sim}\n"


def cascade(
    mention_id: str,
    key: str,
    nearest: tuple[str, float] | None,
    kb: KnowledgeBase,
    cfg: PipelineConfig,
) -> Assignment:
    """Decide one mention given its canonical key and nearest-centroid hit.

    ``nearest`` is ``None`` when the mention has no usable embedding or the
    index is empty.
    """
    dict_hit = kb.dictionary.get(key)
    if cfg.exact_string_match and dict_hit is not None:
        return Assignment(mention_id, EXACT, dict_hit)
    if nearest is None:
        return Assignment(mention_id, UNMATCHED)
    cid, sim = nearest
    if sim >= cfg.high_threshold:
        return Assignment(mention_id, HIGH, cid, sim)
    if cfg.medium_string_match and sim >= cfg.medium_threshold and dict_hit is not None:
        return Assignment(mention_id, MEDIUM, dict_hit, sim)
    return Assignment(mention_id, UNMATCHED, None, sim)


def assign(
    m: Mention,
    e,
    kb: KnowledgeBase,
    cfg: PipelineConfig,
    abbrev: AbbreviationMap | None = None,
) -> Assignment:
    assignments, _ = assign_all([m], np.asarray(e, dtype=np.float64)[None, :], kb, cfg, abbrev)
    return assignments[0]


def assign_all(
    mentions: Sequence[Mention],
    embeddings: np.ndarray,
    kb: KnowledgeBase,
    cfg: PipelineConfig,
    abbrev: AbbreviationMap | None = None,
    keys: Sequence[str] | None = None,
) -> tuple[list[Assignment], list[str]]:
    if keys is None:
        keys = [canonical_key(m.surface, abbrev) for m in mentions]
    n = len(mentions)
    embeddings = np.asarray(embeddings, dtype=np.float64)
    if n == 0:
        return [], []
    embeddings = embeddings.reshape(n, -1)
    usable = np.isfinite(embeddings).all(axis=1)
    pos = np.full(n, -1)
    sim = np.full(n, np.nan)
    if len(kb.index) and usable.any():
        pos[usable], sim[usable] = kb.index.search(embeddings[usable])
    ids = kb.index.cluster_ids
    out: list[Assignment] = []
    unmatched: list[str] = []
    for i, m in enumerate(mentions):
        nearest = (ids[pos[i]], float(sim[i])) if pos[i] >= 0 else None
        a = cascade(m.id, keys[i], nearest, kb, cfg)
        out.append(a)
        if not a.matched:
            unmatched.append(m.id)
    return out, unmatched
