"""Blocking, per-block HDBSCAN, noise promotion and canonical-name merging."""

from __future__ import annotations

import logging
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping, Sequence

import numpy as np

from .hdbscan import hdbscan
from .model import Mention, PipelineConfig

logger = logging.getLogger(__name__)

EMPTY_BUCKET = "#"


class UnionFind:
    """Disjoint sets with path compression and union by size."""

    def __init__(self, items: Iterable[Hashable] = ()):
        self.parent: dict = {}
        self.size: dict = {}
        for x in items:
            self.add(x)

    def add(self, x) -> None:
        if x not in self.parent:
            self.parent[x] = x
            self.size[x] = 1

    def find(self, x):
        self.add(x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, a, b) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]

    def groups(self) -> dict:
        out = defaultdict(list)
        for x in self.parent:
            out[self.find(x)].append(x)
        return dict(out)


@dataclass(frozen=True)
class Block:
    entity_type: str
    letter: str | None
    member_ids: tuple[str, ...]

    @property
    def key(self) -> tuple[str, str | None]:
        return (self.entity_type, self.letter)

    def __len__(self) -> int:
        return len(self.member_ids)


def block(
    unmatched: Sequence[Mention], canon: Mapping[str, str], limit: int = 20000
) -> list[Block]:
    """Partition by entity type; split any type over ``limit`` by first letter."""
    by_type: dict[str, list[str]] = {}
    for m in unmatched:
        by_type.setdefault(m.entity_type, []).append(m.id)
    blocks: list[Block] = []
    for etype in sorted(by_type):
        ids = by_type[etype]
        if len(ids) <= limit:
            blocks.append(Block(etype, None, tuple(ids)))
            continue
        by_letter: dict[str, list[str]] = {}
        for mid in ids:
            key = canon[mid]
            by_letter.setdefault(key[0] if key else EMPTY_BUCKET, []).append(mid)
        for letter in sorted(by_letter):
            sub = Block(etype, letter, tuple(by_letter[letter]))
            if len(sub) > limit:
                logger.warning(
                    "block %r/%r still has %d mentions after letter split (limit %d)",
                    etype, letter, len(sub), limit,
                )
            blocks.append(sub)
    return blocks


def dump_blocks(blocks: Iterable[Block]) -> str:
    return "".join(f"{b.entity_type}\t{b.letter or ''}\t{len(b)}\n" for b in blocks)


@dataclass
class ClusterResult:
    labels: dict[str, int] = field(default_factory=dict)
    noise: list[str] = field(default_factory=list)


def cluster_block(
    member_ids: Sequence[str], vectors: np.ndarray, cfg: PipelineConfig
) -> ClusterResult:
    """Run HDBSCAN on one block. Rows of ``vectors`` align with ``member_ids``."""
    vectors = np.asarray(vectors, dtype=np.float64)
    ok = np.isfinite(vectors).all(axis=1) if len(member_ids) else np.zeros(0, dtype=bool)
    result = ClusterResult()
    result.noise.extend(mid for mid, good in zip(member_ids, ok) if not good)
    ids = [mid for mid, good in zip(member_ids, ok) if good]
    if not ids:
        return result
    labels = hdbscan(
        vectors[ok],
        min_cluster_size=cfg.min_cluster_size,
        min_samples=cfg.min_samples,
        epsilon=cfg.epsilon,
    ).labels
    for mid, lab in zip(ids, labels):
        if lab < 0:
            result.noise.append(mid)
        else:
            result.labels[mid] = int(lab)
    return result


def singletonize(result: ClusterResult, prefix: str = "") -> dict[str, str]:
    out = {mid: f"{prefix}c{lab}" for mid, lab in result.labels.items()}
    for j, mid in enumerate(result.noise):
        out[mid] = f"{prefix}n{j}"
    return out


def merge_by_canonical_name(
    labels: Mapping[str, str], canon: Mapping[str, str]
) -> dict[str, str]:
    """Union every pair of clusters that share a non-empty canonical name.

    Each merged group takes the lexicographically smallest of its labels.
    """
    uf = UnionFind(labels.values())
    first_label: dict[str, str] = {}
    for mid, lab in labels.items():
        key = canon.get(mid, "")
        if not key:
            continue
        if key in first_label:
            uf.union(first_label[key], lab)
        else:
            first_label[key] = lab
    name = {root: min(group) for root, group in uf.groups().items()}
    return {mid: name[uf.find(lab)] for mid, lab in labels.items()}


def cluster_unmatched(
    unmatched: Sequence[Mention],
    embeddings: Mapping[str, np.ndarray] | np.ndarray,
    canon: Mapping[str, str],
    cfg: PipelineConfig,
) -> tuple[dict[str, str], list[Block]]:
    """Block, cluster each block, promote noise, then merge by canonical name.

    ``embeddings`` is either a mapping id -> vector or a matrix aligned with
    ``unmatched``.
    """
    if isinstance(embeddings, np.ndarray):
        row_of = {m.id: i for i, m in enumerate(unmatched)}
        get = lambda ids: embeddings[[row_of[i] for i in ids]]  # noqa: E731
    else:
        get = lambda ids: np.array([embeddings[i] for i in ids])  # noqa: E731
    blocks = block(unmatched, canon, cfg.block_limit)
    labels: dict[str, str] = {}
    for b_idx, blk in enumerate(blocks):
        result = cluster_block(blk.member_ids, get(list(blk.member_ids)), cfg)
        labels.update(singletonize(result, prefix=f"new:{b_idx}:"))
    return merge_by_canonical_name(labels, canon), blocks
