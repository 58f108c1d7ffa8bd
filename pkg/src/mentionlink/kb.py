"""Knowledge base of known identities: centroids plus a canonical-name dictionary."""

from __future__ import annotations

import logging
from collections import Counter, defaultdict
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .canonical import AbbreviationMap, canonical_key
from .embedding import NORM_FLOOR
from .errors import ContractError, DegenerateVectorError, ParseError, ValidationError
from .model import GoldClustering, Mention

logger = logging.getLogger(__name__)

QUERY_CHUNK = 4096


class FlatIndex:
    """Exact inner-product index over a fixed, ordered set of unit vectors."""

    def __init__(self, cluster_ids: Sequence[str], vectors):
        vectors = np.ascontiguousarray(vectors, dtype=np.float64)
        if vectors.ndim != 2 or vectors.shape[0] != len(cluster_ids):
            raise ContractError("one vector row per cluster id required")
        self.cluster_ids = list(cluster_ids)
        self.vectors = vectors

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    def __len__(self) -> int:
        return len(self.cluster_ids)

    def search(self, queries) -> tuple[np.ndarray, np.ndarray]:
        """Top-1 position and inner product for each query row.

        Ties go to the lowest position (``argmax`` returns the first maximum).
        """
        if not len(self):
            raise ContractError("search on an empty index")
        queries = np.atleast_2d(np.asarray(queries, dtype=np.float64))
        pos = np.empty(len(queries), dtype=np.int64)
        sim = np.empty(len(queries))
        for start in range(0, len(queries), QUERY_CHUNK):
            scores = queries[start : start + QUERY_CHUNK] @ self.vectors.T
            best = scores.argmax(axis=1)
            pos[start : start + len(best)] = best
            sim[start : start + len(best)] = scores[np.arange(len(best)), best]
        return pos, sim


def nearest_centroid(index: FlatIndex, query) -> tuple[str, float]:
    pos, sim = index.search(np.asarray(query, dtype=np.float64)[None, :])
    return index.cluster_ids[int(pos[0])], float(sim[0])


def build_centroids(
    gold: GoldClustering, embeddings: Mapping[str, np.ndarray]
) -> FlatIndex:
    ids, rows = [], []
    for cid, members in gold.clusters.items():
        vecs = []
        for mid in sorted(members):
            if mid not in embeddings:
                raise ValidationError(f"no embedding for training mention {mid!r}")
            v = np.asarray(embeddings[mid], dtype=np.float64)
            if not np.isfinite(v).all():
                logger.warning("training mention %r has a degenerate embedding; skipped", mid)
                continue
            vecs.append(v)
        mean = np.mean(vecs, axis=0) if vecs else None
        norm = float(np.linalg.norm(mean)) if mean is not None else 0.0
        if not norm > NORM_FLOOR:
            raise DegenerateVectorError(f"cluster {cid!r}: member embeddings average to ~0")
        ids.append(cid)
        rows.append(mean / norm)
    dim = rows[0].shape[0] if rows else 0
    return FlatIndex(ids, np.array(rows).reshape(len(rows), dim))


@dataclass(frozen=True)
class StringDictionary:
    entries: Mapping[str, str]
    frequency: Mapping[str, Mapping[str, int]] = field(default_factory=dict)

    def get(self, key: str) -> str | None:
        if not key:
            return None
        return self.entries.get(key)

    def __contains__(self, key: str) -> bool:
        return bool(key) and key in self.entries

    def __len__(self) -> int:
        return len(self.entries)


def build_string_dictionary(
    train: Iterable[Mention], gold: GoldClustering, abbrev: AbbreviationMap | None = None
) -> StringDictionary:
    freq: dict[str, Counter] = defaultdict(Counter)
    for m in train:
        try:
            cid = gold.cluster_of(m.id)
        except KeyError:
            raise ValidationError(f"training mention {m.id!r} has no gold cluster") from None
        key = canonical_key(m.surface, abbrev)
        if key:
            freq[key][cid] += 1
    entries = {
        key: min(counts.items(), key=lambda kv: (-kv[1], kv[0]))[0]
        for key, counts in freq.items()
    }
    return StringDictionary(entries, {k: dict(v) for k, v in freq.items()})


@dataclass
class KnowledgeBase:
    index: FlatIndex
    dictionary: StringDictionary

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(format_kb(self))

    @classmethod
    def load(cls, path) -> "KnowledgeBase":
        with open(path, encoding="utf-8") as fh:
            return parse_kb(fh.read())


def format_kb(kb: KnowledgeBase) -> str:
    lines = [f"KB {kb.index.dim} {len(kb.index)}"]
    for cid, vec in zip(kb.index.cluster_ids, kb.index.vectors):
        if not cid or any(c.isspace() for c in cid):
            raise ValidationError(f"cluster id {cid!r} cannot be written to a KB snapshot")
        lines.append(cid + " " + " ".join(repr(float(x)) for x in vec))
    lines.append(f"DICT {len(kb.dictionary)}")
    lines.extend(f"{k}\t{v}" for k, v in sorted(kb.dictionary.entries.items()))
    return "\n".join(lines) + "\n"


def parse_kb(text: str) -> KnowledgeBase:
    lines = text.splitlines()
    try:
        tag, dim, count = lines[0].split()
        dim, count = int(dim), int(count)
        if tag != "KB":
            raise ValueError
    except (IndexError, ValueError):
        raise ParseError("expected header 'KB <dim> <count>'", 1) from None
    ids, rows = [], []
    for i in range(1, count + 1):
        parts = lines[i].split() if i < len(lines) else []
        if len(parts) != dim + 1:
            raise ParseError(f"centroid row needs {dim + 1} fields", i + 1)
        ids.append(parts[0])
        rows.append([float(x) for x in parts[1:]])
    pos = count + 1
    try:
        tag, n = lines[pos].split()
        n = int(n)
        if tag != "DICT":
            raise ValueError
    except (IndexError, ValueError):
        raise ParseError("expected 'DICT <n>'", pos + 1) from None
    entries = {}
    for j in range(pos + 1, pos + 1 + n):
        if j >= len(lines) or "\t" not in lines[j]:
            raise ParseError("expected 'key<TAB>cluster_id'", j + 1)
        k, v = lines[j].split("\t", 1)
        entries[k] = v
    index = FlatIndex(ids, np.array(rows, dtype=np.float64).reshape(count, dim))
    return KnowledgeBase(index, StringDictionary(entries))
