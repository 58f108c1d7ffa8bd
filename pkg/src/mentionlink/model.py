"""Domain records, line-delimited JSON I/O, and pipeline configuration."""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, TextIO

from .errors import ConfigError, ParseError, ValidationError

MODES = ("subtask1", "subtask2", "subtask3")


@dataclass(frozen=True)
class Relation:
    relation_type: str
    surface: str

    def __post_init__(self):
        if not self.surface.strip():
            raise ValidationError(f"relation {self.relation_type!r} has an empty surface")


@dataclass(frozen=True)
class Mention:
    id: str
    surface: str
    entity_type: str
    doc_id: str | None = None
    relations: tuple[Relation, ...] = ()

    def __post_init__(self):
        if not self.surface.strip():
            raise ValidationError(f"mention {self.id!r} has an empty surface")
        if not isinstance(self.relations, tuple):
            object.__setattr__(self, "relations", tuple(self.relations))

    def to_record(self) -> dict:
        rec = {"id": self.id, "surface": self.surface, "type": self.entity_type}
        if self.doc_id is not None:
            rec["doc_id"] = self.doc_id
        rec["relations"] = [
            {"relation_type": r.relation_type, "surface": r.surface} for r in self.relations
        ]
        return rec


@dataclass(frozen=True)
class GoldClustering:
    clusters: Mapping[str, frozenset[str]]

    def __post_init__(self):
        seen: dict[str, str] = {}
        frozen = {}
        for cid, members in self.clusters.items():
            members = frozenset(members)
            if not members:
                raise ValidationError(f"cluster {cid!r} is empty")
            for mid in members:
                if mid in seen:
                    raise ValidationError(
                        f"mention {mid!r} appears in clusters {seen[mid]!r} and {cid!r}"
                    )
                seen[mid] = cid
            frozen[cid] = members
        object.__setattr__(self, "clusters", frozen)
        object.__setattr__(self, "_owner", seen)

    @property
    def mention_ids(self) -> frozenset[str]:
        return frozenset(self._owner)

    def cluster_of(self, mention_id: str) -> str:
        return self._owner[mention_id]

    def to_labeling(self) -> "Labeling":
        return Labeling(dict(self._owner))

    def __len__(self) -> int:
        return len(self.clusters)


@dataclass(frozen=True)
class Labeling:
    labels: Mapping[str, str]

    def clusters(self) -> dict[str, set[str]]:
        out: dict[str, set[str]] = {}
        for mid, lab in self.labels.items():
            out.setdefault(lab, set()).add(mid)
        return out

    def __len__(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class PipelineConfig:
    """Every tunable of the pipeline.

    ``epsilon`` left as ``None`` resolves to 0.15 for subtask3 and 0.5 otherwise.
    ``exact_string_match`` / ``medium_string_match`` left as ``None`` follow the
    mode scoping (exact match only in subtask3, string-corroborated medium band
    only in subtask1/2); set them explicitly for ablations.
    """

    mode: str = "subtask1"
    high_threshold: float = 0.7
    medium_threshold: float = 0.5
    epsilon: float | None = None
    min_cluster_size: int = 2
    min_samples: int = 1
    block_limit: int = 20000
    embed_dim: int = 384
    seed: int = 42
    batch_size: int = 256
    exact_string_match: bool | None = None
    medium_string_match: bool | None = None

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.epsilon is None:
            object.__setattr__(self, "epsilon", 0.15 if self.mode == "subtask3" else 0.5)
        if self.exact_string_match is None:
            object.__setattr__(self, "exact_string_match", self.mode == "subtask3")
        if self.medium_string_match is None:
            object.__setattr__(self, "medium_string_match", self.mode != "subtask3")
        if not 0 <= self.medium_threshold < self.high_threshold <= 1:
            raise ConfigError("need 0 <= medium_threshold < high_threshold <= 1")
        if not self.epsilon > 0:
            raise ConfigError("epsilon must be positive")
        if self.min_cluster_size < 2:
            raise ConfigError("min_cluster_size must be >= 2")
        if self.min_samples < 1:
            raise ConfigError("min_samples must be >= 1")
        if self.block_limit < 1:
            raise ConfigError("block_limit must be >= 1")
        if self.embed_dim < 1:
            raise ConfigError("embed_dim must be >= 1")
        if self.batch_size < 1:
            raise ConfigError("batch_size must be >= 1")

    def replace(self, **changes) -> "PipelineConfig":
        # re-derive mode-dependent defaults unless explicitly given
        if "mode" in changes:
            for key in ("epsilon", "exact_string_match", "medium_string_match"):
                changes.setdefault(key, None)
        return dataclasses.replace(self, **changes)


_BOOL_WORDS = {"true": True, "1": True, "yes": True, "false": False, "0": False, "no": False}


def parse_config_text(text: str) -> dict:
    """Parse a flat ``key = value`` file into typed PipelineConfig kwargs."""
    types = {f.name: f.type for f in dataclasses.fields(PipelineConfig)}
    out: dict = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in types:
            raise ConfigError(f"config line {lineno}: unknown key {key!r}")
        kind = types[key]
        try:
            if "bool" in kind:
                if value.lower() not in _BOOL_WORDS:
                    raise ValueError(value)
                out[key] = _BOOL_WORDS[value.lower()]
            elif "float" in kind:
                out[key] = float(value)
            elif "int" in kind:
                out[key] = int(value)
            else:
                out[key] = value
        except ValueError:
            raise ConfigError(f"config line {lineno}: bad value {value!r} for {key}") from None
    return out


def format_config(cfg: PipelineConfig) -> str:
    return "".join(f"{f.name} = {getattr(cfg, f.name)}\n" for f in dataclasses.fields(cfg))


def _lines(stream: TextIO | Iterable[str] | str) -> Iterator[tuple[int, str]]:
    if isinstance(stream, str):
        # not splitlines(): it also breaks on U+0085/U+2028 inside JSON strings
        stream = stream.split("\n")
    for lineno, line in enumerate(stream, 1):
        if line.strip():
            yield lineno, line


def _load(line: str, lineno: int) -> dict:
    try:
        rec = json.loads(line)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON ({exc.msg})", lineno) from None
    if not isinstance(rec, dict):
        raise ParseError("record must be a JSON object", lineno)
    return rec


def _need_str(rec: dict, key: str, lineno: int) -> str:
    val = rec.get(key)
    if not isinstance(val, str):
        raise ParseError(f"field {key!r} must be a string", lineno)
    return val


def parse_mentions(stream) -> list[Mention]:
    mentions: list[Mention] = []
    seen: set[str] = set()
    for lineno, line in _lines(stream):
        rec = _load(line, lineno)
        mid = _need_str(rec, "id", lineno)
        surface = _need_str(rec, "surface", lineno)
        etype = _need_str(rec, "type", lineno)
        doc_id = rec.get("doc_id")
        if doc_id is not None and not isinstance(doc_id, str):
            raise ParseError("field 'doc_id' must be a string", lineno)
        rels_raw = rec.get("relations", [])
        if not isinstance(rels_raw, list):
            raise ParseError("field 'relations' must be a list", lineno)
        rels = []
        for r in rels_raw:
            if not isinstance(r, dict):
                raise ParseError("relation must be an object", lineno)
            rels.append((_need_str(r, "relation_type", lineno), _need_str(r, "surface", lineno)))
        if mid in seen:
            raise ValidationError(f"duplicate mention id {mid!r} (line {lineno})")
        seen.add(mid)
        try:
            mentions.append(
                Mention(mid, surface, etype, doc_id, tuple(Relation(t, s) for t, s in rels))
            )
        except ValidationError as exc:
            raise ParseError(str(exc), lineno) from None
    return mentions


def parse_gold(stream, universe: Iterable[str] | None = None) -> GoldClustering:
    clusters: dict[str, frozenset[str]] = {}
    for lineno, line in _lines(stream):
        rec = _load(line, lineno)
        cid = _need_str(rec, "cluster_id", lineno)
        ids = rec.get("mention_ids")
        if not isinstance(ids, list) or not all(isinstance(i, str) for i in ids):
            raise ParseError("field 'mention_ids' must be a list of strings", lineno)
        if cid in clusters:
            raise ValidationError(f"duplicate cluster id {cid!r} (line {lineno})")
        if len(set(ids)) != len(ids):
            raise ValidationError(f"cluster {cid!r} lists a mention twice (line {lineno})")
        clusters[cid] = frozenset(ids)
    gold = GoldClustering(clusters)
    if universe is not None:
        universe = set(universe)
        if gold.mention_ids != universe:
            missing = sorted(universe - gold.mention_ids)[:5]
            extra = sorted(gold.mention_ids - universe)[:5]
            raise ValidationError(
                f"gold clusters do not cover the mention set (missing {missing}, unknown {extra})"
            )
    return gold


def parse_labeling(stream) -> Labeling:
    labels: dict[str, str] = {}
    for lineno, line in _lines(stream):
        rec = _load(line, lineno)
        mid = _need_str(rec, "id", lineno)
        if mid in labels:
            raise ValidationError(f"duplicate prediction for {mid!r} (line {lineno})")
        labels[mid] = _need_str(rec, "label", lineno)
    return Labeling(labels)


def dump_mentions(mentions: Iterable[Mention]) -> str:
    return "".join(json.dumps(m.to_record(), ensure_ascii=False) + "\n" for m in mentions)


def dump_gold(gold: GoldClustering) -> str:
    return "".join(
        json.dumps({"cluster_id": cid, "mention_ids": sorted(ids)}, ensure_ascii=False) + "\n"
        for cid, ids in gold.clusters.items()
    )


def dump_labeling(labeling: Labeling, order: Iterable[str] | None = None) -> str:
    ids = list(order) if order is not None else sorted(labeling.labels)
    return "".join(
        json.dumps({"id": mid, "label": labeling.labels[mid]}, ensure_ascii=False) + "\n"
        for mid in ids
    )
