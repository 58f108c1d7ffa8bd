"""Final labeling: KB assignments plus new clusters, folded onto KB names."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

from .assign import Assignment
from .errors import ContractError
from .kb import StringDictionary
from .model import Labeling

KB_PREFIX = "kb:"
KB_CASCADE = "kb_cascade"
NEW_CLUSTER = "new_cluster"
NAME_MERGED = "name_merged"


@dataclass(frozen=True)
class FinalLabeling:
    labels: Mapping[str, str]
    provenance: Mapping[str, str]

    def as_labeling(self) -> Labeling:
        return Labeling(dict(self.labels))


def kb_label(cluster_id: str) -> str:
    return KB_PREFIX + cluster_id


def final_merge(
    assignments: Sequence[Assignment],
    new_labels: Mapping[str, str],
    dictionary: StringDictionary,
    canon: Mapping[str, str],
) -> FinalLabeling:
    """Matched mentions keep their KB cluster; each new cluster is relabeled
    as a whole to the KB cluster most of its members name (ties to the
    smallest cluster id), or kept when no member names one.
    """
    labels: dict[str, str] = {}
    prov: dict[str, str] = {}
    for a in assignments:
        if not a.matched:
            continue
        if a.mention_id in labels:
            raise ContractError(f"mention {a.mention_id!r} assigned twice")
        labels[a.mention_id] = kb_label(a.cluster_id)
        prov[a.mention_id] = KB_CASCADE
    unmatched = {a.mention_id for a in assignments if not a.matched}
    overlap = labels.keys() & new_labels.keys()
    if overlap:
        raise ContractError(f"mentions both KB-matched and clustered: {sorted(overlap)[:5]}")
    if unmatched != new_labels.keys():
        gap = sorted(unmatched ^ new_labels.keys())[:5]
        raise ContractError(f"unmatched mentions and new clusters disagree: {gap}")

    members: dict[str, list[str]] = {}
    for mid, lab in new_labels.items():
        members.setdefault(lab, []).append(mid)
    for lab, mids in members.items():
        votes = Counter(
            hit for hit in (dictionary.get(canon.get(mid, "")) for mid in mids) if hit is not None
        )
        if votes:
            target = min(votes.items(), key=lambda kv: (-kv[1], kv[0]))[0]
            for mid in mids:
                labels[mid] = kb_label(target)
                prov[mid] = NAME_MERGED
        else:
            for mid in mids:
                labels[mid] = lab
                prov[mid] = NEW_CLUSTER
    return FinalLabeling(labels, prov)
