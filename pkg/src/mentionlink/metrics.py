"""MUC, B-cubed, CEAF-e and the CoNLL average."""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import ValidationError
from .model import GoldClustering, Labeling


@dataclass(frozen=True)
class PRF:
    precision: float
    recall: float
    f1: float

    @classmethod
    def from_pr(cls, p: float, r: float) -> "PRF":
        return cls(p, r, 2 * p * r / (p + r) if p + r > 0 else 0.0)


@dataclass(frozen=True)
class MetricReport:
    muc: PRF
    b3: PRF
    ceafe: PRF
    conll_f1: float

    def format(self) -> str:
        rows = [("MUC", self.muc), ("BCUB", self.b3), ("CEAFE", self.ceafe)]
        lines = [
            f"{name}\t{m.precision:.4f}\t{m.recall:.4f}\t{m.f1:.4f}" for name, m in rows
        ]
        lines.append(f"CONLL\t{self.conll_f1:.4f}")
        return "\n".join(lines) + "\n"


Partition = list[frozenset]


def _as_partitions(gold, pred) -> tuple[Partition, Partition]:
    g = _partition(gold)
    p = _partition(pred)
    gu = frozenset().union(*g) if g else frozenset()
    pu = frozenset().union(*p) if p else frozenset()
    if gu != pu:
        missing = sorted(map(str, gu - pu))[:5]
        extra = sorted(map(str, pu - gu))[:5]
        raise ValidationError(
            f"gold and prediction cover different mentions (missing {missing}, extra {extra})"
        )
    return g, p


def _partition(x) -> Partition:
    if isinstance(x, GoldClustering):
        return [frozenset(v) for v in x.clusters.values()]
    if isinstance(x, Labeling):
        return [frozenset(v) for v in x.clusters().values()]
    if isinstance(x, Mapping):
        return [frozenset(v) for v in Labeling(dict(x)).clusters().values()]
    return [frozenset(c) for c in x]


def _owner(part: Partition) -> dict:
    return {m: i for i, c in enumerate(part) for m in c}


def _muc_side(keys: Partition, response: Partition) -> float:
    owner = _owner(response)
    num = den = 0
    for c in keys:
        if len(c) < 2:
            continue
        den += len(c) - 1
        num += len(c) - len({owner[m] for m in c})
    return num / den if den else 0.0


def muc(gold, pred) -> PRF:
    g, p = _as_partitions(gold, pred)
    return PRF.from_pr(_muc_side(p, g), _muc_side(g, p))


def b_cubed(gold, pred) -> PRF:
    g, p = _as_partitions(gold, pred)
    if not g:
        return PRF(0.0, 0.0, 0.0)
    g_of, p_of = _owner(g), _owner(p)
    overlap: dict[tuple[int, int], int] = defaultdict(int)
    for m in g_of:
        overlap[g_of[m], p_of[m]] += 1
    n = len(g_of)
    prec = rec = 0.0
    for (gi, pi), k in overlap.items():
        # k mentions each contribute k/|P| and k/|G|
        prec += k * k / len(p[pi])
        rec += k * k / len(g[gi])
    return PRF.from_pr(prec / n, rec / n)


def phi4(a: frozenset, b: frozenset) -> float:
    return 2 * len(a & b) / (len(a) + len(b))


def ceaf_e(gold, pred) -> PRF:
    g, p = _as_partitions(gold, pred)
    if not g:
        return PRF(0.0, 0.0, 0.0)
    total = _best_alignment(g, p)
    return PRF.from_pr(total / len(p), total / len(g))


def _best_alignment(g: Partition, p: Partition) -> float:
    """Optimal one-to-one phi4 alignment, solved per overlap component."""
    p_of = _owner(p)
    overlap: dict[tuple[int, int], int] = defaultdict(int)
    for gi, c in enumerate(g):
        for m in c:
            overlap[gi, p_of[m]] += 1
    # clusters that never overlap score 0, so components are independent
    comp_parent = {}

    def find(x):
        while comp_parent.setdefault(x, x) != x:
            comp_parent[x] = comp_parent[comp_parent[x]]
            x = comp_parent[x]
        return x

    for gi, pi in overlap:
        a, b = find(("g", gi)), find(("p", pi))
        if a != b:
            comp_parent[a] = b
    members: dict = defaultdict(lambda: (set(), set()))
    for gi, pi in overlap:
        root = find(("g", gi))
        members[root][0].add(gi)
        members[root][1].add(pi)
    total = 0.0
    for gs, ps in members.values():
        if len(gs) == 1 or len(ps) == 1:
            gi_list, pi_list = sorted(gs), sorted(ps)
            total += max(
                2 * overlap.get((gi, pi), 0) / (len(g[gi]) + len(p[pi]))
                for gi in gi_list
                for pi in pi_list
            )
            continue
        gl, pl = sorted(gs), sorted(ps)
        sim = np.zeros((len(gl), len(pl)))
        col = {pi: j for j, pi in enumerate(pl)}
        for i, gi in enumerate(gl):
            for pi in pl:
                k = overlap.get((gi, pi))
                if k:
                    sim[i, col[pi]] = 2 * k / (len(g[gi]) + len(p[pi]))
        rows, cols = linear_sum_assignment(sim, maximize=True)
        total += float(sim[rows, cols].sum())
    return total


def conll(muc_f1: float, b3_f1: float, ceafe_f1: float) -> float:
    return (muc_f1 + b3_f1 + ceafe_f1) / 3


def evaluate(gold, pred) -> MetricReport:
    m, b, c = muc(gold, pred), b_cubed(gold, pred), ceaf_e(gold, pred)
    return MetricReport(m, b, c, conll(m.f1, b.f1, c.f1))
