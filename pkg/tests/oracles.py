"""Brute-force reference implementations used only by the tests."""

import itertools
import math

import numpy as np


def eps_components(D, eps):
    """Connected components of the graph with an edge wherever d <= eps."""
    n = len(D)
    comp = [-1] * n
    k = 0
    for s in range(n):
        if comp[s] >= 0:
            continue
        comp[s] = k
        stack = [s]
        while stack:
            i = stack.pop()
            for j in range(n):
                if comp[j] < 0 and D[i][j] <= eps:
                    comp[j] = k
                    stack.append(j)
        k += 1
    return comp


def check_eps_structure(D, labels, eps):
    """Return a list of violations; noise (-1) counts as its own singleton."""
    n = len(D)
    lab = [l if l >= 0 else ("noise", i) for i, l in enumerate(labels)]
    comp = eps_components(D, eps)
    problems = []
    for i in range(n):
        for j in range(i + 1, n):
            if D[i][j] <= eps and lab[i] != lab[j]:
                problems.append(("split pair", i, j))
            if comp[i] == comp[j] and lab[i] != lab[j]:
                problems.append(("split component", i, j))
    return problems


def five_point_vectors():
    """Pair A, pair B and an isolated C, each pair at cosine distance 0.05."""
    t = math.acos(0.95) / 2
    c, s = math.cos(t), math.sin(t)
    return np.array(
        [
            [c, s, 0.0, 0.0, 0.0],
            [c, -s, 0.0, 0.0, 0.0],
            [0.0, 0.0, c, s, 0.0],
            [0.0, 0.0, c, -s, 0.0],
            [0.0, 0.0, 0.0, 0.0, 1.0],
        ]
    )


# -- coreference metrics by enumeration -------------------------------------


def _owner(part):
    return {m: k for k, c in enumerate(part) for m in c}


def muc_by_links(gold, pred):
    """Count the spanning links of each key that survive in the response."""

    def side(keys, resp):
        own = _owner(resp)
        num = den = 0
        for c in keys:
            pieces = set()
            for m in c:
                pieces.add(own.get(m, ("solo", m)))
            num += len(c) - len(pieces)
            den += len(c) - 1
        return num / den if den else 0.0

    r, p = side(gold, pred), side(pred, gold)
    return p, r, (2 * p * r / (p + r) if p + r else 0.0)


def b3_by_mention(gold, pred):
    go, po = _owner(gold), _owner(pred)
    mentions = sorted(go)
    p = r = 0.0
    for m in mentions:
        gc = {x for x in mentions if go[x] == go[m]}
        pc = {x for x in mentions if po[x] == po[m]}
        both = len(gc & pc)
        p += both / len(pc)
        r += both / len(gc)
    p, r = p / len(mentions), r / len(mentions)
    return p, r, (2 * p * r / (p + r) if p + r else 0.0)


def ceafe_by_permutation(gold, pred):
    gold, pred = [set(c) for c in gold], [set(c) for c in pred]
    small, large = (gold, pred) if len(gold) <= len(pred) else (pred, gold)
    best = 0.0
    for perm in itertools.permutations(range(len(large)), len(small)):
        total = sum(
            2 * len(small[i] & large[j]) / (len(small[i]) + len(large[j]))
            for i, j in enumerate(perm)
        )
        best = max(best, total)
    p, r = best / len(pred), best / len(gold)
    return p, r, (2 * p * r / (p + r) if p + r else 0.0)
