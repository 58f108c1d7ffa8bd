"""HDBSCAN over cosine distances, written out step by step.

core distances -> mutual reachability -> Prim MST -> single-linkage merge
tree -> condensed tree -> excess-of-mass selection -> epsilon horizon.

Conventions (all deterministic):

* the core distance counts the point itself, so ``min_samples=1`` gives 0 and
  mutual reachability collapses to the raw distance;
* Prim starts from point 0 and always takes the lowest-index vertex among
  equal candidates; merge order is MST weight, then MST insertion order;
* excess of mass keeps the parent when its stability ties its children's sum;
* any selected cluster born below ``epsilon`` is replaced by its lowest
  ancestor born at or above ``epsilon`` (the root counts as born at infinity);
* the root is only a candidate when it never splits, or via the epsilon rule;
  points shed directly by a selected root only count as members when they
  left at a distance <= epsilon.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DENSE_LIMIT = 6000
MIN_DIST = 1e-12


def pairwise_distances(X) -> np.ndarray:
    """Cosine distance ``1 - <x, y>`` between unit rows, clipped to [0, 2]."""
    X = np.asarray(X, dtype=np.float64)
    D = 1.0 - X @ X.T
    D = 0.5 * (D + D.T)
    np.clip(D, 0.0, 2.0, out=D)
    np.fill_diagonal(D, 0.0)
    return D


def core_distances(D: np.ndarray, min_samples: int) -> np.ndarray:
    n = D.shape[0]
    if min_samples <= 1 or n == 0:
        return np.zeros(n)
    k = min(min_samples, n) - 1
    return np.partition(D, k, axis=1)[:, k]


def mutual_reachability(D: np.ndarray, core: np.ndarray) -> np.ndarray:
    return np.maximum(D, np.maximum.outer(core, core))


def _rows_from_points(X: np.ndarray, core: np.ndarray):
    def row(i: int) -> np.ndarray:
        r = 1.0 - X @ X[i]
        np.clip(r, 0.0, 2.0, out=r)
        r[i] = 0.0
        return np.maximum(r, np.maximum(core, core[i]))

    return row


def prim_mst(row, n: int) -> np.ndarray:
    """MST edges as an ``(n-1, 3)`` array of ``(u, v, weight)``.

    ``row(i)`` returns the distances from point ``i`` to every point.
    """
    edges = np.empty((max(n - 1, 0), 3))
    if n < 2:
        return edges
    in_tree = np.zeros(n, dtype=bool)
    best = np.full(n, np.inf)
    src = np.zeros(n, dtype=np.int64)
    cur = 0
    for k in range(n - 1):
        in_tree[cur] = True
        r = row(cur)
        better = (r < best) & ~in_tree
        best[better] = r[better]
        src[better] = cur
        cand = np.where(in_tree, np.inf, best)
        nxt = int(np.argmin(cand))
        edges[k] = (src[nxt], nxt, best[nxt])
        cur = nxt
    return edges


def single_linkage(edges: np.ndarray, n: int) -> np.ndarray:
    """scipy-style linkage matrix ``(a, b, distance, size)`` from MST edges."""
    order = np.argsort(edges[:, 2], kind="stable")
    parent = np.arange(2 * n - 1)
    size = np.ones(2 * n - 1, dtype=np.int64)

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    Z = np.empty((max(n - 1, 0), 4))
    for k, e in enumerate(order):
        u, v, w = edges[e]
        a, b = find(int(u)), find(int(v))
        new = n + k
        parent[a] = parent[b] = new
        size[new] = size[a] + size[b]
        Z[k] = (min(a, b), max(a, b), w, size[new])
    return Z


@dataclass
class CondensedTree:
    """Condensed hierarchy. Cluster ids start at ``n_points``; the root is ``n_points``.

    ``rows`` holds ``(parent_cluster, child, lambda, child_size)`` where the
    child is either a point (< n_points) falling out of the parent or a
    cluster born from it. ``lambda`` is ``1 / distance``.
    """

    n_points: int
    rows: list[tuple[int, int, float, int]] = field(default_factory=list)

    @property
    def root(self) -> int:
        return self.n_points

    def clusters(self) -> list[int]:
        kids = [c for _, c, _, _ in self.rows if c >= self.n_points]
        return [self.root] + kids

    def parent_of(self) -> dict[int, int]:
        return {c: p for p, c, _, _ in self.rows if c >= self.n_points}

    def children_of(self) -> dict[int, list[int]]:
        out: dict[int, list[int]] = {c: [] for c in self.clusters()}
        for p, c, _, _ in self.rows:
            if c >= self.n_points:
                out[p].append(c)
        return out

    def birth_lambda(self) -> dict[int, float]:
        out = {self.root: 0.0}
        for _, c, lam, _ in self.rows:
            if c >= self.n_points:
                out[c] = lam
        return out

    def points_of(self, cluster: int) -> list[int]:
        kids = self.children_of()
        stack, pts = [cluster], []
        while stack:
            c = stack.pop()
            pts.extend(ch for p, ch, _, _ in self.rows if p == c and ch < self.n_points)
            stack.extend(kids[c])
        return sorted(pts)


def _lambda(dist: float) -> float:
    return 1.0 / max(dist, MIN_DIST)


def condense_tree(Z: np.ndarray, n: int, min_cluster_size: int) -> CondensedTree:
    tree = CondensedTree(n)
    if n < 2:
        if n == 1:
            tree.rows.append((n, 0, 0.0, 1))
        return tree
    top = 2 * n - 2
    left = Z[:, 0].astype(np.int64)
    right = Z[:, 1].astype(np.int64)

    def size(node: int) -> int:
        return 1 if node < n else int(Z[node - n, 3])

    def leaves(node: int) -> list[int]:
        stack, out = [node], []
        while stack:
            x = stack.pop()
            if x < n:
                out.append(x)
            else:
                stack.extend((right[x - n], left[x - n]))
        return out

    label = {top: n}
    next_label = n + 1
    queue = [top]
    for node in queue:
        if node < n:
            continue
        i = node - n
        lam = _lambda(Z[i, 2])
        a, b = int(left[i]), int(right[i])
        cur = label[node]
        big_a, big_b = size(a) >= min_cluster_size, size(b) >= min_cluster_size
        if big_a and big_b:
            for child in (a, b):
                label[child] = next_label
                tree.rows.append((cur, next_label, float(lam), size(child)))
                next_label += 1
                queue.append(child)
            continue
        for child, big in ((a, big_a), (b, big_b)):
            if big:
                label[child] = cur
                queue.append(child)
            else:
                for p in leaves(child):
                    tree.rows.append((cur, p, float(lam), 1))
    return tree


def stabilities(tree: CondensedTree) -> dict[int, float]:
    birth = tree.birth_lambda()
    stab = {c: 0.0 for c in tree.clusters()}
    for parent, _, lam, sz in tree.rows:
        stab[parent] += (lam - birth[parent]) * sz
    return stab


def select_clusters(tree: CondensedTree, epsilon: float) -> list[int]:
    clusters = tree.clusters()
    kids = tree.children_of()
    parent = tree.parent_of()
    stab = stabilities(tree)
    root = tree.root

    selected = {c: False for c in clusters}
    best = dict(stab)
    # cluster ids grow downwards, so descending order is bottom-up
    for c in sorted(clusters, reverse=True):
        if not kids[c]:
            selected[c] = True
            continue
        if c == root:
            break
        below = sum(best[k] for k in kids[c])
        if below > best[c]:
            best[c] = below
        else:
            selected[c] = True
            stack = list(kids[c])
            while stack:
                d = stack.pop()
                selected[d] = False
                stack.extend(kids[d])
    chosen = [c for c in clusters if selected[c]]

    birth = tree.birth_lambda()

    def birth_dist(c: int) -> float:
        return np.inf if birth[c] == 0 else 1.0 / birth[c]

    lifted = set()
    for c in chosen:
        while birth_dist(c) < epsilon:
            c = parent[c]
        lifted.add(c)

    def has_selected_ancestor(c: int) -> bool:
        while c in parent:
            c = parent[c]
            if c in lifted:
                return True
        return False

    return sorted(c for c in lifted if not has_selected_ancestor(c))


def label_points(
    tree: CondensedTree, chosen: list[int], epsilon: float, min_cluster_size: int
) -> np.ndarray:
    n = tree.n_points
    labels = np.full(n, -1, dtype=np.int64)
    parent = tree.parent_of()
    rank = {c: i for i, c in enumerate(chosen)}
    for p_cluster, child, lam, _ in tree.rows:
        if child >= n:
            continue
        c = p_cluster
        while c not in rank and c in parent:
            c = parent[c]
        if c not in rank:
            continue
        if c == tree.root == p_cluster and 1.0 / lam > epsilon:
            continue
        labels[child] = rank[c]
    # a filtered root can end up under-sized
    counts = np.bincount(labels[labels >= 0], minlength=len(chosen))
    small = np.flatnonzero(counts < min_cluster_size)
    if small.size:
        labels[np.isin(labels, small)] = -1
    _, labels_compact = np.unique(labels, return_inverse=True)
    if (labels >= 0).all():
        return labels_compact.astype(np.int64)
    return np.where(labels >= 0, labels_compact - 1, -1).astype(np.int64)


@dataclass
class HDBSCANResult:
    labels: np.ndarray
    tree: CondensedTree
    selected: list[int]
    mst: np.ndarray


def hdbscan(
    X,
    min_cluster_size: int = 2,
    min_samples: int = 1,
    epsilon: float = 0.5,
    distances: np.ndarray | None = None,
) -> HDBSCANResult:
    """Cluster unit vectors (or a precomputed distance matrix).

    ``labels[i]`` is -1 for noise, otherwise a cluster index numbered in
    condensed-tree order.
    """
    if distances is not None:
        D = np.asarray(distances, dtype=np.float64)
        n = D.shape[0]
        core = core_distances(D, min_samples)
        M = mutual_reachability(D, core)
        row = M.__getitem__
    else:
        X = np.asarray(X, dtype=np.float64)
        n = X.shape[0]
        if n <= DENSE_LIMIT:
            D = pairwise_distances(X)
            core = core_distances(D, min_samples)
            M = mutual_reachability(D, core) if min_samples > 1 else D
            row = M.__getitem__
        else:
            core = _chunked_core_distances(X, min_samples)
            row = _rows_from_points(X, core)
    if n == 0:
        return HDBSCANResult(np.zeros(0, dtype=np.int64), CondensedTree(0), [], np.empty((0, 3)))
    edges = prim_mst(row, n)
    Z = single_linkage(edges, n)
    tree = condense_tree(Z, n, min_cluster_size)
    if n < min_cluster_size:
        return HDBSCANResult(np.full(n, -1, dtype=np.int64), tree, [], edges)
    chosen = select_clusters(tree, epsilon)
    labels = label_points(tree, chosen, epsilon, min_cluster_size)
    return HDBSCANResult(labels, tree, chosen, edges)


def _chunked_core_distances(X: np.ndarray, min_samples: int, chunk: int = 2048) -> np.ndarray:
    n = X.shape[0]
    if min_samples <= 1:
        return np.zeros(n)
    k = min(min_samples, n) - 1
    out = np.empty(n)
    for s in range(0, n, chunk):
        D = np.clip(1.0 - X[s : s + chunk] @ X.T, 0.0, 2.0)
        D[np.arange(D.shape[0]), np.arange(s, s + D.shape[0])] = 0.0
        out[s : s + chunk] = np.partition(D, k, axis=1)[:, k]
    return out
