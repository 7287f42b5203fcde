"""Weighted Ward-like agglomeration over an aggregation-measure matrix.

The aggregation measure between clusters A and B is the increase of
within-cluster pseudo-inertia caused by merging them.  Between singletons it
is ``w_i*w_j/(w_i+w_j) * d_ij**2``; after a merge it is maintained with the
Lance-Williams recurrence.  Two kernels produce the same hierarchy: a greedy
global-minimum scan (the reference) and a nearest-neighbor chain (the fast
default above ``NAIVE_DEFAULT_LIMIT`` observations).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import kernels
from .dissim import DissimMatrix, WeightVector, as_weights, condensed_size
from .errors import ValidationError

NAIVE_DEFAULT_LIMIT = 64

__all__ = [
    "DeltaMatrix",
    "Dendrogram",
    "Partition",
    "delta_singletons",
    "lw_update",
    "delta_direct",
    "agglomerate",
    "agglomerate_nnchain",
    "agglomerate_auto",
    "cut_tree",
    "write_dendrogram",
    "read_dendrogram",
    "write_partition",
    "read_partition",
    "NAIVE_DEFAULT_LIMIT",
]


@dataclass(frozen=True)
class DeltaMatrix:
    """Condensed pairwise aggregation measures plus per-cluster weights."""

    n: int
    values: np.ndarray
    weights: np.ndarray
    ids: tuple[str, ...] | None = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64).ravel()
        weights = np.asarray(self.weights, dtype=np.float64).ravel()
        if self.n < 2:
            raise ValidationError(f"need at least 2 observations, got n={self.n}")
        if values.shape[0] != condensed_size(self.n):
            raise ValidationError(
                f"condensed length {values.shape[0]} does not match n={self.n}"
            )
        if not np.all(np.isfinite(values)):
            raise ValidationError("aggregation measures must be finite")
        if np.any(values < 0):
            raise ValidationError("aggregation measures must be nonnegative")
        if weights.shape[0] != self.n:
            raise ValidationError(
                f"weight vector length {weights.shape[0]} does not match n={self.n}"
            )
        if np.any(~np.isfinite(weights)) or np.any(weights <= 0):
            raise ValidationError("cluster weights must be positive and finite")
        values = values.copy()
        weights = weights.copy()
        values.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "weights", weights)
        if self.ids is not None:
            ids = tuple(str(x) for x in self.ids)
            if len(ids) != self.n:
                raise ValidationError(f"expected {self.n} ids, got {len(ids)}")
            object.__setattr__(self, "ids", ids)


@dataclass(frozen=True)
class Dendrogram:
    """Full merge history of an agglomeration run.

    ``left``/``right`` reference children by node id: ids ``0..n-1`` are
    leaves, id ``n + m`` is the cluster created by merge ``m``.  Merges are
    stored in non-decreasing height order; the left child is the subtree
    containing the smallest leaf index.
    """

    n: int
    left: np.ndarray
    right: np.ndarray
    heights: np.ndarray
    weights: np.ndarray
    ids: tuple[str, ...] | None = None

    def __post_init__(self):
        n = self.n
        if n < 2:
            raise ValidationError(f"need at least 2 observations, got n={n}")
        left = np.asarray(self.left, dtype=np.int64).ravel()
        right = np.asarray(self.right, dtype=np.int64).ravel()
        heights = np.asarray(self.heights, dtype=np.float64).ravel()
        weights = np.asarray(self.weights, dtype=np.float64).ravel()
        if not (left.shape[0] == right.shape[0] == heights.shape[0] == weights.shape[0] == n - 1):
            raise ValidationError(f"expected {n - 1} merges")
        children = np.concatenate([left, right])
        if children.min() < 0 or children.max() > 2 * n - 3:
            raise ValidationError("child reference out of range")
        counts = np.bincount(children, minlength=2 * n - 2)
        if np.any(counts != 1):
            bad = int(np.flatnonzero(counts != 1)[0])
            raise ValidationError(
                f"node {bad} referenced {counts[bad]} times as a child (expected once)"
            )
        for m in range(n - 1):
            if left[m] >= n + m or right[m] >= n + m:
                raise ValidationError(f"merge {m} references a later merge")
        if np.any(np.diff(heights) < 0):
            bad = int(np.flatnonzero(np.diff(heights) < 0)[0])
            raise ValidationError(
                f"height reversal between merges {bad} and {bad + 1}: "
                f"{heights[bad]!r} > {heights[bad + 1]!r}"
            )
        if not np.all(np.isfinite(heights)):
            raise ValidationError("merge heights must be finite")
        for a in (left, right, heights, weights):
            a.setflags(write=False)
        object.__setattr__(self, "left", left)
        object.__setattr__(self, "right", right)
        object.__setattr__(self, "heights", heights)
        object.__setattr__(self, "weights", weights)
        if self.ids is not None:
            ids = tuple(str(x) for x in self.ids)
            if len(ids) != n:
                raise ValidationError(f"expected {n} ids, got {len(ids)}")
            object.__setattr__(self, "ids", ids)

    def total_height(self) -> float:
        """Compensated sum of merge heights (equals total pseudo-inertia)."""
        return math.fsum(self.heights)

    def members(self, node: int) -> list[int]:
        """Sorted leaf indices contained in a node (leaf or merge id)."""
        out: list[int] = []
        stack = [int(node)]
        while stack:
            v = stack.pop()
            if v < self.n:
                out.append(v)
            else:
                m = v - self.n
                stack.append(int(self.left[m]))
                stack.append(int(self.right[m]))
        out.sort()
        return out

    def leaf_order(self) -> list[int]:
        """Leaf permutation from in-order traversal (no branch crossings)."""
        out: list[int] = []
        stack = [2 * self.n - 2]
        while stack:
            v = stack.pop()
            if v < self.n:
                out.append(v)
            else:
                m = v - self.n
                stack.append(int(self.right[m]))
                stack.append(int(self.left[m]))
        return out

    def to_json_dict(self) -> dict:
        def ref(v: int) -> dict:
            return {"leaf": int(v)} if v < self.n else {"merge": int(v - self.n)}

        return {
            "n": self.n,
            "ids": list(self.ids) if self.ids is not None else None,
            "merges": [
                {
                    "left": ref(self.left[m]),
                    "right": ref(self.right[m]),
                    "height": float(self.heights[m]),
                    "weight": float(self.weights[m]),
                }
                for m in range(self.n - 1)
            ],
        }

    @classmethod
    def from_json_dict(cls, obj: dict) -> "Dendrogram":
        try:
            n = int(obj["n"])
            merges = obj["merges"]
            ids = obj.get("ids")

            def unref(r: dict) -> int:
                return int(r["leaf"]) if "leaf" in r else n + int(r["merge"])

            left = [unref(m["left"]) for m in merges]
            right = [unref(m["right"]) for m in merges]
            heights = [float(m["height"]) for m in merges]
            weights = [float(m["weight"]) for m in merges]
        except (KeyError, TypeError) as e:
            raise ValidationError(f"malformed dendrogram JSON: {e}") from None
        return cls(n=n, left=np.array(left), right=np.array(right),
                   heights=np.array(heights), weights=np.array(weights), ids=ids)


@dataclass(frozen=True)
class Partition:
    """Assignment of each observation to one of K clusters, labels 1..K."""

    labels: np.ndarray
    k: int
    ids: tuple[str, ...] | None = None

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64).ravel()
        if self.k < 1:
            raise ValidationError(f"cluster count must be positive, got {self.k}")
        if labels.size == 0:
            raise ValidationError("empty partition")
        if labels.min() < 1 or labels.max() > self.k:
            raise ValidationError(f"labels must lie in 1..{self.k}")
        present = np.unique(labels)
        if present.size != self.k:
            missing = sorted(set(range(1, self.k + 1)) - set(present.tolist()))
            raise ValidationError(f"labels {missing} are unused")
        labels = labels.copy()
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)
        if self.ids is not None:
            ids = tuple(str(x) for x in self.ids)
            if len(ids) != labels.size:
                raise ValidationError(f"expected {labels.size} ids, got {len(ids)}")
            object.__setattr__(self, "ids", ids)

    @property
    def n(self) -> int:
        return self.labels.shape[0]

    def cluster_members(self, label: int) -> np.ndarray:
        return np.flatnonzero(self.labels == label)


def delta_singletons(d: DissimMatrix, wt: WeightVector | None = None) -> DeltaMatrix:
    """Initial aggregation measures ``w_i*w_j/(w_i+w_j) * d_ij**2``."""
    wt = as_weights(wt, d.n)
    w = wt.weights
    ii, jj = np.triu_indices(d.n, 1)
    values = (w[ii] * w[jj] / (w[ii] + w[jj])) * np.square(d.values)
    return DeltaMatrix(n=d.n, values=values, weights=w, ids=d.ids)


def lw_update(d_ad: float, d_bd: float, d_ab: float,
              mu_a: float, mu_b: float, mu_d: float) -> float:
    """Lance-Williams recurrence: measure between a merged cluster and D."""
    if min(mu_a, mu_b, mu_d) <= 0:
        raise ValidationError("cluster weights must be positive")
    t = mu_a + mu_b + mu_d
    return ((mu_a + mu_d) * d_ad + (mu_b + mu_d) * d_bd - mu_d * d_ab) / t


def delta_direct(d: DissimMatrix, wt, a_members, b_members) -> float:
    """Aggregation measure from first principles: I(A u B) - I(A) - I(B).

    Reference oracle for the Lance-Williams propagation; quadratic in the
    cluster sizes.
    """
    from .quality import pseudo_inertia

    a = set(int(i) for i in a_members)
    b = set(int(i) for i in b_members)
    if not a or not b:
        raise ValidationError("cluster index sets must be nonempty")
    if a & b:
        raise ValidationError(f"cluster index sets overlap: {sorted(a & b)}")
    wt = as_weights(wt, d.n)
    both = sorted(a | b)
    return (pseudo_inertia(d, wt, both)
            - pseudo_inertia(d, wt, sorted(a))
            - pseudo_inertia(d, wt, sorted(b)))


def _assemble(n, rep_a, rep_b, heights, mweights, ids) -> Dendrogram:
    """Order raw kernel merges by height and relabel slots into node ids."""
    order = np.argsort(heights, kind="stable")
    parent = np.arange(n)
    label = np.arange(n)
    minleaf = np.arange(n)

    def find(s: int) -> int:
        root = s
        while parent[root] != root:
            root = parent[root]
        while parent[s] != root:
            parent[s], s = root, parent[s]
        return root

    left = np.empty(n - 1, dtype=np.int64)
    right = np.empty(n - 1, dtype=np.int64)
    out_h = np.empty(n - 1)
    out_w = np.empty(n - 1)
    for t, k in enumerate(order):
        ra = find(int(rep_a[k]))
        rb = find(int(rep_b[k]))
        if minleaf[ra] <= minleaf[rb]:
            left[t], right[t] = label[ra], label[rb]
        else:
            left[t], right[t] = label[rb], label[ra]
        out_h[t] = heights[k]
        out_w[t] = mweights[k]
        parent[rb] = ra
        label[ra] = n + t
        minleaf[ra] = min(minleaf[ra], minleaf[rb])
    return Dendrogram(n=n, left=left, right=right, heights=out_h, weights=out_w, ids=ids)


def agglomerate(delta: DeltaMatrix) -> Dendrogram:
    """Greedy reference kernel: merge the globally closest pair each step."""
    rep_a, rep_b, heights, mweights = kernels.naive_merge(delta.values, delta.weights)
    return _assemble(delta.n, rep_a, rep_b, heights, mweights, delta.ids)


def agglomerate_nnchain(delta: DeltaMatrix) -> Dendrogram:
    """Nearest-neighbor-chain kernel; same hierarchy in O(n^2) time."""
    rep_a, rep_b, heights, mweights = kernels.nn_chain_merge(delta.values, delta.weights)
    return _assemble(delta.n, rep_a, rep_b, heights, mweights, delta.ids)


def agglomerate_auto(delta: DeltaMatrix, kernel: str = "auto") -> Dendrogram:
    """Dispatch to 'naive', 'chain', or pick by size ('auto')."""
    if kernel == "auto":
        kernel = "naive" if delta.n <= NAIVE_DEFAULT_LIMIT else "chain"
    if kernel == "naive":
        return agglomerate(delta)
    if kernel == "chain":
        return agglomerate_nnchain(delta)
    raise ValidationError(f"unknown kernel {kernel!r} (expected auto, naive, or chain)")


def cut_tree(t: Dendrogram, k: int) -> Partition:
    """Partition from undoing the last k-1 merges; labels 1..k by smallest leaf."""
    n = t.n
    if not 1 <= k <= n:
        raise ValidationError(f"cluster count {k} out of range 1..{n}")
    parent = np.arange(n)

    def find(s: int) -> int:
        root = s
        while parent[root] != root:
            root = parent[root]
        while parent[s] != root:
            parent[s], s = root, parent[s]
        return root

    node_root = np.empty(2 * n - 1, dtype=np.int64)
    node_root[:n] = np.arange(n)
    for m in range(n - k):
        ra = find(int(node_root[t.left[m]]))
        rb = find(int(node_root[t.right[m]]))
        parent[rb] = ra
        node_root[n + m] = ra
    labels = np.zeros(n, dtype=np.int64)
    next_label = 0
    by_root: dict[int, int] = {}
    for i in range(n):
        root = find(i)
        if root not in by_root:
            next_label += 1
            by_root[root] = next_label
        labels[i] = by_root[root]
    return Partition(labels=labels, k=k, ids=t.ids)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def write_dendrogram(t: Dendrogram, path) -> None:
    Path(path).write_text(
        json.dumps(t.to_json_dict(), indent=2) + "\n", encoding="utf-8"
    )


def read_dendrogram(path) -> Dendrogram:
    path = Path(path)
    try:
        obj = json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise ValidationError(f"{path}: invalid JSON: {e}") from None
    return Dendrogram.from_json_dict(obj)


def write_partition(p: Partition, path) -> None:
    ids = p.ids if p.ids is not None else tuple(str(i) for i in range(p.n))
    lines = ["id,label"]
    lines.extend(f"{ids[i]},{p.labels[i]}" for i in range(p.n))
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_partition(path) -> Partition:
    path = Path(path)
    lines = [ln for ln in path.read_text(encoding="utf-8").splitlines() if ln.strip()]
    if not lines or [t.strip().lower() for t in lines[0].split(",")] != ["id", "label"]:
        raise ValidationError(f"{path}:1: expected header 'id,label'")
    ids, labels = [], []
    for lineno, ln in enumerate(lines[1:], start=2):
        toks = [t.strip() for t in ln.split(",")]
        if len(toks) != 2:
            raise ValidationError(f"{path}:{lineno}: expected 2 fields, got {len(toks)}")
        ids.append(toks[0])
        try:
            labels.append(int(toks[1]))
        except ValueError:
            raise ValidationError(f"{path}:{lineno}: label is not an integer: {toks[1]!r}") from None
    return Partition(labels=np.array(labels), k=max(labels), ids=ids)
