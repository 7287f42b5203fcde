"""Pseudo-inertia computations and the alpha-selection diagnostics.

The pseudo-inertia of a cluster C is ``sum_{i,j in C} w_i w_j d_ij^2 / (2 mu)``
with ``mu`` the cluster weight; it reduces to the ordinary centroid inertia
when d is Euclidean.  All accumulations here use compensated summation
(math.fsum) because these routines double as the reference oracle for the
fast Lance-Williams path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from decimal import Decimal, InvalidOperation
from pathlib import Path

import numpy as np

from .dissim import DissimMatrix, FeatureTable, as_weights, condensed_rank, normalize_max
from .errors import ValidationError
from .geo_mixing import mix_delta
from .ward_core import Partition, agglomerate_auto, cut_tree, delta_singletons

ANCHOR_TOL = 1e-9

__all__ = [
    "QTable",
    "pseudo_inertia",
    "within_inertia",
    "mixed_within",
    "q_criterion",
    "choice_alpha",
    "centroid_inertia_oracle",
    "parse_grid",
    "write_qtable",
]


def _member_indices(members, n: int) -> np.ndarray:
    idx = np.asarray(sorted(int(i) for i in members), dtype=np.int64)
    if idx.size == 0:
        raise ValidationError("member set is empty")
    if idx[0] < 0 or idx[-1] >= n:
        raise ValidationError(f"member index out of range 0..{n - 1}")
    if np.unique(idx).size != idx.size:
        raise ValidationError("member set contains duplicates")
    return idx


def _pair_terms(d: DissimMatrix, w: np.ndarray, idx: np.ndarray) -> np.ndarray:
    """w_i * w_j * d_ij^2 over member pairs i<j."""
    ii, jj = np.triu_indices(idx.size, 1)
    gi, gj = idx[ii], idx[jj]
    ranks = condensed_rank(d.n, gi, gj)
    return w[gi] * w[gj] * np.square(d.values[ranks])


def pseudo_inertia(d: DissimMatrix, wt, members) -> float:
    """Pseudo-inertia of one cluster; 0 for singletons."""
    wt = as_weights(wt, d.n)
    idx = _member_indices(members, d.n)
    if idx.size == 1:
        return 0.0
    mu = math.fsum(wt.weights[idx])
    return math.fsum(_pair_terms(d, wt.weights, idx)) / mu


def within_inertia(d: DissimMatrix, wt, p: Partition) -> float:
    """Sum of per-cluster pseudo-inertias of a partition."""
    wt = as_weights(wt, d.n)
    if p.n != d.n:
        raise ValidationError(f"partition covers {p.n} observations, matrix has {d.n}")
    return math.fsum(
        pseudo_inertia(d, wt, p.cluster_members(label))
        for label in range(1, p.k + 1)
    )


def _mixed_cluster_inertia(d0, d1, w, idx, alpha: float) -> float:
    # one pass over the blended squared dissimilarities, so the linearity
    # identity against (1-a)*I0 + a*I1 is a real floating-point check
    if idx.size == 1:
        return 0.0
    ii, jj = np.triu_indices(idx.size, 1)
    gi, gj = idx[ii], idx[jj]
    ranks = condensed_rank(d0.n, gi, gj)
    blended = (1.0 - alpha) * np.square(d0.values[ranks]) + alpha * np.square(d1.values[ranks])
    mu = math.fsum(w[idx])
    return math.fsum(w[gi] * w[gj] * blended) / mu


def mixed_within(d0: DissimMatrix, d1: DissimMatrix, wt, p: Partition,
                 alpha: float) -> float:
    """Mixed within-cluster pseudo-inertia of a partition.

    Equals ``(1-alpha)*within_inertia(d0, ...) + alpha*within_inertia(d1, ...)``
    up to rounding; computed in a single blended pass.
    """
    if d0.n != d1.n:
        raise ValidationError(f"matrix sizes differ: {d0.n} vs {d1.n}")
    if not 0.0 <= alpha <= 1.0:
        raise ValidationError(f"alpha must lie in [0, 1], got {alpha!r}")
    wt = as_weights(wt, d0.n)
    if p.n != d0.n:
        raise ValidationError(f"partition covers {p.n} observations, matrix has {d0.n}")
    return math.fsum(
        _mixed_cluster_inertia(d0, d1, wt.weights, p.cluster_members(label), alpha)
        for label in range(1, p.k + 1)
    )


def q_criterion(d: DissimMatrix, wt, p: Partition) -> float:
    """Proportion of total pseudo-inertia explained: 1 - W(P_K)/W(P_1)."""
    wt = as_weights(wt, d.n)
    total = pseudo_inertia(d, wt, range(d.n))
    if total <= 0.0:
        raise ValidationError(
            "total pseudo-inertia is zero (all observations identical)"
        )
    return 1.0 - within_inertia(d, wt, p) / total


def centroid_inertia_oracle(features: FeatureTable, wt, members) -> float:
    """Euclidean-case reference: weighted inertia around the center of gravity."""
    w = as_weights(wt, features.n).weights
    idx = _member_indices(members, features.n)
    x = features.values[idx]
    wm = w[idx]
    mu = math.fsum(wm)
    center = (wm[:, None] * x).sum(axis=0) / mu
    return math.fsum(wm * np.square(x - center).sum(axis=1))


@dataclass(frozen=True)
class QTable:
    """Per-grid-point quality of the K-cluster partitions.

    ``q0``/``q1`` are the explained-inertia proportions under each matrix;
    the starred columns renormalize them by their anchor value (alpha=0 for
    q0, alpha=1 for q1).  Anchor columns are NaN when the anchor value is 0.
    """

    grid: tuple[float, ...]
    q0: np.ndarray
    q1: np.ndarray
    k: int
    q0norm: np.ndarray | None = None
    q1norm: np.ndarray | None = None

    def __post_init__(self):
        grid = tuple(float(a) for a in self.grid)
        if len(grid) < 1:
            raise ValidationError("empty alpha grid")
        if any(not 0.0 <= a <= 1.0 for a in grid):
            raise ValidationError("grid values must lie in [0, 1]")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ValidationError("grid values must be strictly increasing")
        object.__setattr__(self, "grid", grid)
        for name in ("q0", "q1", "q0norm", "q1norm"):
            arr = getattr(self, name)
            if arr is None:
                continue
            arr = np.asarray(arr, dtype=np.float64).ravel()
            if arr.shape[0] != len(grid):
                raise ValidationError(f"{name} length does not match grid")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def __len__(self) -> int:
        return len(self.grid)


def parse_grid(spec: str) -> list[float]:
    """Parse 'start:stop:step' into an inclusive, exactly-decimal grid."""
    parts = spec.split(":")
    if len(parts) != 3:
        raise ValidationError(f"grid must be start:stop:step, got {spec!r}")
    try:
        start, stop, step = (Decimal(p) for p in parts)
    except InvalidOperation:
        raise ValidationError(f"grid values must be decimal numbers: {spec!r}") from None
    if step <= 0:
        raise ValidationError("grid step must be positive")
    if stop < start:
        raise ValidationError("grid stop must not precede start")
    count = int(round(float((stop - start) / step)))
    if abs(float(start + count * step - stop)) > ANCHOR_TOL:
        raise ValidationError(f"grid step does not divide the range: {spec!r}")
    values = [float(start + k * step) for k in range(count + 1)]
    if values[0] < 0.0 or values[-1] > 1.0:
        raise ValidationError("grid must stay within [0, 1]")
    return values


def _anchor_index(grid, value: float) -> int | None:
    for j, a in enumerate(grid):
        if abs(a - value) <= ANCHOR_TOL:
            return j
    return None


def choice_alpha(d0: DissimMatrix, d1: DissimMatrix, grid, k: int, wt=None,
                 scale: bool = True, kernel: str = "auto",
                 normalize: bool = True) -> QTable:
    """Evaluate the K-cluster quality trade-off over an alpha grid.

    For each grid value the mixed hierarchy is built, cut at K, and scored
    with the explained-inertia proportions under D0 and D1.  Normalization
    requires 0 and 1 in the grid (they anchor the starred columns).
    """
    if d0.n != d1.n:
        raise ValidationError(f"matrix sizes differ: {d0.n} vs {d1.n}")
    n = d0.n
    if not 2 <= k <= n:
        raise ValidationError(f"cluster count {k} out of range 2..{n}")
    grid = [float(a) for a in grid]
    wt = as_weights(wt, n)
    if scale:
        d0 = normalize_max(d0)
        d1 = normalize_max(d1)
    i0 = _anchor_index(grid, 0.0)
    i1 = _anchor_index(grid, 1.0)
    if normalize and (i0 is None or i1 is None):
        raise ValidationError(
            "normalized output requires both 0 and 1 in the alpha grid"
        )
    delta0 = delta_singletons(d0, wt)
    delta1 = delta_singletons(d1, wt)
    q0 = np.empty(len(grid))
    q1 = np.empty(len(grid))
    for j, alpha in enumerate(grid):
        tree = agglomerate_auto(mix_delta(delta0, delta1, alpha), kernel=kernel)
        part = cut_tree(tree, k)
        q0[j] = q_criterion(d0, wt, part)
        q1[j] = q_criterion(d1, wt, part)
    q0norm = q1norm = None
    if normalize:
        q0norm = q0 / q0[i0] if q0[i0] != 0.0 else np.full(len(grid), np.nan)
        q1norm = q1 / q1[i1] if q1[i1] != 0.0 else np.full(len(grid), np.nan)
    return QTable(grid=tuple(grid), q0=q0, q1=q1, k=k, q0norm=q0norm, q1norm=q1norm)


def _fmt7(x: float) -> str:
    return "NA" if math.isnan(x) else f"{x:.7g}"


def write_qtable(qt: QTable, path) -> None:
    """CSV columns alpha,Q0,Q1,Q0norm,Q1norm at 7 significant digits."""
    lines = ["alpha,Q0,Q1,Q0norm,Q1norm"]
    for j, alpha in enumerate(qt.grid):
        q0n = qt.q0norm[j] if qt.q0norm is not None else math.nan
        q1n = qt.q1norm[j] if qt.q1norm is not None else math.nan
        lines.append(
            f"{alpha:.7g},{_fmt7(qt.q0[j])},{_fmt7(qt.q1[j])},{_fmt7(q0n)},{_fmt7(q1n)}"
        )
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")
