"""Constrained clustering: blend two aggregation matrices and agglomerate.

``hclustgeo`` mirrors the classic two-matrix interface: a feature-space
matrix D0, an optional constraint-space matrix D1 (geographic distances,
1 - adjacency, ...), and a mixing weight alpha.  The agglomeration criterion
is the convex combination of the two pseudo-inertia increases, which is NOT
the same thing as clustering the blended dissimilarity (1-alpha)*D0+alpha*D1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dissim import DissimMatrix, as_weights, normalize_max
from .errors import ValidationError
from .ward_core import DeltaMatrix, Dendrogram, agglomerate_auto, delta_singletons

__all__ = ["MixSpec", "mix_delta", "hclustgeo"]


@dataclass(frozen=True)
class MixSpec:
    """Mixing weight for the constraint matrix, plus the rescaling switch."""

    alpha: float
    scale: bool = True

    def __post_init__(self):
        a = float(self.alpha)
        if not np.isfinite(a) or not 0.0 <= a <= 1.0:
            raise ValidationError(f"alpha must lie in [0, 1], got {self.alpha!r}")
        object.__setattr__(self, "alpha", a)


def mix_delta(delta0: DeltaMatrix, delta1: DeltaMatrix, alpha: float) -> DeltaMatrix:
    """Elementwise convex combination (1-alpha)*delta0 + alpha*delta1."""
    alpha = MixSpec(alpha).alpha
    if delta0.n != delta1.n:
        raise ValidationError(
            f"matrix sizes differ: {delta0.n} vs {delta1.n}"
        )
    if not np.array_equal(delta0.weights, delta1.weights):
        raise ValidationError(
            "aggregation matrices were built from different weight vectors"
        )
    values = (1.0 - alpha) * delta0.values + alpha * delta1.values
    return DeltaMatrix(n=delta0.n, values=values, weights=delta0.weights,
                       ids=delta0.ids or delta1.ids)


def hclustgeo(d0: DissimMatrix, d1: DissimMatrix | None = None,
              alpha: float = 0.0, scale: bool = True, wt=None,
              kernel: str = "auto") -> Dendrogram:
    """Ward-like hierarchy of D0, optionally constrained by D1.

    Parameters
    ----------
    d0 : DissimMatrix
        Feature-space dissimilarities.
    d1 : DissimMatrix, optional
        Constraint-space dissimilarities over the same observations.
        Without it the clustering uses D0 alone and alpha must be 0.
    alpha : float
        Weight of the constraint criterion, in [0, 1].
    scale : bool
        Divide each matrix by its own maximum before building the
        aggregation measures (default, recommended whenever the two
        matrices have different magnitudes).
    wt : array-like or WeightVector, optional
        Observation weights; uniform 1/n when omitted.
    kernel : str
        'auto' (default), 'naive', or 'chain'.
    """
    spec = MixSpec(alpha=alpha, scale=scale)
    if d1 is None and spec.alpha != 0.0:
        raise ValidationError("alpha != 0 requires a constraint matrix d1")
    if d1 is not None and d1.n != d0.n:
        raise ValidationError(f"matrix sizes differ: {d0.n} vs {d1.n}")
    wt = as_weights(wt, d0.n)
    if spec.scale:
        d0 = normalize_max(d0)
        if d1 is not None:
            d1 = normalize_max(d1)
    delta = delta_singletons(d0, wt)
    if d1 is not None:
        delta = mix_delta(delta, delta_singletons(d1, wt), spec.alpha)
    return agglomerate_auto(delta, kernel=kernel)
