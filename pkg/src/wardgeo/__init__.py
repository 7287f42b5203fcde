"""Ward-like hierarchical clustering with soft spatial constraints.

Clusters n observations from one or two dissimilarity matrices (feature
space and constraint space) with observation weights, blending the two
pseudo-inertia criteria through a mixing weight alpha, and provides the
quality diagnostics used to pick alpha.
"""

from .dissim import (
    AdjacencyList,
    DissimMatrix,
    FeatureTable,
    GeoPoints,
    WeightVector,
    adjacency_dissim,
    euclidean_dissim,
    geodesic_dissim,
    normalize_max,
    read_dissim,
    write_dissim,
)
from .errors import DataConsistencyError, ValidationError
from .geo_mixing import MixSpec, hclustgeo, mix_delta
from .kernels import BACKEND as KERNEL_BACKEND
from .quality import (
    QTable,
    centroid_inertia_oracle,
    choice_alpha,
    mixed_within,
    pseudo_inertia,
    q_criterion,
    within_inertia,
)
from .ward_core import (
    DeltaMatrix,
    Dendrogram,
    Partition,
    agglomerate,
    agglomerate_nnchain,
    cut_tree,
    delta_direct,
    delta_singletons,
    lw_update,
)

__version__ = "0.1.0"

__all__ = [
    "AdjacencyList",
    "DataConsistencyError",
    "DeltaMatrix",
    "Dendrogram",
    "DissimMatrix",
    "FeatureTable",
    "GeoPoints",
    "KERNEL_BACKEND",
    "MixSpec",
    "Partition",
    "QTable",
    "ValidationError",
    "WeightVector",
    "adjacency_dissim",
    "agglomerate",
    "agglomerate_nnchain",
    "centroid_inertia_oracle",
    "choice_alpha",
    "cut_tree",
    "delta_direct",
    "delta_singletons",
    "euclidean_dissim",
    "geodesic_dissim",
    "hclustgeo",
    "lw_update",
    "mix_delta",
    "mixed_within",
    "normalize_max",
    "pseudo_inertia",
    "q_criterion",
    "read_dissim",
    "within_inertia",
    "write_dissim",
    "__version__",
]
