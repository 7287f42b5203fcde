import os
from pathlib import Path

import numpy as np
import pytest

from wardgeo.dissim import (
    DissimMatrix,
    WeightVector,
    condensed_size,
    read_dissim,
    read_feature_table,
    read_weights,
)

ESTUARY_ENV = "WARDGEO_ESTUARY_DIR"


def estuary_dir() -> Path:
    root = os.environ.get(ESTUARY_ENV)
    if root:
        return Path(root)
    return Path(__file__).resolve().parent.parent / "data" / "estuary"


class EstuaryData:
    """Lazy view over the exported reference dataset (see scripts/export_estuary.R)."""

    def __init__(self, root: Path):
        self.root = root
        self.features = read_feature_table(root / "dat.csv")
        self.d_geo = read_dissim(root / "d_geo.csv", format="square")
        self.weights = read_weights(root / "weights.csv")

    def names(self) -> dict[str, str]:
        path = self.root / "names.csv"
        if not path.exists():
            pytest.skip(f"estuary names.csv not found in {self.root}")
        out = {}
        for line in path.read_text(encoding="utf-8").splitlines()[1:]:
            if line.strip():
                key, _, name = line.partition(",")
                out[key.strip()] = name.strip()
        return out


@pytest.fixture(scope="session")
def estuary() -> EstuaryData:
    root = estuary_dir()
    required = ["dat.csv", "d_geo.csv", "weights.csv"]
    missing = [f for f in required if not (root / f).exists()]
    if missing:
        pytest.skip(
            f"estuary export not available ({root} lacks {missing}); "
            f"run scripts/export_estuary.R and set {ESTUARY_ENV}"
        )
    return EstuaryData(root)


def random_dissim(rng: np.random.Generator, n: int, ids=None) -> DissimMatrix:
    return DissimMatrix(n=n, values=rng.uniform(0.05, 4.0, size=condensed_size(n)), ids=ids)


def random_weights(rng: np.random.Generator, n: int) -> WeightVector:
    return WeightVector(rng.uniform(0.2, 3.0, size=n))
