"""Random instance factories shared by the test modules."""
import numpy as np

from exclus.core import Clustering, Dataset
from exclus.reference import ReferenceConfig, kmeans_reference


def voronoi_reference(X, C):
    d2 = ((X[:, None, :] - C[None, :, :]) ** 2).sum(axis=2)
    return Clustering(np.argmin(d2, axis=1), C)


def random_points(rng, n, d, grid=False, width=6):
    if grid:
        # small integer grid: lots of coordinate ties
        return rng.integers(0, width, size=(n, d)).astype(float)
    return rng.normal(size=(n, d)) * rng.uniform(0.5, 4.0, size=d)


def random_instance(rng, n, d, k, grid=False, lloyd=False):
    """Dataset plus a reference clustering with k distinct representatives."""
    while True:
        X = random_points(rng, n, d, grid, width=max(6, 2 * k))
        if np.unique(X, axis=0).shape[0] >= k:
            break
    ds = Dataset(X)
    if lloyd:
        return ds, kmeans_reference(ds, ReferenceConfig(k=k, seed=int(rng.integers(1 << 30)), n_init=2))
    rows = rng.choice(np.unique(X, axis=0).shape[0], size=k, replace=False)
    C = np.unique(X, axis=0)[rows]
    if not grid and rng.random() < 0.5:
        C = C + rng.normal(scale=0.1, size=C.shape)
    return ds, voronoi_reference(X, C)
