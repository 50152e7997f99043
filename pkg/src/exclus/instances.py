"""Dataset ingestion, adversarial instance generators and synthetic blobs."""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Union

import numpy as np

from .core import Clustering, Dataset, StructuralError

# number of classes, used as k in the benchmark
BUNDLED = {"iris": 3, "wine": 3, "breast_cancer": 2}

_FAR_EXPONENT_CAP = 25


@dataclass(frozen=True)
class KCenterLBParams:
    b: int
    p: int
    d: int
    extra: int = 0

    def __post_init__(self):
        if self.b < 3:
            raise ValueError(f"base b must be at least 3, got {self.b}")
        if self.p < 1:
            raise ValueError(f"digit count p must be positive, got {self.p}")
        if self.p > self.d:
            raise ValueError(f"digit count p={self.p} exceeds dimension d={self.d}")
        if self.extra < 0:
            raise ValueError("extra must be nonnegative")

    @property
    def k_prime(self) -> int:
        return self.b**self.p

    @property
    def k(self) -> int:
        return self.k_prime + self.extra


def _digits(value: int, base: int, width: int) -> list[int]:
    """Most significant digit first."""
    out = []
    for _ in range(width):
        value, r = divmod(value, base)
        out.append(r)
    return out[::-1]


def _undigits(digits: list[int], base: int) -> int:
    v = 0
    for g in digits:
        v = v * base + g
    return v


def lb_center(index: int, params: KCenterLBParams) -> np.ndarray:
    """Coordinates of one of the first ``b**p`` centers.

    Coordinate ``j`` (0-based, ``j < p``) decodes the base-``b`` digits of
    ``index`` after ``j`` right circular shifts; coordinate ``j >= p`` copies
    coordinate ``j mod p``.
    """
    digs = _digits(index, params.b, params.p)
    head = []
    for j in range(params.p):
        shifted = digs[len(digs) - j :] + digs[: len(digs) - j] if j else digs
        head.append(_undigits(shifted, params.b))
    return np.array([head[j % params.p] for j in range(params.d)], dtype=float)


def far_value(i: int, k: int) -> float:
    """Coordinate of far center ``i``: ``k**i`` up to the exponent cap, then a linear ladder above it.

    The cap also shrinks for huge ``k`` so the top rung stays below 1e300.
    """
    cap = min(_FAR_EXPONENT_CAP, int(300 / math.log10(k)))
    if i <= cap:
        return float(k) ** i
    return float(k) ** cap * (i - cap + 1)


def gen_kcenter_lb(params: KCenterLBParams) -> tuple[Dataset, Clustering]:
    """Instance whose unrestricted k-centers cost is 3/4 but every tree pays far more.

    Rows: the k centers, then for each of the first ``b**p`` centers its 2d
    satellites at -3/4 and +3/4 along each axis.
    """
    kp, k, d = params.k_prime, params.k, params.d
    centers = np.empty((k, d))
    for i in range(kp):
        centers[i] = lb_center(i, params)
    for i in range(kp, k):
        centers[i] = far_value(i, max(k, 2))
    rows = [centers]
    labels = [np.arange(k)]
    for i in range(kp):
        sat = np.repeat(centers[i : i + 1], 2 * d, axis=0)
        for j in range(d):
            sat[2 * j, j] -= 0.75
            sat[2 * j + 1, j] += 0.75
        rows.append(sat)
        labels.append(np.full(2 * d, i))
    X = np.vstack(rows)
    return Dataset(X), Clustering(np.concatenate(labels), centers.copy())


def kcenter_lb_lower_bound(params: KCenterLBParams) -> float:
    """Cost every explainable clustering of the instance must reach."""
    return math.sqrt(params.d // params.p) * params.b ** (params.p - 1) / 4 - 3 / 8


def gen_spacing_lb(k: int, p: int) -> tuple[Dataset, Clustering]:
    """L-shaped cluster plus k-1 singletons; the reference spacing is p-1."""
    if p < 2:
        raise ValueError(f"p must be at least 2, got {p}")
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    l_shape = [(0.0, 0.0)] + [(0.0, float(i)) for i in range(1, p + 1)] + [(float(i), 0.0) for i in range(1, p + 1)]
    singles = [(float((i - 1) * (p - 1)), float(p - 1)) for i in range(2, k + 1)]
    X = np.array(l_shape + singles)
    labels = np.array([0] * len(l_shape) + list(range(1, k)))
    reps = np.array([X[labels == g].mean(axis=0) for g in range(k)])
    return Dataset(X), Clustering(labels, reps)


def gen_blobs(n: int, k: int, d: int, separation: float, seed: int, scale: float = 1.0) -> tuple[Dataset, Clustering]:
    """Isotropic Gaussian blobs whose centers are pairwise at least ``separation`` apart.

    Point ``j`` belongs to blob ``j mod k``; representatives are blob centroids.
    """
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    rng = np.random.default_rng(seed)
    side = separation * max(2.0, k ** (1.0 / d)) * 2.0
    centers: list = []
    tries = 0
    while len(centers) < k:
        c = rng.uniform(0.0, side, size=d)
        if all(np.linalg.norm(c - o) >= separation for o in centers):
            centers.append(c)
        tries += 1
        if tries > 10000 * k:
            side *= 1.5
            tries = 0
    centers_arr = np.array(centers)
    labels = np.arange(n) % k
    X = centers_arr[labels] + rng.normal(scale=scale, size=(n, d))
    reps = np.array([X[labels == g].mean(axis=0) for g in range(k)])
    return Dataset(X), Clustering(labels, reps)


def _is_number(tok: str) -> bool:
    try:
        float(tok)
    except ValueError:
        return False
    return True


def load_csv(path: Union[str, Path]) -> Dataset:
    """Rows of decimal numbers; a first line whose first token is not numeric is a header."""
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r and any(tok.strip() for tok in r)]
    if not rows:
        raise StructuralError(f"{path}: empty file")
    if not _is_number(rows[0][0].strip()):
        rows = rows[1:]
        if not rows:
            raise StructuralError(f"{path}: header but no data")
    width = len(rows[0])
    data = np.empty((len(rows), width))
    for r, row in enumerate(rows):
        if len(row) != width:
            raise StructuralError(f"{path}: row {r + 1} has {len(row)} fields, expected {width}")
        for c, tok in enumerate(row):
            try:
                v = float(tok)
            except ValueError:
                raise StructuralError(f"{path}: non-numeric cell {tok!r} in row {r + 1}") from None
            if not math.isfinite(v):
                raise StructuralError(f"{path}: non-finite value {tok!r} in row {r + 1}")
            data[r, c] = v
    return Dataset(data)


def format_number(v: float) -> str:
    return format(float(v), ".17g")


def write_csv(path: Union[str, Path], dataset, header=None) -> None:
    X = dataset.points if isinstance(dataset, Dataset) else np.asarray(dataset, dtype=float)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if header is not None:
            w.writerow(header)
        for row in X:
            w.writerow([format_number(v) for v in row])


def bundled_path(name: str) -> Path:
    if name not in BUNDLED:
        raise KeyError(f"no bundled dataset {name!r}; available: {sorted(BUNDLED)}")
    return Path(str(resources.files("exclus") / "data" / f"{name}.csv"))


def load_bundled(name: str) -> Dataset:
    return load_csv(bundled_path(name))
