"""Uniform grids on the unit interval and unit disc, and eps-ball neighborhoods.

Point clouds are plain float64 arrays wrapped with a domain tag and the grid
spacing. Neighborhoods are strict open eps-balls in the ambient Euclidean
metric; ties at exactly eps are excluded.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
from scipy.spatial import cKDTree


class Domain(str, Enum):
    INTERVAL = "interval"
    DISC = "disc"

    @property
    def ambient_dim(self) -> int:
        return 1 if self is Domain.INTERVAL else 2


class IsolatedPointError(RuntimeError):
    """A point has no neighbors: the grid is too coarse for the radius."""


@dataclass(frozen=True)
class PointCloud:
    points: np.ndarray  # (n, d1)
    domain: Domain
    spacing: float

    @property
    def n(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class NeighborhoodIndex:
    neighbors: tuple  # per-point sorted int64 arrays
    radius: float

    def degree(self) -> np.ndarray:
        return np.array([len(nb) for nb in self.neighbors])


def grid_interval(n: int) -> PointCloud:
    """n equally spaced points on [0, 1] including both endpoints."""
    if n < 2:
        raise ValueError(f"interval grid needs n >= 2, got {n}")
    pts = np.linspace(0.0, 1.0, n).reshape(-1, 1)
    return PointCloud(points=pts, domain=Domain.INTERVAL, spacing=1.0 / (n - 1))


def grid_disc(m: int) -> PointCloud:
    """All points of the m x m lattice on [-1, 1]^2 with Euclidean norm <= 1.

    Lattice points landing exactly on the unit circle are kept.
    """
    if m < 2:
        raise ValueError(f"disc grid needs m >= 2, got {m}")
    axis = np.linspace(-1.0, 1.0, m)
    xx, yy = np.meshgrid(axis, axis, indexing="ij")
    pts = np.column_stack([xx.ravel(), yy.ravel()])
    # Decide membership on the integer lattice: point i,j sits at
    # ((2i-(m-1))/(m-1), (2j-(m-1))/(m-1)), so norm <= 1 is exact in int64.
    # A float norm drops points exactly on the circle, e.g. (0.6, 0.8).
    ii, jj = np.meshgrid(np.arange(m, dtype=np.int64), np.arange(m, dtype=np.int64), indexing="ij")
    ri = 2 * ii.ravel() - (m - 1)
    rj = 2 * jj.ravel() - (m - 1)
    keep = ri * ri + rj * rj <= (m - 1) ** 2
    return PointCloud(points=pts[keep], domain=Domain.DISC, spacing=2.0 / (m - 1))


def neighborhoods(cloud: PointCloud, epsilon: float) -> NeighborhoodIndex:
    """Symmetric strict eps-ball adjacency, sorted index lists per point.

    Raises IsolatedPointError if any point ends up with zero neighbors.
    """
    if epsilon <= 0:
        raise ValueError(f"radius must be positive, got {epsilon}")
    if cloud.n == 0:
        raise ValueError("empty point cloud")
    tree = cKDTree(cloud.points)
    pairs = tree.query_pairs(r=epsilon, output_type="ndarray")
    if pairs.size:
        # query_pairs uses <= r; the neighborhood relation is strict.
        d = np.linalg.norm(cloud.points[pairs[:, 0]] - cloud.points[pairs[:, 1]], axis=1)
        pairs = pairs[d < epsilon]
    lists: list[list[int]] = [[] for _ in range(cloud.n)]
    for i, j in pairs:
        lists[i].append(j)
        lists[j].append(i)
    empty = [i for i, nb in enumerate(lists) if not nb]
    if empty:
        raise IsolatedPointError(
            f"{len(empty)} points have no neighbors at radius {epsilon} "
            f"(first: index {empty[0]}); refine the grid or enlarge the radius"
        )
    arrays = tuple(np.array(sorted(nb), dtype=np.int64) for nb in lists)
    return NeighborhoodIndex(neighbors=arrays, radius=epsilon)


def supercriticality(cloud: PointCloud, epsilon: float) -> float:
    """Density diagnostic n * eps^d1; below ~50 neighborhoods get unreliable."""
    return cloud.n * epsilon**cloud.domain.ambient_dim
