"""Regularized LLE weight matrix and the bottom spectrum of (I - W) / eps^2.

Each row j of W solves the constrained local reconstruction problem

    (G_j^T G_j + c I_k) z = 1_k,   w = z / (1^T z),

with G_j the matrix whose columns are x_i - x_j over the neighbors i of j and
c = n * eps^(d1+3) the regularizer. Rows sum to 1 exactly after the final
normalization, so the constant vector is in the kernel of I - W by
construction.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .sampling import Domain, NeighborhoodIndex, PointCloud, neighborhoods

# Above this neighborhood size the SPD solve switches to the Woodbury form on
# the exact rank-d1 + c*I structure (identical solution, O(k) instead of O(k^3)).
_WOODBURY_CUTOFF = 64


class SolverMode(str, Enum):
    DENSE_NONSYMMETRIC = "dense"
    NONSYMMETRIC_ITERATIVE = "arnoldi"
    SYMMETRIZED_ITERATIVE = "symmetrized"


@dataclass(frozen=True)
class WeightMatrix:
    w: scipy.sparse.csr_matrix
    epsilon: float
    c: float
    domain: Domain

    @property
    def n(self) -> int:
        return self.w.shape[0]

    def asymmetry(self) -> float:
        """Frobenius-norm asymmetry diagnostic ||W - W^T||_F / ||W||_F."""
        diff = (self.w - self.w.T).tocsr()
        denom = scipy.sparse.linalg.norm(self.w)
        return scipy.sparse.linalg.norm(diff) / denom


@dataclass(frozen=True)
class SpectrumResult:
    eigenvalues: np.ndarray  # ascending, scaled by eps^-2
    eigenvectors: np.ndarray | None  # (n, k) real
    asymmetry: float
    mode: SolverMode
    max_imag: float  # dense mode: largest |Im| among the selected eigenvalues


def default_regularizer(n: int, epsilon: float, domain: Domain) -> float:
    return n * epsilon ** (domain.ambient_dim + 3)


def local_weights(
    cloud: PointCloud, nbrs: NeighborhoodIndex, j: int, c: float
) -> tuple[np.ndarray, np.ndarray]:
    """Weight row for point j: neighbor indices and weights summing to 1."""
    if c <= 0:
        raise ValueError(f"regularizer must be positive, got {c}")
    idx = nbrs.neighbors[j]
    k = len(idx)
    if k == 0:
        raise ValueError(f"point {j} has no neighbors")
    g = cloud.points[idx] - cloud.points[j]  # (k, d1)
    if k <= _WOODBURY_CUTOFF:
        m = g @ g.T + c * np.eye(k)
        try:
            cf = scipy.linalg.cho_factor(m, lower=True)
        except scipy.linalg.LinAlgError as exc:  # pragma: no cover
            raise RuntimeError(f"local Gram solve failed for point {j}") from exc
        z = scipy.linalg.cho_solve(cf, np.ones(k))
    else:
        z = _woodbury_solve(g, c)
    s = z.sum()
    if s == 0 or not np.isfinite(s):  # pragma: no cover
        raise RuntimeError(f"degenerate weight normalization for point {j}")
    return idx, z / s


def _woodbury_solve(g: np.ndarray, c: float) -> np.ndarray:
    """Solve (c I_k + G G^T) z = 1 with G = g of shape (k, d1), d1 small."""
    d1 = g.shape[1]
    s = c * np.eye(d1) + g.T @ g  # (d1, d1)
    rhs = g.sum(axis=0)
    y = np.linalg.solve(s, rhs)
    return (np.ones(len(g)) - g @ y) / c


def build_w(
    cloud: PointCloud,
    epsilon: float,
    nbrs: NeighborhoodIndex | None = None,
    regularizer: float | None = None,
) -> WeightMatrix:
    """Assemble the sparse row-stochastic LLE matrix."""
    if nbrs is None:
        nbrs = neighborhoods(cloud, epsilon)
    c = default_regularizer(cloud.n, epsilon, cloud.domain) if regularizer is None else regularizer
    rows, cols, vals = [], [], []
    for j in range(cloud.n):
        idx, w = local_weights(cloud, nbrs, j, c)
        rows.append(np.full(len(idx), j, dtype=np.int64))
        cols.append(idx)
        vals.append(w)
    mat = scipy.sparse.csr_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
        shape=(cloud.n, cloud.n),
    )
    return WeightMatrix(w=mat, epsilon=epsilon, c=c, domain=cloud.domain)


def _seeded_start(n: int, seed: int) -> np.ndarray:
    return np.random.default_rng(seed).standard_normal(n)


def spectrum_lle(
    wm: WeightMatrix,
    k: int,
    mode: SolverMode | None = None,
    seed: int = 0,
    with_vectors: bool = True,
) -> SpectrumResult:
    """k smallest eigenvalues of (I - W) / eps^2, ascending.

    Dense mode eigendecomposes I - W directly and reports the largest imaginary
    part it discarded. Arnoldi mode runs shift-invert on the sparse I - W
    itself, so the boundary asymmetry stays in the operator; it is the default
    above the dense cutoff. Symmetrized mode runs shift-invert Lanczos on
    (I - W + (I - W)^T) / 2; near the boundary the symmetrized operator admits
    spurious low modes, so its bottom spectrum is a diagnostic, not the
    reference. All iterative starts are deterministic.
    """
    n = wm.n
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= {n}, got {k}")
    if mode is None:
        mode = SolverMode.DENSE_NONSYMMETRIC if n <= 4000 else SolverMode.NONSYMMETRIC_ITERATIVE
    asym = wm.asymmetry()
    scale = wm.epsilon**-2
    # Shift slightly below the spectrum so shift-invert targets the bottom.
    sigma = -1e-3 * wm.epsilon**2

    if mode is SolverMode.DENSE_NONSYMMETRIC:
        a = np.eye(n) - wm.w.toarray()
        lam, vec = scipy.linalg.eig(a)
        order = np.argsort(lam.real, kind="stable")[:k]
        lam = lam[order]
        max_imag = float(np.abs(lam.imag).max()) if k else 0.0
        vals = lam.real * scale
        vecs = vec[:, order].real if with_vectors else None
    elif mode is SolverMode.NONSYMMETRIC_ITERATIVE:
        a = scipy.sparse.identity(n, format="csc") - wm.w.tocsc()
        lam, vec = scipy.sparse.linalg.eigs(
            a, k=k, sigma=sigma, which="LM", v0=_seeded_start(n, seed), tol=0.0
        )
        order = np.argsort(lam.real, kind="stable")
        lam = lam[order]
        max_imag = float(np.abs(lam.imag).max()) if k else 0.0
        vals = lam.real * scale
        vecs = vec[:, order].real if with_vectors else None
    else:
        a = scipy.sparse.identity(n, format="csr") - wm.w
        s = ((a + a.T) * 0.5).tocsc()
        lam, vec = scipy.sparse.linalg.eigsh(
            s, k=k, sigma=sigma, which="LM", v0=_seeded_start(n, seed), tol=0.0
        )
        order = np.argsort(lam, kind="stable")
        vals = lam[order] * scale
        max_imag = 0.0
        vecs = vec[:, order] if with_vectors else None

    if vecs is not None:
        # Deterministic sign: largest-magnitude entry of each vector positive.
        for col in range(vecs.shape[1]):
            pivot = np.argmax(np.abs(vecs[:, col]))
            if vecs[pivot, col] < 0:
                vecs[:, col] = -vecs[:, col]
    return SpectrumResult(
        eigenvalues=np.asarray(vals, dtype=float),
        eigenvectors=vecs,
        asymmetry=asym,
        mode=mode,
        max_imag=max_imag,
    )


def embed(wm: WeightMatrix, d2: int, seed: int = 0) -> np.ndarray:
    """Embedding coordinates: bottom nonconstant eigenvectors of (I-W)^T (I-W)."""
    n = wm.n
    if d2 < 1:
        raise ValueError(f"embedding dimension must be >= 1, got {d2}")
    if d2 > n:
        raise ValueError(f"embedding dimension {d2} exceeds point count {n}")
    a = scipy.sparse.identity(n, format="csr") - wm.w
    m = (a.T @ a).tocsc()
    kk = min(d2 + 1, n)
    lam, vec = scipy.sparse.linalg.eigsh(
        m, k=kk, sigma=-1e-12, which="LM", v0=_seeded_start(n, seed), tol=0.0
    )
    order = np.argsort(lam, kind="stable")
    vec = vec[:, order]
    # Drop the constant kernel vector, deflate what remains against 1.
    ones = np.ones(n) / np.sqrt(n)
    cols = []
    for col in range(vec.shape[1]):
        v = vec[:, col]
        if len(cols) == d2:
            break
        if abs(v @ ones) > 0.9:  # the constant mode
            continue
        v = v - (v @ ones) * ones
        v /= np.linalg.norm(v)
        pivot = np.argmax(np.abs(v))
        if v[pivot] < 0:
            v = -v
        cols.append(v)
    if len(cols) < d2:  # pragma: no cover
        raise RuntimeError("eigensolver did not separate the constant mode")
    return np.column_stack(cols)


def write_w(wm: WeightMatrix, path) -> None:
    """Sparse triplet text format: header 'n nnz epsilon c', then row col value."""
    coo = wm.w.tocoo()
    order = np.lexsort((coo.col, coo.row))
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"{wm.n} {coo.nnz} {wm.epsilon:.17g} {wm.c:.17g}\n")
        for i in order:
            fh.write(f"{coo.row[i]} {coo.col[i]} {coo.data[i]:.17g}\n")


def read_w(path, domain: Domain = Domain.INTERVAL) -> WeightMatrix:
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().split()
        n, nnz = int(header[0]), int(header[1])
        epsilon, c = float(header[2]), float(header[3])
        rows = np.empty(nnz, dtype=np.int64)
        cols = np.empty(nnz, dtype=np.int64)
        vals = np.empty(nnz)
        for i in range(nnz):
            parts = fh.readline().split()
            rows[i], cols[i], vals[i] = int(parts[0]), int(parts[1]), float(parts[2])
    mat = scipy.sparse.csr_matrix((vals, (rows, cols)), shape=(n, n))
    return WeightMatrix(w=mat, epsilon=epsilon, c=c, domain=domain)
