"""Discrete Dirichlet Laplacian, its eigendecomposition and the discrete sine oracle."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .grid import Grid, GridFunction, build_grid


class SpectralError(RuntimeError):
    """An eigendecomposition failed its residual checks."""


def laplacian_sparse(grid: Grid) -> sp.csr_matrix:
    """``-Delta_h`` with zero extension: ``2d/h^2`` on the diagonal, ``-1/h^2`` per neighbor."""
    N, h = grid.size, grid.h
    rows, cols = [], []
    for axis in range(grid.d):
        for i in range(N):
            j = grid.neighbor(i, axis, +1)
            if j >= 0:
                rows += [i, j]
                cols += [j, i]
    off = sp.coo_matrix((np.full(len(rows), -1.0 / h**2), (rows, cols)), shape=(N, N))
    diag = sp.identity(N, format="coo") * (2.0 * grid.d / h**2)
    return (off + diag).tocsr()


def assemble_laplacian(grid: Grid) -> np.ndarray:
    """Dense (2d+1)-point Dirichlet Laplacian on the interior nodes of ``grid``."""
    return laplacian_sparse(grid).toarray()


@dataclass(frozen=True, eq=False)
class SpectralDecomposition:
    """Eigenpairs of a grid operator, orthonormal in ``<f, g> = sum h^d f_i g_i``.

    ``A = Q diag(eigenvalues) Q^T W`` with ``W = h^d I``.
    """

    eigenvalues: np.ndarray
    Q: np.ndarray
    weight: float
    grid: Grid | None = None

    def __post_init__(self):
        self.eigenvalues.setflags(write=False)
        self.Q.setflags(write=False)

    @property
    def size(self) -> int:
        return self.eigenvalues.shape[0]

    @property
    def lambda_min(self) -> float:
        return float(self.eigenvalues[0])

    @property
    def lambda_max(self) -> float:
        return float(self.eigenvalues[-1])

    def reconstruct(self) -> np.ndarray:
        return (self.Q * self.eigenvalues) @ self.Q.T * self.weight

    def orthonormality_defect(self) -> float:
        G = self.Q.T @ self.Q * self.weight
        return float(np.abs(G - np.eye(self.size)).max())

    def to_csv(self, path) -> None:
        """Eigenvalue list with header ``index,lambda``."""
        with open(path, "w") as fh:
            fh.write("index,lambda\n")
            for i, lam in enumerate(self.eigenvalues):
                fh.write(f"{i},{float(lam)!r}\n")


def eigendecompose(A: np.ndarray, grid: Grid) -> SpectralDecomposition:
    """Dense symmetric eigensolve with weighted normalisation and residual checks.

    Raises :class:`SpectralError` if ``A`` is not symmetric, if
    ``max|Q^T W Q - I| > 1e-10`` or if the reconstruction residual exceeds
    ``1e-8 max|lambda|``.
    """
    A = np.asarray(A, dtype=float)
    if A.shape != (grid.size, grid.size):
        raise ValueError("operator dimension does not match the grid")
    if np.abs(A - A.T).max() > 0:
        raise SpectralError("operator is not symmetric")
    lam, V = scipy.linalg.eigh(A, driver="evd")
    # fix the sign of each eigenvector for reproducible output
    pivot = np.argmax(np.abs(V), axis=0)
    V = V * np.sign(V[pivot, np.arange(V.shape[1])])
    w = grid.weight
    S = SpectralDecomposition(lam, V / math.sqrt(w), w, grid)
    ortho = S.orthonormality_defect()
    if ortho > 1e-10:
        raise SpectralError(f"eigenvectors not orthonormal: defect {ortho:.3e}")
    resid = float(np.abs(A - S.reconstruct()).max())
    if resid > 1e-8 * float(np.abs(lam).max()):
        raise SpectralError(f"reconstruction residual {resid:.3e} too large")
    return S


def sine_eigenvalue(h: float, m: int, k: int, Lx: float = 1.0, Ly: float = 1.0) -> float:
    return 4.0 / h**2 * (math.sin(m * math.pi * h / (2 * Lx)) ** 2
                         + math.sin(k * math.pi * h / (2 * Ly)) ** 2)


def dst_oracle_rectangle(n, sides=(1.0, 1.0)) -> SpectralDecomposition:
    """Exact eigenpairs of the discrete Laplacian on a rectangle (discrete sine modes).

    ``n`` is either the cell count used by ``build_grid("rectangle", n, sides=sides)``
    or an existing rectangle :class:`Grid`; eigenvectors are laid out in that
    grid's node order.  Modes are sorted by eigenvalue, ties by mode index.
    """
    if isinstance(n, Grid):
        grid = n
        if grid.kind != "rectangle":
            raise ValueError("the discrete sine oracle only applies to rectangles")
    else:
        grid = build_grid("rectangle", n, sides=sides)
    sides = grid.params["sides"]
    h = grid.h
    counts = [int(round(L / h)) for L in sides]
    modes = list(np.ndindex(*[c - 1 for c in counts]))
    modes = [tuple(m + 1 for m in mode) for mode in modes]

    lam = np.empty(len(modes))
    Q = np.empty((grid.size, len(modes)))
    for col, mode in enumerate(modes):
        val = 0.0
        vec = np.ones(grid.size)
        for axis, (m, L) in enumerate(zip(mode, sides)):
            val += 4.0 / h**2 * math.sin(m * math.pi * h / (2 * L)) ** 2
            vec = vec * np.sin(m * math.pi * grid.nodes[:, axis] / L)
        lam[col] = val
        Q[:, col] = vec * math.sqrt(2.0 ** grid.d / math.prod(sides))
    order = np.argsort(lam, kind="stable")
    return SpectralDecomposition(lam[order], Q[:, order], grid.weight, grid)


def eigenspace_clusters(eigenvalues: np.ndarray, rtol: float = 1e-8) -> list[np.ndarray]:
    """Group sorted eigenvalues into clusters of (numerically) equal values."""
    groups, start = [], 0
    for i in range(1, len(eigenvalues) + 1):
        if i == len(eigenvalues) or (
            eigenvalues[i] - eigenvalues[i - 1] > rtol * max(abs(eigenvalues[i]), 1.0)
        ):
            groups.append(np.arange(start, i))
            start = i
    return groups


def compare_spectra(S: SpectralDecomposition, oracle: SpectralDecomposition) -> dict:
    """Eigenvalue and invariant-subspace agreement between two decompositions.

    Degenerate eigenvalues are compared through the principal angles between
    the spanned subspaces, never vector by vector.
    """
    if S.size != oracle.size:
        raise ValueError("decompositions have different sizes")
    rel = np.abs(S.eigenvalues - oracle.eigenvalues) / np.abs(oracle.eigenvalues)
    root = math.sqrt(S.weight)
    max_angle = 0.0
    for idx in eigenspace_clusters(oracle.eigenvalues):
        angles = scipy.linalg.subspace_angles(S.Q[:, idx] * root, oracle.Q[:, idx] * root)
        max_angle = max(max_angle, float(np.max(angles)))
    return {"max_rel_eigenvalue_error": float(rel.max()), "max_subspace_angle": max_angle}


def solve_dirichlet(A: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    u = scipy.linalg.solve(A, rhs, assume_a="pos")
    resid = np.linalg.norm(A @ u - rhs) / max(np.linalg.norm(rhs), 1e-300)
    if resid > 1e-8:
        raise SpectralError(f"solver residual {resid:.3e} exceeds 1e-8")
    return u


def elliptic_regularity_check(f: GridFunction, ell: int, p, A: np.ndarray | None = None) -> float:
    """Ratio ``||u||_{W^{ell+2,p}} / (||u||_p + ||f||_{W^{ell,p}})`` for ``Delta_h u = f``.

    ``u`` solves ``A u = -f``.  The zero datum returns 0 by convention.
    """
    from .derivatives import sobolev_norm
    from .grid import lp_norm

    if ell < 0:
        raise ValueError("ell must be non-negative")
    grid = f.grid
    if not np.any(f.values):
        return 0.0
    if A is None:
        A = assemble_laplacian(grid)
    u = GridFunction(grid, solve_dirichlet(A, -f.values))
    num = sobolev_norm(u, ell + 2, p)
    den = lp_norm(u, p) + sobolev_norm(f, ell, p)
    return num / den


def elliptic_ratio_ensemble(grid: Grid, ell: int, p, samples: int = 50, seed: int = 0) -> dict:
    """Max and median regularity ratio over random data ``f`` with i.i.d. normal values."""
    rng = np.random.default_rng(seed)
    A = assemble_laplacian(grid)
    ratios = [elliptic_regularity_check(GridFunction(grid, rng.standard_normal(grid.size)), ell, p, A)
              for _ in range(samples)]
    return {"max": float(np.max(ratios)), "median": float(np.median(ratios)), "ratios": ratios}
