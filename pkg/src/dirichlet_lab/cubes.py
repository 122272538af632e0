"""Partition of a grid into cubes of side ``t^{1/2}`` and the l^1(L^2)_t machinery."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .grid import Grid, GridFunction, lp_norm


@dataclass(frozen=True, eq=False)
class CubeDecomposition:
    """Assignment of each node to a cube ``C_t(n)``.

    ``anchor="center"``: ``C_t(n) = t^{1/2} n + [-s/2, s/2)^d`` (cube centered
    at ``t^{1/2} n``).  ``anchor="corner"``: ``t^{1/2} n + [0, s)^d``.  Both are
    half-open, so every node lies in exactly one cube.
    """

    grid: Grid
    t: float
    side: float
    anchor: str
    labels: np.ndarray  # (N, d) integer cube index per node
    cubes: tuple  # sorted distinct cube indices
    members: tuple  # node index arrays, aligned with ``cubes``

    @property
    def count(self) -> int:
        return len(self.cubes)

    def center(self, c: int) -> np.ndarray:
        n = np.asarray(self.cubes[c], dtype=float)
        return self.side * (n if self.anchor == "center" else n + 0.5)


def cube_partition(grid: Grid, t: float, anchor: str = "center") -> CubeDecomposition:
    """Split the nodes into cubes of side ``t^{1/2}``; rejects ``t^{1/2} < 2h``."""
    if anchor not in ("center", "corner"):
        raise ValueError("anchor must be 'center' or 'corner'")
    if not t > 0:
        raise ValueError("t must be positive")
    side = math.sqrt(t)
    if side < 2 * grid.h * (1 - 1e-12):
        raise ValueError(f"unresolvable cubes: t^(1/2) = {side:.4g} < 2h = {2 * grid.h:.4g}")
    shift = 0.5 if anchor == "center" else 0.0
    # small nudge keeps nodes that sit exactly on a cube face in the upper cube
    labels = np.floor(grid.nodes / side + shift + 1e-12).astype(int)
    keys, inverse = np.unique(labels, axis=0, return_inverse=True)
    inverse = inverse.reshape(-1)
    members = tuple(np.flatnonzero(inverse == c) for c in range(len(keys)))
    return CubeDecomposition(grid, t, side, anchor, labels,
                             tuple(tuple(int(v) for v in k) for k in keys), members)


def _decomp(u_grid: Grid, t, decomposition):
    if decomposition is None:
        return cube_partition(u_grid, t)
    if decomposition.grid is not u_grid:
        raise ValueError("decomposition belongs to another grid")
    return decomposition


def block_l2_norms(u: GridFunction, t: float, decomposition: CubeDecomposition | None = None) -> np.ndarray:
    dec = _decomp(u.grid, t, decomposition)
    w = math.sqrt(u.grid.weight)
    return np.array([w * np.linalg.norm(u.values[idx]) for idx in dec.members])


def l1l2_norm(u: GridFunction, t: float, decomposition: CubeDecomposition | None = None) -> float:
    """``sum_n ||u||_{L^2(C_t(n))}``."""
    return float(block_l2_norms(u, t, decomposition).sum())


def holder_cube_check(u: GridFunction, t: float, decomposition: CubeDecomposition | None = None):
    """``(lhs, rhs, pass)`` for ``||u||_1 <= t^{d/4} ||u||_{l1(L2)_t}``.

    Passing allows a relative slack of ``4h / t^{1/2}`` for the discrete cube
    volume exceeding ``t^{d/2}``.
    """
    dec = _decomp(u.grid, t, decomposition)
    lhs = lp_norm(u, 1)
    rhs = t ** (u.grid.d / 4) * l1l2_norm(u, t, dec)
    tol = 4 * u.grid.h / math.sqrt(t)
    return lhs, rhs, bool(lhs <= rhs * (1 + tol))


def weighted_operator_norm(T, alpha: float, t: float, decomposition: CubeDecomposition) -> float:
    """``max_n || |x - t^{1/2} n|^alpha T chi_{C_t(n)} ||_{2->2}`` over non-empty cubes."""
    return float(max(weighted_block_norms(T, alpha, decomposition)))


def weighted_block_norms(T, alpha: float, decomposition: CubeDecomposition) -> np.ndarray:
    import scipy.linalg

    if alpha < 0:
        raise ValueError("alpha must be non-negative")
    T = np.asarray(T)
    nodes = decomposition.grid.nodes
    out = []
    for c, idx in enumerate(decomposition.members):
        dist = np.linalg.norm(nodes - decomposition.center(c), axis=1)
        block = (dist**alpha)[:, None] * T[:, idx] if alpha else T[:, idx]
        out.append(scipy.linalg.svdvals(block, check_finite=False)[0])
    return np.array(out)


def cube_report_rows(u: GridFunction, T, alpha: float, t: float, anchor: str = "center") -> list[dict]:
    """Per-cube rows ``(cube, l2 block norm, weighted norm)`` for CSV export."""
    dec = cube_partition(u.grid, t, anchor)
    l2 = block_l2_norms(u, t, dec)
    weighted = weighted_block_norms(T, alpha, dec)
    return [{"cube": "/".join(map(str, dec.cubes[c])), "l2_block_norm": float(l2[c]),
             "weighted_norm": float(weighted[c])} for c in range(dec.count)]
