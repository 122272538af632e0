"""Finite-difference derivative operators, gradient magnitudes and N_ell.

Two first-derivative flavors are provided:

``"boundary"``
    Centered differences where both neighbors are interior nodes and
    second-order one-sided differences next to the boundary, using interior
    values only.  Exact on quadratics at every node; used to measure
    derivatives up to the boundary, where a Dirichlet function vanishes but its
    normal derivative does not.

``"zero"``
    Pure centered differences with the zero (Dirichlet) extension.  This is the
    flavor that makes ``X A_h - A_h X = 2 D`` hold exactly.
"""

from __future__ import annotations

import functools
import math
from typing import Callable, Sequence

import numpy as np
import scipy.sparse as sp

from .grid import Grid, GridFunction, check_multi_index, multi_indices, multinomial, weighted_lp

FLAVORS = ("boundary", "zero")


def _check_flavor(flavor: str) -> None:
    if flavor not in FLAVORS:
        raise ValueError(f"unknown stencil flavor {flavor!r}; expected one of {FLAVORS}")


@functools.lru_cache(maxsize=64)
def first_derivative(grid: Grid, axis: int, flavor: str = "boundary") -> sp.csr_matrix:
    """Sparse first-derivative matrix along ``axis``."""
    _check_flavor(flavor)
    if not 0 <= axis < grid.d:
        raise ValueError(f"axis {axis} out of range for d = {grid.d}")
    N, h = grid.size, grid.h
    rows, cols, vals = [], [], []

    def put(i, j, v):
        rows.append(i)
        cols.append(j)
        vals.append(v)

    for i in range(N):
        fwd, bwd = grid.neighbor(i, axis, +1), grid.neighbor(i, axis, -1)
        if flavor == "zero" or (fwd >= 0 and bwd >= 0):
            if fwd >= 0:
                put(i, fwd, 0.5 / h)
            if bwd >= 0:
                put(i, bwd, -0.5 / h)
            continue
        fwd2, bwd2 = grid.neighbor(i, axis, +2), grid.neighbor(i, axis, -2)
        if fwd >= 0 and fwd2 >= 0:
            put(i, i, -1.5 / h)
            put(i, fwd, 2.0 / h)
            put(i, fwd2, -0.5 / h)
        elif bwd >= 0 and bwd2 >= 0:
            put(i, i, 1.5 / h)
            put(i, bwd, -2.0 / h)
            put(i, bwd2, 0.5 / h)
        elif fwd >= 0:
            # two-node chord on clipped domains: first order only
            put(i, i, -1.0 / h)
            put(i, fwd, 1.0 / h)
        elif bwd >= 0:
            put(i, i, 1.0 / h)
            put(i, bwd, -1.0 / h)
        # isolated node along this axis: no information, derivative 0
    D = sp.csr_matrix((vals, (rows, cols)), shape=(N, N))
    D.sum_duplicates()
    return D


def check_stencil_fits(grid: Grid, order: int) -> None:
    if grid.n < order + 3:
        raise ValueError(
            f"order-{order} stencils need n >= {order + 3}, grid has n = {grid.n}")


@functools.lru_cache(maxsize=256)
def _derivative_cached(grid: Grid, gamma: tuple, flavor: str) -> sp.csr_matrix:
    M = sp.identity(grid.size, format="csr")
    for axis, g in enumerate(gamma):
        D = first_derivative(grid, axis, flavor)
        for _ in range(g):
            M = D @ M
    return M.tocsr()


def derivative_matrix(grid: Grid, gamma: Sequence[int], flavor: str = "boundary") -> sp.csr_matrix:
    """Sparse matrix of ``d^gamma``: first-derivative matrices composed axis by axis."""
    _check_flavor(flavor)
    gamma = check_multi_index(gamma, grid.d)
    check_stencil_fits(grid, sum(gamma))
    return _derivative_cached(grid, gamma, flavor)


def derivative_family(grid: Grid, order: int, flavor: str = "boundary"):
    """``[(gamma, multinomial weight, matrix)]`` for every ``|gamma| = order``."""
    check_stencil_fits(grid, order)
    return [(g, multinomial(g), derivative_matrix(grid, g, flavor))
            for g in multi_indices(grid.d, order)]


def gradient_magnitude(u: GridFunction, s: int, flavor: str = "boundary") -> GridFunction:
    """Pointwise ``|nabla^s u| = (sum_{|gamma|=s} s!/gamma! |d^gamma u|^2)^(1/2)``."""
    if s < 0:
        raise ValueError("derivative order must be non-negative")
    if s == 0:
        return GridFunction(u.grid, np.abs(u.values))
    acc = np.zeros(u.grid.size)
    for _, weight, D in derivative_family(u.grid, s, flavor):
        acc += weight * np.abs(D @ u.values) ** 2
    return GridFunction(u.grid, np.sqrt(acc))


def gradient_stack_norm(u: GridFunction, s: int, p, flavor: str = "boundary") -> float:
    """``|| |nabla^s u| ||_p``."""
    from .norms import parse_p

    p = float(p) if not isinstance(p, str) else parse_p(p)
    return weighted_lp(gradient_magnitude(u, s, flavor).values, u.grid.weight, p)


def sobolev_norm(f: GridFunction, s: int, p, flavor: str = "boundary") -> float:
    """Discrete ``W^{s,p}`` norm ``(sum_{|gamma|<=s} ||d^gamma f||_p^p)^(1/p)``, max-combined for p = inf."""
    from .norms import parse_p

    p = parse_p(p) if isinstance(p, str) else float(p)
    if s < 0:
        raise ValueError("Sobolev order must be non-negative")
    check_stencil_fits(f.grid, s)
    w = f.grid.weight
    parts = [weighted_lp(f.values, w, p)]
    for order in range(1, s + 1):
        for gamma in multi_indices(f.grid.d, order):
            parts.append(weighted_lp(derivative_matrix(f.grid, gamma, flavor) @ f.values, w, p))
    parts = np.asarray(parts)
    if math.isinf(p):
        return float(parts.max())
    return float(np.sum(parts**p) ** (1 / p))


def n_ell(u_traj: Callable[[float], GridFunction], t: float, ell: int,
          flavor: str = "boundary") -> GridFunction:
    """``N_ell[u](t) = sum_{s=0}^{ell} t^{s/2} |nabla^s u(t)|`` as a grid function."""
    if t <= 0:
        raise ValueError("t must be positive")
    if ell < 0:
        raise ValueError("ell must be non-negative")
    u = u_traj(t)
    acc = np.abs(u.values).astype(float)
    for s in range(1, ell + 1):
        acc = acc + t ** (s / 2) * gradient_magnitude(u, s, flavor).values
    return GridFunction(u.grid, acc)


def neighbor_average(grid: Grid, axis: int) -> sp.csr_matrix:
    """``(f(x + h e_axis) + f(x - h e_axis)) / 2`` with the zero extension."""
    D = first_derivative(grid, axis, "zero")
    # |D| has 1/(2h) at each existing neighbor
    return (abs(D) * grid.h).tocsr()
